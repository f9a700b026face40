"""Synthetic datasets standing in for the full-size benchmarks.

Text rules (token 0 is never emitted; it is reserved for padding):

``ordered_pair``
    Every sequence contains marker A (token 1) and marker B (token 2) exactly once at distinct
    random positions; the rest is filler drawn from ``[7, vocab)``. Label 1 iff A comes before B.
    Bag-of-words models cannot solve it; the order must be carried in the recurrent state.
``keyword_majority``
    Keyword set P = {1, 2, 3} and Q = {4, 5, 6}. A sequence gets c_p keywords from P and c_q from Q
    (1 <= c_p, c_q <= max(2, length // 4), c_p != c_q) at random positions, filler elsewhere;
    the rule needs length >= 4.
    Label 1 iff c_p > c_q.
"""

import numpy as np

from app.autodiff import Rng
from app.data.dataset import Dataset
from app.errors import DatasetError
from app.schemas.data import TextRule

MARKER_A = 1
MARKER_B = 2
KEYWORDS_P = (1, 2, 3)
KEYWORDS_Q = (4, 5, 6)
FIRST_FILLER = 7


def gen_two_moons(n: int, noise: float, seed: int) -> Dataset:
    """Two interleaved half circles with Gaussian jitter ``noise``."""
    if n < 2:
        raise DatasetError(f"two-moons needs n >= 2, got {n}")
    if noise < 0:
        raise DatasetError(f"noise must be non-negative, got {noise}")
    rng = Rng(seed)
    n_outer = n // 2
    n_inner = n - n_outer
    t_outer = np.linspace(0.0, np.pi, n_outer)
    t_inner = np.linspace(0.0, np.pi, n_inner)
    points = np.vstack(
        [
            np.column_stack([np.cos(t_outer), np.sin(t_outer)]),
            np.column_stack([1.0 - np.cos(t_inner), 0.5 - np.sin(t_inner)]),
        ]
    )
    labels = np.concatenate([np.zeros(n_outer, dtype=np.int64), np.ones(n_inner, dtype=np.int64)])
    order = rng.child("shuffle").permutation(n)
    points = points[order]
    labels = labels[order]
    if noise > 0:
        points = points + rng.child("noise").normal(points.shape, noise)
    return Dataset(points, labels, num_classes=2, provenance=f"two_moons(n={n}, noise={noise}, seed={seed})")


def _ordered_pair(rng: Rng, vocab: int, length: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    tokens = rng.child("filler").integers(FIRST_FILLER, vocab, (n, length))
    positions = rng.child("positions")
    labels = np.zeros(n, dtype=np.int64)
    for i in range(n):
        a, b = positions.permutation(length)[:2]
        tokens[i, a] = MARKER_A
        tokens[i, b] = MARKER_B
        labels[i] = int(a < b)
    return tokens, labels


def _keyword_majority(rng: Rng, vocab: int, length: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    cap = max(2, length // 4)
    if 2 * cap > length:
        raise DatasetError(f"keyword_majority needs length >= 4, got {length}")
    tokens = rng.child("filler").integers(FIRST_FILLER, vocab, (n, length))
    draws = rng.child("plants")
    labels = np.zeros(n, dtype=np.int64)
    for i in range(n):
        c_p, c_q = draws.permutation(cap)[:2] + 1
        slots = draws.permutation(length)[: c_p + c_q]
        keywords = np.concatenate(
            [
                np.asarray(KEYWORDS_P)[draws.integers(0, len(KEYWORDS_P), (c_p,))],
                np.asarray(KEYWORDS_Q)[draws.integers(0, len(KEYWORDS_Q), (c_q,))],
            ]
        )
        tokens[i, slots] = keywords
        labels[i] = int(c_p > c_q)
    return tokens, labels


def gen_text_synthetic(vocab: int, length: int, n: int, rule: TextRule | str, seed: int) -> Dataset:
    """Fixed-length token sequences labelled by a planted-pattern rule (see module docstring)."""
    if n < 2:
        raise DatasetError(f"text generator needs n >= 2, got {n}")
    if vocab <= FIRST_FILLER:
        raise DatasetError(f"vocab must exceed {FIRST_FILLER}, got {vocab}")
    if length < 2:
        raise DatasetError(f"length must be >= 2, got {length}")
    rule = TextRule(rule)
    rng = Rng(seed)
    match rule:
        case TextRule.ORDERED_PAIR:
            tokens, labels = _ordered_pair(rng, vocab, length, n)
        case TextRule.KEYWORD_MAJORITY:
            tokens, labels = _keyword_majority(rng, vocab, length, n)
    return Dataset(
        tokens.astype(np.int64),
        labels,
        num_classes=2,
        provenance=f"text_synthetic(vocab={vocab}, length={length}, n={n}, rule={rule.value}, seed={seed})",
    )

"""`data gen`: write a synthetic dataset to CSV."""

import argparse
from pathlib import Path

from app.commands.common import CommandOutcome, non_negative_int, positive_int
from app.data import gen_text_synthetic, gen_two_moons, write_csv_dataset
from app.schemas.data import TextRule
from app.schemas.run import RunKind

KINDS = ("two-moons", "text")


def register(subparsers) -> None:
    parser = subparsers.add_parser("data", help="dataset utilities")
    actions = parser.add_subparsers(dest="action", required=True)
    gen = actions.add_parser("gen", help="generate a synthetic dataset as CSV")
    gen.add_argument("--kind", required=True, choices=KINDS)
    gen.add_argument("--out", required=True, help="CSV file to write")
    gen.add_argument("--n", type=positive_int, default=1000, help="number of samples")
    gen.add_argument("--seed", type=non_negative_int, default=0)
    gen.add_argument("--noise", type=float, default=0.25, help="two-moons jitter")
    gen.add_argument("--vocab", type=positive_int, default=50, help="text vocabulary size")
    gen.add_argument("--length", type=positive_int, default=20, help="text sequence length")
    gen.add_argument("--rule", choices=[r.value for r in TextRule], default=TextRule.ORDERED_PAIR.value)
    gen.set_defaults(handler=run_gen)


def run_gen(args: argparse.Namespace) -> CommandOutcome:
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "two-moons":
        dataset = gen_two_moons(args.n, args.noise, args.seed)
    else:
        dataset = gen_text_synthetic(args.vocab, args.length, args.n, args.rule, args.seed)
    write_csv_dataset(path, dataset)
    return CommandOutcome(
        RunKind.DATA_GEN,
        path.parent,
        outputs=[path],
        metrics={"kind": args.kind, "n": len(dataset), "provenance": dataset.provenance},
        seeds=[args.seed],
        manifest_name=f"{path.stem}.manifest.json",
    )

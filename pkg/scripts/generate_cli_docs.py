#!/usr/bin/env python3
"""Generate CLI-COMMANDS.md from the argparse sub-commands."""

import argparse
import sys
from pathlib import Path

# Add the repository root to the Python path
repo_dir = Path(__file__).parent.parent
sys.path.insert(0, str(repo_dir))


def _subparsers(parser: argparse.ArgumentParser) -> dict[str, argparse.ArgumentParser]:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return dict(action.choices)
    return {}


def _describe(lines: list[str], name: str, parser: argparse.ArgumentParser, helps: dict[str, str]) -> None:
    children = _subparsers(parser)
    if children:
        for child_name, child in children.items():
            _describe(lines, f"{name} {child_name}", child, helps)
        return

    lines.append(f"## `dropattack {name}`")
    lines.append("")
    summary = helps.get(name) or parser.description
    if summary:
        lines.append(summary)
        lines.append("")

    lines.append("| Option | Default | Description |")
    lines.append("|--------|---------|-------------|")
    for action in parser._actions:
        if isinstance(action, argparse._HelpAction):
            continue
        flags = ", ".join(f"`{flag}`" for flag in action.option_strings) or f"`{action.dest}`"
        if action.required:
            flags += " (required)"
        default = "" if action.default in (None, False) else f"`{action.default}`"
        lines.append(f"| {flags} | {default} | {action.help or ''} |")
    lines.append("")


def generate_cli_docs() -> str:
    """Markdown reference of every sub-command and its options."""
    from app.main import build_parser

    parser = build_parser()
    lines = [
        "# CLI Commands",
        "",
        "> Auto-generated from the argparse parser. DO NOT EDIT MANUALLY.",
        "",
        "Exit codes: `0` success, `2` usage or configuration error, `3` numerical failure.",
        "",
    ]

    helps: dict[str, str] = {}
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            helps = {choice.dest: choice.help for choice in action._choices_actions}

    for name, sub in _subparsers(parser).items():
        _describe(lines, name, sub, helps)

    return "\n".join(lines)


def main():
    """Generate docs/CLI-COMMANDS.md."""
    output_path = repo_dir / "docs" / "CLI-COMMANDS.md"
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(generate_cli_docs(), encoding="utf-8")
    print(f"Generated {output_path}")


if __name__ == "__main__":
    main()

"""CLI sub-commands."""

from app.commands import analysis, data, experiments, train

COMMANDS = (train, experiments, analysis, data)

__all__ = ["COMMANDS"]

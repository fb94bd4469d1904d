"""MiniMod: a small ML module system with extended open."""

from ._core import MiniModError, check, cli, desugar, infer, run

__all__ = ["MiniModError", "check", "cli", "desugar", "infer", "run"]

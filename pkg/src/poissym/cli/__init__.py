"""Command line interface: problem files, reports and evidence replay."""

from .main import build_parser, main
from .problem import ProblemFile, ProblemFileError, load_problem, parse_problem

__all__ = ["ProblemFile", "ProblemFileError", "build_parser", "load_problem", "main", "parse_problem"]

"""Defaults and the run configuration shared by the CLI and the web API."""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from autfa.errors import ValidationError

DEFAULT_SEED = 0
DEFAULT_SEARCH_BOUND = 24
DEFAULT_INNER_BOUND = 6
DEFAULT_TRIALS = 100
DEFAULT_RADIUS = 4
DEFAULT_EQUIVARIANCE_RADIUS = 5
DEFAULT_SAMPLES = 2000


class OutputFormat(str, Enum):
    """Report rendering for CLI output."""

    TEXT = "text"
    JSON = "json"


@dataclass(frozen=True)
class Config:
    """
    Options for one CLI invocation.

    Attributes
    ----------
    subcommand : str
        Name of the subcommand being run.
    group_files : Tuple[str, ...]
        Shipped group names or paths to group JSON files.
    word : str
        Word text for reduce/translen/act.
    automorphism : str
        Automorphism text for act.
    trials : int
        Random trials per suite.
    seed : int
        Seed for every random choice.
    radius : int
        Ball radius for tree commands.
    search_bound : int
        Largest group order searched exhaustively.
    inner_bound : int
        Largest conjugator length accepted by the inner search.
    output_format : OutputFormat
        Text or JSON output.
    jobs : int
        Worker threads for suite instances.
    """

    subcommand: str = ""
    group_files: Tuple[str, ...] = ()
    word: str = ""
    automorphism: str = ""
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    radius: int = DEFAULT_RADIUS
    search_bound: int = DEFAULT_SEARCH_BOUND
    inner_bound: int = DEFAULT_INNER_BOUND
    output_format: OutputFormat = OutputFormat.TEXT
    jobs: int = 1

    def __post_init__(self) -> None:
        """Validate bounds."""
        for name in ("trials", "search_bound", "inner_bound", "jobs"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.radius < 0:
            raise ValidationError(f"radius must be non-negative, got {self.radius}")
        if not isinstance(self.output_format, OutputFormat):
            try:
                fmt = OutputFormat(self.output_format)
            except ValueError as exc:
                raise ValidationError(f"unknown output format {self.output_format!r}") from exc
            object.__setattr__(self, "output_format", fmt)

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple

from omegaconf import DictConfig, OmegaConf

from src.rules import ATTENTION_RULES, RuleId, parse_library
from src.utils.errors import ValidationError
from src.utils.io_utils import FORMATS
from src.utils.pylogger import ContextLogger

log = ContextLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Typed view of the run-level settings of a composed config."""

    library: Tuple[RuleId, ...]
    restarts: int
    permutations: int
    inner_restarts: int
    orders: int
    seed: int
    solver: str
    out: Path
    format: str = "json"
    n_jobs: int = 1

    def __post_init__(self) -> None:
        for name in ("restarts", "permutations", "inner_restarts", "orders"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.seed < 0:
            raise ValidationError(f"seed must be non-negative, got {self.seed}")
        if self.format not in FORMATS:
            raise ValidationError(f"format must be one of {FORMATS}, got {self.format!r}")

    @classmethod
    def from_dictconfig(cls, cfg: DictConfig, solver: str) -> "RunConfig":
        """Builds the run config, forcing A1 and A2 into the library.

        :param cfg: The composed config.
        :param solver: Method of the instantiated searcher (``exact``, ``heuristic`` or ``auto``).
        """
        requested = {RuleId.parse(name) for name in cfg.library}
        if not ATTENTION_RULES <= requested:
            log.warning(f"Adding attention rules to the library <library={sorted(map(str, requested))}>")
        return cls(
            library=parse_library(requested),
            restarts=int(cfg.restarts),
            permutations=int(cfg.permutations),
            inner_restarts=int(cfg.inner_restarts),
            orders=int(cfg.orders),
            seed=int(cfg.seed),
            solver=solver,
            out=Path(cfg.out),
            format=str(cfg.format),
            n_jobs=int(cfg.get("n_jobs", 1)),
        )

    def echo(self) -> Dict[str, Any]:
        return {
            "library": [str(rule) for rule in self.library],
            "restarts": self.restarts,
            "permutations": self.permutations,
            "inner_restarts": self.inner_restarts,
            "orders": self.orders,
            "seed": self.seed,
            "solver": self.solver,
            "format": self.format,
        }


def config_echo(cfg: DictConfig, run_cfg: RunConfig) -> Dict[str, Any]:
    """Run settings plus the resolved searcher and data configs, without volatile paths."""
    echo = run_cfg.echo()
    echo["command"] = str(cfg.command)
    echo["searcher"] = OmegaConf.to_container(cfg.searcher, resolve=True)
    return echo

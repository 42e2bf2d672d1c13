"""Rich renderings of the composed config and of per-subject results."""

from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import rich
from omegaconf import DictConfig, OmegaConf
from rich.syntax import Syntax
from rich.table import Table
from rich.tree import Tree

from src.utils import pylogger

if TYPE_CHECKING:
    from src.utils.io_utils import SubjectReport

log = pylogger.ContextLogger(__name__)

CONFIG_ORDER = ("command", "seed", "library", "data", "searcher", "diagnostics", "inference", "paths")


def print_config_tree(
    cfg: DictConfig,
    print_order: Sequence[str] = CONFIG_ORDER,
    resolve: bool = False,
    save_to_file: bool = False,
) -> Tree:
    """Prints the composed config as a Rich tree.

    Config groups get one branch each, rendered as YAML. Top-level settings (command,
    seed, library, counts) are gathered under a single ``run`` branch.

    :param cfg: A DictConfig composed by Hydra.
    :param print_order: Keys shown first, in this order; the others follow in config order.
    :param resolve: Whether to resolve interpolations before rendering.
    :param save_to_file: Whether to also write the tree to ``config_tree.log`` in the output dir.
    :return: The rendered tree.
    """
    style = "dim"
    tree = Tree("CONFIG", style=style, guide_style=style)
    settings = tree.add("run", style=style, guide_style=style)

    keys = [key for key in print_order if key in cfg] + [key for key in cfg if key not in print_order]
    values = OmegaConf.to_container(cfg, resolve=resolve)
    for key in keys:
        if isinstance(values[key], dict):
            branch = tree.add(key, style=style, guide_style=style)
            branch.add(Syntax(OmegaConf.to_yaml(cfg[key], resolve=resolve), "yaml"))
        else:
            settings.add(f"{key}: {values[key]}")

    rich.print(tree)

    if save_to_file:
        with open(Path(cfg.paths.output_dir, "config_tree.log"), "w") as file:
            rich.print(tree, file=file)
    return tree


def print_report_table(reports: Sequence["SubjectReport"], title: str = "Rule concentration") -> Table:
    """Prints one row per subject: T, alpha, MRCI, effective rules and, if computed, the p-value."""
    table = Table(title=title)
    for column in ("subject", "T", "alpha", "MRCI", "n_eff", "p", "certified"):
        table.add_column(column, justify="left" if column == "subject" else "right")

    for report in reports:
        table.add_row(
            report.subject_id,
            str(report.t_total),
            f"{report.alpha:.3f}",
            f"{report.mrci:.4f}",
            f"{report.n_eff:.2f}",
            "-" if report.p_value is None else f"{report.p_value:.4f}",
            "yes" if report.certified else "no",
        )

    rich.print(table)
    return table

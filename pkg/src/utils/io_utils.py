import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from src.rules import RuleId
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger

log = ContextLogger(__name__)

FORMAT_VERSION = "1.0"
FORMATS = ("json", "csv")
NON_ATTENTION = tuple(rule for rule in RuleId if not rule.is_attention)


@dataclass(frozen=True)
class SubjectReport:
    """Per-subject results; fields a command did not compute stay ``None``."""

    subject_id: str
    t_total: int
    alpha: float
    coverage: Dict[str, float]
    mrci: float
    mrci_numerator: int
    n_eff: float
    method: str
    restarts: int
    seed: Any
    certified: bool
    joint_menus: int
    marginal_menus: int
    p_value: Optional[float] = None
    p_value_raw: Optional[float] = None
    permutations: Optional[int] = None
    gain: Optional[Dict[str, float]] = None
    stability: Optional[Dict[str, float]] = None
    consistent: Optional[bool] = None
    format_version: str = FORMAT_VERSION
    null_samples: Tuple[float, ...] = field(default=(), repr=False)


REPORT_FIELDS = [f.name for f in fields(SubjectReport) if f.name != "null_samples"]
SCALAR_FIELDS = [name for name in REPORT_FIELDS if name not in ("coverage", "gain", "stability")]
CSV_COLUMNS = (
    SCALAR_FIELDS
    + [f"coverage_{rule}" for rule in RuleId]
    + [f"gain_{rule}" for rule in NON_ATTENTION]
    + [f"stability_{rule}" for rule in NON_ATTENTION]
)


def _document(report: SubjectReport) -> Dict[str, Any]:
    record = asdict(report)
    record.pop("null_samples")
    if isinstance(record["seed"], tuple):
        record["seed"] = list(record["seed"])
    return {name: record[name] for name in REPORT_FIELDS}


def _row(report: SubjectReport) -> Dict[str, Any]:
    record = _document(report)
    row = {name: record[name] for name in SCALAR_FIELDS}
    for prefix in ("coverage", "gain", "stability"):
        values = record[prefix] or {}
        rules = RuleId if prefix == "coverage" else NON_ATTENTION
        for rule in rules:
            row[f"{prefix}_{rule}"] = values.get(str(rule))
    if isinstance(row["seed"], list):
        row["seed"] = "-".join(str(s) for s in row["seed"])
    return row


def _long(reports: Sequence[SubjectReport], attribute: str) -> pd.DataFrame:
    records = [
        {"subject_id": report.subject_id, "rule": rule, attribute: value}
        for report in reports
        for rule, value in (getattr(report, attribute) or {}).items()
    ]
    return pd.DataFrame(records, columns=["subject_id", "rule", attribute])


def emit_report(
    reports: Sequence[SubjectReport],
    fmt: str,
    path: Union[str, Path],
    config: Optional[Mapping[str, Any]] = None,
    plot_data: bool = True,
) -> List[Path]:
    """Writes the run report plus plot-ready long tables next to it.

    :param reports: Per-subject reports, in the order they should appear.
    :param fmt: ``"json"`` (one document with the config echo) or ``"csv"`` (one row per
        subject; the config echo goes to ``config.json``).
    :param path: Destination of the main report.
    :param config: Run configuration echoed for reproducibility.
    :param plot_data: Whether to write ``coverage_long.csv``, ``gain_long.csv``,
        ``stability_long.csv``, ``pvalues.csv`` and ``null_long.csv``.
    :return: Paths written.
    """
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    written = [path]
    config = dict(config or {})

    if fmt == "json":
        document = {
            "format_version": FORMAT_VERSION,
            "config": config,
            "subjects": [_document(report) for report in reports],
        }
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    else:
        pd.DataFrame([_row(report) for report in reports], columns=CSV_COLUMNS).to_csv(path, index=False)
        config_path = path.parent / "config.json"
        config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
        written.append(config_path)

    if plot_data:
        tables = {
            "coverage_long.csv": _long(reports, "coverage"),
            "gain_long.csv": _long(reports, "gain"),
            "stability_long.csv": _long(reports, "stability"),
            "pvalues.csv": pd.DataFrame(
                [[r.subject_id, r.mrci, r.p_value, r.p_value_raw] for r in reports],
                columns=["subject_id", "mrci", "p_value", "p_value_raw"],
            ),
            "null_long.csv": pd.DataFrame(
                [[r.subject_id, b, value] for r in reports for b, value in enumerate(r.null_samples)],
                columns=["subject_id", "permutation", "mrci"],
            ),
        }
        for name, table in tables.items():
            table.to_csv(path.parent / name, index=False)
            written.append(path.parent / name)

    log.info(f"Wrote {fmt} report of {len(reports)} subjects to {path}")
    return written


def save_table(rows: Sequence[Mapping[str, Any]], path: Union[str, Path]) -> Path:
    """Writes dict rows (e.g. benchmark or simulation results) as one CSV table."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(list(rows)).to_csv(path, index=False)
    return path

"""Generic one-row-per-choice CSV format.

Columns ``subject``, ``trial`` and ``choice`` (1 = first-listed alternative) are required.
Each row carries either the marginal columns ``a_prizes``/``a_probs``/``b_prizes``/``b_probs``
or the joint columns ``state_probs``/``a_state_payoffs``/``b_state_payoffs``. Lists use
``;`` as inner delimiter. ``label_a``/``label_b`` are optional.
"""

from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Union

import pandas as pd

from src.admissibility import Dataset, Observation
from src.lotteries import Menu, make_act_table, make_lottery
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger

log = ContextLogger(__name__)

LIST_DELIMITER = ";"
KEY_COLUMNS = ("subject", "trial", "choice")
MARGINAL_COLUMNS = ("a_prizes", "a_probs", "b_prizes", "b_probs")
JOINT_COLUMNS = ("state_probs", "a_state_payoffs", "b_state_payoffs")
LABEL_COLUMNS = ("label_a", "label_b")
COLUMNS = KEY_COLUMNS + MARGINAL_COLUMNS + JOINT_COLUMNS + LABEL_COLUMNS


def _numbers(cell: str, column: str) -> List[float]:
    try:
        return [float(item) for item in cell.split(LIST_DELIMITER)]
    except ValueError:
        raise ValidationError(f"column {column}: cannot read numbers from {cell!r}") from None


def _integer(cell: str, column: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise ValidationError(f"column {column}: expected an integer, got {cell!r}") from None


def _filled(record: Mapping[str, str], columns: Sequence[str]) -> List[bool]:
    return [bool(record.get(column, "").strip()) for column in columns]


def _menu(record: Mapping[str, str]) -> Menu:
    labels = {
        column: record[column].strip() or default
        for column, default in zip(LABEL_COLUMNS, ("A", "B"))
        if column in record
    }
    marginal, joint = _filled(record, MARGINAL_COLUMNS), _filled(record, JOINT_COLUMNS)
    if all(marginal) and not any(joint):
        first = make_lottery(_numbers(record["a_prizes"], "a_prizes"), _numbers(record["a_probs"], "a_probs"))
        second = make_lottery(_numbers(record["b_prizes"], "b_prizes"), _numbers(record["b_probs"], "b_probs"))
        return Menu.of_lotteries(first, second, **labels)
    if all(joint) and not any(marginal):
        table = make_act_table(
            _numbers(record["state_probs"], "state_probs"),
            _numbers(record["a_state_payoffs"], "a_state_payoffs"),
            _numbers(record["b_state_payoffs"], "b_state_payoffs"),
        )
        return Menu.of_acts(table, **labels)
    raise ValidationError("exactly one of the marginal or joint column groups must be filled")


def parse_generic_csv(path: Union[str, Path]) -> List[Dataset]:
    """Reads one `Dataset` per subject, subjects and trials in file order.

    :param path: UTF-8, comma-separated file with a header row.
    :return: The datasets.
    :raises ValidationError: On an empty or undecodable file, missing key columns or a malformed row (the
        message names the file line).
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path}: no records") from None
    except (pd.errors.ParserError, UnicodeDecodeError) as ex:
        raise ValidationError(f"{path}: unreadable CSV: {ex}") from ex
    frame.columns = [str(column).strip() for column in frame.columns]
    if frame.empty:
        raise ValidationError(f"{path}: no records")
    missing = [column for column in KEY_COLUMNS if column not in frame.columns]
    if missing:
        raise ValidationError(f"{path}: missing required columns {missing}")
    unknown = [column for column in frame.columns if column not in COLUMNS]
    if unknown:
        log.warning(f"{path}: ignoring unknown columns {unknown}")

    grouped: Dict[str, List[Observation]] = {}
    for line, record in enumerate(frame.to_dict("records"), start=2):
        try:
            subject = record["subject"].strip()
            if not subject:
                raise ValidationError("empty subject id")
            observation = Observation(
                subject_id=subject,
                trial=_integer(record["trial"], "trial"),
                menu=_menu(record),
                choice=_integer(record["choice"], "choice"),
            )
        except ValidationError as ex:
            raise ValidationError(f"{path}:{line}: {ex}") from ex
        grouped.setdefault(subject, []).append(observation)

    datasets = [Dataset(subject, tuple(observations)) for subject, observations in grouped.items()]
    log.info(f"Read {len(frame)} choices of {len(datasets)} subjects from {path}")
    return datasets


def _join(values: Sequence[float]) -> str:
    return LIST_DELIMITER.join(repr(float(v)) for v in values)


def to_records(datasets: Sequence[Dataset]) -> pd.DataFrame:
    """Flattens datasets into the generic column layout."""
    rows = []
    for dataset in datasets:
        for obs in dataset.observations:
            row = dict.fromkeys(COLUMNS, "")
            row.update(subject=obs.subject_id, trial=str(obs.trial), choice=str(obs.choice))
            row.update(label_a=obs.menu.label_a, label_b=obs.menu.label_b)
            if obs.menu.acts is not None:
                table = obs.menu.acts
                row.update(
                    state_probs=_join(table.state_probs),
                    a_state_payoffs=_join(table.payoffs_a),
                    b_state_payoffs=_join(table.payoffs_b),
                )
            else:
                first, second = obs.menu.lotteries
                row.update(
                    a_prizes=_join(first.prizes),
                    a_probs=_join(first.probs),
                    b_prizes=_join(second.prizes),
                    b_probs=_join(second.probs),
                )
            rows.append(row)
    return pd.DataFrame(rows, columns=list(COLUMNS))


def write_generic_csv(datasets: Sequence[Dataset], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    to_records(datasets).to_csv(path, index=False)
    return path

"""Adapter for CPC18-style raw choice tables.

Accepted column synonyms:
    subject: ``SubjID``, ``subject``, ``subject_id``
    trial:   ``Trial``, ``trial``
    choice:  ``B`` (1 = option B taken, inverted here), ``choice``/``Choice`` (1 = option A)
    shape:   ``LotShapeB`` or ``LotShape``; a value of ``-`` (or empty/0) marks a plain lottery
Payoff columns ``Ha, pHa, La, Hb, pHb, Lb`` and ``Amb`` are required. ``Corr`` is used only
with ``use_correlation``.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from src.admissibility import Dataset, Observation
from src.lotteries import Menu, comonotone_coupling, countermonotone_coupling, make_lottery
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger

log = ContextLogger(__name__)

SUBJECT_COLUMNS = ("SubjID", "subject", "subject_id")
TRIAL_COLUMNS = ("Trial", "trial")
INVERTED_CHOICE_COLUMNS = ("B",)
CHOICE_COLUMNS = ("choice", "Choice")
SHAPE_COLUMNS = ("LotShapeB", "LotShape")
PAYOFF_COLUMNS = ("Ha", "pHa", "La", "Hb", "pHb", "Lb")
TRIVIAL_SHAPES = ("-", "", "0", "nan")


def _pick(frame: pd.DataFrame, synonyms: Sequence[str]) -> Optional[str]:
    return next((column for column in synonyms if column in frame.columns), None)


def _menu(row: Tuple, use_correlation: bool) -> Menu:
    first = make_lottery([row.Ha, row.La], [row.pHa, 1.0 - row.pHa])
    second = make_lottery([row.Hb, row.Lb], [row.pHb, 1.0 - row.pHb])
    corr = getattr(row, "Corr", 0)
    if use_correlation and corr == 1:
        return Menu.of_acts(comonotone_coupling(first, second))
    if use_correlation and corr == -1:
        return Menu.of_acts(countermonotone_coupling(first, second))
    return Menu.of_lotteries(first, second)


def parse_cpc18(
    path: Union[str, Path],
    on_lotshape: str = "drop",
    use_correlation: bool = False,
) -> List[Dataset]:
    """Reads per-subject datasets of the risk problems in a CPC18-style table.

    Ambiguous rows (``Amb == 1``) are excluded. Rows with a non-trivial lottery shape
    are dropped with a logged count, or rejected when ``on_lotshape="error"``.

    :param path: CSV file.
    :param on_lotshape: ``"drop"`` or ``"error"``.
    :param use_correlation: Couple ``Corr = +1/-1`` rows co-/countermonotonically.
    :return: One `Dataset` per subject, in file order.
    """
    if on_lotshape not in ("drop", "error"):
        raise ValidationError(f"on_lotshape must be 'drop' or 'error', got {on_lotshape!r}")
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path}: no records") from None
    except (pd.errors.ParserError, UnicodeDecodeError) as ex:
        raise ValidationError(f"{path}: unreadable CSV: {ex}") from ex

    subject_column = _pick(frame, SUBJECT_COLUMNS)
    trial_column = _pick(frame, TRIAL_COLUMNS)
    inverted = _pick(frame, INVERTED_CHOICE_COLUMNS)
    choice_column = inverted or _pick(frame, CHOICE_COLUMNS)
    shape_column = _pick(frame, SHAPE_COLUMNS)
    missing = [
        name
        for name, column in (
            ("subject", subject_column),
            ("trial", trial_column),
            ("choice/B", choice_column),
            ("LotShape", shape_column),
        )
        if column is None
    ] + [column for column in (*PAYOFF_COLUMNS, "Amb") if column not in frame.columns]
    if missing:
        raise ValidationError(f"{path}: missing required columns {missing}")

    ambiguous = frame["Amb"].astype(float) == 1
    if ambiguous.any():
        log.info(f"{path}: excluding {int(ambiguous.sum())} ambiguous rows")
    frame = frame.loc[~ambiguous]

    shaped = ~frame[shape_column].astype(str).str.strip().isin(TRIVIAL_SHAPES)
    if shaped.any():
        if on_lotshape == "error":
            raise ValidationError(f"{path}: {int(shaped.sum())} rows have a non-trivial LotShape")
        log.warning(f"{path}: rejected {int(shaped.sum())} rows with a non-trivial LotShape")
    frame = frame.loc[~shaped]
    if frame.empty:
        raise ValidationError(f"{path}: no risk records left after filtering")

    grouped: Dict[str, List[Observation]] = {}
    for row in frame.itertuples(index=False):
        subject = str(getattr(row, subject_column))
        try:
            raw_choice = int(getattr(row, choice_column))
            observation = Observation(
                subject_id=subject,
                trial=int(getattr(row, trial_column)),
                menu=_menu(row, use_correlation),
                choice=1 - raw_choice if inverted else raw_choice,
            )
        except (ValidationError, ValueError, TypeError) as ex:
            raise ValidationError(f"{path}: subject {subject}: {ex}") from ex
        grouped.setdefault(subject, []).append(observation)

    datasets = [Dataset(subject, tuple(observations)) for subject, observations in grouped.items()]
    log.info(f"Read {len(frame)} risk choices of {len(datasets)} subjects from {path}")
    return datasets

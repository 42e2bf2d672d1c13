"""End-to-end runs of the `mrci` commands on the worked example."""

import json
from pathlib import Path

import pandas as pd
import pytest
from hydra.errors import InstantiationException
from omegaconf import DictConfig, open_dict

from src.admissibility import Dataset
from src.inference import permutation_test
from src.mrci import COMMANDS, run
from src.utils import ValidationError, exit_code_for


def _document(cfg: DictConfig) -> dict:
    return json.loads((Path(cfg.paths.output_dir) / "report.json").read_text())


def test_report(cfg_mrci: DictConfig) -> None:
    """The full report reproduces the worked example.

    :param cfg_mrci: A DictConfig containing a valid run configuration.
    """
    metric_dict, object_dict = run(cfg_mrci)
    (subject,) = _document(cfg_mrci)["subjects"]

    assert subject["mrci"] == pytest.approx(37 / 49, abs=1e-12)
    assert subject["mrci_numerator"] == 37
    assert subject["certified"] is True
    assert subject["gain"]["MAP"] == 0.0
    assert subject["gain"]["SAL"] == pytest.approx(12 / 37)
    assert subject["stability"]["SAL"] == 1.0
    assert subject["consistent"] is True
    assert subject["permutations"] == 19
    assert 0.05 <= subject["p_value"] <= 1.0
    assert (subject["joint_menus"], subject["marginal_menus"]) == (1, 6)
    assert metric_dict["mean_mrci"] == pytest.approx(37 / 49)
    assert 0.0 <= metric_dict["share_rejecting"] <= 1.0
    assert object_dict["run_cfg"].solver == "auto"


def test_mrci_command_skips_the_extras(cfg_mrci: DictConfig) -> None:
    cfg_mrci.command = "mrci"
    run(cfg_mrci)
    (subject,) = _document(cfg_mrci)["subjects"]

    assert subject["p_value"] is None
    assert subject["gain"] is None
    assert subject["consistent"] is None
    assert subject["n_eff"] == pytest.approx(49 / 37)


def test_admissibility_command(cfg_mrci: DictConfig) -> None:
    cfg_mrci.command = "admissibility"
    metric_dict, _ = run(cfg_mrci)
    table = pd.read_csv(Path(cfg_mrci.paths.output_dir) / "admissibility.csv")

    assert metric_dict["observations"] == 7
    assert table["SAL"].sum() == 6
    assert table["ID"].sum() == 0
    assert (table["A1"] == table["choice"]).all()


@pytest.mark.parametrize("command", ["diagnostics", "permtest"])
def test_partial_reports(cfg_mrci: DictConfig, command: str) -> None:
    cfg_mrci.command = command
    run(cfg_mrci)
    (subject,) = _document(cfg_mrci)["subjects"]

    assert (subject["p_value"] is not None) == (command == "permtest")
    assert (subject["gain"] is not None) == (command == "diagnostics")


def test_permtest_scores_the_observed_data_greedily(cfg_mrci: DictConfig, toy_dataset: Dataset) -> None:
    cfg_mrci.command = "permtest"
    with open_dict(cfg_mrci):
        cfg_mrci.searcher = {"_target_": "src.searcher.BranchAndBoundSearcher", "time_budget": None}
    run(cfg_mrci)
    (subject,) = _document(cfg_mrci)["subjects"]

    expected = permutation_test(toy_dataset, num_permutations=19, inner_restarts=10, restarts=20, seed=0)
    assert subject["method"] == "exact"
    assert subject["p_value"] == pytest.approx(expected.p_value)
    assert subject["p_value_raw"] == pytest.approx(expected.p_value_raw)


def test_csv_report(cfg_mrci: DictConfig) -> None:
    cfg_mrci.format = "csv"
    cfg_mrci.library = ["SAL", "MAP", "REG"]
    run(cfg_mrci)
    out = Path(cfg_mrci.paths.output_dir)
    row = pd.read_csv(out / "report.csv").iloc[0]

    assert row["mrci"] == pytest.approx(37 / 49)
    assert pd.isna(row["coverage_DIS"])
    assert json.loads((out / "config.json").read_text())["library"] == ["MAP", "SAL", "REG", "A1", "A2"]


def test_repeat_runs_are_identical(cfg_mrci: DictConfig, tmp_path: Path) -> None:
    reports = []
    for name in ("first", "second"):
        cfg_mrci.out = str(tmp_path / name)
        run(cfg_mrci)
        reports.append((tmp_path / name / "report.json").read_bytes())

    assert reports[0] == reports[1]


def test_simulate_command(cfg_mrci: DictConfig) -> None:
    cfg_mrci.command = "simulate"
    cfg_mrci.simulate.num_subjects = 2
    cfg_mrci.simulate.num_menus = 12
    metric_dict, _ = run(cfg_mrci)
    out = Path(cfg_mrci.paths.output_dir)

    assert metric_dict["trials"] == 2
    assert metric_dict["tau"] == 0.5
    assert len(pd.read_csv(out / "pvalues.csv")) == 2
    assert (out / "simulate.csv").exists()


def test_bench_exact_command(cfg_mrci: DictConfig) -> None:
    cfg_mrci.command = "bench-exact"
    cfg_mrci.bench.instances = 3
    cfg_mrci.bench.max_rows = 15
    metric_dict, _ = run(cfg_mrci)

    assert 0.0 <= metric_dict["agree"] <= 1.0
    assert len(pd.read_csv(Path(cfg_mrci.paths.output_dir) / "bench_exact.csv")) == 3


def test_unknown_command(cfg_mrci: DictConfig) -> None:
    cfg_mrci.command = "train"

    with pytest.raises(ValidationError, match="unknown command"):
        run(cfg_mrci)
    assert "train" not in COMMANDS


def test_missing_data_file(cfg_mrci: DictConfig, tmp_path: Path) -> None:
    cfg_mrci.data.path = str(tmp_path / "absent.csv")

    with pytest.raises(OSError) as info:
        run(cfg_mrci)
    assert exit_code_for(info.value) == 2


def test_exit_codes() -> None:
    wrapped = InstantiationException("could not instantiate")
    wrapped.__cause__ = ValidationError("bad row")

    assert exit_code_for(ValidationError("bad")) == 1
    assert exit_code_for(FileNotFoundError("absent")) == 2
    assert exit_code_for(wrapped) == 1
    with pytest.raises(RuntimeError):
        exit_code_for(RuntimeError("bug"))

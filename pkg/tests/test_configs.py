"""Tests that every shipped config composes and instantiates."""

from pathlib import Path
from typing import List

import hydra
import pytest
import rootutils
from hydra import compose, initialize
from omegaconf import DictConfig, OmegaConf, open_dict

from src.rules import RuleId
from src.searcher import AutoSearcher, BranchAndBoundSearcher, GreedySearcher
from src.utils.config import RunConfig, config_echo
from src.utils.errors import ValidationError

ROOT = Path(rootutils.find_root(indicator=".project-root"))


def _compose(overrides: List[str], tmp_path: Path) -> DictConfig:
    with initialize(version_base="1.3", config_path="../configs"):
        cfg = compose(config_name="mrci.yaml", overrides=overrides)
    with open_dict(cfg):
        cfg.paths.root_dir = str(ROOT)
        cfg.paths.output_dir = str(tmp_path)
        cfg.paths.log_dir = str(tmp_path)
    return cfg


def test_mrci_config(cfg_mrci: DictConfig) -> None:
    """The default config resolves and instantiates its searcher and data reader.

    :param cfg_mrci: A DictConfig containing a valid run configuration.
    """
    assert cfg_mrci
    assert cfg_mrci.searcher
    assert cfg_mrci.data

    OmegaConf.resolve(cfg_mrci)

    searcher = hydra.utils.instantiate(cfg_mrci.searcher)
    assert isinstance(searcher, AutoSearcher)
    assert searcher.heuristic.restarts == 20
    (dataset,) = hydra.utils.instantiate(cfg_mrci.data, _partial_=True)()
    assert len(dataset) == 7


@pytest.mark.parametrize(
    "searcher, expected",
    [("exact", BranchAndBoundSearcher), ("heuristic", GreedySearcher), ("auto", AutoSearcher)],
)
def test_searcher_configs(tmp_path: Path, searcher: str, expected: type) -> None:
    cfg = _compose([f"searcher={searcher}", "seed=3"], tmp_path)

    instance = hydra.utils.instantiate(cfg.searcher)
    assert isinstance(instance, expected)
    if isinstance(instance, GreedySearcher):
        assert instance.seed == 3


@pytest.mark.parametrize("experiment", ["toy", "cpc18_table", "power"])
def test_experiment_configs(tmp_path: Path, experiment: str) -> None:
    cfg = _compose([f"experiment={experiment}"], tmp_path)
    OmegaConf.resolve(cfg)

    run_cfg = RunConfig.from_dictconfig(cfg, solver="auto")
    assert run_cfg.library[-2:] == (RuleId.A1, RuleId.A2)
    assert cfg.command in ("report", "simulate")
    hydra.utils.instantiate(cfg.searcher)


def test_power_experiment_sits_above_the_floor(tmp_path: Path) -> None:
    cfg = _compose(["experiment=power"], tmp_path)
    weights = OmegaConf.to_container(cfg.simulate.weights)

    assert sum(w * w for w in weights.values()) - 0.5 >= 0.15


class TestRunConfig:
    def test_attention_rules_are_added(self, cfg_mrci: DictConfig) -> None:
        cfg_mrci.library = ["sal", "MAP"]

        run_cfg = RunConfig.from_dictconfig(cfg_mrci, solver="exact")
        assert run_cfg.library == (RuleId.MAP, RuleId.SAL, RuleId.A1, RuleId.A2)
        assert run_cfg.out == Path(cfg_mrci.paths.output_dir)

    @pytest.mark.parametrize(
        "key, value", [("restarts", 0), ("permutations", 0), ("seed", -1), ("format", "xml"), ("library", ["LEX"])]
    )
    def test_invalid_settings(self, cfg_mrci: DictConfig, key: str, value) -> None:
        cfg_mrci[key] = value

        with pytest.raises(ValidationError):
            RunConfig.from_dictconfig(cfg_mrci, solver="exact")

    def test_echo(self, cfg_mrci: DictConfig) -> None:
        run_cfg = RunConfig.from_dictconfig(cfg_mrci, solver="exact")
        echo = config_echo(cfg_mrci, run_cfg)

        assert echo["command"] == "report"
        assert echo["searcher"]["heuristic"]["restarts"] == 20
        assert echo["library"][-2:] == ["A1", "A2"]
        assert str(cfg_mrci.paths.output_dir) not in str(echo)

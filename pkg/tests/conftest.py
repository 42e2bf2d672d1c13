"""This file prepares config fixtures and the shared toy data for the tests."""

import copy
from pathlib import Path
from typing import List

import pytest
import rootutils
from hydra import compose, initialize
from hydra.core.global_hydra import GlobalHydra
from omegaconf import DictConfig, open_dict

from src.admissibility import AdmissibilityMatrix, Dataset, admissibility_matrix
from src.data import parse_generic_csv
from src.searcher import random_admissibility

ROOT = Path(rootutils.find_root(indicator=".project-root"))


@pytest.fixture(scope="session")
def toy_path() -> Path:
    """The seven-menu worked example."""
    return ROOT / "data" / "toy.csv"


@pytest.fixture(scope="session")
def toy_dataset(toy_path: Path) -> Dataset:
    datasets = parse_generic_csv(toy_path)
    assert len(datasets) == 1
    return datasets[0]


@pytest.fixture(scope="session")
def toy_matrix(toy_dataset: Dataset) -> AdmissibilityMatrix:
    return admissibility_matrix(toy_dataset)


@pytest.fixture(scope="session")
def random_matrices() -> List[AdmissibilityMatrix]:
    """100 seeded matrices over the full library with attention parity."""
    return [
        random_admissibility(5 + i % 26, 0.2 + 0.4 * (i % 7) / 6, seed=(2024, i), alpha=0.3 + 0.4 * (i % 5) / 4)
        for i in range(100)
    ]


@pytest.fixture(scope="package")
def cfg_mrci_global() -> DictConfig:
    """A lightweight config composed from `mrci.yaml`, reused across the package.

    :return: A DictConfig object containing the default configuration on the toy data.
    """
    with initialize(version_base="1.3", config_path="../configs"):
        cfg = compose(config_name="mrci.yaml", overrides=["data=toy"])

        # set defaults for all tests
        with open_dict(cfg):
            cfg.paths.root_dir = str(ROOT)
            cfg.extras.print_config = False
            cfg.extras.ignore_warnings = False
            cfg.restarts = 20
            cfg.permutations = 19
            cfg.inner_restarts = 10
            cfg.orders = 10
            cfg.n_jobs = 1

    return cfg


@pytest.fixture(scope="function")
def cfg_mrci(cfg_mrci_global: DictConfig, tmp_path: Path) -> DictConfig:
    """A copy of the package config whose outputs go to a fresh temporary directory.

    :param cfg_mrci_global: The package config.
    :param tmp_path: The temporary logging path.
    :return: A DictConfig with updated output and log directories.
    """
    cfg = copy.deepcopy(cfg_mrci_global)

    with open_dict(cfg):
        cfg.paths.output_dir = str(tmp_path)
        cfg.paths.log_dir = str(tmp_path)

    yield cfg

    GlobalHydra.instance().clear()

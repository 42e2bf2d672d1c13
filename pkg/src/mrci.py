import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple

import hydra
import numpy as np
import rootutils
from joblib import Parallel, delayed
from omegaconf import DictConfig, OmegaConf

root_dir = rootutils.setup_root(__file__, indicator=".project-root", pythonpath=True)
# ------------------------------------------------------------------------------------ #
# the setup_root above is equivalent to:
# - adding project root dir to PYTHONPATH
#       (so you don't need to force user to install project as a package)
#       (necessary before importing any local modules e.g. `from src import utils`)
# - setting up PROJECT_ROOT environment variable
#       (which is used as a base for paths in "configs/paths/default.yaml")
#       (this way all filepaths are the same no matter where you run the code)
# - loading environment variables from ".env" in root dir
#
# more info: https://github.com/ashleve/rootutils
# ------------------------------------------------------------------------------------ #

from src.admissibility import Dataset, admissibility_matrix, coverage
from src.diagnostics import STRONG, diagnose, effective_rules, verify_cyclical_consistency
from src.inference import permutation_test, simulate_study
from src.lotteries import JOINT_FORM
from src.searcher import BaseSearcher, bench_exact, summarize
from src.utils import (
    ContextLogger,
    ValidationError,
    exit_code_for,
    extras,
    print_report_table,
    task_wrapper,
)
from src.utils.config import RunConfig, config_echo
from src.utils.io_utils import SubjectReport, emit_report, save_table

log = ContextLogger(__name__)


def load_datasets(cfg: DictConfig) -> List[Dataset]:
    """Reads the per-subject datasets with the reader selected in ``cfg.data``."""
    log.info(f"Reading data with <{cfg.data._target_}>")
    reader = hydra.utils.instantiate(cfg.data, _partial_=True)
    datasets = reader()
    if not datasets:
        raise ValidationError("no subjects to analyse")
    log.info(f"Loaded {len(datasets)} subjects, {sum(map(len, datasets))} observations")
    return datasets


def analyse_subject(
    dataset: Dataset,
    searcher: BaseSearcher,
    run_cfg: RunConfig,
    with_diagnostics: bool,
    with_permtest: bool,
    check_consistency: bool,
    consistency_mode: str = STRONG,
) -> SubjectReport:
    """Runs the requested analyses for one subject."""
    subject_log = log.bind(subject=dataset.subject_id)
    matrix = admissibility_matrix(dataset, run_cfg.library)
    result = searcher.run(matrix)
    subject_log.info(f"MRCI={result.value:.4f} ({result.method}, certified={result.certified})")

    gain = stability = None
    if with_diagnostics:
        report = diagnose(matrix, searcher, num_orders=run_cfg.orders, seed=run_cfg.seed)
        gain = {str(rule): value for rule, value in report.gain.items()}
        stability = {str(rule): value for rule, value in report.stability.items()}

    p_value = p_value_raw = None
    null_samples: Tuple[float, ...] = ()
    if with_permtest:
        test = permutation_test(
            dataset,
            num_permutations=run_cfg.permutations,
            inner_restarts=run_cfg.inner_restarts,
            restarts=run_cfg.restarts,
            seed=run_cfg.seed,
            library=run_cfg.library,
        )
        p_value, p_value_raw, null_samples = test.p_value, test.p_value_raw, test.null_samples
        subject_log.info(f"p={p_value:.4f} over {run_cfg.permutations} permutations")

    consistent = None
    if check_consistency:
        consistent = bool(verify_cyclical_consistency(dataset, result.assignment, consistency_mode))

    joint = sum(menu.form == JOINT_FORM for menu in dataset.menus)
    return SubjectReport(
        subject_id=dataset.subject_id,
        t_total=len(dataset),
        alpha=dataset.alpha,
        coverage={str(rule): share for rule, share in coverage(matrix).items()},
        mrci=result.value,
        mrci_numerator=result.numerator,
        n_eff=effective_rules(result.value),
        method=result.method,
        restarts=run_cfg.restarts,
        seed=run_cfg.seed,
        certified=result.certified,
        joint_menus=joint,
        marginal_menus=len(dataset) - joint,
        p_value=p_value,
        p_value_raw=p_value_raw,
        permutations=run_cfg.permutations if with_permtest else None,
        gain=gain,
        stability=stability,
        consistent=consistent,
        null_samples=null_samples,
    )


def analyse_subjects(
    datasets: Sequence[Dataset], searcher: BaseSearcher, run_cfg: RunConfig, **flags: Any
) -> List[SubjectReport]:
    """Subjects run in parallel over joblib; reports keep the input order."""
    if run_cfg.n_jobs == 1 or len(datasets) == 1:
        return [analyse_subject(dataset, searcher, run_cfg, **flags) for dataset in datasets]
    return Parallel(n_jobs=run_cfg.n_jobs, backend="loky")(
        delayed(analyse_subject)(dataset, searcher, run_cfg, **flags) for dataset in datasets
    )


def _report_command(**flags: bool) -> Callable[[DictConfig, BaseSearcher, RunConfig], Dict[str, Any]]:
    def command(cfg: DictConfig, searcher: BaseSearcher, run_cfg: RunConfig) -> Dict[str, Any]:
        mode = cfg.diagnostics.consistency
        reports = analyse_subjects(load_datasets(cfg), searcher, run_cfg, consistency_mode=mode, **flags)
        path = run_cfg.out / f"report.{run_cfg.format}"
        emit_report(reports, run_cfg.format, path, config=config_echo(cfg, run_cfg))
        if cfg.get("extras") and cfg.extras.get("print_report"):
            print_report_table(reports)
        metrics: Dict[str, Any] = {
            "subjects": len(reports),
            "mean_mrci": float(np.mean([report.mrci for report in reports])),
        }
        if flags.get("with_permtest"):
            eta = float(cfg.inference.eta)
            metrics["share_rejecting"] = float(np.mean([r.p_value <= eta for r in reports]))
            log.info(f"Share of subjects rejecting at eta={eta}: {metrics['share_rejecting']:.3f}")
        log.info(f"Mean MRCI over {len(reports)} subjects: {metrics['mean_mrci']:.4f}")
        return metrics

    return command


def admissibility_command(cfg: DictConfig, searcher: BaseSearcher, run_cfg: RunConfig) -> Dict[str, Any]:
    """Writes the strict-set table: one row per observation, one 0/1 column per rule."""
    rows = []
    for dataset in load_datasets(cfg):
        matrix = admissibility_matrix(dataset, run_cfg.library)
        for obs, admissible in zip(dataset.observations, matrix.admissible):
            row = {"subject": obs.subject_id, "trial": obs.trial, "choice": obs.choice}
            row.update({str(rule): int(flag) for rule, flag in zip(matrix.rules, admissible)})
            rows.append(row)
    save_table(rows, run_cfg.out / "admissibility.csv")
    return {"observations": len(rows)}


def simulate_command(cfg: DictConfig, searcher: BaseSearcher, run_cfg: RunConfig) -> Dict[str, Any]:
    """Size or power of the permutation test on simulated subjects."""
    sim = cfg.simulate
    weights = OmegaConf.to_container(sim.weights) if sim.get("weights") else None
    study = simulate_study(
        num_subjects=int(sim.num_subjects),
        num_menus=int(sim.num_menus),
        weights=weights,
        fallback=tuple(sim.fallback),
        num_permutations=run_cfg.permutations,
        inner_restarts=run_cfg.inner_restarts,
        restarts=run_cfg.restarts,
        eta=float(sim.eta),
        seed=run_cfg.seed,
        n_jobs=run_cfg.n_jobs,
    )
    summary = {
        **asdict(study.rejection),
        "rate": study.rejection.rate,
        "tau": study.tau,
        "tau_0": study.tau_0,
        "gap": study.gap,
        "mean_mrci": float(np.mean(study.observed_mrci)),
    }
    save_table([summary], run_cfg.out / "simulate.csv")
    save_table(
        [
            {"subject": i, "p_value": p, "mrci": m, "alpha": a}
            for i, (p, m, a) in enumerate(zip(study.p_values, study.observed_mrci, study.alphas))
        ],
        run_cfg.out / "pvalues.csv",
    )
    return summary


def bench_exact_command(cfg: DictConfig, searcher: BaseSearcher, run_cfg: RunConfig) -> Dict[str, Any]:
    """Heuristic against exact search on random instances."""
    rows = bench_exact(seed=run_cfg.seed, restarts=run_cfg.restarts, **cfg.bench)
    save_table([asdict(row) for row in rows], run_cfg.out / "bench_exact.csv")
    agree, mean_gap, slowest = summarize(rows)
    log.info(f"agree={agree:.2%} mean|gap|={mean_gap:.2e} slowest exact run={slowest:.2f}s")
    return {"agree": agree, "mean_abs_gap": mean_gap, "max_exact_seconds": slowest}


COMMANDS = {
    "admissibility": admissibility_command,
    "mrci": _report_command(with_diagnostics=False, with_permtest=False, check_consistency=False),
    "diagnostics": _report_command(with_diagnostics=True, with_permtest=False, check_consistency=True),
    "permtest": _report_command(with_diagnostics=False, with_permtest=True, check_consistency=False),
    "report": _report_command(with_diagnostics=True, with_permtest=True, check_consistency=True),
    "simulate": simulate_command,
    "bench-exact": bench_exact_command,
}


@task_wrapper
def run(cfg: DictConfig) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Runs the command named by ``cfg.command``.

    This method is wrapped in optional @task_wrapper decorator, that controls the behavior during
    failure.

    :param cfg: A DictConfig configuration composed by Hydra.
    :return: A tuple with metrics and dict with all instantiated objects.
    """
    if cfg.command not in COMMANDS:
        raise ValidationError(f"unknown command {cfg.command!r}, expected one of {sorted(COMMANDS)}")

    log.info(f"Instantiating searcher <{cfg.searcher._target_}>")
    searcher: BaseSearcher = hydra.utils.instantiate(cfg.searcher)
    run_cfg = RunConfig.from_dictconfig(cfg, solver=searcher.method)
    Path(run_cfg.out).mkdir(parents=True, exist_ok=True)

    log.info(f"Running <{cfg.command}>")
    metric_dict = COMMANDS[cfg.command](cfg, searcher, run_cfg)
    object_dict = {"cfg": cfg, "searcher": searcher, "run_cfg": run_cfg}
    return metric_dict, object_dict


@hydra.main(version_base="1.3", config_path="../configs", config_name="mrci.yaml")
def main(cfg: DictConfig) -> None:
    """Main entry point.

    :param cfg: DictConfig configuration composed by Hydra.
    """
    # apply extra utilities
    # (e.g. ask for tags if none are provided in cfg, print cfg tree, etc.)
    extras(cfg)

    try:
        run(cfg)
    except Exception as ex:
        sys.exit(exit_code_for(ex))


if __name__ == "__main__":
    main()

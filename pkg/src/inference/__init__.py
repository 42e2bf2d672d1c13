from src.inference.menus import sample_menus
from src.inference.permutation import (
    PermTestResult,
    attention_floor,
    match_share,
    match_shares,
    permutation_test,
    permute_choices,
)
from src.inference.rrm import (
    RrmSpec,
    latent_concentration,
    null_matched_spec,
    simulate_rrm,
)
from src.inference.power import RejectionRate, StudyResult, rejection_rate, simulate_study

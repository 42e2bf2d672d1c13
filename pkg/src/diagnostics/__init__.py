from src.diagnostics.consistency import (
    STRONG,
    WEAK,
    ConsistencyResult,
    perceived_pairs,
    verify_cyclical_consistency,
)
from src.diagnostics.importance import (
    DeletionWalk,
    DiagnosticsReport,
    concentration_gain,
    deletion_walks,
    diagnose,
    effective_rules,
    stability_scores,
)

from src.admissibility.dataset import Dataset, Observation
from src.admissibility.matrix import (
    AdmissibilityMatrix,
    RecommendationTable,
    admissibility_matrix,
    coverage,
    recommendation_table,
    strict_set,
)

"""Information-theoretic and classical external cluster-validity measures."""

from .classic_measures import (
    MEASURES,
    MeasureVector,
    all_measures,
    fowlkes_mallows,
    hamming_assignments,
    hubert_gamma,
    jaccard_index,
    normalized_hamming,
    rand_index,
)
from .errors import (
    DegenerateInputError,
    EmptyInputError,
    ExtvalError,
    InconsistentTableError,
    InvalidParameterError,
)
from .info_measures import (
    QScores,
    column_code_length,
    empirical_conditional_entropy,
    empirical_entropy,
    mutual_information,
    q0,
    q0_asymptotic,
    q0_max,
    q0_min,
    q2,
    q_scores,
    table_code_length,
)
from .model_family import JointDistribution, ModelParams, assign, build_joint, validate
from .tables import (
    ContingencyTable,
    Labeling,
    PairCounts,
    build_contingency,
    expected_pair_counts,
    expected_table,
    pair_counts_bruteforce,
    pair_counts_from_table,
)

__version__ = "0.1.0"

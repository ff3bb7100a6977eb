"""Generation and classification of rank-3 simple matroids."""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .generation import (Options, enumerate_multiplicity_vectors, generate_all, initial_state,
                         iter_generate, iterator_from_state)
from .parallel import leaf_iterator, parallel_evaluate, sequential_leaves
from .permgroup import (Permutation, PermGroup, apply, blocklist_stabilizer, canonical_form,
                        group_from_generators, is_minimal_in_orbit, minimal_image, symmetric_group)
from .represent import (DEFAULT_BATTERY, WIDE_BATTERY, FieldSpec, check_representation,
                        find_representation,
                        projective_pattern, representability_summary)
from .store import (MatroidRecord, classify, query, read_records, terao_pipeline,
                    tutte_unique_within, write_records)

__all__ = [
    *_core_all,
    "Options", "enumerate_multiplicity_vectors", "generate_all", "initial_state",
    "iter_generate", "iterator_from_state",
    "leaf_iterator", "parallel_evaluate", "sequential_leaves",
    "Permutation", "PermGroup", "apply", "blocklist_stabilizer", "canonical_form",
    "group_from_generators", "is_minimal_in_orbit", "minimal_image", "symmetric_group",
    "DEFAULT_BATTERY", "WIDE_BATTERY", "FieldSpec", "check_representation", "find_representation",
    "projective_pattern", "representability_summary",
    "MatroidRecord", "classify", "query", "read_records", "terao_pipeline",
    "tutte_unique_within", "write_records",
]

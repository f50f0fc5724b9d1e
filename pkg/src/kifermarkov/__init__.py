"""Random Schrodinger cocycles near the Kifer example.

Exact walk combinatorics, Lyapunov exponents, eigenvalue counting and the
quasi-mode lower bound for the integrated density of states.
"""
__version__ = "0.1.0"

from .sl2 import ProductForm, classify_word, kifer_pair, word_product
from .words import MarkovSpec, default_spec, sample_stationary, word_to_form, word_to_product
from .walks import event_Bl, event_Cl, event_probability_En, narayana_counts, pascal_table
from .spectra import TridiagonalOperator, build_truncation, count_below, count_in, ids_estimate
from .lyapunov import (CocycleSpec, LEEstimate, bernoulli_conjugate_le, induced_le,
                       le_estimate, le_exact_kifer, lipschitz_check)
from .quasimodes import (BlockLayout, QuasiMode, build_quasimode, count_good_blocks,
                         gap_experiment, temple_count)
from .modulus import (GapSeries, ModulusFamily, fit_breakdown, ids_vs_le_consistency,
                      modulus_eval, thouless_le)

__all__ = [
    "ProductForm", "classify_word", "kifer_pair", "word_product",
    "MarkovSpec", "default_spec", "sample_stationary", "word_to_form", "word_to_product",
    "event_Bl", "event_Cl", "event_probability_En", "narayana_counts", "pascal_table",
    "TridiagonalOperator", "build_truncation", "count_below", "count_in", "ids_estimate",
    "CocycleSpec", "LEEstimate", "bernoulli_conjugate_le", "induced_le", "le_estimate",
    "le_exact_kifer", "lipschitz_check",
    "BlockLayout", "QuasiMode", "build_quasimode", "count_good_blocks", "gap_experiment",
    "temple_count",
    "GapSeries", "ModulusFamily", "fit_breakdown", "ids_vs_le_consistency", "modulus_eval",
    "thouless_le",
]

"""Auxiliary-variables Markov chain on integer partitions and its exact analysis."""

from .convergence import (
    chi2_distance,
    chi2_lower_bound_1k,
    chi2_spectral,
    mixing_time,
    pk_sequence,
    thm51_bound,
    tv_distance,
    tv_lower_bound_1k,
)
from .exact_chain import (
    TransitionMatrix,
    aux_matrix,
    aux_matrix_via_operator,
    check_reversibility,
    hanlon_ell_matrix,
    hanlon_matrix,
    metropolis_matrix,
    power_dist,
)
from .measures import (
    Measure,
    pi_ewens,
    pi_inf_t,
    pi_multiplicative,
    pi_qt,
    pi_qt_table,
    w_given,
    z_qt,
)
from .partitions import Partition, enumerate_partitions, mn_character, multiplicities, z_classical
from .samplers import (
    RngStream,
    aux_step,
    chinese_restaurant,
    hanlon_step,
    metropolis_step,
    run_chain,
    sample_multiplicative_rejection,
    sample_pi_inf_t,
    sample_w,
    stick_breaking,
)
from .spectral import beta, c_pair, eigen_table, gram_check, kostka_qt, x_special

__version__ = "0.1.0"

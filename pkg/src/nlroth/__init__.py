"""Counting operators, cut norms, weak regularity and density increments for
the configuration ``x, x + y, x + q y^2`` inside ``{1..N}``."""
from ._accel import BACKEND
from .core import (BoundedFunction, IntegerSet, Progression, balanced_part, indicator, inner_product, lp_norm,
                   read_function, read_set, write_function, write_set)
from .counting import (CountingParams, PolynomialFamily, configuration_counts, count_configurations, count_operator,
                       find_configuration, is_configuration_free, l1_control_bound, polynomial_counting_operator)
from .cutnorm import (CorrelationWitness, CutNormEstimate, SearchGrid, cut_norm_exact_small, cut_norm_lower,
                      dual_function, inverse_correlation_search)
from .factors import (Factor, LocalFunction, SimpleLocal, factor_size_bound, join_factors, project, read_factor,
                      simple_congruence_factor, simple_local_factor, simple_real_factor, singleton_factor,
                      trivial_factor, write_factor)
from .fourier import (Frequency, fejer_kernel, fourier_coefficient, grid_spectrum, lipschitz_constant_along,
                      major_arc_witness, quadratic_weyl_sum, rational_approximation, sixth_moment_squares,
                      smooth_along, weyl_frequency_finder)
from .increment import (ConfigurationFound, IncrementResult, IterationTrace, ProgressionScan, build_section1_example,
                        find_density_increment, greedy_extremal_search, run_increment_iteration)
from .regularity import RegularityOutput, energy, weak_regularize

__version__ = "0.1.0"

"""Exact matching costs, Fourier upper bounds and Monte Carlo checks of
empirical-measure convergence rates on the unit cube and the flat torus."""

from .constants import akt_upper_constants, quantitative_bound, subset_constants, subset_variance
from .fourier import (FourierBoundReport, char_fn, char_fn_box, char_fn_unit, lemma1_bound,
                      optimize_t, prop2_bound)
from .geometry import Frame, FrameError, Point, circle_distance, to_half_torus, torus_distance, wrap
from .lower_bounds import (LowerBoundReport, c_series, dist_to_sample_integral, e_series,
                           lower_1d_statistic)
from .measures import (DiscreteMeasure, RngStream, average_measure, sample_iid_uniform,
                       sample_renewal_mixing, sample_rotation_sequence, smooth_sample,
                       subset_empirical)
from .series import SeriesValue, s_d_series, t1_series, t_d_series
from .transport import MatchingResult, w1_1d, w1_bruteforce, w1_exact

__version__ = "0.1.0"

"""Numerical laboratory for the double standard map family."""

__version__ = "0.1.0"

from .maps import (CRITICAL_POINT, DegenerateDerivativeError, MapParams,
                   OrbitTrace, circle_dist, comparability_ratio, deriv,
                   deriv2, eval_map, iterate_critical, lift,
                   lyapunov_critical, orbit_lift, param_deriv_closed_form, wrap)
from .partition import (ExtendedCell, IndexOutOfWindowError, PartitionIndex,
                        ReturnWindow, annulus_length, cell_length,
                        cell_offsets, extended, interval_of, locate,
                        locate_offset)
from .mt import (CriticalGap, MtParameter, PeriodicPoint, SolverFailure,
                 critical_gap, find_mt, periodic_points, smallest_mt_fixture,
                 verify_mt)
from .boundfree import (BoundPeriodResult, InfiniteBoundError, NonReturnError,
                        OutsideExpansionEstimate, RecoveryReport,
                        beta_bound_period, bound_distortion_ratio,
                        default_beta, first_hit_products,
                        global_distortion_ratio, outside_expansion_stats,
                        param_bound_period, recovery_check,
                        window_bound_period)
from .certify import (ExpansionCertificate, Inconclusive, PlaneCell,
                      Refutation, TongueNotFoundError, certify_uniform,
                      check_certificate, classify_point, scan_plane,
                      tongue_tip)
from .induction import (AccountingError, Engine, InductionConfig,
                        ParamElement, ReturnRecord, StoppingTime,
                        SurvivorReport, dyadic_pieces, run, startup,
                        stopping_time, verify_induction)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Exact achievement sets, ideal-restricted subseries sums and rearrangements."""

from .numeric import DomainError, Interval, Q, Refusal, fmt
from .sets import (EMPTY, EVEN, NAT, ODD, POWERS_OF_TWO, SQUARES, Complement, Finite,
                   Progression, Registered, SymbolicSet, parse_set, register_sequence)
from .ideals import (FIN, IN, NOT_IN, UNKNOWN, DensityIdeal, GeneratedIdeal, IntersectionIdeal,
                     SummableIdeal, TriVerdict, dual_filter_member, generated, membership,
                     parse_ideal)
from .series import (ConvergenceClass, Series, make_block_harmonic, make_cantor,
                     make_cantor_plus_point, make_duplicated_quick, make_dyadic, make_geometric,
                     make_harmonic, make_interleaved_conditional, make_missing_singleton,
                     make_open_ai, make_signed_harmonic, make_supset, parse_series)
from .achieve import (density_cover_count, extreme_point_membership, hull, ideal_sums,
                      injectivity_check, intersection_law_check, kakeya_classify,
                      measure_estimate, subset_sums, symmetrize)
from .rearrange import (full_line_difference_prefix, greedy_subset_representation,
                        rearrange_difference_to, riemann_rearrange, shifted_halfline_series,
                        sr_classify)

__version__ = "0.1.0"

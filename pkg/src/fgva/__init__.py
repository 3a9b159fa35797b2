"""Exact formal groups, associates, vertex F-algebras and phi-coordinated modules over Q."""

from .associate import (Associate, assoc_check, assoc_extract_p, assoc_from_p, assoc_transform, first_mismatch,
                        nonvanishing_probe, phi_from_literal)
from .bivar import BiSeries, MPoly, diagonal_substitute, iota_expand, swap_nesting, taylor_substitute
from .errors import (BasisExplosion, ConventionMismatch, DomainViolation, FGVAError, GroupMismatch, IncompatiblePair,
                     InsufficientPrecision, LiteralError, OverflowBeyondCap, PrecisionExhausted,
                     UnboundedPrincipalPart, ZeroDenominator)
from .fields import (FieldAlgebra, FockSpace, check_closure_assoc, closure_generate, compatibility_check, heisenberg,
                     heisenberg_example, least_compatible_p, normalization_check, y_phi_product)
from .formal_group import (FormalGroupLaw, fg_builtin, fg_check, fg_conjugate, fg_from_log, fg_log, parse_group,
                           tanh_law)
from .harness import (check_D_definition, check_F_assoc_alt, check_g_locality_equiv, check_jacobi_F,
                      check_weak_assoc, check_weak_comm)
from .linear import Vector
from .literals import format_series, parse_series
from .report import CheckReport, Witness
from .series import LaurentSeries, compose, reversion
from .vertex import (VertexStructure, borcherds_build, change_variables, d_operator, poly_t, upper_triangular,
                     vacuum_check)
from .zhu import (ModuleStructure, adjoint_module, check_module, check_phi_assoc, check_phi_D_and_commutator,
                  grading_check, module_transform, xw_map, zhu_transform)

__version__ = "0.1.0"

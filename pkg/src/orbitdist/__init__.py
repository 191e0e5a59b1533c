"""Spectral distances between unitary orbits of positive matrices and
boundary-fused matrix paths, with a certified conjugating-unitary builder."""

from .builder import (BuildCertificate, BuildRequest, almost_commuting_path,
                      build_weyl_unitary, continuous_diagonalization,
                      endpoint_diagonalization, sort_permutation)
from .distances import (DistanceReport, d_p_matrix, d_u_hermitian, d_w_matrix,
                        d_w_matrix_scan, delta_matching, direct_sum,
                        full_report)
from .errors import (BranchCut, ClusterGapFailure, DimensionMismatch,
                     InvalidParams, LengthMismatch, MassMismatch,
                     MembershipViolation, NegativeInput, NonHermitianInput,
                     NotAContraction, NotDominating, OrbitDistError,
                     ParamsMismatch, RefinementExhausted, SingularInput)
from .linalg import (HermitianMatrix, Spectrum, UnitaryMatrix, counting,
                     cutdown, eigh, expm_i, nearest_unitary, numerical_rank,
                     op_norm, unitary_log)
from .measures import (AtomicMeasure, TraceSpec, dimension_function,
                       lp_distance, lp_one_sided, lp_one_sided_subsets,
                       measure_from_spectrum)
from .razak import (RazakElement, RazakParams, UnitizedUnitaryPath, conjugate,
                    d_p_path, d_w_path, dist_norm, exp_path,
                    export_eigenvalues_csv, gen_random, membership_defect,
                    refine, sup_norm, unitary_error, validate)

__all__ = [name for name in dir() if not name.startswith("_")]

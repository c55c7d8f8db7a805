from __future__ import annotations

# Exact-formula comparisons (trace, Hermiticity, closed forms).
FORMULA_TOL = 1e-10
# Eigen-solver and steady-state residual outputs.
SOLVER_TOL = 1e-9
# Hermiticity accepted by hermitian_eigensystem.
HERMITIAN_TOL = 1e-8
# Eigenvalues in [-PSD_CLIP_TOL, 0) are clipped after a steady-state solve.
PSD_CLIP_TOL = 1e-9
# Eigenvalues in [-ENTROPY_FLOOR, 0) count as zero in entropy sums.
ENTROPY_FLOOR = 1e-12
# Concurrence and partial-transpose dead band; values inside count as separable.
ENTANGLEMENT_DEAD_BAND = 1e-10
# Singular values below NULL_SPACE_RTOL * sigma_max span the null space.
NULL_SPACE_RTOL = 1e-10
# Propagation aborts when |Tr rho - 1| exceeds this.
TRACE_DRIFT_TOL = 1e-6
# Propagation stops early once successive windows differ by less than this.
PROPAGATION_CONVERGENCE_TOL = 1e-12

MAX_QUBITS = 8
# Superoperator dimension up to which dense SVD / expm paths are used.
DENSE_SUPEROPERATOR_DIM = 256
# Above this the Liouvillian is never densified for uniqueness checks.
DENSE_SVD_DIM_LIMIT = 1024

# Master-equation validity: ratios to omega0 above this trigger a regime warning.
REGIME_RATIO_LIMIT = 0.1

# Combined-noise edges are searched up to this multiple of Omega.
UPPER_EDGE_SEARCH_FACTOR = 100.0

"""Dense float64 matrix kernels underlying the manifold layer.

All routines take and return plain 2-D ``numpy.ndarray`` objects in C order.
Matrices in this library are small (tens of rows/columns), so the kernels
favor robustness and determinism over asymptotic tricks: QR signs are fixed,
symmetric outputs are explicitly symmetrized, and the structured solvers
verify their own residuals.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, RankDeficientError, ValidationError

# Error threshold on eigenvalues of a matrix that must be positive definite.
EPS_SPD = 1e-14

# Pade [6/6] numerator coefficients, constant term first.
_PADE6 = (665280.0, 332640.0, 75600.0, 10080.0, 840.0, 42.0, 1.0)


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValidationError(f"{name} must be a 2-D array, got shape {a.shape}")
    return a


def _require_square(a: np.ndarray, name: str) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    return a


def frobenius_norm(a) -> float:
    """Frobenius norm of ``a``: the square root of the sum of squared entries."""
    return float(np.linalg.norm(_as_matrix(a)))


def skew_part(a) -> np.ndarray:
    """Skew-symmetric part ``(a.T - a) / 2`` of a square matrix.

    Note the transpose-minus-original sign convention; it is used consistently
    everywhere in this package. Applying the operator twice negates it:
    ``skew_part(skew_part(a)) == -skew_part(a)``.
    """
    a = _require_square(_as_matrix(a, "skew_part input"), "skew_part input")
    return 0.5 * (a.T - a)


def thin_qr_q_factor(a, rank_rtol: float = 1e-12) -> np.ndarray:
    """Q-factor of the thin QR decomposition with a nonnegative R diagonal.

    Forcing the R diagonal nonnegative makes the factor unique, so repeated
    runs (and other implementations of the same convention) produce the same
    orthonormal frame from the same input.

    Raises ``RankDeficientError`` naming the first column whose R-diagonal
    magnitude falls below ``rank_rtol`` times the largest one.
    """
    a = _as_matrix(a, "thin_qr_q_factor input")
    if a.shape[0] < a.shape[1]:
        raise ValidationError(
            f"need at least as many rows as columns, got shape {a.shape}"
        )
    q, r = np.linalg.qr(a)
    diag = np.diag(r)
    scale = np.max(np.abs(diag))
    bad = np.flatnonzero(np.abs(diag) <= rank_rtol * scale)
    if scale == 0.0 or bad.size:
        column = 0 if scale == 0.0 else int(bad[0])
        raise RankDeficientError(
            f"input is numerically rank deficient at column {column}", column
        )
    signs = np.where(diag < 0.0, -1.0, 1.0)
    return q * signs


def spd_inv_sqrt(s, eps_spd: float = EPS_SPD, sym_tol: float = 1e-10) -> np.ndarray:
    """Inverse square root of a symmetric positive definite matrix.

    Computed through the symmetric eigendecomposition: S = U diag(w) U^T
    gives R = U diag(w^-1/2) U^T, re-symmetrized against rounding. The
    result satisfies R S R = I to roughly machine precision times the
    condition number of S.

    Raises ``ValidationError`` if ``s`` is not symmetric within ``sym_tol``
    (relative to its norm) and ``DomainError`` if any eigenvalue is at or
    below ``eps_spd``.
    """
    s = _require_square(_as_matrix(s, "spd_inv_sqrt input"), "spd_inv_sqrt input")
    nrm = np.linalg.norm(s)
    asym = np.linalg.norm(s - s.T)
    if asym > sym_tol * max(1.0, nrm):
        raise ValidationError(
            f"matrix is not symmetric: asymmetry {asym:.3e}", defect=asym
        )
    w, u = np.linalg.eigh(0.5 * (s + s.T))
    if w[0] <= eps_spd:
        raise DomainError(
            f"matrix is not positive definite: smallest eigenvalue {w[0]:.3e} "
            f"<= {eps_spd:.1e}"
        )
    r = (u / np.sqrt(w)) @ u.T
    return 0.5 * (r + r.T)


def skew_expm(omega, scale: float = 1.0, skew_tol: float = 1e-10) -> np.ndarray:
    """Matrix exponential exp(scale * omega) of a skew-symmetric matrix.

    Scaling and squaring with a degree-6 diagonal Pade core. The squaring
    count is ceil(log2 ||scale * omega||_F) clamped at zero, so the core
    always sees an argument of Frobenius norm at most 1, where the Pade
    truncation error is far below the 1e-10 orthogonality budget. For a skew
    argument the diagonal Pade approximant is itself exactly orthogonal in
    exact arithmetic, and squaring preserves that.
    """
    omega = _require_square(_as_matrix(omega, "skew_expm input"), "skew_expm input")
    defect = np.linalg.norm(omega + omega.T)
    if defect > skew_tol * max(1.0, np.linalg.norm(omega)):
        raise ValidationError(
            f"matrix is not skew-symmetric: defect {defect:.3e}", defect=defect
        )
    p = omega.shape[0]
    a = scale * omega
    nrm = np.linalg.norm(a)
    if nrm == 0.0:
        return np.eye(p)
    squarings = max(0, math.ceil(math.log2(nrm)))
    a = a / (2.0 ** squarings)

    eye = np.eye(p)
    a2 = a @ a
    a4 = a2 @ a2
    b = _PADE6
    even = b[0] * eye + b[2] * a2 + b[4] * a4 + b[6] * (a4 @ a2)
    odd = a @ (b[1] * eye + b[3] * a2 + b[5] * a4)
    result = np.linalg.solve(even - odd, even + odd)
    for _ in range(squarings):
        result = result @ result
    return result


def solve_lyapunov_sym(m, b, rel_tol: float = 1e-10) -> np.ndarray:
    """Solve M S + S M^T = B for symmetric S, with B symmetric.

    Dense Kronecker vectorization: (I (x) M + M (x) I) vec(S) = vec(B) in
    column-major stacking, solved directly. The cost is O(n^6), which is
    acceptable at this package's matrix sizes and is an intended part of the
    runtime comparison between map pairs.

    The pre-condition that M + M^T be positive definite guarantees a unique
    solution (every eigenvalue pair sum has positive real part); its failure
    is reported as ``DomainError`` since it means the lifting's arguments sit
    too far apart. The returned S is symmetrized and its residual is checked
    against ``rel_tol * ||B||_F``.
    """
    m = _require_square(_as_matrix(m, "solve_lyapunov_sym M"), "solve_lyapunov_sym M")
    b = _require_square(_as_matrix(b, "solve_lyapunov_sym B"), "solve_lyapunov_sym B")
    n = m.shape[0]
    if b.shape[0] != n:
        raise ValidationError(f"M and B sizes differ: {m.shape} vs {b.shape}")
    bnrm = np.linalg.norm(b)
    if np.linalg.norm(b - b.T) > 1e-10 * max(1.0, bnrm):
        raise ValidationError("right-hand side B must be symmetric")
    sym_eigs = np.linalg.eigvalsh(m + m.T)
    if sym_eigs[0] <= 0.0:
        raise DomainError(
            "M + M^T is not positive definite (smallest eigenvalue "
            f"{sym_eigs[0]:.3e}); arguments too far apart for a unique solution"
        )
    # I (x) M + M (x) I assembled blockwise (same layout np.kron would give):
    # the first term is the block diagonal, the second adds M[i, j] I blocks.
    k4 = np.zeros((n, n, n, n))
    idx = np.arange(n)
    k4[idx, :, idx, :] = m
    k4[:, idx, :, idx] += m
    kron_op = k4.reshape(n * n, n * n)
    vec_s = np.linalg.solve(kron_op, b.flatten(order="F"))
    s = vec_s.reshape((n, n), order="F")
    s = 0.5 * (s + s.T)
    residual = np.linalg.norm(m @ s + s @ m.T - b)
    if residual > rel_tol * max(bnrm, np.finfo(float).tiny):
        raise DomainError(
            f"Lyapunov solve residual {residual:.3e} exceeds "
            f"{rel_tol:.1e} * ||B||; arguments too far apart"
        )
    return s


def solve_ortho_retraction_eq(
    omega, g, tol: float = 1e-12, max_inner_iters: int = 100
) -> np.ndarray:
    """Solve 2S + S^2 + G + S Omega - Omega S = 0 for the symmetric S near 0.

    This is the normal-space correction of the orthographic retraction:
    writing the retracted point as Q = X + V + X S with S symmetric,
    Omega = X^T V and G = V^T V, the orthonormality condition Q^T Q = I
    expands exactly to the quadratic equation above. It is solved by the
    fixed-point iteration S <- -(S^2 + G + S Omega - Omega S) / 2 started
    from S = 0, which contracts for small G and Omega and keeps every
    iterate symmetric. Iteration stops once the equation residual drops
    below ``tol``.
    """
    omega = _require_square(
        _as_matrix(omega, "solve_ortho_retraction_eq Omega"),
        "solve_ortho_retraction_eq Omega",
    )
    g = _require_square(
        _as_matrix(g, "solve_ortho_retraction_eq G"), "solve_ortho_retraction_eq G"
    )
    n = omega.shape[0]
    if g.shape[0] != n:
        raise ValidationError(f"Omega and G sizes differ: {omega.shape} vs {g.shape}")
    if np.linalg.norm(omega + omega.T) > 1e-9 * max(1.0, np.linalg.norm(omega)):
        raise ValidationError("Omega must be skew-symmetric")
    if np.linalg.norm(g - g.T) > 1e-9 * max(1.0, np.linalg.norm(g)):
        raise ValidationError("G must be symmetric")

    s = np.zeros((n, n))
    first_res = None
    for _ in range(max_inner_iters):
        rhs = s @ s + g + s @ omega - omega @ s
        res = np.linalg.norm(2.0 * s + rhs)
        if res < tol:
            return 0.5 * (s + s.T)
        if first_res is None:
            first_res = res
        elif not np.isfinite(res) or res > 1e6 * max(1.0, first_res):
            break  # diverging, no point burning the remaining iterations
        s = -0.5 * rhs
    raise DomainError(
        f"inner iteration did not reach residual {tol:.1e} within "
        f"{max_inner_iters} steps; tangent too large for the orthographic "
        "retraction"
    )

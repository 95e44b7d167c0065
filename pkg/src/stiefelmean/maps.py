"""Retraction and lifting maps on St(p, n), and their mixed composition.

Two families are implemented, each locally inverse to its associate:

* polar:        P_X(V) = (X + V) (I + V^T V)^(-1/2), lifted by solving a
                small linear matrix equation for the symmetric factor S in
                V = Q S - X;
* orthographic: lifting is the tangent projection of Q - X (which collapses
                to Q - X sym(X^T Q)); the retraction corrects along the
                normal space, Q = X + V + X S with symmetric S from the
                quadratic equation solved in ``kernels``.

The supported pair configurations are polar/polar, orthographic/orthographic
and the mixed polar-retraction with orthographic-lifting. Composing maps from
different families is not an exact identity; ``composition_discrepancy_*``
quantify the mismatch, in both a direct and a closed-form evaluation driven
only by M = Q^T X.

All maps are local: liftings reject argument pairs whose discrepancy reaches
``DOMAIN_GUARD``. The guard is an engineering bound, not a theoretical
radius; it is sized so that the sample clouds used by the bundled experiments
(spread up to sigma = 0.2 on St(20, 4)) stay inside it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, ValidationError
from .kernels import solve_lyapunov_sym, solve_ortho_retraction_eq, spd_inv_sqrt
from .manifold import StiefelPoint, TangentVector

# Liftings reject pairs with discrepancy at or above this bound.
DOMAIN_GUARD = 1.5


class RetractionKind(Enum):
    POLAR = "polar"
    ORTHOGRAPHIC = "orthographic"


class LiftingKind(Enum):
    POLAR = "polar"
    ORTHOGRAPHIC = "orthographic"


@dataclass(frozen=True)
class MapPair:
    """A retraction/lifting configuration for the averaging iteration.

    Three configurations are supported: the two associated pairs and the
    mixed polar-retraction/orthographic-lifting pair. The remaining
    combination (orthographic retraction with polar lifting) is rejected.
    """

    retraction: RetractionKind
    lifting: LiftingKind

    def __post_init__(self):
        if (
            self.retraction is RetractionKind.ORTHOGRAPHIC
            and self.lifting is LiftingKind.POLAR
        ):
            raise ValidationError(
                "unsupported configuration: orthographic retraction with "
                "polar lifting"
            )

    @property
    def label(self) -> str:
        if self.retraction is RetractionKind.POLAR and self.lifting is LiftingKind.POLAR:
            return "polar"
        if (
            self.retraction is RetractionKind.ORTHOGRAPHIC
            and self.lifting is LiftingKind.ORTHOGRAPHIC
        ):
            return "ortho"
        return "mixed"

    @classmethod
    def from_name(cls, name: str) -> "MapPair":
        """Parse a pair name: 'polar', 'ortho' or 'mixed' (a few aliases
        accepted). Raises ``ValidationError`` for anything else, including
        the unsupported 'ortho-polar'."""
        key = name.strip().lower().replace("_", "-")
        table = {
            "polar": POLAR_POLAR,
            "polar-polar": POLAR_POLAR,
            "ortho": ORTHO_ORTHO,
            "ortho-ortho": ORTHO_ORTHO,
            "orthographic": ORTHO_ORTHO,
            "mixed": MIXED_POLAR_ORTHO,
            "polar-ortho": MIXED_POLAR_ORTHO,
        }
        if key not in table:
            raise ValidationError(
                f"unknown map pair '{name}' (choose from: polar, ortho, mixed)"
            )
        return table[key]


POLAR_POLAR = MapPair(RetractionKind.POLAR, LiftingKind.POLAR)
ORTHO_ORTHO = MapPair(RetractionKind.ORTHOGRAPHIC, LiftingKind.ORTHOGRAPHIC)
MIXED_POLAR_ORTHO = MapPair(RetractionKind.POLAR, LiftingKind.ORTHOGRAPHIC)
ALL_PAIRS = (POLAR_POLAR, ORTHO_ORTHO, MIXED_POLAR_ORTHO)


@dataclass(frozen=True)
class CompositionDiscrepancy:
    """Mismatch of the mixed composition at one argument pair: the value
    ||I - Q^T P_X(lift_X(Q))||_F together with the product M = Q^T X that
    drives its closed form."""

    value: float
    m: np.ndarray


def _check_same_dims(x: StiefelPoint, q: StiefelPoint):
    if (x.dims.p, x.dims.n) != (q.dims.p, q.dims.n):
        raise ValidationError(f"dimension mismatch: {x.dims} vs {q.dims}")


def _check_anchor(x: StiefelPoint, v: TangentVector):
    if v.anchor is not x and not np.array_equal(v.anchor.X, x.X):
        raise ValidationError("tangent vector is anchored at a different point")


def _guard_locality(xtq: np.ndarray, guard: float, what: str) -> float:
    # delta(X, Q) falls out of the n x n product the liftings need anyway.
    d = float(np.linalg.norm(np.eye(xtq.shape[0]) - xtq))
    if d >= guard:
        raise DomainError(
            f"{what}: arguments too far apart (discrepancy {d:.3f} >= {guard})"
        )
    return d


def polar_retraction(x: StiefelPoint, v: TangentVector) -> StiefelPoint:
    """P_X(V) = (X + V) (I + V^T V)^(-1/2).

    Defined for every tangent vector; I + V^T V is always positive definite.
    """
    _check_anchor(x, v)
    n = x.dims.n
    w = v.V
    return StiefelPoint(
        (x.X + w) @ spd_inv_sqrt(np.eye(n) + w.T @ w), dims=x.dims
    )


def polar_lifting(
    x: StiefelPoint, q: StiefelPoint, guard: float = DOMAIN_GUARD
) -> TangentVector:
    """Inverse of the polar retraction: the tangent V with P_X(V) = Q.

    Writing V = Q S - X with S symmetric, tangency forces the linear system
    (X^T Q) S + S (Q^T X) = 2 I, solved by ``solve_lyapunov_sym``. The
    round trip through ``polar_retraction`` reproduces Q to solver accuracy.
    """
    _check_same_dims(x, q)
    xtq = x.X.T @ q.X
    _guard_locality(xtq, guard, "polar lifting")
    n = x.dims.n
    s = solve_lyapunov_sym(xtq, 2.0 * np.eye(n))
    # tangency defect of Q S - X equals the solver residual, already bounded
    return TangentVector._unchecked(x, q.X @ s - x.X)


def orthographic_lifting(
    x: StiefelPoint, q: StiefelPoint, guard: float = DOMAIN_GUARD
) -> TangentVector:
    """Tangent projection of Q - X, evaluated as Q - X sym(X^T Q).

    Algebraically identical to projecting Q - X with the tangent projector;
    this form needs only two thin products, which is what makes the mixed
    pair cheap.
    """
    _check_same_dims(x, q)
    xtq = x.X.T @ q.X
    _guard_locality(xtq, guard, "orthographic lifting")
    # X^T V + V^T X = -(E S + S E) with E = X^T X - I, so the defect is
    # bounded by twice the anchor's construction tolerance; skip the re-check
    return TangentVector._unchecked(x, q.X - x.X @ (0.5 * (xtq + xtq.T)))


def orthographic_retraction(x: StiefelPoint, v: TangentVector) -> StiefelPoint:
    """Inverse of the orthographic lifting: move along the normal space
    {X S : S symmetric} until landing on the manifold.

    Q = X + V + X S with S the near-zero symmetric solution of the quadratic
    equation handled by ``solve_ortho_retraction_eq`` (Omega = X^T V,
    G = V^T V). Since Q - X - V = X S is annihilated by the tangent
    projector, the associated lifting recovers V exactly.
    """
    _check_anchor(x, v)
    w = v.V
    xtv = x.X.T @ w
    omega = 0.5 * (xtv - xtv.T)  # drop the rounding-level symmetric part
    s = solve_ortho_retraction_eq(omega, w.T @ w)
    return StiefelPoint(x.X + w + x.X @ s, dims=x.dims)


def retract(pair: MapPair, x: StiefelPoint, v: TangentVector) -> StiefelPoint:
    """Apply the pair's retraction."""
    if pair.retraction is RetractionKind.POLAR:
        return polar_retraction(x, v)
    return orthographic_retraction(x, v)


def lift(
    pair: MapPair, x: StiefelPoint, q: StiefelPoint, guard: float = DOMAIN_GUARD
) -> TangentVector:
    """Apply the pair's lifting."""
    if pair.lifting is LiftingKind.POLAR:
        return polar_lifting(x, q, guard=guard)
    return orthographic_lifting(x, q, guard=guard)


def composition_discrepancy_direct(
    x: StiefelPoint, q: StiefelPoint
) -> CompositionDiscrepancy:
    """Mismatch of the mixed composition, evaluated by actually composing the
    maps: lift Q orthographically at X, retract polarly, and measure the
    discrepancy to Q."""
    _check_same_dims(x, q)
    v = orthographic_lifting(x, q)
    retracted = polar_retraction(x, v)
    value = float(np.linalg.norm(np.eye(x.dims.n) - retracted.X.T @ q.X))
    return CompositionDiscrepancy(value=value, m=q.X.T @ x.X)


def composition_discrepancy_closed_form(
    x: StiefelPoint, q: StiefelPoint
) -> CompositionDiscrepancy:
    """Same mismatch computed purely from M = Q^T X:

        Delta = || I - [I + M - M(M + M^T)/2]
                      [2I - (M - M^T)^2/4 - M M^T]^(-1/2) ||_F

    The bracket under the inverse square root equals I + V^T V of the lifted
    tangent, hence is symmetric positive definite whenever the pair is close
    enough; failure of that is reported as the arguments being too far apart.
    """
    _check_same_dims(x, q)
    n = x.dims.n
    eye = np.eye(n)
    m = q.X.T @ x.X
    left = eye + m - 0.5 * m @ (m + m.T)
    d = m - m.T
    bracket = 2.0 * eye - 0.25 * (d @ d) - m @ m.T
    asym = np.linalg.norm(bracket - bracket.T)
    if asym > 1e-12 * max(1.0, float(np.linalg.norm(bracket))):
        raise ValidationError(f"closed-form bracket lost symmetry: {asym:.3e}")
    bracket = 0.5 * (bracket + bracket.T)
    try:
        inv_sqrt = spd_inv_sqrt(bracket)
    except DomainError as exc:
        raise DomainError(
            "closed-form composition discrepancy: arguments too far apart "
            f"({exc})"
        ) from exc
    value = float(np.linalg.norm(eye - left @ inv_sqrt))
    return CompositionDiscrepancy(value=value, m=m)

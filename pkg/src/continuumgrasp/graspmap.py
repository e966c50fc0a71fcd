"""Pointwise and integrated grasp maps, friction cones, and gramians.

The local grasp map G(s) sends contact force components in the moving frame
to the net planar wrench (fx, fy, tau); stacking the friction-cone extreme
rays into V gives the cone-coordinate input matrix B(s) = G(s) V so that
nonnegative inputs sweep exactly the admissible contact forces.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, InvalidParameterError
from .geometry import BoundaryCurve, CurveSegment, as_segment


@dataclass(frozen=True)
class FrictionCone:
    """Coulomb cone |f_t| <= mu * f_n, f_n >= 0, spanned by two extreme rays."""

    mu: float
    psi: float = field(init=False)        # ray angle from the tangent axis
    v1: np.ndarray = field(init=False)
    v2: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.mu < 0:
            raise InvalidParameterError(f"friction coefficient must be >= 0, got {self.mu}")
        psi = float(np.arctan2(1.0, self.mu))
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "v1", np.array([np.cos(psi), np.sin(psi)]))
        object.__setattr__(self, "v2", np.array([-np.cos(psi), np.sin(psi)]))
        if self.mu == 0:
            warnings.warn("mu = 0 collapses the cone to the normal ray; "
                          "B(s) has rank <= 1 pointwise", stacklevel=3)

    @property
    def V(self) -> np.ndarray:
        """2x2 matrix with columns v1, v2."""
        return np.column_stack([self.v1, self.v2])

    def contains(self, f, tol=0.0) -> bool:
        """Check |f_t| <= mu*f_n and f_n >= 0 for a local-frame force."""
        ft, fn = float(f[0]), float(f[1])
        return fn >= -tol and abs(ft) <= self.mu * fn + tol

    def coordinates(self, f) -> np.ndarray:
        """Solve f = V u for u (components may be negative outside the cone)."""
        return np.linalg.solve(self.V, np.asarray(f, dtype=float))


@dataclass(frozen=True)
class Wrench:
    """Planar force plus out-of-plane torque, treated as a vector in R^3."""

    fx: float
    fy: float
    tau: float

    @classmethod
    def from_array(cls, w) -> "Wrench":
        w = np.asarray(w, dtype=float).reshape(3)
        return cls(float(w[0]), float(w[1]), float(w[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.tau])

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class GraspMapSample:
    """Local grasp map G(s) and cone-coordinate input matrix B(s) = G(s) V."""

    s: float
    G: np.ndarray              # (3, 2)
    B: np.ndarray | None = None  # (3, 2), present when a cone was supplied


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _wrench_array(w) -> np.ndarray:
    if isinstance(w, Wrench):
        return w.as_array()
    return np.asarray(w, dtype=float).reshape(3)


def grasp_maps(segment, cone: FrictionCone | None = None):
    """Stacked G (and B when a cone is given) over the whole segment grid.

    Returns G with shape (M+1, 3, 2); with a cone, returns (G, B) where
    B[j] = G[j] @ V.
    """
    seg = as_segment(segment)
    c, s = np.cos(seg.phi), np.sin(seg.phi)
    gx, gy = seg.points[:, 0], seg.points[:, 1]
    # rows: R(phi) on top, (gamma_perp)^T R(phi) below
    G = np.empty((len(seg.s), 3, 2))
    G[:, 0, 0] = c
    G[:, 0, 1] = -s
    G[:, 1, 0] = s
    G[:, 1, 1] = c
    # gamma_perp = (-gy, gx); third row = gamma_perp . columns of R
    G[:, 2, 0] = -gy * c + gx * s
    G[:, 2, 1] = gy * s + gx * c
    if cone is None:
        return G
    return G, G @ cone.V


def grasp_map_at(segment, s: float, cone: FrictionCone | None = None) -> GraspMapSample:
    """Local grasp map at arclength s on the segment grid."""
    seg = as_segment(segment)
    j = seg.index_of(s)
    G = grasp_maps(seg)[j]
    B = G @ cone.V if cone is not None else None
    return GraspMapSample(s=float(seg.s[j]), G=G, B=B)


def trapezoid_weights(n_points: int, grid_step: float) -> np.ndarray:
    w = np.full(n_points, grid_step)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def total_wrench(segment, force_profile) -> Wrench:
    """Net wrench of a local-frame force profile, by trapezoid quadrature.

    force_profile has shape (M+1, 2) with rows (f_t, f_n) on the segment grid.
    """
    seg = as_segment(segment)
    f = np.asarray(force_profile, dtype=float)
    if f.shape != (len(seg.s), 2):
        raise GridMismatchError(
            f"force profile shape {f.shape} does not match segment grid "
            f"({len(seg.s)}, 2)")
    G = grasp_maps(seg)
    pointwise = np.einsum("jab,jb->ja", G, f)
    w = trapezoid_weights(len(seg.s), seg.grid_step)
    return Wrench.from_array(w @ pointwise)


def controllability_gramian(segment, cone: FrictionCone | None = None,
                            cone_coordinates: bool = False) -> np.ndarray:
    """Gramian of the wrench system over the segment, 3x3 symmetric PSD.

    Plain variant integrates G G^T; with cone_coordinates=True it integrates
    B B^T instead (a cone must be supplied).  Trapezoid quadrature on the
    segment grid.
    """
    seg = as_segment(segment)
    if cone_coordinates:
        if cone is None:
            raise InvalidParameterError("cone_coordinates=True requires a friction cone")
        _, mats = grasp_maps(seg, cone)
    else:
        mats = grasp_maps(seg)
    w = trapezoid_weights(len(seg.s), seg.grid_step)
    outer = np.einsum("jab,jcb->jac", mats, mats)
    return np.einsum("j,jac->ac", w, outer)


def gramian_determinant_identity(segment) -> tuple[float, float]:
    """det(W) and its closed form L*(L*int||gamma||^2 - ||int gamma||^2).

    Both sides use the same trapezoid rule; they agree to rounding error for
    any segment, and are positive for closed-curve segments of positive
    length.
    """
    seg = as_segment(segment)
    w = trapezoid_weights(len(seg.s), seg.grid_step)
    length = seg.length
    gamma_bar = w @ seg.points
    gamma_sq = float(w @ np.sum(seg.points ** 2, axis=1))
    det_closed = length * (length * gamma_sq - float(gamma_bar @ gamma_bar))
    det_direct = float(np.linalg.det(controllability_gramian(seg)))
    return det_direct, det_closed


def discrete_grasp_map(curve: BoundaryCurve, contact_points) -> np.ndarray:
    """Classical point-contact grasp map [G(s_1) ... G(s_n)], shape (3, 2n)."""
    pts = list(contact_points)
    if not pts:
        raise GridMismatchError("need at least one contact point")
    stack = grasp_maps(as_segment(curve))
    total = curve.total_length
    blocks = []
    for s in pts:
        if not 0.0 <= s < total:
            raise InvalidParameterError(
                f"contact arclength {s} outside [0, {total})")
        # nearest parent sample carries the frame for this contact
        j = int(round(s / curve.grid_step)) % curve.n_intervals
        blocks.append(stack[j])
    return np.hstack(blocks)

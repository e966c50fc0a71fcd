"""Closed planar boundary curves on a uniform arclength grid.

A curve is stored as a sample table at s_j = j*h, j = 0..N, with the last
sample duplicating the first (closed loop).  Frames follow the right-handed
convention t = (cos phi, sin phi), n = (-sin phi, cos phi); curves are
traversed counterclockwise so n points into the enclosed region and the
enclosed signed area is positive.  The center of mass of the enclosed region
sits at the origin, which fixes the torque reference for all wrench
computations downstream.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidParameterError

TWO_PI = 2.0 * np.pi

MIN_SAMPLES = 8

# Reproducible stand-in for a "randomly" deformed unit circle: low-order
# polar modes (mode, amplitude, phase), fixed so tests and scenarios are
# deterministic.
REFERENCE_DEFORMATION = (
    (2, 0.08, 0.7),
    (3, 0.06, 1.9),
    (4, 0.04, 3.1),
    (5, 0.03, 4.3),
)


@dataclass(frozen=True)
class CurveSample:
    """One row of the sample table."""

    s: float
    position: np.ndarray      # gamma(s), shape (2,)
    frame_angle: float        # phi(s), unwrapped
    curvature: float          # kappa(s)

    @property
    def perp(self) -> np.ndarray:
        """gamma rotated counterclockwise by pi/2: (-y, x)."""
        return np.array([-self.position[1], self.position[0]])

    @property
    def tangent(self) -> np.ndarray:
        return np.array([np.cos(self.frame_angle), np.sin(self.frame_angle)])

    @property
    def normal(self) -> np.ndarray:
        return np.array([-np.sin(self.frame_angle), np.cos(self.frame_angle)])


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed curve sampled at s_j = j*h, j = 0..N, with points[N] == points[0]."""

    s: np.ndarray             # (N+1,)
    points: np.ndarray        # (N+1, 2)
    phi: np.ndarray           # (N+1,), unwrapped; phi[N] = phi[0] + 2*pi
    kappa: np.ndarray         # (N+1,)
    total_length: float
    grid_step: float

    @property
    def n_intervals(self) -> int:
        return len(self.s) - 1

    @property
    def perp(self) -> np.ndarray:
        """gamma_perp at every sample, shape (N+1, 2)."""
        return np.column_stack([-self.points[:, 1], self.points[:, 0]])

    def sample(self, j: int) -> CurveSample:
        return CurveSample(float(self.s[j]), self.points[j].copy(),
                           float(self.phi[j]), float(self.kappa[j]))

    def enclosed_area(self) -> float:
        """Signed shoelace area over the sample polygon (positive = CCW)."""
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))


@dataclass(frozen=True)
class CurveSegment:
    """Contiguous grasp interval [s0, s0+L] of a parent curve.

    Sample positions and frames are copied from the parent grid; ``s`` is
    local arclength starting at 0.  Segments may wrap the curve seam.
    """

    s: np.ndarray             # (M+1,), local, s[0] = 0, s[M] = length
    points: np.ndarray        # (M+1, 2)
    phi: np.ndarray           # (M+1,), continuous along the segment
    kappa: np.ndarray
    grid_step: float
    length: float
    start_arclength: float
    curve_length: float       # L0 of the parent

    @property
    def perp(self) -> np.ndarray:
        return np.column_stack([-self.points[:, 1], self.points[:, 0]])

    def index_of(self, s: float) -> int:
        """Grid index of local arclength s; raises if s is off the segment grid."""
        j = int(round(s / self.grid_step))
        if j < 0 or j > len(self.s) - 1 or abs(s - j * self.grid_step) > 1e-9 * max(1.0, self.length):
            raise InvalidParameterError(
                f"arclength {s} is not on the segment grid [0, {self.length}]")
        return j


def _assemble_closed(points, phi_raw, kappa, total_length):
    """Build a BoundaryCurve from open sample arrays (j = 0..N-1) plus L0.

    phi_raw holds frame angles mod 2*pi; they are unwrapped here and the
    duplicated closing sample appended.
    """
    n = len(points)
    h = total_length / n
    phi = np.unwrap(phi_raw)
    s = np.arange(n + 1) * h
    points = np.vstack([points, points[0]])
    phi = np.append(phi, phi[0] + TWO_PI)
    kappa = np.append(kappa, kappa[0])
    return BoundaryCurve(s=s, points=points, phi=phi, kappa=kappa,
                         total_length=total_length, grid_step=h)


def make_circle(radius: float, samples: int = 400) -> BoundaryCurve:
    """Circle of the given radius, traversed counterclockwise from (radius, 0)."""
    if radius <= 0:
        raise InvalidParameterError(f"radius must be positive, got {radius}")
    if samples < MIN_SAMPLES:
        raise InvalidParameterError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    total_length = TWO_PI * radius
    theta = np.arange(samples) * (TWO_PI / samples)
    points = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    phi = theta + 0.5 * np.pi
    kappa = np.full(samples, 1.0 / radius)
    return _assemble_closed(points, phi, kappa, total_length)


def _resample_by_arclength(position_fn, speed_fn, angle_fn, curvature_fn,
                           samples, fine_factor=8):
    """Reparameterize a theta-periodic curve to the uniform arclength grid.

    Cumulative arclength is accumulated by composite Simpson quadrature on a
    fine theta grid (with interval midpoints), then inverted by monotone
    cubic (PCHIP) interpolation.
    """
    n_fine = max(fine_factor * samples, 4096)
    theta = np.linspace(0.0, TWO_PI, n_fine + 1)
    mid = 0.5 * (theta[:-1] + theta[1:])
    g0 = speed_fn(theta[:-1])
    gm = speed_fn(mid)
    g1 = speed_fn(theta[1:])
    dtheta = TWO_PI / n_fine
    increments = (g0 + 4.0 * gm + g1) * (dtheta / 6.0)
    cum = np.concatenate([[0.0], np.cumsum(increments)])
    total_length = float(cum[-1])

    s_grid = np.arange(samples) * (total_length / samples)
    theta_of_s = PchipInterpolator(cum, theta)
    th = np.clip(theta_of_s(s_grid), 0.0, TWO_PI)
    th[0] = 0.0

    points = position_fn(th)
    kappa = curvature_fn(th)
    # Frame angle mod 2*pi at the chosen nodes; unwrapping happens on assembly.
    phi = angle_fn(th)
    return _assemble_closed(points, phi, kappa, total_length)


def make_ellipse(a: float, b: float, samples: int = 400) -> BoundaryCurve:
    """Axis-aligned ellipse with semi-axes a >= b, arclength-parameterized."""
    if b <= 0 or a < b:
        raise InvalidParameterError(f"require a >= b > 0, got a={a}, b={b}")
    if samples < MIN_SAMPLES:
        raise InvalidParameterError(f"need at least {MIN_SAMPLES} samples, got {samples}")

    def position(th):
        return np.column_stack([a * np.cos(th), b * np.sin(th)])

    def speed(th):
        return np.sqrt((a * np.sin(th)) ** 2 + (b * np.cos(th)) ** 2)

    def angle(th):
        return np.arctan2(b * np.cos(th), -a * np.sin(th))

    def curvature(th):
        return a * b / speed(th) ** 3

    return _resample_by_arclength(position, speed, angle, curvature, samples)


def make_fourier_perturbed_circle(base_radius: float, coefficients,
                                  samples: int = 400) -> BoundaryCurve:
    """Polar curve r(theta) = R*(1 + sum a_k cos(k*theta + p_k)), recentered.

    coefficients is an iterable of (mode k >= 2, amplitude, phase) triples.
    The total amplitude must keep r positive (sum |a_k| < 1) so the boundary
    stays a simple closed curve.  The curve is shifted so the area centroid
    of the enclosed region lands at the origin, then resampled to uniform
    arclength.
    """
    if base_radius <= 0:
        raise InvalidParameterError(f"base_radius must be positive, got {base_radius}")
    if samples < MIN_SAMPLES:
        raise InvalidParameterError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    coeffs = [(int(k), float(amp), float(phase)) for k, amp, phase in coefficients]
    for k, _, _ in coeffs:
        if k < 2:
            raise InvalidParameterError(f"perturbation modes must satisfy k >= 2, got {k}")
    if sum(abs(amp) for _, amp, _ in coeffs) >= 1.0:
        raise InvalidParameterError(
            "perturbation too large: sum |a_k| must stay below 1 to keep the "
            "boundary simple")

    ks = np.array([k for k, _, _ in coeffs], dtype=float)
    amps = np.array([amp for _, amp, _ in coeffs])
    phases = np.array([ph for _, _, ph in coeffs])

    def radial(th):
        th = np.atleast_1d(th)
        if len(coeffs) == 0:
            return np.full(th.shape, base_radius)
        osc = amps * np.cos(np.outer(th, ks) + phases)
        return base_radius * (1.0 + osc.sum(axis=1))

    def radial_d1(th):
        th = np.atleast_1d(th)
        if len(coeffs) == 0:
            return np.zeros(th.shape)
        osc = amps * ks * np.sin(np.outer(th, ks) + phases)
        return -base_radius * osc.sum(axis=1)

    def radial_d2(th):
        th = np.atleast_1d(th)
        if len(coeffs) == 0:
            return np.zeros(th.shape)
        osc = amps * ks ** 2 * np.cos(np.outer(th, ks) + phases)
        return -base_radius * osc.sum(axis=1)

    centroid = _polar_area_centroid(radial)

    def position(th):
        r = radial(th)
        return np.column_stack([r * np.cos(th) - centroid[0],
                                r * np.sin(th) - centroid[1]])

    def speed(th):
        return np.sqrt(radial(th) ** 2 + radial_d1(th) ** 2)

    def angle(th):
        r, rd = radial(th), radial_d1(th)
        # derivative of (r cos, r sin) with respect to theta
        return np.arctan2(rd * np.sin(th) + r * np.cos(th),
                          rd * np.cos(th) - r * np.sin(th))

    def curvature(th):
        r, rd, rdd = radial(th), radial_d1(th), radial_d2(th)
        return (r * r + 2.0 * rd * rd - r * rdd) / (r * r + rd * rd) ** 1.5

    return _resample_by_arclength(position, speed, angle, curvature, samples)


def _polar_area_centroid(radial, n_fine=8192):
    """Area centroid of the region bounded by a positive polar graph."""
    theta = np.linspace(0.0, TWO_PI, n_fine + 1)
    r = radial(theta)
    area = 0.5 * np.trapezoid(r ** 2, theta)
    cx = np.trapezoid(r ** 3 * np.cos(theta), theta) / (3.0 * area)
    cy = np.trapezoid(r ** 3 * np.sin(theta), theta) / (3.0 * area)
    return np.array([cx, cy])


def subcurve(curve: BoundaryCurve, s0: float, length: float) -> CurveSegment:
    """Contact segment [s0, s0+length] with periodic wraparound.

    s0 and length are snapped to the parent grid (nearest sample); sample
    positions and frames are those of the parent curve.
    """
    total = curve.total_length
    if not 0.0 < length <= total * (1.0 + 1e-12):
        raise InvalidParameterError(
            f"segment length must lie in (0, {total}], got {length}")
    h = curve.grid_step
    n = curve.n_intervals
    j0 = int(round(s0 / h)) % n
    m = int(round(length / h))
    m = max(1, min(m, n))

    idx = j0 + np.arange(m + 1)
    wraps = idx // n
    base = idx % n
    points = curve.points[base]
    kappa = curve.kappa[base]
    # keep phi continuous across the seam: each wrap adds a full turn
    phi = curve.phi[base] + TWO_PI * wraps
    s_local = np.arange(m + 1) * h
    return CurveSegment(s=s_local, points=points, phi=phi, kappa=kappa,
                        grid_step=h, length=m * h,
                        start_arclength=(j0 * h) % total,
                        curve_length=total)


def as_segment(curve) -> CurveSegment:
    """View a full closed curve as a grasp segment; segments pass through."""
    if isinstance(curve, CurveSegment):
        return curve
    return subcurve(curve, 0.0, curve.total_length)

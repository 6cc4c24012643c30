"""Circle geometry used by the packing pipeline: Möbius action on
circles, conversions between hyperbolic and euclidean circle data in the
unit disk, tangency angles, and spherical caps via stereographic
projection.

Points in the plane are complex numbers; Möbius maps are 2x2 complex
matrices acting as (az+b)/(cz+d)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Circle",
    "tangency_angle",
    "mobius_apply",
    "mobius_compose",
    "mobius_circle",
    "disk_automorphism",
    "euclid_from_hyp",
    "hyp_from_euclid",
    "stereographic",
    "cap_from_circle",
    "Cap",
]


@dataclass(frozen=True)
class Circle:
    """Oriented circle: the disk is the interior unless complement is
    set, in which case it is everything outside (a disk containing
    infinity)."""

    center: complex
    radius: float
    complement: bool = False

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("circle radius must be positive and finite")


def tangency_angle(r: float, r1: float, r2: float) -> float:
    """Angle at the center of the radius-r circle in the euclidean
    triangle formed by three mutually tangent circles."""
    if r <= 0 or r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")
    a, b, c = r + r1, r + r2, r1 + r2
    x = (a * a + b * b - c * c) / (2.0 * a * b)
    return math.acos(min(1.0, max(-1.0, x)))


def mobius_apply(T: np.ndarray, z: complex) -> complex:
    (a, b), (c, d) = T
    if z == math.inf:
        return a / c if c != 0 else complex(math.inf)
    den = c * z + d
    if den == 0:
        return complex(math.inf)
    return (a * z + b) / den


def mobius_compose(*maps: np.ndarray) -> np.ndarray:
    out = np.eye(2, dtype=complex)
    for T in maps:
        out = out @ T
    return out


def mobius_through_points(src, dst) -> np.ndarray:
    """Matrix of the unique Möbius map carrying three distinct finite
    points to three distinct finite points, in order."""
    def to_std(z1, z2, z3):
        # sends z1, z2, z3 to 0, 1, infinity
        return np.array([[z2 - z3, -z1 * (z2 - z3)],
                         [z2 - z1, -z3 * (z2 - z1)]], dtype=complex)

    A = to_std(*(complex(z) for z in src))
    B = to_std(*(complex(w) for w in dst))
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    if det == 0:
        raise ValueError("target points must be distinct")
    Binv = np.array([[B[1, 1], -B[0, 1]], [-B[1, 0], B[0, 0]]],
                    dtype=complex) / det
    return Binv @ A


def mobius_circle(T: np.ndarray, circ: Circle) -> Circle:
    """Image of a circle under a Möbius map.  The circle must not pass
    through the pole (images that are lines are rejected).

    Uses the division-free form
      center' = (conj(c y + d) (a y + b) - a conj(c) r^2) / S
      radius' = |ad - bc| r / |S|,  S = |c y + d|^2 - |c|^2 r^2
    which stays stable for maps that are close to affine."""
    (a, b), (c, d) = T
    gamma, rho = complex(circ.center), float(circ.radius)
    w = c * gamma + d
    s = abs(w) ** 2 - (abs(c) * rho) ** 2
    scale = max(abs(w) ** 2, (abs(c) * rho) ** 2)
    if abs(s) < 1e-14 * max(scale, 1e-300):
        raise ValueError("circle passes through the pole of the map")
    out_c = (np.conj(w) * (a * gamma + b) - a * np.conj(c) * rho * rho) / s
    out_r = abs(a * d - b * c) * rho / abs(s)
    # when the pole sits inside the disk, interior and exterior swap
    flip = s < 0
    comp = circ.complement ^ flip
    return Circle(complex(out_c), float(out_r), complement=bool(comp))


def disk_automorphism(zeta: complex) -> np.ndarray:
    """Unit-disk automorphism z -> (z - zeta)/(1 - conj(zeta) z)."""
    if abs(zeta) >= 1:
        raise ValueError("automorphism parameter must lie inside the disk")
    return np.array([[1.0, -zeta], [-np.conj(zeta), 1.0]], dtype=complex)


def euclid_from_hyp(zeta: complex, h: float) -> Circle:
    """Euclidean circle of the hyperbolic circle with center zeta
    (a point of the unit disk) and hyperbolic radius h."""
    rho = abs(zeta)
    if rho >= 1:
        raise ValueError("hyperbolic center must lie inside the disk")
    d = 2.0 * math.atanh(rho)
    p_plus = math.tanh((d + h) / 2.0)
    p_minus = math.tanh((d - h) / 2.0)
    u = zeta / rho if rho > 0 else 1.0 + 0.0j
    center = u * ((p_plus + p_minus) / 2.0)
    return Circle(center, (p_plus - p_minus) / 2.0)


def hyp_from_euclid(circ: Circle) -> tuple[complex, float]:
    """Hyperbolic center and radius of a euclidean circle inside the
    unit disk; inverse of euclid_from_hyp."""
    if circ.complement:
        raise ValueError("complement disks have no hyperbolic data")
    rho, r = abs(circ.center), circ.radius
    if rho + r >= 1.0:
        raise ValueError("circle must lie inside the unit disk")
    t1, t2 = rho - r, rho + r
    d1, d2 = 2.0 * math.atanh(t1), 2.0 * math.atanh(t2)
    u = circ.center / rho if rho > 0 else 1.0 + 0.0j
    return u * math.tanh((d1 + d2) / 4.0), (d2 - d1) / 2.0


def stereographic(z: complex) -> np.ndarray:
    """Plane to unit sphere; 0 goes to the south pole, infinity to the
    north pole."""
    if z == math.inf or abs(z) == math.inf:
        return np.array([0.0, 0.0, 1.0])
    s = abs(z) ** 2
    return np.array([2.0 * z.real, 2.0 * z.imag, s - 1.0]) / (s + 1.0)


@dataclass(frozen=True)
class Cap:
    """Spherical cap {x : axis·x >= cos(theta)} of angular radius theta."""

    axis: np.ndarray
    theta: float

    def contains_angle(self, p: np.ndarray) -> float:
        """Angular distance from cap center to p."""
        return math.acos(min(1.0, max(-1.0, float(np.dot(self.axis, p)))))


def cap_from_circle(circ: Circle) -> Cap:
    """Spherical cap bounded by the stereographic image of the circle,
    on the same side as the disk."""
    c, r = complex(circ.center), circ.radius
    pts = [stereographic(c + r), stereographic(c + 1j * r),
           stereographic(c - r)]
    nrm = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    ln = np.linalg.norm(nrm)
    if ln < 1e-15:
        raise ValueError("degenerate circle image")
    nrm /= ln
    off = float(np.dot(nrm, pts[0]))
    probe = stereographic(complex(math.inf)) if circ.complement \
        else stereographic(c)
    if np.dot(nrm, probe) < off:
        nrm, off = -nrm, -off
    off = min(1.0, max(-1.0, off))
    return Cap(axis=nrm, theta=math.acos(off))

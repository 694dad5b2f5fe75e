"""Smooth compactly supported test functions and their strip transforms.

``hat_c`` evaluates the holomorphic continuation of the Fourier transform,

    hat(phi)(z) = integral phi(t) exp(-2*pi*i*z*t) dt,   z = x + i*y,

which for compactly supported phi is entire; restricted to a horizontal
line it is the ordinary transform of phi(t) * exp(2*pi*y*t).  Quadrature
is Gauss-Legendre over panels of the support with panel-count doubling
until two levels agree, which converges fast because the bump is flat to
all orders at the support endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, QuadratureNotConverged, WindowTooSmall

_IMAG_GUARD = 10.0  # |Im z| cap: keeps exp(2 pi y t) within test scale
_LEGENDRE_CACHE: dict = {}


def _leggauss(order):
    if order not in _LEGENDRE_CACHE:
        _LEGENDRE_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _LEGENDRE_CACHE[order]


@dataclass(frozen=True)
class TestFunction:
    """The standard smooth bump on [center - half_width, center + half_width].

    phi(t) = exp(-1 / (1 - u^2)) with u = (t - center)/half_width inside the
    support, 0 outside; unnormalized, nonnegative, infinitely smooth.
    """

    center: float = 0.0
    half_width: float = 1.0
    quad_order: int = 16
    quad_levels: int = 14
    kind: str = "standard_bump"

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.kind != "standard_bump":
            raise ValueError(f"unknown test-function kind {self.kind!r}")

    @property
    def support(self):
        return (self.center - self.half_width, self.center + self.half_width)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.center) / self.half_width
        out = np.zeros(t.shape)
        inside = np.abs(u) < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out if out.ndim else float(out)

    def to_dict(self):
        return {"kind": self.kind, "center": self.center,
                "half_width": self.half_width,
                "quad_order": self.quad_order, "quad_levels": self.quad_levels}

    @classmethod
    def from_dict(cls, d):
        return cls(center=d["center"], half_width=d["half_width"],
                   quad_order=d.get("quad_order", 16),
                   quad_levels=d.get("quad_levels", 14),
                   kind=d.get("kind", "standard_bump"))


def _panel_quadrature(phi, zs, panels, order):
    """Gauss-Legendre integral of phi(t) e^{-2 pi i z t} over the support."""
    lo, hi = phi.support
    edges = np.linspace(lo, hi, panels + 1)
    xg, wg = _leggauss(order)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    t = (mid[:, None] + half * xg[None, :]).ravel()
    w = np.broadcast_to(half * wg[None, :], (panels, order)).ravel()
    ft = phi(t) * w
    # rows: evaluation points, cols: quadrature nodes
    return np.exp(-2j * np.pi * np.multiply.outer(zs, t)) @ ft


def hat_c_many(phi: TestFunction, zs, rel_tol: float = 1e-12) -> np.ndarray:
    """Transform of phi at an array of strip points, adaptively refined.

    All points share the panel subdivision; refinement stops when every
    value moved by less than ``rel_tol`` relatively (with an absolute
    floor at the roundoff scale of the integrand).
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    if zs.size == 0:
        return np.zeros(0, dtype=complex)
    ymax = float(np.max(np.abs(zs.imag)))
    if ymax > _IMAG_GUARD:
        raise PreconditionError(
            f"|Im z| = {ymax:.3g} beyond the transform guard {_IMAG_GUARD}")
    lo, hi = phi.support
    scale = (hi - lo) * math.exp(2.0 * math.pi * ymax * max(abs(lo), abs(hi)))
    abs_floor = 64.0 * np.finfo(float).eps * scale
    panels = 4
    prev = None
    for _ in range(phi.quad_levels):
        vals = _panel_quadrature(phi, zs, panels, phi.quad_order)
        if prev is not None:
            err = np.abs(vals - prev)
            tol = rel_tol * np.abs(vals) + abs_floor
            if np.all(err <= tol):
                return vals
        prev = vals
        panels *= 2
    raise QuadratureNotConverged(
        f"transform did not converge in {phi.quad_levels} refinements")


def hat_c(phi: TestFunction, z, rel_tol: float = 1e-12) -> complex:
    """Transform of phi at a single strip point."""
    return complex(hat_c_many(phi, [z], rel_tol)[0])


def decay_check(phi: TestFunction, m: int, sample) -> float:
    """Measured constant C with |hat(phi)(z)| <= C * max(1,|z|)^(-m) on the sample."""
    zs = np.atleast_1d(np.asarray(sample, dtype=complex))
    vals = np.abs(hat_c_many(phi, zs))
    weights = np.maximum(1.0, np.abs(zs)) ** m
    return float(np.max(vals * weights))


@dataclass(frozen=True)
class PairingResult:
    """Windowed pairing value plus its out-of-window tail certificate."""

    value: complex
    tail_bound: float
    decay_constant: float
    window_radius: float

    def __complex__(self):
        return self.value


def pair_zeros(zeros, phi: TestFunction, tail_tol: float = 1e-8) -> PairingResult:
    """<mu_A, hat(phi)> over the zero window, with a cubic-decay tail bound.

    The tail over zeros outside the window uses the measured decay constant
    at exponent 3 on samples beyond the window edge, integrated against the
    empirical zero density.  Raises WindowTooSmall when that bound exceeds
    ``tail_tol``.
    """
    locs = zeros.locations()
    if locs.size == 0:
        return PairingResult(0j, 0.0, 0.0, 0.0)
    vals = hat_c_many(phi, locs)
    value = complex(np.sum(vals))
    w = zeros.window
    radius = min(abs(w.x_min), abs(w.x_max))
    y_edge = max(abs(w.y_min), abs(w.y_max))
    sample = []
    for r in (1.0, 1.25, 1.6, 2.0):
        sample.extend([radius * r, -radius * r,
                       radius * r + 1j * y_edge, -radius * r - 1j * y_edge])
    c3 = decay_check(phi, 3, sample)
    density = locs.size / w.width
    tail = 2.0 * c3 * density / (2.0 * radius ** 2) if radius > 0 else math.inf
    if tail > tail_tol:
        raise WindowTooSmall(
            f"zero-window tail bound {tail:.3g} exceeds {tail_tol:.3g}")
    return PairingResult(value, tail, c3, radius)


def pair_atoms(atoms, phi: TestFunction) -> complex:
    """<sum b_gamma delta_gamma, phi>: exact finite sum over the support."""
    lo, hi = phi.support
    sel = (atoms.gammas > lo) & (atoms.gammas < hi)
    if not np.any(sel):
        return 0j
    return complex(np.sum(atoms.bs[sel] * phi(atoms.gammas[sel])))


@dataclass
class GrowthDiagnostics:
    """Radial growth of the zero measure and of the atom variation."""

    r_grid: list
    mass_counts: list          # zeros with |a| <= r, multiplicity counted
    atom_cumsums: list         # sum of |b_gamma| over |gamma| < r
    fitted_rate: float         # L in log(atom cumsum) ~ L * r on the grid tail

    def to_dict(self):
        return {"r_grid": self.r_grid, "mass_counts": self.mass_counts,
                "atom_cumsums": self.atom_cumsums, "fitted_rate": self.fitted_rate}


def fit_growth_rate(gammas, bs) -> float:
    """Least-squares L with log(sum_{|gamma|<r} |b|) ~ L*r + c on the tail."""
    gam = np.abs(np.asarray(gammas, dtype=float))
    mag = np.abs(np.asarray(bs))
    if gam.size < 4:
        return 0.0
    order = np.argsort(gam)
    gam, mag = gam[order], mag[order]
    cum = np.cumsum(mag)
    keep = cum > 0
    gam, cum = gam[keep], cum[keep]
    if gam.size < 4:
        return 0.0
    half = gam.size // 2
    slope = np.polyfit(gam[half:], np.log(cum[half:]), 1)[0]
    return float(max(0.0, slope))


def growth(zeros, atoms, r_grid) -> GrowthDiagnostics:
    """Tabulate counting and variation growth on a radius grid."""
    locs = zeros.locations() if zeros is not None else np.zeros(0, dtype=complex)
    if atoms is not None:
        gam, mag = np.abs(atoms.gammas), np.abs(atoms.bs)
    else:
        gam = mag = np.zeros(0)
    counts, cums = [], []
    for r in r_grid:
        counts.append(int(np.sum(np.abs(locs) <= r)))
        cums.append(float(np.sum(mag[gam < r])))
    rate = fit_growth_rate(gam, mag) if gam.size else 0.0
    return GrowthDiagnostics(list(map(float, r_grid)), counts, cums, rate)

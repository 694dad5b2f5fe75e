"""Inverse construction: a Dirichlet series with a prescribed zero set.

Integrating the atom series of the log-derivative along a horizontal line
Im z = y0 above the growth rate gives the logarithm of the zero-carrying
entire function up to a linear term; exponentiating in the coefficient
algebra and re-anchoring the line yields the series

    f(z) = sum_w beta_w e^{2 pi nu y0} e^{2 pi i nu z},   nu = w - b_0 / 2.

The additive constant of the log is fixed to 0 and the emitted series is
rescaled so that f(0) = 1 whenever 0 is not a zero, matching the value of
the canonical product.  Both choices only move the free multiplicative
constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import wiener
from .cfourier import fit_growth_rate
from .errors import (LineTooLow, NeigDiverges, NotNumbered, SpectrumUnbounded,
                     ZeroAtOrigin, ZeroMismatch)
from .spectral import AtomMeasure
from .strip_zeros import Rect, ZeroSet, find_zeros
from .wiener import ExpSum


@dataclass(frozen=True)
class ReconstructionResult:
    series: ExpSum          # the reconstructed entire function
    y0: float               # line the log series was anchored on
    log_series: ExpSum      # intermediate log on that line
    normalization: complex  # value divided out so series(0) = 1
    b0: complex
    kappa: float
    center_shift: float = 0.0  # recentring of the sum the atoms came from

    def to_dict(self):
        return {"series": self.series.to_dict(), "y0": self.y0,
                "log_series": self.log_series.to_dict(),
                "normalization_re": self.normalization.real,
                "normalization_im": self.normalization.imag,
                "b0": self.b0.real, "kappa": self.kappa,
                "center_shift": self.center_shift}

    @classmethod
    def from_dict(cls, d):
        return cls(series=ExpSum.from_dict(d["series"]), y0=d["y0"],
                   log_series=ExpSum.from_dict(d["log_series"]),
                   normalization=d["normalization_re"] + 1j * d["normalization_im"],
                   b0=complex(d["b0"]), kappa=d["kappa"],
                   center_shift=d.get("center_shift", 0.0))


def _check_neig(atoms: AtomMeasure):
    """Flag diverging small-gamma mass: the shells toward 0 must shrink."""
    gam = np.abs(atoms.gammas)
    mag = np.abs(atoms.bs)
    inner = (gam > 0) & (gam < 1)
    if not np.any(inner):
        return
    incs = []
    for j in range(1, 30):
        shell = inner & (gam >= 2.0 ** (-j)) & (gam < 2.0 ** (-(j - 1)))
        incs.append(float(np.sum(mag[shell] / gam[shell])) if np.any(shell) else 0.0)
        if not np.any(gam[inner] < 2.0 ** (-j)):
            break
    pos = [i for i in incs if i > 0]
    if len(pos) >= 3 and pos[-1] >= 0.8 * pos[-2] >= 0.64 * pos[-3]:
        raise NeigDiverges(
            f"shell increments of sum |b/gamma| are not shrinking: {pos[-3:]}")


def log_series(atoms: AtomMeasure, y0: float) -> ExpSum:
    """The log of the reconstructed function on Im z = y0, constant term 0.

    Terms are -(b_gamma / gamma) e^{-2 pi gamma y0} at frequency gamma > 0.
    Requires y0 above the fitted growth rate over 2*pi so the damped
    coefficients are summable.
    """
    rate = fit_growth_rate(atoms.gammas, atoms.bs)
    if y0 <= rate / (2.0 * math.pi):
        raise LineTooLow(
            f"y0 = {y0:.6g} not above fitted rate/2pi = {rate / (2 * math.pi):.6g}")
    _check_neig(atoms)
    sel = atoms.gammas > 0
    gam = atoms.gammas[sel]
    coeff = -(atoms.bs[sel] / gam) * np.exp(-2.0 * np.pi * gam * y0)
    return ExpSum.from_terms(zip(gam, coeff), merge_tol=1e-9, drop_tol=0.0)


def _pick_line(atoms: AtomMeasure, tail_tol: float) -> float:
    """Start just above the rate floor and raise the line until the damped
    log coefficients visibly meet the tail tolerance."""
    rate = fit_growth_rate(atoms.gammas, atoms.bs)
    y0 = rate / (2.0 * math.pi) + 0.25
    for _ in range(60):
        ls = log_series(atoms, y0)
        if ls.n_terms == 0:
            return y0
        tail_mag = float(np.abs(ls.coeffs[-min(3, ls.n_terms):]).max())
        if tail_mag <= tail_tol / 10.0:
            return y0
        y0 *= 2.0
    return y0


def from_atoms(atoms: AtomMeasure, y0: float | None = None,
               tail_tol: float = 1e-10) -> ReconstructionResult:
    """Reconstruct the entire function whose zero measure has these atoms.

    Re-anchoring from the line Im z = y0 multiplies the coefficient at
    plane frequency nu by e^{2 pi nu y0}, which amplifies truncation debris
    of the exponential just as much as signal.  A coefficient of the
    exponential is therefore emitted only when it clears the pipeline's
    own discarded-mass certificate; everything below is uncertifiable
    noise, not spectrum.
    """
    if y0 is None:
        y0 = _pick_line(atoms, tail_tol)
    ls = log_series(atoms, y0)
    g = wiener.exp(ls, tail_tol)
    b0 = atoms.b0
    noise = 10.0 * max(g.discarded_norm, 10.0 * np.finfo(float).eps)
    keep = np.abs(g.coeffs) > noise
    nu = g.freqs[keep] - b0.real / 2.0
    if nu.size and np.max(np.abs(nu)) > 10.0 * max(atoms.kappa, 1e-3):
        raise SpectrumUnbounded(
            f"emitted frequency {nu[np.argmax(np.abs(nu))]:.6g} exceeds "
            f"10*kappa = {10 * atoms.kappa:.6g}")
    factor = np.exp(2.0 * np.pi * nu * y0)
    series = ExpSum.from_terms(zip(nu, g.coeffs[keep] * factor),
                               merge_tol=g.merge_tol, drop_tol=g.drop_tol,
                               discarded_norm=g.discarded_norm
                               * float(np.max(factor, initial=1.0)))
    normalization = 1.0 + 0j
    v0 = series.eval(0.0)
    if abs(v0) > 1e-8 * max(series.wiener_norm, 1e-300):
        series = series.scale(1.0 / v0)
        normalization = complex(v0)
    return ReconstructionResult(series, float(y0), ls, normalization,
                                b0, atoms.kappa, atoms.center_shift)


@dataclass(frozen=True)
class ProductValue:
    value: complex
    tail_estimate: float

    def __complex__(self):
        return self.value


def canonical_product(zeros: ZeroSet, z, pairs: int | None = None) -> ProductValue:
    """(1 - z/a_0) prod_n (1 - z/a_n)(1 - z/a_{-n}) over the numbered window.

    The paired factors make the product converge without exponential
    correction terms; the reported tail estimate bounds the effect of the
    pairs beyond the window.
    """
    if not zeros.numbered:
        raise NotNumbered("canonical_product needs a numbered zero set")
    locs = zeros.locations()
    if np.min(np.abs(locs)) < 1e-9:
        raise ZeroAtOrigin("zero at the origin; translate the set first")
    z = complex(z)
    n_min, n_max = zeros.index_range()
    n_sym = min(-n_min, n_max)
    if pairs is not None:
        n_sym = min(n_sym, pairs)
    value = 1.0 - z / zeros.location(0)
    for n in range(1, n_sym + 1):
        value *= (1.0 - z / zeros.location(n)) * (1.0 - z / zeros.location(-n))
    rho = zeros.rho
    m = zeros.m_bound
    # |log pair factor| ~ |z|(|z| + 2m)/ (rho n)^2 summed over n > n_sym
    tail = abs(z) * (abs(z) + 2.0 * m) / (rho * rho * max(n_sym, 1))
    return ProductValue(complex(value), float(tail))


@dataclass
class RoundtripReport:
    zero_max_distance: float
    ratio_mean: complex
    ratio_deviation: float
    phase: float            # measured Remark exponent pi*b0 - 2*pi*kappa

    def to_dict(self):
        return {"zero_max_distance": self.zero_max_distance,
                "ratio_mean_re": self.ratio_mean.real,
                "ratio_mean_im": self.ratio_mean.imag,
                "ratio_deviation": self.ratio_deviation,
                "phase": self.phase}


def verify_roundtrip(Q: ExpSum, rec: ReconstructionResult, rect: Rect,
                     zero_tol: float = 1e-6, grid: int = 20,
                     find_tol: float = 1e-10) -> RoundtripReport:
    """Same zeros, constant ratio: the reconstruction against the original.

    Locates both zero sets in the rectangle and pairs them; then checks
    that Q(z) / (series(z) e^{i(phase + 2 pi center_shift) z}) is constant
    on a grid clear of the zeros.  The phase pi*b0 - 2*pi*kappa vanishes
    identically here (b0 = 2*kappa by construction) but is kept as a
    measured quantity.
    """
    z_q = find_zeros(Q, rect, find_tol)
    z_r = find_zeros(rec.series, rect, find_tol)
    a = z_q.locations()
    b = z_r.locations()
    if a.size != b.size:
        raise ZeroMismatch(
            f"zero counts differ in {rect}: {a.size} vs {b.size}")
    dist = float(np.max(np.abs(a - b))) if a.size else 0.0
    if dist > zero_tol:
        raise ZeroMismatch(f"paired zero distance {dist:.3g} > {zero_tol:.3g}")

    phase = math.pi * rec.b0.real - 2.0 * math.pi * rec.kappa
    shift = rec.center_shift
    xs = np.linspace(rect.x_min, rect.x_max, grid)
    ys = np.linspace(rect.y_min, rect.y_max, grid)
    zz = (xs[:, None] + 1j * ys[None, :]).ravel()
    if a.size:
        keep = np.min(np.abs(zz[:, None] - a[None, :]), axis=1) > 0.1
        zz = zz[keep]
    denom = rec.series.eval(zz) * np.exp(1j * (phase + 2.0 * np.pi * shift) * zz)
    ratio = Q.eval(zz) / denom
    mean = complex(np.mean(ratio))
    dev = float(np.max(np.abs(ratio - mean)) / abs(mean))
    return RoundtripReport(dist, mean, dev, phase)

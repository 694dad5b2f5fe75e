"""Forward construction: pure-point spectrum of a zero-counting measure.

Given an exponential sum Q with attained spectrum endpoints, the pipeline
recenters the spectrum to [-kappa, kappa], factors out the extreme term on
a high enough horizontal line where the remainder has Wiener norm <= 2/3,
expands log(1 + remainder), and turns the log coefficients p_gamma into
atoms b_gamma of the transform of the zero-counting measure:

    b_gamma = -gamma * p_gamma * e^{2 pi gamma s}   (upper line, gamma > 0),
    b_gamma =  gamma * p_gamma * e^{-2 pi gamma s}  (lower line, gamma < 0),
    b_0 = 2 * kappa.

The e^{+-2 pi gamma s} factors cancel the line damping exactly, so the
atoms do not depend on the chosen lines; ``s_extra`` exists to test that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import wiener
from .cfourier import TestFunction, fit_growth_rate, pair_atoms, pair_zeros
from .errors import (DegenerateSpectrum, EndpointNotAttained, LineTooLow,
                     NotNumbered, WindowTooSmall)
from .wiener import ExpSum


@dataclass(frozen=True)
class AtomMeasure:
    """Pure point measure sum_gamma b_gamma delta_gamma on the line.

    Gammas are strictly increasing and include 0 with b_0 = 2*kappa.
    ``center_shift`` records the frequency recentring applied to the input
    sum; the atoms describe the recentred function's zero set (which the
    phase factor does not change).
    """

    gammas: np.ndarray
    bs: np.ndarray
    kappa: float
    s_upper: float
    s_lower: float
    tail_tol: float
    center_shift: float
    truncation: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.gammas.size != self.bs.size:
            raise ValueError("gamma/coefficient length mismatch")
        if self.gammas.size and not np.all(np.diff(self.gammas) > 0):
            raise ValueError("gammas must be strictly increasing")
        i0 = np.searchsorted(self.gammas, 0.0)
        ok = (i0 < self.gammas.size and abs(self.gammas[i0]) < 1e-12
              and abs(self.bs[i0] - 2.0 * self.kappa) < 1e-9 * max(1.0, self.kappa))
        if not ok:
            raise ValueError("missing atom b_0 = 2*kappa at gamma = 0")
        self.gammas.setflags(write=False)
        self.bs.setflags(write=False)

    @property
    def b0(self):
        i0 = int(np.searchsorted(self.gammas, 0.0))
        return complex(self.bs[i0])

    def b_at(self, gamma, tol=1e-9):
        """Coefficient at the atom nearest gamma (0 if none within tol)."""
        i = int(np.argmin(np.abs(self.gammas - gamma)))
        if abs(self.gammas[i] - gamma) <= tol:
            return complex(self.bs[i])
        return 0j

    def restrict(self, radius):
        sel = np.abs(self.gammas) <= radius
        return AtomMeasure(self.gammas[sel].copy(), self.bs[sel].copy(),
                           self.kappa, self.s_upper, self.s_lower,
                           self.tail_tol, self.center_shift,
                           dict(self.truncation))

    def neig_sum(self):
        """sum over 0 < |gamma| < 1 of |b_gamma / gamma| (finite by construction)."""
        sel = (np.abs(self.gammas) > 0) & (np.abs(self.gammas) < 1)
        if not np.any(sel):
            return 0.0
        return float(np.sum(np.abs(self.bs[sel] / self.gammas[sel])))

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "entries": [{"gamma": float(g), "re": float(b.real), "im": float(b.imag)}
                        for g, b in zip(self.gammas, self.bs)],
            "center_shift": self.center_shift,
            "tail_tol": self.tail_tol,
            "s_upper": self.s_upper,
            "s_lower": self.s_lower,
            "truncation": self.truncation,
        }

    @classmethod
    def from_dict(cls, d):
        entries = sorted(d["entries"], key=lambda e: e["gamma"])
        return cls(
            gammas=np.array([e["gamma"] for e in entries], dtype=float),
            bs=np.array([e["re"] + 1j * e["im"] for e in entries], dtype=complex),
            kappa=d["kappa"], s_upper=d.get("s_upper", 0.0),
            s_lower=d.get("s_lower", 0.0), tail_tol=d.get("tail_tol", 0.0),
            center_shift=d.get("center_shift", 0.0),
            truncation=d.get("truncation", {}),
        )

    def csv_rows(self):
        return [(float(g), float(b.real), float(b.imag))
                for g, b in zip(self.gammas, self.bs)]


@dataclass(frozen=True)
class Normalization:
    """Centered factorization Q = q_low e^{-2 pi i kappa z} (1 + P)."""

    kappa: float
    q_low: complex          # coefficient at the centered frequency -kappa
    q_high: complex         # coefficient at the centered frequency +kappa
    remainder: ExpSum       # P, spectrum in (0, 2*kappa]
    center_shift: float


def normalize(Q: ExpSum) -> Normalization:
    """Recenter the spectrum to [-kappa, kappa] and factor the low edge."""
    if Q.n_terms == 0:
        raise EndpointNotAttained("empty sum has no attained endpoints")
    shift = 0.5 * float(Q.freqs[0] + Q.freqs[-1])
    kappa = 0.5 * float(Q.freqs[-1] - Q.freqs[0])
    if kappa <= 0.5 * Q.merge_tol:
        raise DegenerateSpectrum("spectrum has zero width after recentring")
    q_low = complex(Q.coeffs[0])
    q_high = complex(Q.coeffs[-1])
    centered = Q.freqs - shift
    remainder = ExpSum.from_terms(
        [(f + kappa, c / q_low) for f, c in zip(centered[1:], Q.coeffs[1:])],
        merge_tol=Q.merge_tol, drop_tol=Q.drop_tol)
    return Normalization(kappa, q_low, q_high, remainder, shift)


def _reflected_lower_remainder(Q: ExpSum, norm: Normalization) -> ExpSum:
    """The x -> -x reflection of the high-edge remainder, spectrum > 0."""
    centered = Q.freqs - norm.center_shift
    return ExpSum.from_terms(
        [(norm.kappa - f, c / norm.q_high)
         for f, c in zip(centered[:-1], Q.coeffs[:-1])],
        merge_tol=Q.merge_tol, drop_tol=Q.drop_tol)


def choose_line(P: ExpSum, target: float = 2.0 / 3.0,
                resolution: float = 1e-6) -> float:
    """Smallest grid height s with ||P(. + i s)||_W <= target.

    Requires a strictly positive spectrum, so the damped norm decreases to
    zero and the search always terminates.
    """
    if P.n_terms == 0:
        return 0.0
    if float(P.freqs[0]) <= 0:
        raise DegenerateSpectrum("remainder spectrum must be strictly positive")

    def damped_norm(s):
        return float(np.abs(P.coeffs) @ np.exp(-2.0 * np.pi * P.freqs * s))

    if damped_norm(0.0) <= target:
        return 0.0
    hi = 1.0
    while damped_norm(hi) > target:
        hi *= 2.0
        if hi > 1e6:
            raise DegenerateSpectrum("damped norm refuses to fall below target")
    lo = 0.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if damped_norm(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def _line_atoms(P: ExpSum, s: float, tail_tol: float):
    """Positive-side atoms from one line: b_gamma = -gamma p_gamma e^{2 pi gamma s}.

    A log coefficient at frequency gamma is complete only when every power
    that can reach gamma was summed, i.e. gamma < (N+1) * min spec; entries
    beyond that boundary are partial sums with no error control and are cut.
    """
    shifted = wiener.shift_line(P, s)
    lam = wiener.log1p(shifted, tail_tol)
    order = wiener._log1p_order(shifted.wiener_norm, tail_tol)
    complete_below = (order + 1) * float(shifted.freqs[0]) if shifted.n_terms \
        else math.inf
    keep = lam.freqs < complete_below - 0.5 * lam.merge_tol
    n_cut = int(np.sum(~keep))
    gammas = lam.freqs[keep]
    bs = -gammas * lam.coeffs[keep] * np.exp(2.0 * np.pi * gammas * s)
    return gammas, bs, lam.discarded_norm, n_cut


def atoms(Q: ExpSum, tail_tol: float = 1e-10, s_extra: float = 0.0) -> AtomMeasure:
    """Pure-point transform coefficients of the zero-counting measure of Q.

    Positive atoms come from the low-edge factorization on the line
    Im z = s_upper, negative atoms from the reflected high-edge
    factorization on Im z = -s_lower, and b_0 = 2*kappa.  ``s_extra``
    raises both lines above the minimal choice (atoms must not change).
    """
    norm = normalize(Q)
    upper = norm.remainder
    lower = _reflected_lower_remainder(Q, norm)
    s_up = choose_line(upper) + s_extra
    s_lo = choose_line(lower) + s_extra

    g_up, b_up, disc_up = _line_atoms(upper, s_up, tail_tol / 4.0)
    g_lo, b_lo, disc_lo = _line_atoms(lower, s_lo, tail_tol / 4.0)

    drop = tail_tol / 2.0
    keep_up = np.abs(b_up) > drop
    keep_lo = np.abs(b_lo) > drop
    dropped_mass = float(np.abs(b_up[~keep_up]).sum()
                         + np.abs(b_lo[~keep_lo]).sum())

    gammas = np.concatenate([-g_lo[keep_lo][::-1], [0.0], g_up[keep_up]])
    bs = np.concatenate([b_lo[keep_lo][::-1], [2.0 * norm.kappa + 0j],
                         b_up[keep_up]])
    return AtomMeasure(
        gammas=gammas, bs=bs, kappa=norm.kappa,
        s_upper=s_up, s_lower=s_lo, tail_tol=tail_tol,
        center_shift=norm.center_shift,
        truncation={"log_upper": disc_up, "log_lower": disc_lo,
                    "atoms_dropped": dropped_mass},
    )


# -- identity checks -----------------------------------------------------------

def _digamma_asymptotic(z):
    """psi(z) for Re z >> 1 via the Stirling series (through z^-6)."""
    zi = 1.0 / z
    zi2 = zi * zi
    return (np.log(z) - 0.5 * zi
            - zi2 * (1.0 / 12.0 - zi2 * (1.0 / 120.0 - zi2 / 252.0)))


def _symmetric_logderiv(zeros, zeta, tail_correction=True):
    """f'/f at zeta as the paired partial-fraction sum over numbered zeros.

    The sum runs over indices |n| <= N (largest symmetric range in the
    window).  With ``tail_correction`` the discarded outer pairs are
    completed analytically using the fitted lattice a_n ~ rho*n + mean(phi),
    which removes the O(1/N) truncation bias of the raw symmetric sum.
    """
    if not zeros.numbered:
        raise NotNumbered("verify_der needs a numbered zero set")
    n_min, n_max = zeros.index_range()
    n_sym = min(-n_min, n_max)
    if n_sym < 10:
        raise WindowTooSmall(f"symmetric index range {n_sym} too small")
    rho = zeros.rho
    a0 = zeros.location(0)
    total = 1.0 / (zeta - a0)
    ns = np.arange(1, n_sym + 1)
    a_pos = np.array([zeros.location(n) for n in ns])
    a_neg = np.array([zeros.location(-n) for n in ns])
    total += np.sum(1.0 / (zeta - a_pos) + 1.0 / (zeta - a_neg))
    if tail_correction:
        phi_bar = np.mean(list(zeros.phi.values()))
        v = (zeta - phi_bar) / rho
        tail = (_digamma_asymptotic(n_sym + 1 - v)
                - _digamma_asymptotic(n_sym + 1 + v)) / rho
        total += tail
    return complex(total)


def _atom_logderiv(atoms: AtomMeasure, zeta):
    """-2 pi i sum_{gamma>0} b_gamma e^{2 pi i gamma zeta} - pi i b_0."""
    sel = atoms.gammas > 0
    gam = atoms.gammas[sel]
    b = atoms.bs[sel]
    phases = np.exp(2j * np.pi * gam * zeta)
    return complex(-2j * np.pi * np.sum(b * phases) - 1j * np.pi * atoms.b0)


@dataclass
class DerReport:
    max_rel_error: float
    samples: list  # (zeta, left, right)

    def to_dict(self):
        return {"max_rel_error": self.max_rel_error,
                "samples": [{"zeta_re": z.real, "zeta_im": z.imag,
                             "left_re": l.real, "left_im": l.imag,
                             "right_re": r.real, "right_im": r.imag}
                            for z, l, r in self.samples]}


def verify_der(zeros, atom_measure: AtomMeasure, zeta_samples,
               tail_correction: bool = True) -> DerReport:
    """Compare the partial-fraction log-derivative with the atom series.

    Both sides represent f'/f of the canonical product over the zero set;
    sample heights must exceed the fitted growth rate divided by 2*pi.
    """
    rate = fit_growth_rate(atom_measure.gammas, atom_measure.bs)
    floor = rate / (2.0 * math.pi)
    rows = []
    worst = 0.0
    for zeta in zeta_samples:
        zeta = complex(zeta)
        if zeta.imag <= floor:
            raise LineTooLow(
                f"Im zeta = {zeta.imag:.6g} not above fitted rate/2pi = {floor:.6g}")
        left = _symmetric_logderiv(zeros, zeta, tail_correction)
        right = _atom_logderiv(atom_measure, zeta)
        rel = abs(left - right) / max(abs(right), 1e-300)
        worst = max(worst, rel)
        rows.append((zeta, left, right))
    return DerReport(worst, rows)


@dataclass
class DualityReport:
    rel_error: float
    zero_side: complex
    atom_side: complex
    zero_tail_bound: float

    def to_dict(self):
        return {"rel_error": self.rel_error,
                "zero_side_re": self.zero_side.real,
                "zero_side_im": self.zero_side.imag,
                "atom_side_re": self.atom_side.real,
                "atom_side_im": self.atom_side.imag,
                "zero_tail_bound": self.zero_tail_bound}


def verify_duality(zeros, atom_measure: AtomMeasure, phi: TestFunction,
                   tail_tol: float = 1e-5) -> DualityReport:
    """|<mu_A, hat(phi)> - sum b_gamma phi(gamma)| / (1 + |atom side|)."""
    left = pair_zeros(zeros, phi, tail_tol)
    right = pair_atoms(atom_measure, phi)
    rel = abs(left.value - right) / (1.0 + abs(right))
    return DualityReport(rel, left.value, right, left.tail_bound)


@dataclass
class ConditionsReport:
    fitted_rate: float
    neig_partial_sums: list
    neig_diverging: bool
    min_gap: float
    max_per_unit: int

    def to_dict(self):
        return {"fitted_rate": self.fitted_rate,
                "neig_partial_sums": self.neig_partial_sums,
                "neig_diverging": self.neig_diverging,
                "min_gap": self.min_gap,
                "max_per_unit": self.max_per_unit}


def check_conditions(atom_measure: AtomMeasure, r_grid=None) -> ConditionsReport:
    """Growth, small-gamma summability, and local finiteness diagnostics.

    The small-gamma check accumulates |b/gamma| over dyadic shells
    2^-j < |gamma| < 2^-j+1 approaching 0; non-shrinking shell increments
    flag divergence.
    """
    gam = atom_measure.gammas
    mag = np.abs(atom_measure.bs)
    rate = fit_growth_rate(gam, mag)

    inner = (np.abs(gam) > 0) & (np.abs(gam) < 1)
    sums, increments = [], []
    total = 0.0
    for j in range(1, 30):
        shell = inner & (np.abs(gam) >= 2.0 ** (-j)) & (np.abs(gam) < 2.0 ** (-(j - 1)))
        inc = float(np.sum(mag[shell] / np.abs(gam[shell]))) if np.any(shell) else 0.0
        total += inc
        increments.append(inc)
        sums.append(total)
        if not np.any(np.abs(gam[inner]) < 2.0 ** (-j)):
            break
    tail_incs = [i for i in increments[-3:] if i > 0]
    diverging = (len(tail_incs) >= 2
                 and tail_incs[-1] >= 0.8 * tail_incs[-2]
                 and sums[-1] > 10.0 * max(1.0, float(mag.sum())))

    if gam.size >= 2:
        min_gap = float(np.min(np.diff(gam)))
        edges = np.arange(math.floor(gam.min()), math.ceil(gam.max()) + 1.0)
        per_unit = np.histogram(gam, bins=edges)[0] if edges.size > 1 else [gam.size]
        max_per_unit = int(np.max(per_unit))
    else:
        min_gap = math.inf
        max_per_unit = int(gam.size)
    return ConditionsReport(rate, sums, bool(diverging), min_gap, max_per_unit)

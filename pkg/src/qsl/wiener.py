"""Exact-spectrum arithmetic for absolutely convergent exponential sums.

The central object is :class:`ExpSum`, a finite sum

    P(x) = sum_k q_k * exp(2*pi*i*w_k*x),    w_k real, q_k complex,

stored with exact real frequencies and equipped with the Wiener norm
``sum_k |q_k|``.  Values are immutable and every operation is a pure
function, so they are safe to share between threads.

Truncation is explicit.  Any operation that discards coefficient mass
(frequency merging, small-coefficient dropping, series truncation inside
``log1p`` and ``exp``) adds the discarded Wiener mass to ``discarded_norm``.
That field is a running certificate: on the real line the represented
function differs from the stored terms by at most ``discarded_norm`` in
sup norm, and on the line Im z = y by at most
``discarded_norm * exp(2*pi*max|w|*|y|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, NormTooLarge, NumericOverflow

TERM_CAP = 10_000_000
_EVAL_CHUNK = 1 << 18
_EXP_ARG_MAX = 700.0  # exp() overflows shortly above this


def _canonical(freqs, coeffs, merge_tol, drop_tol):
    """Sort, merge near-collisions, drop tiny coefficients.

    Frequencies closer than ``merge_tol`` (chained) collapse to their
    coefficient-mass weighted mean, which keeps adjacent gaps strictly
    above ``merge_tol``.  Returns (freqs, coeffs, dropped_mass).
    """
    freqs = np.asarray(freqs, dtype=float).ravel()
    coeffs = np.asarray(coeffs, dtype=complex).ravel()
    if freqs.size != coeffs.size:
        raise ValueError("frequency/coefficient length mismatch")
    if freqs.size > TERM_CAP:
        raise CapExceeded(f"{freqs.size} terms exceed the cap {TERM_CAP}")
    if freqs.size == 0:
        return freqs, coeffs, 0.0
    if not np.all(np.isfinite(freqs)):
        raise ValueError("non-finite frequency")

    order = np.argsort(freqs, kind="stable")
    f = freqs[order]
    c = coeffs[order]

    cluster_start = np.empty(f.size, dtype=bool)
    cluster_start[0] = True
    cluster_start[1:] = np.diff(f) > merge_tol
    idx = np.cumsum(cluster_start) - 1
    n_clusters = int(idx[-1]) + 1

    w = np.abs(c)
    mass = np.bincount(idx, weights=w, minlength=n_clusters)
    counts = np.bincount(idx, minlength=n_clusters)
    f_weighted = np.bincount(idx, weights=f * w, minlength=n_clusters)
    f_plain = np.bincount(idx, weights=f, minlength=n_clusters)
    with np.errstate(invalid="ignore", divide="ignore"):
        nf = np.where(mass > 0.0, f_weighted / np.where(mass > 0, mass, 1.0),
                      f_plain / counts)
    nc = (np.bincount(idx, weights=c.real, minlength=n_clusters)
          + 1j * np.bincount(idx, weights=c.imag, minlength=n_clusters))

    keep = np.abs(nc) > drop_tol
    dropped = float(np.abs(nc[~keep]).sum())
    return nf[keep], nc[keep], dropped


@dataclass(frozen=True)
class ExpSum:
    """Finite exponential sum with exact frequencies and tracked truncation.

    Do not call the constructor with raw data; use :meth:`from_terms`,
    :meth:`wave`, :meth:`constant` or :meth:`zero`, which canonicalize.
    """

    freqs: np.ndarray
    coeffs: np.ndarray
    merge_tol: float = 1e-9
    drop_tol: float = 0.0
    discarded_norm: float = 0.0

    def __post_init__(self):
        if self.merge_tol < 0 or self.drop_tol < 0 or self.discarded_norm < 0:
            raise ValueError("tolerances and discarded_norm must be >= 0")
        if self.freqs.size:
            if not np.all(np.diff(self.freqs) > self.merge_tol):
                raise ValueError("frequencies not strictly increasing beyond merge_tol")
            if np.abs(self.coeffs).min() <= self.drop_tol:
                raise ValueError("stored coefficient at or below drop_tol")
        self.freqs.setflags(write=False)
        self.coeffs.setflags(write=False)

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_terms(cls, terms, merge_tol=1e-9, drop_tol=0.0, discarded_norm=0.0):
        """Build from an iterable of (frequency, coefficient) pairs."""
        terms = list(terms)
        freqs = np.array([t[0] for t in terms], dtype=float)
        coeffs = np.array([t[1] for t in terms], dtype=complex)
        f, c, dropped = _canonical(freqs, coeffs, merge_tol, drop_tol)
        return cls(f, c, merge_tol, drop_tol, discarded_norm + dropped)

    @classmethod
    def zero(cls, merge_tol=1e-9, drop_tol=0.0):
        return cls(np.empty(0), np.empty(0, dtype=complex), merge_tol, drop_tol, 0.0)

    @classmethod
    def constant(cls, value, merge_tol=1e-9, drop_tol=0.0):
        return cls.from_terms([(0.0, value)], merge_tol, drop_tol)

    @classmethod
    def wave(cls, freq, coeff=1.0, merge_tol=1e-9, drop_tol=0.0):
        """Single exponential coeff * e^{2 pi i freq x}."""
        return cls.from_terms([(freq, coeff)], merge_tol, drop_tol)

    # -- basic queries -------------------------------------------------------

    @property
    def n_terms(self):
        return int(self.freqs.size)

    @property
    def wiener_norm(self):
        return float(np.abs(self.coeffs).sum())

    @property
    def spectrum(self):
        return self.freqs

    @property
    def max_abs_freq(self):
        if self.freqs.size == 0:
            return 0.0
        return float(max(abs(self.freqs[0]), abs(self.freqs[-1])))

    def coeff_at(self, freq, tol=None):
        """Coefficient at the stored frequency nearest ``freq`` (0 if none)."""
        if self.freqs.size == 0:
            return 0j
        tol = self.merge_tol if tol is None else tol
        i = int(np.argmin(np.abs(self.freqs - freq)))
        if abs(self.freqs[i] - freq) <= tol:
            return complex(self.coeffs[i])
        return 0j

    def terms(self):
        return list(zip(self.freqs.tolist(), self.coeffs.tolist()))

    def line_bound(self, y):
        """sup over x of |stored terms| on the line Im z = y."""
        if self.freqs.size == 0:
            return 0.0
        return float(np.abs(self.coeffs) @ np.exp(-2.0 * np.pi * self.freqs * y))

    def eval_tail_bound(self, z):
        """Certified bound on |true - stored| at z, from the discarded mass."""
        y = abs(np.imag(np.asarray(z))).max() if np.ndim(z) else abs(z.imag)
        return self.discarded_norm * math.exp(2.0 * math.pi * self.max_abs_freq * y)

    # -- evaluation ----------------------------------------------------------

    def eval(self, z):
        """Evaluate the stored sum at complex z (scalar or ndarray)."""
        zs = np.asarray(z, dtype=complex)
        if self.freqs.size == 0:
            return 0j if zs.ndim == 0 else np.zeros(zs.shape, dtype=complex)
        if zs.ndim == 0:
            return complex(np.exp(2j * np.pi * self.freqs * complex(zs)) @ self.coeffs)
        flat = zs.ravel()
        out = np.empty(flat.size, dtype=complex)
        step = max(1, _EVAL_CHUNK // max(1, self.n_terms))
        for i in range(0, flat.size, step):
            block = flat[i:i + step]
            out[i:i + step] = np.exp(
                2j * np.pi * np.multiply.outer(block, self.freqs)) @ self.coeffs
        return out.reshape(zs.shape)

    __call__ = eval

    # -- arithmetic ----------------------------------------------------------

    def _tols_with(self, other):
        return (max(self.merge_tol, other.merge_tol),
                max(self.drop_tol, other.drop_tol))

    def scale(self, c):
        c = complex(c)
        if c == 0 or self.freqs.size == 0:
            return ExpSum(np.empty(0), np.empty(0, dtype=complex), self.merge_tol,
                          self.drop_tol, self.discarded_norm * abs(c))
        f, q, dropped = _canonical(self.freqs, self.coeffs * c,
                                   self.merge_tol, self.drop_tol)
        return ExpSum(f, q, self.merge_tol, self.drop_tol,
                      self.discarded_norm * abs(c) + dropped)

    def __neg__(self):
        return self.scale(-1.0)

    def __add__(self, other):
        if not isinstance(other, ExpSum):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other):
        if not isinstance(other, ExpSum):
            return NotImplemented
        return add(self, other.scale(-1.0))

    def __mul__(self, other):
        if isinstance(other, ExpSum):
            return mul(self, other)
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    # -- serialization -------------------------------------------------------

    def to_dict(self):
        return {
            "terms": [{"freq": float(f), "re": float(c.real), "im": float(c.imag)}
                      for f, c in zip(self.freqs, self.coeffs)],
            "merge_tol": float(self.merge_tol),
            "drop_tol": float(self.drop_tol),
            "discarded_norm": float(self.discarded_norm),
        }

    @classmethod
    def from_dict(cls, d):
        return cls.from_terms(
            [(t["freq"], t["re"] + 1j * t["im"]) for t in d["terms"]],
            merge_tol=d.get("merge_tol", 1e-9),
            drop_tol=d.get("drop_tol", 0.0),
            discarded_norm=d.get("discarded_norm", 0.0),
        )


# -- module-level operations -------------------------------------------------

def add(P: ExpSum, Q: ExpSum) -> ExpSum:
    """Pointwise sum.  ||P + Q|| <= ||P|| + ||Q||."""
    merge_tol, drop_tol = P._tols_with(Q)
    f, c, dropped = _canonical(np.concatenate([P.freqs, Q.freqs]),
                               np.concatenate([P.coeffs, Q.coeffs]),
                               merge_tol, drop_tol)
    return ExpSum(f, c, merge_tol, drop_tol,
                  P.discarded_norm + Q.discarded_norm + dropped)


def mul(P: ExpSum, Q: ExpSum) -> ExpSum:
    """Pointwise product; spectrum lands in the frequency sumset."""
    merge_tol, drop_tol = P._tols_with(Q)
    n = P.n_terms * Q.n_terms
    if n > TERM_CAP:
        raise CapExceeded(f"product would materialize {n} terms (cap {TERM_CAP})")
    if n == 0:
        f = np.empty(0)
        c = np.empty(0, dtype=complex)
        dropped = 0.0
    else:
        f = np.add.outer(P.freqs, Q.freqs).ravel()
        c = np.multiply.outer(P.coeffs, Q.coeffs).ravel()
        f, c, dropped = _canonical(f, c, merge_tol, drop_tol)
    cross = (P.discarded_norm * (Q.wiener_norm + Q.discarded_norm)
             + Q.discarded_norm * P.wiener_norm)
    return ExpSum(f, c, merge_tol, drop_tol, cross + dropped)


def shift_line(P: ExpSum, y: float) -> ExpSum:
    """Restriction to the horizontal line Im z = y, as a sum in x.

    Each coefficient is damped by exp(-2*pi*w*y).  Raises
    :class:`NumericOverflow` if a damped coefficient leaves double range.
    """
    if P.n_terms == 0:
        return P
    expo = -2.0 * math.pi * P.freqs * y
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(P.coeffs)) + expo
    if np.any(logmag > _EXP_ARG_MAX):
        raise NumericOverflow("shifted coefficient exceeds double-precision range")
    f, c, dropped = _canonical(P.freqs, P.coeffs * np.exp(expo),
                               P.merge_tol, P.drop_tol)
    # discarded terms have frequencies inside the stored hull
    damp = max(math.exp(-2.0 * math.pi * P.freqs[0] * y),
               math.exp(-2.0 * math.pi * P.freqs[-1] * y))
    return ExpSum(f, c, P.merge_tol, P.drop_tol,
                  P.discarded_norm * damp + dropped)


def derivative(P: ExpSum) -> ExpSum:
    """d/dx: multiply each coefficient by 2*pi*i*w."""
    f, c, dropped = _canonical(P.freqs, P.coeffs * (2j * np.pi * P.freqs),
                               P.merge_tol, P.drop_tol)
    return ExpSum(f, c, P.merge_tol, P.drop_tol,
                  P.discarded_norm * 2.0 * math.pi * P.max_abs_freq + dropped)


def _log1p_order(r: float, tail_tol: float) -> int:
    # smallest N with sum_{n>N} r^n / n <= r^{N+1} / ((N+1)(1-r)) <= tail_tol
    if r == 0.0:
        return 1
    n = 1
    while (r ** (n + 1)) / ((n + 1) * (1.0 - r)) > tail_tol:
        n += 1
        if n > 200_000:
            raise CapExceeded("log1p truncation order exceeds 200000")
    return n


def log1p(P: ExpSum, tail_tol: float = 1e-12) -> ExpSum:
    """log(1 + P) by the alternating power series, for ||P|| < 1.

    The series is cut at the first order whose geometric tail bound drops
    below ``tail_tol``; the bound is added to ``discarded_norm``.  When the
    spectrum of P is strictly positive the result's spectrum stays in the
    additive semigroup generated by it (hence strictly positive).
    """
    r = P.wiener_norm
    if r >= 1.0:
        raise NormTooLarge(f"Wiener norm {r:.6g} >= 1")
    order = _log1p_order(r, tail_tol)
    acc = ExpSum.zero(P.merge_tol, P.drop_tol)
    power = P
    for n in range(1, order + 1):
        if n > 1:
            power = mul(power, P)
        acc = add(acc, power.scale((1.0 if n % 2 else -1.0) / n))
    tail = (r ** (order + 1)) / ((order + 1) * (1.0 - r)) if r > 0 else 0.0
    return ExpSum(acc.freqs, acc.coeffs, acc.merge_tol, acc.drop_tol,
                  acc.discarded_norm + tail)


def _exp_order(r: float, tail_tol: float) -> int:
    # smallest N with sum_{n>N} r^n / n! <= tail_tol, via the ratio bound
    if r == 0.0:
        return 0
    n = max(1, int(math.ceil(r)))
    while True:
        log_tail = (n + 1) * math.log(r) - math.lgamma(n + 2)
        ratio = r / (n + 2)
        if ratio < 1.0 and log_tail - math.log1p(-ratio) <= math.log(tail_tol):
            return n
        n += 1
        if n > 200_000:
            raise CapExceeded("exp truncation order exceeds 200000")


def exp(P: ExpSum, tail_tol: float = 1e-12) -> ExpSum:
    """exp(P) by the power series with a factorial tail bound."""
    r = P.wiener_norm
    order = _exp_order(r, tail_tol)
    acc = ExpSum.constant(1.0, P.merge_tol, P.drop_tol)
    power = None
    inv_fact = 1.0
    for n in range(1, order + 1):
        power = P if n == 1 else mul(power, P)
        inv_fact /= n
        acc = add(acc, power.scale(inv_fact))
    if r > 0.0 and order >= 0:
        log_tail = (order + 1) * math.log(r) - math.lgamma(order + 2)
        ratio = r / (order + 2)
        tail = math.exp(log_tail) / (1.0 - ratio) if ratio < 1.0 else tail_tol
    else:
        tail = 0.0
    return ExpSum(acc.freqs, acc.coeffs, acc.merge_tol, acc.drop_tol,
                  acc.discarded_norm + tail)

"""Almost-periodicity and translation-boundedness diagnostics for zero sets.

A shift tau is an eps-almost period of a point set when some bijection
moves every point by less than eps after translating by tau.  At desk
scale the check runs on a finite window: points of the window overlap are
matched order-preservingly (optimal on a line for well-separated sets),
with an assignment-solver fallback for small windows.  Any finite-window
verdict is a diagnostic, not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotNumbered, WindowTooSmall
from .wiener import ExpSum

_HUNGARIAN_CAP = 600  # assignment fallback only below this many points


def translation_bound(zeros) -> int:
    """Max multiplicity-counted zeros in any unit window [t, t+1], t on a half grid."""
    locs = zeros.locations()
    if locs.size == 0:
        return 0
    x = np.sort(locs.real)
    best = 0
    t = zeros.window.x_min
    while t <= zeros.window.x_max:
        lo = np.searchsorted(x, t, side="left")
        hi = np.searchsorted(x, t + 1.0, side="right")
        best = max(best, int(hi - lo))
        t += 0.5
    return best


@dataclass
class AlmostPeriodReport:
    epsilon: float
    window: tuple
    taus: list              # every candidate examined
    displacements: list     # per candidate: max matched displacement (inf if none)
    accepted: list          # accepted candidates, ascending
    max_gap: float          # largest gap between consecutive accepted taus

    def to_dict(self):
        return {"epsilon": self.epsilon,
                "window": [self.window[0], self.window[1]],
                "periods": self.accepted,
                "max_gap": self.max_gap,
                "matchings": [
                    {"tau": t, "max_displacement":
                        (d if math.isfinite(d) else None),
                     "accepted": a}
                    for t, d, a in zip(self.taus, self.displacements,
                                       [t in set(self.accepted) for t in self.taus])
                ]}

    def csv_rows(self):
        acc = set(self.accepted)
        return [(t, d if math.isfinite(d) else "", int(t in acc))
                for t, d in zip(self.taus, self.displacements)]


def _monotone_match(pts, x_sorted, src, tau, eps):
    """Order-preserving matching displacement of pts[src] + tau into pts.

    Tries small index offsets of the aligned target block; on a line the
    optimal bottleneck matching of two sorted sets is order-preserving, so
    this is the greedy matcher of record.
    """
    m = src.stop - src.start
    if m <= 0:
        return math.inf
    shifted = pts[src] + tau
    j0 = int(np.searchsorted(x_sorted, shifted[0].real - eps, side="left"))
    best = math.inf
    for j in range(max(0, j0 - 2), min(pts.size - m, j0 + 2) + 1):
        disp = float(np.max(np.abs(pts[j:j + m] - shifted)))
        best = min(best, disp)
    return best


def _assignment_match(pts, src, tau, eps):
    """Optimal-assignment fallback for small point counts."""
    from scipy.optimize import linear_sum_assignment
    shifted = pts[src] + tau
    cand = pts[np.abs(pts.real[:, None] - shifted.real[None, :]).min(axis=1) < 2 * eps]
    if cand.size < shifted.size:
        return math.inf
    cost = np.abs(shifted[:, None] - cand[None, :])
    row, col = linear_sum_assignment(np.minimum(cost, 10.0 * eps))
    return float(cost[row, col].max())


def almost_periods(zeros, epsilon: float, tau_grid) -> AlmostPeriodReport:
    """Scan candidate shifts for eps-almost periods of the zero set.

    Candidates must keep at least 80% of the window points inside the
    shifted overlap, otherwise the window is declared too small for the
    grid.  A candidate is accepted when a perfect matching on the overlap
    moves every point by less than epsilon.
    """
    locs = zeros.locations()
    order = np.argsort(locs.real, kind="stable")
    pts = locs[order]
    if pts.size == 0:
        raise WindowTooSmall("empty zero set")
    x = pts.real
    w0, w1 = zeros.window.x_min, zeros.window.x_max
    span = w1 - w0
    taus = [float(t) for t in tau_grid]
    tmax = max((abs(t) for t in taus), default=0.0)
    if tmax > 0.2 * span:
        raise WindowTooSmall(
            f"max |tau| = {tmax:.6g} keeps under 80% of the window "
            f"(span {span:.6g}); widen the zero window")

    displacements = []
    accepted = []
    for tau in taus:
        lo = w0 + max(0.0, -tau) + epsilon
        hi = w1 - max(0.0, tau) - epsilon
        i0 = int(np.searchsorted(x, lo, side="left"))
        i1 = int(np.searchsorted(x, hi, side="right"))
        src = slice(i0, i1)
        if i1 - i0 < 0.8 * pts.size * (1.0 - abs(tau) / span) - 2:
            displacements.append(math.inf)
            continue
        disp = _monotone_match(pts, x, src, tau, epsilon)
        if disp >= epsilon and (i1 - i0) <= _HUNGARIAN_CAP:
            disp = min(disp, _assignment_match(pts, src, tau, epsilon))
        displacements.append(disp)
        if disp < epsilon:
            accepted.append(tau)
    if len(accepted) >= 2:
        max_gap = float(np.max(np.diff(np.sort(accepted))))
    else:
        max_gap = math.inf
    return AlmostPeriodReport(epsilon, (w0, w1), taus, displacements,
                              sorted(accepted), max_gap)


def diophantine_displacement_bound(Q: ExpSum, tau: float) -> float:
    """Upper bound on sup |Q(x+tau) - Q(x)|: 2 sum |q| |sin(pi w tau)|."""
    if Q.n_terms == 0:
        return 0.0
    return float(2.0 * np.abs(Q.coeffs) @ np.abs(np.sin(np.pi * Q.freqs * tau)))


def ap_function_periods(Q: ExpSum, epsilon: float, tau_grid,
                        x_grid) -> AlmostPeriodReport:
    """eps-almost periods of the function itself, sampled on x_grid.

    A shift is accepted when max over the sample of |Q(x+tau) - Q(x)| is
    below epsilon.  The exact sup over the line is bounded above by
    :func:`diophantine_displacement_bound`, so shifts with a small bound
    are guaranteed accepted.
    """
    xs = np.asarray(list(x_grid), dtype=float)
    taus = [float(t) for t in tau_grid]
    base = Q.eval(xs.astype(complex))
    phases = np.exp(2j * np.pi * np.multiply.outer(xs, Q.freqs))
    displacements = []
    accepted = []
    for tau in taus:
        shifted_coeffs = Q.coeffs * np.exp(2j * np.pi * Q.freqs * tau)
        disp = float(np.max(np.abs(phases @ shifted_coeffs - base))) \
            if Q.n_terms else 0.0
        displacements.append(disp)
        if disp < epsilon:
            accepted.append(tau)
    if len(accepted) >= 2:
        max_gap = float(np.max(np.diff(np.sort(accepted))))
    else:
        max_gap = math.inf
    lo, hi = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 0.0)
    return AlmostPeriodReport(epsilon, (lo, hi), taus, displacements,
                              sorted(accepted), max_gap)


def density(zeros, r_grid) -> tuple:
    """(empirical density, |density - 1/rho|) from counts over (-R, R)."""
    if not zeros.numbered:
        raise NotNumbered("density needs a numbered zero set")
    locs = zeros.locations()
    x = np.sort(locs.real)
    dens = 0.0
    for r in r_grid:
        lo = np.searchsorted(x, -r, side="right")
        hi = np.searchsorted(x, r, side="left")
        dens = (hi - lo) / (2.0 * float(r))
    consistency = abs(dens - 1.0 / zeros.rho)
    return float(dens), float(consistency)

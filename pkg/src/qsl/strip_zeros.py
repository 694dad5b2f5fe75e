"""Zero location for exponential sums inside rectangles of a strip.

The counting primitive is the argument principle: the winding number of Q
around 0 along a rectangle boundary equals the number of interior zeros
with multiplicity.  ``find_zeros`` bisects rectangles until each piece
holds a single zero cluster, then polishes simple zeros with Newton steps
and reports unresolvable clusters as one zero with the cluster's winding
number as multiplicity.

All functions are pure given their inputs; subdivision order is
deterministic (fixed jitter table, results sorted by (Re, Im)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (BoundaryZero, EndpointNotAttained, NonIntegerWinding,
                     ResolutionLimit, TooFewPoints, ZeroAtOrigin, ZeroEscape)
from .wiener import ExpSum, derivative

_EPS = float(np.finfo(float).eps)
_NOISE_FACTOR = 1e3 * _EPS          # modulus floor = factor * line bound
_CLUSTER_DIAM = 1e-3                # below this an uncertifiable rect is a cluster
_HARD_FLOOR = 1e3 * _EPS            # absolute subdivision width floor
_MAX_EDGE_POINTS = 1 << 17
_SPLIT_LADDER = (256, 2048, 16384, 65536)
_WINDING_RESIDUAL = 0.25
# deterministic cut offsets, fractions of the side length; spread wide so a
# zero line through the middle cannot shadow every candidate
_JITTERS = (0.0, 0.1037, -0.1549, 0.2061, -0.2473, 0.0582, -0.0791,
            0.1213, -0.2227, 0.0344, -0.0458, 0.1663, -0.1171, 0.2369,
            -0.0273, 0.0896)


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle in the plane."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("need x_min < x_max and y_min < y_max")

    @property
    def width(self):
        return self.x_max - self.x_min

    @property
    def height(self):
        return self.y_max - self.y_min

    @property
    def diam(self):
        return math.hypot(self.width, self.height)

    @property
    def center(self):
        return complex(0.5 * (self.x_min + self.x_max),
                       0.5 * (self.y_min + self.y_max))

    def corners(self):
        """Counterclockwise corners starting at the lower left."""
        return (complex(self.x_min, self.y_min), complex(self.x_max, self.y_min),
                complex(self.x_max, self.y_max), complex(self.x_min, self.y_max))

    def contains(self, z, slack=0.0):
        return (self.x_min - slack <= z.real <= self.x_max + slack
                and self.y_min - slack <= z.imag <= self.y_max + slack)

    def to_dict(self):
        return {"x_min": self.x_min, "x_max": self.x_max,
                "y_min": self.y_min, "y_max": self.y_max}

    @classmethod
    def from_dict(cls, d):
        return cls(d["x_min"], d["x_max"], d["y_min"], d["y_max"])


@dataclass(frozen=True)
class Strip:
    """Closed horizontal strip |Im z| <= half_width."""

    half_width: float
    no_zeros: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.half_width) and self.half_width >= 0):
            raise ValueError("half_width must be finite and >= 0")


@dataclass
class ZeroSet:
    """Multiset of located zeros, optionally with a linear numbering.

    ``points`` is sorted by (Re, Im); a numbered set satisfies
    location(n) = rho * n + phi[n] with |phi[n]| <= m_bound.
    """

    points: list          # [(complex location, int multiplicity)]
    window: Rect
    rho: float | None = None
    phi: dict | None = None

    def __post_init__(self):
        self.points = sorted(((complex(z), int(m)) for z, m in self.points),
                             key=lambda p: (p[0].real, p[0].imag))
        for z, m in self.points:
            if m < 1:
                raise ValueError("multiplicity must be >= 1")
            if not self.window.contains(z, slack=1e-9 * (1.0 + abs(z))):
                raise ValueError(f"zero {z} outside window")

    @property
    def total(self):
        return sum(m for _, m in self.points)

    def locations(self):
        """Zeros repeated by multiplicity, sorted by (Re, Im)."""
        out = []
        for z, m in self.points:
            out.extend([z] * m)
        return np.array(out, dtype=complex)

    @property
    def numbered(self):
        return self.rho is not None and self.phi is not None

    @property
    def m_bound(self):
        if not self.numbered:
            return None
        return max(abs(v) for v in self.phi.values())

    def location(self, n):
        if not self.numbered:
            raise NotNumberedError()
        return self.rho * n + self.phi[n]

    def index_range(self):
        if not self.numbered:
            raise NotNumberedError()
        return min(self.phi), max(self.phi)

    def to_dict(self):
        d = {
            "window": self.window.to_dict(),
            "points": [{"re": z.real, "im": z.imag, "mult": m}
                       for z, m in self.points],
            "rho": self.rho,
            "phi": None,
        }
        if self.numbered:
            d["phi"] = [{"n": n, "re": v.real, "im": v.imag}
                        for n, v in sorted(self.phi.items())]
        return d

    @classmethod
    def from_dict(cls, d):
        phi = None
        if d.get("phi"):
            phi = {int(e["n"]): e["re"] + 1j * e["im"] for e in d["phi"]}
        return cls(points=[(p["re"] + 1j * p["im"], p["mult"]) for p in d["points"]],
                   window=Rect.from_dict(d["window"]),
                   rho=d.get("rho"), phi=phi)


def NotNumberedError():
    from .errors import NotNumbered
    return NotNumbered("zero set has no numbering; run enumerate_zeros first")


# -- strip bound ---------------------------------------------------------------

def strip_bound(Q: ExpSum) -> Strip:
    """Height H with all zeros of Q in |Im z| <= H.

    Uses endpoint dominance: beyond the returned height the extreme-frequency
    term outweighs the summed modulus of all the others.  Requires both
    spectrum endpoints to carry stored coefficients.
    """
    if Q.n_terms == 0:
        raise EndpointNotAttained("empty sum has no attained spectrum endpoints")
    if Q.n_terms == 1:
        return Strip(0.0, no_zeros=True)
    mags = np.abs(Q.coeffs)
    rest_low = float(mags[1:].sum())
    rest_high = float(mags[:-1].sum())
    gap_low = float(Q.freqs[1] - Q.freqs[0])
    gap_high = float(Q.freqs[-1] - Q.freqs[-2])
    h_up = max(0.0, math.log(rest_low / mags[0]) / (2.0 * math.pi * gap_low))
    h_down = max(0.0, math.log(rest_high / mags[-1]) / (2.0 * math.pi * gap_high))
    return Strip(max(h_up, h_down))


# -- winding machinery ---------------------------------------------------------

def _edge_samples(a, b, n):
    t = np.linspace(0.0, 1.0, n + 1)
    return a + (b - a) * t


def _modulus_floor(Q, z):
    """Pointwise evaluation-noise floor for |Q| along sample points."""
    if Q.n_terms == 0:
        return np.zeros(np.shape(z))
    bound = np.exp(-2.0 * np.pi * np.multiply.outer(np.imag(z), Q.freqs)) \
        @ np.abs(Q.coeffs)
    return _NOISE_FACTOR * bound


def _deriv_bound(dQ, z):
    """Pointwise bound on |Q'| valid on the horizontal line through each z."""
    if dQ.n_terms == 0:
        return np.zeros(np.shape(z))
    return np.exp(-2.0 * np.pi * np.multiply.outer(np.imag(z), dQ.freqs)) \
        @ np.abs(dQ.coeffs)


def _edge_certified(qz, floor, dbound, h):
    """True when sampled moduli prove the segment zero-free.

    Between adjacent samples |Q| can drop by at most (local |Q'| bound) * h,
    so each interval needs an endpoint modulus clearing that margin.  The
    derivative bound is convex in Im z, hence interval maxima sit at the
    sampled endpoints.
    """
    margin = np.abs(qz) - floor
    m = np.minimum(margin[:-1], margin[1:])
    lip = np.maximum(dbound[:-1], dbound[1:])
    return bool(np.all(m > lip * 0.5 * h))


def _winding(Q, dQ, rect, residual_tol=_WINDING_RESIDUAL):
    """Winding number of Q along the rectangle boundary.

    Trapezoid sums of Q'/Q per edge with step halving until successive
    levels agree and the total is within ``residual_tol`` of an integer.
    Every level first certifies the boundary zero-free via the sampled
    minimum modulus and a derivative Lipschitz bound; BoundaryZero is
    raised when certification never succeeds, NonIntegerWinding when the
    integral refuses to settle.
    """
    corners = rect.corners()
    edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    n = 64
    prev = None
    certified_once = False
    while n <= _MAX_EDGE_POINTS:
        total = 0j
        ok = True
        for a, b in edges:
            z = _edge_samples(a, b, n)
            qz = Q.eval(z)
            floor = _modulus_floor(Q, z)
            if not _edge_certified(qz, floor, _deriv_bound(dQ, z), abs(b - a) / n):
                ok = False
                break
            g = dQ.eval(z) / qz
            total += (b - a) * (0.5 * g[0] + g[1:-1].sum() + 0.5 * g[-1]) / n
        if not ok:
            prev = None
            n *= 2
            continue
        certified_once = True
        w = total / (2j * np.pi)
        k = round(w.real)
        residual = abs(w - k)
        if prev is not None and abs(w - prev) < 0.05 and residual < residual_tol:
            return int(k), float(residual)
        prev = w
        n *= 2
    if not certified_once:
        raise BoundaryZero(f"cannot certify the boundary of {rect} zero-free")
    raise NonIntegerWinding(
        f"winding did not settle on {rect}: last value {prev}")


def count_zeros(Q: ExpSum, rect: Rect) -> int:
    """Number of zeros of Q in the rectangle, counted with multiplicity."""
    k, _ = _winding(Q, derivative(Q), rect)
    if k < 0:
        raise NonIntegerWinding(f"negative winding {k} on {rect}")
    return k


# -- Newton polish -------------------------------------------------------------

def _residual_target(Q, z, tol):
    return tol * Q.wiener_norm * math.exp(
        2.0 * math.pi * Q.max_abs_freq * abs(z.imag))


def _newton(Q, dQ, z0, tol, multiplicity=1, max_iter=80):
    """Damped-free Newton iteration; returns (z, residual, converged)."""
    z = complex(z0)
    best_z, best_r = z, abs(Q.eval(z))
    for _ in range(max_iter):
        qz = Q.eval(z)
        r = abs(qz)
        if r < best_r:
            best_z, best_r = z, r
        dz = dQ.eval(z)
        if dz == 0 or not np.isfinite(dz):
            break
        step = multiplicity * qz / dz
        z = z - step
        if not np.isfinite(z):
            break
        if abs(step) <= 5e-16 * (1.0 + abs(z)):
            qz = Q.eval(z)
            if abs(qz) < best_r:
                best_z, best_r = z, abs(qz)
            break
    target = _residual_target(Q, best_z, tol)
    if multiplicity > 1:
        # attainable residual for a k-fold zero scales with the noise floor
        target = max(target, float(np.max(_modulus_floor(Q, np.array([best_z])))))
    return best_z, best_r, best_r <= target


def _grid_start(Q, rect, nx=7, ny=5):
    xs = np.linspace(rect.x_min, rect.x_max, nx + 2)[1:-1]
    ys = np.linspace(rect.y_min, rect.y_max, ny + 2)[1:-1]
    zz = (xs[:, None] + 1j * ys[None, :]).ravel()
    vals = np.abs(Q.eval(zz))
    return complex(zz[int(np.argmin(vals))])


# -- subdivision search --------------------------------------------------------

class _SplitFailed(Exception):
    pass


def _split(Q, dQ, rect):
    """Cut the longer side at a certified position (no zero on the cut)."""
    vertical = rect.width >= rect.height
    span = rect.width if vertical else rect.height
    lo = rect.x_min if vertical else rect.y_min
    for off in _JITTERS:
        cut = lo + span * (0.5 + off)
        if vertical:
            a, b = complex(cut, rect.y_min), complex(cut, rect.y_max)
        else:
            a, b = complex(rect.x_min, cut), complex(rect.x_max, cut)
        for n in _SPLIT_LADDER:
            z = _edge_samples(a, b, n)
            if _edge_certified(Q.eval(z), _modulus_floor(Q, z),
                               _deriv_bound(dQ, z), abs(b - a) / n):
                if vertical:
                    return (Rect(rect.x_min, cut, rect.y_min, rect.y_max),
                            Rect(cut, rect.x_max, rect.y_min, rect.y_max))
                return (Rect(rect.x_min, rect.x_max, rect.y_min, cut),
                        Rect(rect.x_min, rect.x_max, cut, rect.y_max))
    raise _SplitFailed


def _try_cluster(Q, dQ, rect, count, tol):
    """Certify a k-fold cluster without descending the bisection chain.

    Runs a multiplicity-adjusted Newton iteration; if it reaches the
    cluster residual floor, confirms by winding number that all ``count``
    zeros sit in a small certified square around the limit.  Returns the
    cluster point or None.
    """
    z0 = _grid_start(Q, rect)
    z, _, ok = _newton(Q, dQ, z0, tol, multiplicity=count)
    if not ok or not rect.contains(z, slack=1e-9 * (1.0 + abs(z))):
        return None
    for side in (1e-3, 4e-3, 1.6e-2):
        half = side / 2.0
        probe = Rect(z.real - half, z.real + half, z.imag - half, z.imag + half)
        if not (rect.x_min <= probe.x_min and probe.x_max <= rect.x_max
                and rect.y_min <= probe.y_min and probe.y_max <= rect.y_max):
            return None
        try:
            k, _ = _winding(Q, dQ, probe)
        except (BoundaryZero, NonIntegerWinding):
            continue
        if k == count:
            return z
        return None
    return None


def _solve(Q, dQ, rect, count, tol, top_window, depth=0):
    if count == 0:
        return []
    if depth > 200:
        raise ResolutionLimit(f"subdivision depth exhausted at {rect}")

    if count == 1:
        z0 = _grid_start(Q, rect)
        z, _, ok = _newton(Q, dQ, z0, tol)
        slack = 1e-9 * (1.0 + abs(z)) + 10.0 * _EPS * rect.diam
        if ok and rect.contains(z, slack=slack) and top_window.contains(z, slack=slack):
            return [(z, 1)]

    if count >= 2 and rect.diam <= 0.5:
        z = _try_cluster(Q, dQ, rect, count, tol)
        if z is not None:
            return [(z, count)]

    small = max(rect.width, rect.height) < _HARD_FLOOR
    if not small:
        try:
            r1, r2 = _split(Q, dQ, rect)
            k1, _ = _winding(Q, dQ, r1)
        except (_SplitFailed, BoundaryZero):
            # certification broke down: near-coincident zeros make every
            # nearby line modulus fall under the Lipschitz margin
            if max(rect.width, rect.height) < _CLUSTER_DIAM:
                small = True
            else:
                raise ResolutionLimit(
                    f"cannot certify any cut of {rect} holding {count} zeros")
        else:
            if not 0 <= k1 <= count:
                raise NonIntegerWinding(
                    f"child count {k1} inconsistent with parent {count}")
            return (_solve(Q, dQ, r1, k1, tol, top_window, depth + 1)
                    + _solve(Q, dQ, r2, count - k1, tol, top_window, depth + 1))

    # unresolvable cluster: one zero of multiplicity = winding count
    z, _, _ = _newton(Q, dQ, rect.center, tol, multiplicity=count)
    if not top_window.contains(z, slack=1e-6):
        z = rect.center
    return [(z, count)]


def find_zeros(Q: ExpSum, rect: Rect, tol: float = 1e-12) -> ZeroSet:
    """Locate all zeros of Q in the rectangle.

    Simple zeros are Newton-polished until |Q(a)| is below
    tol * ||Q||_W * exp(2 pi max|w| |Im a|).  A cluster that refuses to
    separate above the resolution floor is reported once with its winding
    number as multiplicity, at the polished cluster center.
    """
    dQ = derivative(Q)
    total, _ = _winding(Q, dQ, rect)
    found = _solve(Q, dQ, rect, total, tol, rect)
    if sum(m for _, m in found) != total:
        raise NonIntegerWinding(
            f"zero accounting mismatch: {sum(m for _, m in found)} != {total}")
    return ZeroSet(points=found, window=rect)


# -- numbering -----------------------------------------------------------------

def enumerate_zeros(zeros: ZeroSet) -> ZeroSet:
    """Assign the linear numbering a_n = rho*n + phi(n), n in Z.

    Points are sorted by (Re, Im) with ties repeated by multiplicity; index
    0 goes to the point nearest the origin, rho is the end-to-end real-part
    slope, and phi(n) = a_n - rho*n is reported per index.
    """
    pts = zeros.locations()
    if pts.size < 10:
        raise TooFewPoints(f"need >= 10 zeros to number, got {pts.size}")
    # least-squares real-part slope; immune to a half-filled end column
    rho = float(np.polyfit(np.arange(pts.size), pts.real, 1)[0])
    if rho <= 0:
        raise TooFewPoints("degenerate numbering: nonpositive real-part slope")
    # anchor index 0 near the origin, trying nearby ties so that repeated
    # columns pair off with the smallest displacement bound
    anchor = int(np.argmin(np.abs(pts)))
    best = None
    for i0 in range(max(0, anchor - 2), min(pts.size - 1, anchor + 2) + 1):
        n_idx = np.arange(pts.size) - i0
        m = float(np.max(np.abs(pts - rho * n_idx)))
        if best is None or m < best[0]:
            best = (m, i0)
    i0 = best[1]
    n_idx = np.arange(pts.size) - i0
    phi = {int(n): complex(pts[i] - rho * n)
           for i, n in enumerate(n_idx)}
    return ZeroSet(points=zeros.points, window=zeros.window, rho=rho, phi=phi)


# -- diagnostics ---------------------------------------------------------------

def separation(Q: ExpSum, zeros: ZeroSet, eps: float, s: float,
               grid_step: float | None = None) -> float:
    """Measured lower bound m = min |Q| off the eps-neighborhood of the zeros.

    Scans the window rectangle |Im z| <= s.  Raises ZeroEscape when a scan
    point farther than eps from every known zero still has |Q| under the
    numeric floor (a missed zero).
    """
    if grid_step is None:
        grid_step = min(eps / 2.0, 0.05)
    w = zeros.window
    xs = np.arange(w.x_min, w.x_max + grid_step, grid_step)
    ys = np.arange(-s, s + grid_step, grid_step)
    zz = (xs[:, None] + 1j * ys[None, :]).ravel()
    locs = zeros.locations()
    if locs.size:
        dist = np.min(np.abs(zz[:, None] - locs[None, :]), axis=1)
    else:
        dist = np.full(zz.shape, np.inf)
    mask = dist >= eps
    if not np.any(mask):
        raise ZeroEscape("no scan point is eps-far from the zero set")
    vals = np.abs(Q.eval(zz[mask]))
    floor = _modulus_floor(Q, zz[mask])
    bad = vals <= floor
    if np.any(bad):
        z_bad = zz[mask][bad][0]
        raise ZeroEscape(f"|Q| under numeric floor at {z_bad}, "
                         f"distance to known zeros >= {eps}")
    return float(vals.min())


def lindelof_diag(zeros: ZeroSet, r_grid) -> list:
    """Counting and reciprocal-sum statistics on a radius grid.

    Returns [(r, count(r)/r, |sum_{|a|<=r} 1/a|)]; diagnostic only.
    """
    locs = zeros.locations()
    if locs.size and np.min(np.abs(locs)) < 1e-12:
        raise ZeroAtOrigin("zero at the origin; recenter first")
    out = []
    for r in r_grid:
        sel = locs[np.abs(locs) <= r] if locs.size else locs
        recip = complex(np.sum(1.0 / sel)) if sel.size else 0j
        out.append((float(r), sel.size / float(r), abs(recip)))
    return out

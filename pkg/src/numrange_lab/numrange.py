"""Support-function geometry of the numerical range W(A).

The supporting line of W(A) in direction theta is
    { z : Re(e^{-i theta} z) = p(theta) },   p(theta) = lambda_max(Re(e^{-i theta} A)),
and every unit vector in the top eigenspace of Re(e^{-i theta} A) maps onto it
under f_A(x) = x* A x.  All boundary computations below reduce to eigenvalue
problems for the pencil cos(theta) H + sin(theta) K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_square_matrix,
    herm_part_at,
    hermitian_parts,
    matrix_scale,
)

TWO_PI = 2 * np.pi


class UnsupportedBlockError(ValueError):
    """Relative boundary count requested for a block shape we cannot handle."""


# ---------------------------------------------------------------------------
# support function
# ---------------------------------------------------------------------------


@dataclass
class SupportSample:
    theta: float
    p: float
    multiplicity: int
    boundary_points: list


def support(a, theta: float, tol: ToleranceConfig = DEFAULT_TOL) -> SupportSample:
    """Support value and boundary points of W(A) in direction theta."""
    m = as_square_matrix(a)
    w, v = np.linalg.eigh(herm_part_at(m, theta))
    p = float(w[-1])
    link = tol.cluster_abs(matrix_scale(m))
    mult = 1
    while mult < len(w) and w[-mult] - w[-mult - 1] <= link:
        mult += 1
    pts = []
    for j in range(len(w) - mult, len(w)):
        x = v[:, j]
        pts.append(complex(x.conj() @ m @ x))
    return SupportSample(theta=float(theta), p=p, multiplicity=mult, boundary_points=pts)


class SupportFunction:
    """p(theta) precomputed on a uniform grid, with exact evaluation anywhere."""

    def __init__(self, a, grid_size: int = 1024):
        self.a = as_square_matrix(a)
        self.h, self.k = hermitian_parts(self.a)
        self.grid_size = int(grid_size)
        self.thetas = np.linspace(0.0, TWO_PI, self.grid_size, endpoint=False)
        cos = np.cos(self.thetas)[:, None, None]
        sin = np.sin(self.thetas)[:, None, None]
        stack = cos * self.h[None, :, :] + sin * self.k[None, :, :]
        self.grid_values = np.linalg.eigvalsh(stack)[:, -1]

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.ndim == 0:
            m = np.cos(theta) * self.h + np.sin(theta) * self.k
            return float(np.linalg.eigvalsh(m)[-1])
        cos = np.cos(theta)[:, None, None]
        sin = np.sin(theta)[:, None, None]
        stack = cos * self.h[None, :, :] + sin * self.k[None, :, :]
        return np.linalg.eigvalsh(stack)[:, -1]

    def diameter(self) -> float:
        half = self.grid_size // 2
        widths = self.grid_values[:half] + self.grid_values[half : 2 * half]
        return max(float(np.max(widths)), 0.0)


def _golden_min(f: Callable[[float], float], lo: float, hi: float, iters: int = 80):
    """Golden-section minimum of f on [lo, hi]; returns (argmin, fmin)."""
    invphi = (np.sqrt(5.0) - 1) / 2
    invphi2 = (3 - np.sqrt(5.0)) / 2
    h = hi - lo
    x1 = lo + invphi2 * h
    x2 = lo + invphi * h
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            h = hi - lo
            x1 = lo + invphi2 * h
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            h = hi - lo
            x2 = lo + invphi * h
            f2 = f(x2)
    if f1 < f2:
        return x1, f1
    return x2, f2


def _local_minima(values: np.ndarray) -> np.ndarray:
    """Indices of cyclic local minima of a sampled function."""
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    return np.nonzero((values <= left) & (values <= right))[0]


def point_boundary_defect(support_fn: SupportFunction, z: complex) -> float:
    """min_theta [ p(theta) - Re(e^{-i theta} z) ]  (0 iff z lies on the boundary)."""
    proj = np.real(np.exp(-1j * support_fn.thetas) * z)
    g = support_fn.grid_values - proj
    best = np.inf
    step = TWO_PI / support_fn.grid_size

    def f(t):
        return support_fn(t) - np.real(np.exp(-1j * t) * z)

    for idx in _local_minima(g)[np.argsort(g[_local_minima(g)])][:6]:
        t0 = support_fn.thetas[idx]
        t, val = _golden_min(f, t0 - step, t0 + step)
        best = min(best, val)
    return float(best)


# ---------------------------------------------------------------------------
# spectral events: directions where the top eigenvalue is (nearly) multiple
# ---------------------------------------------------------------------------


@dataclass
class TopEvent:
    theta: float
    p: float
    gap: float
    basis: np.ndarray  # n x m orthonormal columns spanning the top cluster
    eigvals: np.ndarray


def _top_cluster_basis(a, theta: float, link: float):
    w, v = np.linalg.eigh(herm_part_at(a, theta))
    m = 1
    while m < len(w) and w[-1] - w[-m - 1] <= link:
        m += 1
    return float(w[-1]), v[:, len(w) - m :], w


def top_gap_events(a, tol: ToleranceConfig = DEFAULT_TOL, grid_size: int = 1024):
    """Locate directions where the top two eigenvalues of Re(e^{-i theta}A) meet.

    Grid scan of the gap followed by golden-section refinement of each local
    minimum; a direction qualifies as an event only if the refined gap falls
    below split_tol * ||A||, which keeps merely-close eigenvalues (for example
    after a tiny arrowhead perturbation) from being mistaken for true
    multiplicity.
    """
    m = as_square_matrix(a)
    n = m.shape[0]
    if n == 1:
        return []
    scale = matrix_scale(m)
    split = tol.split_abs(scale)
    h, k = hermitian_parts(m)
    thetas = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    cos = np.cos(thetas)[:, None, None]
    sin = np.sin(thetas)[:, None, None]
    w = np.linalg.eigvalsh(cos * h[None] + sin * k[None])
    gaps = w[:, -1] - w[:, -2]

    degenerate = gaps < split
    if np.count_nonzero(degenerate) > 0.25 * grid_size:
        # globally multiple top eigenvalue (scalar-like or segment-like range)
        events = []
        for idx in range(0, grid_size, max(1, grid_size // 64)):
            t = thetas[idx]
            p, basis, ww = _top_cluster_basis(m, t, 4 * split + 4 * gaps[idx])
            events.append(TopEvent(theta=float(t), p=p, gap=float(gaps[idx]), basis=basis, eigvals=ww))
        return events

    step = TWO_PI / grid_size
    thresh = max(8 * scale * step, 64 * split)
    events = []
    seen = []

    def gap_at(t):
        ww = np.linalg.eigvalsh(herm_part_at(m, t))
        return ww[-1] - ww[-2]

    order = _local_minima(gaps)
    order = order[np.argsort(gaps[order])]
    for idx in order:
        if gaps[idx] > thresh:
            continue
        t0 = thetas[idx]
        t, g = _golden_min(gap_at, t0 - step, t0 + step, iters=90)
        if g > split:
            continue
        t = float(np.mod(t, TWO_PI))
        if any(min(abs(t - s), TWO_PI - abs(t - s)) < 4 * step for s in seen):
            continue
        seen.append(t)
        link = 8 * max(g, split)
        p, basis, ww = _top_cluster_basis(m, t, link)
        events.append(TopEvent(theta=t, p=p, gap=float(g), basis=basis, eigvals=ww))
    return events


# ---------------------------------------------------------------------------
# base polynomial
# ---------------------------------------------------------------------------


@dataclass
class BasePolynomial:
    """Real homogeneous form F(x:y:t) = det(xH + yK + tI) of degree n.

    coeffs[j, k] multiplies x^j y^k t^(n-j-k).
    """

    n: int
    coeffs: np.ndarray

    def evaluate(self, x, y, t):
        total = 0.0
        for j in range(self.n + 1):
            for k in range(self.n + 1 - j):
                c = self.coeffs[j, k]
                if c != 0.0:
                    total = total + c * x**j * y**k * t ** (self.n - j - k)
        return total

    def multiply(self, other: "BasePolynomial") -> "BasePolynomial":
        n = self.n + other.n
        out = np.zeros((n + 1, n + 1))
        for j in range(self.n + 1):
            for k in range(self.n + 1 - j):
                if self.coeffs[j, k] == 0.0:
                    continue
                out[j : j + other.n + 1, k : k + other.n + 1] += (
                    self.coeffs[j, k] * other.coeffs
                )
        return BasePolynomial(n=n, coeffs=out)


def base_polynomial(a, tol: ToleranceConfig = DEFAULT_TOL) -> BasePolynomial:
    """Coefficients of det(xH + yK + tI) by evaluation-interpolation.

    For each (x, y)-degree d the t^(n-d) coefficient is the d-th elementary
    symmetric function of the eigenvalues of xH + yK, a homogeneous trig
    polynomial of degree d recovered from d+1 sampled directions.
    """
    m = as_square_matrix(a)
    n = m.shape[0]
    h, k = hermitian_parts(m)
    coeffs = np.zeros((n + 1, n + 1))
    coeffs[0, 0] = 1.0  # t^n
    # sample enough angles for the highest degree, reuse for all of them
    s_count = n + 1
    phis = np.pi * (np.arange(s_count) + 0.31) / s_count
    esym = np.zeros((s_count, n + 1))
    for s, phi in enumerate(phis):
        w = np.linalg.eigvalsh(np.cos(phi) * h + np.sin(phi) * k)
        esym[s] = np.poly(-w)  # prod(t + mu) coefficients, index d -> e_d
    for d in range(1, n + 1):
        van = np.array(
            [
                [np.cos(phi) ** j * np.sin(phi) ** (d - j) for j in range(d + 1)]
                for phi in phis[: d + 1]
            ]
        )
        rhs = esym[: d + 1, d]
        sol = np.linalg.solve(van, rhs)
        for j in range(d + 1):
            coeffs[j, d - j] = sol[j]
    return BasePolynomial(n=n, coeffs=coeffs)


# ---------------------------------------------------------------------------
# boundary generating curve
# ---------------------------------------------------------------------------


@dataclass
class BoundaryCurve:
    thetas: np.ndarray
    points: np.ndarray  # (branches, samples) complex, branch 0 = lowest eigenvalue
    eigvals: np.ndarray
    on_boundary: np.ndarray  # boolean, same shape as points


def boundary_generating_curve(a, samples: int = 512, tol: ToleranceConfig = DEFAULT_TOL) -> BoundaryCurve:
    """Sample all eigenvector branches x_j(theta)* A x_j(theta).

    Branches are continued across eigenvalue crossings by maximal eigenvector
    overlap with the previous direction, so each row traces one smooth branch
    of the curve rather than the always-sorted eigenvalue ordering.
    """
    if samples < 8:
        raise ValueError("need at least 8 samples")
    m = as_square_matrix(a)
    n = m.shape[0]
    thetas = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    pts = np.zeros((n, samples), dtype=complex)
    vals = np.zeros((n, samples))
    onb = np.zeros((n, samples), dtype=bool)
    link = tol.cluster_abs(matrix_scale(m))
    prev = None
    for s, t in enumerate(thetas):
        w, v = np.linalg.eigh(herm_part_at(m, t))
        if prev is not None:
            overlap = np.abs(prev.conj().T @ v)
            order = np.full(n, -1)
            used = set()
            for _ in range(n):
                i, j = np.unravel_index(np.argmax(overlap), overlap.shape)
                order[i] = j
                used.add(j)
                overlap[i, :] = -1
                overlap[:, j] = -1
            w = w[order]
            v = v[:, order]
        for j in range(n):
            x = v[:, j]
            pts[j, s] = x.conj() @ m @ x
            vals[j, s] = w[j]
        top = np.max(w)
        onb[:, s] = w >= top - link
        prev = v
    return BoundaryCurve(thetas=thetas, points=pts, eigvals=vals, on_boundary=onb)


# ---------------------------------------------------------------------------
# seeds: flat portions and singular points of the boundary
# ---------------------------------------------------------------------------

FLAT_PORTION = "FlatPortion"
SINGULAR_POINT = "SingularPoint"


@dataclass
class Seed:
    kind: str
    theta: float
    segment: tuple  # (z_start, z_end); equal entries for a point
    witnesses: np.ndarray  # n x w orthonormal-ish columns mapping into the line

    @property
    def independent(self) -> bool:
        if self.witnesses.shape[1] < 2:
            return False
        s = np.linalg.svd(self.witnesses, compute_uv=False)
        return bool(s[-1] > 1e-6)


def _seed_from_event(a, ev: TopEvent, diameter: float) -> Seed:
    """Flat portion / multiply generated point carried by a top eigenspace."""
    basis = ev.basis
    comp = basis.conj().T @ a @ basis
    rot = np.exp(-1j * ev.theta) * comp
    im = (rot - rot.conj().T) / 2j
    w, v = np.linalg.eigh(im)
    z_lo = np.exp(1j * ev.theta) * (ev.p + 1j * w[0])
    z_hi = np.exp(1j * ev.theta) * (ev.p + 1j * w[-1])
    length = abs(z_hi - z_lo)
    kind = FLAT_PORTION if length > 1e-6 * max(diameter, 1e-12) else SINGULAR_POINT
    witnesses = basis @ v[:, [0, -1]] if basis.shape[1] >= 2 else basis
    return Seed(kind=kind, theta=ev.theta, segment=(complex(z_lo), complex(z_hi)), witnesses=witnesses)


def detect_seeds(a, tol: ToleranceConfig = DEFAULT_TOL, grid_size: int = 1024) -> list:
    """Find flat portions and singular points of the boundary.

    Two detectors: (i) directions where the top eigenvalue of the rotated
    Hermitian part is genuinely multiple (exceptional supporting lines), and
    (ii) clusters of boundary contact points that stay put while the
    direction sweeps (corners / branch crossings on the boundary).
    """
    m = as_square_matrix(a)
    n = m.shape[0]
    sf = SupportFunction(m, grid_size=grid_size)
    diam = sf.diameter()
    seeds = []

    events = top_gap_events(m, tol=tol, grid_size=grid_size)
    if len(events) > n * (n - 1) + 2:
        # globally degenerate top eigenspace: the whole range is a point or a
        # segment; report a single exceptional line rather than a grid of them
        events = events[:1]
    for ev in events:
        if ev.basis.shape[1] >= 2:
            seeds.append(_seed_from_event(m, ev, diam))

    # corner / crossing detector on the top branch
    cos = np.cos(sf.thetas)[:, None, None]
    sin = np.sin(sf.thetas)[:, None, None]
    w, v = np.linalg.eigh(cos * sf.h[None] + sin * sf.k[None])
    top_vecs = v[:, :, -1]
    pts = np.einsum("si,ij,sj->s", top_vecs.conj(), m, top_vecs)
    close = 1e-6 * max(diam, 1e-12)
    used = np.zeros(len(pts), dtype=bool)
    for s in range(len(pts)):
        if used[s]:
            continue
        group = np.nonzero(np.abs(pts - pts[s]) < close)[0]
        if len(group) < 3:
            continue
        spread = np.ptp(sf.thetas[group])
        if spread < 1e-3:
            continue
        used[group] = True
        vecs = top_vecs[group].T  # n x g
        # orthonormalize the span of the generating vectors
        q, r = np.linalg.qr(vecs)
        rank = int(np.sum(np.abs(np.diag(r)) > 1e-6 * max(np.abs(np.diag(r)).max(), 1e-300)))
        witnesses = q[:, :rank]
        z0 = complex(np.mean(pts[group]))
        theta0 = float(sf.thetas[group[len(group) // 2]])
        dup = any(
            sd.kind == SINGULAR_POINT and abs(complex(np.mean(sd.segment)) - z0) < 4 * close
            for sd in seeds
        )
        if not dup:
            seeds.append(
                Seed(kind=SINGULAR_POINT, theta=theta0, segment=(z0, z0), witnesses=witnesses)
            )
    return seeds


# ---------------------------------------------------------------------------
# relative boundary count for blocks of a direct sum
# ---------------------------------------------------------------------------


def _is_normal(b, tol: ToleranceConfig) -> bool:
    b = as_square_matrix(b)
    s = matrix_scale(b)
    return np.linalg.norm(b @ b.conj().T - b.conj().T @ b) <= tol.eq_abs(s * s) * b.shape[0]


def kprime_relative(block, ambient_support: SupportFunction, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Max count of orthonormal vectors of the block whose images lie on the
    ambient boundary (the block's share in a direct-sum decomposition).

    Normal blocks contribute every eigenvalue (with multiplicity) sitting on
    the ambient boundary.  A non-normal 2x2 block contributes 2 when an
    antipodal pair of its elliptical boundary touches the ambient boundary
    (orthonormal pairs of C^2 map to center-symmetric point pairs), 1 when the
    ellipse merely touches it, 0 otherwise.
    """
    b = as_square_matrix(block)
    n = b.shape[0]
    btol = tol.boundary_abs(ambient_support.diameter())
    if n == 1 or _is_normal(b, tol):
        w = np.linalg.eigvals(b)
        return int(sum(1 for z in w if point_boundary_defect(ambient_support, z) < btol))
    if n == 2:
        own = SupportFunction(b, grid_size=max(256, ambient_support.grid_size // 2))
        grid = own.thetas
        amb = ambient_support(grid)
        g = amb - own.grid_values
        half = len(grid) // 2
        pair = np.maximum(g[:half], g[half : 2 * half])
        step = TWO_PI / len(grid)

        def gap_fn(t):
            return ambient_support(float(t)) - own(float(t))

        def pair_fn(t):
            return max(gap_fn(t), gap_fn(t + np.pi))

        best_pair = np.inf
        idxs = _local_minima(pair)
        for idx in idxs[np.argsort(pair[idxs])][:6]:
            t, val = _golden_min(pair_fn, grid[idx] - step, grid[idx] + step)
            best_pair = min(best_pair, val)
        if best_pair < btol:
            return 2
        best_single = np.inf
        idxs = _local_minima(g)
        for idx in idxs[np.argsort(g[idxs])][:6]:
            t, val = _golden_min(gap_fn, grid[idx] - step, grid[idx] + step)
            best_single = min(best_single, val)
        return 1 if best_single < btol else 0
    raise UnsupportedBlockError(
        f"relative count for a non-normal {n}x{n} block needs the restricted search"
    )


# ---------------------------------------------------------------------------
# dichotomy defect scan (dense matrices)
# ---------------------------------------------------------------------------


def dichotomy_defect(w: np.ndarray):
    """Best two-cluster defect of an ascending eigenvalue list.

    Returns (defect, h0, h1): the split minimizing the larger within-cluster
    spread, with h0/h1 the cluster means.
    """
    n = len(w)
    best = (np.inf, float(w[0]), float(w[-1]))
    for s in range(1, n):
        d = max(w[s - 1] - w[0], w[-1] - w[s])
        gap = w[s] - w[s - 1]
        if gap <= 2 * d:
            continue
        if d < best[0]:
            best = (float(d), float(np.mean(w[:s])), float(np.mean(w[s:])))
    return best


def dichotomy_scan(a, tol: ToleranceConfig = DEFAULT_TOL, grid_size: int = 720):
    """Search for a direction where Re(e^{-i theta} A) has exactly two
    distinct eigenvalues.

    Returns (theta, h0, h1, P) with P the induced idempotent, or None.  The
    scan covers [0, pi) (the defect is invariant under theta -> theta + pi)
    with golden-section refinement of the best grid minima.
    """
    m = as_square_matrix(a)
    n = m.shape[0]
    if n < 2:
        return None
    scale = matrix_scale(m)
    accept = tol.eq_abs(scale)
    h, k = hermitian_parts(m)
    thetas = np.linspace(0.0, np.pi, grid_size, endpoint=False)
    cos = np.cos(thetas)[:, None, None]
    sin = np.sin(thetas)[:, None, None]
    w = np.linalg.eigvalsh(cos * h[None] + sin * k[None])
    defects = np.array([dichotomy_defect(w[s])[0] for s in range(grid_size)])

    def defect_at(t):
        ww = np.linalg.eigvalsh(herm_part_at(m, t))
        return dichotomy_defect(ww)[0]

    step = np.pi / grid_size
    idxs = _local_minima(defects)
    idxs = idxs[np.argsort(defects[idxs])][:5]
    best = (np.inf, None)
    for idx in idxs:
        t0 = thetas[idx]
        t, val = _golden_min(defect_at, t0 - step, t0 + step, iters=90)
        if val < best[0]:
            best = (val, float(np.mod(t, np.pi)))
    if best[1] is None or best[0] > accept:
        return None
    theta = best[1]
    ww = np.linalg.eigvalsh(herm_part_at(m, theta))
    defect, h0, h1 = dichotomy_defect(ww)
    if defect > accept or abs(h1 - h0) <= 4 * accept:
        return None
    proj = (herm_part_at(m, theta) - h0 * np.eye(n)) / (h1 - h0)
    if np.linalg.norm(proj @ proj - proj) > 1e-5 * n:
        return None
    return theta, h0, h1, proj

"""Minimax subspace fitting: linear widths and N-subspace (nonlinear) widths.

Upper bounds come from seeded heuristics (spectral initialization plus a
softmax-reweighted minimax refinement; alternating fit/assign for subspace
families), lower bounds from the mean-square spectral argument
d_n >= sqrt(sum_{j>n} s_j^2 / m).  Tiny instances get exact paths: rank
reduction, a candidate-exact minimax line in the plane, and full assignment
enumeration for families.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .spaces import Bracket, CompactSetModel, NormSpec, sigma_value, sup_norm

__all__ = [
    "SubspaceFamily",
    "WidthResult",
    "dist_to_subspace",
    "linear_width",
    "nonlinear_width",
    "ksigma_nonlinear_width_upper",
]

NONLINEAR_GUARD = 10_000
ENUM_POINT_LIMIT = 9
ENUM_FAMILY_LIMIT = 3


@dataclass(frozen=True)
class SubspaceFamily:
    """N subspaces given by orthonormal-column bases plus a point assignment."""

    bases: tuple[np.ndarray, ...]
    assignment: np.ndarray
    achieved: float

    def validate(self, K: CompactSetModel, tol: float = 1e-10) -> bool:
        for V in self.bases:
            if V.shape[1] and np.max(np.abs(V.T @ V - np.eye(V.shape[1]))) > tol:
                return False
        cloud = K.as_cloud()
        worst = 0.0
        for i, p in enumerate(cloud.points):
            worst = max(worst, dist_to_subspace(p, self.bases[self.assignment[i]], cloud.norm))
        return abs(worst - self.achieved) <= tol * max(1.0, self.achieved)


@dataclass(frozen=True)
class WidthResult:
    bracket: Bracket
    witness: SubspaceFamily
    restarts_used: int


# ---------------------------------------------------------------------------
# distances


def _check_frame(V: np.ndarray, tol: float = 1e-10):
    if V.ndim != 2:
        raise ValueError("basis must be a 2-d array (columns = frame vectors)")
    if V.shape[1] == 0:
        return
    if np.max(np.abs(V.T @ V - np.eye(V.shape[1]))) > tol:
        raise ValueError("non-orthonormal frame")


def _euclid_dists(P: np.ndarray, V: np.ndarray) -> np.ndarray:
    # residual form: stable down to ~1e-16 relative when P lies in the span
    if V.shape[1] == 0:
        return np.linalg.norm(P, axis=1)
    R = P - (P @ V) @ V.T
    return np.linalg.norm(R, axis=1)


def _pnorm_dist(f: np.ndarray, V: np.ndarray, space: NormSpec, tol: float = 1e-10) -> float:
    """Convex minimization of ||f - V c||_p over c by coordinate descent."""
    if V.shape[1] == 0:
        return float(space.norm(f))
    n = V.shape[1]
    radius = 2.0 * math.sqrt(max(n, 1)) * float(np.linalg.norm(f)) + 1.0

    def value(c):
        return float(space.norm(f - V @ c))

    best_c, best_v = None, math.inf
    starts = [np.zeros(n), V.T @ f]
    for c0 in starts:
        c = c0.astype(float).copy()
        v = value(c)
        for _ in range(60):
            improved = 0.0
            for k in range(n):
                a, b = c[k] - radius, c[k] + radius
                for _ in range(70):
                    m1 = a + (b - a) / 3
                    m2 = b - (b - a) / 3
                    c[k] = m1
                    f1 = value(c)
                    c[k] = m2
                    f2 = value(c)
                    if f1 <= f2:
                        b = m2
                    else:
                        a = m1
                c[k] = 0.5 * (a + b)
                radius_k = value(c)
                if radius_k < v - 1e-15:
                    improved += v - radius_k
                    v = radius_k
            if improved < tol:
                break
        if v < best_v:
            best_v, best_c = v, c
    return best_v


def dist_to_subspace(f: np.ndarray, basis: np.ndarray, space: NormSpec) -> float:
    """Distance from f to the column span of an orthonormal frame."""
    f = np.asarray(f, dtype=float)
    basis = np.asarray(basis, dtype=float)
    _check_frame(basis)
    if space.is_euclidean:
        return float(_euclid_dists(f[None, :], basis)[0])
    return _pnorm_dist(f, basis, space)


def _dists(P: np.ndarray, V: np.ndarray, space: NormSpec) -> np.ndarray:
    if space.is_euclidean:
        return _euclid_dists(P, V)
    return np.array([_pnorm_dist(p, V, space) for p in P])


# ---------------------------------------------------------------------------
# minimax refinement (euclidean)


def _orthonormal_extend(V: np.ndarray, n: int) -> np.ndarray:
    """Pad an orthonormal frame with extra orthonormal columns up to n."""
    d = V.shape[0]
    if V.shape[1] >= n:
        return V[:, :n]
    Q, _ = np.linalg.qr(np.hstack([V, np.eye(d)]))
    return Q[:, :n]


def _minimax_refine(P: np.ndarray, n: int, V0: np.ndarray, sweeps: int = 50) -> tuple[np.ndarray, float]:
    """Softmax-weighted covariance reweighting with an annealed temperature.

    Weights w_i grow with the current distance, so the fitted eigenspace
    drifts toward the worst-approximated points; the temperature multiplies
    by 0.7 each sweep starting from the initial maximal distance.
    """
    V = V0
    dists = _euclid_dists(P, V)
    best_V, best_val = V, float(dists.max())
    tau = best_val
    if tau <= 0:
        return best_V, best_val
    for _ in range(sweeps):
        z = (dists - dists.max()) / max(tau, 1e-300)
        # quantizing the exponents keeps the candidate sequence identical
        # under exact rescalings of the input (dilation equivariance)
        z = np.floor(np.maximum(z, -60.0) * 65536.0) / 65536.0
        w = np.exp(z)
        w /= w.sum()
        C = (P * w[:, None]).T @ P
        _, vecs = np.linalg.eigh(C)
        V = vecs[:, ::-1][:, :n]
        dists = _euclid_dists(P, V)
        val = float(dists.max())
        if val < best_val:
            best_V, best_val = V, val
        tau *= 0.7
    return best_V, best_val


def _line_candidates_2d(P: np.ndarray) -> np.ndarray:
    """Candidate directions for the exact minimax line in the plane:
    crossings of pairs ((u.x_i)^2 = (u.x_j)^2) and stationary directions.
    """
    dirs = [P]
    m = len(P)
    diffs, sums = [], []
    for i in range(m):
        for j in range(i + 1, m):
            diffs.append(P[i] - P[j])
            sums.append(P[i] + P[j])
    for w in diffs + sums:
        dirs.append(np.array([[-w[1], w[0]]]))
    U = np.vstack(dirs)
    norms = np.linalg.norm(U, axis=1)
    U = U[norms > 1e-14] / norms[norms > 1e-14][:, None]
    return U


def _exact_line_2d(P: np.ndarray, grid: int = 100_000) -> tuple[np.ndarray, float]:
    """Exact minimax line for points in R^2: angle grid + golden polish,
    with the finite candidate set evaluated as well."""
    sq = np.einsum("ij,ij->i", P, P)

    def val_of(U):  # U: (k, 2) unit directions
        proj = P @ U.T
        return np.sqrt(np.maximum(sq[:, None] - proj**2, 0.0)).max(axis=0)

    thetas = np.linspace(0.0, math.pi, grid, endpoint=False)
    U = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    vals = val_of(U)
    k = int(np.argmin(vals))
    lo, hi = thetas[k] - math.pi / grid, thetas[k] + math.pi / grid

    phi = (math.sqrt(5) - 1) / 2

    def f(theta):
        return float(val_of(np.array([[math.cos(theta), math.sin(theta)]]))[0])

    a, b = lo, hi
    c1, c2 = b - phi * (b - a), a + phi * (b - a)
    f1, f2 = f(c1), f(c2)
    for _ in range(80):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi * (b - a)
            f1 = f(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (b - a)
            f2 = f(c2)
    best_theta = c1 if f1 <= f2 else c2
    best_val = min(f1, f2)

    cands = _line_candidates_2d(P)
    cvals = val_of(cands)
    kc = int(np.argmin(cvals))
    if cvals[kc] < best_val:
        best_val = float(cvals[kc])
        u = cands[kc]
    else:
        u = np.array([math.cos(best_theta), math.sin(best_theta)])
    return u[:, None], float(best_val)


# ---------------------------------------------------------------------------
# single-subspace fits (shared by linear width and family clustering)


def _subset_seed(seed: int, idx_key: tuple[int, ...]) -> int:
    return zlib.crc32(np.asarray(idx_key, dtype=np.int64).tobytes()) ^ (seed & 0xFFFFFFFF)


_SNAP = 2.0**35


def _fit_subspace(
    P: np.ndarray,
    n: int,
    seed: int,
    restarts: int,
    sweeps: int = 50,
    line_grid: int = 4096,
) -> tuple[np.ndarray, float, bool]:
    """Best-effort minimax subspace for P; returns (basis, value, exact_flag).

    The search runs on a canonical representative of the dilation class:
    points divided by the largest norm and snapped to a 2^-35 grid.  Exactly
    rescaled inputs therefore produce bitwise-identical witnesses, and the
    returned value is re-evaluated on the original points so the upper bound
    stays sound.
    """
    m, d = P.shape
    scale = float(np.max(np.linalg.norm(P, axis=1)))
    if scale <= 0.0:
        return _orthonormal_extend(np.zeros((d, 0)), n), 0.0, True
    C = np.round((P / scale) * _SNAP) / _SNAP

    U_, S, Vt = np.linalg.svd(C, full_matrices=False)
    rank = int(np.sum(S > max(1e-13, (S[0] if len(S) else 0.0) * 1e-12)))
    if n >= rank:
        V = _orthonormal_extend(Vt[:rank].T, n)
        exact = True
        snap_val = 0.0
    else:
        # work inside the row space: the optimal subspace can be taken there
        B = Vt[:rank].T  # d x rank
        Q = C @ B  # m x rank coordinates
        if n == 1 and rank == 2:
            u, snap_val = _exact_line_2d(Q, grid=line_grid)
            V, exact = B @ u, True
        else:
            V0 = np.eye(rank)[:, :n]
            best_V, best_val = _minimax_refine(Q, n, V0, sweeps)
            for r in range(restarts):
                rng = np.random.default_rng([_subset_seed(seed, (m, rank, n)), r])
                G = rng.normal(size=(rank, n))
                Vr, _ = np.linalg.qr(G)
                Vc, val = _minimax_refine(Q, n, Vr[:, :n], sweeps)
                if val < best_val:
                    best_V, best_val = Vc, val
            V, snap_val, exact = B @ best_V, best_val, False
    val = float(_euclid_dists(P, V).max())
    if exact and abs(val - scale * snap_val) > 1e-10 * max(1.0, val):
        exact = False
    return V, val, exact


def linear_width(
    K: CompactSetModel,
    n: int,
    seed: int = 0,
    restarts: int = 32,
) -> WidthResult:
    """Bracket on the n-dimensional minimax subspace-fitting error.

    Euclidean clouds get both sides (spectral lower, heuristic upper, exact
    paths for n=0, n>=rank, and the planar line); other norms report an
    upper bound only.
    """
    cloud = K.as_cloud()
    P = cloud.points
    m, d = P.shape
    if n > d:
        raise ValueError(f"n={n} exceeds ambient dimension {d}")
    if n < 0:
        raise ValueError("n must be >= 0")

    euclid = cloud.norm.is_euclidean
    if n == 0:
        v = sup_norm(cloud)
        fam = SubspaceFamily((np.zeros((d, 0)),), np.zeros(m, dtype=int), v)
        return WidthResult(Bracket.exactly(v, "sup-norm"), fam, 0)

    S = np.linalg.svd(P, compute_uv=False)
    tail = S[n:] if n < len(S) else np.zeros(0)
    spectral = math.sqrt(float(np.sum(tail**2)) / m) if euclid else 0.0

    V, val, exact = _fit_subspace(P, n, seed, restarts, line_grid=100_000)
    if not euclid:
        vals = _dists(P, V, cloud.norm)
        val = float(vals.max())
        fam = SubspaceFamily((V,), np.zeros(m, dtype=int), val)
        return WidthResult(
            Bracket(0.0, val, exact=False, lower_method="none-pnorm",
                    upper_method="euclid-fit-evaluated"),
            fam, restarts,
        )

    fam = SubspaceFamily((V,), np.zeros(m, dtype=int), val)
    if exact:
        lower = max(spectral, val - 1e-10 * max(1.0, val))
        br = Bracket(min(lower, val), val, exact=True,
                     lower_method="exact-path", upper_method="exact-path")
    else:
        br = Bracket(min(spectral, val), val, exact=False,
                     lower_method="spectral-mean-square", upper_method="minimax-refine")
    return WidthResult(br, fam, restarts)


# ---------------------------------------------------------------------------
# nonlinear (N-subspace) widths


class _ClusterCache:
    def __init__(self, P: np.ndarray, n: int, seed: int, restarts: int = 2, sweeps: int = 20):
        self.P = P
        self.n = n
        self.seed = seed
        self.restarts = restarts
        self.sweeps = sweeps
        self.store: dict[tuple[int, ...], tuple[np.ndarray, float, bool]] = {}

    def fit(self, idx: tuple[int, ...]) -> tuple[np.ndarray, float, bool]:
        if idx not in self.store:
            self.store[idx] = _fit_subspace(
                self.P[list(idx)], self.n, _subset_seed(self.seed, idx),
                self.restarts, self.sweeps,
            )
        return self.store[idx]


def _family_value(cache: _ClusterCache, assign: np.ndarray, N: int):
    """Fit every cluster of an assignment; returns (bases, per-point dists)."""
    d = cache.P.shape[1]
    bases = []
    exact_all = True
    for c in range(N):
        idx = tuple(np.flatnonzero(assign == c))
        if not idx:
            bases.append(np.zeros((d, cache.n)))
            continue
        V, _, ex = cache.fit(idx)
        exact_all &= ex
        bases.append(V)
    dists = np.stack([_euclid_dists(cache.P, V) for V in bases], axis=1)
    per_point = dists[np.arange(len(assign)), assign]
    return bases, dists, per_point, exact_all


def _single_move_descent(cache: _ClusterCache, assign0: np.ndarray, N: int, max_steps: int = 200):
    """First-improvement descent over single point moves, evaluating the
    refit value.

    Unlike nearest-subspace reassignment, a move is accepted only when the
    full fit/evaluate cycle lowers the family objective, so this escapes the
    non-monotone alternation fixed points on small instances.  The move
    order (point index, then cluster index) is fixed, keeping the descent
    deterministic.
    """
    assign = assign0.copy()
    _, _, per_point, _ = _family_value(cache, assign, N)
    val = float(per_point.max())
    m = len(assign)
    for _ in range(max_steps):
        accepted = False
        for i in range(m):
            for c in range(N):
                if c == assign[i]:
                    continue
                trial = assign.copy()
                trial[i] = c
                _, _, pp, _ = _family_value(cache, trial, N)
                v = float(pp.max())
                if v < val - 1e-15:
                    assign, val = trial, v
                    accepted = True
                    break
            if accepted:
                break
        if not accepted:
            break
    return val, assign


def _alternate(cache: _ClusterCache, assign0: np.ndarray, N: int, max_iter: int = 40):
    assign = assign0.copy()
    best = None  # (value, bases, assign)
    for _ in range(max_iter):
        bases, dists, per_point, _ = _family_value(cache, assign, N)
        val = float(per_point.max())
        if best is None or val < best[0]:
            best = (val, bases, assign.copy())
        new_assign = np.argmin(dists, axis=1)  # argmin ties to the lowest index
        # re-seed empty clusters with the currently worst point
        for c in range(N):
            if not np.any(new_assign == c):
                cur = dists[np.arange(len(new_assign)), new_assign]
                order = np.lexsort((np.arange(len(cur)), -cur))
                for cand in order:
                    donor = new_assign[cand]
                    if np.sum(new_assign == donor) > 1:
                        new_assign[cand] = c
                        break
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    return best


def nonlinear_width(
    K: CompactSetModel,
    n: int,
    N: int,
    seed: int = 0,
    restarts: int = 32,
    force_heuristic: bool = False,
) -> WidthResult:
    """Bracket on the minimax error over families of N n-dimensional subspaces
    with per-point subspace choice.

    Upper bound: alternating cluster-fit / reassignment from seeded starts
    (exact assignment enumeration on tiny instances); lower bound: the
    spectral bound at dimension n*N, since one nN-dimensional space contains
    any N-family.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1 (use linear_width for n = 0)")
    if n * N > NONLINEAR_GUARD:
        raise ValueError(f"n*N exceeds the solver guard {NONLINEAR_GUARD}")
    if N == 1:
        return linear_width(K, n, seed=seed, restarts=restarts)

    cloud = K.as_cloud()
    P = cloud.points
    m, d = P.shape
    if n > d:
        raise ValueError(f"n={n} exceeds ambient dimension {d}")
    euclid = cloud.norm.is_euclidean
    if not euclid:
        raise ValueError("nonlinear_width requires a euclidean cloud")

    S = np.linalg.svd(P, compute_uv=False)
    k = n * N
    tail = S[k:] if k < len(S) else np.zeros(0)
    lower = math.sqrt(float(np.sum(tail**2)) / m)

    cache = _ClusterCache(P, n, seed)

    if m <= N:
        assign = np.arange(m, dtype=int)
        bases, dists, per_point, _ = _family_value(cache, assign, N)
        bases = [
            V if np.any(np.abs(V) > 0) else _orthonormal_extend(np.zeros((d, 0)), n)
            for V in bases
        ]
        fam = SubspaceFamily(tuple(bases), assign, float(per_point.max()))
        return WidthResult(
            Bracket(0.0, fam.achieved, exact=fam.achieved <= 1e-12,
                    lower_method="spectral-nN", upper_method="per-point-span"),
            fam, 0,
        )

    best = None
    restarts_used = 0
    if m <= ENUM_POINT_LIMIT and N <= ENUM_FAMILY_LIMIT and not force_heuristic:
        # exact assignment enumeration with cached cluster fits
        values = {}

        def cluster_val(idx: tuple[int, ...]) -> float:
            if idx not in values:
                values[idx] = cache.fit(idx)[1]
            return values[idx]

        best_assign, best_val = None, math.inf
        for code in range(N**m):
            a, rem = [], code
            for _ in range(m):
                a.append(rem % N)
                rem //= N
            assign = np.array(a, dtype=int)
            val = 0.0
            ok = True
            for c in range(N):
                idx = tuple(np.flatnonzero(assign == c))
                if idx:
                    val = max(val, cluster_val(idx))
                if val >= best_val:
                    ok = False
                    break
            if ok and val < best_val:
                best_val, best_assign = val, assign
        bases, dists, per_point, exact_all = _family_value(cache, best_assign, N)
        best = (float(per_point.max()), bases, best_assign)
        method = "assignment-enumeration" + ("-exact" if exact_all else "")
    else:
        starts: list[np.ndarray] = [np.zeros(m, dtype=int)]
        norms = np.linalg.norm(P, axis=1)
        order = np.lexsort((np.arange(m), -norms))
        rr = np.empty(m, dtype=int)
        rr[order] = np.arange(m) % N
        starts.append(rr)
        for r in range(restarts):
            rng = np.random.default_rng([seed & 0xFFFFFFFF, r])
            starts.append(rng.integers(0, N, size=m))
        results = []
        for a0 in starts:
            cand = _alternate(cache, np.asarray(a0, dtype=int), N)
            restarts_used += 1
            results.append(cand)
            if best is None or cand[0] < best[0]:
                best = cand
        method = "k-subspaces-alternation"
        if m * N <= 80:
            # polish the leading alternation candidates by exact-move descent
            results.sort(key=lambda t: t[0])
            seen: set[tuple[int, ...]] = set()
            for cand in results:
                key = tuple(cand[2])
                if key in seen:
                    continue
                seen.add(key)
                if len(seen) > 4:
                    break
                v, a = _single_move_descent(cache, cand[2], N)
                if v < best[0]:
                    bases, _, pp, _ = _family_value(cache, a, N)
                    best = (float(pp.max()), bases, a)
            method += "+move-descent"

    val, bases, assign = best
    # unused clusters carry a placeholder zero basis; swap in a legal frame
    bases = [
        V if np.any(np.abs(V) > 0) else _orthonormal_extend(np.zeros((d, 0)), n)
        for V in bases
    ]
    dists = np.stack([_euclid_dists(P, V) for V in bases], axis=1)
    val = float(dists[np.arange(m), assign].max())
    fam = SubspaceFamily(tuple(bases), assign, val)
    br = Bracket(min(lower, val), val, exact=False,
                 lower_method="spectral-nN", upper_method=method)
    return WidthResult(br, fam, restarts_used)


def ksigma_nonlinear_width_upper(alpha: float, n: int, N: int) -> float:
    """Closed-form width bound s_{nN+1} for the coordinate sequence family
    (coordinate-block subspaces capture the first nN elements and 0)."""
    if n < 1 or N < 1:
        raise ValueError("n and N must be >= 1")
    return sigma_value(alpha, float(n) * float(N) + 1.0)

import itertools
import math

import numpy as np
import pytest

from widthlab.spaces import CompactSetModel, NormSpec, scale_set, sigma_value
from widthlab.widths import (
    dist_to_subspace,
    ksigma_nonlinear_width_upper,
    linear_width,
    nonlinear_width,
)


def angle_grid_width(pts, grid=20_001, zooms=4):
    """Brute-force minimax line fit in the plane (nested grid refinement)."""
    pts = np.asarray(pts, dtype=float)
    sq = np.einsum("ij,ij->i", pts, pts)

    def sweep(th):
        U = np.stack([np.cos(th), np.sin(th)], axis=1)
        proj = pts @ U.T
        vals = np.sqrt(np.maximum(sq[:, None] - proj**2, 0)).max(axis=0)
        k = int(np.argmin(vals))
        return th[k], float(vals[k])

    th = np.linspace(0, math.pi, grid)
    center, best = sweep(th)
    width = math.pi / (grid - 1)
    for _ in range(zooms):
        th = np.linspace(center - width, center + width, grid)
        center, best = sweep(th)
        width *= 2.5 / (grid - 1)
    return best


E12 = CompactSetModel.cloud([[1.0, 0.0], [0.0, 1.0]])
E123 = CompactSetModel.cloud(np.eye(3))


def test_dist_examples():
    e2 = NormSpec("euclidean", 2)
    assert dist_to_subspace([1, 0], np.array([[1.0], [0.0]]), e2) == pytest.approx(0, abs=1e-12)
    diag = np.array([[1.0], [1.0]]) / math.sqrt(2)
    assert dist_to_subspace([1, 0], diag, e2) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    e3 = NormSpec("euclidean", 3)
    span12 = np.eye(3)[:, :2]
    assert dist_to_subspace([0, 0, 1], span12, e3) == pytest.approx(1.0, abs=1e-12)


def test_dist_rejects_bad_frame():
    with pytest.raises(ValueError):
        dist_to_subspace([1, 0], np.array([[1.0], [1.0]]), NormSpec("euclidean", 2))


def test_dist_pnorm_never_beats_zero_start():
    rng = np.random.default_rng(1)
    space = NormSpec("max", 3)
    for _ in range(10):
        f = rng.normal(size=3)
        V, _ = np.linalg.qr(rng.normal(size=(3, 2)))
        dv = dist_to_subspace(f, V[:, :2], space)
        assert dv <= space.norm(f) + 1e-12


def test_linear_width_examples():
    res = linear_width(E12, 1)
    assert res.bracket.exact
    assert res.bracket.upper == pytest.approx(math.sqrt(0.5), abs=1e-6)
    assert res.bracket.upper == pytest.approx(angle_grid_width(E12.points), abs=1e-6)
    assert linear_width(E12, 2).bracket.upper == pytest.approx(0.0, abs=1e-12)
    assert linear_width(E12, 0).bracket.upper == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        linear_width(E12, 3)


def test_linear_width_vs_angle_grid_random():
    rng = np.random.default_rng(8)
    for _ in range(6):
        pts = rng.normal(size=(rng.integers(3, 12), 2))
        K = CompactSetModel.cloud(pts)
        res = linear_width(K, 1)
        assert res.bracket.upper == pytest.approx(angle_grid_width(pts), abs=1e-6)
        assert res.bracket.lower <= res.bracket.upper + 1e-12


def test_linear_width_witness_consistent():
    rng = np.random.default_rng(2)
    K = CompactSetModel.cloud(rng.normal(size=(15, 4)))
    res = linear_width(K, 2)
    assert res.witness.validate(K)
    assert res.witness.achieved == pytest.approx(res.bracket.upper, abs=1e-10)


def test_linear_width_monotone_bracket_consistent():
    rng = np.random.default_rng(4)
    K = CompactSetModel.cloud(rng.normal(size=(20, 5)))
    prev = None
    for n in range(0, 6):
        br = linear_width(K, n).bracket
        if prev is not None:
            assert br.lower <= prev.upper + 1e-9
        prev = br


def test_nonlinear_trivial_and_delegation():
    assert nonlinear_width(E12, 1, 2).bracket.upper == pytest.approx(0.0, abs=1e-12)
    lw = linear_width(E123, 1, seed=3)
    nw = nonlinear_width(E123, 1, 1, seed=3)
    assert nw.bracket.upper == pytest.approx(lw.bracket.upper, abs=1e-12)
    assert nw.bracket.lower == pytest.approx(lw.bracket.lower, abs=1e-12)


def test_nonlinear_three_points():
    res = nonlinear_width(E123, 1, 2)
    assert res.bracket.upper == pytest.approx(math.sqrt(0.5), abs=1e-6)
    assert res.witness.validate(E123)


def test_nonlinear_heuristic_matches_enumeration_small():
    rng = np.random.default_rng(10)
    for trial in range(8):
        pts = rng.normal(size=(6, 3))
        K = CompactSetModel.cloud(pts)
        exact = nonlinear_width(K, 1, 2, seed=trial)
        heur = nonlinear_width(K, 1, 2, seed=trial, force_heuristic=True)
        assert heur.bracket.upper <= exact.bracket.upper + 1e-8
        assert exact.bracket.upper <= heur.bracket.upper + 1e-8


def test_nonlinear_sandwich_with_linear():
    rng = np.random.default_rng(12)
    K = CompactSetModel.cloud(rng.normal(size=(14, 4)))
    n, N = 1, 3
    nl = nonlinear_width(K, n, N, seed=5)
    lw_n = linear_width(K, n, seed=5)
    lw_nN = linear_width(K, min(n * N, 4), seed=5)
    assert nl.bracket.lower >= lw_nN.bracket.lower - 1e-12
    assert nl.bracket.upper <= lw_n.bracket.upper + 1e-8


def test_width_guard():
    with pytest.raises(ValueError):
        nonlinear_width(E12, 2, 50_001)


def test_homogeneity_linear():
    rng = np.random.default_rng(21)
    K = CompactSetModel.cloud(rng.normal(size=(12, 3)))
    base = linear_width(K, 2, seed=9)
    for t in (0.5, 2.0, -3.0):
        res = linear_width(scale_set(K, t), 2, seed=9)
        assert res.bracket.upper == pytest.approx(abs(t) * base.bracket.upper, rel=1e-9)
        assert res.bracket.lower == pytest.approx(abs(t) * base.bracket.lower, rel=1e-9)


def test_homogeneity_nonlinear():
    rng = np.random.default_rng(22)
    K = CompactSetModel.cloud(rng.normal(size=(10, 3)))
    base = nonlinear_width(K, 1, 2, seed=4)
    for t in (0.5, 2.0, -3.0):
        res = nonlinear_width(scale_set(K, t), 1, 2, seed=4)
        assert res.bracket.upper == pytest.approx(abs(t) * base.bracket.upper, rel=1e-9)
        assert res.bracket.lower == pytest.approx(abs(t) * base.bracket.lower, rel=1e-9)


def test_ksigma_width_bound_values():
    assert ksigma_nonlinear_width_upper(1.0, 2, 3) == pytest.approx(
        sigma_value(1.0, 7), rel=1e-12
    )
    assert ksigma_nonlinear_width_upper(1.0, 1, 1) == pytest.approx(
        0.8228263240800893, abs=1e-12
    )
    assert ksigma_nonlinear_width_upper(1.0, 4, 3) == pytest.approx(0.5, abs=1e-12)


def test_ksigma_nonlinear_numeric_below_closed_form():
    K = CompactSetModel.ksigma(1.0, truncation=17)
    res = nonlinear_width(K, 1, 4, seed=0)
    assert res.bracket.upper <= ksigma_nonlinear_width_upper(1.0, 1, 4) + 1e-8

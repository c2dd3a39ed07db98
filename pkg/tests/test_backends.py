import math

import numpy as np
import pytest

from riesz_lab import _purepy

_core = pytest.importorskip("riesz_lab._core")


@pytest.fixture(scope="module")
def cloud():
    rng = np.random.default_rng(8)
    return {1: rng.normal(size=(20, 1)), 2: rng.normal(size=(20, 2))}


@pytest.mark.parametrize("s,is_log", [(0.0, True), (0.5, False), (1.0, False)])
@pytest.mark.parametrize("d", [1, 2])
def test_energy_and_gradient_agree(cloud, s, is_log, d):
    pts = cloud[d]
    e_c = _core.pair_energy(pts, s, is_log)
    e_p = _purepy.pair_energy(pts, s, is_log)
    assert e_c == pytest.approx(e_p, rel=1e-12)
    g_c = _core.pair_gradient(pts, s, is_log)
    g_p = _purepy.pair_gradient(pts, s, is_log)
    assert np.allclose(g_c, g_p, rtol=1e-12, atol=1e-12)
    t_c = _core.total_energy(pts, s, is_log, 0.5)
    t_p = _purepy.total_energy(pts, s, is_log, 0.5)
    assert t_c == pytest.approx(t_p, rel=1e-12)


def test_coincident_points_infinite_both_lanes():
    pts = np.array([[0.1], [0.1], [0.5]])
    assert _core.pair_energy(pts, 0.0, True) == math.inf
    assert _purepy.pair_energy(pts, 0.0, True) == math.inf


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mh_block_same_decisions(seed):
    rng = np.random.default_rng(seed)
    n, m = 10, 3000
    start = rng.normal(size=(n, 1))
    sites = rng.integers(0, n, size=m)
    normals = rng.standard_normal((m, 1))
    uniforms = rng.random(m)
    p_c, p_p = start.copy(), start.copy()
    e0 = _core.total_energy(start, 0.0, True, 0.5)
    tr_c, acc_c = _core.mh_block(p_c, 0.0, True, 0.5, 2.0, 0.4,
                                 sites, normals, uniforms, e0)
    tr_p, acc_p = _purepy.mh_block(p_p, 0.0, True, 0.5, 2.0, 0.4,
                                   sites, normals, uniforms, e0)
    assert acc_c == acc_p
    assert np.array_equal(p_c, p_p)          # identical accept decisions
    assert np.allclose(tr_c, tr_p, atol=1e-9)


def test_mh_block_energy_increment_consistent():
    rng = np.random.default_rng(3)
    n, m = 8, 500
    pts = rng.normal(size=(n, 2))
    sites = rng.integers(0, n, size=m)
    normals = rng.standard_normal((m, 2))
    uniforms = rng.random(m)
    e0 = _core.total_energy(pts, 0.0, True, 1.0)
    trace, _ = _core.mh_block(pts, 0.0, True, 1.0, 1.5, 0.3,
                              sites, normals, uniforms, e0)
    full = _core.total_energy(pts, 0.0, True, 1.0)
    assert trace[-1] == pytest.approx(full, abs=1e-9 * (1 + abs(full)))

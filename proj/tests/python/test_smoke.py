"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import nssubdiv as ns


def test_cube_classification():
    cube = ns.make_cube()
    assert cube.n_vertices == 8
    assert cube.n_faces == 6
    cls = ns.classify_elements(cube)
    assert len(cls["extraordinary_vertices"]) == 8
    assert all(cls["vertex_valence"][v] == 3 for v in cls["extraordinary_vertices"])
    assert ns.validate_manifold(cube)["ok"]


def test_refinement_counts():
    cube = ns.make_cube()
    ds = ns.refine(cube, "ds")
    assert ds.n_vertices == 24
    assert ds.n_faces == 26
    cc = ns.refine(cube, "cc")
    assert cc.n_vertices == 26
    assert cc.n_faces == 24


def test_stationary_reduction_is_bitwise():
    torus = ns.make_torus_grid(6, 6)
    a = ns.refine(torus, "cc").vertices()
    b = ns.refine(torus, "exp-cc:theta=0").vertices()
    assert np.array_equal(a, b)


def test_masks_and_norms():
    ds = ns.regular_mask("ds")
    assert ds.shape == (4, 4)
    assert ns.operator_norm(ds) == pytest.approx(1.0, abs=1e-15)
    trig = ns.regular_mask("trig-ds:h=1", level=1)
    assert ns.mask_distance(trig, ds) > 0
    assert ns.has_smoothing_factor(trig)
    b = ns.divided_difference(ds, 0)
    assert b.shape == (3, 4)


def test_spectrum_gate():
    sp = ns.spectrum("ds", 5)
    assert sp["dominant_is_one"]
    assert sp["subdominant_double_nondefective"]
    assert 0.5 < sp["lambda1"] < 1.0


def test_decay_and_equivalence():
    fit = ns.decay_fit("trig-ds:h=1", 5)
    assert 3.8 <= fit["sigma"] <= 4.2
    est = ns.asymptotic_equivalence("exp-cc:theta=10i", order=1, k_max=40)
    assert est["verdict"] == "converged"


def test_limit_point_linearity():
    rng = np.random.default_rng(3)
    d1 = rng.uniform(-1, 1, size=(20, 3))
    a = np.array(ns.limit_point("trig-ds:h=1", 5, d1)["r_c"])
    b = np.array(ns.limit_point("trig-ds:h=1", 5, 2.0 * d1)["r_c"])
    assert np.max(np.abs(b - 2.0 * a)) < 1e-10


def test_verify_reports():
    conv = ns.verify_convergence("trig-ds:h=1", 5)
    assert conv["overall"] == "pass"
    g1 = ns.verify_normal_continuity("exp-cc:theta=3", 6)
    assert g1["overall"] == "pass"
    bad = ns.verify_normal_continuity("bad-ds", 5)
    assert bad["overall"] == "fail"


def test_characteristic_ring():
    rep = ns.characteristic_ring("cc", 5, depth=4)
    assert rep["pass"]
    assert rep["positive"] == 0 or rep["negative"] == 0


def test_pillow_limit_and_normal():
    mesh = ns.make_vertex_pillow(5, 6)
    cls = ns.classify_elements(mesh)
    pole = next(v for v in cls["extraordinary_vertices"] if cls["vertex_valence"][v] == 5)
    out = ns.limit_and_normal(mesh, "exp-cc:theta=3", pole, k_max=6, depth=4)
    thetas = out["normal"]["theta_max"]
    assert thetas[-1] < thetas[2]
    n_inf = np.array(out["normal"]["n_inf"])
    # The pillow is rotationally symmetric about z.
    assert abs(abs(n_inf[2]) - 1.0) < 1e-5


def test_basic_limit_function_partition():
    blf = ns.basic_limit_function("ds", start_level=1, depth=6)
    values = blf["values"]
    stride = 64
    acc = np.zeros((stride, stride))
    rows, cols = values.shape
    for i in range(rows):
        for j in range(cols):
            acc[i % stride, j % stride] += values[i, j]
    assert np.max(np.abs(acc - 1.0)) < 1e-12


def test_errors_are_typed():
    with pytest.raises(ns.SubdivError):
        ns.regular_mask("loop")
    with pytest.raises(ns.SubdivError):
        ns.refine(ns.make_face_pillow(5, 4), "cc")  # non-quad faces

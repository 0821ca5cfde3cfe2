import numpy as np
import pytest

import pyglrr


def test_projection_of_a_line_onto_constants():
    x = np.array([1.0, 0.0, 0.0, 1.0])
    for method in ("vp", "svp", "svph"):
        np.testing.assert_allclose(pyglrr.project([1.0, -1.0], x, method), 0.5, atol=1e-12)


def test_projection_keeps_members():
    t = np.arange(30.0)
    x = 2.0 - 0.5 * t
    np.testing.assert_allclose(pyglrr.project([1.0, -2.0, 1.0], x, "svp", "ar1:phi=0.5"), x, atol=1e-10)
    assert pyglrr.glrr_residual(x, [1.0, -2.0, 1.0]) <= 1e-12
    assert pyglrr.series_rank(x) == 2


def test_basis_is_orthonormal():
    z, alpha0, eig = pyglrr.basis([1.0, -2.0, 1.0], 50)
    assert z.shape == (50, 2)
    np.testing.assert_allclose(z.conj().T @ z, np.eye(2), atol=1e-12)
    assert abs(alpha0) <= np.pi / 50
    assert eig.shape == (50,)
    assert pyglrr.find_alpha0([1.0, -1.0], 4)["alpha0"] == pytest.approx(np.pi / 4)


def test_estimate_recovers_the_example():
    ex = pyglrr.make_example(40)
    rng = np.random.default_rng(3)
    a0 = ex["a_star"] + 1e-6 * rng.uniform(-1.0, 1.0, 4)
    for method in ("vpgn", "svpgn", "svpgn-h"):
        rep = pyglrr.estimate(ex["x"], a0, method)
        assert np.linalg.norm(rep["estimate"] - ex["y_star"]) <= 1e-6
        assert rep["stop_reason"] in ("step-exhausted", "max-iters")
        objectives = [it["objective"] for it in rep["iterations"]]
        assert all(b <= a for a, b in zip(objectives, objectives[1:]))


def test_tangent_space():
    residual, rank = pyglrr.tangent_space_check(np.full(10, 2.0), [1.0, -1.0], 1)
    assert residual <= 1e-6
    assert rank == 2


def test_errors_carry_codes():
    with pytest.raises(pyglrr.GlrrError) as info:
        pyglrr.project([1.0, -1.0], np.ones(3), "qr")
    assert info.value.code == "invalid-argument"
    with pytest.raises(pyglrr.GlrrError) as info:
        pyglrr.make_example(5)
    assert info.value.code == "length-too-short"

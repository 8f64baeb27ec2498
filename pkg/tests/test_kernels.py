import os
import subprocess
import sys

import numpy as np
import pytest

from canext import kernels
from canext.poly import MultiPoly
from canext.monodromy import sample_sheet
from canext.sheet import present_sheet, sample_parameters
from conftest import CORPUS

BACKENDS = sorted(kernels.backends())


def direct_eval(poly, pt):
    return complex(poly.evaluate([complex(x) for x in pt]))


@pytest.mark.parametrize("impl", BACKENDS)
def test_eval_packed_matches_direct(impl):
    V = ("a", "b", "c")
    polys = [
        MultiPoly.parse("a^2*b - 1/3*c + 2", V),
        MultiPoly.parse("0", V),
        MultiPoly.parse("c^4 - a*b*c", V),
    ]
    packed = kernels.PackedPolys(polys, 3)
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(20, 3)) + 1j * rng.normal(size=(20, 3))
    out = packed(pts, impl)
    assert out.shape == (20, 3)
    for i, pt in enumerate(pts):
        for j, p in enumerate(polys):
            assert abs(out[i, j] - direct_eval(p, pt)) <= 1e-12 * max(1, abs(out[i, j]))


@pytest.mark.parametrize("impl", BACKENDS)
def test_twisted_residuals_scaling(impl):
    bp = np.array([[1, 0]])
    bm = np.array([[0, 1]])
    lam_p = np.array([[0.0 + 0j], [0.25 + 0j]])
    lam_m = np.zeros((2, 1), dtype=complex)
    t = np.array([[0.5, 0.5], [2.0, 0.0]], dtype=complex)
    r = kernels.twisted_residuals(bp, bm, lam_p, lam_m, t, impl)
    assert abs(r[0, 0]) == 0
    # a = 2 * exp(-pi i / 2) = -2i, b = 0; scaled by max(1, 2)
    assert abs(r[1, 0] - (-2j) / 2) < 1e-15


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    for name, (model, h) in CORPUS.items():
        pres = present_sheet(model, h)
        zs = sample_parameters(model.n, 20, 1)
        pts = [sample_sheet(model, h, z) for z in zs]
        t = np.array([p.t for p in pts])
        v = np.array([p.v for p in pts])
        a_c, b_c = pres.residuals(t, v, "cython")
        a_p, b_p = pres.residuals(t, v, "python")
        assert np.allclose(a_c, a_p, rtol=1e-12, atol=1e-14), name
        assert np.allclose(b_c, b_p, rtol=1e-12, atol=1e-14), name


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.PackedPolys([], 1)(np.zeros((1, 1)), "fortran")


def test_env_forces_fallback():
    env = dict(os.environ, CANEXT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import canext.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"

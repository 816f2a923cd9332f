import subprocess
import sys

import numpy as np
import pytest

from ocad.dg import _kernels_py as pk
from ocad.dg import kernels


BACKENDS = [pk]
try:
    from ocad.dg import _kernels as ck

    BACKENDS.append(ck)
except ImportError:
    ck = None


@pytest.mark.parametrize("impl", BACKENDS)
def test_eval_points(impl):
    rng = np.random.default_rng(0)
    c = rng.standard_normal((37, 6))
    B = rng.standard_normal((6, 13))
    assert np.allclose(impl.eval_points(c, B), c @ B, atol=1e-14)


@pytest.mark.parametrize("impl", BACKENDS)
def test_eval_minmax(impl):
    rng = np.random.default_rng(1)
    c = rng.standard_normal((29, 10))
    B = rng.standard_normal((10, 21))
    lo, hi = impl.eval_minmax(c, B)
    v = c @ B
    assert np.allclose(lo, v.min(axis=1))
    assert np.allclose(hi, v.max(axis=1))


@pytest.mark.parametrize("impl", BACKENDS)
def test_scale_about_mean(impl):
    rng = np.random.default_rng(2)
    c = rng.standard_normal((15, 7))
    d = rng.uniform(0, 1, 15)
    out = impl.scale_about_mean(c, d)
    assert np.allclose(out[:, 0], c[:, 0])
    assert np.allclose(out[:, 1:], c[:, 1:] * d[:, None])


@pytest.mark.parametrize("impl", BACKENDS)
def test_lf_flux(impl):
    rng = np.random.default_rng(3)
    uL, uR, fL, fR = rng.standard_normal((4, 11, 5))
    out = impl.lf_flux(uL, uR, fL, fR, 1.7)
    assert np.allclose(out, 0.5 * (fL + fR) - 0.85 * (uR - uL))


@pytest.mark.skipif(ck is None, reason="compiled kernels unavailable")
def test_backend_parity_random():
    rng = np.random.default_rng(4)
    for _ in range(10):
        rows = rng.integers(1, 50)
        nm = rng.integers(1, 16)
        npts = rng.integers(1, 30)
        c = np.ascontiguousarray(rng.standard_normal((rows, nm)))
        B = np.ascontiguousarray(rng.standard_normal((nm, npts)))
        assert np.allclose(ck.eval_points(c, B), pk.eval_points(c, B), atol=1e-13)
        lo1, hi1 = ck.eval_minmax(c, B)
        lo2, hi2 = pk.eval_minmax(c, B)
        assert np.allclose(lo1, lo2) and np.allclose(hi1, hi2)


def test_backend_reports_name():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_python_env_override():
    code = (
        "import os; os.environ['OCAD_PURE_PYTHON']='1'; "
        "from ocad.dg import kernels; print(kernels.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"

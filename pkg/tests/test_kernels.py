import cmath
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from lmduality import kernels
from lmduality.classical import Model, ModelParams, generator

BACKEND_NAMES = sorted(kernels.BACKENDS)


@pytest.fixture(params=BACKEND_NAMES)
def backend(request):
    return kernels.BACKENDS[request.param]


def test_compiled_extension_is_built():
    # the editable install builds the extension; a missing one is a packaging regression
    assert "compiled" in kernels.BACKENDS


class TestRK4:
    def test_first_row_and_shape(self, backend):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        out = backend.rk4_linear(A, np.array([1.0, 0.0]), 0.01, 5)
        assert out.shape == (6, 2)
        np.testing.assert_array_equal(out[0], [1.0, 0.0])

    def test_against_expm(self, backend):
        A = np.ascontiguousarray(generator(Model.RYDBERG, ModelParams(m=0.7, g=1.3, k=2.1)))
        y0 = np.array([0.3, -0.4, 1.0, 0.2])
        out = backend.rk4_linear(A, y0, 1e-3, 2000)
        np.testing.assert_allclose(out[-1], expm(A * 2.0) @ y0, atol=1e-10)

    def test_one_step_formula(self, backend):
        # for linear systems one RK4 step is the 4th-order Taylor polynomial of exp(A dt)
        A = np.array([[0.1, 2.0], [-1.5, -0.3]])
        dt = 0.2
        M = A * dt
        P = np.eye(2) + M + M @ M / 2 + M @ M @ M / 6 + M @ M @ M @ M / 24
        y0 = np.array([0.7, -1.2])
        np.testing.assert_allclose(backend.rk4_linear(A, y0, dt, 1)[1], P @ y0, atol=1e-15)

    def test_shape_mismatch(self, backend):
        with pytest.raises(ValueError):
            backend.rk4_linear(np.eye(3), np.ones(2), 0.1, 1)


class TestLinkProduct:
    def test_matches_exponential_of_sum(self, backend):
        a = np.linspace(-1.0, 2.0, 257)
        w = backend.link_product(a, 0.01)
        assert abs(w - cmath.exp(1j * 0.01 * math.fsum(a))) < 1e-13
        assert abs(abs(w) - 1) < 1e-13

    def test_empty(self, backend):
        assert backend.link_product(np.zeros(0), 0.1) == 1


def test_backends_agree():
    if len(BACKEND_NAMES) < 2:
        pytest.skip("compiled extension not built")
    py, c = kernels.BACKENDS["python"], kernels.BACKENDS["compiled"]
    A = np.ascontiguousarray(generator(Model.LM, ModelParams(m=0.7, g=1.3, k=2.1)))
    y0 = np.array([0.3, -0.4, 1.0, 0.2])
    np.testing.assert_allclose(py.rk4_linear(A, y0, 1e-3, 5000), c.rk4_linear(A, y0, 1e-3, 5000), rtol=0, atol=1e-13)
    a = np.random.default_rng(3).normal(size=1024)
    assert abs(py.link_product(a, 1 / 1024) - c.link_product(a, 1 / 1024)) < 1e-13


def test_environment_override():
    env = dict(os.environ, LMDUALITY_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import lmduality.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"

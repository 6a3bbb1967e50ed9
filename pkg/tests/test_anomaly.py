import cmath
import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmduality.anomaly import (
    GaugeLoop,
    GaugeTransform,
    allowed_angular_momenta,
    anomaly_phase_ratio,
    apply_gauge,
    closed_form_determinant,
    closed_form_phase_ratio,
    determinant_ratio,
    homotopy_roots,
    is_invariant,
    monodromy,
    regularized_determinant,
    symmetric_determinant,
    write_anomaly_report,
)
from lmduality.errors import DimensionMismatchError, InvalidStateError, UnsupportedModelError, ZeroModeError

N_T = 1024
NUS = (-1.0, -0.5, 0.0, 0.5, 1.0, 1.5)
WINDINGS = (-2, -1, 1, 2, 3)


def dense_determinant(loop):
    """det of the cyclic first-difference matrix psi_j - exp(i dt a_j) psi_{j+1}."""
    n = loop.n
    D = np.eye(n, dtype=complex)
    for j in range(n):
        D[j, (j + 1) % n] -= np.exp(1j * loop.dt * loop.samples[j])
    return np.linalg.det(D)


@pytest.fixture
def loop():
    w = 2 * math.pi
    return GaugeLoop.from_function(lambda t: math.pi / 3 + 0.3 * np.cos(w * t) + 0.2 * np.sin(2 * w * t), 1.0, N_T)


def transform(N, n=N_T):
    w = 2 * math.pi
    return GaugeTransform.from_function(N, lambda t: 0.5 * np.sin(w * t) + 0.2 * np.cos(3 * w * t), 1.0, n)


class TestGauge:
    def test_trivial_transform(self, loop):
        after = apply_gauge(loop, GaugeTransform(0))
        np.testing.assert_array_equal(after.samples, loop.samples)

    def test_linear_winding(self):
        a = GaugeLoop.constant(0.4, period=2.0, n=64)
        after = apply_gauge(a, GaugeTransform(1))
        np.testing.assert_allclose(after.samples, 0.4 + 2 * math.pi / 2.0, atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(-3, 3), st.lists(st.floats(-1, 1), min_size=4, max_size=4), st.sampled_from([64, 256, 1024]))
    def test_holonomy_shift(self, N, c, n):
        t = np.arange(n) / n
        w = 2 * math.pi
        a = GaugeLoop(1.0, 0.7 + c[0] * np.cos(w * t))
        lam = c[1] * np.sin(w * t) + c[2] * np.cos(2 * w * t) + c[3] * np.sin(5 * w * t)
        after = apply_gauge(a, GaugeTransform(N, lam))
        assert abs(after.holonomy - a.holonomy - 2 * math.pi * N) < 1e-12

    def test_length_mismatch(self, loop):
        with pytest.raises(DimensionMismatchError):
            apply_gauge(loop, GaugeTransform(1, np.zeros(10)))

    def test_validation(self):
        with pytest.raises(InvalidStateError):
            GaugeLoop(1.0, np.zeros(4))
        with pytest.raises(InvalidStateError):
            GaugeTransform(0.5)


class TestDeterminant:
    def test_phi_pi(self):
        assert abs(regularized_determinant(GaugeLoop.constant(math.pi, 1.0, N_T)) - 2) < 1e-12

    def test_zero_mode(self):
        assert abs(regularized_determinant(GaugeLoop.constant(0.0, 1.0, 64))) == 0

    @pytest.mark.parametrize("n", [16, 64, 256])
    def test_dense_oracle(self, loop, n):
        lp = GaugeLoop(1.0, loop.samples[:: N_T // n])
        assert abs(regularized_determinant(lp) - dense_determinant(lp)) < 1e-11

    def test_continuum_limit(self, loop):
        assert abs(regularized_determinant(loop) - closed_form_determinant(loop.holonomy)) < 1e-10

    def test_convergence_on_kinked_loop(self):
        # C0 profile: the error shrinks with every refinement until the last sample
        errs = []
        for n in (64, 128, 256, 512, 1024):
            lp = GaugeLoop.from_function(lambda t: 1.0 + 2.0 * t * (1.0 - t), 1.0, n)
            errs.append(abs(regularized_determinant(lp) - closed_form_determinant(1.0 + 2.0 / 6.0)))
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_small_gauge_invariance(self, loop):
        d0 = regularized_determinant(loop)
        d1 = regularized_determinant(apply_gauge(loop, transform(0)))
        assert abs(d1 - d0) / abs(d0) < 1e-10

    def test_naive_form_is_blind_to_winding(self, loop):
        d0 = regularized_determinant(loop)
        d1 = regularized_determinant(apply_gauge(loop, transform(1)))
        assert abs(d1 / d0 - 1) < 1e-8

    def test_symmetric_form(self, loop):
        phi = loop.holonomy
        assert symmetric_determinant(loop) == pytest.approx(2 * math.sin(phi / 2), abs=1e-10)
        assert symmetric_determinant(loop, -1) == pytest.approx(2 * math.sin(phi / 2), abs=1e-10)

    def test_cs_monodromy_is_conjugate(self, loop):
        assert monodromy(loop, -1) == monodromy(loop, +1).conjugate()


class TestSignLaw:
    @pytest.mark.parametrize("N", WINDINGS)
    @pytest.mark.parametrize("chirality", [+1, -1])
    def test_branch_tracked_ratio(self, loop, N, chirality):
        r = determinant_ratio(loop, transform(N), 64, chirality)
        assert abs(r - (-1) ** (N % 2)) < 1e-8

    @pytest.mark.parametrize("N", WINDINGS)
    def test_agrees_with_holonomy_branch(self, loop, N):
        after = apply_gauge(loop, transform(N))
        expected = symmetric_determinant(after) / symmetric_determinant(loop)
        assert abs(determinant_ratio(loop, transform(N)) - expected) < 1e-8

    def test_root_path_is_continuous(self, loop):
        _, ws, roots = homotopy_roots(loop, transform(1), 64)
        np.testing.assert_allclose(roots**2, ws, atol=1e-14)
        assert np.max(np.abs(np.diff(roots))) < 0.5
        assert abs(roots[-1] + roots[0]) < 1e-9

    def test_zero_mode_raises(self):
        with pytest.raises(ZeroModeError):
            determinant_ratio(GaugeLoop.constant(0.0, 1.0, 64), GaugeTransform(1))

    def test_homotopy_samples(self, loop):
        with pytest.raises(ValueError):
            homotopy_roots(loop, transform(1), 1)


class TestPhaseRatio:
    @pytest.mark.parametrize("N", WINDINGS)
    @pytest.mark.parametrize("nu", NUS)
    def test_against_closed_form(self, loop, N, nu):
        for model in ("CO", "CS", "LM"):
            r = anomaly_phase_ratio(loop, transform(N), nu, model)
            assert abs(r - closed_form_phase_ratio(model, N, nu)) < 1e-8

    @pytest.mark.parametrize("nu", NUS)
    def test_quantization_classes(self, loop, nu):
        half = (2 * nu) % 2 == 1
        assert is_invariant(anomaly_phase_ratio(loop, transform(1), nu, "CO")) == half
        assert is_invariant(anomaly_phase_ratio(loop, transform(1), nu, "LM")) == (not half)

    @pytest.mark.parametrize("nu", NUS)
    def test_even_winding_leaves_everything_invariant(self, loop, nu):
        for model in ("CO", "LM"):
            assert is_invariant(anomaly_phase_ratio(loop, transform(2), nu, model))

    def test_examples(self, loop):
        gt = transform(1)
        assert abs(anomaly_phase_ratio(loop, gt, 0.5, "CO") - 1) < 1e-8
        assert abs(anomaly_phase_ratio(loop, gt, 0.0, "CO") + 1) < 1e-8
        assert abs(anomaly_phase_ratio(loop, gt, 1.0, "LM") - 1) < 1e-8
        assert abs(anomaly_phase_ratio(loop, gt, 0.5, "LM") + 1) < 1e-8

    def test_lm_is_product_of_sectors(self, loop):
        gt = transform(3)
        for nu in NUS:
            prod = determinant_ratio(loop, gt, 64, +1) * determinant_ratio(loop, gt, 64, -1)
            assert abs(anomaly_phase_ratio(loop, gt, nu, "LM") - prod * cmath.exp(2j * math.pi * 3 * nu)) < 1e-10

    def test_bad_model(self, loop):
        with pytest.raises(UnsupportedModelError):
            anomaly_phase_ratio(loop, transform(1), 0.5, "XX")
        with pytest.raises(UnsupportedModelError):
            closed_form_phase_ratio("XX", 1, 0.5)


class TestAllowed:
    def test_co(self):
        assert allowed_angular_momenta("CO", 0, 3) == [0.5, 1.5, 2.5]
        assert allowed_angular_momenta("CO", -2, 2, chirality=-1) == [-1.5, -0.5]
        assert allowed_angular_momenta("CO", -1, 1) == [-0.5, 0.5]

    def test_lm(self):
        assert allowed_angular_momenta("LM", -2, 2) == [-2, -1, 0, 1, 2]

    def test_disjoint(self):
        assert not set(allowed_angular_momenta("CO", -5, 5)) & set(allowed_angular_momenta("LM", -5, 5))

    def test_unknown(self):
        with pytest.raises(UnsupportedModelError):
            allowed_angular_momenta("QQ", 0, 1)


def test_report_csv():
    fh = io.StringIO()
    write_anomaly_report([("CO", 1, 0.5, 1 + 0j), ("LM", 1, 0.5, -1 + 1e-12j)], fh)
    rows = list(csv.reader(io.StringIO(fh.getvalue())))
    assert rows[0] == ["model", "N", "nu", "ratio_re", "ratio_im", "invariant"]
    assert rows[1] == ["CO", "1", "0.5", "1", "0", "true"]
    assert rows[2][-1] == "false"

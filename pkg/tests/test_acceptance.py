"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary
(and echoed to stdout, visible with ``pytest -s``).
"""
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from lmduality import anomaly, fock, interferometer
from lmduality.classical import EPS, Model, ModelParams, PhaseState, analytic_positions, integrate, lm_energy, oscillation_period, rydberg_limit_study
from lmduality.duality import decompose_trajectory, master_x

SEED = 42


def record(n, title, checks):
    """``checks`` holds ``(label, value, tol)`` for ``value < tol`` or ``(label, value, ">=", bound)``."""
    parts, ok = [], True
    for label, value, *rest in checks:
        if len(rest) == 2:
            bound = rest[1]
            ok &= bool(value >= bound)
            parts.append(f"{label} {value:.3g} >= {bound:g}")
        else:
            ok &= bool(value < rest[0])
            if isinstance(value, (int, np.integer)):
                parts.append(f"{label} {value} < {rest[0]}")
            else:
                parts.append(f"{label} {value:.2e} < {rest[0]:.0e}")
    detail = "; ".join(parts)
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def rng():
    return np.random.default_rng(SEED)


def test_criterion_1_classical_duality():
    r = rng()
    drift = plus = energy = 0.0
    for p in (ModelParams(), ModelParams.tuned(g=1.5, k=0.9)):
        assert p.duality_tuned()
        T = 2 * math.pi / p.omega
        for _ in range(3):
            s0 = PhaseState(r.uniform(-1, 1, 2), r.uniform(-1, 1, 2))
            scale = np.linalg.norm(s0.x) + np.linalg.norm(s0.v) / p.omega
            lm = integrate(Model.LM, s0, p, 10 * T, T / 1e4)
            xp, xm = decompose_trajectory(lm)
            drift = max(drift, np.max(np.linalg.norm(xm - xm[0], axis=1)) / scale)
            co, _ = analytic_positions(Model.CO, PhaseState(xp[0]), p, lm.t)
            plus = max(plus, np.max(np.linalg.norm(xp - co, axis=1)) / scale)
            E = lm_energy(lm)
            energy = max(energy, np.max(np.abs(E - 0.5 * p.k * np.sum(xp**2, axis=1))) / E[0])
    assert record(1, "classical duality", [
        ("x- drift/scale", drift, 1e-6),
        ("x+ vs CO/scale", plus, 1e-5),
        ("E_LM vs E_CO rel", energy, 1e-8),
    ])


def test_criterion_2_master_reduction():
    p = ModelParams.tuned(g=1.5, k=0.9)
    s0 = PhaseState(*rng().uniform(-1, 1, (2, 2)))
    T = 2 * math.pi / p.omega_lm
    res = []
    for n in (500, 1000, 2000):
        tr = integrate(Model.MASTER, s0, p, T, T / n)
        x = master_x(tr.v, p)
        xdot = (x[2:] - x[:-2]) / (2 * tr.dt)
        res.append(np.max(np.abs(p.g * xdot @ EPS.T - p.k * x[1:-1])))
    orders = [math.log2(a / b) for a, b in zip(res, res[1:])]
    y = integrate(Model.MASTER, s0, p, 10 * T, T / 1e4)
    w = 2 * math.pi / oscillation_period(y.t, y.x[:, 0])
    assert record(2, "master reduction", [
        ("CO-law residual convergence order", min(orders), ">=", 1.9),
        ("y frequency rel err vs g/m", abs(w / (p.g / p.m) - 1), 1e-6),
    ])


def test_criterion_3_spectra():
    p = ModelParams(m=0.5, g=1.4, k=0.9, hbar=0.7)
    hb = p.hbar
    plus = minus = integer = ground = 0.0
    gap = math.inf
    for d in (8, 16, 32, 64):
        n = np.arange(d - 2)
        mp = fock.spectrum(fock.co_angular_momentum(p, d)).trusted
        mm = fock.spectrum(fock.cs_angular_momentum(p, d)).trusted
        plus = max(plus, np.max(np.abs(mp - hb * (n + 0.5))) / hb)
        minus = max(minus, np.max(np.abs(np.sort(-mm) - hb * (n + 0.5))) / hb)
    for dp, dm in ((8, 8), (16, 16), (32, 32), (64, 8)):
        _, M = fock.lm_operators(p, dp, dm)
        ml = fock.spectrum(M).trusted / hb
        integer = max(integer, np.max(np.abs(ml - np.round(ml))))
        ground = max(ground, abs(fock.QuantumState.fock((dp, dm), (0, 0)).expect(M)) / hb)
        mp = fock.spectrum(fock.co_angular_momentum(p, dp)).trusted / hb
        gap = min(gap, np.min(np.abs(mp[:, None] - ml[None, :])))
    assert record(3, "spectra", [
        ("M+ vs hbar(n+1/2)", plus, 1e-10),
        ("M- mirror", minus, 1e-10),
        ("M_LM integer", integer, 1e-10),
        ("LM ground M", ground, 1e-15),
        ("M+/M_LM offset deficit", abs(gap - 0.5), 1e-10),
    ])


def test_criterion_4_anomaly():
    w = 2 * math.pi
    loop = anomaly.GaugeLoop.from_function(lambda t: 1.1 + 0.4 * np.cos(w * t) - 0.25 * np.sin(3 * w * t), 1.0, 1024)
    sign = 0.0
    wrong = 0
    for N in (-2, -1, 1, 2, 3):
        gt = anomaly.GaugeTransform.from_function(N, lambda t: 0.3 * np.sin(w * t) + 0.1 * np.cos(2 * w * t), 1.0, 1024)
        sign = max(sign, abs(anomaly.determinant_ratio(loop, gt, 64) - (-1) ** (N % 2)))
        if N % 2 == 0:
            continue
        for nu in (-1, -0.5, 0, 0.5, 1, 1.5):
            half = (2 * nu) % 2 == 1
            co = anomaly.is_invariant(anomaly.anomaly_phase_ratio(loop, gt, nu, "CO", 64))
            lm = anomaly.is_invariant(anomaly.anomaly_phase_ratio(loop, gt, nu, "LM", 64))
            wrong += (co != half) + (lm != (not half))
    assert record(4, "anomaly", [
        ("|ratio - (-1)^N|", sign, 1e-8),
        ("misclassified (model, nu) pairs", wrong, 1),
    ])


def test_criterion_5_interferometer():
    r = rng()
    worst = 0.0
    for _ in range(100):
        d = int(r.integers(2, 7))
        G = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
        rho = G @ G.conj().T
        rho /= np.trace(rho).real
        Q, R = np.linalg.qr(r.normal(size=(d, d)) + 1j * r.normal(size=(d, d)))
        cfg = interferometer.InterferometerConfig(float(r.uniform(-math.pi, math.pi)), Q * (np.diag(R) / np.abs(np.diag(R))))
        worst = max(worst, np.max(np.abs(interferometer.propagate(rho, cfg) - interferometer.closed_form_output(rho, cfg))))

    p = ModelParams()
    grid = interferometer.chi_grid(64)
    Mp = fock.co_angular_momentum(p, 32)
    g_co = fock.QuantumState.fock((32,), (0,))
    _, ML = fock.lm_operators(p, 8, 8)
    g_lm = fock.QuantumState.fock((8, 8), (0, 0))
    co = interferometer.scan_and_fit(g_co, fock.rotation_operator(Mp, 2 * math.pi), grid)
    lm = interferometer.scan_and_fit(g_lm, fock.rotation_operator(ML, 2 * math.pi), grid)

    alphas = np.linspace(0, 4 * math.pi, 33)
    xs_co = np.unwrap([interferometer.scan_and_fit(g_co, fock.rotation_operator(Mp, a), grid).xi for a in alphas])
    xs_lm = np.unwrap([interferometer.scan_and_fit(g_lm, fock.rotation_operator(ML, a), grid).xi for a in alphas])
    assert record(5, "interferometer", [
        ("propagate vs closed form", worst, 1e-12),
        ("CO |xi - pi|", abs(co.xi - math.pi), 1e-6),
        ("CO |V - 1|", abs(co.visibility - 1), 1e-9),
        ("LM |xi|", abs(lm.xi), 1e-6),
        ("CO slope-1/2 deviation", np.max(np.abs(xs_co - xs_co[0] - alphas / 2)), 1e-6),
        ("LM slope-0 deviation", np.max(np.abs(xs_lm - xs_lm[0])), 1e-6),
    ])


def fock_sum(beta_hw, alpha, n_max=4000):
    n = np.arange(n_max)
    w = np.exp(-beta_hw * n)
    return abs(np.sum(w * np.exp(1j * alpha * (n + 0.5)))) / w.sum()


def test_criterion_6_thermal_visibility():
    p = ModelParams(m=0.5, g=1.4, k=0.9, hbar=0.7)
    H = fock.co_hamiltonian(p, 64)
    M = fock.co_angular_momentum(p, 64)
    grid = interferometer.chi_grid(64)
    worst = 0.0
    for bx in (0.5, 1.0, 2.0):
        rho = fock.thermal_state(H, bx / (p.hbar * p.omega_co))
        for alpha in (math.pi / 2, math.pi, 2 * math.pi):
            ig = interferometer.scan_and_fit(rho, fock.rotation_operator(M, alpha, p.hbar), grid)
            worst = max(worst, abs(ig.visibility - fock_sum(bx, alpha)))
    assert record(6, "thermal visibility", [("|V_fit - Fock sum|", worst, 1e-8)])


def test_criterion_7_rydberg_reduction():
    r = rng()
    violations = 0
    for p in (ModelParams(), ModelParams(m=2.0, g=1.3, k=0.8)):
        for _ in range(3):
            rows = rydberg_limit_study(PhaseState(r.uniform(-1, 1, 2)), p, [1, 0.1, 0.01, 0.001])
            devs = [d for _, d in rows]
            violations += sum(b >= a for a, b in zip(devs, devs[1:]))
    assert record(7, "Rydberg reduction", [("non-decreasing steps", violations, 1)])


def test_criterion_8_reproducibility(tmp_path):
    outs, codes = [], []
    for name in ("a", "b"):
        out = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "lmduality", "run", "--scenario", "all", "--seed", "42", "--out", str(out)],
            capture_output=True, text=True,
        )
        codes.append(proc.returncode)
        outs.append(out)
    files_a = sorted(f.name for f in outs[0].iterdir())
    files_b = sorted(f.name for f in outs[1].iterdir())
    differing = sum((outs[0] / f).read_bytes() != (outs[1] / f).read_bytes() for f in files_a if f in files_b)
    differing += len(set(files_a) ^ set(files_b))
    differing = int(differing)
    assert record(8, "reproducibility", [
        ("nonzero exit codes", sum(c != 0 for c in codes), 1),
        ("differing artifacts", differing, 1),
        ("missing summary", int("summary.json" not in files_a), 1),
    ])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

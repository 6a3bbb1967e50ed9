"""Mach-Zehnder interferometry with an internal degree of freedom.

Path space is two-dimensional with basis index 0 = upper arm. Beam splitter
and mirror are fixed to::

    U_B = [[1, 1], [1, -1]] / sqrt(2),    U_M = [[0, 1], [1, 0]]

acting as the identity on the internal space. Between the first splitter and
the mirrors, ``U = |1><1| (x) U_i + e^{i chi} |0><0| (x) 1``. With these
choices the direct operator product reproduces the four-term closed form
below, and the intensity in the upper output port is
``(1 + |Tr(U_i rho)| cos(chi - arg Tr(U_i rho))) / 2``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidStateError, UndefinedPhaseError
from .fock import OperatorMatrix, QuantumState

U_B = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
U_M = np.array([[0.0, 1.0], [1.0, 0.0]])
P0 = np.array([[1.0, 0.0], [0.0, 0.0]])
P1 = np.array([[0.0, 0.0], [0.0, 1.0]])

UNITARY_TOL = 1e-12
PHASE_TOL = 1e-12
BALANCED_MAX = 1.0


def wrap_phase(x: float) -> float:
    """Map onto ``(-pi, pi]``. Values within ``1e-12`` of ``-pi`` go to ``+pi``."""
    y = math.remainder(x, 2 * math.pi)
    if y <= -math.pi + PHASE_TOL:
        y = math.pi
    return y


@dataclass(frozen=True)
class InterferometerConfig:
    chi: float
    U_i: np.ndarray

    def __post_init__(self):
        U = self.U_i.data if isinstance(self.U_i, OperatorMatrix) else np.asarray(self.U_i)
        U = np.array(U, dtype=np.complex128)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise DimensionMismatchError("internal unitary must be square")
        if np.max(np.abs(U @ U.conj().T - np.eye(len(U)))) > UNITARY_TOL:
            raise InvalidStateError("internal operator is not unitary")
        U.setflags(write=False)
        object.__setattr__(self, "U_i", U)

    def with_chi(self, chi: float) -> "InterferometerConfig":
        return InterferometerConfig(chi, self.U_i)


def _density(rho) -> np.ndarray:
    return rho.density if isinstance(rho, QuantumState) else np.asarray(rho, dtype=np.complex128)


def _check(rho: np.ndarray, cfg: InterferometerConfig) -> None:
    if rho.shape != cfg.U_i.shape:
        raise DimensionMismatchError(f"internal state {rho.shape} vs internal unitary {cfg.U_i.shape}")


def arm_unitary(cfg: InterferometerConfig) -> np.ndarray:
    n = len(cfg.U_i)
    return np.kron(P1, cfg.U_i) + np.exp(1j * cfg.chi) * np.kron(P0, np.eye(n))


def propagate(rho_internal, cfg: InterferometerConfig) -> np.ndarray:
    """Output density matrix on path (x) internal by direct operator products."""
    rho = _density(rho_internal)
    _check(rho, cfg)
    n = len(rho)
    I = np.eye(n)
    total = np.kron(U_B, I) @ np.kron(U_M, I) @ arm_unitary(cfg) @ np.kron(U_B, I)
    # rho_in = |0~><0~| (x) rho only has its upper-left block
    K = total[:, :n]
    return K @ rho @ K.conj().T


def closed_form_output(rho_internal, cfg: InterferometerConfig) -> np.ndarray:
    """Four-term expansion of the output state."""
    rho = _density(rho_internal)
    _check(rho, cfg)
    U = cfg.U_i
    e = np.exp(1j * cfg.chi)
    out = (
        np.kron([[1, 1], [1, 1]], U @ rho @ U.conj().T)
        + np.kron([[1, -1], [-1, 1]], rho)
        + e * np.kron([[1, 1], [-1, -1]], rho @ U.conj().T)
        + np.conj(e) * np.kron([[1, -1], [1, -1]], U @ rho)
    )
    return 0.25 * out


def intensity(rho_out: np.ndarray, normalize: bool = False) -> float:
    """Probability of leaving through the ``|0~>`` port.

    ``normalize`` divides by the value for ``U_i = 1, chi = 0``. That value is
    already 1 with the conventions above, so both settings agree.
    """
    rho_out = np.asarray(rho_out)
    n = rho_out.shape[0] // 2
    val = float(np.trace(rho_out[:n, :n]).real)
    if normalize:
        val /= BALANCED_MAX
    return val


def trace_overlap(U_i, rho_internal) -> complex:
    U = U_i.data if isinstance(U_i, OperatorMatrix) else np.asarray(U_i)
    return complex(np.trace(U @ _density(rho_internal)))


def pancharatnam_phase(U_i, rho_internal) -> tuple[float, float]:
    """Visibility ``|Tr(U_i rho)|`` and phase ``arg Tr(U_i rho)`` in ``(-pi, pi]``.

    Raises
    ------
    UndefinedPhaseError
        When ``|Tr(U_i rho)| < 1e-12``.
    """
    tr = trace_overlap(U_i, rho_internal)
    if abs(tr) < 1e-12:
        raise UndefinedPhaseError("Tr(U_i rho) vanishes; the Pancharatnam phase is undefined")
    return abs(tr), wrap_phase(math.atan2(tr.imag, tr.real))


@dataclass
class Interferogram:
    chi_grid: np.ndarray
    intensities: np.ndarray
    baseline: float
    visibility: float
    xi: Optional[float]
    residual: float
    meta: dict = field(default_factory=dict)

    @property
    def phase_defined(self) -> bool:
        return self.xi is not None

    def model(self, chi) -> np.ndarray:
        xi = 0.0 if self.xi is None else self.xi
        return self.baseline * (1 + self.visibility * np.cos(np.asarray(chi) - xi))

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["chi", "intensity"])
        for c, i in zip(self.chi_grid, self.intensities):
            w.writerow([format(float(c), ".17g"), format(float(i), ".17g")])

    def summary(self) -> dict:
        d = {
            "A": self.baseline,
            "V": self.visibility,
            "xi": self.xi,
            "residual": self.residual,
        }
        d.update(self.meta)
        return d

    def write_json(self, fh) -> None:
        json.dump(self.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def fit_fringe(chi_grid: Sequence[float], intensities: Sequence[float], v_floor: float = 1e-6) -> tuple[float, float, Optional[float], float]:
    """Fit ``I = A (1 + V cos(chi - xi))`` by linear least squares.

    Solves for ``c0 + c1 cos chi + c2 sin chi``; then ``A = c0``,
    ``V = hypot(c1, c2) / c0``, ``xi = atan2(c2, c1)``. ``xi`` is ``None``
    when ``V < v_floor``. Returns ``(A, V, xi, rms_residual)``.
    """
    chi = np.asarray(chi_grid, dtype=float)
    y = np.asarray(intensities, dtype=float)
    X = np.column_stack([np.ones_like(chi), np.cos(chi), np.sin(chi)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    c0, c1, c2 = coef
    if c0 <= 0:
        raise InvalidStateError("fitted baseline is not positive")
    V = math.hypot(c1, c2) / c0
    xi = wrap_phase(math.atan2(c2, c1)) if V >= v_floor else None
    resid = float(np.sqrt(np.mean((X @ coef - y) ** 2)))
    return float(c0), float(V), xi, resid


def scan_and_fit(rho_internal, U_i, chi_grid: Sequence[float]) -> Interferogram:
    """Emulate a phase scan: propagate for each ``chi`` and fit the fringe."""
    chi = np.asarray(chi_grid, dtype=float)
    # an open grid [0, 2 pi) counts as covering the period
    if len(chi) < 8 or np.ptp(chi) * len(chi) / (len(chi) - 1) < 2 * math.pi * (1 - 1e-12):
        raise InvalidStateError("chi grid needs >= 8 points covering a full period")
    cfg = InterferometerConfig(0.0, U_i)
    vals = np.array([intensity(propagate(rho_internal, cfg.with_chi(c))) for c in chi])
    A, V, xi, resid = fit_fringe(chi, vals)
    return Interferogram(chi, vals, A, V, xi, resid)


def chi_grid(n: int = 64) -> np.ndarray:
    """``n`` equispaced phases on ``[0, 2 pi)``."""
    return 2 * math.pi * np.arange(n) / n

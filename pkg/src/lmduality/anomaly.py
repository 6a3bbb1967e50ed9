"""Large gauge transformations on the time circle and the Z2 anomaly.

A U(1) gauge potential ``a(t)`` on a circle of period ``T`` is sampled on
``N_t`` points. The operator ``i d/dt + a`` with periodic boundary conditions
is discretised by its transfer matrix: the ordered product of links
``exp(i dt a_j)`` gives the monodromy ``W``, which tends to ``exp(i phi)``, where
``phi = \\oint a dt`` is the holonomy. The periodic determinant is then
``det = 1 - W`` up to a constant, the continuum value being ``1 - e^{i phi}``.

That form is invariant under ``phi -> phi + 2 pi N``. The Hermitian
(sign-resolved) determinant ``2 sin(phi/2) = i (1 - W) / sqrt(W)`` is not.
Its square root has to follow ``W`` continuously, and a winding-``N``
transformation flips its sign by ``(-1)^N``. Here that branch is followed
numerically along the straight homotopy ``a_s = a + s dlambda/dt``.

Units: ``hbar = 1``; ``nu`` is the coefficient of the ``nu a`` term, i.e.
angular momentum in units of ``hbar``.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, InvalidStateError, UnsupportedModelError, ZeroModeError

ZERO_MODE_TOL = 1e-10
MODELS = ("CO", "CS", "LM")


@dataclass(frozen=True)
class GaugeLoop:
    period: float
    samples: np.ndarray

    def __post_init__(self):
        a = np.array(self.samples, dtype=np.float64).reshape(-1)
        if len(a) < 8:
            raise InvalidStateError("a gauge loop needs at least 8 samples")
        if not (self.period > 0 and math.isfinite(self.period)) or not np.all(np.isfinite(a)):
            raise InvalidStateError("gauge loop must have a positive period and finite samples")
        a.setflags(write=False)
        object.__setattr__(self, "samples", a)

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def dt(self) -> float:
        return self.period / self.n

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n)

    @property
    def holonomy(self) -> float:
        """``dt * sum(a_j)``: the rectangle rule, which equals the trapezoid rule on a periodic grid."""
        return self.dt * math.fsum(self.samples)

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], period: float, n: int) -> "GaugeLoop":
        t = period * np.arange(n) / n
        return cls(period, np.broadcast_to(f(t), (n,)))

    @classmethod
    def constant(cls, value: float, period: float = 1.0, n: int = 1024) -> "GaugeLoop":
        return cls(period, np.full(n, float(value)))


@dataclass(frozen=True)
class GaugeTransform:
    """``lambda(t) = 2 pi N t / T + periodic_part(t)``."""

    winding: int
    periodic_part: Optional[np.ndarray] = None

    def __post_init__(self):
        if int(self.winding) != self.winding:
            raise InvalidStateError("winding number must be an integer")
        object.__setattr__(self, "winding", int(self.winding))
        if self.periodic_part is not None:
            p = np.array(self.periodic_part, dtype=np.float64).reshape(-1)
            if not np.all(np.isfinite(p)):
                raise InvalidStateError("periodic part must be finite")
            p.setflags(write=False)
            object.__setattr__(self, "periodic_part", p)

    def derivative(self, loop: GaugeLoop) -> np.ndarray:
        """Samples of ``dlambda/dt`` on the loop's grid.

        The periodic part is differentiated spectrally. The zero and Nyquist
        modes are dropped, so the discrete integral of the result is exactly
        ``2 pi N``.
        """
        d = np.full(loop.n, 2 * math.pi * self.winding / loop.period)
        if self.periodic_part is not None:
            if len(self.periodic_part) != loop.n:
                raise DimensionMismatchError(
                    f"transform has {len(self.periodic_part)} samples, loop has {loop.n}"
                )
            coeffs = np.fft.rfft(self.periodic_part)
            kk = 2j * math.pi * np.fft.rfftfreq(loop.n, d=loop.dt)
            if loop.n % 2 == 0:
                kk[-1] = 0.0
            d = d + np.fft.irfft(kk * coeffs, n=loop.n)
        return d

    def total_change(self) -> float:
        return 2 * math.pi * self.winding

    @classmethod
    def from_function(
        cls, winding: int, f: Optional[Callable[[np.ndarray], np.ndarray]], period: float, n: int
    ) -> "GaugeTransform":
        if f is None:
            return cls(winding)
        t = period * np.arange(n) / n
        return cls(winding, np.broadcast_to(f(t), (n,)))


def apply_gauge(loop: GaugeLoop, gt: GaugeTransform) -> GaugeLoop:
    """``a -> a + dlambda/dt`` on the same grid."""
    return GaugeLoop(loop.period, loop.samples + gt.derivative(loop))


def monodromy(loop: GaugeLoop, chirality: int = +1) -> complex:
    """Transfer-matrix product around the circle; ``chirality=-1`` is the conjugate (CS) operator."""
    w = kernels.link_product(np.ascontiguousarray(loop.samples), loop.dt)
    return w if chirality > 0 else w.conjugate()


def regularized_determinant(loop: GaugeLoop, chirality: int = +1) -> complex:
    """Normalised periodic determinant of ``i d/dt + a``, tending to ``1 - e^{i phi}``."""
    return 1.0 - monodromy(loop, chirality)


def closed_form_determinant(phi: float) -> complex:
    return 1.0 - cmath.exp(1j * phi)


def _sym_det(w: complex, root: complex, chirality: int) -> float:
    # +-i (1 - W) / sqrt(W) = 2 sin(phi/2), with W -> conj(W) for the conjugate operator
    return (chirality * 1j * (1.0 - w) / root).real


def symmetric_determinant(loop: GaugeLoop, chirality: int = +1) -> float:
    """Sign-resolved determinant ``2 sin(phi/2)`` with the branch of ``sqrt(W)`` fixed by the holonomy.

    This reads the branch off the real-valued holonomy. :func:`determinant_ratio`
    reaches the same branch by continuity, using the transfer products only.
    """
    w = monodromy(loop, chirality)
    target = cmath.exp(0.5j * chirality * loop.holonomy)
    root = cmath.sqrt(w)
    if abs(root - target) > abs(root + target):
        root = -root
    return _sym_det(w, root, chirality)


def homotopy_roots(loop: GaugeLoop, gt: GaugeTransform, samples: int = 64, chirality: int = +1):
    """Follow ``sqrt(W_s)`` along ``a_s = a + s dlambda/dt``, ``s`` in ``[0, 1]``.

    Returns ``(s, W_s, root_s)`` arrays. The starting root is the principal
    square root; every later root is the one of ``+-sqrt(W_s)`` closest to
    its predecessor.
    """
    if samples < 2:
        raise ValueError("need at least two homotopy samples")
    dl = gt.derivative(loop)
    s_grid = np.linspace(0.0, 1.0, samples)
    ws = np.empty(samples, dtype=complex)
    roots = np.empty(samples, dtype=complex)
    prev = None
    for i, s in enumerate(s_grid):
        w = monodromy(GaugeLoop(loop.period, loop.samples + s * dl), chirality)
        r = cmath.sqrt(w)
        if prev is not None and abs(r - prev) > abs(r + prev):
            r = -r
        ws[i], roots[i] = w, r
        prev = r
    return s_grid, ws, roots


def determinant_ratio(loop: GaugeLoop, gt: GaugeTransform, samples: int = 64, chirality: int = +1) -> complex:
    """``det_sym(a') / det_sym(a)`` with the square-root branch followed along the homotopy.

    Raises
    ------
    ZeroModeError
        If either endpoint has a holonomy in ``2 pi Z`` (vanishing determinant).
    """
    _, ws, roots = homotopy_roots(loop, gt, samples, chirality)
    for w in (ws[0], ws[-1]):
        if abs(1.0 - w) < ZERO_MODE_TOL:
            raise ZeroModeError("holonomy is a multiple of 2 pi; the determinant vanishes")
    return complex(_sym_det(ws[-1], roots[-1], chirality) / _sym_det(ws[0], roots[0], chirality))


def anomaly_phase_ratio(loop: GaugeLoop, gt: GaugeTransform, nu: float, model: str, samples: int = 64) -> complex:
    """``exp(i Gamma(a')) / exp(i Gamma(a))`` for ``Gamma = -i ln det + nu \\oint a``.

    ``CO`` carries one chiral determinant, ``CS`` the conjugate one and ``LM``
    both. Every model carries a single ``nu a`` term.
    """
    model = model.upper()
    if model not in MODELS:
        raise UnsupportedModelError(f"model must be one of {MODELS}, got {model!r}")
    after = apply_gauge(loop, gt)
    cs_term = cmath.exp(1j * nu * (after.holonomy - loop.holonomy))
    if model == "CO":
        det = determinant_ratio(loop, gt, samples, +1)
    elif model == "CS":
        det = determinant_ratio(loop, gt, samples, -1)
    else:
        det = determinant_ratio(loop, gt, samples, +1) * determinant_ratio(loop, gt, samples, -1)
    return det * cs_term


def closed_form_phase_ratio(model: str, winding: int, nu: float) -> complex:
    """``(-1)^N e^{2 pi i N nu}`` for one determinant (CO, CS); ``e^{2 pi i N nu}`` for LM."""
    model = model.upper()
    if model not in MODELS:
        raise UnsupportedModelError(f"model must be one of {MODELS}, got {model!r}")
    sign = 1 if model == "LM" else (-1) ** (winding % 2)
    return sign * cmath.exp(2j * math.pi * winding * nu)


def is_invariant(ratio: complex, tol: float = 1e-8) -> bool:
    return abs(ratio - 1.0) < tol


def allowed_angular_momenta(model: str, lo: float, hi: float, chirality: Optional[int] = None) -> list[float]:
    """Values of ``nu`` (units of hbar) in ``[lo, hi]`` that keep the theory consistent.

    CO: half-odd integers. ``chirality=+1`` keeps the positive ones (spectrum
    of ``M+``), ``-1`` the negative ones (``M-``), and ``None`` both signs.
    LM: integers. ``chirality`` is ignored.
    """
    model = model.upper()
    if model == "LM":
        return [float(n) for n in range(math.ceil(lo), math.floor(hi) + 1)]
    if model not in ("CO", "CS"):
        raise UnsupportedModelError(f"unknown model {model!r}")
    vals = [n + 0.5 for n in range(math.ceil(lo - 0.5), math.floor(hi - 0.5) + 1)]
    if chirality is not None:
        vals = [v for v in vals if v * chirality > 0]
    return vals


def write_anomaly_report(rows: Iterable[tuple[str, int, float, complex]], fh, tol: float = 1e-8) -> None:
    """CSV ``model,N,nu,ratio_re,ratio_im,invariant``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["model", "N", "nu", "ratio_re", "ratio_im", "invariant"])
    for model, n, nu, ratio in rows:
        w.writerow([model, n, format(nu, ".17g"), format(ratio.real, ".17g"), format(ratio.imag, ".17g"),
                    str(is_invariant(ratio, tol)).lower()])

"""Classical dynamics of the Landau model, the chiral oscillator and the
restricted Rydberg dipole.

Orientation convention: ``eps[0, 1] = +1``. With the printed signs every
model below circulates counterclockwise, and the Landau orbit centre is
``x - (m/g) eps v``.

All three Lagrangians are special cases of::

    L = (m/2) xdot.xdot + (c/2) eps_ij x_i xdot_j - (k/2) x.x,   c = cs_sign * g

whose Euler-Lagrange equations read ``m xddot = c eps xdot - k x``. The
Landau model has ``k = 0`` and ``cs_sign = -1``; the chiral oscillator has
``m = 0`` and ``cs_sign = +1``; the Rydberg model keeps all three terms with
``cs_sign = +1``.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import (
    DivergenceError,
    InvalidStateError,
    StepTooLargeError,
    UnsupportedModelError,
)

EPS = np.array([[0.0, 1.0], [-1.0, 0.0]])
"""Levi-Civita symbol as a matrix, ``(EPS @ v)_i = eps_ij v_j``."""


class Model(str, enum.Enum):
    LM = "LM"
    CO = "CO"
    RYDBERG = "RYDBERG"
    MASTER = "MASTER"


_DEFAULT_CS_SIGN = {Model.LM: -1, Model.CO: +1, Model.RYDBERG: +1, Model.MASTER: +1}


@dataclass(frozen=True)
class ModelParams:
    """Physical constants shared by every module.

    Parameters
    ----------
    m, g, k : float
        Mass, Chern-Simons coupling and harmonic strength, all > 0.
    hbar : float
        Action scale; only the quantum modules use it.
    cs_sign : int or None
        Overrides the sign of the Chern-Simons term for every model. ``None``
        keeps each model's printed sign (``-1`` for LM, ``+1`` otherwise).
    strict : bool
        Positivity checks. Switch off only to probe degenerate limits such as
        ``g = 0`` or ``k = 0``.
    """

    m: float = 1.0
    g: float = 1.0
    k: float = 1.0
    hbar: float = 1.0
    cs_sign: Optional[int] = None
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        for name in ("m", "g", "k", "hbar"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise InvalidStateError(f"{name} must be finite, got {val!r}")
            if self.strict and val <= 0:
                raise InvalidStateError(f"{name} must be > 0, got {val!r}")
        if self.cs_sign not in (None, 1, -1):
            raise InvalidStateError(f"cs_sign must be +1, -1 or None, got {self.cs_sign!r}")

    @property
    def omega_lm(self) -> float:
        return self.g / self.m

    @property
    def omega_co(self) -> float:
        return self.k / self.g

    @property
    def omega(self) -> float:
        """Common frequency; only meaningful when :meth:`duality_tuned`."""
        return self.omega_co

    def duality_tuned(self, rel_tol: float = 1e-12) -> bool:
        """True iff ``|g**2 - k m| <= rel_tol * k m``."""
        km = self.k * self.m
        return abs(self.g**2 - km) <= rel_tol * km

    def sign_for(self, model: Model | str) -> int:
        if self.cs_sign is not None:
            return self.cs_sign
        return _DEFAULT_CS_SIGN[Model(model)]

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def tuned(cls, g: float = 1.0, k: float = 1.0, hbar: float = 1.0) -> "ModelParams":
        """Parameters with ``m = g**2 / k`` so that both frequencies agree."""
        return cls(m=g * g / k, g=g, k=k, hbar=hbar)


@dataclass(frozen=True)
class PhaseState:
    """A single planar sample. ``v`` is ``None`` for first-order models."""

    x: np.ndarray
    v: Optional[np.ndarray] = None
    t: float = 0.0

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64).reshape(-1)
        if x.shape != (2,):
            raise InvalidStateError(f"position must be a 2-vector, got shape {x.shape}")
        if not np.all(np.isfinite(x)) or not math.isfinite(self.t):
            raise InvalidStateError("state contains non-finite values")
        object.__setattr__(self, "x", x)
        if self.v is not None:
            v = np.array(self.v, dtype=np.float64).reshape(-1)
            if v.shape != (2,):
                raise InvalidStateError(f"velocity must be a 2-vector, got shape {v.shape}")
            if not np.all(np.isfinite(v)):
                raise InvalidStateError("state contains non-finite values")
            object.__setattr__(self, "v", v)

    def rotated(self, theta: float) -> "PhaseState":
        R = rotation_matrix(theta)
        return PhaseState(R @ self.x, None if self.v is None else R @ self.v, self.t)


@dataclass(frozen=True)
class Trajectory:
    """Samples on a uniform time grid, stored column-wise.

    ``x`` has shape ``(n, 2)``; ``v`` is ``(n, 2)`` or ``None`` for the CO. For
    the MASTER model ``x`` and ``v`` hold the auxiliary coordinate ``y`` and its
    velocity.
    """

    model: Model
    params: ModelParams
    t: np.ndarray
    x: np.ndarray
    v: Optional[np.ndarray]
    dt: float

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> PhaseState:
        return PhaseState(self.x[i], None if self.v is None else self.v[i], float(self.t[i]))

    @property
    def samples(self) -> list[PhaseState]:
        return [self[i] for i in range(len(self))]

    @property
    def final(self) -> PhaseState:
        return self[-1]


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _check_state(state: PhaseState, needs_velocity: bool) -> None:
    if needs_velocity and state.v is None:
        raise InvalidStateError("this model is second order; the state needs a velocity")
    if not needs_velocity and state.v is not None:
        raise InvalidStateError("the chiral oscillator is first order; its state carries no velocity")


def lm_rhs(state: PhaseState, params: ModelParams) -> np.ndarray:
    """Landau-model acceleration, ``m xddot = c eps xdot`` with ``c = -g`` by default."""
    _check_state(state, True)
    c = params.sign_for(Model.LM) * params.g
    return (c / params.m) * (EPS @ state.v)


def co_rhs(state: PhaseState, params: ModelParams) -> np.ndarray:
    """Chiral-oscillator velocity solving ``c eps xdot = k x``."""
    _check_state(state, False)
    c = params.sign_for(Model.CO) * params.g
    if c == 0:
        raise InvalidStateError("g = 0 leaves the chiral oscillator without dynamics")
    # eps^-1 = -eps
    return -(params.k / c) * (EPS @ state.x)


def rydberg_rhs(state: PhaseState, params: ModelParams) -> np.ndarray:
    """Acceleration of the restricted dipole, kinetic + CS + harmonic."""
    _check_state(state, True)
    c = params.sign_for(Model.RYDBERG) * params.g
    return (c * (EPS @ state.v) - params.k * state.x) / params.m


def generator(model: Model | str, params: ModelParams) -> np.ndarray:
    """Matrix ``A`` with ``d/dt state = A state``.

    The state is ``(x1, x2)`` for the CO and ``(x1, x2, v1, v2)`` otherwise.
    Each column is obtained by feeding a unit state through the matching
    ``*_rhs`` function, so the integrator cannot drift from the force laws.
    """
    model = Model(model)
    if model is Model.CO:
        A = np.zeros((2, 2))
        for j in range(2):
            A[:, j] = co_rhs(PhaseState(np.eye(2)[j]), params)
        return A
    if model is Model.MASTER:
        from . import duality

        rhs = duality.master_rhs
    else:
        rhs = {Model.LM: lm_rhs, Model.RYDBERG: rydberg_rhs}[model]
    A = np.zeros((4, 4))
    A[0:2, 2:4] = np.eye(2)
    for j in range(4):
        e = np.eye(4)[j]
        A[2:4, j] = rhs(PhaseState(e[:2], e[2:]), params)
    return A


def shortest_period(model: Model | str, params: ModelParams) -> float:
    """Shortest oscillation period of the linear system (``inf`` if static)."""
    lam = np.linalg.eigvals(generator(model, params))
    w = float(np.max(np.abs(lam.imag)))
    return math.inf if w == 0 else 2 * math.pi / w


def integrate(
    model: Model | str,
    state0: PhaseState,
    params: ModelParams,
    t_end: float,
    dt: float,
) -> Trajectory:
    """Fixed-step RK4 from ``state0.t`` to ``state0.t + t_end``.

    The number of steps is ``round(t_end / dt)``; ``t_end`` must be a whole
    multiple of ``dt`` to within 1e-9 relative.

    Raises
    ------
    StepTooLargeError
        If ``dt`` is at least a tenth of the shortest period of the model.
    DivergenceError
        If the integration produced non-finite values.
    """
    model = Model(model)
    if not (dt > 0 and t_end > 0) or not (math.isfinite(dt) and math.isfinite(t_end)):
        raise InvalidStateError("dt and t_end must be positive and finite")
    _check_state(state0, model is not Model.CO)
    period = shortest_period(model, params)
    if dt >= period / 10:
        raise StepTooLargeError(
            f"dt={dt:g} is not below period/10={period / 10:g} for model {model.value}"
        )
    nsteps = int(round(t_end / dt))
    if nsteps < 1 or abs(nsteps * dt - t_end) > 1e-9 * t_end:
        raise InvalidStateError("t_end must be a whole number of steps")

    A = generator(model, params)
    y0 = state0.x if model is Model.CO else np.concatenate([state0.x, state0.v])
    Y = kernels.rk4_linear(np.ascontiguousarray(A), np.ascontiguousarray(y0), float(dt), nsteps)
    if not np.all(np.isfinite(Y)):
        raise DivergenceError(f"{model.value} integration diverged")
    t = state0.t + dt * np.arange(nsteps + 1)
    v = None if model is Model.CO else Y[:, 2:4].copy()
    return Trajectory(model, params, t, Y[:, 0:2].copy(), v, float(dt))


def orbit_center(state: PhaseState, params: ModelParams) -> np.ndarray:
    """Fixed centre of the Landau orbit through ``state``."""
    _check_state(state, True)
    c = params.sign_for(Model.LM) * params.g
    # vdot = (c/m) eps v and eps^2 = -1 give x - centre = -(m/c) eps v
    return state.x + (params.m / c) * (EPS @ state.v)


def analytic_positions(
    model: Model | str, state0: PhaseState, params: ModelParams, times: Iterable[float]
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Closed-form circular motion sampled at ``times``; returns ``(x, v)``."""
    model = Model(model)
    times = np.asarray(list(times) if not isinstance(times, np.ndarray) else times, dtype=float)
    tau = times - state0.t
    if model is Model.CO:
        _check_state(state0, False)
        w = params.k / (params.sign_for(Model.CO) * params.g)
        x = _rotate_many(state0.x, w * tau)
        return x, None
    if model is Model.LM:
        _check_state(state0, True)
        w = -params.sign_for(Model.LM) * params.g / params.m
        c = orbit_center(state0, params)
        x = c + _rotate_many(state0.x - c, w * tau)
        v = _rotate_many(state0.v, w * tau)
        return x, v
    raise UnsupportedModelError(f"no closed form for model {model.value}")


def analytic_solution(
    model: Model | str, state0: PhaseState, params: ModelParams, t: float
) -> PhaseState:
    """Exact circular-motion state at time ``t`` (LM or CO only)."""
    x, v = analytic_positions(model, state0, params, [t])
    return PhaseState(x[0], None if v is None else v[0], float(t))


def _rotate_many(vec: np.ndarray, angles: np.ndarray) -> np.ndarray:
    c, s = np.cos(angles), np.sin(angles)
    return np.stack([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]], axis=-1)


def lm_energy(traj: Trajectory) -> np.ndarray:
    return 0.5 * traj.params.m * np.sum(traj.v**2, axis=1)


def co_constraint_residual(traj: Trajectory) -> np.ndarray:
    """``c eps xdot - k x`` on interior samples, ``xdot`` by central differences."""
    p = traj.params
    c = p.sign_for(Model.CO) * p.g
    xdot = (traj.x[2:] - traj.x[:-2]) / (2 * traj.dt)
    return c * (xdot @ EPS.T) - p.k * traj.x[1:-1]


def oscillation_period(t: np.ndarray, signal: np.ndarray) -> float:
    """Mean spacing of upward crossings of ``signal`` through its midrange.

    Only crossings in one direction are used, so a constant offset in the
    midrange estimate does not bias the result.
    """
    s = np.asarray(signal, dtype=float)
    s = s - 0.5 * (s.max() + s.min())
    idx = np.nonzero((s[:-1] < 0) & (s[1:] >= 0))[0]
    if len(idx) < 2:
        raise ValueError("need at least two upward crossings to measure a period")
    frac = -s[idx] / (s[idx + 1] - s[idx])
    tc = t[idx] + frac * (t[idx + 1] - t[idx])
    return float((tc[-1] - tc[0]) / (len(tc) - 1))


def rydberg_limit_study(
    state0: PhaseState,
    params: ModelParams,
    mass_scales: Sequence[float],
    t_end: Optional[float] = None,
    steps_per_period: int = 200,
    reference: str = "analytic",
) -> list[tuple[float, float]]:
    """Sup-norm distance between the Rydberg and CO trajectories as ``m`` shrinks.

    ``g`` and ``k`` stay fixed and the mass becomes ``params.m * scale`` for
    each entry of ``mass_scales``. The Rydberg run starts on the CO
    constraint surface, ``v0 = co_rhs(x0)``. ``t_end`` defaults to one CO
    period. ``reference`` selects the closed-form CO solution or an RK4 CO
    run on the same grid.

    Returns
    -------
    list of (m_scaled, deviation)
    """
    if len(mass_scales) == 0:
        raise ValueError("mass_scales must not be empty")
    if reference not in ("analytic", "integrated"):
        raise ValueError(f"unknown reference {reference!r}")
    x0 = PhaseState(state0.x, None, state0.t)
    v0 = co_rhs(x0, params)
    if t_end is None:
        t_end = 2 * math.pi / abs(params.omega_co)
    rows = []
    for scale in mass_scales:
        p = params.replace(m=params.m * float(scale))
        period = min(shortest_period(Model.RYDBERG, p), 2 * math.pi / abs(p.omega_co))
        nsteps = max(int(math.ceil(steps_per_period * t_end / period)), 1)
        dt = t_end / nsteps
        ryd = integrate(Model.RYDBERG, PhaseState(x0.x, v0, x0.t), p, t_end, dt)
        if reference == "analytic":
            ref, _ = analytic_positions(Model.CO, x0, p, ryd.t)
        else:
            ref = integrate(Model.CO, x0, p, t_end, dt).x
        rows.append((p.m, float(np.max(np.linalg.norm(ryd.x - ref, axis=1)))))
    return rows

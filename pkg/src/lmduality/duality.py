"""Canonical splitting of the Landau model into chiral sectors.

Starting from the first-order (Hamiltonian) form of the Landau model, the
linear change of variables::

    x = x_plus + x_minus,        2 p = g eps (x_minus - x_plus)

separates a chiral oscillator (``x_plus``, all the dynamics) from a pure
Chern-Simons sector (``x_minus``, the conserved orbit centre). The map is
canonical with ``{x+_i, x+_j} = -eps_ij / g`` and ``{x-_i, x-_j} = +eps_ij / g``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import EPS, Model, ModelParams, PhaseState, Trajectory
from .errors import EliminationError, InvalidStateError, SingularTransformError


@dataclass(frozen=True)
class CanonicalState:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for name in ("x", "p"):
            arr = np.array(getattr(self, name), dtype=np.float64).reshape(-1)
            if arr.shape != (2,) or not np.all(np.isfinite(arr)):
                raise InvalidStateError(f"{name} must be a finite 2-vector")
            object.__setattr__(self, name, arr)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])


@dataclass(frozen=True)
class ChiralDecomposition:
    x_plus: np.ndarray
    x_minus: np.ndarray

    def __post_init__(self):
        for name in ("x_plus", "x_minus"):
            arr = np.array(getattr(self, name), dtype=np.float64).reshape(-1)
            if arr.shape != (2,) or not np.all(np.isfinite(arr)):
                raise InvalidStateError(f"{name} must be a finite 2-vector")
            object.__setattr__(self, name, arr)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x_plus, self.x_minus])


def _lm_cs_coefficient(params: ModelParams) -> float:
    return params.sign_for(Model.LM) * params.g


def velocity_to_momentum(state: PhaseState, params: ModelParams) -> CanonicalState:
    """Legendre transform of the Landau model, ``p = m v + (c/2) eps^T x``.

    With the printed sign (``c = -g``) this is ``p_j = m v_j - (g/2) eps_ij x_i``.
    """
    if state.v is None:
        raise InvalidStateError("Landau state needs a velocity")
    c = _lm_cs_coefficient(params)
    return CanonicalState(state.x, params.m * state.v + 0.5 * c * (EPS.T @ state.x))


def momentum_to_velocity(cs: CanonicalState, params: ModelParams, t: float = 0.0) -> PhaseState:
    c = _lm_cs_coefficient(params)
    return PhaseState(cs.x, (cs.p - 0.5 * c * (EPS.T @ cs.x)) / params.m, t)


def transform_matrix(params: ModelParams) -> np.ndarray:
    """4x4 matrix taking ``(x, p)`` to ``(x_plus, x_minus)``.

    Solving ``x = x+ + x-`` and ``x- - x+ = (2/g) eps^-1 p = -(2/g) eps p``
    gives ``x+ = (x + (2/g) eps p)/2`` and ``x- = (x - (2/g) eps p)/2``.
    """
    if params.g == 0:
        raise SingularTransformError("g = 0 makes the chiral splitting singular")
    I = np.eye(2)
    B = EPS / params.g
    return np.block([[0.5 * I, B], [0.5 * I, -B]])


def inverse_transform_matrix(params: ModelParams) -> np.ndarray:
    """Inverse of :func:`transform_matrix`, written from the defining relations."""
    if params.g == 0:
        raise SingularTransformError("g = 0 makes the chiral splitting singular")
    I = np.eye(2)
    G = 0.5 * params.g * EPS
    return np.block([[I, I], [-G, G]])


def decompose(cs: CanonicalState, params: ModelParams) -> ChiralDecomposition:
    z = transform_matrix(params) @ cs.as_vector()
    return ChiralDecomposition(z[:2], z[2:])


def compose(d: ChiralDecomposition, params: ModelParams) -> CanonicalState:
    w = inverse_transform_matrix(params) @ d.as_vector()
    return CanonicalState(w[:2], w[2:])


def induced_brackets(params: ModelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Poisson brackets of the new coordinates from ``{x_i, p_j} = delta_ij``.

    Returns ``({x+_i, x+_j}, {x-_i, x-_j}, {x+_i, x-_j})`` as 2x2 matrices,
    computed as ``T J T^T`` with ``J`` the canonical Poisson tensor.
    """
    T = transform_matrix(params)
    J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    P = T @ J @ T.T
    return P[:2, :2], P[2:, 2:], P[:2, 2:]


def decompose_trajectory(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample ``(x_plus, x_minus)`` arrays of shape ``(n, 2)`` for an LM run."""
    if traj.model is not Model.LM:
        raise InvalidStateError("only Landau trajectories can be decomposed")
    params = traj.params
    c = _lm_cs_coefficient(params)
    P = params.m * traj.v + 0.5 * c * (traj.x @ EPS)
    Z = np.hstack([traj.x, P]) @ transform_matrix(params).T
    return Z[:, :2], Z[:, 2:]


def _check_master(params: ModelParams) -> None:
    if params.k == 0:
        raise EliminationError("k = 0: the auxiliary coordinate cannot be eliminated")
    if params.g == 0:
        raise EliminationError("g = 0: the master Lagrangian is degenerate")


def master_rhs(state: PhaseState, params: ModelParams) -> np.ndarray:
    """Acceleration of the master-Lagrangian coordinate ``y`` after eliminating ``x``.

    ``L = (g/2) eps y ydot + g eps x ydot + (k/2) x.x``. The coordinate ``x``
    enters without derivatives, so its equation of motion is algebraic,
    ``x = -(g/k) eps ydot``, and the ``y`` equation reduces to
    ``xdot + ydot = 0``. Together these give ``yddot = -(k/g) eps ydot``:
    Landau-type motion at frequency ``k/g``.
    """
    _check_master(params)
    if state.v is None:
        raise InvalidStateError("master state needs ydot")
    return -(params.k / params.g) * (EPS @ state.v)


def master_x(ydot, params: ModelParams) -> np.ndarray:
    """Reconstruct the eliminated coordinate; accepts ``(2,)`` or ``(n, 2)``."""
    _check_master(params)
    ydot = np.asarray(ydot, dtype=np.float64)
    return -(params.g / params.k) * (ydot @ EPS.T)

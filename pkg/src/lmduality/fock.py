"""Truncated Fock-space operators for the chiral sectors and the Landau model.

Every operator is assembled from coordinate matrices obeying the
noncommutative algebra ``[x1, x2] = -i hbar / g`` (CO sector) or
``+i hbar / g`` (CS sector); spectra are then obtained numerically.

Truncation edge: in a basis of ``dim`` states the product ``a a^dagger``
loses its last diagonal entry, so quadratic operators are wrong on the top
state. We keep the lowest ``dim - 2`` basis states per mode ("trusted") and
compute trusted spectra from the compression of the operator onto those
states. Taking the lowest ``dim - 2`` eigenvalues of the full matrix does not
work: the spurious edge eigenvalue of ``M+`` is ``hbar (dim - 1) / 2``, which
sits inside the trusted range.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classical import ModelParams
from .errors import DimensionMismatchError, InvalidStateError, TruncationError

HERMITIAN_TOL = 1e-14


class OperatorMatrix:
    """Dense complex operator on a (possibly two-mode) truncated Fock basis.

    Parameters
    ----------
    data : array_like
        Square matrix.
    dims : tuple of int
        Factor dimensions; ``(N,)`` for one mode, ``(N_plus, N_minus)`` for the
        two-mode space ordered plus-sector (x) minus-sector.
    hermitian : bool
        Declares the operator Hermitian; checked to ``1e-14`` relative to its
        largest entry.
    """

    __array_priority__ = 100

    def __init__(self, data, dims: Optional[Sequence[int]] = None, hermitian: bool = False, label: str = ""):
        data = np.array(data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {data.shape}")
        dims = tuple(int(d) for d in (dims if dims is not None else (data.shape[0],)))
        if math.prod(dims) != data.shape[0]:
            raise DimensionMismatchError(f"factor dims {dims} do not match size {data.shape[0]}")
        if hermitian:
            scale = max(1.0, float(np.max(np.abs(data))))
            if np.max(np.abs(data - data.conj().T)) > HERMITIAN_TOL * scale:
                raise InvalidStateError(f"operator {label or ''} flagged Hermitian but is not")
        data.setflags(write=False)
        self.data = data
        self.dims = dims
        self.hermitian = hermitian
        self.label = label

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def basis(self) -> str:
        if len(self.dims) == 1:
            return f"single-mode[{self.dims[0]}]"
        return "two-mode[plus(x)minus:" + "x".join(map(str, self.dims)) + "]"

    def __repr__(self):
        return f"OperatorMatrix({self.label or '?'}, {self.basis}, hermitian={self.hermitian})"

    def _check(self, other: "OperatorMatrix") -> None:
        if not isinstance(other, OperatorMatrix):
            raise TypeError(f"expected OperatorMatrix, got {type(other).__name__}")
        if other.dims != self.dims:
            raise DimensionMismatchError(f"basis mismatch: {self.basis} vs {other.basis}")

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.data.conj().T, self.dims, self.hermitian, self.label + "^dag")

    def __matmul__(self, other):
        self._check(other)
        return OperatorMatrix(self.data @ other.data, self.dims)

    def __add__(self, other):
        self._check(other)
        return OperatorMatrix(self.data + other.data, self.dims, self.hermitian and other.hermitian)

    def __sub__(self, other):
        self._check(other)
        return OperatorMatrix(self.data - other.data, self.dims, self.hermitian and other.hermitian)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            return NotImplemented
        herm = self.hermitian and np.isreal(scalar)
        return OperatorMatrix(self.data * scalar, self.dims, bool(herm), self.label)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __neg__(self):
        return self * -1.0

    def kron(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(
            np.kron(self.data, other.data),
            self.dims + other.dims,
            self.hermitian and other.hermitian,
        )

    def hermitian_part(self, label: str = "") -> "OperatorMatrix":
        """``(A + A^dagger)/2``, flagged Hermitian; removes rounding asymmetry."""
        return OperatorMatrix(0.5 * (self.data + self.data.conj().T), self.dims, True, label or self.label)

    def trusted_indices(self) -> np.ndarray:
        return trusted_indices(self.dims)

    def trusted_block(self) -> np.ndarray:
        idx = self.trusted_indices()
        return self.data[np.ix_(idx, idx)]

    def to_json(self) -> str:
        entries = [[[float(z.real), float(z.imag)] for z in row] for row in self.data]
        return json.dumps({"dim": self.dim, "basis": self.basis, "dims": list(self.dims), "entries": entries})


def identity(dims: Sequence[int]) -> OperatorMatrix:
    dims = tuple(dims)
    return OperatorMatrix(np.eye(math.prod(dims)), dims, True, "1")


def commutator(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    return A @ B - B @ A


def trusted_indices(dims: Sequence[int]) -> np.ndarray:
    """Flat indices of basis states with every occupation ``n <= N - 3``."""
    ranges = [np.arange(d) < d - 2 for d in dims]
    mask = ranges[0]
    for r in ranges[1:]:
        mask = np.kron(mask, r).astype(bool)
    return np.nonzero(mask)[0]


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    trusted: np.ndarray
    truncation_dim: int

    @property
    def trusted_count(self) -> int:
        return len(self.trusted)


def spectrum(op: OperatorMatrix) -> SpectrumReport:
    """Full and trusted eigenvalues of ``op``, each sorted ascending."""
    if op.hermitian:
        full = np.linalg.eigvalsh(op.data)
        trusted = np.linalg.eigvalsh(op.trusted_block())
    else:
        vals = np.linalg.eigvals(op.data)
        tvals = np.linalg.eigvals(op.trusted_block())
        if max(np.max(np.abs(vals.imag)), np.max(np.abs(tvals.imag), initial=0.0)) > 1e-12:
            raise InvalidStateError("operator has complex eigenvalues")
        full, trusted = np.sort(vals.real), np.sort(tvals.real)
    return SpectrumReport(full, trusted, op.dim)


def _check_dim(dim: int) -> None:
    if int(dim) != dim or dim < 2:
        raise DimensionMismatchError(f"truncation dimension must be an integer >= 2, got {dim!r}")


def ladder(dim: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Annihilation and creation matrices, ``a|n> = sqrt(n)|n-1>``."""
    _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    return OperatorMatrix(a, label="a"), OperatorMatrix(a.T, label="a^dag")


def co_coordinates(params: ModelParams, dim: int, chirality: int = +1) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Hermitian coordinate matrices with ``[x1, x2] = -chirality * i hbar / g``.

    For ``chirality=+1`` we set ``a = sqrt(g / 2 hbar) (x1 - i x2)``; then
    ``[a, a^dag] = (g / hbar) i [x1, x2] = 1``, i.e. ``x1 = s (a + a^dag)``
    and ``x2 = i s (a - a^dag)`` with ``s = sqrt(hbar / 2 g)``. The CS sector
    (``chirality=-1``) flips the sign of ``x2``.
    """
    _check_dim(dim)
    if chirality not in (1, -1):
        raise ValueError("chirality must be +1 or -1")
    a, ad = ladder(dim)
    s = math.sqrt(params.hbar / (2.0 * params.g))
    x1 = (s * (a + ad)).hermitian_part("x1")
    x2 = (chirality * 1j * s * (a - ad)).hermitian_part("x2")
    return x1, x2


def co_hamiltonian(params: ModelParams, dim: int) -> OperatorMatrix:
    """``H+ = (k/2)(x1^2 + x2^2)`` built from the coordinate matrices."""
    x1, x2 = co_coordinates(params, dim, +1)
    return (0.5 * params.k * (x1 @ x1 + x2 @ x2)).hermitian_part("H+")


def co_angular_momentum(params: ModelParams, dim: int) -> OperatorMatrix:
    """``M+ = H+ / omega`` with ``omega = k / g``."""
    return (co_hamiltonian(params, dim) / params.omega_co).hermitian_part("M+")


def cs_angular_momentum(params: ModelParams, dim: int) -> OperatorMatrix:
    """``M- = -(g/2)(x1^2 + x2^2)`` on the opposite-chirality coordinates."""
    x1, x2 = co_coordinates(params, dim, -1)
    return (-0.5 * params.g * (x1 @ x1 + x2 @ x2)).hermitian_part("M-")


def cs_hamiltonian(params: ModelParams, dim: int) -> OperatorMatrix:
    _check_dim(dim)
    return OperatorMatrix(np.zeros((dim, dim)), hermitian=True, label="H-")


def lm_operators(params: ModelParams, dim_plus: int, dim_minus: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """``(H_LM, M_LM)`` on the plus (x) minus two-mode space."""
    Hp = co_hamiltonian(params, dim_plus)
    Mp = co_angular_momentum(params, dim_plus)
    Hm = cs_hamiltonian(params, dim_minus)
    Mm = cs_angular_momentum(params, dim_minus)
    Ip, Im = identity(Hp.dims), identity(Hm.dims)
    H = (Hp.kron(Im) + Ip.kron(Hm)).hermitian_part("H_LM")
    M = (Mp.kron(Im) + Ip.kron(Mm)).hermitian_part("M_LM")
    return H, M


def rotation_operator(M: OperatorMatrix, alpha: float, hbar: float = 1.0) -> OperatorMatrix:
    """``exp(i alpha M / hbar)`` via Hermitian eigendecomposition."""
    scale = max(1.0, float(np.max(np.abs(M.data))))
    if np.max(np.abs(M.data - M.data.conj().T)) > HERMITIAN_TOL * scale:
        raise InvalidStateError("rotation generator must be Hermitian")
    w, V = np.linalg.eigh(0.5 * (M.data + M.data.conj().T))
    U = (V * np.exp(1j * alpha * w / hbar)) @ V.conj().T
    return OperatorMatrix(U, M.dims, label=f"R({alpha:g})")


class QuantumState:
    """Density matrix on a Fock basis: Hermitian, unit trace, positive."""

    def __init__(self, density, dims: Optional[Sequence[int]] = None):
        rho = np.array(density, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionMismatchError("density matrix must be square")
        dims = tuple(dims) if dims is not None else (rho.shape[0],)
        if math.prod(dims) != rho.shape[0]:
            raise DimensionMismatchError(f"factor dims {dims} do not match size {rho.shape[0]}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise InvalidStateError(f"density matrix trace is {np.trace(rho).real:.3e}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -1e-12:
            raise InvalidStateError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        self.density = rho
        self.dims = dims

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    @classmethod
    def pure(cls, psi, dims: Optional[Sequence[int]] = None) -> "QuantumState":
        psi = np.asarray(psi, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    @classmethod
    def fock(cls, dims: Sequence[int], occupation: Sequence[int]) -> "QuantumState":
        """Projector onto the product Fock state ``|n_1> (x) |n_2> ...``."""
        dims = tuple(dims)
        idx = int(np.ravel_multi_index(tuple(occupation), dims))
        psi = np.zeros(math.prod(dims))
        psi[idx] = 1.0
        return cls.pure(psi, dims)

    def expect(self, op: OperatorMatrix) -> complex:
        if op.dims != self.dims:
            raise DimensionMismatchError("operator and state live on different bases")
        return complex(np.trace(op.data @ self.density))


def thermal_state(H: OperatorMatrix, beta: float, tail_tol: float = 1e-12) -> QuantumState:
    """Gibbs state ``exp(-beta H) / Z`` restricted to the trusted subspace.

    The two truncation-edge states per mode carry wrong energies and are
    given zero weight. The Boltzmann weight of the highest kept level is used
    as the tail estimate and must stay below ``tail_tol``.

    Raises
    ------
    TruncationError
        If the tail estimate exceeds ``tail_tol``; increase ``dim``.
    """
    if not beta > 0:
        raise InvalidStateError("beta must be positive")
    if not H.hermitian:
        raise InvalidStateError("Hamiltonian must be Hermitian")
    idx = H.trusted_indices()
    w, V = np.linalg.eigh(H.trusted_block())
    boltz = np.exp(-beta * (w - w[0]))
    p = boltz / boltz.sum()
    if p[-1] > tail_tol:
        raise TruncationError(
            f"partition-sum tail {p[-1]:.2e} exceeds {tail_tol:.0e}; increase the truncation dimension"
        )
    rho = np.zeros((H.dim, H.dim), dtype=np.complex128)
    block = (V * p) @ V.conj().T
    rho[np.ix_(idx, idx)] = 0.5 * (block + block.conj().T)
    return QuantumState(rho, H.dims)

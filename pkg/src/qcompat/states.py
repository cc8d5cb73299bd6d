"""Dense foundations: validated states, effects, subspaces, seeded generators.

Everything here is plain numpy on small dense complex matrices (dimension at
most 64). Objects are frozen after construction and carry their spectral
decomposition, so downstream formulas never re-diagonalize.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidRankError,
    NotAnEffectError,
    NotHermitianError,
    NotPSDError,
    NotUnitaryError,
    NotUnitVectorError,
    TraceNotOneError,
)

DEFAULT_EPS_RANK = 1e-10
DEFAULT_EPS_MEM = 1e-8
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12
TRACE_TOL = 1e-12
UNITARY_TOL = 1e-10
MAX_DIM = 64


def as_rng(seed) -> np.random.Generator:
    """Accept an integer seed or a ready generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def child_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic substream of ``seed`` addressed by an integer key path."""
    entropy = int(seed) & ((1 << 63) - 1)
    seq = np.random.SeedSequence(entropy=entropy, spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)


def _square_complex(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if not 1 <= m.shape[0] <= MAX_DIM:
        raise DimensionMismatchError(
            f"dimension {m.shape[0]} outside the supported range 1..{MAX_DIM}"
        )
    return m


def hermitian_defect(matrix: np.ndarray) -> float:
    return float(np.abs(matrix - matrix.conj().T).max())


def _spectral(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # eigh of the hermitized matrix; eigenpairs reordered to descending
    w, v = np.linalg.eigh((matrix + matrix.conj().T) / 2.0)
    order = np.argsort(w, kind="stable")[::-1]
    return w[order], v[:, order]


@dataclass(frozen=True)
class DensityOperator:
    """Trace-one PSD matrix with cached eigensystem (descending eigenvalues)."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    numerical_rank: int
    eps_rank: float = DEFAULT_EPS_RANK

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Effect:
    """Hermitian matrix with spectrum in [0, 1], spectrally cached."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    numerical_rank: int
    eps_rank: float = DEFAULT_EPS_RANK

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PureState:
    """Unit vector together with its rank-one projection."""

    vector: np.ndarray
    projection: np.ndarray

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: np.ndarray  # orthonormal columns

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class SymmetryOp:
    """A unitary, optionally composed with coordinate-wise conjugation."""

    u: np.ndarray
    antiunitary: bool = False

    @property
    def dim(self) -> int:
        return self.u.shape[0]


def validate_density(matrix, eps_rank: float = DEFAULT_EPS_RANK) -> DensityOperator:
    """Check Hermiticity, positivity and unit trace; cache the eigensystem.

    Eigenvalues in [-1e-12, 0) are clamped to zero; anything lower raises.
    The numerical rank counts eigenvalues above ``eps_rank`` relative to the
    largest one.
    """
    m = _square_complex(matrix)
    defect = hermitian_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotHermitianError(f"Hermiticity defect {defect:.3e} exceeds {HERMITIAN_TOL}")
    w, v = _spectral(m)
    if w[-1] < -PSD_TOL:
        raise NotPSDError(f"lowest eigenvalue {w[-1]:.3e} below -{PSD_TOL}")
    trace = float(np.real(np.trace(m)))
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceNotOneError(f"trace {trace!r} differs from 1 beyond {TRACE_TOL}")
    w = np.clip(w, 0.0, None)
    rank = int(np.count_nonzero(w > eps_rank * w[0])) if w[0] > 0.0 else 0
    return DensityOperator(m, w, v, rank, float(eps_rank))


def validate_effect(matrix, eps_rank: float = DEFAULT_EPS_RANK) -> Effect:
    """Check Hermiticity and that the spectrum sits in [0, 1]."""
    m = _square_complex(matrix)
    defect = hermitian_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotHermitianError(f"Hermiticity defect {defect:.3e} exceeds {HERMITIAN_TOL}")
    w, v = _spectral(m)
    if w[-1] < -PSD_TOL:
        raise NotPSDError(f"lowest eigenvalue {w[-1]:.3e} below -{PSD_TOL}")
    if w[0] > 1.0 + PSD_TOL:
        raise NotAnEffectError(f"largest eigenvalue {w[0]!r} exceeds 1 beyond {PSD_TOL}")
    w = np.clip(w, 0.0, 1.0)
    rank = int(np.count_nonzero(w > eps_rank * w[0])) if w[0] > 0.0 else 0
    return Effect(m, w, v, rank, float(eps_rank))


def as_effect(op) -> Effect:
    """View a density operator (or raw matrix) as an effect."""
    if isinstance(op, Effect):
        return op
    if isinstance(op, DensityOperator):
        return Effect(op.matrix, op.eigenvalues, op.eigenvectors, op.numerical_rank, op.eps_rank)
    return validate_effect(op)


def pure_state(vector, normalize: bool = False) -> PureState:
    """Build a pure state; with ``normalize`` the vector is rescaled first."""
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    if not 1 <= v.shape[0] <= MAX_DIM:
        raise DimensionMismatchError(f"dimension {v.shape[0]} outside 1..{MAX_DIM}")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise NotUnitVectorError("zero vector cannot be normalized")
    if normalize:
        v = v / norm
    elif abs(norm - 1.0) > 1e-12:
        raise NotUnitVectorError(f"norm {norm!r} differs from 1 beyond 1e-12")
    return PureState(v, np.outer(v, v.conj()))


def subspace(basis, ambient_dim: int | None = None) -> Subspace:
    """Wrap a matrix of orthonormal columns as a subspace."""
    b = np.asarray(basis, dtype=np.complex128)
    if b.ndim != 2:
        raise DimensionMismatchError(f"expected a 2d basis array, got shape {b.shape}")
    ambient = int(ambient_dim if ambient_dim is not None else b.shape[0])
    if b.shape[0] != ambient:
        raise DimensionMismatchError("basis rows do not match the ambient dimension")
    if b.shape[1] > 0:
        gram = b.conj().T @ b
        defect = float(np.abs(gram - np.eye(b.shape[1])).max())
        if defect > UNITARY_TOL:
            raise NotUnitaryError(f"basis columns not orthonormal, defect {defect:.3e}")
    return Subspace(ambient, b)


def symmetry_op(u, antiunitary: bool = False) -> SymmetryOp:
    m = _square_complex(u)
    defect = float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())
    if defect > UNITARY_TOL:
        raise NotUnitaryError(f"unitarity defect {defect:.3e} exceeds {UNITARY_TOL}")
    return SymmetryOp(m, bool(antiunitary))


def sqrt_psd(op: DensityOperator | Effect) -> np.ndarray:
    """PSD square root from the cached spectral decomposition."""
    root = (op.eigenvectors * np.sqrt(op.eigenvalues)) @ op.eigenvectors.conj().T
    return (root + root.conj().T) / 2.0


def support(op: DensityOperator | Effect) -> Subspace:
    """Span of the eigenvectors above the rank threshold."""
    return Subspace(op.dim, op.eigenvectors[:, : op.numerical_rank].copy())


def kernel_overlap_sq(op: DensityOperator | Effect, phi: PureState) -> float:
    """Squared norm of the component of ``phi`` inside the kernel eigenspace."""
    if phi.dim != op.dim:
        raise DimensionMismatchError(f"vector dim {phi.dim} != operator dim {op.dim}")
    kernel = op.eigenvectors[:, op.numerical_rank :]
    if kernel.shape[1] == 0:
        return 0.0
    coeffs = kernel.conj().T @ phi.vector
    return float(np.real(np.vdot(coeffs, coeffs)))


def range_membership(op: DensityOperator | Effect, phi: PureState, eps_mem: float = DEFAULT_EPS_MEM) -> bool:
    """True when ``phi`` has no component in the kernel beyond ``eps_mem``."""
    return kernel_overlap_sq(op, phi) <= eps_mem


def subspace_intersection_dim(u: Subspace, v: Subspace, eps_rank: float = DEFAULT_EPS_RANK) -> int:
    """dim U + dim V minus the numerical rank of the stacked bases."""
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatchError("subspaces live in different ambient dimensions")
    if u.dim == 0 or v.dim == 0:
        return 0
    stacked = np.hstack([u.basis, v.basis])
    sigma = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.count_nonzero(sigma > eps_rank * sigma[0]))
    return max(u.dim + v.dim - rank, 0)


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary via phase-corrected QR of a Gaussian matrix."""
    rng = as_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(dim: int, rank: int, seed) -> DensityOperator:
    """Random state of exact numerical rank.

    Spectrum is Dirichlet-like with a floor of 0.05/(1 + 0.05 rank) so the
    requested rank never collapses through the rank threshold.
    """
    if not 1 <= dim <= MAX_DIM:
        raise DimensionMismatchError(f"dimension {dim} outside 1..{MAX_DIM}")
    if not 1 <= rank <= dim:
        raise InvalidRankError(f"rank {rank} outside 1..{dim}")
    rng = as_rng(seed)
    v = haar_unitary(dim, rng)
    raw = rng.dirichlet(np.ones(rank))
    lam = (raw + 0.05) / (1.0 + 0.05 * rank)
    lam = np.sort(lam)[::-1]
    lam = lam / lam.sum()
    m = (v[:, :rank] * lam) @ v[:, :rank].conj().T
    return validate_density((m + m.conj().T) / 2.0)


def random_pure(dim: int, seed) -> PureState:
    if not 1 <= dim <= MAX_DIM:
        raise DimensionMismatchError(f"dimension {dim} outside 1..{MAX_DIM}")
    rng = as_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return pure_state(z, normalize=True)


def random_symmetry(dim: int, antiunitary: bool = False, seed=0) -> SymmetryOp:
    if not 1 <= dim <= MAX_DIM:
        raise DimensionMismatchError(f"dimension {dim} outside 1..{MAX_DIM}")
    return symmetry_op(haar_unitary(dim, seed), antiunitary)

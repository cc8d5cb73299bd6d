"""Largest ray weight dominated by an effect, and its bisection cross-check.

For an effect T and a unit vector phi, the quantity computed here is

    sup { t in [0, 1] : t * |phi><phi| <= T },

which is finite and positive exactly when phi lies in the range of sqrt(T).
The closed form runs through the spectral decomposition of T; the oracle
re-derives the same number by bisecting on the smallest eigenvalue of
T - t * |phi><phi| and is kept deliberately independent of the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidWeightsError
from .states import (
    DEFAULT_EPS_MEM,
    PureState,
    as_effect,
    as_rng,
    pure_state,
    random_pure,
)

# rays whose squared kernel component lands in (eps_mem, NEAR_BOUNDARY_SQ]
# get value 0 but are flagged: the value jumps discontinuously there
NEAR_BOUNDARY_SQ = 1e-4
PSD_FLOOR = -1e-13
BISECTION_MAX_ITER = 80


@dataclass(frozen=True)
class StrengthResult:
    value: float
    in_range: bool
    near_boundary: bool = False


def strength(effect, phi: PureState, eps_mem: float = DEFAULT_EPS_MEM) -> StrengthResult:
    """Spectral closed form: 1 / sum_i |<e_i, phi>|^2 / t_i over the support."""
    t = as_effect(effect)
    if phi.dim != t.dim:
        raise DimensionMismatchError(f"vector dim {phi.dim} != effect dim {t.dim}")
    coeffs = t.eigenvectors.conj().T @ phi.vector
    weights = np.abs(coeffs) ** 2
    on_support = np.zeros(t.dim, dtype=bool)
    on_support[: t.numerical_rank] = True
    kernel_sq = float(weights[~on_support].sum())
    if kernel_sq > eps_mem:
        return StrengthResult(0.0, False, kernel_sq <= NEAR_BOUNDARY_SQ)
    denom = float((weights[on_support] / t.eigenvalues[on_support]).sum())
    if denom <= 0.0:
        return StrengthResult(0.0, False, False)
    return StrengthResult(min(1.0, 1.0 / denom), True, False)


def strength_oracle(effect, phi: PureState, tol: float = 1e-10) -> float:
    """Bisection on t of the smallest eigenvalue of T - t * |phi><phi|.

    Returns the largest t in [0, 1] whose floor eigenvalue stays above
    -1e-13, to absolute tolerance ``tol``. Independent of the closed form.
    """
    t = as_effect(effect)
    if phi.dim != t.dim:
        raise DimensionMismatchError(f"vector dim {phi.dim} != effect dim {t.dim}")
    tm = t.matrix
    pm = phi.projection

    def floor_eig(lam: float) -> float:
        return float(np.linalg.eigvalsh(tm - lam * pm)[0])

    if floor_eig(0.0) < PSD_FLOOR:
        return 0.0
    if floor_eig(1.0) >= PSD_FLOOR:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if floor_eig(mid) >= PSD_FLOOR:
            lo = mid
        else:
            hi = mid
    return lo


def two_state_formula(weight_low: float, weight_high: float, overlap: float) -> float:
    """Squared compatibility of a two-eigenvalue mixture with a ray in its support.

    For a state with spectral weights ``weight_low < weight_high`` on
    orthogonal rays P and Q, and a ray R in their span with tr(P R) =
    ``overlap``, the strength along R equals

        weight_low * weight_high / ((weight_high - weight_low) * overlap + weight_low).

    At overlap 1 (R = P) this is weight_low; at overlap 0 (R = Q), weight_high.
    """
    if not (0.0 < weight_low < weight_high < 1.0):
        raise InvalidWeightsError(
            f"weights must satisfy 0 < low < high < 1, got ({weight_low!r}, {weight_high!r})"
        )
    if abs(weight_low + weight_high - 1.0) > 1e-12:
        raise InvalidWeightsError(f"weights must sum to 1, got {weight_low + weight_high!r}")
    if overlap < -1e-12 or overlap > 1.0 + 1e-12:
        raise InvalidWeightsError(f"overlap {overlap!r} outside [0, 1]")
    x = min(max(float(overlap), 0.0), 1.0)
    return weight_low * weight_high / ((weight_high - weight_low) * x + weight_low)


def effects_equal_by_strength(first, second, n_rays: int = 50, seed=0, tol: float = 1e-8) -> bool:
    """Probe two effects along sampled rays and compare their strengths.

    The ray set always contains the eigenvector rays of both effects (random
    rays alone cannot separate effects with different supports, since the
    strength vanishes identically off-range), plus ``n_rays`` seeded random
    rays.
    """
    s = as_effect(first)
    t = as_effect(second)
    if s.dim != t.dim:
        raise DimensionMismatchError(f"effect dims differ: {s.dim} != {t.dim}")
    rng = as_rng(seed)
    rays = [pure_state(s.eigenvectors[:, k], normalize=True) for k in range(s.dim)]
    rays += [pure_state(t.eigenvectors[:, k], normalize=True) for k in range(t.dim)]
    rays += [random_pure(s.dim, rng) for _ in range(n_rays)]
    for ray in rays:
        if abs(strength(s, ray).value - strength(t, ray).value) > tol:
            return False
    return True

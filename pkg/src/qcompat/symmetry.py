"""Reconstruction of symmetries from pure-state data and its verification.

Given only the ray images of a small probe family (basis states, two-entry
superpositions, and one relative-phase state), `wigner_reconstruct` rebuilds
a unitary or antiunitary operator implementing the map, or raises
NotASymmetryError naming the probe that failed. `verify_theorem` closes the
loop for a full state map: reconstruct from pure probes, then confirm the
operator reproduces the map on mixed states and on strength functionals.

Also here: rank estimation through compatibility queries alone, and a purity
probe built from sampled incompatible sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    IncompleteMapError,
    NotASymmetryError,
    ValidationError,
)
from .states import (
    DensityOperator,
    PureState,
    SymmetryOp,
    child_rng,
    pure_state,
    random_density,
    random_pure,
    range_membership,
    symmetry_op,
    validate_density,
)
from .measure import is_compatible
from .strength import effects_equal_by_strength

_RAY_MATCH = 1.0 - 1e-10
_DUPLICATE_OVERLAP = 1.0 - 1e-8


def _require_dim2(dim: int) -> None:
    # the reconstruction story is vacuous on a one-dimensional space
    if dim < 2:
        raise ValidationError("symmetry operations need dim >= 2")


@dataclass(frozen=True)
class PureStateMap:
    """Finite list of (input ray, output ray) pairs, inputs pairwise distinct."""

    dim: int
    pairs: tuple[tuple[PureState, PureState], ...]


@dataclass(frozen=True)
class CharacterizationProbe:
    rank: int
    is_pure: bool
    consistent: bool
    witness: DensityOperator | None
    n_ic_sampled: int
    n_double_ic: int


@dataclass(frozen=True)
class VerificationResult:
    verdict: bool
    symmetry: SymmetryOp
    max_error: float
    n_states: int
    failures: tuple[str, ...]


def transition_prob(p: PureState, q: PureState) -> float:
    if p.dim != q.dim:
        raise DimensionMismatchError(f"pure state dims differ: {p.dim} != {q.dim}")
    return float(abs(np.vdot(p.vector, q.vector)) ** 2)


def independent(pures) -> bool:
    """True iff the vectors of the pure states are linearly independent."""
    pures = list(pures)
    if not pures:
        raise ValidationError("independence needs at least one pure state")
    dim = pures[0].dim
    for p in pures:
        if p.dim != dim:
            raise DimensionMismatchError("pure states must share one dimension")
    m = np.column_stack([p.vector for p in pures])
    s = np.linalg.svd(m, compute_uv=False)
    rank = int(np.count_nonzero(s > 1e-10 * s[0])) if s[0] > 0 else 0
    return rank == len(pures)


def pure_state_map(pairs) -> PureStateMap:
    pairs = tuple((p, q) for p, q in pairs)
    if not pairs:
        raise ValidationError("map needs at least one pair")
    dim = pairs[0][0].dim
    _require_dim2(dim)
    for p, q in pairs:
        if p.dim != dim or q.dim != dim:
            raise DimensionMismatchError("all map entries must share one dimension")
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if abs(np.vdot(pairs[i][0].vector, pairs[j][0].vector)) ** 2 > _DUPLICATE_OVERLAP:
                raise ValidationError(f"duplicate input ray at pairs {i} and {j}")
    return PureStateMap(dim, pairs)


def probe_pure_states(dim: int) -> list[tuple[str, PureState]]:
    """Probe family determining a symmetry: basis, pair, and phase states."""
    _require_dim2(dim)
    probes = []
    eye = np.eye(dim, dtype=np.complex128)
    for i in range(dim):
        probes.append((f"basis-{i}", pure_state(eye[i])))
    for j in range(1, dim):
        probes.append((f"pair-0-{j}", pure_state((eye[0] + eye[j]) / np.sqrt(2.0))))
    probes.append(("imag-0-1", pure_state((eye[0] + 1j * eye[1]) / np.sqrt(2.0))))
    return probes


def transform_pure(sym: SymmetryOp, p: PureState) -> PureState:
    v = p.vector.conj() if sym.antiunitary else p.vector
    return pure_state(sym.u @ v, normalize=True)


def apply_symmetry(sym: SymmetryOp, state: DensityOperator) -> DensityOperator:
    m = state.matrix.conj() if sym.antiunitary else state.matrix
    return validate_density(sym.u @ m @ sym.u.conj().T)


def symmetry_probe_map(sym: SymmetryOp) -> PureStateMap:
    pairs = [(p, transform_pure(sym, p)) for _, p in probe_pure_states(sym.u.shape[0])]
    return pure_state_map(pairs)


def symmetry_overlap(first: SymmetryOp, second: SymmetryOp) -> float:
    """Gauge-invariant agreement |tr(U1^dag U2)| / d; 0 for mixed kinds."""
    if first.antiunitary != second.antiunitary:
        return 0.0
    d = first.u.shape[0]
    if second.u.shape[0] != d:
        raise DimensionMismatchError("symmetry dims differ")
    return float(abs(np.trace(first.u.conj().T @ second.u)) / d)


def _match_probe(pmap: PureStateMap, target: PureState) -> PureState | None:
    for p, q in pmap.pairs:
        if abs(np.vdot(p.vector, target.vector)) ** 2 >= _RAY_MATCH:
            return q
    return None


def wigner_reconstruct(pmap: PureStateMap, dim: int | None = None, tol: float = 1e-8) -> SymmetryOp:
    """Rebuild the implementing operator from probe images.

    Raises IncompleteMapError when a required probe input is absent, and
    NotASymmetryError (with the offending probe id) when transition
    probabilities are not preserved, the phase data fits neither the unitary
    nor the antiunitary branch, or the assembled operator fails to reproduce
    some pair of the map.
    """
    d = pmap.dim
    if dim is not None and dim != d:
        raise DimensionMismatchError(f"map dimension {d} does not match requested {dim}")

    # transition probabilities must already match on every input pair
    n = len(pmap.pairs)
    for i in range(n):
        for j in range(i + 1, n):
            t_in = transition_prob(pmap.pairs[i][0], pmap.pairs[j][0])
            t_out = transition_prob(pmap.pairs[i][1], pmap.pairs[j][1])
            if abs(t_in - t_out) > tol:
                raise NotASymmetryError(
                    f"transition probability broken between inputs {i} and {j}: "
                    f"{t_in:.6f} -> {t_out:.6f}",
                    probe=f"overlap-{i}-{j}",
                )

    images: dict[str, PureState] = {}
    for label, probe in probe_pure_states(d):
        out = _match_probe(pmap, probe)
        if out is None:
            raise IncompleteMapError(f"map lacks an input matching probe {label}")
        images[label] = out

    cols = np.zeros((d, d), dtype=np.complex128)
    f0 = images["basis-0"].vector
    nz = np.flatnonzero(np.abs(f0) > 1e-8)[0]
    cols[:, 0] = f0 * (f0[nz].conj() / abs(f0[nz]))

    for j in range(1, d):
        fj = images[f"basis-{j}"].vector
        gj = images[f"pair-0-{j}"].vector
        a = np.vdot(cols[:, 0], gj)
        b = np.vdot(fj, gj)
        if abs(a) < 0.1 or abs(b) < 0.1:
            raise NotASymmetryError(
                f"pair probe image has no overlap with a basis image (|a|={abs(a):.3f})",
                probe=f"pair-0-{j}",
            )
        phase = b / a
        cols[:, j] = fj * (phase / abs(phase))

    h = images["imag-0-1"].vector
    plus = (cols[:, 0] + 1j * cols[:, 1]) / np.sqrt(2.0)
    minus = (cols[:, 0] - 1j * cols[:, 1]) / np.sqrt(2.0)
    t_plus = abs(np.vdot(plus, h)) ** 2
    t_minus = abs(np.vdot(minus, h)) ** 2
    if t_plus >= 1.0 - 10.0 * tol:
        antiunitary = False
    elif t_minus >= 1.0 - 10.0 * tol:
        antiunitary = True
    else:
        raise NotASymmetryError(
            f"phase probe fits neither branch (unitary {t_plus:.6f}, "
            f"antiunitary {t_minus:.6f})",
            probe="imag-0-1",
        )

    # snap to the nearest exact unitary
    uu, _, vh = np.linalg.svd(cols)
    u = uu @ vh
    sym = symmetry_op(u, antiunitary=antiunitary)

    for k, (p, q) in enumerate(pmap.pairs):
        predicted = transform_pure(sym, p)
        if transition_prob(predicted, q) < 1.0 - max(tol, 1e-12):
            raise NotASymmetryError(
                f"assembled operator fails to reproduce map pair {k}",
                probe=f"pair-{k}",
            )
    return sym


def verify_theorem(
    transform,
    dim: int,
    n_mixed: int = 10,
    seed: int = 0,
    tol: float = 1e-8,
) -> VerificationResult:
    """Check that a state map is implemented by one unitary/antiunitary.

    ``transform`` maps DensityOperator to DensityOperator. Pure probes must
    map to pure outputs (else NotASymmetryError); the reconstructed operator
    is then compared against the map on ``n_mixed`` seeded mixed states of
    cycling ranks and, via strength functions, on the first two of them.
    Mixed-state disagreements are collected as failures with verdict False
    rather than raised.
    """
    _require_dim2(dim)
    pairs = []
    for label, probe in probe_pure_states(dim):
        dens = validate_density(probe.projection)
        try:
            out = transform(dens)
        except ValidationError as exc:
            raise NotASymmetryError(
                f"map output rejected on probe {label}: {exc}", probe=label
            ) from exc
        top = out.eigenvalues[0]
        if top < 1.0 - max(tol, 1e-12):
            raise NotASymmetryError(
                f"pure probe {label} maps to a mixed state (top weight {top:.8f})",
                probe=label,
            )
        pairs.append((probe, pure_state(out.eigenvectors[:, 0])))

    sym = wigner_reconstruct(pure_state_map(pairs), tol=tol)

    failures: list[str] = []
    max_error = 0.0
    for k in range(n_mixed):
        rank = (k % dim) + 1
        state = random_density(dim, rank, seed=child_rng(seed, 2, k))
        try:
            actual = transform(state)
        except ValidationError:
            failures.append(f"mixed-{k}")
            continue
        predicted = apply_symmetry(sym, state)
        err = float(np.linalg.norm(actual.matrix - predicted.matrix))
        max_error = max(max_error, err)
        if err > tol:
            failures.append(f"mixed-{k}")
        elif k < 2 and not effects_equal_by_strength(
            actual, predicted, n_rays=8, seed=seed, tol=1e-6
        ):
            failures.append(f"strength-{k}")

    return VerificationResult(
        verdict=not failures,
        symmetry=sym,
        max_error=max_error,
        n_states=n_mixed,
        failures=tuple(failures),
    )


def ic_set_member(candidate: DensityOperator, members) -> bool:
    """True when ``candidate`` is incompatible with every state in ``members``.

    Tests membership of the incompatible set of the collection; vacuously
    true on an empty collection.
    """
    for m in members:
        if candidate.dim != m.dim:
            raise DimensionMismatchError("ic-set membership needs one common dimension")
        if is_compatible(candidate, m):
            return False
    return True


def rank_via_compatibility(state: DensityOperator, budget: int | None = None, seed: int = 0) -> int:
    """Operational rank: count independent pure states compatible with it.

    Samples ``budget`` random rays plus the spectral rays, keeps those whose
    ray lies in the support (the compatibility criterion for a pure
    companion), and greedily orthogonalizes the survivors.
    """
    d = state.dim
    _require_dim2(d)
    if budget is None:
        budget = d * d
    if budget < d * d:
        raise ValidationError(f"budget {budget} below required {d * d}")
    candidates = [random_pure(d, seed=child_rng(seed, 3, k)) for k in range(budget)]
    candidates += [pure_state(state.eigenvectors[:, i]) for i in range(d)]

    kept: list[np.ndarray] = []
    for p in candidates:
        if not range_membership(state, p):
            continue
        v = p.vector.copy()
        for w in kept:
            v -= np.vdot(w, v) * w
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            kept.append(v / nrm)
    return len(kept)


def _characterization_pool(state: DensityOperator, samples: int, seed: int) -> list[DensityOperator]:
    """Sample pool mixing ranks, enriched with support rays of the state."""
    d = state.dim
    pool: list[DensityOperator] = []
    for k in range(samples):
        rank = (k % d) + 1
        pool.append(random_density(d, rank, seed=child_rng(seed, 4, k)))
    for i in range(state.numerical_rank):
        pool.append(validate_density(np.outer(state.eigenvectors[:, i], state.eigenvectors[:, i].conj())))
    if state.numerical_rank >= 2:
        mix = state.eigenvectors[:, 0] + state.eigenvectors[:, 1]
        mix = mix / np.linalg.norm(mix)
        pool.append(validate_density(np.outer(mix, mix.conj())))
    return pool


def pure_characterization_probe(
    state: DensityOperator, samples: int = 120, seed: int = 0
) -> CharacterizationProbe:
    """Sampled falsification test: only pure states are pinned down by
    their incompatible set.

    Approximates the incompatible set of ``state`` by sampling, then scans
    the same pool for a different state that is incompatible with every
    sampled member. For a pure state no such companion should appear, since
    any candidate on another ray lands in the sampled incompatible set and
    is compatible with itself. For mixed states a companion inside the
    support always exists. Sampling gives one-sided evidence only.
    """
    d = state.dim
    _require_dim2(d)
    if d > 6:
        raise ValidationError("characterization probe supports dim <= 6")
    rank = state.numerical_rank
    is_pure = rank == 1

    pool = _characterization_pool(state, samples, seed)
    ic_pool = [s for s in pool if not is_compatible(state, s)]

    witness = None
    n_double = 0
    for cand in pool:
        if float(np.linalg.norm(cand.matrix - state.matrix)) <= 1e-8:
            continue
        if ic_set_member(cand, ic_pool):
            n_double += 1
            if witness is None:
                witness = cand
    consistent = witness is None
    return CharacterizationProbe(
        rank=rank,
        is_pure=is_pure,
        consistent=consistent,
        witness=witness,
        n_ic_sampled=len(ic_pool),
        n_double_ic=n_double,
    )

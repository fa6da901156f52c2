"""Covariance-matrix representation of multipartite Gaussian states.

Quadratures are interleaved as ``(q_1, p_1, ..., q_n, p_n)`` and the vacuum
has the identity as covariance matrix, so a matrix ``cm`` describes a
physical state iff ``cm + i * Omega >= 0`` with ``Omega`` the symplectic form.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import linalg
from .errors import (
    DimensionMismatch,
    EmptySelection,
    InvalidFactor,
    InvalidGrouping,
    InvalidPartition,
    InvalidPermutation,
    NonPhysical,
    NotPositiveDefinite,
)

PHYSICAL_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def quadrature_indices(modes):
    """Row/column indices of the given modes in interleaved ordering."""
    return [2 * m + k for m in modes for k in (0, 1)]


@dataclass(frozen=True, eq=False)
class PartitionedCovariance:
    """Covariance matrix together with a partition of its modes into parties.

    Parameters
    ----------
    cm : array_like
        Real ``2n x 2n`` covariance matrix; symmetrized on construction.
    partition : sequence of sequences of int
        Disjoint, non-empty mode-index sets covering ``range(n)``. Party
        order is significant. Defaults to one mode per party.
    displacement : array_like, optional
        First moments, length ``2n``.
    """

    cm: np.ndarray
    partition: tuple = None
    displacement: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        cm = linalg.symmetrize(self.cm)
        if cm.shape[0] % 2:
            raise DimensionMismatch(f"covariance matrix dimension {cm.shape[0]} is odd")
        n = cm.shape[0] // 2
        partition = self.partition
        if partition is None:
            partition = [[m] for m in range(n)]
        partition = tuple(tuple(int(m) for m in party) for party in partition)
        _check_partition(partition, n)
        object.__setattr__(self, "cm", _frozen(cm))
        object.__setattr__(self, "partition", partition)
        if self.displacement is not None:
            d = _frozen(self.displacement).ravel()
            if d.shape != (2 * n,):
                raise DimensionMismatch(f"displacement must have length {2 * n}")
            object.__setattr__(self, "displacement", d)

    @property
    def total_modes(self):
        return self.cm.shape[0] // 2

    @property
    def n_parties(self):
        return len(self.partition)

    def party_indices(self, party):
        """Quadrature indices belonging to ``party``."""
        return quadrature_indices(self.partition[party])

    def block(self, i, j):
        """The ``(i, j)`` party block ``A_ij`` of the covariance matrix."""
        return self.cm[np.ix_(self.party_indices(i), self.party_indices(j))]

    def with_cm(self, cm, displacement=None):
        return PartitionedCovariance(cm, self.partition, displacement)

    def __repr__(self):
        return f"PartitionedCovariance(modes={self.total_modes}, partition={self.partition})"


def _check_partition(partition, n):
    if not partition:
        raise InvalidPartition("partition has no parties")
    seen = []
    for party in partition:
        if not party:
            raise InvalidPartition("partition contains an empty party")
        seen.extend(party)
    if sorted(seen) != list(range(n)):
        raise InvalidPartition(
            f"partition {partition} is not a disjoint cover of modes 0..{n - 1}"
        )


def contiguous_partition(sizes):
    """Partition with consecutive mode blocks of the given sizes."""
    out, start = [], 0
    for s in sizes:
        if s < 1:
            raise InvalidPartition("party sizes must be positive")
        out.append(tuple(range(start, start + s)))
        start += s
    return tuple(out)


@dataclass(frozen=True)
class SstsParams:
    """Symmetric squeezed thermal state: mean photon number and mixing."""

    nbar: float
    mu: float

    def __post_init__(self):
        if not self.nbar >= 0:
            raise ValueError("nbar must be nonnegative")
        if not 0 <= self.mu <= 1:
            raise ValueError("mu must lie in [0, 1]")


@dataclass(frozen=True)
class StandardFormParams:
    """Two-mode standard form ``[[a,0,c,0],[0,a,0,d],[c,0,b,0],[0,d,0,b]]``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        tol = 1e-9 * max(1.0, self.a * self.b)
        if self.a < 1 - tol or self.b < 1 - tol:
            raise NonPhysical("standard form requires a, b >= 1")
        slack = self.a * self.b - 1
        if slack < self.c**2 - tol or slack < self.d**2 - tol:
            raise NonPhysical("standard form requires ab - 1 >= c^2 and ab - 1 >= d^2")


@dataclass(frozen=True)
class PureFactors:
    """Single-mode mixedness factors of a pure bipartite state.

    ``gammas`` couples mode ``j`` of the first party to mode ``j`` of the
    second; the second party has ``extra_modes`` additional vacuum modes.
    """

    gammas: tuple
    extra_modes: int = 0

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        if not gammas:
            raise InvalidFactor("at least one mixedness factor is required")
        if any(not g >= 1 for g in gammas):
            raise InvalidFactor(f"mixedness factors must be >= 1, got {gammas}")
        if self.extra_modes < 0:
            raise InvalidFactor("extra_modes must be nonnegative")
        object.__setattr__(self, "gammas", gammas)


@dataclass(frozen=True)
class PhysicalityReport:
    physical: bool
    min_eigenvalue: float
    symplectic_eigenvalues: Optional[np.ndarray]


def symplectic_eigenvalues(state):
    """Symplectic spectrum ``nu_1 <= ... <= nu_n`` of a positive-definite CM.

    ``state`` may be a :class:`PartitionedCovariance` or a bare matrix.
    """
    cm = state.cm if isinstance(state, PartitionedCovariance) else linalg.symmetrize(state)
    n = cm.shape[0] // 2
    low = linalg.cholesky(cm)
    # L^T Omega L is antisymmetric and shares its spectrum {+-i nu} with Omega^{-1} cm
    core = low.T @ linalg.symplectic_form(n) @ low
    # i * core is Hermitian with eigenvalues -nu_n..-nu_1, nu_1..nu_n
    return np.linalg.eigvalsh(1j * core)[n:]


def is_physical(state):
    """Check ``cm + i Omega >= 0`` and report the symplectic spectrum."""
    omega = linalg.symplectic_form(state.total_modes)
    lam = linalg.hermitian_min_eigenvalue(state.cm, omega)
    try:
        nus = symplectic_eigenvalues(state)
    except NotPositiveDefinite:
        nus = None
    return PhysicalityReport(lam >= -PHYSICAL_TOL, lam, nus)


def require_physical(state):
    report = is_physical(state)
    if not report.physical:
        raise NonPhysical(
            f"cm + i*Omega has eigenvalue {report.min_eigenvalue:.6g} < 0"
        )
    return state


def reduce(state, parties):
    """Reduced state on the selected parties.

    Parties keep their relative order and modes are renumbered in increasing
    order of their original index, so selecting every party is the identity.
    """
    sel = sorted(set(int(p) for p in parties))
    if not sel:
        raise EmptySelection("no parties selected")
    if sel[0] < 0 or sel[-1] >= state.n_parties:
        raise InvalidPartition(f"party index out of range: {sel}")
    modes = sorted(m for p in sel for m in state.partition[p])
    renumber = {m: i for i, m in enumerate(modes)}
    idx = quadrature_indices(modes)
    disp = None if state.displacement is None else state.displacement[idx]
    partition = [[renumber[m] for m in state.partition[p]] for p in sel]
    return PartitionedCovariance(state.cm[np.ix_(idx, idx)], partition, disp)


def merge_parties(state, grouping):
    """Coarse-grain the partition; ``grouping[h]`` lists old parties forming new party ``h``."""
    flat = [int(p) for group in grouping for p in group]
    if any(len(g) == 0 for g in grouping) or sorted(flat) != list(range(state.n_parties)):
        raise InvalidGrouping(f"{grouping} is not a partition of the {state.n_parties} parties")
    partition = [sorted(m for p in group for m in state.partition[p]) for group in grouping]
    return PartitionedCovariance(state.cm, partition, state.displacement)


def permute_parties(state, perm):
    """Reorder parties so new party ``j`` is old party ``perm[j]``.

    The matrix is rearranged so that the parties occupy consecutive modes in
    the new order.
    """
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(state.n_parties)):
        raise InvalidPermutation(f"{perm} is not a permutation of {state.n_parties} parties")
    modes = [m for p in perm for m in state.partition[p]]
    idx = quadrature_indices(modes)
    disp = None if state.displacement is None else state.displacement[idx]
    sizes = [len(state.partition[p]) for p in perm]
    return PartitionedCovariance(state.cm[np.ix_(idx, idx)], contiguous_partition(sizes), disp)


def tensor(a, b):
    """Product state: block-diagonal CM with ``b``'s parties appended."""
    cm = scipy.linalg.block_diag(a.cm, b.cm)
    shift = a.total_modes
    partition = list(a.partition) + [[m + shift for m in party] for party in b.partition]
    disp = None
    if a.displacement is not None or b.displacement is not None:
        da = np.zeros(2 * a.total_modes) if a.displacement is None else a.displacement
        db = np.zeros(2 * b.total_modes) if b.displacement is None else b.displacement
        disp = np.concatenate([da, db])
    return PartitionedCovariance(cm, partition, disp)


def vacuum(modes, partition=None):
    return PartitionedCovariance(np.eye(2 * modes), partition)


def _normalizer(block):
    """Single-mode symplectic ``S`` (det 1) with ``S block S^T = sqrt(det block) * I``."""
    w, v = np.linalg.eigh(block)
    return (v * (np.prod(w) ** 0.25 / np.sqrt(w))) @ v.T


def standard_form(state):
    """Standard-form parameters of a two-party, one-mode-per-party state.

    Each local block is brought to ``a I`` and ``b I`` by its symplectic
    square root; the singular values of the transformed cross block are then
    ``c >= |d|``, and ``d`` carries the sign of ``det C``. The result
    reproduces ``det A``, ``det B``, ``det C`` and ``det cm``.
    """
    if state.n_parties != 2 or any(len(p) != 1 for p in state.partition):
        raise DimensionMismatch("standard_form needs two single-mode parties")
    linalg.cholesky(state.cm)
    a_blk, b_blk, c_blk = state.block(0, 0), state.block(1, 1), state.block(0, 1)
    a = float(np.sqrt(np.linalg.det(a_blk)))
    b = float(np.sqrt(np.linalg.det(b_blk)))
    coupling = _normalizer(a_blk) @ c_blk @ _normalizer(b_blk).T
    c, d = (float(x) for x in np.linalg.svd(coupling, compute_uv=False))
    if np.linalg.det(c_blk) < 0:
        d = -d
    return StandardFormParams(a, b, c, d)


def standard_form_state(p):
    """Two-mode state whose CM is the standard form with parameters ``p``."""
    cm = np.array(
        [
            [p.a, 0.0, p.c, 0.0],
            [0.0, p.a, 0.0, p.d],
            [p.c, 0.0, p.b, 0.0],
            [0.0, p.d, 0.0, p.b],
        ]
    )
    return PartitionedCovariance(cm, [[0], [1]])


def make_ssts(p):
    """Symmetric squeezed thermal state with ``a = b = 1 + 2 nbar`` and ``c = -d``."""
    a = 1 + 2 * p.nbar
    c = 2 * p.mu * np.sqrt(p.nbar * (1 + p.nbar))
    return standard_form_state(StandardFormParams(a, a, c, -c))


def make_pure(f):
    """Pure bipartite state in mode-wise decomposed form.

    The first party holds ``n = len(f.gammas)`` modes, the second
    ``n + f.extra_modes``; mode ``j`` of each party forms a two-mode squeezed
    vacuum with factor ``gammas[j]`` and the extra modes are vacuum.
    """
    n = len(f.gammas)
    m = n + f.extra_modes
    cm = np.eye(2 * (n + m))
    for j, g in enumerate(f.gammas):
        s = np.sqrt(g * g - 1.0)
        qa, qb = 2 * j, 2 * (n + j)
        cm[qa, qa] = cm[qa + 1, qa + 1] = g
        cm[qb, qb] = cm[qb + 1, qb + 1] = g
        cm[qa, qb] = cm[qb, qa] = s
        cm[qa + 1, qb + 1] = cm[qb + 1, qa + 1] = -s
    return PartitionedCovariance(cm, contiguous_partition([n, m]))


def symplectic_violation(s):
    s = np.asarray(s, dtype=float)
    omega = linalg.symplectic_form(s.shape[0] // 2)
    return float(np.linalg.norm(s @ omega @ s.T - omega))


def symplectic_tolerance(s):
    """Admissible ``||S Omega S^T - Omega||_F``, relative to ``||S||_2^2``."""
    return 1e-9 * max(1.0, float(np.linalg.norm(s, 2)) ** 2)


def random_symplectic(modes, rng, mix_scale=0.3):
    """``expm(Omega H)`` with ``H`` symmetric, entries uniform in ``[-mix_scale, mix_scale]``."""
    h = rng.uniform(-mix_scale, mix_scale, size=(2 * modes, 2 * modes))
    h = np.triu(h) + np.triu(h, 1).T
    s = scipy.linalg.expm(linalg.symplectic_form(modes) @ h)
    assert symplectic_violation(s) <= symplectic_tolerance(s)
    return s


def make_random_physical(modes, party_sizes=None, seed=0, mix_scale=0.3, rng=None):
    """Random mixed state ``S diag(nu_j I_2) S^T`` with ``nu_j = 1 + |N(0, 1)|``.

    Parameters
    ----------
    modes : int
        Total number of modes.
    party_sizes : sequence of int, optional
        Consecutive mode counts per party; one mode per party by default.
    seed : int
        Seed for :func:`numpy.random.default_rng`; ignored when ``rng`` is given.
    """
    if modes < 1:
        raise ValueError("modes must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    sizes = [1] * modes if party_sizes is None else list(party_sizes)
    if sum(sizes) != modes:
        raise InvalidPartition(f"party sizes {sizes} do not sum to {modes}")
    nus = 1.0 + np.abs(rng.standard_normal(modes))
    s = random_symplectic(modes, rng, mix_scale)
    cm = s @ np.diag(np.repeat(nus, 2)) @ s.T
    return PartitionedCovariance(cm, contiguous_partition(sizes))

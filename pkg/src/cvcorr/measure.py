"""The determinant-ratio correlation measure and its closed forms.

For a ``k``-party state with CM blocks ``A_ij`` the measure is
``1 - det(cm) / prod_j det(A_jj)``. It is assembled in log space from
Cholesky log-determinants.
"""

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateDenominator, DimensionMismatch, SinglePartyWarning


@dataclass(frozen=True)
class MeasureReport:
    value: float
    logdet_full: float
    party_logdets: tuple
    partition_arity: int
    single_party: bool = False

    def to_dict(self):
        return {
            "value": self.value,
            "logdet_full": self.logdet_full,
            "party_logdets": list(self.party_logdets),
            "arity": self.partition_arity,
        }


def measure(state):
    """Correlation measure of ``state`` over its partition.

    A single-party partition gives 0 and emits :class:`SinglePartyWarning`.

    Raises
    ------
    NotPositiveDefinite
        If the CM or any diagonal party block is not positive definite.
    """
    full = linalg.cholesky_logdet(state.cm)
    parties = tuple(linalg.cholesky_logdet(state.block(j, j)) for j in range(state.n_parties))
    k = state.n_parties
    if k == 1:
        warnings.warn("measure of a single-party partition is 0", SinglePartyWarning, stacklevel=2)
        return MeasureReport(0.0, full, parties, 1, single_party=True)
    return MeasureReport(float(-np.expm1(full - sum(parties))), full, parties, k)


def value(state):
    """Measure value only; single-party partitions give 0 silently."""
    if state.n_parties == 1:
        return 0.0
    return measure(state).value


def bipartite_schur(state):
    """Two-party measure via ``1 - det(B - C^T A^{-1} C) / det(B)``."""
    if state.n_parties != 2:
        raise DimensionMismatch("bipartite_schur needs exactly two parties")
    idx = state.party_indices(0) + state.party_indices(1)
    cm = state.cm[np.ix_(idx, idx)]
    na = len(state.party_indices(0))
    schur = linalg.schur_complement(cm, na)
    return float(-np.expm1(linalg.cholesky_logdet(schur) - linalg.cholesky_logdet(cm[na:, na:])))


def closed_form_two_mode(p):
    """``1 - (ab - c^2)(ab - d^2) / (ab)^2`` for standard-form parameters."""
    ab = p.a * p.b
    return 1.0 - (ab - p.c**2) * (ab - p.d**2) / (ab * ab)


def closed_form_pure(f):
    """``1 - 1 / prod_j gamma_j^4`` for a pure state with mixedness factors ``f``."""
    return float(-np.expm1(-4.0 * np.sum(np.log(f.gammas))))


def closed_form_channelled(p, K, M):
    """Measure after a single-mode channel ``(K, M)`` acts on the second mode.

    Parameters
    ----------
    p : StandardFormParams
        Input state in standard form.
    K, M : array_like
        2x2 channel matrices; ``M`` symmetric.
    """
    K = np.asarray(K, dtype=float)
    M = np.asarray(M, dtype=float)
    if K.shape != (2, 2) or M.shape != (2, 2):
        raise DimensionMismatch("single-mode channel matrices must be 2x2")
    (k11, k12), (k21, k22) = K
    m11, m12, m22 = M[0, 0], 0.5 * (M[0, 1] + M[1, 0]), M[1, 1]
    a, b, c, d = p.a, p.b, p.c, p.d
    n1 = (k11 * k22 - k12 * k21) ** 2
    n2 = m22 * k11**2 + m11 * k21**2 - 2 * m12 * k11 * k21
    n3 = m22 * k12**2 + m11 * k22**2 - 2 * m12 * k12 * k22
    n4 = m11 * m22 - m12**2
    ac, ad = a * b - c * c, a * b - d * d
    num = ac * ad * n1 + a * ac * n2 + a * ad * n3 + a * a * n4
    den = a * a * b * b * n1 + a * a * b * (n2 + n3) + a * a * n4
    scale = a * a * b * b * (1.0 + np.sum(K**2) + np.sum(np.abs(M))) ** 2
    if abs(den) <= 1e-14 * scale:
        if not np.any(K):
            return 0.0
        raise DegenerateDenominator("channel leaves the output mode with a singular block")
    return float(1.0 - num / den)


def ssts_measure(p):
    a2 = (1 + 2 * p.nbar) ** 2
    q = 4 * p.mu**2 * p.nbar * (1 + p.nbar)
    return float(1.0 - (a2 - q) ** 2 / a2**2)


def ssts_nf(p):
    """Closed-form fidelity-based correlation of a symmetric squeezed thermal state."""
    a2 = (1 + 2 * p.nbar) ** 2
    q = 4 * p.mu**2 * p.nbar * (1 + p.nbar)
    return float(1.0 - (a2 - q) ** 2 / (a2 - q / 2) ** 2)


@dataclass(frozen=True)
class SweepResult:
    nbar: np.ndarray
    mu: np.ndarray
    m: np.ndarray
    nf: np.ndarray

    @property
    def diff(self):
        return self.m - self.nf

    @property
    def max_diff(self):
        return float(self.diff.max())

    @property
    def argmax(self):
        """``(nbar, mu)`` of the first grid cell attaining the maximum difference."""
        i, j = np.unravel_index(np.argmax(self.diff), self.diff.shape)
        return float(self.nbar[i]), float(self.mu[j])

    def rows(self):
        """Cells in row-major order: ``nbar`` outer, ``mu`` inner."""
        diff = self.diff
        for i, nb in enumerate(self.nbar):
            for j, mu in enumerate(self.mu):
                yield nb, mu, self.m[i, j], self.nf[i, j], diff[i, j]

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["nbar", "mu", "m", "nf", "diff"])
        for row in self.rows():
            writer.writerow([f"{x:.17g}" for x in row])


def ssts_diff_sweep(nbar_max=50.0, nbar_steps=500, mu_steps=500):
    """Evaluate both SSTS closed forms on a uniform grid over ``[0, nbar_max] x [0, 1]``."""
    if nbar_steps < 1 or mu_steps < 1:
        raise ValueError("step counts must be positive")
    nbar = np.linspace(0.0, nbar_max, nbar_steps)
    mu = np.linspace(0.0, 1.0, mu_steps)
    a2 = ((1 + 2 * nbar) ** 2)[:, None]
    q = 4 * mu[None, :] ** 2 * (nbar * (1 + nbar))[:, None]
    m = 1.0 - (a2 - q) ** 2 / a2**2
    nf = 1.0 - (a2 - q) ** 2 / (a2 - q / 2) ** 2
    return SweepResult(nbar, mu, m, nf)


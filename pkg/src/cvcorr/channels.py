"""Gaussian channels and symplectic transforms acting on covariance matrices.

A channel ``(K, M, dbar)`` maps ``cm -> K cm K^T + M`` and
``d -> K d + dbar``. It is completely positive when
``M + i (Omega - K Omega K^T) >= 0``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidChannel, NotSymplectic
from .gaussian import (
    PartitionedCovariance,
    symplectic_tolerance,
    symplectic_violation,
)

CP_TOL = 1e-9
PSD_TOL = 1e-10


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """Gaussian channel on ``n`` modes.

    With ``check=True`` (the default) construction fails with
    :class:`InvalidChannel` unless ``M`` is positive semidefinite and the
    complete-positivity certificate is nonnegative.
    """

    K: np.ndarray
    M: np.ndarray
    dbar: Optional[np.ndarray] = None
    check: bool = True

    def __post_init__(self):
        K = np.array(self.K, dtype=float)
        M = np.array(self.M, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] % 2 or K.shape != M.shape:
            raise InvalidChannel(f"K and M must be equal even square shapes, got {K.shape}, {M.shape}")
        if not np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, np.abs(M).max())):
            raise InvalidChannel("M is not symmetric")
        dbar = np.zeros(K.shape[0]) if self.dbar is None else np.array(self.dbar, dtype=float).ravel()
        if dbar.shape != (K.shape[0],):
            raise InvalidChannel(f"dbar must have length {K.shape[0]}")
        object.__setattr__(self, "K", _readonly(K))
        object.__setattr__(self, "M", _readonly(0.5 * (M + M.T)))
        object.__setattr__(self, "dbar", _readonly(dbar))
        if self.check:
            if linalg.symmetric_eigenvalues(self.M)[0] < -PSD_TOL:
                raise InvalidChannel("M is not positive semidefinite")
            cert = cp_certificate(self)
            if cert < -CP_TOL:
                raise InvalidChannel(f"complete-positivity certificate {cert:.3e} < 0")

    @property
    def modes(self):
        return self.K.shape[0] // 2

    @classmethod
    def identity(cls, modes):
        return cls(np.eye(2 * modes), np.zeros((2 * modes, 2 * modes)))


@dataclass(frozen=True)
class ChannelReport:
    cp_certificate: float
    paper_det_condition: bool
    m_min_eigenvalue: float

    @property
    def valid(self):
        return self.cp_certificate >= -CP_TOL and self.m_min_eigenvalue >= -PSD_TOL


def cp_certificate(channel):
    """Minimum eigenvalue of ``M + i (Omega - K Omega K^T)``."""
    omega = linalg.symplectic_form(channel.modes)
    return linalg.hermitian_min_eigenvalue(channel.M, omega - channel.K @ omega @ channel.K.T)


def check_channel(channel):
    """Report the CP certificate and ``det M >= (det K - 1)^2`` evaluated on the full matrices."""
    det_k = float(np.linalg.det(channel.K))
    det_m = float(np.linalg.det(channel.M))
    det_ok = det_m >= (det_k - 1.0) ** 2 - 1e-12 * max(1.0, (det_k - 1.0) ** 2)
    return ChannelReport(
        cp_certificate(channel),
        bool(det_ok),
        float(linalg.symmetric_eigenvalues(channel.M)[0]),
    )


def compose(first, second):
    """Channel equal to applying ``first`` and then ``second``."""
    if first.modes != second.modes:
        raise DimensionMismatch("channels act on different mode counts")
    K = second.K @ first.K
    M = second.K @ first.M @ second.K.T + second.M
    dbar = second.K @ first.dbar + second.dbar
    return GaussianChannel(K, M, dbar, check=False)


def _embed(state, target, matrix, fill):
    """Embed ``matrix`` on the rows/columns of ``target`` (a party index or None for global)."""
    dim = state.cm.shape[0]
    if target is None:
        if matrix.shape != (dim, dim):
            raise DimensionMismatch(f"global operation needs {dim}x{dim}, got {matrix.shape}")
        return matrix, list(range(dim))
    if not 0 <= target < state.n_parties:
        raise DimensionMismatch(f"party {target} out of range")
    idx = state.party_indices(target)
    if matrix.shape != (len(idx), len(idx)):
        raise DimensionMismatch(
            f"party {target} has {len(idx) // 2} modes, operation acts on {matrix.shape[0] // 2}"
        )
    full = fill(dim)
    full[np.ix_(idx, idx)] = matrix
    return full, idx


def make_local(state, channel, party):
    """Full-system channel acting as ``channel`` on ``party`` and as identity elsewhere."""
    K, idx = _embed(state, party, channel.K, np.eye)
    M, _ = _embed(state, party, channel.M, lambda d: np.zeros((d, d)))
    dbar = np.zeros(state.cm.shape[0])
    dbar[idx] = channel.dbar
    return GaussianChannel(K, M, dbar, check=False)


def apply_channel(state, channel, party=None):
    """Apply ``channel`` to one party (or globally when ``party`` is None).

    Raises
    ------
    InvalidChannel
        If the channel fails the complete-positivity certificate.
    DimensionMismatch
        If the channel and party mode counts differ.
    """
    report = check_channel(channel)
    if not report.valid:
        raise InvalidChannel(
            f"channel is not completely positive (certificate {report.cp_certificate:.3e})"
        )
    full = channel if party is None else make_local(state, channel, party)
    if full.K.shape != state.cm.shape:
        raise DimensionMismatch("channel and state dimensions differ")
    cm = full.K @ state.cm @ full.K.T + full.M
    disp = None
    if state.displacement is not None or np.any(full.dbar):
        d = np.zeros(state.cm.shape[0]) if state.displacement is None else state.displacement
        disp = full.K @ d + full.dbar
    return PartitionedCovariance(cm, state.partition, disp)


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    S: np.ndarray

    def __post_init__(self):
        S = np.array(self.S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise NotSymplectic(f"symplectic matrix must be even square, got {S.shape}")
        if symplectic_violation(S) > symplectic_tolerance(S):
            raise NotSymplectic(
                f"||S Omega S^T - Omega|| = {symplectic_violation(S):.3e} exceeds tolerance"
            )
        object.__setattr__(self, "S", _readonly(S))

    @property
    def modes(self):
        return self.S.shape[0] // 2

    def inverse(self):
        """``Omega^{-1} S^T Omega``."""
        omega = linalg.symplectic_form(self.modes)
        return SymplecticTransform(-omega @ self.S.T @ omega)


def apply_symplectic(state, transform, party=None):
    """Conjugate the CM by ``transform`` on one party, or globally when ``party`` is None."""
    S, _ = _embed(state, party, transform.S, np.eye)
    disp = None if state.displacement is None else S @ state.displacement
    return PartitionedCovariance(S @ state.cm @ S.T, state.partition, disp)


def make_random_channel(modes, seed=0, noise_floor=1e-3, rng=None):
    """Random CP channel: ``K`` uniform in ``[-1.5, 1.5]``, ``M = c I``.

    ``c = ||K Omega K^T - Omega||_2 + noise_floor``, which makes the
    certificate at least ``noise_floor``.
    """
    if modes < 1:
        raise ValueError("modes must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    K = rng.uniform(-1.5, 1.5, size=(2 * modes, 2 * modes))
    return channel_for_gain(K, noise_floor)


def channel_for_gain(K, noise_floor=1e-3):
    """Isotropic-noise channel ``(K, c I)`` that passes the CP certificate."""
    K = np.asarray(K, dtype=float)
    omega = linalg.symplectic_form(K.shape[0] // 2)
    c = float(np.linalg.norm(K @ omega @ K.T - omega, 2)) + noise_floor
    return GaussianChannel(K, c * np.eye(K.shape[0]))

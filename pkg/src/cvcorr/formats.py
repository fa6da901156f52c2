"""JSON documents for states, channels and symplectic transforms.

State::

    {"ordering": "qpqp", "modes": n, "matrix": [[...], ...],
     "partition": [[0], [1, 2]], "displacement": [...]}

Channel::

    {"modes": n, "K": [[...]], "M": [[...]], "dbar": [...]}

Symplectic transform::

    {"modes": n, "S": [[...]]}

Floats are written with ``repr`` (shortest round-trip form, at most 17
significant digits), so a written matrix reads back bit-exactly.
"""

import json

import numpy as np

from .channels import GaussianChannel, SymplecticTransform
from .errors import CvcorrError, FormatError
from .gaussian import PartitionedCovariance

ORDERING = "qpqp"


def _matrix(doc, key, dim):
    try:
        m = np.array(doc[key], dtype=float)
    except KeyError:
        raise FormatError(f"missing field {key!r}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r} is not a numeric matrix: {exc}") from None
    if m.shape != (dim, dim):
        raise FormatError(f"field {key!r} must be {dim}x{dim}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise FormatError(f"field {key!r} has non-finite entries")
    return m


def _vector(doc, key, dim):
    if doc.get(key) is None:
        return None
    try:
        v = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r} is not a numeric vector: {exc}") from None
    if v.shape != (dim,):
        raise FormatError(f"field {key!r} must have length {dim}")
    return v


def _modes(doc):
    if not isinstance(doc, dict):
        raise FormatError("document must be a JSON object")
    modes = doc.get("modes")
    if not isinstance(modes, int) or isinstance(modes, bool) or modes < 1:
        raise FormatError(f"'modes' must be a positive integer, got {modes!r}")
    return modes


def state_to_dict(state):
    doc = {
        "ordering": ORDERING,
        "modes": state.total_modes,
        "matrix": state.cm.tolist(),
        "partition": [list(p) for p in state.partition],
    }
    if state.displacement is not None:
        doc["displacement"] = state.displacement.tolist()
    return doc


def state_from_dict(doc):
    """Parse a state document. Raises :class:`FormatError` on any defect."""
    modes = _modes(doc)
    if doc.get("ordering") != ORDERING:
        raise FormatError(f"unsupported quadrature ordering {doc.get('ordering')!r}; expected 'qpqp'")
    cm = _matrix(doc, "matrix", 2 * modes)
    if not np.array_equal(cm, cm.T):
        raise FormatError("matrix is not symmetric")
    partition = doc.get("partition")
    disp = _vector(doc, "displacement", 2 * modes)
    try:
        return PartitionedCovariance(cm, partition, disp)
    except CvcorrError as exc:
        raise FormatError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad partition: {exc}") from exc


def channel_to_dict(channel):
    return {
        "modes": channel.modes,
        "K": channel.K.tolist(),
        "M": channel.M.tolist(),
        "dbar": channel.dbar.tolist(),
    }


def channel_from_dict(doc):
    """Parse a channel document without enforcing complete positivity."""
    modes = _modes(doc)
    K = _matrix(doc, "K", 2 * modes)
    M = _matrix(doc, "M", 2 * modes)
    dbar = _vector(doc, "dbar", 2 * modes)
    try:
        return GaussianChannel(K, M, dbar, check=False)
    except CvcorrError as exc:
        raise FormatError(str(exc)) from exc


def symplectic_from_dict(doc):
    """Parse a transform document; :class:`NotSymplectic` propagates."""
    modes = _modes(doc)
    return SymplecticTransform(_matrix(doc, "S", 2 * modes))


def symplectic_to_dict(transform):
    return {"modes": transform.modes, "S": transform.S.tolist()}


def dumps(doc):
    return json.dumps(doc, indent=1) + "\n"


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc


def load_state(path):
    return state_from_dict(_load(path))


def load_channel(path):
    return channel_from_dict(_load(path))


def load_symplectic(path):
    return symplectic_from_dict(_load(path))


def save(doc, path):
    with open(path, "w") as fh:
        fh.write(dumps(doc))

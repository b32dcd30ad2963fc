"""Input checks shared by the localizers."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .topology import UNREACHABLE


def check_positions(y, name="y") -> np.ndarray:
    y = check_array(y, dtype=np.float64, input_name=name)
    if y.shape[1] != 2:
        raise ValueError(f"{name} must have shape (n, 2), got {y.shape}")
    return y


def check_hops(X, n_anchors: int | None = None, name="X") -> np.ndarray:
    """Hop matrices: integers >= 0, any negative value means unreachable."""
    X = check_array(X, dtype=None, input_name=name, ensure_all_finite=True)
    if not np.issubdtype(X.dtype, np.integer):
        if np.any(X != np.round(X)):
            raise ValueError(f"{name} must contain integer hop counts")
        X = X.astype(np.int64)
    X = np.where(X < 0, UNREACHABLE, X)
    if n_anchors is not None and X.shape[1] != n_anchors:
        raise ValueError(
            f"{name} has {X.shape[1]} hop columns, expected one per anchor ({n_anchors})")
    return X


def check_anchor_system(X, y, path_lengths=None):
    """Validate the fit triple: (m, m) hops, (m, 2) anchors, optional (m, m) lengths."""
    y = check_positions(y)
    X = check_hops(X, n_anchors=len(y))
    if X.shape[0] != len(y):
        raise ValueError("anchor hop matrix must be square, one row per anchor")
    if len(y) < 3:
        raise ValueError("at least 3 anchors are required")
    if path_lengths is not None:
        path_lengths = check_array(path_lengths, dtype=np.float64,
                                   ensure_all_finite="allow-nan", input_name="path_lengths")
        if path_lengths.shape != X.shape:
            raise ValueError("path_lengths must match the anchor hop matrix")
    return X, y, path_lengths

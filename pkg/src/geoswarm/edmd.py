"""Least-squares one-step operator fitting over streamed snapshot pairs.

Paired lifted measurements are collected column-wise into X and Y with
the chaining property X[:, j+1] = Y[:, j].  The finite operator
approximation is the least-squares solution

    K = Y @ pinv(X)

recomputed from scratch at every stream step (the buffers stay tiny, a
few dozen columns).  The streaming loop predicts the next measurement
from the latest column, then corrects the data set with the actual
measurement once it arrives.
"""

from __future__ import annotations

from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, SvdFailure


class SnapshotBuffer:
    """Growing k x m matrices of lifted snapshots and their successors."""

    def __init__(self, dim: int):
        self.dim = int(dim)
        self._x: List[np.ndarray] = []
        self._y: List[np.ndarray] = []

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[np.ndarray, np.ndarray]]) -> "SnapshotBuffer":
        pairs = list(pairs)
        if not pairs:
            raise ValueError("need at least one snapshot pair")
        buf = cls(len(np.asarray(pairs[0][0], dtype=float)))
        for x, y in pairs:
            buf.append_pair(x, y)
        return buf

    def _column(self, v) -> np.ndarray:
        col = np.asarray(v, dtype=float).reshape(-1)
        if col.shape != (self.dim,):
            raise DimensionMismatch(f"expected a {self.dim}-vector, got shape {col.shape}")
        return col

    def append_pair(self, x, y):
        self._x.append(self._column(x))
        self._y.append(self._column(y))

    def stream_step(self, y_new):
        """Shift the last successor into X and append the new measurement."""
        self._x.append(self._y[-1])
        self._y.append(self._column(y_new))

    @property
    def m(self) -> int:
        return len(self._x)

    @property
    def X(self) -> np.ndarray:
        return np.column_stack(self._x)

    @property
    def Y(self) -> np.ndarray:
        return np.column_stack(self._y)

    @property
    def last_y(self) -> np.ndarray:
        return self._y[-1]


def default_rtol(shape: tuple) -> float:
    """Singular-value cutoff relative to the largest singular value."""
    return 1e-10 * max(shape)


def pseudoinverse(M: np.ndarray, rtol: Optional[float] = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD with relative truncation.

    Singular values below rtol times the largest are treated as zero.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("pseudoinverse expects a matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("pseudoinverse expects finite entries")
    if rtol is None:
        rtol = default_rtol(M.shape)
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    cutoff = rtol * (s[0] if s.size else 0.0)
    inv = np.where(s > cutoff, np.divide(1.0, s, out=np.zeros_like(s), where=s > 0), 0.0)
    return (Vt.T * inv) @ U.T


def fit(buffer: SnapshotBuffer, rtol: Optional[float] = None) -> np.ndarray:
    """Least-squares operator K minimizing ||Y - K X||_F."""
    if buffer.m < 1:
        raise ValueError("cannot fit an empty buffer")
    return buffer.Y @ pseudoinverse(buffer.X, rtol)


def predict(K: np.ndarray, y: np.ndarray) -> np.ndarray:
    """One-step prediction K @ y."""
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if K.ndim != 2 or K.shape[1] != y.shape[0]:
        raise DimensionMismatch(f"operator {K.shape} cannot act on a {y.shape[0]}-vector")
    return K @ y


def run_streaming(
    initial_pairs: Iterable[Tuple[np.ndarray, np.ndarray]],
    steps: int,
    oracle: Callable[[np.ndarray], np.ndarray],
    rtol: Optional[float] = None,
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Predict-then-correct streaming loop.

    Starting from the warmup pairs, each iteration refits K, predicts
    the next measurement from the latest successor column, asks the
    oracle for the actual measurement (the oracle receives the
    prediction, which lets simulations execute the predicted move), and
    streams the actual value into the buffer.  Runs until the buffer
    holds ``steps`` pairs; returns the (prediction, actual) sequence.
    """
    buffer = SnapshotBuffer.from_pairs(initial_pairs)
    results: List[Tuple[np.ndarray, np.ndarray]] = []
    while buffer.m < steps:
        K = fit(buffer, rtol)
        prediction = predict(K, buffer.last_y)
        actual = np.asarray(oracle(prediction), dtype=float).reshape(-1)
        results.append((prediction, actual))
        buffer.stream_step(actual)
    return results

"""Dense float64 matrix kernels.

A "matrix" here is a 2-D ``numpy.ndarray`` of dtype float64 with at least one
row and one column. Every function validates shapes, returns a fresh array
(inputs are never modified) and refuses to hand back non-finite values.
Overflow raises :class:`NonFiniteError`; callers that want numpy's own
overflow warnings silenced wrap their loop in ``numpy.errstate``.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

Matrix = np.ndarray

_reduce = np.add.reduce


class ShapeError(ValueError):
    """Operand shapes do not conform."""


class NonFiniteError(ArithmeticError):
    """An operation produced NaN or Inf from its inputs."""


def matrix(data: Iterable) -> Matrix:
    """Build a float64 matrix from nested sequences (or an existing array)."""
    out = np.array(data, dtype=np.float64)
    if out.ndim != 2 or out.shape[0] < 1 or out.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {out.shape}")
    return out


def zeros(rows: int, cols: int) -> Matrix:
    return np.zeros((rows, cols), dtype=np.float64)


def _check(a: Matrix, name: str = "operand") -> None:
    if not isinstance(a, np.ndarray) or a.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D matrix, got {getattr(a, 'shape', type(a).__name__)}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"{name} must have positive dimensions, got {a.shape}")


def _finite(out: Matrix, op: str) -> Matrix:
    # The sum is finite whenever every entry is; only a non-finite sum needs the full scan.
    if not math.isfinite(_reduce(out, None)) and not np.isfinite(out).all():
        raise NonFiniteError(f"{op} produced a non-finite value")
    return out


def _same_shape(a: Matrix, b: Matrix, op: str) -> None:
    _check(a, "a")
    _check(b, "b")
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape mismatch {a.shape[0]}x{a.shape[1]} vs {b.shape[0]}x{b.shape[1]}")


def gemm(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product ``a @ b``."""
    _check(a, "a")
    _check(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"gemm: cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    out = np.matmul(a, b)
    return _finite(out, "gemm")


def add_broadcast_col(z: Matrix, b: Matrix) -> Matrix:
    """Add the column vector ``b`` to every column of ``z``."""
    _check(z, "z")
    _check(b, "b")
    if b.shape != (z.shape[0], 1):
        raise ShapeError(
            f"add_broadcast_col: bias must be {z.shape[0]}x1, got {b.shape[0]}x{b.shape[1]}"
        )
    out = z + b
    return _finite(out, "add_broadcast_col")


def hadamard(a: Matrix, b: Matrix) -> Matrix:
    _same_shape(a, b, "hadamard")
    out = a * b
    return _finite(out, "hadamard")


def add(a: Matrix, b: Matrix) -> Matrix:
    _same_shape(a, b, "add")
    out = a + b
    return _finite(out, "add")


def sub(a: Matrix, b: Matrix) -> Matrix:
    _same_shape(a, b, "sub")
    out = a - b
    return _finite(out, "sub")


def scale(a: Matrix, s: float) -> Matrix:
    _check(a)
    out = a * float(s)
    return _finite(out, "scale")


def transpose(a: Matrix) -> Matrix:
    _check(a)
    return a.T.copy()


def row_sums(a: Matrix) -> Matrix:
    """Sum across columns, giving a ``rows x 1`` matrix."""
    _check(a)
    out = a.sum(axis=1, keepdims=True)
    return _finite(out, "row_sums")


def frobenius_sq(a: Matrix) -> float:
    """Sum of squared entries."""
    _check(a)
    out = float(np.dot(a.ravel(), a.ravel()))
    if not math.isfinite(out):
        raise NonFiniteError("frobenius_sq produced a non-finite value")
    return out

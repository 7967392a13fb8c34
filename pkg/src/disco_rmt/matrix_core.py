"""Dense real symmetric matrices with exact-integer or float64 entries.

Exact matrices hold Python ``int`` objects in a numpy object array, so every
product and trace is carried out in arbitrary precision.  Float matrices are
plain ``float64`` arrays.  Instances are immutable: the backing array is
flagged read-only and every operation allocates a new matrix.
"""
from __future__ import annotations

from numbers import Integral, Real

import numpy as np

__all__ = [
    "SymmetricMatrix",
    "EigenSolverError",
    "trace_power",
    "eigenvalues_sym",
    "add",
    "subtract",
    "scale",
    "block_diagonal",
]


class EigenSolverError(RuntimeError):
    """The symmetric eigensolver failed to converge."""


def _as_exact(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == object:
        bad = [x for x in arr.flat if not isinstance(x, Integral)]
        if bad:
            raise TypeError(f"exact matrix needs integer entries, got {type(bad[0]).__name__}")
    out = np.empty(arr.shape, dtype=object)
    # np.int64 elements would silently wrap under multiplication
    out.flat[:] = [int(x) for x in arr.flat]
    return out


class SymmetricMatrix:
    """An ``n x n`` real symmetric matrix.

    Parameters
    ----------
    entries : array_like
        Square array.  It must already be symmetric (bit-exact); use
        :meth:`from_upper` to mirror an upper triangle instead.
    exact : bool, optional
        Force exact-integer (``True``) or float (``False``) storage.  By
        default integer input is stored exactly and anything else as float64.
    label : str, optional
        Free-form provenance (ensemble and seed), quoted in solver errors.
    """

    __slots__ = ("_data", "_exact", "label")

    def __init__(self, entries, *, exact: bool | None = None, label: str = ""):
        arr = np.asarray(entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("matrix order must be at least 1")
        if exact is None:
            exact = arr.dtype.kind in "iub" or (
                arr.dtype == object and all(isinstance(x, Integral) for x in arr.flat)
            )
        if exact:
            data = _as_exact(arr)
            symmetric = all(
                data[i, j] == data[j, i] for i in range(len(data)) for j in range(i + 1, len(data))
            )
        else:
            data = np.array(arr, dtype=np.float64)
            symmetric = np.array_equal(data, data.T)
        if not symmetric:
            raise ValueError("matrix is not symmetric")
        data.flags.writeable = False
        self._data = data
        self._exact = bool(exact)
        self.label = label

    @classmethod
    def from_upper(cls, entries, **kwargs) -> "SymmetricMatrix":
        """Build a matrix from the upper triangle (diagonal included) of ``entries``."""
        arr = np.asarray(entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        iu = np.triu_indices(arr.shape[0], 1)
        full = arr.copy()
        full[(iu[1], iu[0])] = arr[iu]
        return cls(full, **kwargs)

    @classmethod
    def _wrap(cls, data: np.ndarray, exact: bool, label: str = "") -> "SymmetricMatrix":
        # internal fast path for results that are symmetric by construction
        obj = cls.__new__(cls)
        data.flags.writeable = False
        obj._data = data
        obj._exact = exact
        obj.label = label
        return obj

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "SymmetricMatrix":
        return cls(np.eye(n, dtype=np.int64 if exact else np.float64), exact=exact)

    @classmethod
    def zeros(cls, n: int, exact: bool = True) -> "SymmetricMatrix":
        return cls(np.zeros((n, n), dtype=np.int64 if exact else np.float64), exact=exact)

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of the backing array."""
        return self._data

    def entry(self, i: int, j: int):
        return self._data[i, j]

    def to_float(self) -> "SymmetricMatrix":
        if not self._exact:
            return self
        return SymmetricMatrix._wrap(self._data.astype(np.float64), False, self.label)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymmetricMatrix):
            return NotImplemented
        return self.n == other.n and bool(np.all(self._data == other._data))

    __hash__ = None

    def __add__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        return add(self, other)

    def __sub__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        return subtract(self, other)

    def __neg__(self) -> "SymmetricMatrix":
        return scale(self, -1)

    def __repr__(self) -> str:
        kind = "exact" if self._exact else "float"
        tag = f", label={self.label!r}" if self.label else ""
        return f"SymmetricMatrix(n={self.n}, {kind}{tag})"


def _check_orders(m1: SymmetricMatrix, m2: SymmetricMatrix) -> None:
    if m1.n != m2.n:
        raise ValueError(f"order mismatch: {m1.n} vs {m2.n}")


def _common(m1: SymmetricMatrix, m2: SymmetricMatrix) -> tuple[np.ndarray, np.ndarray, bool]:
    _check_orders(m1, m2)
    if m1.exact and m2.exact:
        return m1.entries, m2.entries, True
    return m1.to_float().entries, m2.to_float().entries, False


def add(m1: SymmetricMatrix, m2: SymmetricMatrix) -> SymmetricMatrix:
    a, b, exact = _common(m1, m2)
    return SymmetricMatrix._wrap(a + b, exact)


def subtract(m1: SymmetricMatrix, m2: SymmetricMatrix) -> SymmetricMatrix:
    a, b, exact = _common(m1, m2)
    return SymmetricMatrix._wrap(a - b, exact)


def scale(m: SymmetricMatrix, c: Real) -> SymmetricMatrix:
    """Multiply every entry by ``c``; exact matrices stay exact only for integer ``c``."""
    if m.exact and isinstance(c, Integral):
        return SymmetricMatrix._wrap(m.entries * int(c), True, m.label)
    return SymmetricMatrix._wrap(m.to_float().entries * float(c), False, m.label)


def block_diagonal(blocks: list[SymmetricMatrix]) -> SymmetricMatrix:
    """Direct sum of square symmetric blocks."""
    if not blocks:
        raise ValueError("need at least one block")
    exact = all(b.exact for b in blocks)
    n = sum(b.n for b in blocks)
    if exact:
        out = np.empty((n, n), dtype=object)
        out.fill(0)
    else:
        out = np.zeros((n, n))
    pos = 0
    for b in blocks:
        out[pos:pos + b.n, pos:pos + b.n] = b.entries if exact else b.to_float().entries
        pos += b.n
    return SymmetricMatrix._wrap(out, exact)


def _matpow(a: np.ndarray, p: int) -> np.ndarray:
    result = None
    base = a
    while p:
        if p & 1:
            result = base if result is None else result.dot(base)
        p >>= 1
        if p:
            base = base.dot(base)
    return result


def trace_power(m: SymmetricMatrix, k: int):
    """Return ``Tr(M**k)``.

    Exact matrices give a Python ``int``; float matrices a ``float``.  Only
    ``M**(k//2)`` is formed; the trace comes from an elementwise product,
    using ``Tr(P Q) = sum(P * Q.T)``.
    """
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    a = m.entries
    if k == 1:
        t = a.trace()
    else:
        half = _matpow(a, k // 2)
        if k % 2:
            t = (half.dot(a) * half).sum()
        else:
            t = (half * half).sum()
    return int(t) if m.exact else float(t)


def eigenvalues_sym(m: SymmetricMatrix) -> np.ndarray:
    """All eigenvalues of ``m`` in ascending order, with multiplicity."""
    a = m.to_float().entries
    try:
        w = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        where = f" ({m.label})" if m.label else ""
        raise EigenSolverError(f"eigensolver did not converge for order {m.n}{where}") from exc
    return w

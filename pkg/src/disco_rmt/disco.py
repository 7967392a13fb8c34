"""The d-fold disco block construction and its exact identities.

``D_0 = A`` and ``D_k = [[D_{k-1}, B_k], [B_k, D_{k-1}]]``, so ``B_k`` has the
order of ``D_{k-1}``, namely ``2**(k-1) * N``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .ensembles import EnsembleSpec, sample
from .matrix_core import SymmetricMatrix, add, eigenvalues_sym, subtract, trace_power

__all__ = [
    "DiscoParams",
    "build_disco",
    "sample_disco",
    "disco_trace_split",
    "split_spectrum",
    "disco_eigenvalues",
    "normalized_disco_moment",
    "degrees_of_freedom",
]


@dataclass(frozen=True)
class DiscoParams:
    """Depth, base order and the specs for ``A`` and ``B_1 .. B_d``.

    Use :meth:`make` to derive all specs from one root seed; the ``A``
    matrix draws from stream ``(*prefix, 0)`` and ``B_k`` from
    ``(*prefix, k)``.
    """

    depth: int
    base_order: int
    a_spec: EnsembleSpec
    b_specs: tuple[EnsembleSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")
        if self.a_spec.order != self.base_order:
            raise ValueError("A must have the base order")
        if len(self.b_specs) != self.depth:
            raise ValueError(f"need {self.depth} B specs, got {len(self.b_specs)}")
        for k, spec in enumerate(self.b_specs, start=1):
            if spec.order != 2 ** (k - 1) * self.base_order:
                raise ValueError(f"B_{k} must have order {2 ** (k - 1) * self.base_order}, got {spec.order}")

    @classmethod
    def from_templates(cls, depth: int, a_template: EnsembleSpec, b_template: EnsembleSpec,
                       prefix: tuple[int, ...] = ()) -> "DiscoParams":
        """Resize and re-stream ``b_template`` for every level; ``a_template`` fixes ``N``."""
        n = a_template.order
        a = a_template.with_stream(*prefix, 0)
        bs = tuple(
            replace(b_template, order=2 ** (k - 1) * n, stream=(*prefix, k))
            for k in range(1, depth + 1)
        )
        return cls(depth, n, a, bs)

    @classmethod
    def make(cls, depth: int, base_order: int, *, seed: int = 0, a_kind: str = "pst",
             b_kind: str = "wigner", period: int = 1, distribution: str = "gaussian",
             prefix: tuple[int, ...] = ()) -> "DiscoParams":
        a = EnsembleSpec(a_kind, base_order, distribution=distribution, seed=seed)
        b = EnsembleSpec(b_kind, base_order, period=period, distribution=distribution, seed=seed)
        return cls.from_templates(depth, a, b, prefix)

    @property
    def order(self) -> int:
        return 2 ** self.depth * self.base_order


def _stack(top: SymmetricMatrix, off: SymmetricMatrix) -> SymmetricMatrix:
    exact = top.exact and off.exact
    t = top.entries if exact else top.to_float().entries
    o = off.entries if exact else off.to_float().entries
    return SymmetricMatrix._wrap(np.block([[t, o], [o, t]]), exact)


def build_disco(a: SymmetricMatrix, bs) -> SymmetricMatrix:
    """Assemble ``D_d`` from ``A`` and ``[B_1, ..., B_d]``."""
    d = a
    for k, b in enumerate(bs, start=1):
        if b.n != d.n:
            raise ValueError(f"B_{k} has order {b.n}, expected {d.n}")
        d = _stack(d, b)
    return d


def sample_disco(params: DiscoParams) -> tuple[SymmetricMatrix, list[SymmetricMatrix]]:
    """Draw ``A`` and the ``B_k`` for ``params``; assemble with :func:`build_disco`."""
    return sample(params.a_spec), [sample(s) for s in params.b_specs]


def disco_trace_split(a: SymmetricMatrix, b: SymmetricMatrix, k: int):
    """``Tr(D_1(A, B)**k)`` computed as ``Tr((A+B)**k) + Tr((A-B)**k)``.

    ``D_1`` is orthogonally similar to ``diag(A + B, A - B)``.  In terms of
    normalized traces ``tr = Tr / order`` this reads
    ``tr(D_1**k) = (tr((A+B)**k) + tr((A-B)**k)) / 2``.
    """
    if a.n != b.n:
        raise ValueError(f"order mismatch: {a.n} vs {b.n}")
    return trace_power(add(a, b), k) + trace_power(subtract(a, b), k)


def split_spectrum(a: SymmetricMatrix, b: SymmetricMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of ``A + B`` and ``A - B``; together, the spectrum of ``D_1(A, B)``."""
    if a.n != b.n:
        raise ValueError(f"order mismatch: {a.n} vs {b.n}")
    return eigenvalues_sym(add(a, b)), eigenvalues_sym(subtract(a, b))


def disco_eigenvalues(a: SymmetricMatrix, bs) -> np.ndarray:
    """Sorted spectrum of ``D_d``, splitting off the outermost level only."""
    bs = list(bs)
    if not bs:
        return eigenvalues_sym(a)
    inner = build_disco(a, bs[:-1])
    plus, minus = split_spectrum(inner, bs[-1])
    return np.sort(np.concatenate([plus, minus]))


def normalized_disco_moment(a: SymmetricMatrix, b: SymmetricMatrix, k: int):
    """``2**-(k/2 + 1) * [Tr((A+B)**k) + Tr((A-B)**k)]`` for even ``k``.

    Exact input gives an ``int`` when the division is exact and a
    :class:`~fractions.Fraction` otherwise.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be a positive even integer, got {k}")
    if a.n != b.n:
        raise ValueError(f"order mismatch: {a.n} vs {b.n}")
    total = trace_power(add(a, b), k) + trace_power(subtract(a, b), k)
    denom = 2 ** (k // 2 + 1)
    if isinstance(total, int):
        value = Fraction(total, denom)
        return int(value) if value.denominator == 1 else value
    return total / denom


def degrees_of_freedom(depth: int, base_order: int) -> int:
    """Independent parameters of ``D_d`` built from a PST ``A`` and Wigner ``B_k``."""
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    if base_order < 2 or base_order % 2:
        raise ValueError(f"base order must be a positive even integer, got {base_order}")
    total = base_order // 2
    for i in range(1, depth + 1):
        size = 2 ** (i - 1) * base_order
        total += size * (size + 1) // 2
    return total

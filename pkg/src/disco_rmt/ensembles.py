"""Seeded generators for the random matrix ensembles.

Every draw is a pure function of an :class:`EnsembleSpec`.  Randomness comes
from a Philox counter-based generator keyed on ``(seed, stream)``, so any
sub-stream can be regenerated on its own, in any order, on any worker.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .matrix_core import SymmetricMatrix, block_diagonal

__all__ = [
    "KINDS",
    "DISTRIBUTIONS",
    "EnsembleSpec",
    "RngStream",
    "parse_ensemble",
    "draw_entries",
    "sample",
    "sample_pst",
    "sample_wigner",
    "sample_block_circulant",
    "block_circulant_classes",
    "generator_count",
    "counterexample_matrices",
    "COUNTEREXAMPLE_A",
    "COUNTEREXAMPLE_B",
]

KINDS = ("pst", "wigner", "block_circulant", "counterexample_a", "counterexample_b")
DISTRIBUTIONS = ("gaussian", "rademacher")

COUNTEREXAMPLE_A = ((-33, -31), (-31, -82))
COUNTEREXAMPLE_B = ((26, 78), (78, -15))

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """An independent, reproducible random stream labelled by ``(root_seed, index)``.

    ``index`` is a tuple so that streams nest: trial ``t`` of a run uses
    ``(t,)`` and its ``k``-th matrix ``(t, k)``.
    """

    root_seed: int
    index: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.root_seed <= _SEED_MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.root_seed}")
        if any(i < 0 for i in self.index):
            raise ValueError(f"stream indices must be non-negative, got {self.index}")

    def child(self, *index: int) -> "RngStream":
        return RngStream(self.root_seed, self.index + tuple(index))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.root_seed, spawn_key=self.index)
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for one random matrix.

    ``period`` is only meaningful for ``block_circulant``.  For the two
    counterexample kinds ``order`` must be even and the matrix holds
    ``order // 2`` copies of the fixed 2x2 block; seed and distribution are
    ignored.
    """

    kind: str
    order: int
    period: int = 1
    distribution: str = "gaussian"
    seed: int = 0
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown entry distribution {self.distribution!r}")
        if self.order < 1:
            raise ValueError(f"order must be positive, got {self.order}")
        if self.kind in ("pst", "counterexample_a", "counterexample_b") and self.order % 2:
            raise ValueError(f"{self.kind} requires an even order, got {self.order}")
        if self.kind == "block_circulant":
            if self.period < 1 or self.order % self.period:
                raise ValueError(f"period {self.period} must divide order {self.order}")
        # validates the seed range
        self.rng_stream()

    def rng_stream(self) -> RngStream:
        return RngStream(self.seed, tuple(self.stream))

    def with_stream(self, *index: int) -> "EnsembleSpec":
        return replace(self, stream=tuple(index))

    def with_order(self, order: int) -> "EnsembleSpec":
        return replace(self, order=order)

    def describe(self) -> str:
        name = f"blockcirc:{self.period}" if self.kind == "block_circulant" else self.kind
        return f"{name} N={self.order} {self.distribution} seed={self.seed} stream={self.stream}"


def parse_ensemble(text: str, order: int, *, seed: int = 0, distribution: str = "gaussian",
                   role: str = "a") -> EnsembleSpec:
    """Parse the command-line grammar ``pst | wigner | blockcirc:<m> | counterexample``.

    ``counterexample`` resolves to the first matrix of the pair for
    ``role="a"`` and the second for ``role="b"``.
    """
    text = text.strip().lower()
    if text in ("pst", "wigner"):
        return EnsembleSpec(text, order, distribution=distribution, seed=seed)
    if text.startswith("blockcirc:"):
        try:
            m = int(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad block-circulant period in {text!r}") from None
        return EnsembleSpec("block_circulant", order, period=m, distribution=distribution, seed=seed)
    if text == "counterexample":
        kind = "counterexample_a" if role == "a" else "counterexample_b"
        return EnsembleSpec(kind, order, distribution=distribution, seed=seed)
    raise ValueError(f"unknown ensemble {text!r}; expected pst, wigner, blockcirc:<m> or counterexample")


def draw_entries(rng: np.random.Generator, size: int, distribution: str) -> np.ndarray:
    """``size`` i.i.d. mean-0, variance-1 values."""
    if distribution == "gaussian":
        return rng.standard_normal(size)
    if distribution == "rademacher":
        return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0
    raise ValueError(f"unknown entry distribution {distribution!r}")


def _pst_lag_index(n: int) -> np.ndarray:
    i = np.arange(n)
    lag = np.abs(i[:, None] - i[None, :])
    return np.minimum(lag, n - 1 - lag)


def sample_pst(spec: EnsembleSpec) -> SymmetricMatrix:
    """Palindromic symmetric Toeplitz matrix with first row ``(b0, b1, ..., b1, b0)``."""
    if spec.kind != "pst":
        raise ValueError(f"expected a pst spec, got {spec.kind!r}")
    n = spec.order
    b = draw_entries(spec.rng_stream().generator(), n // 2, spec.distribution)
    return SymmetricMatrix._wrap(b[_pst_lag_index(n)], False, spec.describe())


def sample_wigner(spec: EnsembleSpec) -> SymmetricMatrix:
    if spec.kind != "wigner":
        raise ValueError(f"expected a wigner spec, got {spec.kind!r}")
    n = spec.order
    iu = np.triu_indices(n)
    values = draw_entries(spec.rng_stream().generator(), len(iu[0]), spec.distribution)
    out = np.empty((n, n))
    out[iu] = values
    out[(iu[1], iu[0])] = values
    return SymmetricMatrix._wrap(out, False, spec.describe())


def block_circulant_classes(n: int, m: int) -> np.ndarray:
    """Generator index for every position of an ``m``-period block circulant.

    Entry ``(i, j)`` is determined by the wrapped diagonal ``l = (j - i) mod n``
    and the phase ``r = i mod m`` along it.  Symmetry identifies ``(l, r)``
    with ``(n - l, r + l)`` (mod ``n`` and ``m``); each orbit gets one draw.
    Returns an ``n x n`` integer array of orbit labels ``0 .. count-1``.
    """
    if m < 1 or n % m:
        raise ValueError(f"period {m} must divide order {n}")
    lag, phase = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    code = lag * m + phase
    partner = ((n - lag) % n) * m + (phase + lag) % m
    _, labels = np.unique(np.minimum(code, partner), return_inverse=True)
    labels = labels.reshape(n, m)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    return labels[(j - i) % n, i % m]


def sample_block_circulant(spec: EnsembleSpec) -> SymmetricMatrix:
    if spec.kind != "block_circulant":
        raise ValueError(f"expected a block_circulant spec, got {spec.kind!r}")
    labels = block_circulant_classes(spec.order, spec.period)
    values = draw_entries(spec.rng_stream().generator(), int(labels.max()) + 1, spec.distribution)
    return SymmetricMatrix._wrap(values[labels], False, spec.describe())


def counterexample_matrices(m: int) -> tuple[SymmetricMatrix, SymmetricMatrix]:
    """Block-diagonal integer pair with ``m`` copies of each fixed 2x2 block."""
    if m < 1:
        raise ValueError(f"block count must be positive, got {m}")
    a = SymmetricMatrix(COUNTEREXAMPLE_A, exact=True)
    b = SymmetricMatrix(COUNTEREXAMPLE_B, exact=True)
    return block_diagonal([a] * m), block_diagonal([b] * m)


def generator_count(spec: EnsembleSpec) -> int:
    """Number of independent draws behind one matrix of ``spec``."""
    n = spec.order
    if spec.kind == "pst":
        return n // 2
    if spec.kind == "wigner":
        return n * (n + 1) // 2
    if spec.kind == "block_circulant":
        return int(block_circulant_classes(n, spec.period).max()) + 1
    return 0


def sample(spec: EnsembleSpec) -> SymmetricMatrix:
    if spec.kind == "pst":
        return sample_pst(spec)
    if spec.kind == "wigner":
        return sample_wigner(spec)
    if spec.kind == "block_circulant":
        return sample_block_circulant(spec)
    a, b = counterexample_matrices(spec.order // 2)
    return a if spec.kind == "counterexample_a" else b

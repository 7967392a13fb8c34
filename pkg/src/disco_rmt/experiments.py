"""Seeded Monte-Carlo experiments and their tabular artifacts.

Every ``run_*`` function is a pure function of its :class:`ExperimentConfig`:
trial ``t`` draws from RNG stream ``(t, ...)`` of the root seed, trials may
run on a thread pool in any order, and results are reduced in trial order.
Each result knows how to render itself as CSV tables and as a JSON document.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .disco import DiscoParams, disco_eigenvalues, normalized_disco_moment, sample_disco
from .ensembles import EnsembleSpec, counterexample_matrices, parse_ensemble, sample
from .limit_moments import MOMENT_BUDGET, catalan, gaussian_moment, limit_moment_disco
from .matrix_core import SymmetricMatrix, eigenvalues_sym, scale, trace_power

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "CheckFailed",
    "ExperimentConfig",
    "SpectralSummary",
    "MomentEstimate",
    "ConjectureRow",
    "empirical_moment",
    "histogram",
    "gap_statistics",
    "exact_limit",
    "sandwich_verdict",
    "run_esd",
    "run_moments",
    "run_dsweep",
    "run_gaps",
    "run_conjecture",
    "run_counterexample",
    "render",
    "write_artifacts",
]

EXPERIMENTS = ("esd", "moments", "dsweep", "gaps", "conjecture", "counterexample")
MAX_ORDER = 16384

# reference values as originally printed; the first disagrees with exact recomputation
PRINTED_COUNTEREXAMPLE = {"tr_a4": 889_801_750, "tr_b4": 869_734_090, "normalized": 1_336_343_790}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class CheckFailed(AssertionError):
    """An experiment's built-in acceptance check did not hold."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    ensemble: str = "pst"
    ensemble_b: str = "wigner"
    size: int = 512
    depth: int = 0
    depths: tuple[int, ...] = (0, 1, 2, 4)
    trials: int = 10
    moments: tuple[int, ...] = (2, 4, 6, 8)
    bins: int | None = None
    seed: int = 0
    distribution: str = "gaussian"
    blocks: int = 10
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.size < 1:
            raise ConfigError(f"size must be positive, got {self.size}")
        if self.depth < 0 or any(d < 0 for d in self.depths):
            raise ConfigError("depths must be non-negative")
        if any(h < 1 for h in self.moments):
            raise ConfigError(f"moment orders must be positive, got {self.moments}")
        if self.bins is not None and self.bins < 1:
            raise ConfigError(f"bins must be positive, got {self.bins}")
        if self.experiment == "conjecture" and any(h % 2 for h in self.moments):
            raise ConfigError("conjecture moments must be even")
        for d in self._used_depths():
            if 2 ** d * self.size > MAX_ORDER:
                raise ConfigError(f"order 2^{d}*{self.size} exceeds the eigensolver budget {MAX_ORDER}")
        if self.experiment != "counterexample":
            try:
                self.spec_a()
                self.spec_b()
            except ValueError as exc:
                raise ConfigError(str(exc)) from None

    def _used_depths(self) -> tuple[int, ...]:
        if self.experiment == "dsweep":
            return self.depths
        if self.experiment in ("conjecture", "counterexample"):
            return (1,)
        return (self.depth,)

    def spec_a(self) -> EnsembleSpec:
        return parse_ensemble(self.ensemble, self.size, seed=self.seed,
                              distribution=self.distribution, role="a")

    def spec_b(self) -> EnsembleSpec:
        return parse_ensemble(self.ensemble_b, self.size, seed=self.seed,
                              distribution=self.distribution, role="b")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d


# --------------------------------------------------------------------------
# per-draw statistics


def empirical_moment(m: SymmetricMatrix, h: int, normalization: float = 1.0) -> float:
    """``(1/n) Tr((M / normalization)**h)``.

    Orders up to 8 use matrix powers; higher orders go through the spectrum.
    """
    if h < 1:
        raise ValueError(f"h must be positive, got {h}")
    if normalization <= 0:
        raise ValueError(f"normalization must be positive, got {normalization}")
    if h <= 8:
        return trace_power(scale(m, 1.0 / normalization), h) / m.n
    eigs = eigenvalues_sym(m) / normalization
    return float(np.mean(eigs ** h))


def histogram(values, bins: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Counts over Freedman-Diaconis bins unless ``bins`` is given."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot histogram an empty sample")
    edges = np.histogram_bin_edges(values, bins="fd" if bins is None else bins)
    counts, edges = np.histogram(values, bins=edges)
    return edges, counts


def gap_statistics(eigs, scale: float = 1.0) -> np.ndarray:
    """Adjacent spacings of an ascending spectrum, divided by ``scale``."""
    eigs = np.asarray(eigs, dtype=float)
    if eigs.ndim != 1 or eigs.size < 2:
        raise ValueError("need at least two eigenvalues")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    gaps = np.diff(eigs)
    if np.any(gaps < 0):
        raise ValueError("eigenvalues must be sorted ascending")
    return gaps / scale


@dataclass
class SpectralSummary:
    """Normalized spectrum of one draw (or a pool of draws) and derived statistics."""

    eigenvalues: np.ndarray
    moments: dict[int, float]
    bin_edges: np.ndarray
    counts: np.ndarray
    gaps: np.ndarray

    @classmethod
    def from_eigenvalues(cls, eigenvalues, orders=(2, 4, 6, 8), bins: int | None = None,
                         gap_scale: float = 1.0) -> "SpectralSummary":
        eigs = np.sort(np.asarray(eigenvalues, dtype=float))
        moments = {h: float(np.mean(eigs ** h)) for h in orders}
        edges, counts = histogram(eigs, bins)
        gaps = gap_statistics(eigs, gap_scale) if eigs.size > 1 else np.empty(0)
        return cls(eigs, moments, edges, counts, gaps)


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    estimate: float
    std_error: float
    exact_limit: float | None = None
    depth: int | None = None

    @property
    def abs_dev(self) -> float | None:
        return None if self.exact_limit is None else abs(self.estimate - self.exact_limit)


def _estimate(samples) -> tuple[float, float]:
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        return float(samples.mean()), math.nan
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(samples.size))


def exact_limit(a_kind: str, b_kind: str, depth: int, h: int) -> float | None:
    """Known limiting ``h``-th moment of the normalized ensemble, or ``None``."""
    if h > MOMENT_BUDGET:
        return None
    if depth == 0:
        if a_kind == "pst":
            return float(gaussian_moment(h))
        if a_kind == "wigner":
            return 0.0 if h % 2 else float(catalan(h // 2))
        return None
    if b_kind != "wigner":
        return None
    if a_kind == "pst":
        return float(limit_moment_disco(depth, h))
    if a_kind == "wigner":
        # Gaussian weight replaced by a semicircle: total variance 1, still semicircular
        return 0.0 if h % 2 else float(catalan(h // 2))
    return None


# --------------------------------------------------------------------------
# trial machinery


def _map_trials(fn, trials: int, workers: int):
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _draw_spectrum(config: ExperimentConfig, depth: int, trial: int) -> tuple[np.ndarray, int]:
    """Raw ascending spectrum of trial ``trial`` at ``depth`` and the matrix order."""
    params = DiscoParams.from_templates(depth, config.spec_a(), config.spec_b(), prefix=(trial,))
    a, bs = sample_disco(params)
    return disco_eigenvalues(a, bs), params.order


def _moment_samples(config: ExperimentConfig, depth: int) -> tuple[np.ndarray, list[np.ndarray]]:
    def one(trial):
        eigs, order = _draw_spectrum(config, depth, trial)
        normed = eigs / math.sqrt(order)
        return np.array([np.mean(normed ** h) for h in config.moments]), normed

    out = _map_trials(one, config.trials, config.workers)
    return np.array([o[0] for o in out]), [o[1] for o in out]


def _estimates(config: ExperimentConfig, depth: int, per_trial: np.ndarray) -> list[MomentEstimate]:
    a_kind, b_kind = config.spec_a().kind, config.spec_b().kind
    rows = []
    for col, h in enumerate(config.moments):
        est, se = _estimate(per_trial[:, col])
        rows.append(MomentEstimate(h, est, se, exact_limit(a_kind, b_kind, depth, h), depth))
    return rows


# --------------------------------------------------------------------------
# rendering helpers


def _num(x):
    """Render a float deterministically; ``nan``/``None`` become an empty CSV cell."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x)) if isinstance(x, (float, np.floating)) else x


def _json_num(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(x) if isinstance(x, (float, np.floating)) else x


def _moment_table(rows: list[MomentEstimate], with_depth: bool = False):
    header = (["depth"] if with_depth else []) + ["order", "estimate", "std_error", "exact_limit", "abs_dev"]
    body = [
        ([r.depth] if with_depth else [])
        + [r.order, _num(r.estimate), _num(r.std_error), _num(r.exact_limit), _num(r.abs_dev)]
        for r in rows
    ]
    return header, body


def _moment_json(rows: list[MomentEstimate]) -> list[dict]:
    return [
        {"depth": r.depth, "order": r.order, "estimate": _json_num(r.estimate),
         "std_error": _json_num(r.std_error), "exact_limit": _json_num(r.exact_limit),
         "abs_dev": _json_num(r.abs_dev)}
        for r in rows
    ]


def _histogram_table(edges, counts):
    return ["bin_lo", "bin_hi", "count"], [
        [_num(float(lo)), _num(float(hi)), int(c)] for lo, hi, c in zip(edges[:-1], edges[1:], counts)
    ]


def _histogram_json(edges, counts) -> dict:
    return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}


# --------------------------------------------------------------------------
# experiments


@dataclass
class EsdResult:
    config: ExperimentConfig
    summary: SpectralSummary
    estimates: list[MomentEstimate]
    name: str = "esd"

    def tables(self) -> dict[str, tuple[list, list]]:
        return {
            "": _histogram_table(self.summary.bin_edges, self.summary.counts),
            "moments": _moment_table(self.estimates),
        }

    def to_dict(self) -> dict:
        return {
            "experiment": self.name,
            "config": self.config.to_dict(),
            "eigenvalue_count": int(self.summary.eigenvalues.size),
            "histogram": _histogram_json(self.summary.bin_edges, self.summary.counts),
            "moments": _moment_json(self.estimates),
        }


def run_esd(config: ExperimentConfig) -> EsdResult:
    """Pool normalized spectra over trials; histogram plus moment estimates."""
    per_trial, spectra = _moment_samples(config, config.depth)
    pooled = np.concatenate(spectra)
    summary = SpectralSummary.from_eigenvalues(pooled, config.moments, config.bins)
    return EsdResult(config, summary, _estimates(config, config.depth, per_trial))


@dataclass
class MomentsResult:
    config: ExperimentConfig
    estimates: list[MomentEstimate]
    name: str = "moments"

    def tables(self):
        return {"": _moment_table(self.estimates, with_depth=self.name == "dsweep")}

    def to_dict(self) -> dict:
        return {"experiment": self.name, "config": self.config.to_dict(),
                "moments": _moment_json(self.estimates)}


def run_moments(config: ExperimentConfig) -> MomentsResult:
    per_trial, _ = _moment_samples(config, config.depth)
    return MomentsResult(config, _estimates(config, config.depth, per_trial))


def run_dsweep(config: ExperimentConfig) -> MomentsResult:
    """Empirical moments of ``D_d / sqrt(2**d N)`` against the exact limits, per depth."""
    rows = []
    for d in config.depths:
        per_trial, _ = _moment_samples(config, d)
        rows.extend(_estimates(config, d, per_trial))
    return MomentsResult(config, rows, name="dsweep")


@dataclass
class GapsResult:
    config: ExperimentConfig
    spacings: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    per_trial: int

    def tables(self):
        return {
            "": (["index", "spacing"], [[i, _num(float(s))] for i, s in enumerate(self.spacings)]),
            "hist": _histogram_table(self.bin_edges, self.counts),
        }

    def to_dict(self) -> dict:
        return {
            "experiment": "gaps",
            "config": self.config.to_dict(),
            "spacings_per_trial": self.per_trial,
            "spacings": [float(s) for s in self.spacings],
            "histogram": _histogram_json(self.bin_edges, self.counts),
        }


def run_gaps(config: ExperimentConfig) -> GapsResult:
    """Adjacent spacings of the raw spectrum divided by ``sqrt(N)``, ``N`` the base order.

    Spacings from successive trials are concatenated in trial order.
    """
    scale_ = math.sqrt(config.size)

    def one(trial):
        eigs, _ = _draw_spectrum(config, config.depth, trial)
        return gap_statistics(eigs, scale_)

    per = _map_trials(one, config.trials, config.workers)
    spacings = np.concatenate(per)
    edges, counts = histogram(spacings, config.bins)
    return GapsResult(config, spacings, edges, counts, len(per[0]))


def sandwich_verdict(m_a: float, se_a: float, m_disco: float, se_disco: float,
                     m_b: float, se_b: float, margin: float = 2.0) -> str:
    """``"holds"``, ``"violated"`` or ``"within noise"`` for ``min <= disco <= max``.

    Each side must clear ``margin`` combined standard errors to count as
    holding; falling short by that much on either side counts as violated.
    Missing standard errors are treated as zero.
    """
    z = [0.0 if math.isnan(s) else s for s in (se_a, se_disco, se_b)]
    (lo, se_lo), (hi, se_hi) = sorted([(m_a, z[0]), (m_b, z[2])])
    below = m_disco - lo
    above = hi - m_disco
    tol_lo = margin * math.hypot(z[1], se_lo)
    tol_hi = margin * math.hypot(z[1], se_hi)
    if below < -tol_lo or above < -tol_hi:
        return "violated"
    if below >= tol_lo and above >= tol_hi:
        return "holds"
    return "within noise"


@dataclass(frozen=True)
class ConjectureRow:
    k: int
    m_a: float
    se_a: float
    m_disco: float
    se_disco: float
    m_b: float
    se_b: float
    verdict: str

    @property
    def point_sandwich(self) -> bool:
        return min(self.m_a, self.m_b) <= self.m_disco <= max(self.m_a, self.m_b)


@dataclass
class ConjectureResult:
    config: ExperimentConfig
    rows: list[ConjectureRow]

    def tables(self):
        header = ["k", "m_a", "se_a", "m_disco", "se_disco", "m_b", "se_b", "verdict"]
        body = [[r.k, _num(r.m_a), _num(r.se_a), _num(r.m_disco), _num(r.se_disco),
                 _num(r.m_b), _num(r.se_b), r.verdict] for r in self.rows]
        return {"": (header, body)}

    def to_dict(self) -> dict:
        return {
            "experiment": "conjecture",
            "config": self.config.to_dict(),
            "rows": [{key: _json_num(v) for key, v in asdict(r).items()} for r in self.rows],
        }


def run_conjecture(config: ExperimentConfig) -> ConjectureResult:
    """Moments of ``A/sqrt(N)``, ``D_1(A, B)/sqrt(2N)`` and ``B/sqrt(N)`` per even order."""
    spec_a, spec_b = config.spec_a(), config.spec_b()
    if spec_a.order != spec_b.order:
        raise ConfigError("both ensembles must have the same order")
    n = config.size
    ks = config.moments

    def one(trial):
        a = sample(spec_a.with_stream(trial, 0))
        b = sample(spec_b.with_stream(trial, 1))
        ea = eigenvalues_sym(a) / math.sqrt(n)
        eb = eigenvalues_sym(b) / math.sqrt(n)
        ed = disco_eigenvalues(a, [b]) / math.sqrt(2 * n)
        return [[np.mean(e ** k) for k in ks] for e in (ea, ed, eb)]

    samples = np.array(_map_trials(one, config.trials, config.workers))  # trial x role x k
    rows = []
    for col, k in enumerate(ks):
        (ma, sa), (md, sd), (mb, sb) = (_estimate(samples[:, role, col]) for role in range(3))
        rows.append(ConjectureRow(k, ma, sa, md, sd, mb, sb, sandwich_verdict(ma, sa, md, sd, mb, sb)))
    return ConjectureResult(config, rows)


@dataclass
class CounterexampleResult:
    blocks: int
    tr_a4: int
    tr_b4: int
    normalized: int
    printed: dict = field(default_factory=lambda: dict(PRINTED_COUNTEREXAMPLE))

    @property
    def violates_bound(self) -> bool:
        return self.normalized > max(self.tr_a4, self.tr_b4)

    def mismatches(self) -> list[str]:
        if self.blocks != 10:
            return []
        return [q for q in ("tr_a4", "tr_b4", "normalized") if getattr(self, q) != self.printed[q]]

    def tables(self):
        rows = []
        for q in ("tr_a4", "tr_b4", "normalized"):
            printed = self.printed[q] if self.blocks == 10 else ""
            match = "" if printed == "" else str(getattr(self, q) == printed).lower()
            rows.append([q, getattr(self, q), printed, match])
        rows.append(["violates_bound", str(self.violates_bound).lower(), "", ""])
        return {"": (["quantity", "value", "printed_value", "matches_printed"], rows)}

    def to_dict(self) -> dict:
        return {
            "experiment": "counterexample",
            "blocks": self.blocks,
            "k": 4,
            "tr_a4": self.tr_a4,
            "tr_b4": self.tr_b4,
            "normalized": self.normalized,
            "violates_bound": self.violates_bound,
            "printed": self.printed if self.blocks == 10 else None,
            "mismatches_vs_printed": self.mismatches(),
        }


def run_counterexample(blocks: int = 10) -> CounterexampleResult:
    """Exact 4th-power traces of the block-diagonal integer pair.

    Raises :class:`CheckFailed` if the normalized disco trace does not exceed
    both individual traces.
    """
    a, b = counterexample_matrices(blocks)
    result = CounterexampleResult(blocks, trace_power(a, 4), trace_power(b, 4),
                                  normalized_disco_moment(a, b, 4))
    if not result.violates_bound:
        raise CheckFailed("normalized disco trace does not exceed max(Tr A^4, Tr B^4)")
    return result


def run(config: ExperimentConfig):
    if config.experiment == "esd":
        return run_esd(config)
    if config.experiment == "moments":
        return run_moments(config)
    if config.experiment == "dsweep":
        return run_dsweep(config)
    if config.experiment == "gaps":
        return run_gaps(config)
    if config.experiment == "conjecture":
        return run_conjecture(config)
    return run_counterexample(config.blocks)


# --------------------------------------------------------------------------
# output


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def render(result, fmt: str = "csv") -> dict[str, str]:
    """Map of file-suffix to text; ``""`` is the main artifact."""
    if fmt == "json":
        return {"": json.dumps(result.to_dict(), indent=2) + "\n"}
    if fmt == "csv":
        return {suffix: _csv_text(*table) for suffix, table in result.tables().items()}
    raise ConfigError(f"unknown output format {fmt!r}")


def write_artifacts(result, out: str | Path, fmt: str = "csv") -> list[Path]:
    """Write the main artifact to ``out`` and extra CSV tables beside it as ``<stem>.<suffix>.csv``."""
    out = Path(out)
    written = []
    for suffix, text in render(result, fmt).items():
        path = out if not suffix else out.with_name(f"{out.stem}.{suffix}{out.suffix or '.csv'}")
        path.write_text(text)
        written.append(path)
    return written

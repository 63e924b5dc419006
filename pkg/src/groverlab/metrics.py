"""Search accuracy, classical fidelity, pure-state fidelity and top-k truncation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .distribution import Distribution
from .errors import DimensionMismatch, DomainError, NotNormalized

DEFAULT_TAU = 0.3
DEFAULT_LIMIT = 30


def search_accuracy(pred: Distribution, true_marked: Iterable[str], tau: float = DEFAULT_TAU) -> float:
    """Fraction of true marked states found among the top-|true| predictions with probability >= tau.

    Ranking is by probability descending, ties by ascending integer value.
    States missing from a truncated prediction count as probability 0.
    """
    truth = set(true_marked)
    if not truth:
        raise DomainError("true marked set is empty")
    if not 0.0 <= tau <= 1.0 or math.isnan(tau):
        raise DomainError(f"tau must lie in [0, 1], got {tau}")
    top = pred.ranked()[: len(truth)]
    found = {bits for bits, p in top if p >= tau}
    return len(found & truth) / len(truth)


def classical_fidelity(p: Distribution, q: Distribution) -> float:
    """(sum_i sqrt(p_i q_i))**2 over all 2**n states, zero-filling states absent from either side."""
    if p.n != q.n:
        raise DimensionMismatch(f"n={p.n} vs n={q.n}")
    keys = p.probs.keys() & q.probs.keys()
    bc = math.fsum(math.sqrt(p.probs[k] * q.probs[k]) for k in keys)
    return min(bc * bc, 1.0)


def classical_fidelity_arrays(p: np.ndarray, q: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionMismatch(f"{p.shape} vs {q.shape}")
    return float(np.sqrt(p * q).sum() ** 2)


def state_fidelity(amps1: Sequence[complex], amps2: Sequence[complex], tol: float = 1e-6) -> float:
    """|<psi|phi>|**2 for two normalised pure states."""
    a = np.asarray(amps1, dtype=complex)
    b = np.asarray(amps2, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    for v in (a, b):
        norm = float(np.vdot(v, v).real)
        if abs(norm - 1.0) > tol:
            raise NotNormalized(f"state norm^2 {norm}")
    return float(abs(np.vdot(a, b)) ** 2)


def truncate_topk(dist: Distribution, limit: int = DEFAULT_LIMIT) -> Distribution:
    """Keep the ``limit`` best-ranked entries, zeros included; flag truncation if anything was cut."""
    ranked = dist.ranked()
    return Distribution(dist.n, dict(ranked[:limit]), truncated=dist.truncated or len(ranked) > limit)


@dataclass(frozen=True)
class MetricReport:
    n: int
    t: int | None
    sa_mean: float
    sa_std: float
    cf_mean: float
    cf_std: float
    count: int
    method: str = ""
    failures: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def aggregate(n: int, t: int | None, sa: Sequence[float], cf: Sequence[float], method: str = "", failures: int = 0) -> MetricReport:
    """Mean and population standard deviation of per-sample scores."""
    if not sa:
        raise DomainError("cannot aggregate an empty sample")
    sa_arr = np.asarray(sa, dtype=float)
    cf_arr = np.asarray(cf, dtype=float)
    return MetricReport(
        n=n,
        t=t,
        sa_mean=float(sa_arr.mean()),
        sa_std=float(sa_arr.std()),
        cf_mean=float(cf_arr.mean()),
        cf_std=float(cf_arr.std()),
        count=len(sa_arr),
        method=method,
        failures=failures,
    )

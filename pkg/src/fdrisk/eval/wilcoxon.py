"""Wilcoxon signed-rank test with an exact null distribution for small samples."""
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import norm, rankdata

from ..exceptions import InvalidArgumentError, PairingError

EXACT_MAX_N = 25
ALTERNATIVES = ("two_sided", "greater", "less")
#: differences are rounded to this many decimals before zero/tie detection
ROUND_DECIMALS = 12


@dataclass(frozen=True)
class WilcoxonResult:
    W: float
    p_value: float
    n_effective: int
    alternative: str
    p_greater: float
    p_less: float
    p_two_sided: float
    method: str
    flagged: bool

    def to_dict(self):
        return asdict(self)


def exact_null_counts(doubled_ranks):
    """Number of sign assignments reaching each value of 2W.

    ``doubled_ranks`` are integer 2*rank values (midranks stay integral);
    the counts equal those from enumerating all 2^n sign vectors.
    """
    counts = np.zeros(int(sum(doubled_ranks)) + 1, dtype=np.int64)
    counts[0] = 1
    top = 0
    for r in doubled_ranks:
        r = int(r)
        counts[r:top + r + 1] += counts[:top + 1].copy()
        top += r
    return counts


def _exact(doubled_ranks, w2):
    counts = exact_null_counts(doubled_ranks)
    total = 2 ** len(doubled_ranks)
    p_greater = int(counts[w2:].sum()) / total
    p_less = int(counts[:w2 + 1].sum()) / total
    return p_greater, p_less


def _normal(ranks, w):
    n = len(ranks)
    mean = n * (n + 1) / 4
    _, t = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - np.sum(t ** 3 - t) / 48
    z = (w - mean) / np.sqrt(var) if var > 0 else 0.0
    return float(norm.sf(z)), float(norm.cdf(z))


def wilcoxon_signed_rank(a, b, alternative="two_sided"):
    """Paired signed-rank test of ``a - b``.

    ``greater`` tests whether ``a`` tends to exceed ``b``. Zero
    differences are dropped; ties among ``|d|`` get midranks. For at most
    25 nonzero differences the p-value is exact; above that a
    tie-corrected normal approximation is used.
    """
    if alternative not in ALTERNATIVES:
        raise InvalidArgumentError(f"alternative must be one of {ALTERNATIVES}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise PairingError(f"paired samples differ in shape: {a.shape} vs {b.shape}")
    if len(a) == 0:
        raise PairingError("paired samples are empty")
    d = np.round(a - b, ROUND_DECIMALS)
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0, alternative, 1.0, 1.0, 1.0, "exact", True)
    ranks = rankdata(np.abs(d))
    w = float(ranks[d > 0].sum())
    if n <= EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(np.int64)
        p_greater, p_less = _exact(doubled, int(round(2 * w)))
        method = "exact"
    else:
        p_greater, p_less = _normal(ranks, w)
        method = "normal"
    p_two = min(1.0, 2 * min(p_greater, p_less))
    p = {"two_sided": p_two, "greater": p_greater, "less": p_less}[alternative]
    return WilcoxonResult(w, p, n, alternative, p_greater, p_less, p_two, method, False)

"""Stratified fold assignment and repeated fold plans."""
from dataclasses import dataclass

import numpy as np

from .._rng import stream
from ..exceptions import InfeasibleStratificationError, InvalidArgumentError


def stratified_folds(labels, n_folds, seed, _name=("folds",)):
    """Fold index per row.

    Each class is shuffled with its own seeded stream and dealt round-robin;
    the deal continues where the previous class stopped, so fold sizes differ
    by at most one as well as per-class counts.
    """
    y = np.asarray(labels)
    if n_folds < 2:
        raise InvalidArgumentError(f"n_folds must be >= 2, got {n_folds}")
    out = np.full(len(y), -1, dtype=np.int64)
    start = 0
    for cls in (0, 1):
        rows = np.nonzero(y == cls)[0]
        if len(rows) < n_folds:
            raise InfeasibleStratificationError(
                f"class {cls} has {len(rows)} rows, fewer than {n_folds} folds")
        rows = stream(seed, *_name, "class", cls).permutation(rows)
        out[rows] = (start + np.arange(len(rows))) % n_folds
        start = (start + len(rows)) % n_folds
    if np.any(out < 0):
        raise InvalidArgumentError("labels must be 0/1")
    return out


@dataclass(frozen=True)
class FoldPlan:
    n_repetitions: int
    n_folds: int
    assignments: np.ndarray
    seed: int

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "assignments", a)

    @property
    def n_rows(self):
        return self.assignments.shape[1]

    def split(self, repetition, fold):
        """Train and test row indices."""
        a = self.assignments[repetition]
        return np.nonzero(a != fold)[0], np.nonzero(a == fold)[0]

    def splits(self, repetition):
        return [self.split(repetition, k) for k in range(self.n_folds)]

    def to_dict(self):
        return {"n_repetitions": self.n_repetitions, "n_folds": self.n_folds, "seed": self.seed,
                "assignments": self.assignments.tolist()}


def make_plan(labels, n_folds=5, n_repetitions=5, seed=0):
    if n_repetitions < 1:
        raise InvalidArgumentError("n_repetitions must be >= 1")
    a = [stratified_folds(labels, n_folds, seed, ("folds", "repetition", r)) for r in range(n_repetitions)]
    return FoldPlan(n_repetitions, n_folds, np.array(a), seed)

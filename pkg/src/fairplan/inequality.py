"""Generalized Entropy index and its between/within-group decomposition.

The index over benefits b_1..b_n with mean b̄ and sensitivity alpha is

    (1 / (n * alpha * (alpha - 1))) * sum_i ((b_i / b̄)^alpha - 1)

With alpha = 2 (the default) this reduces to half the squared coefficient
of variation, so negative benefits are fine; fractional alpha with
negative benefit ratios is a domain error. The decomposition is exact:
total == between + within, where the within terms carry the
(n_g/n) * (b̄_g/b̄)^alpha weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError

DISPLAY_SCALE = 1000.0  # dashboards show the index ×1000


@dataclass(frozen=True)
class GroupTerm:
    between_term: float
    within_term: float


@dataclass(frozen=True)
class InequalityReport:
    total: float
    between: float
    within: float
    per_group: Mapping[str, GroupTerm]
    alpha: float
    display_scale: float = DISPLAY_SCALE

    @property
    def total_scaled(self) -> float:
        return self.total * self.display_scale

    def to_dict(self):
        return {
            "total": self.total,
            "between": self.between,
            "within": self.within,
            "per_group": {
                g: {"between_term": t.between_term, "within_term": t.within_term}
                for g, t in sorted(self.per_group.items())
            },
            "alpha": self.alpha,
            "display_scale": self.display_scale,
        }


def _check_domain(values: np.ndarray, mean: float, alpha: float):
    if alpha in (0.0, 1.0):
        raise DomainError("alpha in {0, 1} has no closed form here; out of scope")
    if values.size == 0:
        raise DomainError("inequality of an empty benefit list is undefined")
    if mean == 0.0:
        raise DomainError("zero mean benefit: GE index undefined")
    if alpha != int(alpha) and np.any(values / mean < 0):
        raise DomainError("negative benefit ratios need integer alpha")


def ge_index(benefits, alpha: float = 2.0) -> float:
    """Generalized Entropy index of a benefit list."""
    values = np.asarray(benefits, dtype=float)
    mean = float(values.mean()) if values.size else 0.0
    _check_domain(values, mean, alpha)
    ratios = values / mean
    return float(np.sum(np.power(ratios, alpha) - 1.0) / (values.size * alpha * (alpha - 1.0)))


def decompose(benefits, labels: Sequence[str], alpha: float = 2.0) -> InequalityReport:
    """Between/within decomposition of the GE index over labeled benefits.

    Between-group compares group means against the global mean; within-group
    re-weights each group's own index. Groups with no members contribute
    nothing (they are absent from per_group).
    """
    values = np.asarray(benefits, dtype=float)
    labels = list(labels)
    if len(labels) != values.size:
        raise ValueError("labels and benefits length mismatch")
    mean = float(values.mean()) if values.size else 0.0
    _check_domain(values, mean, alpha)

    n = values.size
    coeff = 1.0 / (alpha * (alpha - 1.0))
    per_group = {}
    between = 0.0
    within = 0.0
    for g in sorted(set(labels)):
        gv = values[np.array([lab == g for lab in labels])]
        ng = gv.size
        gmean = float(gv.mean())
        ratio = gmean / mean
        b_term = (ng / n) * coeff * (np.power(ratio, alpha) - 1.0)
        if np.any(gv != gmean):
            if gmean == 0.0:
                raise DomainError(f"group '{g}' has zero mean benefit: within term undefined")
            w_term = (ng / n) * np.power(ratio, alpha) * ge_index(gv, alpha)
        else:
            w_term = 0.0  # perfectly equal group, no within contribution
        per_group[g] = GroupTerm(between_term=float(b_term), within_term=float(w_term))
        between += b_term
        within += w_term

    return InequalityReport(
        total=ge_index(values, alpha),  # pooled index; equals between+within to rounding
        between=float(between),
        within=float(within),
        per_group=per_group,
        alpha=alpha,
    )

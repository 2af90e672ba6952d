"""Analytic Hierarchy Process over the fix taxonomy.

The user scores each of the seven fix kinds on a 1..9 scale (1 least
favorite, 9 most favorite). The pairwise comparison matrix is derived as
clipped score ratios (the ratio-scale shortcut, perfectly consistent
absent clipping); the priority vector is the principal eigenvector,
computed by power iteration, with lambda_max from the Rayleigh quotient
and the consistency ratio against the standard random-index table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .evaluate import InvalidationSet, atom_fix_kind
from .vulns import AssumptionLink

FIX_KINDS = (
    "version_upgrade",
    "not_privileged",
    "not_root",
    "not_capability",
    "not_syscall",
    "read_only_fs",
    "no_new_priv",
)

# relative breadth of the graph change each fix implies; tie-breaker only
_SIDE_EFFECT_RANK = {
    "no_new_priv": 0,
    "read_only_fs": 1,
    "not_syscall": 2,
    "not_capability": 2,
    "not_root": 2,
    "version_upgrade": 3,
    "not_privileged": 4,
    None: 5,
}

# random consistency index, n = 1..9
_RI = (0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45)

POWER_TOLERANCE = 1e-10
POWER_MAX_ITER = 10_000


@dataclass(frozen=True)
class PreferenceVector:
    scores: dict[str, int]

    def __post_init__(self) -> None:
        missing = [k for k in FIX_KINDS if k not in self.scores]
        if missing:
            raise ValidationError(f"preference vector missing fix kinds: {missing}")
        extra = [k for k in self.scores if k not in FIX_KINDS]
        if extra:
            raise ValidationError(f"unknown fix kinds: {extra}")
        bad = {k: v for k, v in self.scores.items()
               if not isinstance(v, (int, float)) or not 1 <= v <= 9}
        if bad:
            raise ValidationError(f"scores must be in [1, 9]: {bad}")

    def as_array(self) -> np.ndarray:
        return np.array([float(self.scores[k]) for k in FIX_KINDS])


@dataclass(frozen=True)
class PriorityResult:
    weights: dict[str, float]
    lambda_max: float
    consistency_index: float
    consistency_ratio: float

    def weight_array(self) -> np.ndarray:
        return np.array([self.weights[k] for k in FIX_KINDS])


def random_index(n: int) -> float:
    if not 1 <= n <= len(_RI):
        raise ValidationError(f"no random index tabulated for n={n}")
    return _RI[n - 1]


def build_comparison_matrix(preferences: PreferenceVector) -> np.ndarray:
    """Pairwise matrix a_ij = clip(s_i / s_j, 1/9, 9); reciprocal by construction."""
    s = preferences.as_array()
    m = np.clip(np.outer(s, 1.0 / s), 1.0 / 9.0, 9.0)
    np.fill_diagonal(m, 1.0)
    return m


def _validate_matrix(m: np.ndarray) -> int:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("comparison matrix must be square")
    n = m.shape[0]
    if np.any(m <= 0):
        raise ValidationError("comparison matrix entries must be positive")
    if not np.allclose(np.diag(m), 1.0):
        raise ValidationError("comparison matrix diagonal must be 1")
    if not np.allclose(m * m.T, 1.0, atol=1e-8):
        raise ValidationError("comparison matrix must be reciprocal")
    return n


def priority_vector(matrix: np.ndarray) -> PriorityResult:
    """Principal eigenvector by power iteration, normalized to sum 1.

    Converges for every positive matrix (Perron-Frobenius); iteration is
    capped defensively and non-convergence raises.
    """
    m = np.asarray(matrix, dtype=float)
    n = _validate_matrix(m)
    w = np.full(n, 1.0 / n)
    for _ in range(POWER_MAX_ITER):
        nxt = m @ w
        nxt = nxt / nxt.sum()
        if np.max(np.abs(nxt - w)) < POWER_TOLERANCE:
            w = nxt
            break
        w = nxt
    else:
        raise ValidationError("power iteration did not converge")
    lambda_max = float(w @ (m @ w) / (w @ w))
    ci = (lambda_max - n) / (n - 1) if n > 1 else 0.0
    ri = random_index(n)
    cr = ci / ri if ri > 0 else 0.0
    keys = FIX_KINDS if n == len(FIX_KINDS) else tuple(str(i) for i in range(n))
    return PriorityResult(
        weights={k: float(x) for k, x in zip(keys, w)},
        lambda_max=lambda_max,
        consistency_index=float(ci),
        consistency_ratio=float(cr),
    )


def weights_from_preferences(preferences: PreferenceVector) -> PriorityResult:
    return priority_vector(build_comparison_matrix(preferences))


def costs_from_weights(result: PriorityResult) -> dict[str, float]:
    """Cut-ordering costs: high weight (preferred fix) means low cost."""
    return {k: 1.0 - w for k, w in result.weights.items()}


@dataclass(frozen=True)
class FixCandidate:
    fix_kind: str | None
    link: AssumptionLink
    weight: float
    label: str

    @property
    def advisory_only(self) -> bool:
        return self.fix_kind is None or self.fix_kind == "version_upgrade"


def _candidate_label(fix_kind: str | None, link: AssumptionLink) -> str:
    atom = link.atom
    if fix_kind == "not_capability":
        return f"drop capability {atom.name}"
    if fix_kind == "not_syscall":
        return f"deny syscall {atom.name}"
    if fix_kind == "not_privileged":
        return "remove --privileged"
    if fix_kind == "not_root":
        return "run as a non-root user"
    if fix_kind == "version_upgrade":
        return f"upgrade {atom.component} beyond {atom.version or 'the vulnerable range'}"
    if fix_kind == "read_only_fs":
        return f"stop writable mount of {atom.name}"
    if fix_kind == "no_new_priv":
        return "set no-new-privileges"
    return f"manually invalidate: {atom.describe()}"


def rank_candidate_fixes(
    cuts: list[InvalidationSet],
    weights: PriorityResult,
) -> list[FixCandidate]:
    """Order every assumption appearing in a cut by its fix-kind weight.

    Descending weight; ties break toward fixes that touch fewer graph
    edges, then lexically. Assumptions with no mappable fix kind are kept
    with weight 0 so an operator still sees them (advisory patch only).
    """
    seen: set[str] = set()
    candidates: list[FixCandidate] = []
    for cut in cuts:
        for link in sorted(cut.links, key=lambda l: l.leaf_id):
            if link.leaf_id in seen:
                continue
            seen.add(link.leaf_id)
            fix = atom_fix_kind(link.atom)
            weight = weights.weights.get(fix, 0.0) if fix else 0.0
            candidates.append(FixCandidate(
                fix_kind=fix, link=link, weight=weight,
                label=_candidate_label(fix, link)))
    candidates.sort(key=lambda c: (
        -c.weight, _SIDE_EFFECT_RANK.get(c.fix_kind, 5), c.fix_kind or "~", c.label))
    return candidates

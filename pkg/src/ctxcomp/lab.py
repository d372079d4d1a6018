"""Desk-scale selection lab on jointly Gaussian features.

Instances realize a correlation structure over n features and a target as
unit-norm embedding rows whose dot products equal the correlations, so
cosine similarity and correlation coincide and the gain criterion acts on
exactly the quantities the closed-form mutual-information oracle sees.

MI is measured in nats (reports also carry bits).
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import DegenerateSetError, InfeasibleSpecError, ValidationError

PSD_EIGEN_FLOOR = -1e-10
PSD_MAX_SHIFT = 0.05
EMBED_DOT_TOL = 1e-8
COND_LIMIT = 1e12
ENUM_BOUND = 20

STRATEGY_RELEVANCE = "relevance"
STRATEGY_MIG = "mig"


@dataclass(frozen=True)
class GaussianInstance:
    """Correlation matrix over (x_1..x_n, y) plus its embedding realization."""

    n: int
    corr: np.ndarray        # (n+1)×(n+1), unit diagonal, PSD
    embeddings: np.ndarray  # (n+1)×(n+1) unit-norm rows; row n is the target
    projected: bool = False
    max_shift: float = 0.0

    @property
    def target_corr(self) -> np.ndarray:
        return self.corr[: self.n, self.n]


def _nearest_psd(corr: np.ndarray) -> Tuple[np.ndarray, float]:
    """Clip negative eigenvalues and renormalize to unit diagonal."""
    w, v = np.linalg.eigh(corr)
    fixed = (v * np.clip(w, 0.0, None)) @ v.T
    fixed = 0.5 * (fixed + fixed.T)
    d = np.sqrt(np.diag(fixed))
    fixed = fixed / np.outer(d, d)
    np.fill_diagonal(fixed, 1.0)
    return fixed, float(np.abs(fixed - corr).max())


def _factorize(corr: np.ndarray) -> np.ndarray:
    """Embedding rows E with E @ E.T == corr, deterministic sign convention."""
    w, v = np.linalg.eigh(corr)
    w = np.clip(w, 0.0, None)
    for j in range(v.shape[1]):
        pivot = int(np.argmax(np.abs(v[:, j])))
        if v[pivot, j] < 0:
            v[:, j] = -v[:, j]
    return v * np.sqrt(w)


def build_instance(
    target_corr: Sequence[float],
    feature_corr: Optional[np.ndarray] = None,
) -> GaussianInstance:
    """Assemble and validate an instance from explicit correlations."""
    rho = np.asarray(target_corr, dtype=np.float64)
    n = rho.size
    if n < 1:
        raise ValidationError("need at least one feature")
    if np.abs(rho).max() > 1.0:
        raise ValidationError("target correlations must lie in [-1, 1]")
    if feature_corr is None:
        sigma = np.eye(n)
    else:
        sigma = np.asarray(feature_corr, dtype=np.float64)
        if sigma.shape != (n, n):
            raise ValidationError(f"feature_corr must be {n}×{n}")
        if not np.allclose(sigma, sigma.T, atol=1e-12):
            raise ValidationError("feature_corr must be symmetric")
        if not np.allclose(np.diag(sigma), 1.0, atol=1e-12):
            raise ValidationError("feature_corr must have unit diagonal")
    corr = np.empty((n + 1, n + 1))
    corr[:n, :n] = sigma
    corr[:n, n] = rho
    corr[n, :n] = rho
    corr[n, n] = 1.0

    projected = False
    max_shift = 0.0
    if np.linalg.eigvalsh(corr).min() < PSD_EIGEN_FLOOR:
        corr, max_shift = _nearest_psd(corr)
        projected = True
        if max_shift > PSD_MAX_SHIFT:
            raise InfeasibleSpecError(
                f"profile is infeasible: PSD projection moved an entry by "
                f"{max_shift:.4f} (> {PSD_MAX_SHIFT})"
            )
    emb = _factorize(corr)
    if np.abs(emb @ emb.T - corr).max() > EMBED_DOT_TOL:
        raise ValidationError("factorization failed to reproduce correlations")
    return GaussianInstance(
        n=n, corr=corr, embeddings=emb, projected=projected, max_shift=max_shift
    )


DEFAULT_REDUNDANT_TOP = {
    "top": 3,
    "top_relevance": (0.55, 0.65),
    "top_corr": (0.85, 0.95),
    "rest_relevance": (0.20, 0.28),
}

DEFAULT_ORTHOGONAL = {"relevance": (0.05, 0.30)}


def instance_spec(family: str, n: int, params: Optional[dict] = None, seed=0) -> dict:
    return {"family": family, "n": n, "params": dict(params or {}), "seed": seed}


def gen_instance(spec: dict) -> GaussianInstance:
    """Deterministic instance from a profile spec (family, n, params, seed)."""
    family = spec.get("family", "explicit")
    if family == "explicit":
        return build_instance(spec["target_corr"], spec.get("feature_corr"))
    n = int(spec["n"])
    params = dict(spec.get("params") or {})
    rng = np.random.default_rng(spec.get("seed", 0))
    if family == "orthogonal":
        p = {**DEFAULT_ORTHOGONAL, **params}
        lo, hi = p["relevance"]
        rho = rng.uniform(lo, hi, size=n)
        return build_instance(rho)
    if family == "redundant-top":
        p = {**DEFAULT_REDUNDANT_TOP, **params}
        top = int(p["top"])
        if not 1 <= top <= n:
            raise ValidationError(f"top must be in [1, {n}], got {top}")
        rho = np.empty(n)
        rho[:top] = rng.uniform(*p["top_relevance"], size=top)
        rho[top:] = rng.uniform(*p["rest_relevance"], size=n - top)
        tau = float(rng.uniform(*p["top_corr"]))
        sigma = np.eye(n)
        sigma[:top, :top] = tau
        np.fill_diagonal(sigma, 1.0)
        return build_instance(rho, sigma)
    raise ValidationError(f"unknown instance family {family!r}")


def gaussian_mi(S: Sequence[int], inst: GaussianInstance) -> float:
    """Closed-form I(S; y) = -0.5 ln(1 - rho' Sigma^-1 rho), in nats."""
    idx = sorted(set(int(i) for i in S))
    if not idx:
        return 0.0
    if idx[0] < 0 or idx[-1] >= inst.n:
        raise ValidationError(f"feature indices out of range: {idx}")
    sigma = inst.corr[np.ix_(idx, idx)]
    rho = inst.corr[idx, inst.n]
    if np.linalg.cond(sigma) >= COND_LIMIT:
        raise DegenerateSetError(f"near-singular feature block for {idx}")
    explained = float(rho @ np.linalg.solve(sigma, rho))
    residual = 1.0 - explained
    if residual <= 0.0:
        raise DegenerateSetError(f"set {idx} determines the target exactly")
    return max(0.0, -0.5 * math.log(residual))


def greedy_select(strategy: str, k: int, inst: GaussianInstance) -> List[int]:
    """Greedy feature selection; ties always break to the lowest index."""
    if not 1 <= k <= inst.n:
        raise ValidationError(f"k must be in [1, {inst.n}], got {k}")
    feats = inst.embeddings[: inst.n]
    target = inst.embeddings[inst.n]
    relevance = kernels.row_cosines(feats, target)
    if strategy == STRATEGY_RELEVANCE:
        return sorted(range(inst.n), key=lambda i: (-relevance[i], i))[:k]
    if strategy != STRATEGY_MIG:
        raise ValidationError(f"unknown strategy {strategy!r}")
    selected: List[int] = []
    remaining = list(range(inst.n))
    for _ in range(k):
        sel_idx = np.asarray(selected, dtype=np.int64)
        best_i = None
        best_g = None
        for i in remaining:
            red, _ = kernels.max_cosine_vs(feats, sel_idx, feats[i])
            g = float(relevance[i]) - float(red)
            if best_g is None or g > best_g:
                best_g = g
                best_i = i
        selected.append(best_i)
        remaining.remove(best_i)
    return selected


def brute_force_best(k: int, inst: GaussianInstance) -> Tuple[int, ...]:
    """The k-subset maximizing oracle MI; ties to the lexicographically smallest."""
    if inst.n > ENUM_BOUND:
        raise ValidationError(
            f"enumeration bound: n={inst.n} exceeds {ENUM_BOUND}"
        )
    if not 1 <= k <= inst.n:
        raise ValidationError(f"k must be in [1, {inst.n}], got {k}")
    best = None
    best_mi = None
    for combo in itertools.combinations(range(inst.n), k):
        mi = gaussian_mi(combo, inst)
        if best_mi is None or mi > best_mi:
            best_mi = mi
            best = combo
    return best


@dataclass
class TrialConfig:
    trials: int
    n: int = 8
    k: int = 3
    family: str = "redundant-top"
    params: Dict = field(default_factory=dict)
    seed: int = 0
    brute_force: Optional[bool] = None  # default: enabled iff n <= 12

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if not 1 <= self.k <= self.n:
            raise ValidationError(f"k must be in [1, {self.n}]")

    @classmethod
    def from_dict(cls, d: dict) -> "TrialConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValidationError(f"unknown lab config keys: {sorted(extra)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "n": self.n,
            "k": self.k,
            "family": self.family,
            "params": dict(self.params),
            "seed": self.seed,
            "brute_force": self.brute_force,
        }


NATS_TO_BITS = 1.0 / math.log(2.0)
_MI_TIE_TOL = 1e-12


@dataclass
class SelectionReport:
    config: dict
    trials: int
    ties: int
    differing: int
    mig_wins: int
    rel_wins: int
    win_rate_when_differ: Optional[float]
    mean_mi_mig: float
    mean_mi_rel: float
    mean_gap: float
    mean_ratio_mig: Optional[float]
    mean_ratio_rel: Optional[float]
    projected_instances: int
    per_trial: List[dict] = field(default_factory=list)

    def to_dict(self, include_trials: bool = True) -> dict:
        out = {
            "config": self.config,
            "trials": self.trials,
            "ties": self.ties,
            "differing": self.differing,
            "mig_wins": self.mig_wins,
            "rel_wins": self.rel_wins,
            "win_rate_when_differ": self.win_rate_when_differ,
            "mean_mi_mig_nats": self.mean_mi_mig,
            "mean_mi_rel_nats": self.mean_mi_rel,
            "mean_mi_mig_bits": self.mean_mi_mig * NATS_TO_BITS,
            "mean_mi_rel_bits": self.mean_mi_rel * NATS_TO_BITS,
            "mean_gap_nats": self.mean_gap,
            "mean_ratio_mig": self.mean_ratio_mig,
            "mean_ratio_rel": self.mean_ratio_rel,
            "projected_instances": self.projected_instances,
        }
        if include_trials:
            out["per_trial"] = self.per_trial
        return out


def run_trials(cfg: TrialConfig) -> SelectionReport:
    """Score both greedy strategies with the MI oracle over seeded trials.

    Trial t draws its instance from seed (cfg.seed, t), so results are
    independent of evaluation order.
    """
    use_bf = cfg.brute_force if cfg.brute_force is not None else cfg.n <= 12
    ties = differing = mig_wins = rel_wins = projected = 0
    mi_mig_sum = mi_rel_sum = gap_sum = 0.0
    ratio_mig_sum = ratio_rel_sum = 0.0
    rows = []
    for t in range(cfg.trials):
        spec = instance_spec(cfg.family, cfg.n, cfg.params, seed=[cfg.seed, t])
        inst = gen_instance(spec)
        projected += int(inst.projected)
        sel_mig = greedy_select(STRATEGY_MIG, cfg.k, inst)
        sel_rel = greedy_select(STRATEGY_RELEVANCE, cfg.k, inst)
        mi_mig = gaussian_mi(sel_mig, inst)
        mi_rel = gaussian_mi(sel_rel, inst)
        row = {
            "trial": t,
            "selected_mig": sel_mig,
            "selected_rel": sel_rel,
            "mi_mig": mi_mig,
            "mi_rel": mi_rel,
        }
        if sorted(sel_mig) == sorted(sel_rel):
            ties += 1
        else:
            differing += 1
            if mi_mig > mi_rel + _MI_TIE_TOL:
                mig_wins += 1
            elif mi_rel > mi_mig + _MI_TIE_TOL:
                rel_wins += 1
        mi_mig_sum += mi_mig
        mi_rel_sum += mi_rel
        gap_sum += mi_mig - mi_rel
        if use_bf:
            best = brute_force_best(cfg.k, inst)
            mi_best = gaussian_mi(best, inst)
            row["mi_best"] = mi_best
            if mi_best > 0:
                ratio_mig_sum += mi_mig / mi_best
                ratio_rel_sum += mi_rel / mi_best
            else:
                ratio_mig_sum += 1.0
                ratio_rel_sum += 1.0
        rows.append(row)
    return SelectionReport(
        config=cfg.to_dict(),
        trials=cfg.trials,
        ties=ties,
        differing=differing,
        mig_wins=mig_wins,
        rel_wins=rel_wins,
        win_rate_when_differ=(mig_wins / differing) if differing else None,
        mean_mi_mig=mi_mig_sum / cfg.trials,
        mean_mi_rel=mi_rel_sum / cfg.trials,
        mean_gap=gap_sum / cfg.trials,
        mean_ratio_mig=(ratio_mig_sum / cfg.trials) if use_bf else None,
        mean_ratio_rel=(ratio_rel_sum / cfg.trials) if use_bf else None,
        projected_instances=projected,
        per_trial=rows,
    )

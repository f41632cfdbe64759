"""Random CO(p,q) cocycles, Lyapunov exponent estimates and uniform
regularity of matrix sequences.

A step of the cocycle is g = e^c O with O in SO_0(p,q) written as a product
of Givens rotations in the definite coordinate planes followed by hyperbolic
boosts in the mixed planes.  J = diag(-1 x p, +1 x q), so g^T J g = e^{2c} J.

Exponents are estimated by evolving an orthonormal frame and
re-orthonormalizing it (QR) every ``interval`` steps.  The conformal factor
is tracked separately, so the distortion exponent chi_hat = 2 mean(c) is
exact per step and never recovered from the matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from numba import njit

CHUNK = 1 << 15
MAX_INTERVAL = 20
SCHEMA_VERSION = 1


class NumericalOverflow(ArithmeticError):
    """Frame entries blew up between two re-orthonormalizations."""


class SingularMatrix(ValueError):
    pass


@dataclass(frozen=True)
class CocycleModel:
    p: int
    q: int
    boost_scale: float = 0.3
    rotation_scale: float = 1.0
    conformal_log_mean: float = -0.1
    conformal_log_spread: float = 0.2
    seed: int = 42

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise ValueError("need p, q >= 0 and p + q >= 1")
        if min(self.boost_scale, self.rotation_scale, self.conformal_log_spread) < 0:
            raise ValueError("scales must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def n(self) -> int:
        return self.p + self.q

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def planes(self):
        """Rotation planes (within each definite block) and boost planes."""
        neg = range(self.p)
        pos = range(self.p, self.n)
        rot = list(combinations(neg, 2)) + list(combinations(pos, 2))
        boost = [(i, j) for i in neg for j in pos]
        return (np.array(rot, dtype=np.int64).reshape(-1, 2),
                np.array(boost, dtype=np.int64).reshape(-1, 2))

    @property
    def draws_per_step(self) -> int:
        rot, boost = self.planes()
        return len(rot) + len(boost) + 1

    def form(self) -> np.ndarray:
        return np.diag([-1.0] * self.p + [1.0] * self.q)


def _scaled_draws(model: CocycleModel, z: np.ndarray) -> np.ndarray:
    """Turn standard normals (k, m) into angles, rapidities and log factors."""
    rot, boost = model.planes()
    nr, nb = len(rot), len(boost)
    out = np.empty_like(z)
    out[:, :nr] = model.rotation_scale * z[:, :nr]
    out[:, nr:nr + nb] = model.boost_scale * z[:, nr:nr + nb]
    out[:, -1] = model.conformal_log_mean + model.conformal_log_spread * z[:, -1]
    return out


@njit(cache=True, nogil=True)
def _apply_step(mat, params, rot, boost):
    """Left-multiply ``mat`` in place by the O(p,q) part of one step."""
    ncols = mat.shape[1]
    nr = rot.shape[0]
    for k in range(nr):
        i, j = rot[k, 0], rot[k, 1]
        c, s = math.cos(params[k]), math.sin(params[k])
        for col in range(ncols):
            a, b = mat[i, col], mat[j, col]
            mat[i, col] = c * a - s * b
            mat[j, col] = s * a + c * b
    for k in range(boost.shape[0]):
        i, j = boost[k, 0], boost[k, 1]
        t = params[nr + k]
        ch, sh = math.cosh(t), math.sinh(t)
        for col in range(ncols):
            a, b = mat[i, col], mat[j, col]
            mat[i, col] = ch * a + sh * b
            mat[j, col] = sh * a + ch * b


@njit(cache=True, nogil=True)
def _reorthonormalize(frame, logs):
    """Modified Gram-Schmidt on the columns; adds log|R_jj| to ``logs``."""
    n = frame.shape[0]
    for j in range(n):
        for k in range(j):
            d = 0.0
            for i in range(n):
                d += frame[i, k] * frame[i, j]
            for i in range(n):
                frame[i, j] -= d * frame[i, k]
        nrm = 0.0
        for i in range(n):
            nrm += frame[i, j] * frame[i, j]
        nrm = math.sqrt(nrm)
        if nrm == 0.0 or not math.isfinite(nrm):
            return False
        logs[j] += math.log(nrm)
        for i in range(n):
            frame[i, j] /= nrm
    return True


@njit(cache=True, nogil=True)
def _run_chunk(frame, logs, params, rot, boost, interval, since):
    """Advance the frame through every row of ``params``.  Returns the
    number of steps since the last QR, or -1 on overflow."""
    for k in range(params.shape[0]):
        _apply_step(frame, params[k], rot, boost)
        since += 1
        if since >= interval:
            if not _reorthonormalize(frame, logs):
                return -1
            since = 0
    return since


def sample_step(model: CocycleModel, rng: np.random.Generator) -> np.ndarray:
    """One cocycle value e^c O, O in O(p,q)."""
    return sample_step_with_factor(model, rng)[0]


def sample_step_with_factor(model: CocycleModel, rng: np.random.Generator):
    z = rng.standard_normal((1, model.draws_per_step))
    params = _scaled_draws(model, z)[0]
    rot, boost = model.planes()
    mat = np.eye(model.n)
    _apply_step(mat, params, rot, boost)
    c = params[-1]
    return math.exp(c) * mat, c


def conformal_factor(g: np.ndarray, p: int, q: int) -> float:
    """lambda with g^T J g = lambda J, read off the matrix (cross-check for
    the sampled factor e^{2c})."""
    j = np.diag([-1.0] * p + [1.0] * q)
    return float(np.trace(j @ g.T @ j @ g)) / (p + q)


def product_exponents(mats: Sequence[np.ndarray], interval: int = 1) -> list[float]:
    """Exponents of the product g_N ... g_1 of an explicit matrix list, by
    the same frame/QR scheme as the sampler."""
    if not mats:
        raise ValueError("need at least one matrix")
    if not 1 <= interval <= MAX_INTERVAL:
        raise ValueError(f"interval must lie in 1..{MAX_INTERVAL}")
    n = mats[0].shape[0]
    frame = np.eye(n)
    logs = np.zeros(n)
    since = 0
    for g in mats:
        frame = np.asarray(g, dtype=float) @ frame
        since += 1
        if since >= interval:
            if not _reorthonormalize(frame, logs):
                raise NumericalOverflow("frame overflowed; use a shorter interval")
            since = 0
    if since and not _reorthonormalize(frame, logs):
        raise NumericalOverflow("frame overflowed at the final re-orthonormalization")
    return sorted(float(x) for x in logs / len(mats))


@dataclass
class LyapunovEstimate:
    p: int
    q: int
    exponents: list[float]
    chi_hat: float
    steps: int
    grouping: list[list[int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.p + self.q

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items()}


def default_threshold(tol: float, steps: int) -> float:
    return max(10 * tol, 5 / math.sqrt(steps))


def group_exponents(exponents: Sequence[float], threshold: float) -> list[list[int]]:
    """Split the sorted exponents wherever the gap exceeds ``threshold``."""
    groups: list[list[int]] = [[0]]
    for k in range(1, len(exponents)):
        if exponents[k] - exponents[k - 1] > threshold:
            groups.append([k])
        else:
            groups[-1].append(k)
    return groups


def estimate_exponents(model: CocycleModel, steps: int, interval: int = 1,
                       tol: float = 5e-2) -> LyapunovEstimate:
    """Lyapunov exponents of the cocycle over ``steps`` steps."""
    if steps < 1:
        raise ValueError("steps must be positive")
    if not 1 <= interval <= MAX_INTERVAL:
        raise ValueError(f"interval must lie in 1..{MAX_INTERVAL}")
    rng = model.rng()
    rot, boost = model.planes()
    m = model.draws_per_step
    frame = np.eye(model.n)
    logs = np.zeros(model.n)
    c_sum = 0.0
    since = 0
    done = 0
    while done < steps:
        k = min(CHUNK, steps - done)
        params = _scaled_draws(model, rng.standard_normal((k, m)))
        since = _run_chunk(frame, logs, params, rot, boost, interval, since)
        if since < 0:
            raise NumericalOverflow(
                f"frame overflowed with interval {interval}; use a shorter interval")
        c_sum += float(params[:, -1].sum())
        done += k
    if since > 0 and not _reorthonormalize(frame, logs):
        raise NumericalOverflow("frame overflowed at the final re-orthonormalization")
    c_mean = c_sum / steps
    exps = sorted(float(x) for x in logs / steps + c_mean)
    return LyapunovEstimate(model.p, model.q, exps, 2 * c_mean, steps,
                            group_exponents(exps, default_threshold(tol, steps)))


@dataclass
class PairingReport:
    r: int
    blocks: list[float]
    multiplicities: list[int]
    block_residuals: list[float]
    exponent_residuals: list[float]
    det_residual: float
    rules: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.rules.values())

    @property
    def max_pair_residual(self) -> float:
        return max(self.block_residuals + self.exponent_residuals)

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["max_pair_residual"] = self.max_pair_residual
        return d


def check_pairing(est: LyapunovEstimate, tol: float,
                  threshold: Optional[float] = None) -> PairingReport:
    """Check the pairing chi_i + chi_{r+1-i} = chi on an estimate."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ex = est.exponents
    n = len(ex)
    th = default_threshold(tol, est.steps) if threshold is None else threshold
    groups = group_exponents(ex, th)
    r = len(groups)
    means = [float(np.mean([ex[k] for k in g])) for g in groups]
    mult = [len(g) for g in groups]
    block_res = [abs(means[i] + means[r - 1 - i] - est.chi_hat) for i in range((r + 1) // 2)]
    # finest grouping: exponent k against exponent n+1-k
    exp_res = [abs(ex[k] + ex[n - 1 - k] - est.chi_hat) for k in range((n + 1) // 2)]
    det_res = abs(sum(ex) - n * est.chi_hat / 2)
    p = min(est.p, est.q)
    rules = {
        "pairing": all(x <= tol for x in block_res + exp_res),
        "multiplicity": all(mult[i] == mult[r - 1 - i] for i in range(r)),
        "determinant": det_res <= n * tol,
        "count": r <= (2 * p if r % 2 == 0 else 2 * p + 1),
    }
    return PairingReport(r, means, mult, block_res, exp_res, det_res, rules)


# --------------------------------------------------------------------------
# uniform regularity of matrix sequences


@dataclass
class MatrixSequence:
    mats: list[np.ndarray]
    times: list[float]

    def __post_init__(self):
        if len(self.mats) != len(self.times):
            raise ValueError("need one time per matrix")
        t = np.asarray(self.times, dtype=float)
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ValueError("times must be positive and strictly increasing")

    def log_det_and_norm(self):
        ld, ln = [], []
        for k, g in enumerate(self.mats):
            sign, logdet = np.linalg.slogdet(g)
            if sign == 0 or not np.isfinite(logdet):
                raise SingularMatrix(f"matrix {k} is singular")
            ld.append(logdet)
            ln.append(math.log(np.linalg.norm(g, 2)))
        return np.array(ld), np.array(ln)


@dataclass(frozen=True)
class RegularityVerdict:
    kind: str                      # Uniform | NotUniform | Inconclusive
    exponent: Optional[float]      # chi_det / n when Uniform
    det_rate: float                # estimated lim a_k
    norm_rate: float               # estimated lim b_k
    det_stderr: float
    norm_stderr: float

    def to_json(self) -> dict:
        return asdict(self)


def _tail_slope(t: np.ndarray, y: np.ndarray):
    """Least-squares slope of y against t with intercept, and its standard
    error.  The intercept absorbs bounded multipliers l_k, l_k'."""
    a = np.vstack([t, np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    dof = max(len(t) - 2, 1)
    s2 = float(resid @ resid) / dof
    var_t = float(((t - t.mean()) ** 2).sum())
    return float(coef[0]), math.sqrt(s2 / var_t) if var_t > 0 else math.inf


def classify_uniform_regularity(s: MatrixSequence, tol: float) -> RegularityVerdict:
    """Decide whether (g_k) has a single Lyapunov exponent along (T_k).

    a_k = log|det g_k| / T_k and b_k = log||g_k|| / T_k.  Their limits are
    estimated as the slopes of log|det g_k| and log||g_k|| against T_k over
    the last three quarters of the sequence.  A limit counts as stable when
    its standard error is at most ``tol``.
    """
    if len(s.mats) < 3:
        raise ValueError("need at least three matrices")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = s.mats[0].shape[0]
    ld, ln = s.log_det_and_norm()
    t = np.asarray(s.times, dtype=float)
    start = len(t) // 4
    t, ld, ln = t[start:], ld[start:], ln[start:]
    a, sa = _tail_slope(t, ld)
    b, sb = _tail_slope(t, ln)
    gap = abs(b - a / n)
    if gap > 3 * tol:
        kind, expo = "NotUniform", None
    elif gap <= tol and sa <= tol and sb <= tol:
        kind, expo = "Uniform", a / n
    else:
        kind, expo = "Inconclusive", None
    return RegularityVerdict(kind, expo, a, b, sa, sb)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True)

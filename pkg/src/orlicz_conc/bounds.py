"""Closed-form bound evaluators: moment bounds under a growth envelope,
tail profiles (Lipschitz, two-level, quadratic-form, bounded-Hessian),
enlargement lower bounds, and chaos moment sums.

Every unspecified universal constant appears as an explicit knob (default 1);
verification code fits empirical constants instead of asserting against
unknown absolutes. All evaluators are pure and total on their stated domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from .conjugacy import omega_star
from .errors import InputError
from .psi import GrowthEnvelope, PhiSpec, PsiSpec, SeparableFromPhi, psi_p_norm

_E = math.e

# exp() overflow guard; exponents above this are treated as +inf
_EXP_CAP = 700.0

P_MAX = 1e6  # bisection cap for chebyshev_level


def _check_nonneg(**kwargs):
    for name, v in kwargs.items():
        if not (isinstance(v, (int, float)) and v >= 0 and math.isfinite(v)):
            raise InputError(f"{name} must be a finite real >= 0, got {v!r}")


@dataclass(frozen=True)
class MomentBoundInputs:
    """Inputs shared by the defective moment bounds.

    lower_moment is ||f||_beta (or ||f||_q for the small-moment variant);
    grad_moment is G(p) = || |grad f|_{Psi_p} ||_p.
    """

    p: float
    lower_moment: float
    grad_moment: float
    env: GrowthEnvelope

    def __post_init__(self):
        _check_nonneg(lower_moment=self.lower_moment, grad_moment=self.grad_moment)
        if not (isinstance(self.p, (int, float)) and self.p > 0):
            raise InputError(f"p must be > 0, got {self.p!r}")


@dataclass(frozen=True)
class PartitionNorms:
    """The five partition norms of a symmetric 2-index array entering the
    quadratic chaos moment sum, at dual exponent parameter r >= 2."""

    hs: float
    op: float
    entry_lr: float
    mixed_2_rstar: float
    rstar_rstar: float
    r: float

    def __post_init__(self):
        _check_nonneg(hs=self.hs, op=self.op, entry_lr=self.entry_lr,
                      mixed_2_rstar=self.mixed_2_rstar,
                      rstar_rstar=self.rstar_rstar)
        if not self.r >= 2.0:
            raise InputError(f"partition norms require r >= 2, got {self.r}")


@dataclass
class TailProfile:
    """A named tail bound t -> probability, clipped to [0,1] on output.

    raw() exposes the unclipped value for constant fitting; kind names the
    bound shape this instantiates (e.g. "lipschitz", "two_level").
    """

    kind: str
    parameters: Dict[str, float]
    fn: Callable = field(repr=False)

    def raw(self, t: float) -> float:
        return self.fn(float(t))

    def __call__(self, t: float) -> float:
        return min(1.0, max(0.0, self.raw(t)))

    def table(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.empty((len(ts), 2))
        for i, t in enumerate(ts):
            out[i] = (t, self(t))
        return out


# ---------------------------------------------------------------------------
# moment bounds

def l_constant(env: GrowthEnvelope) -> float:
    """L(K, D, alpha, beta), the centered-moment constant."""
    kd = env.K * env.D
    ia = 1.0 / (env.alpha - 1.0)
    return ia * kd ** (1.0 / env.beta) + (ia + env.beta ** (1.0 / env.alpha)) * kd ** (1.0 / env.alpha)


def defective_moment_bound(inputs: MomentBoundInputs) -> float:
    """e^{2d/beta} ||f||_beta + (2e/(alpha-1)) ((KD)^{1/alpha} v (KD)^{1/beta}) G(p),
    valid for p >= beta."""
    env = inputs.env
    if inputs.p < env.beta:
        raise InputError(f"requires p >= beta, got p={inputs.p} beta={env.beta}")
    kd = env.K * env.D
    lead = math.exp(2.0 * env.d / env.beta) * inputs.lower_moment
    grad = (2.0 * _E / (env.alpha - 1.0)) * max(kd ** (1.0 / env.alpha), kd ** (1.0 / env.beta))
    return lead + grad * inputs.grad_moment


def defective_moment_bound_q(inputs: MomentBoundInputs, q: float) -> float:
    """Variant of defective_moment_bound anchored at ||f||_q for 0 < q < beta < p.

    The prefactor 2^{(p-q)beta/((p-beta)q)} e^{2d(p-q)/((p-beta)q)} blows up as
    p -> beta+ or q -> 0+, by design.
    """
    env = inputs.env
    p = inputs.p
    if not (0.0 < q < env.beta < p):
        raise InputError(f"requires 0 < q < beta < p, got q={q} beta={env.beta} p={p}")
    expo = (p - q) / ((p - env.beta) * q)
    pref = 2.0 ** (expo * env.beta) * math.exp(2.0 * env.d * expo)
    kd = env.K * env.D
    grad = (2.0 * _E / (env.alpha - 1.0)) * max(kd ** (1.0 / env.alpha), kd ** (1.0 / env.beta))
    return pref * inputs.lower_moment + grad * inputs.grad_moment


def alpha1_moment_bound(norm_beta: float, grad_moment: float,
                        env: GrowthEnvelope, p: float) -> float:
    """Moment bound for the linear-growth edge of the envelope family:
    e^{2d/beta} ||f||_beta + 6 log(p) (D v (KD)^{1/beta}) G(p). The alpha
    field of env is not used here."""
    _check_nonneg(norm_beta=norm_beta, grad_moment=grad_moment)
    if p < env.beta:
        raise InputError(f"requires p >= beta, got p={p} beta={env.beta}")
    lead = math.exp(2.0 * env.d / env.beta) * norm_beta
    return lead + 6.0 * math.log(p) * max(env.D, (env.K * env.D) ** (1.0 / env.beta)) * grad_moment


def centered_moment_bound(grad_moment: float, env: GrowthEnvelope, p: float,
                          C: float = 1.0) -> float:
    """||f - E f||_p <= C L(K,D,alpha,beta) G(p) for p >= beta."""
    _check_nonneg(grad_moment=grad_moment)
    if p < env.beta:
        raise InputError(f"requires p >= beta, got p={p} beta={env.beta}")
    if not C > 0:
        raise InputError(f"C must be > 0, got {C}")
    return C * l_constant(env) * grad_moment


def poincare_beta_bound(grad_moment_beta: float, env: GrowthEnvelope,
                        C: float = 1.0) -> float:
    """beta-moment Poincare form C ((KD)^{1/beta} + (KD beta)^{1/alpha}) G(beta)."""
    _check_nonneg(grad_moment_beta=grad_moment_beta)
    if not C > 0:
        raise InputError(f"C must be > 0, got {C}")
    kd = env.K * env.D
    return C * (kd ** (1.0 / env.beta) + (kd * env.beta) ** (1.0 / env.alpha)) * grad_moment_beta


def moment_interpolation_factor(A: float, p: float, q: float, r: float) -> float:
    """Constant A^{(p-r)q/((p-q)r)} transferring a two-moment comparison
    ||X||_p <= A ||X||_q down to the r-th moment, 0 < r < q < p."""
    if not (0.0 < r < q < p):
        raise InputError(f"requires 0 < r < q < p, got r={r} q={q} p={p}")
    if not A >= 1.0:
        raise InputError(f"requires A >= 1, got {A}")
    return A ** (((p - r) * q) / ((p - q) * r))


def gk_moment(x, phi: PhiSpec, p: float) -> float:
    """Two-sided moment surrogate |x|_{Psi_p} for sums of independent
    symmetric variables with tail exp(-phi): the gauge of the separable spec
    built from phi."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InputError("x must be a non-empty 1-D vector")
    if not p >= 2.0:
        raise InputError(f"requires p >= 2, got {p}")
    spec = SeparableFromPhi(dim=x.size, phi=phi)
    return psi_p_norm(spec, p, x)


def quadratic_chaos_moment(norms: PartitionNorms, p: float) -> float:
    """Structural moment sum for a quadratic form in variables with
    exp(-t^r)-type tails; constant-free."""
    if not p >= 2.0:
        raise InputError(f"requires p >= 2, got {p}")
    rs = norms.r / (norms.r - 1.0)
    return (math.sqrt(p) * norms.hs
            + p * norms.op
            + p ** (1.0 / rs) * norms.entry_lr
            + p ** (0.5 + 1.0 / rs) * norms.mixed_2_rstar
            + p ** (2.0 / rs) * norms.rstar_rstar)


# ---------------------------------------------------------------------------
# tail profiles

def chebyshev_level(grad_moment_fn: Callable, env: GrowthEnvelope, C: float,
                    t: float) -> float:
    """Exceedance level e^{-p*} where p* is the largest p >= beta with
    C L G(p) <= t; returns 1 when even p = beta fails, and floors at
    exp(-P_MAX) for bounded G."""
    if not t > 0:
        raise InputError(f"requires t > 0, got {t}")
    if not C > 0:
        raise InputError(f"C must be > 0, got {C}")
    L = C * l_constant(env)
    if L * grad_moment_fn(env.beta) > t:
        return 1.0
    if L * grad_moment_fn(P_MAX) <= t:
        return math.exp(-P_MAX)
    lo, hi = env.beta, P_MAX
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if L * grad_moment_fn(mid) <= t:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return math.exp(-lo)


def lipschitz_profile(a: float, b: float, env: GrowthEnvelope, spec: PsiSpec,
                      C: float, t: float) -> float:
    """min(1, exp(beta - a omega*(t / (C L b)))) for an a-concentrated,
    b-Lipschitz observable."""
    if not (a > 0 and b > 0 and C > 0):
        raise InputError(f"requires a, b, C > 0, got a={a} b={b} C={C}")
    if t < 0:
        raise InputError(f"requires t >= 0, got {t}")
    if t == 0.0:
        return 1.0
    s = t / (C * l_constant(env) * b)
    arg = env.beta - a * omega_star(spec, s)
    if arg >= _EXP_CAP:
        return 1.0
    return min(1.0, math.exp(arg))


def enlargement_rate(env: GrowthEnvelope, C_impl: float = 1.0) -> float:
    """Computable lower bound rho <= omega*(1/L) used by enlargement_bound:
    rho = (K^{-1/(alpha-1)} L^{-alpha/(alpha-1)}) ^ (wedge) L^{-1}."""
    if not C_impl > 0:
        raise InputError(f"C_impl must be > 0, got {C_impl}")
    L = C_impl * l_constant(env)
    e1 = 1.0 / (env.alpha - 1.0)
    return min(env.K ** (-e1) * L ** (-env.alpha * e1), 1.0 / L)


def enlargement_bound(u: float, env: GrowthEnvelope, C_impl: float = 1.0) -> float:
    """Lower bound max(0, 1 - 2 exp(beta - u rho)) on the measure of the
    conjugate-ball enlargement of a median-mass set."""
    if not u > 0:
        raise InputError(f"requires u > 0, got {u}")
    rho = enlargement_rate(env, C_impl)
    arg = env.beta - u * rho
    if arg >= _EXP_CAP:
        return 0.0
    return max(0.0, 1.0 - 2.0 * math.exp(arg))


def two_level_tail(a: float, b: float, r: float, c: float, t: float) -> float:
    """min(1, 2 exp(-c min(t^2/a^2, (t/b)^{r*}))) with r* = r/(r-1), r >= 2."""
    if not (a > 0 and b > 0):
        raise InputError(f"requires a, b > 0, got a={a} b={b}")
    if not r >= 2.0:
        raise InputError(f"requires r >= 2, got {r}")
    _check_nonneg(c=c, t=t)
    rs = r / (r - 1.0)
    expo = c * min((t / a) ** 2, (t / b) ** rs)
    if expo >= _EXP_CAP:
        return 2.0 * math.exp(-_EXP_CAP)
    return min(1.0, 2.0 * math.exp(-expo))


def hanson_wright_tail(A_q: float, B: float, q: float, c: float, t: float) -> float:
    """Quadratic-form tail min(1, 2 exp(-c min((t/A_q)^{q*}, (t/B)^{q*/2})))
    for entry/operator surrogates A_q, B and q in (1, 2]."""
    if not (A_q > 0 and B > 0):
        raise InputError(f"requires A_q, B > 0, got A_q={A_q} B={B}")
    if not (1.0 < q <= 2.0):
        raise InputError(f"requires q in (1, 2], got {q}")
    _check_nonneg(c=c, t=t)
    qs = q / (q - 1.0)
    expo = c * min((t / A_q) ** qs, (t / B) ** (qs / 2.0))
    if expo >= _EXP_CAP:
        return 2.0 * math.exp(-_EXP_CAP)
    return min(1.0, 2.0 * math.exp(-expo))


def bcg_tail(L: float, hess_hs_m2: float, mean_grad: float, hess_op_sup: float,
             t: float) -> float:
    """Bounded-second-derivative tail min(1, e^2 exp(-min(t^2/a^2, t/b))) with
    a^2 = 4e^2 (sqrt(2) L^2 hess_hs_m2 + L mean_grad)^2 and b = 2e L^2 hess_op_sup."""
    if not L > 0:
        raise InputError(f"requires L > 0, got {L}")
    _check_nonneg(hess_hs_m2=hess_hs_m2, mean_grad=mean_grad,
                  hess_op_sup=hess_op_sup, t=t)
    if t == 0.0:
        return 1.0
    a2 = 4.0 * _E * _E * (math.sqrt(2.0) * L * L * hess_hs_m2 + L * mean_grad) ** 2
    b = 2.0 * _E * L * L * hess_op_sup
    terms = []
    if a2 > 0.0:
        terms.append(t * t / a2)
    if b > 0.0:
        terms.append(t / b)
    expo = min(terms) if terms else math.inf
    if expo >= _EXP_CAP:
        return 0.0
    return min(1.0, _E * _E * math.exp(-expo))


def bcg_first_line(L: float, p: float, mean_grad_norm: float,
                   hess_op_mp: float) -> float:
    """L sqrt(p) E|grad f|_2 + L^2 p || |D^2 f|_op ||_p."""
    if not L > 0:
        raise InputError(f"requires L > 0, got {L}")
    if not p >= 2.0:
        raise InputError(f"requires p >= 2, got {p}")
    _check_nonneg(mean_grad_norm=mean_grad_norm, hess_op_mp=hess_op_mp)
    return L * math.sqrt(p) * mean_grad_norm + L * L * p * hess_op_mp


def bcg_derivative_chain(L: float, higher: Sequence[Tuple[int, float]],
                         dk_norm: float) -> float:
    """Surrogate for E|grad f|_2 from higher derivatives:
    sum_{m=1}^{k-1} (sqrt(2) L)^{m-1} |E D^m f|_2 + (sqrt(2) L)^{k-1} || |D^k f|_2 ||_2
    with k = len(higher) + 1."""
    if not L > 0:
        raise InputError(f"requires L > 0, got {L}")
    _check_nonneg(dk_norm=dk_norm)
    k = len(higher) + 1
    if k < 2:
        raise InputError("requires at least the m=1 mean-derivative entry")
    total = (math.sqrt(2.0) * L) ** (k - 1) * dk_norm
    seen = set()
    for m, g in higher:
        if not (isinstance(m, int) and 1 <= m <= k - 1) or m in seen:
            raise InputError(f"derivative orders must be distinct in 1..{k - 1}")
        seen.add(m)
        _check_nonneg(**{f"mean_derivative_{m}": g})
        total += (math.sqrt(2.0) * L) ** (m - 1) * g
    return total


def bcg_moment_bound(L: float, p: float, higher: Sequence[Tuple[int, float]],
                     dk_norm: float, hess_op_mp: float) -> float:
    """Centered moment bound via the derivative chain:
    sqrt(p) (2^{(k-1)/2} L^k dk + sum_m 2^{(m-1)/2} L^m g_m) + L^2 p hess_op_mp.

    Coincides with bcg_first_line(L, p, bcg_derivative_chain(...), hess_op_mp).
    """
    chain = bcg_derivative_chain(L, higher, dk_norm)
    return bcg_first_line(L, p, chain, hess_op_mp)


# ---------------------------------------------------------------------------
# profile factories (CSV-facing)

def lipschitz_tail_profile(a: float, b: float, env: GrowthEnvelope,
                           spec: PsiSpec, C: float = 1.0) -> TailProfile:
    return TailProfile("lipschitz", {"a": a, "b": b, "C": C},
                       lambda t: lipschitz_profile(a, b, env, spec, C, t))


def two_level_tail_profile(a: float, b: float, r: float,
                           c: float = 1.0) -> TailProfile:
    return TailProfile("two_level", {"a": a, "b": b, "r": r, "c": c},
                       lambda t: two_level_tail(a, b, r, c, t))


def hanson_wright_tail_profile(A_q: float, B: float, q: float,
                               c: float = 1.0) -> TailProfile:
    return TailProfile("hanson_wright", {"A_q": A_q, "B": B, "q": q, "c": c},
                       lambda t: hanson_wright_tail(A_q, B, q, c, t))


def bcg_tail_profile(L: float, hess_hs_m2: float, mean_grad: float,
                     hess_op_sup: float) -> TailProfile:
    return TailProfile("bcg",
                       {"L": L, "hess_hs_m2": hess_hs_m2,
                        "mean_grad": mean_grad, "hess_op_sup": hess_op_sup},
                       lambda t: bcg_tail(L, hess_hs_m2, mean_grad, hess_op_sup, t))


def chebyshev_tail_profile(grad_moment_fn: Callable, env: GrowthEnvelope,
                           C: float = 1.0) -> TailProfile:
    return TailProfile("chebyshev", {"C": C},
                       lambda t: chebyshev_level(grad_moment_fn, env, C, t))


def enlargement_profile(env: GrowthEnvelope, C_impl: float = 1.0) -> TailProfile:
    # here the "tail" variable is the enlargement budget u, and larger is better
    return TailProfile("enlargement",
                       {"C_impl": C_impl, "rho": enlargement_rate(env, C_impl)},
                       lambda u: enlargement_bound(u, env, C_impl))

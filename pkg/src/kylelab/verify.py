"""Statistical and analytic verification of the closed-form equilibria.

Monte Carlo checks compare a sample mean with a closed-form target and pass when
|mean - target| <= k * SE (k = 3).  Sums over paths use math.fsum, so a report is
reproducible bit for bit from (seed, config) whatever the thread count.

The exponential-utility checks sample the demand from a tempered proposal (the
same OU family with half the mean reversion) and reweight with the exact
likelihood ratio of the simulated skeleton: with the equilibrium law itself
e^{-rho G} has infinite variance once lambda rho sigma^2 > 1.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .coefficients import RationalCoefficients, alpha_coeffs, market_coefficients, tempered
from .equilibrium import build_quote
from .errors import DomainError, HeavyTail
from .metrics import efficiency_Sigma, liquidity_utility, profits, reversal_M
from .model import Branch, ModelKind, ModelParams, validate
from .simulate import (
    EulerOracle,
    SimConfig,
    draw_normals,
    euler_oracle_path,
    simulate_from,
    simulate_market_gains,
    simulate_wealth,
)

K_SIGMA = 3.0
FD_TOL = 1e-6
ABS_TOL = 1e-10
REL_TOL = 1e-8
CLAMP = 700.0
CLAMP_RATE = 1e-5
DEFAULT_TAU = 0.5
REVERSAL_C = 5.0
EULER_C = 5.0

# stream tags: each family of checks gets its own random numbers
STREAM_WEALTH, STREAM_MARKET, STREAM_MARTINGALE, STREAM_REVERSAL, STREAM_EFFICIENCY, STREAM_EULER, STREAM_KS = range(7)


def _mean_var(x):
    x = np.asarray(x, dtype=float)
    n = x.size
    mean = math.fsum(x) / n
    dev = x - mean
    var = math.fsum(dev * dev) / (n - 1) if n > 1 else 0.0
    return mean, var


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    target: float
    k: float = K_SIGMA
    floor: float = 0.0

    @classmethod
    def from_samples(cls, samples, target: float, k: float = K_SIGMA, floor: float = 0.0) -> "McEstimate":
        mean, var = _mean_var(samples)
        n = int(np.size(samples))
        return cls(mean, math.sqrt(var / n), n, float(target), k, floor)

    @property
    def z_score(self) -> float:
        diff = self.mean - self.target
        if self.std_error > 0:
            return diff / self.std_error
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)

    @property
    def tolerance(self) -> float:
        return max(self.k * self.std_error, self.floor)

    @property
    def passed(self) -> bool:
        return abs(self.mean - self.target) <= self.tolerance

    def shifted(self, n_se: float) -> "McEstimate":
        """Same estimate against a target moved by n_se standard errors (negative control)."""
        return McEstimate(self.mean, self.std_error, self.n, self.target + n_se * self.std_error, self.k, self.floor)

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "se": self.std_error,
            "n": self.n,
            "target": self.target,
            "z": self.z_score,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class CheckReport:
    name: str
    kind: str | None = None
    branch: int | None = None
    estimate: McEstimate | None = None
    residual: float | None = None
    tolerance: float | None = None
    config: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        ok = True
        if self.estimate is not None:
            ok = ok and self.estimate.passed
        if self.residual is not None:
            ok = ok and bool(self.residual <= self.tolerance)
        return ok

    def record(self) -> dict:
        """Flat key-value record for the JSON report."""
        rec = {"name": self.name, "kind": self.kind, "branch": self.branch}
        if self.estimate is not None:
            rec.update(self.estimate.as_dict())
        else:
            rec.update({"target": None, "mean": None, "se": None, "z": None})
        rec["residual"] = self.residual
        rec["residual_tolerance"] = self.tolerance
        rec["pass"] = self.verdict
        for key, value in self.details.items():
            rec[f"detail.{key}"] = value
        if self.config is not None:
            for key, value in _flatten(self.config).items():
                rec[f"config.{key}"] = value
        return rec


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in d.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


def _norm(kind, branch):
    kind = ModelKind.parse(kind)
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    if not kind.branched:
        branch = Branch(1)
    return kind, branch


def _branch_label(kind: ModelKind, branch: Branch):
    return branch.index if kind.branched else None


# -- cached simulations ----------------------------------------------------------------


@functools.lru_cache(maxsize=16)
def wealth_sample(params: ModelParams, kind: ModelKind, branch: Branch, config: SimConfig):
    return simulate_wealth(params, kind, config.replace(stream=STREAM_WEALTH), branch)


@functools.lru_cache(maxsize=16)
def market_sample(params: ModelParams, kind: ModelKind, branch: Branch, config: SimConfig, tau: float):
    quote = build_quote(params, kind, branch)
    cs = market_coefficients(params, kind, quote, branch)
    proposal = tempered(cs, tau) if tau != 1.0 else None
    return simulate_market_gains(params, kind, config.replace(stream=STREAM_MARKET), branch, quote, cs, proposal)


@functools.lru_cache(maxsize=4)
def _reversal_normals(config: SimConfig, width: int):
    return draw_normals(config.replace(stream=STREAM_REVERSAL), width)


def clear_cache():
    wealth_sample.cache_clear()
    market_sample.cache_clear()
    _reversal_normals.cache_clear()


# -- Monte Carlo checks ------------------------------------------------------------------


def check_profit(kind, params: ModelParams, branch=1, config: SimConfig | None = None, perturb_se: float = 0.0):
    """Mean insider-view wealth of the strategic trader against the theorem's profit."""
    kind, branch = _norm(kind, branch)
    config = config or SimConfig()
    ws = wealth_sample(params, kind, branch, config)
    est = McEstimate.from_samples(ws.insider, profits(kind, params, branch))
    if perturb_se:
        est = est.shifted(perturb_se)
    alt_mean, _ = _mean_var(ws.insider_xdp)
    closure = float(np.max(np.abs(ws.insider_xdp + ws.noise + ws.liquidity)))
    return CheckReport(
        "profit", kind.value, _branch_label(kind, branch), est, config=config.fingerprint(),
        details={"xdp_form_mean": alt_mean, "closure_max": closure},
    )


def check_noise_pnl(kind, params: ModelParams, config: SimConfig | None = None, branch=1, perturb_se: float = 0.0):
    """Noise traders' mean P&L against -lambda sigma^2.

    The verdict uses Z_1 V - int P dZ - [Z, P]_1 with the exact bracket; the
    left-point sum of Z dP is reported alongside (it carries an O(log n / n) bias
    from the pinned last step).
    """
    kind, branch = _norm(kind, branch)
    config = config or SimConfig()
    ws = wealth_sample(params, kind, branch, config)
    target = -build_quote(params, kind, branch).lambda_pre * params.sigma**2
    est = McEstimate.from_samples(ws.noise_ibp, target)
    if perturb_se:
        est = est.shifted(perturb_se)
    left = McEstimate.from_samples(ws.noise, target)
    residual = tolerance = None
    details = {"left_point_mean": left.mean, "left_point_z": left.z_score}
    if kind.informed and kind is not ModelKind.KYLE:
        other = ModelKind.MM_INSIDER if kind is ModelKind.CA_INSIDER else ModelKind.CA_INSIDER
        other_target = -build_quote(params, other, branch).lambda_pre * params.sigma**2
        residual, tolerance = abs(other_target - target), 0.0
        details["other_insider_target"] = other_target
    return CheckReport(
        "noise_pnl", kind.value, _branch_label(kind, branch), est, residual, tolerance,
        config.fingerprint(), details,
    )


def _gauss_logpdf(y, mean, var):
    return -0.5 * (math.log(2.0 * math.pi * var) + (y - mean) ** 2 / var)


def _exp_clamped(x):
    clipped = np.clip(x, -CLAMP, CLAMP)
    rate = float(np.count_nonzero(clipped != x)) / max(x.size, 1)
    if rate > CLAMP_RATE:
        raise HeavyTail(f"{rate:.2e} of the exponents exceeded +-{CLAMP}")
    return np.exp(clipped), rate


def check_liquidity_utility(
    kind, params: ModelParams, branch=1, config: SimConfig | None = None, tau: float = DEFAULT_TAU,
    with_raw: bool = False, perturb_se: float = 0.0,
):
    """Mean of 1 - e^{-rho G_1} against the liquidity providers' closed-form utility."""
    kind, branch = _norm(kind, branch)
    validate(params)
    config = config or SimConfig()
    target = liquidity_utility(kind, params, branch)
    if params.rho == 0:
        ws = wealth_sample(params, kind, branch, config)
        est = McEstimate.from_samples(-np.expm1(-0.0 * ws.liquidity), target)
        return CheckReport("liquidity_utility", kind.value, _branch_label(kind, branch), est, config=config.fingerprint())
    rho = params.rho

    def estimate(sample):
        x = -rho * sample.gain + sample.log_weight
        if not kind.informed:
            # integrate V ~ N(mu, gamma^2) out: G depends on V only through -Y_1 (V - mu)
            x = x + 0.5 * (rho * params.gamma * sample.Y1) ** 2
        e, rate = _exp_clamped(x)
        return McEstimate.from_samples(1.0 - e, target), rate, float(np.mean(np.exp(sample.log_weight)))

    ms = market_sample(params, kind, branch, config, tau)
    est, rate, mean_w = estimate(ms)
    if perturb_se:
        est = est.shifted(perturb_se)
    details = {"tau": tau, "clamp_rate": rate, "mean_weight": mean_w}
    if kind.informed:
        # continuous-time integration by parts: G_1 = -lambda (Y_1^2 - sigma^2) / 2 when P_1 = V
        quote = build_quote(params, kind, branch)
        cs = market_coefficients(params, kind, quote, branch)
        cq = tempered(cs, tau)
        mp, vp = cs.ou_moments(0.0, 1.0, 0.0)
        mq, vq = cq.ou_moments(0.0, 1.0, 0.0)
        y = ms.Y1
        log_r = _gauss_logpdf(y, mp, vp) - _gauss_logpdf(y, mq, vq)
        g_closed = -quote.lambda_pre * (y * y - params.sigma**2) / 2.0
        e, _ = _exp_clamped(-rho * g_closed + log_r)
        closed = McEstimate.from_samples(1.0 - e, target)
        details.update({"closed_form_G_mean": closed.mean, "closed_form_G_z": closed.z_score})
    if with_raw:
        raw, raw_rate, _ = estimate(market_sample(params, kind, branch, config, 1.0))
        details.update({"raw_mean": raw.mean, "raw_se": raw.std_error, "raw_z": raw.z_score, "raw_clamp_rate": raw_rate})
    return CheckReport(
        "liquidity_utility", kind.value, _branch_label(kind, branch), est, config=config.fingerprint(), details=details
    )


def check_martingale_M(
    params: ModelParams, lam: float, branch=2, config: SimConfig | None = None, t_list=(0.25, 0.5, 1.0),
    tau: float = DEFAULT_TAU, perturb_se: float = 0.0,
) -> list[CheckReport]:
    """E[exp(alpha0 + alpha1 Y_t + alpha2 Y_t^2)] = 1 under the market-view OU with slope lam."""
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    config = config or SimConfig()
    cs = RationalCoefficients(params.sigma, lam, params.rho, sign=branch.sign)
    proposal = tempered(cs, tau) if params.rho > 0 else cs
    ms = simulate_market_gains(
        params, ModelKind.MM_INSIDER, config.replace(stream=STREAM_MARTINGALE), branch,
        target=cs, proposal=proposal, record_times=t_list,
    )
    reports = []
    for j, k in enumerate(ms.rec_index):
        t = k / config.n_steps
        a0, a1, a2 = (float(v) for v in alpha_coeffs(t, cs))
        y = ms.Y_rec[:, j]
        if k == 0:
            x = np.full_like(y, a0)
        else:
            mp, vp = cs.ou_moments(0.0, t, 0.0)
            mq, vq = proposal.ou_moments(0.0, t, 0.0)
            x = a0 + a1 * y + a2 * y * y + _gauss_logpdf(y, mp, vp) - _gauss_logpdf(y, mq, vq)
        m, rate = _exp_clamped(x)
        est = McEstimate.from_samples(m, 1.0)
        if perturb_se:
            est = est.shifted(perturb_se)
        reports.append(
            CheckReport(
                f"martingale_M(t={t:g})", ModelKind.MM_INSIDER.value, branch.index, est,
                config=config.fingerprint(), details={"lambda": lam, "tau": tau, "clamp_rate": rate},
            )
        )
    return reports


def reversal_exact(s: float, eps: float, cs) -> float:
    """Normalised lag covariance of demand increments at finite eps, from Gaussian moments."""
    t, u = s + eps, s + 2.0 * eps
    g = cs.growth(t, u)
    v1 = cs.v2(s, t)
    v2 = cs.v2(t, u)
    return float((g - 1.0) * v1 / math.sqrt(v1 * ((g - 1.0) ** 2 * v1 + v2)) / eps)


def check_reversal(kind, params: ModelParams, config: SimConfig | None = None, s_list=(0.1, 0.5, 0.9), branch=1):
    """Empirical M(s) from lag-one covariances of conditionally centred demand increments.

    eps is the grid step.  The Monte Carlo part passes within max(3 SE, C eps |M|);
    the exact finite-eps Gaussian value must sit within C eps |M| of M(s) too.
    """
    kind, branch = _norm(kind, branch)
    config = config or SimConfig()
    quote = build_quote(params, kind, branch)
    cs = market_coefficients(params, kind, quote, branch)
    eps = config.dt
    xi = _reversal_normals(config, 3 * len(s_list))
    reports = []
    for j, s in enumerate(s_list):
        t, u = s + eps, s + 2.0 * eps
        m0, v0 = cs.ou_moments(0.0, s, 0.0)
        ys = m0 + math.sqrt(v0) * xi[:, 3 * j]
        d1 = math.sqrt(cs.v2(s, t)) * xi[:, 3 * j + 1]  # Y_t - E_s[Y_t]
        d2 = (cs.growth(t, u) - 1.0) * d1 + math.sqrt(cs.v2(t, u)) * xi[:, 3 * j + 2]
        del ys  # the centred increments do not depend on Y_s: the conditional law is Gaussian
        r = math.fsum(d1 * d2) / math.sqrt(math.fsum(d1 * d1) * math.fsum(d2 * d2))
        n = d1.size
        target = float(reversal_M(s, kind, params))
        floor = REVERSAL_C * eps * abs(target)
        est = McEstimate(r / eps, (1.0 - r * r) / math.sqrt(n) / eps, n, target, K_SIGMA, floor)
        exact = reversal_exact(s, eps, cs)
        reports.append(
            CheckReport(
                f"reversal(s={s:g})", kind.value, _branch_label(kind, branch), est,
                residual=abs(exact - target), tolerance=floor + 1e-12, config=config.fingerprint(),
                details={"eps": eps, "exact_finite_eps": exact},
            )
        )
    return reports


def check_efficiency(
    kind, params: ModelParams, config: SimConfig | None = None, t_list=(0.0, 0.25, 0.5, 0.75, 1.0),
    pilot_t: float = 0.5, branch=1,
):
    """Var(lambda Y_1 | Y_t) from Gaussian conditioning against Sigma(t), plus one MC spot check."""
    kind, branch = _norm(kind, branch)
    if not kind.informed or (kind is ModelKind.KYLE and params.rho != 0):
        raise DomainError("kind", "efficiency is defined for the insider equilibria")
    config = config or SimConfig()
    quote = build_quote(params, kind, branch)
    cs = market_coefficients(params, kind, quote, branch)
    lam = quote.lambda_pre
    worst = 0.0
    values = {}
    for t in t_list:
        cond = lam * lam * float(cs.v2(t, 1.0))
        sig = float(efficiency_Sigma(t, params))
        worst = max(worst, abs(cond - sig) / max(abs(sig), 1e-300) if sig else abs(cond))
        values[f"Sigma({t:g})"] = sig
    mean_t, _ = cs.ou_moments(0.0, pilot_t, 0.0)
    y1 = simulate_from(params, kind, pilot_t, float(mean_t), config.replace(stream=STREAM_EFFICIENCY), branch, quote)
    m1, _ = cs.ou_moments(pilot_t, 1.0, float(mean_t))
    dev = lam * (y1 - m1)
    est = McEstimate.from_samples(dev * dev, float(efficiency_Sigma(pilot_t, params)))
    return CheckReport(
        "efficiency", kind.value, _branch_label(kind, branch), est, residual=worst, tolerance=REL_TOL,
        config=config.fingerprint(), details={"pilot_t": pilot_t, **values},
    )


# -- analytic checks ----------------------------------------------------------------------


def ode_residuals(params: ModelParams, lam: float, branch=2, alpha2_scale: float = 1.0, n_points: int = 200, h=1e-5):
    """Max |residual| of the three coefficient ODEs on interior points (central differences)."""
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    cs = RationalCoefficients(params.sigma, lam, params.rho, sign=branch.sign)
    s2 = params.sigma**2
    t = np.linspace(0.0, 1.0, n_points + 2)[1:-1]

    def coeffs(tt):
        a0, a1, a2 = alpha_coeffs(tt, cs)
        return np.asarray(a0) + 0 * tt, np.asarray(a1) + 0 * tt, alpha2_scale * (np.asarray(a2) + 0 * tt)

    a0, a1, a2 = coeffs(t)
    up, dn = coeffs(t + h), coeffs(t - h)
    d0, d1, d2 = ((p - m) / (2.0 * h) for p, m in zip(up, dn))
    a, b = cs.a(t), cs.b(t)
    r1 = 2.0 * a2 * a + 2.0 * a2 * a2 + d2 / s2
    r2 = d1 / s2 + a1 * a + 2.0 * a2 * a1 + 2.0 * a2 * b
    r3 = d0 / s2 + a1 * b + a2 + a1 * a1 / 2.0
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2))), float(np.max(np.abs(r3)))


def check_coefficient_odes(params: ModelParams, lam: float, branch=2, alpha2_scale: float = 1.0):
    r = ode_residuals(params, lam, branch, alpha2_scale)
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    return CheckReport(
        "coefficient_odes", ModelKind.MM_INSIDER.value, branch.index, residual=max(r), tolerance=FD_TOL,
        details={"ode1": r[0], "ode2": r[1], "ode3": r[2], "lambda": lam},
    )


def check_alpha_identities(params: ModelParams, lam: float, branch=2):
    """alpha2 = -a/2, alpha1(1) = 0 and the integral form of alpha1 against its square-root form."""
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    cs = RationalCoefficients(params.sigma, lam, params.rho, sign=branch.sign)
    t = np.linspace(0.0, 1.0, 101)
    _, a1, a2 = alpha_coeffs(t, cs)
    ident = float(np.max(np.abs(a2 + cs.a(t) / 2.0))) if params.rho > 0 else float(np.max(np.abs(a2)))
    end = abs(float(alpha_coeffs(1.0, cs)[1]))
    ts = np.linspace(0.0, 0.95, 12)
    quad = float(np.max(np.abs(alpha_coeffs(ts, cs, method="integral")[1] - alpha_coeffs(ts, cs)[1])))
    return CheckReport(
        "alpha_identities", ModelKind.MM_INSIDER.value, branch.index,
        residual=max(ident / 1e-12, end / 1e-12, quad / 1e-8), tolerance=1.0,
        details={"alpha2_plus_a_half": ident, "alpha1_at_1": end, "alpha1_integral_vs_closed": quad},
    )


def check_bridge_terminal(kind, params: ModelParams, config: SimConfig | None = None, branch=1):
    """Exact scheme: the price before the auction equals V on every path."""
    kind, branch = _norm(kind, branch)
    if not kind.informed:
        raise DomainError("kind", "terminal pinning applies to the insider kinds")
    config = config or SimConfig()
    ws = wealth_sample(params, kind, branch, config)
    err = float(np.max(np.abs(ws.P_pre - ws.V)))
    return CheckReport(
        "bridge_terminal_exact", kind.value, _branch_label(kind, branch), residual=err, tolerance=ABS_TOL,
        config=config.fingerprint(),
    )


def euler_terminal_error(kind, params: ModelParams, eps: float, n_paths: int, seed: int, steps_per_eps: int = 4, branch=1):
    kind, branch = _norm(kind, branch)
    n_steps = int(math.ceil(steps_per_eps / eps))
    config = SimConfig(n_paths=n_paths, n_steps=n_steps, seed=seed, scheme=EulerOracle(eps), stream=STREAM_EULER)
    path = euler_oracle_path(params, None, kind, config, branch, record_times=[1.0])
    return McEstimate.from_samples(np.abs(path.P_pre - path.V), 0.0), config


def check_euler_terminal(kind, params: ModelParams, eps: float = 1e-4, n_paths: int = 400, seed: int = 0, branch=1):
    """E|P_{1-} - V| under the Euler oracle below C lambda sigma sqrt(eps)."""
    kind, branch = _norm(kind, branch)
    est, config = euler_terminal_error(kind, params, eps, n_paths, seed, branch=branch)
    lam = build_quote(params, kind, branch).lambda_pre
    bound = EULER_C * lam * params.sigma * math.sqrt(eps)
    return CheckReport(
        f"bridge_terminal_euler(eps={eps:g})", kind.value, _branch_label(kind, branch),
        residual=est.mean, tolerance=bound, config=config.fingerprint(),
        details={"mean_abs_error": est.mean, "se": est.std_error},
    )


def check_euler_rate(
    kind, params: ModelParams, eps_list=(1e-3, 1e-4, 1e-5), n_paths: int = 400, seed: int = 0, branch=1
):
    """Slope of log E|P_{1-} - V| against log eps; 0.5 +- 0.1 expected."""
    kind, branch = _norm(kind, branch)
    errs = [euler_terminal_error(kind, params, e, n_paths, seed, branch=branch)[0].mean for e in eps_list]
    slope = float(np.polyfit(np.log(eps_list), np.log(errs), 1)[0])
    return CheckReport(
        "euler_rate", kind.value, _branch_label(kind, branch), residual=abs(slope - 0.5), tolerance=0.1,
        details={"slope": slope, **{f"err(eps={e:g})": v for e, v in zip(eps_list, errs)}},
    )


def check_euler_ks(
    kind, params: ModelParams, n_paths: int = 10_000, n_steps: int = 400, seed: int = 0, t: float = 0.5,
    alpha: float = 0.01, branch=1,
):
    """Two-sample KS test of Y_t between the exact scheme and the Euler oracle."""
    from .simulate import simulate_insider_view

    kind, branch = _norm(kind, branch)
    exact_cfg = SimConfig(n_paths=n_paths, n_steps=n_steps, seed=seed, stream=STREAM_KS)
    k = int(round(t * n_steps))
    exact = simulate_insider_view(params, None, kind, exact_cfg, branch).Y[:, k]
    euler_cfg = exact_cfg.replace(scheme=EulerOracle(1.0 / n_steps), stream=STREAM_EULER)
    euler = euler_oracle_path(params, None, kind, euler_cfg, branch, record_times=[t]).Y[:, 0]
    res = stats.ks_2samp(exact, euler)
    return CheckReport(
        f"euler_ks(t={t:g})", kind.value, _branch_label(kind, branch), residual=alpha, tolerance=float(res.pvalue),
        details={"ks_statistic": float(res.statistic), "p_value": float(res.pvalue)},
    )


# -- suites ---------------------------------------------------------------------------------

SUITES = {
    "fast": {"n_paths": 20_000, "n_steps": 500, "euler_paths": 200, "euler_eps": (1e-2, 1e-3, 1e-4), "ks_paths": 4000},
    "full": {"n_paths": 200_000, "n_steps": 2000, "euler_paths": 400, "euler_eps": (1e-3, 1e-4, 1e-5), "ks_paths": 10_000},
}

INSIDER_KINDS = (ModelKind.CA_INSIDER, ModelKind.MM_INSIDER)
ALL_CASES = (
    (ModelKind.KYLE, 1),
    (ModelKind.CA_INSIDER, 1),
    (ModelKind.MM_INSIDER, 1),
    (ModelKind.MM_INSIDER, 2),
    (ModelKind.CA_STRATEGIC, 1),
    (ModelKind.MM_STRATEGIC, 1),
    (ModelKind.MM_STRATEGIC, 2),
)


def run_suite(suite: str = "fast", seed: int = 7, params: ModelParams | None = None, perturb_se: float = 0.0):
    """Every check of the suite at the given parameters; returns the list of reports."""
    if suite not in SUITES:
        raise DomainError("suite", f"unknown suite {suite!r}")
    params = validate(params or ModelParams())
    spec = SUITES[suite]
    config = SimConfig(n_paths=spec["n_paths"], n_steps=spec["n_steps"], seed=seed)
    reports: list[CheckReport] = []
    for kind, br in ALL_CASES:
        reports.append(check_profit(kind, params, br, config, perturb_se))
        reports.append(check_noise_pnl(kind, params, config, br, perturb_se))
        if kind is not ModelKind.KYLE:
            reports.append(check_liquidity_utility(kind, params, br, config, perturb_se=perturb_se))
        if kind.informed:
            reports.append(check_bridge_terminal(kind, params, config, br))
    for kind, br in ALL_CASES[1:]:
        reports.extend(check_reversal(kind, params, config, branch=br))
    for kind in INSIDER_KINDS:
        reports.append(check_efficiency(kind, params, config))
    lam = 1.0
    for br in (1, 2):
        reports.extend(check_martingale_M(params, lam, br, config, perturb_se=perturb_se))
        reports.append(check_coefficient_odes(params, lam, br))
        reports.append(check_alpha_identities(params, lam, br))
    reports.append(check_euler_terminal(ModelKind.CA_INSIDER, params, spec["euler_eps"][1], spec["euler_paths"], seed))
    reports.append(check_euler_rate(ModelKind.CA_INSIDER, params, spec["euler_eps"], spec["euler_paths"], seed))
    reports.append(check_euler_ks(ModelKind.CA_INSIDER, params, spec["ks_paths"], seed=seed))
    return reports


def report_json(reports: list[CheckReport], meta: dict | None = None) -> str:
    body = {"meta": meta or {}, "checks": [r.record() for r in reports], "all_pass": all(r.verdict for r in reports)}
    return json.dumps(body, indent=2, sort_keys=False, allow_nan=True) + "\n"

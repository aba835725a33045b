"""Path simulation for all model kinds, wealth accounting and an Euler oracle.

Every path owns a counter-based Philox stream keyed by (seed, stream, path index),
so a path is the same no matter which block or thread produced it.  Paths are
generated in blocks; within a block the time recursion is vectorised across paths.

Exact scheme
    Insider kinds: the insider-view demand solves dY = sigma dB + (h(t) - Y)/(1 - t) dt
    and is pinned at the target (V - phi) / lambda.  Each step draws (Delta Z, Y_{k+1})
    jointly from their exact Gaussian law given (Y_k, target), so the last grid value
    hits the target exactly.
    Uninformed kinds: the demand is the OU process of the market view, stepped with its
    exact transition jointly with the noise increment.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .coefficients import CoefficientSet, market_coefficients
from .equilibrium import EquilibriumQuote, build_quote
from .errors import DomainError, SingularTime
from .metrics import optimal_bulk_trade
from .model import Branch, ModelKind, ModelParams, validate

STREAM_SHIFT = 40
DEFAULT_BLOCK = 512


class View(enum.Enum):
    INSIDER = "insider"
    MARKET = "market"

    @classmethod
    def parse(cls, value) -> "View":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


@dataclass(frozen=True)
class ExactTransition:
    name: str = "exact"


@dataclass(frozen=True)
class EulerOracle:
    eps_terminal: float = 1e-3
    name: str = "euler"

    def __post_init__(self):
        if not 0 < self.eps_terminal < 0.1:
            raise DomainError("eps_terminal", f"eps_terminal must lie in (0, 0.1), got {self.eps_terminal}")


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 200_000
    n_steps: int = 2000
    seed: int = 0
    scheme: ExactTransition | EulerOracle = field(default_factory=ExactTransition)
    view: View = View.INSIDER
    stream: int = 0
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self):
        if int(self.n_paths) <= 0:
            raise DomainError("n_paths", "n_paths must be positive")
        if int(self.n_steps) <= 1:
            raise DomainError("n_steps", "n_steps must be > 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed", "seed must be a 64-bit unsigned integer")
        if not 0 <= int(self.stream) < 2**24:
            raise DomainError("stream", "stream tag must fit in 24 bits")
        if int(self.n_paths) >= 2**STREAM_SHIFT:
            raise DomainError("n_paths", "too many paths for the stream layout")
        if int(self.block_size) <= 0:
            raise DomainError("block_size", "block_size must be positive")
        object.__setattr__(self, "view", View.parse(self.view))

    @property
    def dt(self) -> float:
        return 1.0 / self.n_steps

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) / self.n_steps

    def replace(self, **changes) -> "SimConfig":
        values = {
            "n_paths": self.n_paths,
            "n_steps": self.n_steps,
            "seed": self.seed,
            "scheme": self.scheme,
            "view": self.view,
            "stream": self.stream,
            "block_size": self.block_size,
        }
        values.update(changes)
        return SimConfig(**values)

    def fingerprint(self) -> dict:
        scheme = {"name": self.scheme.name}
        if isinstance(self.scheme, EulerOracle):
            scheme["eps_terminal"] = self.scheme.eps_terminal
        return {
            "n_paths": int(self.n_paths),
            "n_steps": int(self.n_steps),
            "seed": int(self.seed),
            "scheme": scheme,
            "view": self.view.value,
            "stream": int(self.stream),
            "block_size": int(self.block_size),
        }


@dataclass
class PathBundle:
    """A batch of discretised realisations; path arrays are (n_paths, n_times).

    Z and X are None for market-view paths of the insider kinds, where only the
    total demand is observed.
    """

    grid: np.ndarray
    V: np.ndarray
    Y: np.ndarray
    P: np.ndarray
    dY1: np.ndarray
    P1: np.ndarray
    Z: np.ndarray | None = None
    X: np.ndarray | None = None
    kind: ModelKind | None = None
    quote: EquilibriumQuote | None = None

    @property
    def n_paths(self) -> int:
        return self.Y.shape[0]

    @property
    def P_pre(self) -> np.ndarray:
        return self.P[:, -1]


# -- random numbers -------------------------------------------------------------------


def path_generator(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent Philox stream for one path."""
    key = np.array([int(seed), (int(stream) << STREAM_SHIFT) | int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _block_normals(config: SimConfig, start: int, stop: int, width: int) -> np.ndarray:
    out = np.empty((stop - start, width))
    for row, index in enumerate(range(start, stop)):
        path_generator(config.seed, index, config.stream).standard_normal(out=out[row])
    return out


def n_threads() -> int:
    raw = os.environ.get("KYLELAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def map_blocks(fn, config: SimConfig) -> list:
    """Apply fn(start, stop) over path blocks; results come back in block order."""
    bounds = [
        (s, min(s + config.block_size, config.n_paths)) for s in range(0, config.n_paths, config.block_size)
    ]
    workers = min(n_threads(), len(bounds))
    if workers <= 1:
        return [fn(s, e) for s, e in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def draw_fundamental(params: ModelParams, rng: np.random.Generator, size=None):
    """V ~ Normal(mu, gamma^2)."""
    return params.mu + params.gamma * rng.standard_normal(size)


# -- terminal auction -----------------------------------------------------------------


def terminal_price(P_pre, dY1, quote: EquilibriumQuote):
    return P_pre + quote.c1 * P_pre + quote.c0 + quote.lambda_final * dY1


# -- step plans -----------------------------------------------------------------------


@dataclass
class _Plan:
    """Y_{k+1} = g Y_k + w target + c + cz dZ_k + r xi_k for k = 0..n-1."""

    g: np.ndarray
    w: np.ndarray
    c: np.ndarray
    cz: np.ndarray
    r: np.ndarray


def _insider_plan(cs: CoefficientSet, n_steps: int) -> _Plan:
    s2 = cs.sigma**2
    t = np.arange(n_steps - 1) / n_steps
    tn = np.arange(1, n_steps) / n_steps
    dt = 1.0 / n_steps
    g1 = cs.growth(t, tn)
    sh1 = cs.shift(t, tn)
    v1 = cs.v2(t, tn)
    e = cs.growth(tn, 1.0)
    c2 = cs.shift(tn, 1.0)
    v2 = cs.v2(tn, 1.0)
    total = e * e * v1 + v2
    w = e * v1 / total
    var = v1 * v2 / total
    # covariance of the bridge innovation with sigma * dB: the noise enters through
    # the kernel (1 - t') / (1 - r) of the pinned dynamics
    cov = s2 * (1.0 - tn) * (-np.log1p(-dt / (1.0 - t)))
    cz = cov / (s2 * dt)
    r = np.sqrt(np.maximum(var - cov * cz, 0.0))
    # last step lands on the target
    pad = lambda arr, value: np.append(arr, value)
    return _Plan(
        g=pad((1.0 - w * e) * g1, 0.0),
        w=pad(w, 1.0),
        c=pad((1.0 - w * e) * sh1 - w * c2, 0.0),
        cz=pad(cz, 0.0),
        r=pad(r, 0.0),
    )


def _ou_plan(cs: CoefficientSet, n_steps: int, with_noise: bool = True) -> _Plan:
    t = np.arange(n_steps) / n_steps
    tn = np.arange(1, n_steps + 1) / n_steps
    dt = 1.0 / n_steps
    var = cs.v2(t, tn)
    zeros = np.zeros(n_steps)
    if with_noise:
        cov = cs.noise_cov(t, tn)
        cz = cov / (cs.sigma**2 * dt)
        r = np.sqrt(np.maximum(var - cov * cz, 0.0))
    else:
        cz, r = zeros, np.sqrt(var)
    return _Plan(g=np.asarray(cs.growth(t, tn)) * np.ones(n_steps), w=zeros, c=np.asarray(cs.shift(t, tn)) * np.ones(n_steps), cz=cz, r=r)


def _run_plan(plan: _Plan, target, dz_t, xi_t, y0: float = 0.0) -> np.ndarray:
    """Time-major recursion; dz_t, xi_t have shape (n_steps, n_paths) or dz_t is None."""
    n_steps, n = xi_t.shape
    u = xi_t * plan.r[:, None] + plan.c[:, None]
    if dz_t is not None:
        u += dz_t * plan.cz[:, None]
    if target is not None:
        u += plan.w[:, None] * target[None, :]
    y = np.empty((n_steps + 1, n))
    y[0] = y0
    g = plan.g
    for k in range(n_steps):
        np.multiply(y[k], g[k], out=y[k + 1])
        y[k + 1] += u[k]
    return y


# -- path generation --------------------------------------------------------------------


def _resolve(params, kind, quote, branch):
    validate(params)
    kind = ModelKind.parse(kind)
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    if quote is None:
        quote = build_quote(params, kind, branch)
    return kind, quote, branch


def _finish(params, kind, quote, grid, V, Y, Z=None, informed_value=True):
    P = quote.phi + quote.lambda_pre * Y
    P_pre = P[:, -1]
    tilde_v = V if informed_value else np.full_like(V, params.mu)
    dY1 = optimal_bulk_trade(P_pre, quote, tilde_v)
    P1 = terminal_price(P_pre, dY1, quote)
    X = None if Z is None else Y - Z
    return PathBundle(grid=grid, V=V, Y=Y, P=P, dY1=dY1, P1=P1, Z=Z, X=X, kind=kind, quote=quote)


def _insider_block(params, kind, quote, cs, config, start, stop) -> PathBundle:
    n = config.n_steps
    normals = _block_normals(config, start, stop, 2 * n + 1)
    V = params.mu + params.gamma * normals[:, 0]
    xi = normals[:, 1:].reshape(stop - start, n, 2)
    dz_t = (params.sigma * math.sqrt(config.dt)) * xi[:, :, 0].T
    xi2_t = np.ascontiguousarray(xi[:, :, 1].T)
    if kind.informed:
        target = (V - quote.phi) / quote.lambda_pre
        plan = _insider_plan(cs, n)
    else:
        target = None
        plan = _ou_plan(cs, n)
    y_t = _run_plan(plan, target, dz_t, xi2_t)
    if kind.informed:
        y_t[-1] = target
    z_t = np.zeros_like(y_t)
    np.cumsum(dz_t, axis=0, out=z_t[1:])
    return _finish(params, kind, quote, config.grid, V, y_t.T, z_t.T, informed_value=kind.informed)


def _market_block(params, kind, quote, cs, config, start, stop) -> PathBundle:
    n = config.n_steps
    xi_t = np.ascontiguousarray(_block_normals(config, start, stop, n).T)
    y_t = _run_plan(_ou_plan(cs, n, with_noise=False), None, None, xi_t)
    Y = y_t.T
    V = quote.phi + quote.lambda_pre * Y[:, -1]
    return _finish(params, kind, quote, config.grid, V, Y)


def _concat(bundles: list[PathBundle]) -> PathBundle:
    first = bundles[0]
    if len(bundles) == 1:
        return first
    cat = lambda name: None if getattr(first, name) is None else np.concatenate([getattr(b, name) for b in bundles])
    return PathBundle(
        grid=first.grid,
        V=cat("V"),
        Y=cat("Y"),
        P=cat("P"),
        dY1=cat("dY1"),
        P1=cat("P1"),
        Z=cat("Z"),
        X=cat("X"),
        kind=first.kind,
        quote=first.quote,
    )


def simulate_insider_view(
    params: ModelParams, quote: EquilibriumQuote | None, kind, config: SimConfig, branch: Branch | int = 1
) -> PathBundle:
    """Paths of (V, Z, X, Y, P) as generated by the strategic trader's equilibrium strategy."""
    kind, quote, branch = _resolve(params, kind, quote, branch)
    if isinstance(config.scheme, EulerOracle):
        return euler_oracle_path(params, quote, kind, config, branch)
    cs = market_coefficients(params, kind, quote, branch)
    return _concat(map_blocks(lambda s, e: _insider_block(params, kind, quote, cs, config, s, e), config))


def simulate_market_view(
    params: ModelParams,
    quote: EquilibriumQuote | None,
    kind,
    config: SimConfig,
    branch: Branch | int = 1,
    coefficients: CoefficientSet | None = None,
) -> PathBundle:
    """Total demand as an OU process in the liquidity providers' filtration.

    For the insider kinds V is read off the terminal price (it is revealed); the
    uninformed kinds have the same law in both views, so their insider-view paths
    are returned.  ``coefficients`` overrides the drift (used for importance sampling).
    """
    kind, quote, branch = _resolve(params, kind, quote, branch)
    cs = coefficients or market_coefficients(params, kind, quote, branch)
    if not kind.informed and coefficients is None:
        return _concat(map_blocks(lambda s, e: _insider_block(params, kind, quote, cs, config, s, e), config))
    return _concat(map_blocks(lambda s, e: _market_block(params, kind, quote, cs, config, s, e), config))


def draw_normals(config: SimConfig, width: int) -> np.ndarray:
    """(n_paths, width) standard normals, row i from path i's own stream."""
    return np.concatenate(map_blocks(lambda s, e: _block_normals(config, s, e, width), config))


def simulate_from(
    params: ModelParams, kind, t: float, y: float, config: SimConfig, branch: Branch | int = 1, quote=None
) -> np.ndarray:
    """Market-view Y_1 samples restarted from Y_t = y on the grid point nearest t."""
    kind, quote, branch = _resolve(params, kind, quote, branch)
    cs = market_coefficients(params, kind, quote, branch)
    n = config.n_steps
    k0 = int(round(t * n))
    if not 0 <= k0 < n:
        raise DomainError("t", f"restart time must lie in [0, 1), got {t}")
    full = _ou_plan(cs, n, with_noise=False)
    plan = _Plan(*(getattr(full, name)[k0:] for name in ("g", "w", "c", "cz", "r")))

    def block(start, stop):
        xi_t = np.ascontiguousarray(_block_normals(config, start, stop, n - k0).T)
        return _run_plan(plan, None, None, xi_t, y0=y)[-1]

    return np.concatenate(map_blocks(block, config))


# -- Euler oracle -----------------------------------------------------------------------


def drift_coefficients(t, cs: CoefficientSet, kind: ModelKind, eps: float):
    """(cy, ct, c0) with insider-view drift = cy * Y + ct * target + c0 at time t."""
    t = np.asarray(t, dtype=float)
    if np.any(t > 1.0 - eps + 1e-15):
        raise SingularTime(f"drift requested beyond t = 1 - eps = {1.0 - eps}")
    s2 = cs.sigma**2
    cy = s2 * cs.a(t)
    c0 = s2 * cs.b(t)
    ct = np.zeros_like(cy)
    if kind.informed:
        # sigma^2 * score = sigma^2 e (target - e y - shift) / v2(t, 1)
        e = cs.growth(t, 1.0)
        k = s2 * e / cs.v2(t, 1.0)
        cy = cy - k * e
        ct = ct + k
        c0 = c0 - k * cs.shift(t, 1.0)
    return cy, ct, c0


def insider_drift(t, y, target, cs: CoefficientSet, kind: ModelKind, eps: float):
    """Drift of the insider-view demand: sigma^2 (a y + b), plus sigma^2 times the
    bridge score when the trader knows V.  Singular beyond 1 - eps."""
    cy, ct, c0 = drift_coefficients(t, cs, kind, eps)
    return cy * y + ct * target + c0


def euler_oracle_path(
    params: ModelParams,
    quote: EquilibriumQuote | None,
    kind,
    config: SimConfig,
    branch: Branch | int = 1,
    record_times=None,
    chunk: int = 4096,
) -> PathBundle:
    """Euler-Maruyama for the insider-view SDE with the drift frozen at t = 1 - eps.

    Only the grid points nearest ``record_times`` are stored (all of them by
    default), so very fine grids stay affordable in memory.
    """
    kind, quote, branch = _resolve(params, kind, quote, branch)
    scheme = config.scheme if isinstance(config.scheme, EulerOracle) else EulerOracle()
    eps = scheme.eps_terminal
    n = config.n_steps
    dt = config.dt
    if dt > eps * (1 + 1e-12):
        raise DomainError("n_steps", f"Euler oracle needs dt <= eps_terminal ({dt} > {eps})")
    cs = market_coefficients(params, kind, quote, branch)
    if record_times is None:
        idx = np.arange(n + 1)
    else:
        idx = np.unique(np.clip(np.rint(np.asarray(record_times, dtype=float) * n).astype(int), 0, n))
    t_eff = np.minimum(np.arange(n) * dt, 1.0 - eps)
    cy, ct, c0 = (np.broadcast_to(arr, (n,)) * dt for arr in drift_coefficients(t_eff, cs, kind, eps))
    sdt = params.sigma * math.sqrt(dt)

    def block(start, stop):
        gens = [path_generator(config.seed, i, config.stream) for i in range(start, stop)]
        m = stop - start
        V = params.mu + params.gamma * np.array([g.standard_normal() for g in gens])
        target = (V - quote.phi) / quote.lambda_pre
        y = np.zeros(m)
        z = np.zeros(m)
        ys = np.empty((len(idx), m))
        zs = np.empty((len(idx), m))
        slot = 0
        if idx[0] == 0:
            ys[0], zs[0] = y, z
            slot = 1
        k = 0
        while k < n:
            width = min(chunk, n - k)
            dz = np.empty((m, width))
            for row, g in enumerate(gens):
                g.standard_normal(out=dz[row])
            dz = sdt * dz.T
            for j in range(width):
                step = k + j
                y = y + (cy[step] * y + ct[step] * target + c0[step]) + dz[j]
                z = z + dz[j]
                if slot < len(idx) and idx[slot] == step + 1:
                    ys[slot], zs[slot] = y, z
                    slot += 1
            k += width
        return _finish(params, kind, quote, idx / n, V, ys.T.copy(), zs.T.copy(), informed_value=kind.informed)

    return _concat(map_blocks(block, config))


# -- wealth -----------------------------------------------------------------------------


def _require(path: PathBundle, *names):
    for name in names:
        if getattr(path, name) is None:
            raise ValueError(f"path bundle has no {name} (market-view paths of insider kinds)")


def wealth_insider(path: PathBundle, quote: EquilibriumQuote | None = None) -> np.ndarray:
    """int (V - P_{s-}) dX_s with left-point sums; the bulk order trades at P_1."""
    _require(path, "X")
    X, P, V = path.X, path.P, path.V
    return np.sum((V[:, None] - P[:, :-1]) * np.diff(X, axis=1), axis=1) + (V - path.P1) * path.dY1


def wealth_insider_xdp(path: PathBundle, quote: EquilibriumQuote | None = None) -> np.ndarray:
    """int X_{s-} dP_s + X_1 (V - P_1), left-point sums plus the auction terms.

    On a grid this differs from ``wealth_insider`` by exactly -sum(dX dP), the
    discrete covariation of strategy and price.
    """
    _require(path, "X")
    X, P, V = path.X, path.P, path.V
    dP = np.diff(P, axis=1)
    x_pre = X[:, -1]
    x_1 = x_pre + path.dY1
    return np.sum(X[:, :-1] * dP, axis=1) + x_pre * (path.P1 - P[:, -1]) + x_1 * (V - path.P1)


def wealth_noise(path: PathBundle, quote: EquilibriumQuote | None = None) -> np.ndarray:
    """Noise traders' P&L: int Z_{s-} dP_s + Z_1 (V - P_1); no noise trading at t = 1."""
    _require(path, "Z")
    Z, P = path.Z, path.P
    dP = np.diff(P, axis=1)
    z_1 = Z[:, -1]
    return np.sum(Z[:, :-1] * dP, axis=1) + z_1 * (path.P1 - P[:, -1]) + z_1 * (path.V - path.P1)


def wealth_noise_ibp(path: PathBundle, sigma: float, quote: EquilibriumQuote | None = None) -> np.ndarray:
    """Noise P&L after integrating by parts: Z_1 V - int P_{s-} dZ_s - lambda sigma^2.

    The bracket [Z, P]_1 = lambda sigma^2 holds pathwise in continuous time, so only
    the Ito integral is discretised; its left-point sum has mean zero exactly.
    """
    _require(path, "Z")
    quote = quote or path.quote
    Z, P = path.Z, path.P
    return Z[:, -1] * path.V - np.sum(P[:, :-1] * np.diff(Z, axis=1), axis=1) - quote.lambda_pre * sigma**2


def wealth_liquidity(path: PathBundle, quote: EquilibriumQuote | None = None) -> np.ndarray:
    """G_1 = -int Y_{s-} dP_s + Y_1 (P_1 - V), the bulk order included in Y_1."""
    Y, P, V = path.Y, path.P, path.V
    dP = np.diff(P, axis=1)
    y_pre = Y[:, -1]
    y_1 = y_pre + path.dY1
    return -np.sum(Y[:, :-1] * dP, axis=1) - y_pre * (path.P1 - P[:, -1]) + y_1 * (path.P1 - V)


def quadratic_covariation(path: PathBundle) -> np.ndarray:
    """sum dX dP over the grid; the bulk order is settled identically in both wealth forms."""
    _require(path, "X")
    return np.sum(np.diff(path.X, axis=1) * np.diff(path.P, axis=1), axis=1)


@dataclass
class WealthSample:
    """Per-path terminal quantities; arrays are aligned on the path index."""

    insider: np.ndarray
    insider_xdp: np.ndarray
    noise: np.ndarray
    noise_ibp: np.ndarray
    liquidity: np.ndarray
    V: np.ndarray
    P_pre: np.ndarray
    P1: np.ndarray
    dY1: np.ndarray

    @property
    def n(self) -> int:
        return self.insider.shape[0]


def simulate_wealth(
    params: ModelParams, kind, config: SimConfig, branch: Branch | int = 1, quote: EquilibriumQuote | None = None
) -> WealthSample:
    """Insider-view wealth of every agent, streamed block by block (no full paths kept).

    Same random numbers and recursion as ``simulate_insider_view``; the wealth sums
    run inside a compiled per-path loop.
    """
    kind, quote, branch = _resolve(params, kind, quote, branch)
    if isinstance(config.scheme, EulerOracle):
        raise DomainError("scheme", "wealth is accumulated on the exact scheme only")
    cs = market_coefficients(params, kind, quote, branch)
    n = config.n_steps
    plan = _insider_plan(cs, n) if kind.informed else _ou_plan(cs, n)
    sdt = params.sigma * math.sqrt(config.dt)

    def block(start, stop):
        normals = _block_normals(config, start, stop, 2 * n + 1)
        out = np.empty((stop - start, _kernels.N_WEALTH_COLS))
        _kernels.insider_wealth(
            normals, plan.g, plan.w, plan.c, plan.cz, plan.r,
            float(params.mu), float(params.gamma), sdt, float(params.sigma) ** 2,
            float(quote.phi), float(quote.lambda_pre), float(quote.lambda_final),
            float(quote.c0), float(quote.c1), kind.informed, out,
        )
        return out

    out = np.concatenate(map_blocks(block, config))
    return WealthSample(
        insider=out[:, _kernels.W_INSIDER],
        insider_xdp=out[:, _kernels.W_INSIDER_XDP],
        noise=out[:, _kernels.W_NOISE],
        noise_ibp=out[:, _kernels.W_NOISE_IBP],
        liquidity=out[:, _kernels.W_LIQUIDITY],
        V=out[:, _kernels.COL_V],
        P_pre=out[:, _kernels.COL_P_PRE],
        P1=out[:, _kernels.COL_P1],
        dY1=out[:, _kernels.COL_DY1],
    )


@dataclass
class MarketSample:
    """Market-view draws under a proposal law with exact likelihood-ratio weights.

    gain is the liquidity providers' G_1 (at V = mu for uninformed kinds),
    log_weight the log density ratio target/proposal of the demand skeleton,
    Y1 the post-auction demand and Y_rec the demand at ``rec_index``.
    """

    gain: np.ndarray
    log_weight: np.ndarray
    Y1: np.ndarray
    Y_rec: np.ndarray
    rec_index: np.ndarray


def simulate_market_gains(
    params: ModelParams,
    kind,
    config: SimConfig,
    branch: Branch | int = 1,
    quote: EquilibriumQuote | None = None,
    target: CoefficientSet | None = None,
    proposal: CoefficientSet | None = None,
    record_times=(),
) -> MarketSample:
    kind, quote, branch = _resolve(params, kind, quote, branch)
    cs_p = target or market_coefficients(params, kind, quote, branch)
    cs_q = proposal or cs_p
    n = config.n_steps
    pp = _ou_plan(cs_p, n, with_noise=False)
    pq = _ou_plan(cs_q, n, with_noise=False)
    log_ratio = np.log(pp.r) - np.log(pq.r)
    rec = np.unique(np.clip(np.rint(np.asarray(record_times, dtype=float) * n).astype(np.int64), 0, n))

    def block(start, stop):
        normals = _block_normals(config, start, stop, n)
        out, rec_out = _kernels.empty_outputs(stop - start, len(rec))
        _kernels.market_gains(
            normals, pq.g, pq.c, pq.r, pp.g, pp.c, pp.r, log_ratio,
            float(params.mu), float(quote.phi), float(quote.lambda_pre), float(quote.lambda_final),
            float(quote.c0), float(quote.c1), kind.informed, rec, out, rec_out,
        )
        return out, rec_out[:, : len(rec)]

    parts = map_blocks(block, config)
    out = np.concatenate([p[0] for p in parts])
    return MarketSample(
        gain=out[:, 0], log_weight=out[:, 1], Y1=out[:, 2],
        Y_rec=np.concatenate([p[1] for p in parts]), rec_index=rec,
    )

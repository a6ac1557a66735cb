"""Monte Carlo oracle for the controlled surplus under any strategy.

The surplus follows Euler increments mu dt + sigma sqrt(dt) Z between
events. Decision times arrive as exponential(gamma) interarrivals and are
honoured exactly: a step containing one is split at the event time, the
periodic rule applied there, and the remainder of the step completed with
fresh increments. Immediate-payment triggers and ruin are detected at
segment endpoints (grid-based). The Brownian-bridge correction for missed
intra-step ruin crossings is available but off by default; without it the
grid detector under-counts ruin slightly, biasing values up by O(sqrt(dt)),
which the verification suite absorbs into its tolerance via dt-halving.

Paths are vectorised. With antithetic=True the second half of the paths
reuses the negated Gaussian draws of the first half and the standard error
is computed over pair averages. simulate_at runs several starting points
against common random numbers (each starting point remains a valid
independent-across-paths estimate); that is what keeps multi-point
comparisons affordable. Identical (seed, config, strategy, x0s) reproduce
bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModelParams, Roots
from .errors import ConfigError
from .strategies import Hybrid, Liquidation, PeriodicBarrier, Strategy


@dataclass(frozen=True)
class Dividend:
    amount: float
    kind: str  # 'periodic' | 'immediate'


def policy_step(strategy: Strategy, x: float, is_decision_time: bool) -> Dividend:
    """Stationary Markov payment map: amount paid at surplus x.

    At decision times the periodic rule applies (no transaction cost);
    between them the immediate rule applies. A zero amount means no
    payment; zero payments attract no cost and are no-ops.
    """
    if x < 0.0:
        raise ValueError(f"surplus must be >= 0, got {x}")
    if is_decision_time:
        if isinstance(strategy, Hybrid):
            return Dividend(max(x - strategy.a_p, 0.0), "periodic")
        if isinstance(strategy, PeriodicBarrier):
            return Dividend(max(x - strategy.b, 0.0), "periodic")
        # periodic-zero and liquidation both pay everything at T1
        return Dividend(x, "periodic")
    if isinstance(strategy, Hybrid):
        amt = x - strategy.a_c if x >= strategy.b else 0.0
        return Dividend(amt, "immediate")
    if isinstance(strategy, Liquidation):
        amt = x if strategy.b1 < x < strategy.b2 else 0.0
        return Dividend(amt, "immediate")
    return Dividend(0.0, "immediate")


@dataclass(frozen=True)
class SimConfig:
    """Discretisation and sampling choices for one simulation run.

    horizon=None derives the shortest horizon whose discount truncation
    stays below truncation_tol; an explicit horizon must satisfy the same
    bound. The truncated tail contributes at most
    e^{-delta horizon} (linear growth bound) to the EPV.
    """

    x0: float = 1.0
    dt: float = 1e-3
    horizon: float | None = None
    n_paths: int = 10_000
    seed: int = 42
    antithetic: bool = True
    truncation_tol: float = 1e-6
    bridge_correction: bool = False

    def __post_init__(self):
        if not (isinstance(self.dt, (int, float)) and self.dt > 0.0):
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.n_paths < 1:
            raise ConfigError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.antithetic and self.n_paths % 2:
            raise ConfigError("antithetic sampling needs an even n_paths")
        if not 0.0 < self.truncation_tol < 1.0:
            raise ConfigError("truncation_tol must be in (0, 1)")
        if self.horizon is not None and self.horizon <= 0.0:
            raise ConfigError(f"horizon must be > 0, got {self.horizon}")

    def resolved_horizon(self, delta: float) -> float:
        if self.horizon is None:
            return -math.log(self.truncation_tol) / delta
        if math.exp(-delta * self.horizon) > self.truncation_tol * (1 + 1e-12):
            raise ConfigError(
                f"horizon {self.horizon} leaves discount truncation above "
                f"truncation_tol={self.truncation_tol}"
            )
        return self.horizon


@dataclass(frozen=True)
class SimResult:
    x0: float
    epv_mean: float
    epv_stderr: float
    ruin_fraction: float
    mean_ruin_time: float  # nan when no path reached zero
    n_periodic_dividends: int
    n_immediate_dividends: int
    n_paths: int


class _Rules:
    """Vectorised payment rules of one strategy plus a quarantine level.

    Dead paths are parked at `sentinel`, a level that can neither ruin nor
    trigger an immediate payment, so the per-step min/max prechecks stay
    meaningful without full masking.
    """

    def __init__(self, strategy: Strategy):
        self.strategy = strategy
        if isinstance(strategy, Hybrid):
            self.has_immediate = True
            lo = strategy.a_c if strategy.a_c > 0.0 else strategy.b
            self.sentinel = 0.5 * lo if math.isfinite(lo) else strategy.a_p + 1.0
            self.trigger_floor = strategy.b
        elif isinstance(strategy, Liquidation):
            self.has_immediate = True
            self.sentinel = 0.5 * strategy.b1
            self.trigger_floor = strategy.b1
        else:
            self.has_immediate = False
            self.sentinel = 1.0
            self.trigger_floor = math.inf

    def periodic(self, x):
        """(pay, new_x, dies) at a decision time, elementwise."""
        s = self.strategy
        if isinstance(s, Hybrid):
            return np.maximum(x - s.a_p, 0.0), np.minimum(x, s.a_p), False
        if isinstance(s, PeriodicBarrier):
            return np.maximum(x - s.b, 0.0), np.minimum(x, s.b), False
        return x.copy(), np.zeros_like(x), True

    def immediate_mask(self, x):
        s = self.strategy
        if isinstance(s, Hybrid):
            return x >= s.b
        return (x > s.b1) & (x < s.b2)

    def immediate(self, x):
        """(pay, new_x, dies) on the trigger set, elementwise."""
        s = self.strategy
        if isinstance(s, Hybrid):
            return x - s.a_c, np.full_like(x, s.a_c), False
        return x.copy(), np.zeros_like(x), True


def simulate(
    params: ModelParams, roots: Roots, strategy: Strategy, config: SimConfig
) -> SimResult:
    """Estimate the EPV of dividends net of costs until ruin from config.x0."""
    return simulate_at(params, roots, strategy, config, [config.x0])[0]


def simulate_at(
    params: ModelParams,
    roots: Roots,
    strategy: Strategy,
    config: SimConfig,
    x0s,
) -> list[SimResult]:
    """Simulate several starting points under common random numbers."""
    x0s = [float(v) for v in x0s]
    for v in x0s:
        if not math.isfinite(v) or v < 0.0:
            raise ConfigError(f"x0 must be finite and >= 0, got {v}")
    mu, sigma, delta, gamma = params.mu, params.sigma, params.delta, params.gamma
    beta, chi = params.beta, params.chi
    horizon = config.resolved_horizon(delta)
    rules = _Rules(strategy)
    nb = len(x0s)
    S = 2 if config.antithetic else 1
    C0 = config.n_paths // S
    rng = np.random.default_rng(config.seed)
    sentinel = rules.sentinel

    # master (full-population) records; the engine works on a shrinking
    # column slice and writes finished columns back here
    epv_m = np.zeros((S, nb, C0))
    ruin_m = np.full((S, nb, C0), np.nan)
    died_m = np.zeros((S, nb, C0), dtype=bool)
    n_per = np.zeros(nb, dtype=np.int64)
    n_imm = np.zeros(nb, dtype=np.int64)

    # engine state (paths kept in float32: increments are noise-dominated)
    X = np.empty((S, nb, C0), dtype=np.float32)
    for b, v in enumerate(x0s):
        X[:, b, :] = v
    alive = np.ones((S, nb, C0), dtype=bool)
    epv = epv_m
    ruin_time = ruin_m
    col_ids = np.arange(C0)
    grave_r = np.empty(0, dtype=np.intp)
    grave_c = np.empty(0, dtype=np.intp)
    alive_count = alive.size

    def kill(mask, time) -> None:
        nonlocal grave_r, grave_c, alive_count
        alive_count -= int(mask.sum())
        alive[mask] = False
        ruin_time[mask] = np.asarray(time, dtype=float) if np.ndim(time) else time
        X[mask] = sentinel
        s_i, b_i, c_i = np.nonzero(mask)
        grave_r = np.concatenate([grave_r, s_i * nb + b_i])
        grave_c = np.concatenate([grave_c, c_i])

    def ruin_check(time) -> None:
        # dead paths are parked at the positive sentinel, so X <= 0 alone
        # selects exactly the newly ruined members
        if X.min() <= 0.0:
            mask = X <= 0.0
            if mask.any():
                kill(mask, time)

    def immediate_check(time) -> None:
        if not rules.has_immediate or X.max() < rules.trigger_floor:
            return
        mask = rules.immediate_mask(X)  # the sentinel never triggers
        hits = np.nonzero(mask)
        if hits[0].size == 0:
            return
        pay, new_x, dies = rules.immediate(X[hits].astype(np.float64))
        epv[hits] += math.exp(-delta * time) * (beta * pay - chi)
        n_imm[:] += np.bincount(hits[1], minlength=nb)
        X[hits] = new_x
        if dies:
            kill(mask, time)

    def decision_event(cols, td) -> None:
        # ruin first (paths at or below zero cannot pay), then the
        # periodic rule for surviving members of these columns
        sub = X[:, :, cols]
        newly = alive[:, :, cols] & (sub <= 0.0)
        if newly.any():
            full = np.zeros_like(alive)
            full[:, :, cols] = newly
            kill(full, np.broadcast_to(td, sub.shape)[newly])
        live = alive[:, :, cols]
        pay, new_x, dies = rules.periodic(X[:, :, cols].astype(np.float64))
        pay = np.where(live, pay, 0.0)
        epv[:, :, cols] += np.exp(-delta * td) * pay
        n_per[:] += (pay > 0.0).sum(axis=(0, 2))
        if dies:
            full = np.zeros_like(alive)
            full[:, :, cols] = live
            kill(full, np.broadcast_to(td, live.shape)[live])
        else:
            X[:, :, cols] = np.where(live, new_x, X[:, :, cols])

    def compact() -> None:
        # drop columns with no live member anywhere; their records are
        # already final in the master arrays (epv/ruin_time start out as
        # the master arrays themselves and become copies after the first
        # compaction)
        nonlocal X, alive, epv, ruin_time, col_ids, grave_r, grave_c, next_dec
        keep = alive.any(axis=(0, 1))
        if keep.all():
            return
        ids = col_ids[~keep]
        if epv is not epv_m:
            epv_m[:, :, ids] = epv[:, :, ~keep]
            ruin_m[:, :, ids] = ruin_time[:, :, ~keep]
        died_m[:, :, ids] = ~alive[:, :, ~keep]
        X = np.ascontiguousarray(X[:, :, keep])
        alive = np.ascontiguousarray(alive[:, :, keep])
        epv = np.ascontiguousarray(epv[:, :, keep])
        ruin_time = np.ascontiguousarray(ruin_time[:, :, keep])
        next_dec = next_dec[keep]
        col_ids = col_ids[keep]
        remap = np.full(keep.size, -1, dtype=np.intp)
        remap[keep] = np.arange(int(keep.sum()))
        live_entries = keep[grave_c]
        grave_r = grave_r[live_entries]
        grave_c = remap[grave_c[live_entries]]

    # time zero: ruin, then the immediate rule (t=0 is a.s. not a decision time)
    ruin_check(0.0)
    immediate_check(0.0)

    next_dec = rng.exponential(1.0 / gamma, size=C0)
    n_steps = max(1, math.ceil(horizon / config.dt))
    t = 0.0
    for k in range(n_steps):
        if alive_count == 0:
            break
        h = min(config.dt, horizon - t)
        if h <= 0.0:
            break
        C = X.shape[2]
        vol = sigma * math.sqrt(h)
        z = rng.standard_normal(C, dtype=np.float32)
        zz = np.float32(vol) * z
        drift = np.float32(mu * h)
        if config.bridge_correction:
            x_prev = X.copy()
        X[0] += zz + drift
        if S == 2:
            X[1] += drift - zz

        fired = np.nonzero(next_dec <= t + h)[0]
        if fired.size:
            # exact event alignment: undo the whole-step move on fired
            # columns and rebuild it from sub-segments split at event times
            X[0][:, fired] -= zz[fired] + drift
            if S == 2:
                X[1][:, fired] -= drift - zz[fired]
            tc = np.full(fired.size, t)
            while True:
                inside = next_dec[fired] <= t + h
                if not inside.any():
                    break
                pos = np.nonzero(inside)[0]
                cols = fired[pos]
                td = next_dec[cols]
                hh = td - tc[pos]
                zs = rng.standard_normal(cols.size, dtype=np.float32)
                inc = (sigma * np.sqrt(hh)).astype(np.float32) * zs
                mh = (mu * hh).astype(np.float32)
                X[0][:, cols] += inc + mh
                if S == 2:
                    X[1][:, cols] += mh - inc
                decision_event(cols, td)
                next_dec[cols] = td + rng.exponential(1.0 / gamma, cols.size)
                tc[pos] = td
            hh = (t + h) - tc
            zs = rng.standard_normal(fired.size, dtype=np.float32)
            inc = (sigma * np.sqrt(hh)).astype(np.float32) * zs
            mh = (mu * hh).astype(np.float32)
            X[0][:, fired] += inc + mh
            if S == 2:
                X[1][:, fired] += mh - inc
            if config.bridge_correction:
                # bridge statistics are not rebuilt across the event split;
                # fired columns (an O(gamma dt) fraction) skip the correction
                x_prev[:, :, fired] = X[:, :, fired]

        t += h
        if grave_r.size:
            X.reshape(S * nb, -1)[grave_r, grave_c] = sentinel
        if config.bridge_correction:
            a64 = np.maximum(x_prev.astype(np.float64), 1e-300)
            b64 = np.maximum(X.astype(np.float64), 1e-300)
            p = np.exp(-2.0 * a64 * b64 / (sigma * sigma * h))
            hit = alive & (X > 0.0) & (x_prev > 0.0) & (rng.random(X.shape) < p)
            if hit.any():
                kill(hit, t)
        ruin_check(t)
        immediate_check(t)
        if (k & 63) == 63 and (
            alive_count < 0.7 * alive.size or grave_r.size > 65536
        ):
            compact()

    results = []
    # final writeback of whatever is still in the engine slice
    if epv is not epv_m:
        epv_m[:, :, col_ids] = epv
        ruin_m[:, :, col_ids] = ruin_time
    died_m[:, :, col_ids] = ~alive
    for b, v in enumerate(x0s):
        e = epv_m[:, b, :]
        samples = 0.5 * (e[0] + e[1]) if S == 2 else e[0]
        n = samples.size
        stderr = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        died = died_m[:, b, :]
        rt = ruin_m[:, b, :][died]
        results.append(
            SimResult(
                x0=v,
                epv_mean=float(samples.mean()),
                epv_stderr=stderr,
                ruin_fraction=float(died.mean()),
                mean_ruin_time=float(rt.mean()) if rt.size else math.nan,
                n_periodic_dividends=int(n_per[b]),
                n_immediate_dividends=int(n_imm[b]),
                n_paths=config.n_paths,
            )
        )
    return results

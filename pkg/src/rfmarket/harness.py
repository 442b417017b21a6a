"""Scenario generation and Monte Carlo comparison of the four schemes."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, fields
from typing import Iterable, Optional

import numpy as np

from .combinatorics import composition_table, count_compositions
from .config import SCHEMES, ScenarioConfig
from .contract import ic_profile, own_item_is_optimal, solve_centralized, solve_contract
from .errors import ConfigError, DomainError, FeasibilityError, RFMarketError
from .model import LOG2E, Market, PhysicalParams
from .stackelberg import complete_outcomes, solve_asymmetric

EXACT_LIMIT = 10**5
MAX_RESAMPLE = 100

# stream ids inside one seed
_TYPES, _GAIN, _DRAWS = 0, 1, 2


def _rng(seed, replicate, stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, replicate, stream])))


def _gain(d, attenuation_db, alpha):
    return 10.0 ** (-attenuation_db / 10.0) * d ** (-alpha)


def generate_types(cfg: ScenarioConfig, replicate: int = 0) -> np.ndarray:
    if cfg.types is not None:
        return np.array(cfg.types, dtype=float)
    tg = cfg.type_gen
    seed = cfg.seed if tg.seed is None else tg.seed
    rng = _rng(seed, replicate, _TYPES)
    for _ in range(MAX_RESAMPLE):
        a = rng.uniform(*tg.a_range, size=cfg.n_types)
        d = rng.uniform(*tg.d_ms_range, size=cfg.n_types)
        theta = np.sort(_gain(d, tg.attenuation_db, tg.path_loss_alpha) ** 2 / a)
        if np.all(np.diff(theta) > 0):
            break
    else:
        raise ConfigError(f"could not draw {cfg.n_types} distinct types in {MAX_RESAMPLE} attempts")
    if tg.normalization == "unit":
        theta = theta / theta[-1]
    return theta


def generate_market(cfg: ScenarioConfig, replicate: int = 0) -> Market:
    """Deterministic market for (config, replicate)."""
    thetas = generate_types(cfg, replicate)
    try:
        if cfg.gamma is not None:
            return Market(cfg.n_eaps, tuple(thetas), cfg.gamma, cfg.bandwidth_w)
        ph = cfg.physical
        d_as = _rng(cfg.seed, replicate, _GAIN).uniform(*ph.d_as_range)
        params = PhysicalParams(ph.eta, cfg.bandwidth_w, ph.noise_n0, _gain(d_as, ph.attenuation_db, ph.path_loss_alpha))
        return Market.from_params(cfg.n_eaps, thetas, params)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def draw_counts(market: Market, draws: int, seed: int, replicate: int = 0) -> np.ndarray:
    """Realized type counts for ``draws`` independent blocks, shape (draws, K).

    Philox is counter based, so draw i depends only on (seed, replicate, i).
    """
    rng = _rng(seed, replicate, _DRAWS)
    idx = rng.integers(0, market.n_types, size=(draws, market.n_eaps))
    counts = np.zeros((draws, market.n_types), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(draws), market.n_eaps), idx.ravel()), 1)
    return counts


@dataclass
class ComparisonRow:
    scheme: str
    param: str
    value: float
    replicate: int
    expected_welfare: float
    normalized_welfare: float
    welfare_exact: float
    welfare_mc: float
    welfare_mc_se: float
    expected_dap_utility: float
    lambda_star: float
    menu: str
    runtime_ms: float
    status: str = "ok"
    message: str = ""


CSV_COLUMNS = [f.name for f in fields(ComparisonRow)]


def _realized(q, pi, counts, market):
    """Per-block (DAP utility, welfare) for a fixed per-type menu."""
    n = counts.astype(float)
    rate = market.bandwidth_w * np.log1p(market.gamma * (n @ q)) * LOG2E
    return rate - n @ pi, rate - n @ (q * q / market.thetas)


def _mc(values):
    m = len(values)
    se = float(np.std(values, ddof=1) / math.sqrt(m)) if m > 1 else math.nan
    return math.fsum(values) / m, se


def _solve_scheme(scheme, market, cfg, counts, exact):
    """Returns (exact welfare, mc welfare, mc se, expected dap utility, lambda, menu digest)."""
    nan = math.nan
    if scheme in ("centralized", "contract"):
        if scheme == "centralized":
            sol = solve_centralized(market)
        else:
            sol = solve_contract(market, monotonicity=cfg.monotonicity)
        q = np.asarray(sol.menu.q)
        pi = np.asarray(sol.menu.pi)
        dap_mc, w_mc = _realized(q, pi, counts, market)
        w, se = _mc(w_mc)
        dap = sol.expected_dap_utility if exact else _mc(dap_mc)[0]
        return (sol.expected_welfare if exact else nan), w, se, dap, nan, sol.menu.digest()
    if scheme == "stackelberg-asym":
        out = solve_asymmetric(market)
        q = out.q_star
        dap_mc, w_mc = _realized(q, out.lambda_star * q, counts, market)
        w, se = _mc(w_mc)
        dap = out.dap_utility if exact else _mc(dap_mc)[0]
        return (out.welfare if exact else nan), w, se, dap, out.lambda_star, ""
    if scheme == "stackelberg-complete":
        _, dap_mc, w_mc = complete_outcomes(counts, market)
        w, se = _mc(w_mc)
        if exact:
            table, probs = composition_table(market.n_eaps, market.n_types)
            _, dap_ex, w_ex = complete_outcomes(table, market)
            return math.fsum(probs * w_ex), w, se, math.fsum(probs * dap_ex), nan, ""
        return nan, w, se, _mc(dap_mc)[0], nan, ""
    raise ConfigError(f"unknown scheme {scheme!r}")


def run_comparison(
    cfg: ScenarioConfig,
    schemes: Iterable[str] = SCHEMES,
    param: str = "",
    value: float = math.nan,
    replicate: Optional[int] = None,
) -> list:
    """Rows for each requested scheme, normalized by the centralized benchmark.

    Distribution-level schemes are solved once; complete-information
    Stackelberg is re-solved for every realized block.  All schemes share the
    same ``mc_draws`` realizations.  The centralized scheme is always solved for
    normalization.  Scheme failures are recorded in ``status`` and do not stop
    the other schemes.  With ``replicate=None`` every replicate in
    ``cfg.replicates`` is run.
    """
    schemes = list(schemes)
    if not schemes:
        raise ConfigError("at least one scheme is required")
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}")
    reps = range(cfg.replicates) if replicate is None else [replicate]
    rows = []
    for rep in reps:
        market = generate_market(cfg, rep)
        counts = draw_counts(market, cfg.mc_draws, cfg.seed, rep)
        exact = cfg.exact and count_compositions(market.n_eaps, market.n_types) <= EXACT_LIMIT
        results = {}
        for scheme in dict.fromkeys(["centralized"] + schemes):
            t0 = time.perf_counter()
            try:
                res = _solve_scheme(scheme, market, cfg, counts, exact)
                results[scheme] = (res, (time.perf_counter() - t0) * 1e3, "ok", "")
            except RFMarketError as exc:
                nan = math.nan
                results[scheme] = (
                    (nan, nan, nan, nan, nan, ""),
                    (time.perf_counter() - t0) * 1e3,
                    type(exc).__name__,
                    str(exc),
                )
        ref = results["centralized"][0]
        ref_w = ref[0] if exact else ref[1]
        for scheme in schemes:
            (w_ex, w_mc, se, dap, lam, menu), ms, status, msg = results[scheme]
            w = w_ex if exact else w_mc
            rows.append(
                ComparisonRow(scheme, param, value, rep, w, w / ref_w if ref_w else math.nan,
                              w_ex, w_mc, se, dap, lam, menu, ms, status, msg)
            )
    return rows


def sweep(cfg: ScenarioConfig, param: str, values, schemes: Iterable[str] = SCHEMES) -> list:
    """run_comparison at each value of ``gamma`` or ``n_eaps``; same seeds throughout."""
    if param in ("n", "n_eaps"):
        param = "n_eaps"
    elif param != "gamma":
        raise ConfigError(f"cannot sweep {param!r}; use 'gamma' or 'n'")
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    schemes = list(schemes)
    rows = []
    for v in values:
        try:
            if param == "gamma":
                point = cfg.with_(gamma=float(v), physical=None)
            else:
                if float(v) != int(v):
                    raise ConfigError(f"n_eaps must be an integer, got {v}")
                point = cfg.with_(n_eaps=int(v))
            rows.extend(run_comparison(point, schemes, param, float(v)))
        except RFMarketError as exc:
            nan = math.nan
            for s in schemes:
                rows.append(ComparisonRow(s, param, float(v), 0, nan, nan, nan, nan, nan, nan, nan, "",
                                          nan, type(exc).__name__, str(exc)))
    return rows


@dataclass
class ProfileRow:
    probe: int
    item: int
    utility: float
    own_item: bool


def emit_ic_profile(cfg: ScenarioConfig, probes: Iterable[int], replicate: int = 0) -> list:
    """Utility of each probe type (1-based) for every item of the solved menu.

    Raises :class:`FeasibilityError` unless each probe's own item is a
    maximizer of its profile with nonnegative utility, checked in exact
    rational arithmetic.  Under binding downward IC the item just below ties
    with the own item, so the peak is weak by construction.
    """
    market = generate_market(cfg, replicate)
    probes = list(probes)
    for p in probes:
        if not 1 <= p <= market.n_types:
            raise ConfigError(f"probe {p} outside 1..{market.n_types}")
    sol = solve_contract(market, monotonicity=cfg.monotonicity)
    rows = []
    for p in probes:
        if not own_item_is_optimal(sol.menu, market.thetas, p - 1):
            prof = ic_profile(sol.menu, market.thetas[p - 1], exact=True)
            raise FeasibilityError(f"type {p} prefers item {prof.index(max(prof)) + 1} over its own")
        prof = ic_profile(sol.menu, market.thetas[p - 1])
        rows.extend(ProfileRow(p, j + 1, u, j + 1 == p) for j, u in enumerate(prof))
    return rows


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.12g}"
    return str(v)


def write_csv(rows, out=None, timings: bool = False) -> str:
    """Write dataclass rows as CSV (LF line endings, 12 significant digits).

    Runtimes are blanked unless ``timings`` is set so that output is
    reproducible byte for byte.  Returns the text; writes it to ``out`` (path
    or text stream) when given.
    """
    rows = list(rows)
    buf = io.StringIO()
    if rows:
        cols = [f.name for f in fields(rows[0])]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow(
                "" if (c == "runtime_ms" and not timings) else _fmt(getattr(r, c)) for c in cols
            )
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    return text

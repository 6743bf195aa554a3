"""Resonator constructions and Gal (GCD) sums.

Two families: weighted resonators supported on squarefree products of primes
from a narrow window (Hough style), and unweighted set resonators drawn from
one dyadic window of squarefree smooth integers (La Breteche-Tenenbaum style).
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .arith import SieveTables, factorize
from .config import DEFAULT_CONFIG, LabConfig
from .errors import DomainError, ResourceLimitError

_E_E = math.exp(math.e)  # e**e: smallest y for which log log y > 1


@dataclass(frozen=True)
class Overrides:
    """Explicit window/support bounds replacing the formula-derived ones."""

    p_lo: float | None = None
    p_hi: float | None = None
    y_cap: float | None = None


@dataclass(frozen=True)
class HoughParams:
    """Parameters of the weighted resonator.

    ``y`` and ``lam`` are the effective values used by the builder (equal to
    the formula values unless a y_cap override is present); ``formula_y`` and
    ``formula_lam`` always record the un-overridden values when defined.
    """

    X: float
    x: float
    alpha: float
    y: float
    lam: float
    prime_window: tuple[float, float]
    formula_y: float
    formula_lam: float | None
    overridden: bool = False

    def side_condition_ok(self, N: float) -> bool:
        """Whether log N > 3 * lam * log(log lam) for the given N."""
        return math.log(N) > 3.0 * self.lam * math.log(math.log(self.lam))


def hough_params(X: float, x: float, alpha: float,
                 overrides: Overrides | None = None) -> HoughParams:
    """Derive y = X**(1/2-alpha)/x**2, lam = sqrt(log y * log log y) and the
    prime window [lam**2, exp((log lam)**2)], honouring overrides."""
    if not X > _E_E:
        raise DomainError(f"X must exceed e**e, got {X}")
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if not 0 < alpha < 0.25:
        raise DomainError(f"alpha must lie in (0, 1/4), got {alpha}")
    formula_y = X ** (0.5 - alpha) / (float(x) ** 2)
    formula_lam = None
    if formula_y > _E_E:
        formula_lam = math.sqrt(math.log(formula_y) * math.log(math.log(formula_y)))

    ov = overrides or Overrides()
    y_eff = float(ov.y_cap) if ov.y_cap is not None else formula_y
    if not y_eff > _E_E:
        raise DomainError(
            f"effective y = {y_eff} is <= e**e, lam undefined; "
            "pass a y_cap override for desk-scale runs"
        )
    lam = math.sqrt(math.log(y_eff) * math.log(math.log(y_eff)))
    p_lo = float(ov.p_lo) if ov.p_lo is not None else lam * lam
    p_hi = float(ov.p_hi) if ov.p_hi is not None else math.exp(math.log(lam) ** 2)
    return HoughParams(
        X=float(X), x=float(x), alpha=float(alpha),
        y=y_eff, lam=lam, prime_window=(p_lo, p_hi),
        formula_y=formula_y, formula_lam=formula_lam,
        overridden=(ov.p_lo is not None or ov.p_hi is not None or ov.y_cap is not None),
    )


@dataclass(frozen=True)
class WeightedResonator:
    """Support (squarefree window-smooth n <= y) with weights r(n)."""

    ns: np.ndarray   # int64, ascending; always contains 1
    rs: np.ndarray   # float64; rs[ns == 1] = 1
    lam: float | None = None
    prime_window: tuple[float, float] | None = None
    y: float | None = None
    trivial: bool = False  # empty window or y < 1: support collapsed to {1}

    @property
    def support(self) -> list[tuple[int, float]]:
        return [(int(n), float(r)) for n, r in zip(self.ns, self.rs)]


def _trivial_resonator(lam=None, window=None, y=None) -> WeightedResonator:
    return WeightedResonator(
        ns=np.array([1], dtype=np.int64), rs=np.array([1.0]),
        lam=lam, prime_window=window, y=y, trivial=True,
    )


def build_weighted_support(window_primes, y: float, lam: float) -> WeightedResonator:
    """Enumerate squarefree products of ``window_primes`` up to y, with the
    multiplicative weight r(p) = lam / (sqrt(p) log p)."""
    primes = [int(p) for p in window_primes]
    weights = {p: lam / (math.sqrt(p) * math.log(p)) for p in primes}
    out: list[tuple[int, float]] = []

    def extend(start: int, n: int, r: float):
        out.append((n, r))
        for i in range(start, len(primes)):
            p = primes[i]
            if n * p > y:
                # primes are ascending, so no later branch fits either
                break
            extend(i + 1, n * p, r * weights[p])

    extend(0, 1, 1.0)
    out.sort()
    ns = np.array([n for n, _ in out], dtype=np.int64)
    rs = np.array([r for _, r in out], dtype=np.float64)
    return WeightedResonator(ns=ns, rs=rs, lam=lam, y=y, trivial=len(out) == 1)


def build_hough_resonator(params: HoughParams, tables: SieveTables) -> WeightedResonator:
    """All squarefree products of window primes that stay <= y, ascending."""
    p_lo, p_hi = params.prime_window
    if p_hi > tables.limit:
        raise DomainError(f"window top {p_hi} exceeds sieve limit {tables.limit}")
    if params.y > tables.limit:
        raise DomainError(f"y = {params.y} exceeds sieve limit {tables.limit}")
    ps = tables.primes
    window = ps[(ps >= p_lo) & (ps <= p_hi)]
    if len(window) == 0 or params.y < 1.0:
        return _trivial_resonator(params.lam, params.prime_window, params.y)
    res = build_weighted_support(window, params.y, params.lam)
    return WeightedResonator(
        ns=res.ns, rs=res.rs, lam=params.lam,
        prime_window=params.prime_window, y=params.y, trivial=res.trivial,
    )


@dataclass(frozen=True)
class SetResonator:
    """A set of squarefree y_m-smooth integers from one dyadic window."""

    ms: np.ndarray   # int64, ascending, distinct
    y_m: int
    window_start: int | None = None

    @property
    def N(self) -> int:
        return len(self.ms)


def validate_set_resonator(res: SetResonator, tables: SieveTables) -> None:
    """Check cardinality / squarefree / smooth / dyadic invariants; raise on failure."""
    ms = res.ms
    if len(np.unique(ms)) != len(ms):
        raise DomainError("set resonator has repeated elements")
    for m in ms:
        m = int(m)
        fac = factorize(m, tables)
        if any(e > 1 for _, e in fac):
            raise DomainError(f"element {m} is not squarefree")
        if fac and fac[-1][0] > res.y_m:
            raise DomainError(f"element {m} has prime factor {fac[-1][0]} > y_m={res.y_m}")
    if len(ms) and int(ms[-1]) > 2 * int(ms[0]):
        raise DomainError(f"max {ms[-1]} > 2 * min {ms[0]}")


def _window_candidates(t: int, u: int, primes: list[int]):
    """Squarefree smooth integers in [t, u) (excluding 1) and their factor counts."""
    vals = np.arange(max(t, 2), u, dtype=np.int64)
    if len(vals) == 0:
        return vals, np.zeros(0, dtype=np.int64)
    rem = vals.copy()
    ok = np.ones(len(vals), dtype=bool)
    nfac = np.zeros(len(vals), dtype=np.int64)
    for p in primes:
        div = rem % p == 0
        rem[div] //= p
        nfac += div
        ok &= ~(div & (rem % p == 0))
    ok &= rem == 1
    return vals[ok], nfac[ok]


def build_set_resonator(N: int, y_m: int, tables: SieveTables) -> SetResonator:
    """Deterministic set construction.

    Doubling search from T = N for the first dyadic window [T, 2T) holding at
    least N squarefree y_m-smooth integers (m = 1 excluded); within the window
    prefer many prime factors, then smaller values.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if y_m < 2:
        raise DomainError(f"y_m must be >= 2, got {y_m}")
    primes = [int(p) for p in tables.primes[tables.primes <= y_m]]
    if not primes:
        raise DomainError(f"no primes <= y_m={y_m} in the sieve")
    npr = len(primes)
    if npr <= 40 and (1 << npr) - 1 < N:
        raise ResourceLimitError(
            f"only 2**{npr} - 1 = {(1 << npr) - 1} squarefree {y_m}-smooth integers"
            f" exist in total, fewer than N={N}; increase y_m"
        )
    max_elem = math.inf
    if npr <= 40:
        max_elem = math.prod(primes)

    t = N
    while True:
        if t > max_elem:
            raise ResourceLimitError(
                f"no dyadic window [T, 2T) with T >= {N} holds {N} squarefree "
                f"{y_m}-smooth integers (largest candidate is {max_elem}); increase y_m"
            )
        if 2 * t - 1 > tables.limit:
            raise ResourceLimitError(
                f"window [{t}, {2 * t}) exceeds the sieve limit {tables.limit}; "
                "increase y_m or the sieve"
            )
        vals, nfac = _window_candidates(t, 2 * t, primes)
        if len(vals) >= N:
            order = np.lexsort((vals, -nfac))  # factors desc, then value asc
            chosen = np.sort(vals[order[:N]])
            res = SetResonator(ms=chosen, y_m=y_m, window_start=t)
            validate_set_resonator(res, tables)
            return res
        t *= 2


# --- Gal sums ----------------------------------------------------------------

def _resonator_elements(M) -> np.ndarray:
    if isinstance(M, SetResonator):
        return M.ms
    return np.asarray(M, dtype=np.int64)


def _gcd_sum_split(ms: np.ndarray, thr2: float, workers: int, cfg: LabConfig):
    n = len(ms)
    if n < 1:
        raise DomainError("empty resonator set")
    rs = 1.0 / np.sqrt(ms.astype(np.float64))
    rows = list(range(0, n, cfg.gcd_row_chunk))
    jobs = [(i, min(i + cfg.gcd_row_chunk, n)) for i in rows]

    def run(job):
        return kernels.gcd_chunk(ms, rs, job[0], job[1], thr2)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    head = 0.0
    tail = 0.0
    for h, t in parts:  # fixed chunk order: totals do not depend on workers
        head += h
        tail += t
    return head, tail


def gcd_sum(M, workers: int = 1, config: LabConfig | None = None) -> float:
    """Sum over ordered pairs (m, n) of sqrt(gcd(m,n)/lcm(m,n))."""
    cfg = config or DEFAULT_CONFIG
    head, tail = _gcd_sum_split(_resonator_elements(M), math.inf, workers, cfg)
    return head + tail


def gcd_sum_split(M, x: float, workers: int = 1,
                  config: LabConfig | None = None) -> tuple[float, float]:
    """(head, tail): pairs with lcm/gcd <= x**2/2 versus the rest."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    cfg = config or DEFAULT_CONFIG
    return _gcd_sum_split(_resonator_elements(M), float(x) * float(x), workers, cfg)


# --- equal-product mass of a weighted resonator ------------------------------

def equal_product_mass_ratio(r: WeightedResonator, N: int, Y: int) -> float:
    """Exact value of  sum_{k,l<=N} sum_{m,n<=Y, mk=nl} r(m) r(n) / sum_{n<=Y} r(n)**2.

    Quadruples are grouped by the common product v = mk = nl, so the
    numerator is sum_v A(v)**2 with A(v) = sum over support m <= Y, m | v,
    v/m <= N of r(m).
    """
    if N < 1 or Y < 1:
        raise DomainError("N and Y must be >= 1")
    mask = r.ns <= Y
    ns = r.ns[mask]
    rs = r.rs[mask]
    if len(ns) == 0:
        raise DomainError(f"resonator has no support <= Y={Y}")
    if int(ns[-1]) * N >= 2 ** 63:
        raise DomainError("product m*k would overflow 64 bits")
    acc: dict[int, float] = defaultdict(float)
    for m, rm in zip(ns, rs):
        m = int(m)
        rm = float(rm)
        for k in range(1, N + 1):
            acc[m * k] += rm
    numerator = sum(a * a for a in acc.values())
    denominator = float(np.dot(rs, rs))
    return numerator / denominator


def equal_product_mass_reference(y: float, N: int) -> float:
    """Reference curve N * exp(2 sqrt(log y / log log y)) (asymptotic o(1) set to 0)."""
    if not y > _E_E:
        raise DomainError(f"y must exceed e**e, got {y}")
    return N * math.exp(2.0 * math.sqrt(math.log(y) / math.log(math.log(y))))


# --- text serialization -------------------------------------------------------

def save_resonator(res, path: str) -> None:
    """Header line `weighted` or `set`, then one element per line."""
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(res, WeightedResonator):
            fh.write("weighted\n")
            for n, r in zip(res.ns, res.rs):
                fh.write(f"{int(n)} {float(r)!r}\n")
        elif isinstance(res, SetResonator):
            fh.write("set\n")
            for m in res.ms:
                fh.write(f"{int(m)}\n")
        else:
            raise DomainError(f"cannot serialize {type(res).__name__}")


def load_resonator(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        kind = fh.readline().strip()
        lines = [ln.strip() for ln in fh if ln.strip()]
    if kind == "weighted":
        ns = np.array([int(ln.split()[0]) for ln in lines], dtype=np.int64)
        rs = np.array([float(ln.split()[1]) for ln in lines], dtype=np.float64)
        return WeightedResonator(ns=ns, rs=rs)
    if kind == "set":
        ms = np.array([int(ln) for ln in lines], dtype=np.int64)
        y_m = 1
        for m in ms:
            m = int(m)
            p = 2
            big = 1
            while p * p <= m:
                while m % p == 0:
                    big = p
                    m //= p
                p += 1
            if m > 1:
                big = m
            y_m = max(y_m, big)
        return SetResonator(ms=ms, y_m=max(y_m, 2))
    raise DomainError(f"unknown resonator header {kind!r} in {path}")

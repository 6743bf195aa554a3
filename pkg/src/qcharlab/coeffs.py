"""Completely multiplicative unimodular coefficient functions.

A function is determined by its values at primes; every prime value is
renormalized to exact unit modulus on construction so that range evaluation
(one multiplication per prime-power step) cannot drift.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .arith import SieveTables
from .errors import DomainError

_UNIT_TOL = 1e-12


def _renormalize(p: int, v: complex) -> complex:
    r = abs(v)
    if abs(r - 1.0) > _UNIT_TOL:
        raise DomainError(f"|f({p})| = {r!r} is not within {_UNIT_TOL} of 1")
    return v / r


@dataclass(frozen=True)
class CoefficientFunction:
    """Completely multiplicative f with |f(p)| = 1, given by a prime rule."""

    name: str
    prime_rule: Callable[[int], complex]

    def at_prime(self, p: int) -> complex:
        return _renormalize(p, complex(self.prime_rule(p)))


@dataclass(frozen=True)
class PairCosineReport:
    """Result of checking Re f(n) conj(f(m)) >= 0 over 1 <= m, n <= checked_limit."""

    checked_limit: int
    passes: bool
    witness: tuple[int, int] | None
    min_pair_cos: float


def builtin(name: str, param=None) -> CoefficientFunction:
    """Named coefficient functions.

    constant_one        f(p) = 1
    liouville           f(p) = -1
    fixed_angle(theta)  f(p) = exp(i*theta)
    archimedean(alpha)  f(p) = p**(i*alpha)
    prime_table(path)   explicit angles from a file of `p theta` lines
    """
    if name == "constant_one":
        return CoefficientFunction("constant_one", lambda p: 1.0 + 0.0j)
    if name == "liouville":
        return CoefficientFunction("liouville", lambda p: -1.0 + 0.0j)
    if name == "fixed_angle":
        if param is None:
            raise DomainError("fixed_angle requires an angle parameter")
        theta = float(param)
        value = cmath.exp(1j * theta)
        return CoefficientFunction(f"fixed_angle({theta:g})", lambda p: value)
    if name == "archimedean":
        if param is None:
            raise DomainError("archimedean requires an exponent parameter")
        alpha = float(param)
        return CoefficientFunction(
            f"archimedean({alpha:g})",
            lambda p: cmath.exp(1j * alpha * math.log(p)),
        )
    if name == "prime_table":
        if param is None:
            raise DomainError("prime_table requires a file path")
        return _from_prime_table(str(param))
    raise DomainError(f"unknown coefficient function {name!r}")


BUILTIN_NAMES = ("constant_one", "liouville", "fixed_angle", "archimedean", "prime_table")


def _from_prime_table(path: str) -> CoefficientFunction:
    """Parse `p theta` lines (angle in radians); `#` starts a comment."""
    table: dict[int, complex] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected 'p theta', got {raw!r}")
            p, theta = int(parts[0]), float(parts[1])
            table[p] = cmath.exp(1j * theta)

    def rule(p: int) -> complex:
        try:
            return table[p]
        except KeyError:
            raise DomainError(f"prime table {path!r} has no entry for prime {p}") from None

    return CoefficientFunction(f"prime_table({path})", rule)


def eval_range(f: CoefficientFunction, x: int, tables: SieveTables) -> np.ndarray:
    """f(n) for n = 0..x as complex128 (index 0 set to 0, f(1) = 1).

    Values are built multiplicatively: for every prime power p^k <= x the
    slice of multiples of p^k picks up one factor f(p), so f(n) accumulates
    exactly Omega(n) multiplications of renormalized prime values.
    """
    x = int(x)
    if x < 1 or x > tables.limit:
        raise DomainError(f"x={x} outside table range [1, {tables.limit}]")
    out = np.ones(x + 1, dtype=np.complex128)
    out[0] = 0.0
    for p in tables.primes[tables.primes <= x]:
        p = int(p)
        fp = f.at_prime(p)
        if fp == 1.0:
            continue
        pk = p
        while pk <= x:
            out[pk::pk] *= fp
            pk *= p
    return out


def check_pair_cosines(f: CoefficientFunction, L: int, tables: SieveTables) -> PairCosineReport:
    """Check min over 1 <= m, n <= L of Re f(n) conj(f(m)) >= -1e-12.

    Since all values are unimodular this is a statement about arguments: the
    minimum pairwise cosine is cos of the largest pairwise circular distance,
    found from the sorted angles in O(L log L) (passing is equivalent to all
    values fitting in a closed arc of length pi/2).
    """
    vals = eval_range(f, L, tables)[1:]
    angles = np.mod(np.angle(vals), 2.0 * math.pi)
    order = np.argsort(angles, kind="stable")
    phi = angles[order]
    n = len(phi)
    if n == 1:
        return PairCosineReport(L, True, None, 1.0)

    # farthest-point search: for each angle, the antipode's neighbours in the
    # sorted order are the only candidates for the maximal circular distance
    targets = np.mod(phi + math.pi, 2.0 * math.pi)
    pos = np.searchsorted(phi, targets)
    best_dist = 0.0
    best_pair = (0, 0)
    for cand in (pos - 1, pos % n):
        cand = cand % n
        delta = np.abs(phi[cand] - phi)
        dist = np.minimum(delta, 2.0 * math.pi - delta)
        j = int(np.argmax(dist))
        if dist[j] > best_dist:
            best_dist = float(dist[j])
            best_pair = (j, int(cand[j]))
    min_cos = math.cos(best_dist)
    passes = min_cos >= -1e-12
    witness = None
    if not passes:
        a, b = int(order[best_pair[0]]) + 1, int(order[best_pair[1]]) + 1
        witness = (min(a, b), max(a, b))
    return PairCosineReport(L, passes, witness, min_cos)

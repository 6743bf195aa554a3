"""Global configuration: plain `key = value` files plus per-run overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass
class LabConfig:
    sieve_limit: int = 1_000_000       # default table size for build_sieve
    scan_bound: int = 1_000_000_000    # cap on |d| in discriminant scans
    workers: int = 1                   # worker threads for data-parallel scans
    max_bt_n: int = 65536              # cap on the set-resonator cardinality N
    ym_exponent: float = 1.3           # default smoothness bound exponent: ceil((log N)**e)
    epsilon: float = 0.1               # default epsilon for error envelopes / range flags
    alpha: float = 0.1                 # default alpha for weighted-resonator parameters
    kappa: float = 0.1                 # default kappa for set-resonator experiments
    block_size: int = 1 << 20          # magnitudes per enumeration block
    chunk_size: int = 8192             # discriminants per worker task (fixed: keeps reductions
                                       # independent of the worker count)
    gcd_row_chunk: int = 256           # rows per gcd-sum task (fixed, same reason)
    max_sieve_bytes: int = 2_000_000_000

    def replace(self, **kw) -> "LabConfig":
        return dataclasses.replace(self, **kw)


DEFAULT_CONFIG = LabConfig()

_INT_KEYS = {
    "sieve_limit", "scan_bound", "workers", "max_bt_n", "block_size",
    "chunk_size", "gcd_row_chunk", "max_sieve_bytes",
}
_FLOAT_KEYS = {"ym_exponent", "epsilon", "alpha", "kappa"}


def load_config(path: str, base: LabConfig | None = None) -> LabConfig:
    """Parse a `key = value` config file; `#` starts a comment."""
    cfg = base if base is not None else LabConfig()
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return cfg.replace(**values)

"""Search caps and backend selection.

Every cap has a default, can be overridden through an environment variable
``SIDECODE_CAP_<NAME>`` (e.g. ``SIDECODE_CAP_EXACT_COLORING=18``) or at run
time with :func:`set_caps`, and is clamped to a hard safety maximum.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass, fields, replace


class CapExceeded(RuntimeError):
    """A requested computation is larger than the configured cap."""


@dataclass(frozen=True)
class Caps:
    exact_coloring: int = 16  # min-entropy coloring branch and bound
    exact_chromatic: int = 64  # chromatic / clique number (bitset kernels)
    perfect: int = 12  # exhaustive induced-subgraph perfection test
    independent_sets: int = 24  # maximal independent set enumeration
    power_vertices: int = 100_000  # vertices of AND/OR powers and block graphs
    edges: int = 20_000_000  # stored (directed) adjacency entries
    block_cells: int = 4_000_000  # entries of an i.i.d. block pmf table
    deterministic_channels: int = 1_000_000  # exhaustive channel enumeration
    iterations: int = 10_000  # alternating minimization iterations


HARD_MAXIMA = Caps(
    exact_coloring=40,
    exact_chromatic=64,
    perfect=18,
    independent_sets=64,
    power_vertices=2_000_000,
    edges=400_000_000,
    block_cells=100_000_000,
    deterministic_channels=50_000_000,
    iterations=10_000_000,
)


def _clamp(caps: Caps) -> Caps:
    values = {}
    for f in fields(Caps):
        v = int(getattr(caps, f.name))
        if v < 1:
            raise ValueError(f"cap {f.name} must be positive, got {v}")
        values[f.name] = min(v, getattr(HARD_MAXIMA, f.name))
    return Caps(**values)


def _from_env() -> Caps:
    values = {}
    for f in fields(Caps):
        raw = os.environ.get(f"SIDECODE_CAP_{f.name.upper()}")
        if raw is not None:
            values[f.name] = int(raw)
    return _clamp(Caps(**values))


_caps = _from_env()


def get_caps() -> Caps:
    return _caps


def set_caps(**overrides: int) -> Caps:
    """Replace selected caps; returns the previous settings."""
    global _caps
    unknown = set(overrides) - {f.name for f in fields(Caps)}
    if unknown:
        raise ValueError(f"unknown cap(s): {', '.join(sorted(unknown))}")
    previous = _caps
    _caps = _clamp(replace(_caps, **overrides))
    return previous


@contextlib.contextmanager
def caps_override(**overrides: int):
    global _caps
    previous = set_caps(**overrides)
    try:
        yield _caps
    finally:
        _caps = previous


def check_cap(name: str, value: int, what: str = "") -> None:
    limit = getattr(_caps, name)
    if value > limit:
        label = what or name
        raise CapExceeded(f"{label}: {value} exceeds cap {name}={limit}")


def jit_enabled() -> bool:
    """Numba kernels are used unless ``SIDECODE_DISABLE_JIT`` is set truthy."""
    flag = os.environ.get("SIDECODE_DISABLE_JIT", "").strip().lower()
    return flag in ("", "0", "false", "no")

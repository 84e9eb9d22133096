"""Backend selection for the hot loops.

The numba kernels are used by default.  Setting ``SIDECODE_DISABLE_JIT=1``
before import selects the numpy fallbacks (also used automatically when
numba cannot be imported).  Both modules expose identical signatures.
"""

from __future__ import annotations

from types import ModuleType

from . import _kernels_np
from ._config import jit_enabled


def _load() -> tuple[ModuleType, str]:
    if jit_enabled():
        try:
            from . import _kernels_nb
        except ImportError:  # pragma: no cover - numba is a hard dependency
            return _kernels_np, "numpy"
        return _kernels_nb, "numba"
    return _kernels_np, "numpy"


backend, BACKEND = _load()

_NAMES = (
    "and_power_csr",
    "or_power_csr",
    "block_graph_csr",
    "graph_entropy_am",
    "ri_objective",
    "ri_subgradient",
    "deterministic_search",
    "clique_number_bits",
    "k_colorable_bits",
    "chromatic_number_bits",
    "imperfect_subset_bits",
    "min_entropy_coloring_bits",
    "typical_log2_count",
)

and_power_csr = backend.and_power_csr
or_power_csr = backend.or_power_csr
block_graph_csr = backend.block_graph_csr
graph_entropy_am = backend.graph_entropy_am
ri_objective = backend.ri_objective
ri_subgradient = backend.ri_subgradient
deterministic_search = backend.deterministic_search
clique_number_bits = backend.clique_number_bits
k_colorable_bits = backend.k_colorable_bits
chromatic_number_bits = backend.chromatic_number_bits
imperfect_subset_bits = backend.imperfect_subset_bits
min_entropy_coloring_bits = backend.min_entropy_coloring_bits
typical_log2_count = backend.typical_log2_count


def implementations() -> dict[str, ModuleType]:
    """Both backends keyed by name (numba only when importable)."""
    out = {"numpy": _kernels_np}
    try:
        from . import _kernels_nb

        out["numba"] = _kernels_nb
    except ImportError:  # pragma: no cover
        pass
    return out

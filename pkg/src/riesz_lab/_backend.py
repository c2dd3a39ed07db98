"""Backend selection for the hot kernels.

Prefers the compiled extension; falls back to the NumPy lane when the
extension is missing or RIESZ_LAB_PURE=1 is set.  Both lanes share one
contract (see _purepy), so everything above this module is lane-agnostic.
"""

import os

if os.environ.get("RIESZ_LAB_PURE") == "1":
    from . import _purepy as _impl
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _purepy as _impl
        BACKEND = "pure"

pair_energy = _impl.pair_energy
pair_gradient = _impl.pair_gradient
total_energy = _impl.total_energy
total_gradient = _impl.total_gradient
mh_block = _impl.mh_block

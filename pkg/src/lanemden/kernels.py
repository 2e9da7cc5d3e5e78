"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy/SciPy
fallback is used. Set ``LANEMDEN_KERNELS=python`` to force the fallback.
"""
import os

from . import _kernels_py

_impl = _kernels_py
if os.environ.get("LANEMDEN_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
laplacian_5pt = _impl.laplacian_5pt
pcg_5pt = _impl.pcg_5pt
tridiag_solve = _impl.tridiag_solve


def column_power_sums(X, q, w):
    # NumPy's vectorized power beats a scalar pow loop; the compiled loop wins only for q in {1, 2}
    if q == 1.0 or q == 2.0:
        return _impl.column_power_sums(X, q, w)
    return _kernels_py.column_power_sums(X, q, w)


__all__ = [
    "BACKEND",
    "laplacian_5pt",
    "pcg_5pt",
    "tridiag_solve",
    "column_power_sums",
]

"""Backend selection for the hot kernels.

The compiled ``_ckernels`` module is used when it imports; setting
``ROBUST_RESERVE_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _pykernels

if os.environ.get("ROBUST_RESERVE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

bisect_inverse = _impl.bisect_inverse
spa_revenue = _impl.spa_revenue
nature_chain = _impl.nature_chain
seller_chain = _impl.seller_chain

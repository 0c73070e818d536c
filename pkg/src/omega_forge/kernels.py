"""Backend selection for the hot word kernels.

The compiled extension is used when present; OMEGA_FORGE_PURE=1 forces
the pure-Python twin.  Both expose the same functions, so callers import
from here only.
"""

from __future__ import annotations

import os

from . import _kernels_py as _py

if os.environ.get("OMEGA_FORGE_PURE"):
    _impl = _py
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore

        BACKEND = "cython"
    except ImportError:
        _impl = _py
        BACKEND = "python"

t_member = _impl.t_member
erase = _impl.erase
e_member_primary = _impl.e_member_primary
e_member_counting = _impl.e_member_counting
a2_member = _impl.a2_member
sweep_morphism = _impl.sweep_morphism
sweep_e_equiv = _impl.sweep_e_equiv
sweep_oca = _impl.sweep_oca
run_oca = _impl.run_oca

pure = _py

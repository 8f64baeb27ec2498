"""Batch numeric kernels, compiled when available.

``BACKEND`` is ``"cython"`` when the extension module imports and
``"python"`` otherwise.  Setting ``CANEXT_PURE_PYTHON=1`` forces the fallback.
"""

import os
from typing import Sequence

import numpy as np

from . import _fallback

if os.environ.get("CANEXT_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

__all__ = ["BACKEND", "PackedPolys", "backends", "twisted_residuals"]


def backends():
    """Available kernel implementations by name."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out


def _resolve(impl):
    """Accept ``None``, a backend name or a backend module."""
    if impl is None:
        return _impl
    if isinstance(impl, str):
        table = backends()
        if impl not in table:
            raise ValueError(f"kernel backend {impl!r} is not available")
        return table[impl]
    return impl


class PackedPolys:
    """A list of polynomials over the same variables packed for batch evaluation."""

    def __init__(self, polys: Sequence, nvars: int):
        exps, coeffs, offsets = [], [], [0]
        for p in polys:
            if p.variables and len(p.variables) != nvars:
                raise ValueError("polynomials must share the variable count")
            for e, c in p.terms.items():
                exps.append(e)
                coeffs.append(complex(float(c)))
            offsets.append(len(coeffs))
        self.nvars = nvars
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), nvars)
        self.coeffs = np.array(coeffs, dtype=np.complex128)
        self.offsets = np.array(offsets, dtype=np.int64)

    def __len__(self):
        return len(self.offsets) - 1

    def __call__(self, points, impl=None):
        impl = _resolve(impl)
        pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.complex128)))
        if pts.shape[1] != self.nvars:
            raise ValueError("points have the wrong dimension")
        return impl.eval_packed(self.exps, self.coeffs, self.offsets, pts)


def twisted_residuals(beta_plus, beta_minus, lam_plus, lam_minus, t, impl=None):
    """Scaled residuals ``(a - b) / max(1, |a|, |b|)`` of twisted binomials.

    ``a = t^beta_plus exp(-2 pi i lam_plus)`` and likewise ``b``; the scaling
    keeps the check meaningful when both terms are large.
    """
    impl = _resolve(impl)
    c = np.ascontiguousarray
    return impl.twisted_residuals(
        c(np.asarray(beta_plus, dtype=np.int64)),
        c(np.asarray(beta_minus, dtype=np.int64)),
        c(np.asarray(lam_plus, dtype=np.complex128)),
        c(np.asarray(lam_minus, dtype=np.complex128)),
        c(np.atleast_2d(np.asarray(t, dtype=np.complex128))),
    )

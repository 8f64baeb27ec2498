"""Pure-Python (numpy) versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def _powers(base, exps):
    # 0**0 must be 1, which numpy gives for complex integer powers
    return np.power(base[:, None, :], exps[None, :, :])


def eval_packed(exps, coeffs, offsets, points):
    points = np.asarray(points, dtype=np.complex128)
    npoly = len(offsets) - 1
    out = np.zeros((points.shape[0], npoly), dtype=np.complex128)
    if len(coeffs) == 0:
        return out
    terms = _powers(points, exps).prod(axis=2) * coeffs[None, :]
    for q in range(npoly):
        lo, hi = offsets[q], offsets[q + 1]
        if hi > lo:
            out[:, q] = terms[:, lo:hi].sum(axis=1)
    return out


def twisted_residuals(beta_plus, beta_minus, lam_plus, lam_minus, t):
    t = np.asarray(t, dtype=np.complex128)
    if beta_plus.shape[0] == 0:
        return np.zeros((t.shape[0], 0), dtype=np.complex128)
    twist = -2j * np.pi
    a = _powers(t, beta_plus).prod(axis=2) * np.exp(twist * lam_plus)
    c = _powers(t, beta_minus).prod(axis=2) * np.exp(twist * lam_minus)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(c)))
    return (a - c) / scale

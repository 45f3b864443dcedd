"""Batched finite-difference stencils.

A derivative is a linear functional ``sum_k w_k f(z + o_k * h)`` with integer
offset vectors ``o_k``.  Functionals are merged so that a whole family of
partial derivatives costs one vectorised call of ``f`` on the union of the
offsets.
"""

from __future__ import annotations

import itertools

import numpy as np

# fourth-order central stencils
_D1 = {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}
_D2 = {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12}
# second-order central stencils (for Richardson comparisons)
_D1_LOW = {-1: -0.5, 1: 0.5}
_D2_LOW = {-1: 1.0, 0: -2.0, 1: 1.0}


def partial(axes, dim, order=4):
    """Stencil for the partial derivative along ``axes`` (length 1 or 2).

    Returns ``{offset_tuple: weight}``; weights exclude the step scaling,
    which is applied by :func:`apply`.
    """
    d1, d2 = (_D1, _D2) if order == 4 else (_D1_LOW, _D2_LOW)
    if len(axes) == 1:
        stencils = [(axes[0], d1)]
    elif axes[0] == axes[1]:
        stencils = [(axes[0], d2)]
    else:
        stencils = [(axes[0], d1), (axes[1], d1)]
    out = {}
    for combo in itertools.product(*(s.items() for _, s in stencils)):
        off = [0] * dim
        w = 1.0
        for (axis, _), (k, wk) in zip(stencils, combo):
            off[axis] += k
            w *= wk
        out[tuple(off)] = out.get(tuple(off), 0.0) + w
    return out


def apply(f, z, h, stencils):
    """Evaluate several stencils of ``f`` at the points ``z``.

    Parameters
    ----------
    f : callable
        Maps an array ``(..., dim)`` to ``(...)`` or ``(..., m)``.
    z : ndarray, shape ``(n, dim)``
    h : ndarray, shape ``(n, dim)``
        Step per point and axis.
    stencils : dict
        ``name -> (axes, stencil)``.

    Returns
    -------
    dict
        ``name -> derivative`` with shape ``(n,)`` or ``(n, m)``.
    """
    offsets = sorted({o for _, st in stencils.values() for o in st})
    index = {o: k for k, o in enumerate(offsets)}
    O = np.array(offsets, dtype=float)  # (S, dim)
    pts = z[:, None, :] + O[None, :, :] * h[:, None, :]
    vals = f(pts)  # (n, S) or (n, S, m)
    out = {}
    for name, (axes, st) in stencils.items():
        acc = 0.0
        for o, w in st.items():
            acc = acc + w * vals[:, index[o]]
        scale = np.prod([h[:, a] for a in axes], axis=0) if axes else np.ones(len(z))
        if vals.ndim == 3:
            scale = scale[:, None]
        out[name] = acc / scale
    return out

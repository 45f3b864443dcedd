"""
Quartics by radicals
====================

Depress, build the resolvent cubic, solve it by Cardano, and assemble the
four roots from three square roots.
"""

import numpy as np

from zollfinsler.polyroots import (
    backward_error,
    combine_conjugate_sqrts,
    depress_quartic,
    solve_quartic,
    solve_resolvent,
)

# %% One quartic step by step: (F - 1)(F - 2)(F - 3)(F - 4)
coeffs = (1.0, -10.0, 35.0, -50.0, 24.0)
dq = depress_quartic(*coeffs)
print(f"shift {dq.shift}, alpha {dq.alpha}, beta {dq.beta}, gamma {dq.gamma}")
sol = solve_resolvent(dq.alpha, dq.beta, dq.gamma)
print("resolvent roots:", sol.roots)
print("roots:", np.sort_complex(solve_quartic(*coeffs)))

# %% Casus irreducibilis and complex pairs
print("roots of F^4 - 1:", np.sort_complex(solve_quartic(1, 0, 0, 0, -1)))

# sqrt(z) + sqrt(conj z) is real; computed without complex arithmetic
print("sqrt(3+4i) + sqrt(3-4i) =", combine_conjugate_sqrts(3.0, 4.0))

# %% Vectorised, with the backward error as the quality measure
rng = np.random.default_rng(1)
c = rng.uniform(-1e3, 1e3, (5, 100_000))
X = solve_quartic(*c)
err = backward_error(tuple(c), X)
print(f"100000 random quartics: worst backward error {err.max():.2e}")

# Roots spread over many orders of magnitude are recovered too
c = (1.0, 1e6, 1.0, 1e-6, 1e-12)
X = solve_quartic(*c)
print("multi-scale roots:", X, "backward error", backward_error(c, X).max())

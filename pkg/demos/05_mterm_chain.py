#!/usr/bin/env python3
"""Best m-term thresholding and the multiplier smoothing chain.

In an orthonormal system the best m-term approximation keeps the m largest
coefficients.  A taper-multiplier operator (identity through n_k, zero past
A2*n_k) lets block-restricted thresholding be controlled by the full-system
quantities; the chain is checked exactly on random coefficient sets.
"""

import numpy as np

from widthlab import VPOperator, best_m_term, best_tail, check_sigma_chain, vp_apply

rng = np.random.default_rng(5)

f = rng.normal(size=12) * np.exp(-0.4 * np.arange(12))
print("coefficients:", np.round(f, 3))
for m in (0, 2, 4):
    print(f"  m={m}: tail error {best_tail(f, m):.4f}  "
          f"m-term error {best_m_term(f, m):.4f}")

V = VPOperator(n_k=4, A2=2.0)
print("\nmultipliers:", np.round(V.multipliers(12), 3))
g = vp_apply(V, f)
print("smoothed:   ", np.round(g, 3))
print(f"smoothing error {np.linalg.norm(f - g):.4f} <= "
      f"(1+A3)*tail(n_k) = {2 * best_tail(f, V.n_k):.4f}")

members = rng.normal(size=(5, 64))
v = check_sigma_chain(members, VPOperator(n_k=8, A2=2.0), m=4)
print(f"\nchain check on 5 random members: {v.status}")
print(" ", v.details)

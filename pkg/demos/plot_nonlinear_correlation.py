"""
Why a squared-series correlation is worth computing
====================================================

A parameter that matters symmetrically (energy grows whichever way it
moves from the middle) can look unrelated under the linear measure.
"""

import numpy as np

from wsnsens import corr_p_value, linear_corr, order_m_corr

rng = np.random.default_rng(0)
half = rng.uniform(-1, 1, 100)
x = np.concatenate([half, -half])
energy = x**2 + 0.05 * rng.normal(size=x.size)

r1 = linear_corr(x, energy)
r2 = order_m_corr(x, energy, 2)
print(f"linear   r = {r1:+.3f}   p = {corr_p_value(r1, x.size):.3f}")
print(f"order-2  r = {r2:+.3f}")

# Correlation ignores shifts of x, so what matters is the range. Over a
# one-sided range the same square law is monotone and the linear measure
# sees it plainly.
one_sided = np.abs(x)
print(f"one-sided: linear r = {linear_corr(one_sided, one_sided**2):+.3f}")

"""Discrete measures, ball queries, blow-ups, and the two local distances.

Walks through the core objects: build a weighted point cloud, query open
balls, normalize a blow-up, and evaluate the plain and smoothed transport
distances with their dual witnesses.
"""

import numpy as np

import tangentia as tg

# A four-point measure on the corners of a square, plus a heavier center.
pts = np.array([[0.5, 0.5], [0.5, -0.5], [-0.5, 0.5], [-0.5, -0.5], [0.0, 0.0]])
mu = tg.DiscreteMeasure(pts, [0.15, 0.15, 0.15, 0.15, 0.4])
print("measure:", mu)
print("mass of B(0, 0.8):", tg.ball_mass(mu, tg.BallQuery([0.0, 0.0], 0.8)))

# Blow-ups normalize a ball to the unit ball with unit mass.
blow = tg.blowup(mu, tg.BallQuery([0.0, 0.0], 0.75))
print("blow-up mass on B(0,1):", tg.ball_mass(blow, tg.BallQuery([0.0, 0.0], 1.0)))

# The plain distance between two Diracs is their separation.
d0 = tg.DiscreteMeasure(np.zeros((1, 2)), [1.0])
dp = tg.DiscreteMeasure(np.array([[0.3, 0.0]]), [1.0])
val, dual = tg.w1(d0, dp)
print(f"w1(delta_0, delta_p) = {val:.6f} (|p| = 0.3)")
lip_gap, bnd_gap = dual.feasibility_gap()
print(f"dual witness feasible: lipschitz gap {lip_gap:.1e}, boundary gap {bnd_gap:.1e}")

# The smoothed distance needs no normalization and is scale invariant.
phi = tg.default_bump()
a = tg.w_phi(d0, dp, phi)
b = tg.w_phi(
    tg.DiscreteMeasure(d0.points, [3.0]), tg.DiscreteMeasure(dp.points, [5.0]), phi
)
print(f"w_phi = {a:.6f}; after rescaling weights x3, x5: {b:.6f}")

# Doubling diagnostics on a sampled line: ratio of ball masses ~ 2.
line = tg.flat_measure(1, np.eye(2)[:, :1], np.zeros(2), half_extent=2.0, spacing=0.01)
c = tg.doubling_constant(line, [np.zeros(2)], [0.2, 0.4])
print(f"doubling constant of a line sample: {c:.3f}")

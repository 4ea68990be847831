"""
Hard thresholding with the pinball loss
=======================================

A K-sparse unit vector is measured by signs of Gaussian projections and a
tenth of the signs are flipped.  BIHT (hinge loss, zero margin) and PIHT
(pinball slope -0.2, margin 1) run on the same problem.
"""
import numpy as np

from bitpin import PihtConfig, PinballParams, biht_config, make_problem, piht_solve
from bitpin.sensing import recovery_error

problem = make_problem(n=1000, m=500, K=10, flip_ratio=0.1, seed=1)
print(f"{problem.flipped.size} of {problem.m} signs flipped")

biht = piht_solve(problem.data, biht_config(K=10))
piht = piht_solve(problem.data, PihtConfig(K=10, params=PinballParams(tau=-0.2, c=1.0)))

for name, res in (("BIHT", biht), ("PIHT", piht)):
    hits = np.intersect1d(np.flatnonzero(res.x), problem.signal.support).size
    print(f"{name}: error {recovery_error(res.x, problem.signal):.3f}, "
          f"support hits {hits}/10")

# iterates are only normalised at the end; their norm grows, so with tau < 0
# the unnormalised objective keeps falling
trace = piht.objective_trace
print("PIHT objective at steps 0, 10, 100, 499:",
      " ".join(f"{trace[i]:.4f}" for i in (0, 10, 100, 499)))

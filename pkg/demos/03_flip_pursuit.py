"""
Outlier pursuit: guessing which signs were flipped
==================================================

AOP alternates PIHT steps with a flip guess: the L measurements that
disagree most with the current estimate are treated as flipped.
"""
import numpy as np

from bitpin import AopConfig, PihtConfig, PinballParams, aop_solve, make_problem, piht_solve
from bitpin.sensing import recovery_error

problem = make_problem(n=1000, m=800, K=15, flip_ratio=0.1, seed=5)
L = problem.flipped.size
inner = PihtConfig(K=15, l_max=1, params=PinballParams(tau=-0.2, c=1.0))

aop = aop_solve(problem.data, AopConfig(L=L, inner=inner, tau0=-0.2))
plain = piht_solve(problem.data, PihtConfig(K=15, params=PinballParams(-0.2, 1.0)))

caught = np.intersect1d(aop.flips, problem.flipped).size
print(f"flags {L} measurements, {caught} of them truly flipped")
print(f"AOP-PIHT error {recovery_error(aop.x, problem.signal):.3f} "
      f"after {aop.iterations} PIHT steps")
print(f"PIHT error     {recovery_error(plain.x, problem.signal):.3f}")

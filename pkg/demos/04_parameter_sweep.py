"""
A small seeded sweep
====================

Experiments are plain dicts.  List-valued fields become grid axes, and
every trial draws its own problem from a hashed seed, so reruns and
parallel runs give the same numbers.  The named presets behind the
``bitpin run`` command use the same machinery at full size.
"""
import sys

from bitpin import emit_results, run_experiment

config = dict(n=500, K=10, r_f=0.1, trials=10, base_seed=0, c=1.0,
              m=[200, 400], solver=["passive", {"solver": "epsvm", "tau": -0.5}])
result = run_experiment(config)

for row in result.aggregate():
    print(f"{row['solver']:>8} m={row['m']:<4} mean {row['mean_error']:.3f} "
          f"std {row['std_error']:.3f} ({row['mean_time_ms']:.1f} ms)")

out = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
emit_results(result, out, timing=False)
print(f"wrote {out}")

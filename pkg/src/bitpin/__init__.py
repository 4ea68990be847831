"""Pinball-loss recovery for one-bit compressive sensing.

Two recovery methods sit on top of a shared loss kernel:

* :func:`piht_solve`: iterative hard thresholding on the pinball loss
  (BIHT when ``tau = c = 0``), plus the :func:`aop_solve` flip-detection
  wrapper.
* :func:`epsvm_solve`: dual coordinate ascent for the l1-regularised
  pinball model on the unit ball, with the closed-form
  :func:`passive_closed_form` at ``tau = -1``.
"""
from .aop import AopConfig, aop_solve
from .epsvm import (
    DualState,
    EpsvmConfig,
    EpsvmResult,
    beta_update,
    check_optimality,
    default_mu,
    epsvm_solve,
    hypercube_separation,
    passive_closed_form,
    xi_step,
)
from .harness import ExperimentConfig, emit_results, preset, run_experiment
from .loss import (
    PinballParams,
    ProblemData,
    epsvm_dual_objective,
    epsvm_primal_objective,
    piht_objective,
    piht_subgradient,
    pinball_value,
)
from .piht import PihtConfig, PihtResult, biht_config, hard_threshold, piht_solve
from .sensing import (
    flip_signs,
    generate_measurement_system,
    generate_sparse_signal,
    make_problem,
    quantize,
    recovery_error,
)

__version__ = "0.1.0"

import logging
from typing import Any

from . import (
    admath,  # noqa: F401
    settings,
)
from .AdEnums import CheckpointStrategy, JacobianMode, OpKind, SeedRole  # noqa: F401
from .AdErrors import (  # noqa: F401
    DimensionMismatchError,
    DomainError,
    NonConvergenceError,
    SingularJacobianError,
    TapeMismatchError,
)
from .Checkpoint import CheckpointPlan, CheckpointResult, SegmentedProgram, equispaced_plan, grad_checkpointed  # noqa: F401
from .Dual import Dual, dual_primitive  # noqa: F401
from .ForwardMode import directional_derivative  # noqa: F401
from .HigherOrder import HvpSeed, hessian, hvp, second_order_form  # noqa: F401
from .Jacobian import SeedVector, jacobian_auto, jacobian_forward, jacobian_reverse, select_mode  # noqa: F401
from .LogNormal import log_normal_density, log_normal_graph  # noqa: F401
from .MatExp2x2 import Mat2, matexp_optimized, matexp_sensitivities, matexp_standard  # noqa: F401
from .OpCounter import OpCounter, count_operations  # noqa: F401
from .Primitives import Primitive  # noqa: F401
from .SuperNode import (  # noqa: F401
    AlgebraicProblem,
    SensitivityResult,
    SolverConfig,
    newton_solve,
    solve_and_diff_ift,
    solve_and_diff_naive,
)
from .Tape import Node, Tape  # noqa: F401
from .VarRef import VarRef  # noqa: F401
from .logger import AD_LOGGER_NAME

ad_logger = logging.getLogger(AD_LOGGER_NAME)

_POSITIVE = {"NEWTON_TOL", "NEWTON_MAX_ITER", "PIVOT_RTOL", "DOSE_MASS", "RATE_SEPARATION", "MATEXP_SAMPLES"}


def _validate(key: str, value: Any):
    if key in _POSITIVE and not value > 0:
        raise ValueError(f"{key} must be positive, got {value!r}")
    if key in ("NEWTON_STEP_SIZE", "BENCH_STEP_SIZE") and not 0.0 < value <= 1.0:
        raise ValueError(f"{key} must lie in (0, 1], got {value!r}")
    if key == "DELTA_T" and value < 0.0:
        raise ValueError(f"DELTA_T must be non-negative, got {value!r}")
    if key in ("K_POP", "PHI_BOUNDS"):
        if len(value) != 2 or not all(v > 0 for v in value):
            raise ValueError(f"{key} must be a pair of positive numbers, got {value!r}")
        if key == "PHI_BOUNDS" and value[0] > value[1]:
            raise ValueError(f"PHI_BOUNDS must be ordered, got {value!r}")
    if key == "BENCH_STATES" and (not value or any(n < 2 or n % 2 for n in value)):
        raise ValueError(f"BENCH_STATES must be positive even state counts, got {value!r}")


def configure(**overrides: Any):
    """
    Overrides module defaults in ``settings``, e.g. ``configure(NEWTON_TOL=1e-12, CHECK_TAPE_IDENTITY=False)``.

    Objects created afterwards pick up the new defaults. All overrides are validated before any is applied.

    Raises:
        ValueError: on an unknown setting or an invalid value.
    """
    if settings.IS_CONFIGURED:
        ad_logger.warning("pdxad is already configured. Overriding the previous configuration.")

    for key, value in overrides.items():
        if key == "IS_CONFIGURED" or not key.isupper() or not hasattr(settings, key):
            ad_logger.error("Unknown setting %s", key)
            raise ValueError(f"Unknown setting {key!r}")
        _validate(key, value)

    for key, value in overrides.items():
        if isinstance(getattr(settings, key), tuple):
            value = tuple(value)
        setattr(settings, key, value)
        ad_logger.info("Setting %s = %r", key, value)
    settings.IS_CONFIGURED = True

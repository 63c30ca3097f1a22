IS_CONFIGURED = False

# tape-core
CHECK_TAPE_IDENTITY = True

# supernode-solve
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
NEWTON_STEP_SIZE = 1.0
PIVOT_RTOL = 1e-12

# bench-harness, steady-state instance
K_POP: tuple[float, float] = (1.0, 0.5)
DOSE_MASS = 1000.0
DELTA_T = 1.0
PHI_BOUNDS: tuple[float, float] = (0.7, 1.3)
RATE_SEPARATION = 1e-8

# bench-harness, runs
MATEXP_SAMPLES = 1000
BENCH_STEP_SIZE = 0.5
BENCH_STATES: tuple[int, ...] = (4, 12, 20, 28)

from enum import Enum


class OpKind(Enum):
    INPUT = "input"
    CONSTANT = "constant"
    UNARY = "unary"
    BINARY = "binary"


class JacobianMode(Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


class SeedRole(Enum):
    TANGENT = "tangent"
    COTANGENT = "cotangent"


class CheckpointStrategy(Enum):
    RECOMPUTE_ALL = "recompute_all"
    STORE_ALL = "store_all"
    SNAPSHOTS = "snapshots"


class BenchName(Enum):
    MATEXP = "matexp"
    ALGEBRA = "algebra"


class SolveMethod(Enum):
    NAIVE = "naive"
    IFT_ANALYTIC = "ift_analytic_Jy"
    IFT_AD = "ift_ad_Jy"


class MatExpMethod(Enum):
    STANDARD = "standard"
    OPTIMIZED = "optimized"

"""Homomorphic self-repairing codes over GF(2^m).

Fragments are evaluations of a weakly linearized polynomial at points of a
binary subspace, so a lost fragment can be rebuilt by XORing two others.
"""

from .code import (
    CodeParams,
    Fragment,
    WeaklyLinearizedPoly,
    decode_interpolate,
    decode_linear,
    encode,
    eval_wlpoly,
    join_bytes,
    make_code,
    split_bytes,
    split_object,
)
from .container import FragmentFile
from .errors import (
    CodeError,
    ContainerError,
    CorruptFragments,
    DomainError,
    FieldError,
    HSRCError,
    Irreparable,
    Unrecoverable,
)
from .field import FieldElement, FieldSpec, add, inv, make_field, mul, power, subspace_points
from .repair import PairTable, find_repair_set, pair_table, repair_fragment, repair_missing
from .resilience import count_R, p_obj_ec, p_obj_src, rank_gf2, rho, simulate_p_obj
from .scheduler import (
    ClusterState,
    RepairSchedule,
    Transfer,
    plan_repairs,
    sequential_baselines,
    verify_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterState",
    "CodeError",
    "CodeParams",
    "ContainerError",
    "CorruptFragments",
    "DomainError",
    "FieldElement",
    "FieldError",
    "FieldSpec",
    "Fragment",
    "FragmentFile",
    "HSRCError",
    "Irreparable",
    "PairTable",
    "RepairSchedule",
    "Transfer",
    "Unrecoverable",
    "WeaklyLinearizedPoly",
    "add",
    "count_R",
    "decode_interpolate",
    "decode_linear",
    "encode",
    "eval_wlpoly",
    "find_repair_set",
    "inv",
    "join_bytes",
    "make_code",
    "make_field",
    "mul",
    "p_obj_ec",
    "p_obj_src",
    "pair_table",
    "plan_repairs",
    "power",
    "rank_gf2",
    "repair_fragment",
    "repair_missing",
    "rho",
    "sequential_baselines",
    "simulate_p_obj",
    "split_bytes",
    "split_object",
    "subspace_points",
    "verify_schedule",
]

"""Exact frugality payment bounds and truthful set-system auctions.

Submodules: ``core`` (set systems, fairness constraints, instance JSON),
``ratlp`` (exact LP and max-flow), ``bounds`` (the four payment bounds),
``mechanisms`` (allocation rules and threshold payments), ``generators``
(named, random and reduction instances), ``suite`` (end-to-end checks) and
``cli``.
"""
from .bounds import (
    CHAIN,
    AllBounds,
    BoundKind,
    PaymentBoundResult,
    all_bounds,
    bound,
    ratio_shift,
    matroid_bounds,
    ntumax,
    ntumin,
    tumax,
    tumin,
    vc_ntumax_witness,
    vc_tumax_witness,
)
from .config import Caps, default_caps
from .core import Graph, SetSystem, load_instance, dump_instance, verify_witness
from .generators import X3CInstance, named_instance, random_instance, x3c_brute, x3c_reduce
from .kernels import BACKEND
from .mechanisms import (
    AllocationRule,
    allocate,
    audit_lower_bound,
    frugality,
    parse_rule,
    run_mechanism,
    threshold_payment,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CHAIN", "AllBounds", "AllocationRule", "BoundKind", "Caps", "Graph",
    "PaymentBoundResult", "SetSystem", "X3CInstance", "all_bounds", "allocate",
    "audit_lower_bound", "bound", "default_caps", "dump_instance", "frugality",
    "ratio_shift", "load_instance", "matroid_bounds", "ntumax", "ntumin",
    "named_instance", "parse_rule", "random_instance", "run_mechanism",
    "threshold_payment", "tumax", "tumin", "vc_ntumax_witness", "vc_tumax_witness",
    "verify_witness", "x3c_brute", "x3c_reduce",
]

"""Finite-dimensional operator algebras, exchangeable sequences, and the
recovery of mixing measures over iid towers."""

from .cstar import (
    Algebra,
    Element,
    StateVec,
    eval_state,
    is_positive_element,
    make_algebra,
    make_state,
    state_distance,
    trace_norm,
)
from .cpmaps import (
    ChoiMap,
    apply,
    choi_from_function,
    compose,
    depolarizing_map,
    dephasing_map,
    dualize,
    identity_map,
    is_completely_positive,
    is_unital,
    tensor,
)
from .exchange import (
    ExchSeq,
    check_exchangeable,
    eta_sigma,
    eta_tau,
    iid_extend,
    iota_embed,
    make_exch_seq,
    power_algebra,
    restrict_state,
)
from .definetti import (
    AtomSet,
    Cone,
    MediatingMap,
    Mixture,
    default_atoms,
    explicit_atoms,
    factorization_error,
    mediating_map,
    moment_independent,
    moment_rank,
    reconstruct,
    synthesize,
    uniqueness_check,
)
from .classical import (
    ClassicalExchSeq,
    FinDist,
    Kernel,
    dirac,
    flatten,
    hs_reconstruct,
    kleisli_compose,
    product_measure,
    pushforward,
)

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "AtomSet",
    "ChoiMap",
    "ClassicalExchSeq",
    "Cone",
    "Element",
    "ExchSeq",
    "FinDist",
    "Kernel",
    "MediatingMap",
    "Mixture",
    "StateVec",
    "apply",
    "check_exchangeable",
    "choi_from_function",
    "compose",
    "default_atoms",
    "dephasing_map",
    "depolarizing_map",
    "dirac",
    "dualize",
    "eta_sigma",
    "eta_tau",
    "eval_state",
    "explicit_atoms",
    "factorization_error",
    "flatten",
    "hs_reconstruct",
    "identity_map",
    "iid_extend",
    "iota_embed",
    "is_completely_positive",
    "is_positive_element",
    "is_unital",
    "kleisli_compose",
    "make_algebra",
    "make_exch_seq",
    "make_state",
    "mediating_map",
    "moment_independent",
    "moment_rank",
    "power_algebra",
    "product_measure",
    "pushforward",
    "reconstruct",
    "restrict_state",
    "state_distance",
    "synthesize",
    "tensor",
    "trace_norm",
    "uniqueness_check",
]

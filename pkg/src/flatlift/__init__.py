"""Flat finite posets, stable diagrams in Z/p^k-mod, and strict lifts."""
from .errors import *  # noqa: F401,F403
from .poset import Poset, chain, from_cover_relations, inclusion_poset, powerset, product
from .crowns import connectedness_check, is_crown, one_connected, peel
from .flatness import flatness_check, is_ind_flat, is_pro_flat, mitchell_check, quasitree_check, suspended_crown
from .modcat import ModMorphism, ModObject, RingParams
from .diagrams import DiagramMorphism, Prediagram, StableIsoFamily, check
from .colimits import brute_force_colimit, crown_colimit, poset_colimit_via_crown
from .lifting import (LiftResult, MorphismLiftResult, add_commutativity, lift_diagram, lift_diagram_epi,
                      lift_morphism, purify, purify_at_max, replace_at, strict_lift_of_stable_morphism)

__version__ = "0.1.0"

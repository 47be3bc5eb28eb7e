"""T-depth reduction for columnar pi/8 rotation circuits by merging T layers."""
from .baselines import LookaheadParams, brute_force_optimum, lookahead_optimize
from .benchgen import PROFILES, GenSpec, SuiteProfile, generate, generate_suite
from .candidates import Chromosome, GreedyParams, candidate_pairs, greedy_filter
from .circuit import (
    Axis,
    Circuit,
    CliffordResidue,
    Column,
    MergeCheck,
    MergePolicy,
    Order,
    Overlap,
    Phase,
    apply_merge_plan,
    can_merge,
    canonicalize,
    columns_commute,
    merge,
    t_count,
    t_depth,
)
from .config import Config, load_config
from .document import parse_circuit, serialize
from .expansion import ExpansionParams, expand_circuit, expansion_factor
from .ga import GaParams, Optimization, evolve_round, fitness, optimize
from .oracle import Verdict, circuit_unitary, verify_optimization

__version__ = "0.1.0"

"""Equivocation lab for XOR-accumulated keys against erasure eavesdroppers."""

__version__ = "0.1.0"

from .accumulator import (
    KeyState,
    aaa_accumulate,
    aaa_reinit,
    aaa_update,
    partition_accumulate,
)
from .bitcore import BitMatrix, Gf2Matrix, binary_entropy, gf2_rank, xor_fold
from .checks import CheckResult, run_all_checks, verify_all
from .eavesdropper import (
    ERASED,
    EveView,
    InterceptSchedule,
    intercept_per_bit,
    intercept_per_file,
)
from .equivocation import (
    EquivocationReport,
    MarkovHelpers,
    capacity,
    eps_bit,
    eps_key_file,
    eps_key_independent,
    eps_recursive,
    markov_eps2,
    markov_eps2_exact,
    markov_eps3,
    markov_eps3_symmetric,
    markov_helpers,
    maurer_bounds,
    mu_hat,
)
from .oracle import (
    EnumerationLimitError,
    ExtractorRun,
    OracleConfig,
    exact_equivocation,
    exact_equivocation_joint,
    expected_full_row_rank_prob,
    full_row_rank_prob,
    hash_extract,
    mc_equivocation_independent,
    otp_encode,
    otp_rate,
    sample_extractor_inputs,
)
from .scenarios import (
    Scenario,
    ScenarioResult,
    extractor_demo,
    run_scenario,
    sweep_markov,
)
from .seeding import rng_from
from .source import (
    MarkovParams,
    PacketSelector,
    gen_iid_bits,
    gen_markov_bits,
    select_bits,
)

__all__ = [
    "BitMatrix",
    "CheckResult",
    "ERASED",
    "EnumerationLimitError",
    "EquivocationReport",
    "EveView",
    "ExtractorRun",
    "Gf2Matrix",
    "InterceptSchedule",
    "KeyState",
    "MarkovHelpers",
    "MarkovParams",
    "OracleConfig",
    "PacketSelector",
    "Scenario",
    "ScenarioResult",
    "aaa_accumulate",
    "aaa_reinit",
    "aaa_update",
    "binary_entropy",
    "capacity",
    "eps_bit",
    "eps_key_file",
    "eps_key_independent",
    "eps_recursive",
    "exact_equivocation",
    "exact_equivocation_joint",
    "expected_full_row_rank_prob",
    "extractor_demo",
    "full_row_rank_prob",
    "gen_iid_bits",
    "gen_markov_bits",
    "gf2_rank",
    "hash_extract",
    "intercept_per_bit",
    "intercept_per_file",
    "markov_eps2",
    "markov_eps2_exact",
    "markov_eps3",
    "markov_eps3_symmetric",
    "markov_helpers",
    "maurer_bounds",
    "mc_equivocation_independent",
    "mu_hat",
    "otp_encode",
    "otp_rate",
    "partition_accumulate",
    "rng_from",
    "run_all_checks",
    "run_scenario",
    "sample_extractor_inputs",
    "select_bits",
    "sweep_markov",
    "verify_all",
    "xor_fold",
]

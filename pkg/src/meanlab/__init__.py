"""meanlab: Kubo-Ando and naive matrix power means, inverse mean problems,
and a seeded lab for operator-monotonicity experiments."""
from .errors import (
    DomainError,
    HypothesisViolated,
    IllConditioned,
    InvalidInput,
    MeanLabError,
    NumericalFailure,
    OutOfRange,
    ParseError,
    ValidationError,
)
from .inverse import (
    ChainLink,
    ChainWitness,
    ExploreResult,
    InverseSolution,
    chain_decompose,
    chain_solve_global,
    chain_solve_sqrt,
    explore_open_problem,
    solve_arith_power_local,
    solve_arith_quadratic,
    solve_geom_power,
    solve_sqrt_arith,
)
from .linalg import (
    EigenDecomp,
    LoewnerResult,
    ScalarFunction,
    apply_fun,
    congruence_transform,
    eig_sym,
    loewner_leq,
    random_orthogonal,
    random_spd,
)
from .means import (
    KuboAndoFamily,
    MeanSpec,
    arithmetic_mean,
    divergence_phi,
    geometric_mean,
    kubo_ando_mean,
    matrix_mean,
    min_mean,
    naive_power_mean,
    representing_function,
    scalar_power_mean,
)
from .scalar_solvers import BranchedRoot, gamma_of, invert_h, invert_phi, scalar_chain
from .verify import (
    Hypothesis,
    Verdict,
    Witness,
    check_mean_inequalities,
    prop31_counterexample,
    test_characterization,
    test_monotonicity,
)

__version__ = "0.1.0"

//! Exact reduction of special values of the so(5) Witten zeta function
//! to alternating Euler sums of depth at most two, together with an
//! arbitrary-precision numeric evaluator that cross-checks every
//! reduction against the raw double series.

pub mod exact;
pub mod numeric;
pub mod reduce;
pub mod terms;

pub use exact::{bernoulli, binomial, factorial, Int, Rat};
pub use numeric::{
    eval_combo, eval_depth1, eval_so_direct, eval_term, eval_witten, numeric_equal, pi,
    Bf, ConstantCache, EvalConfig, EvalError, PrecisionReal,
};
pub use reduce::{
    converges_mt, converges_so, enumerate_convergent, enumerate_regular, partial_fraction2,
    reduce_mt2, reduce_so, reduce_sum_n_m2n, reduce_tail_limit, witten_c, MtArgs,
    PartialFractionExpansion, ReduceError, ZetaSoArgs,
};
pub use terms::{stuffle_product, Combo, EulerTerm, Sign, SignedArg, TermError};

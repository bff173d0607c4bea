//! Reduction of convergent so(5) Witten zeta values to rational linear
//! combinations of alternating Euler sums of depth at most two.
//!
//! The case analysis follows a fixed dispatch:
//!   s4 = 0                        -> Mordell-Tornheim double value
//!   s4 > 0, s2 > 0, s3 > 0        -> partial fractions in (n, m+n), recurse
//!   s4 > 0, s3 = 0, s2 > 0        -> split by parity of the inner index
//!   s4 > 0, s2 = 0, s1 > 0        -> partial fractions in (m, m+2n), recurse
//!   s4 > 0, s1 = s2 = 0, s3 = 0   -> closed form (exceptional case)
//!   s4 > 0, s1 = s2 = 0, s3 > 0   -> partial fractions in (-(m+n), m+2n)
//! Each step preserves the weight; only the two exceptional argument
//! patterns introduce a single depth-1 term of weight w-1.

use num::{One, Zero};
use thiserror::Error;

use crate::exact::{binomial, factorial, pow2, rat, rat_int, Int, Rat};
use crate::terms::{Combo, EulerTerm, SignedArg};

/// Argument tuple of the double series
/// sum over m,n >= 1 of 1 / (m^s1 n^s2 (m+n)^s3 (m+2n)^s4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZetaSoArgs {
    pub s1: u32,
    pub s2: u32,
    pub s3: u32,
    pub s4: u32,
}

impl ZetaSoArgs {
    pub fn new(s1: u32, s2: u32, s3: u32, s4: u32) -> Self {
        ZetaSoArgs { s1, s2, s3, s4 }
    }

    pub fn weight(&self) -> u32 {
        self.s1 + self.s2 + self.s3 + self.s4
    }

    /// Convergence holds iff s1+s3+s4 > 1, s2+s3+s4 > 1 and the weight > 2.
    pub fn converges(&self) -> bool {
        self.violated_condition().is_none()
    }

    /// The first violated convergence inequality, if any.
    pub fn violated_condition(&self) -> Option<&'static str> {
        if self.s1 + self.s3 + self.s4 <= 1 {
            Some("s1+s3+s4>1")
        } else if self.s2 + self.s3 + self.s4 <= 1 {
            Some("s2+s3+s4>1")
        } else if self.weight() <= 2 {
            Some("s1+s2+s3+s4>2")
        } else {
            None
        }
    }

    /// The two patterns that need the extra depth-1 term of weight w-1.
    pub fn is_exceptional(&self) -> bool {
        (self.s1 == 0 && self.s2 == 0 && self.s3 == 0)
            || (self.s1 == 0 && self.s2 == 0 && self.s4 == 0)
    }
}

/// Mordell-Tornheim arguments: sum over m_1..m_d of
/// prod m_j^{-s_j} * (m_1+...+m_d)^{-s}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MtArgs {
    pub exponents: Vec<u32>,
    pub s: u32,
}

impl MtArgs {
    pub fn new(exponents: Vec<u32>, s: u32) -> Self {
        assert!(!exponents.is_empty());
        MtArgs { exponents, s }
    }

    /// Convergence iff s + sum of every nonempty subset of exponents
    /// exceeds the subset size.
    pub fn converges(&self) -> bool {
        let d = self.exponents.len();
        for mask in 1u32..(1 << d) {
            let mut total = self.s as u64;
            let mut size = 0u64;
            for (j, &e) in self.exponents.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    total += e as u64;
                    size += 1;
                }
            }
            if total <= size {
                return false;
            }
        }
        true
    }
}

pub fn converges_so(args: &ZetaSoArgs) -> bool {
    args.converges()
}

pub fn converges_mt(args: &MtArgs) -> bool {
    args.converges()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("divergent: violated {0}")]
    Divergent(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
}

/// One term of the two-variable partial fraction expansion of
/// 1/(x1^n1 x2^n2): M / ((x1+x2)^{n_j + a} * x_other^{n_other - a}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pf2Term {
    /// Index (1 or 2) of the variable absorbed into the (x1+x2) power.
    pub surviving: usize,
    /// The summation index a_k of the other variable.
    pub a: u32,
    /// Multinomial coefficient M_j = C(n_j + a - 1, a).
    pub coeff: Int,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFractionExpansion {
    pub n1: u32,
    pub n2: u32,
    pub terms: Vec<Pf2Term>,
}

impl PartialFractionExpansion {
    /// Evaluate the right-hand side at exact rational points. Reproduces
    /// 1/(x1^n1 x2^n2) whenever x1, x2 and x1+x2 are nonzero.
    pub fn eval_at(&self, x1: &Rat, x2: &Rat) -> Rat {
        let sum = x1 + x2;
        let mut acc = Rat::zero();
        for t in &self.terms {
            let (n_j, n_other, x_other) = if t.surviving == 1 {
                (self.n1, self.n2, x2)
            } else {
                (self.n2, self.n1, x1)
            };
            let denom = pow_rat(&sum, n_j + t.a) * pow_rat(x_other, n_other - t.a);
            acc += Rat::from_integer(t.coeff.clone()) / denom;
        }
        acc
    }
}

fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Two-variable case of the combinatorial partial fraction identity:
/// 1/(x1^n1 x2^n2) = sum_{a2=0}^{n2-1} C(n1+a2-1, a2) / ((x1+x2)^{n1+a2} x2^{n2-a2})
///                 + sum_{a1=0}^{n1-1} C(n2+a1-1, a1) / ((x1+x2)^{n2+a1} x1^{n1-a1}).
pub fn partial_fraction2(n1: u32, n2: u32) -> PartialFractionExpansion {
    assert!(n1 >= 1 && n2 >= 1);
    let mut terms = Vec::new();
    for a2 in 0..n2 {
        terms.push(Pf2Term {
            surviving: 1,
            a: a2,
            coeff: binomial((n1 + a2 - 1) as u64, a2 as u64),
        });
    }
    for a1 in 0..n1 {
        terms.push(Pf2Term {
            surviving: 2,
            a: a1,
            coeff: binomial((n2 + a1 - 1) as u64, a1 as u64),
        });
    }
    PartialFractionExpansion { n1, n2, terms }
}

fn zeta1(s: u32) -> Combo {
    Combo::single(
        EulerTerm::depth1(SignedArg::pos(s)).expect("admissible depth-1 term"),
        Rat::one(),
    )
}

fn term2(outer: SignedArg, inner: SignedArg) -> EulerTerm {
    EulerTerm::depth2(outer, inner).expect("admissible depth-2 term")
}

/// Reduce the depth-2 Mordell-Tornheim value zeta_MT(s1, s2; s) to a combo
/// of (non-alternating) zeta terms of depth <= 2.
pub fn reduce_mt2(s1: u32, s2: u32, s: u32) -> Result<Combo, ReduceError> {
    let args = MtArgs::new(vec![s1, s2], s);
    if !args.converges() {
        return Err(ReduceError::Divergent("s + subset sums > subset size"));
    }
    if s1 == 0 && s2 == 0 {
        // sum (m+n)^{-s} = sum_{k>=2} (k-1) k^{-s} = z(s-1) - z(s)
        let mut c = zeta1(s - 1);
        c.add_scaled(&rat_int(-1), &zeta1(s));
        return Ok(c);
    }
    if s1 == 0 {
        // reindex k = m+n > n
        return Ok(Combo::single(
            term2(SignedArg::pos(s), SignedArg::pos(s2)),
            Rat::one(),
        ));
    }
    if s2 == 0 {
        return Ok(Combo::single(
            term2(SignedArg::pos(s), SignedArg::pos(s1)),
            Rat::one(),
        ));
    }
    if s == 0 {
        // zeta(s1) * zeta(s2), expanded by the stuffle product
        return crate::terms::stuffle_product(SignedArg::pos(s1), SignedArg::pos(s2))
            .map_err(|e| ReduceError::Domain(e.to_string()));
    }
    // General case: partial fractions with x1 = m, x2 = n; x1 + x2 = m + n.
    let pf = partial_fraction2(s1, s2);
    let mut combo = Combo::new();
    for t in &pf.terms {
        let coeff = Rat::from_integer(t.coeff.clone());
        let term = if t.surviving == 1 {
            // (m+n)^{-(s + s1 + a)} n^{-(s2 - a)}
            term2(SignedArg::pos(s + s1 + t.a), SignedArg::pos(s2 - t.a))
        } else {
            term2(SignedArg::pos(s + s2 + t.a), SignedArg::pos(s1 - t.a))
        };
        combo.add_term(term, coeff);
    }
    Ok(combo)
}

/// sum over m,n of 1/(n^u (m+2n)^v) = 2^{u-1} (z(v,u) + z(v, bar u)).
pub fn reduce_sum_n_m2n(u: u32, v: u32) -> Result<Combo, ReduceError> {
    if u < 1 || v < 2 {
        return Err(ReduceError::Domain(format!(
            "reduce_sum_n_m2n needs u >= 1, v >= 2, got ({u},{v})"
        )));
    }
    let scale = pow2(u as i64 - 1);
    let mut combo = Combo::new();
    combo.add_term(term2(SignedArg::pos(v), SignedArg::pos(u)), scale.clone());
    combo.add_term(term2(SignedArg::pos(v), SignedArg::neg(u)), scale);
    Ok(combo)
}

/// Limit of the paired partial sums of
/// sum over m,n of (1/(n^s (m+2n)) - 1/(n^s (m+n))), for s >= 2:
/// (1 - 2^{s-1}) (z(s+1) + z(s,1)) - 2^{s-1} (z(bar s, 1) + z(bar(s+1))).
pub fn reduce_tail_limit(s: u32) -> Result<Combo, ReduceError> {
    if s < 2 {
        return Err(ReduceError::Domain(format!(
            "reduce_tail_limit needs s >= 2, got {s}"
        )));
    }
    let p = pow2(s as i64 - 1);
    let c1 = Rat::one() - &p;
    let mut combo = Combo::new();
    combo.add_term(
        EulerTerm::depth1(SignedArg::pos(s + 1)).unwrap(),
        c1.clone(),
    );
    combo.add_term(term2(SignedArg::pos(s), SignedArg::pos(1)), c1);
    combo.add_term(term2(SignedArg::neg(s), SignedArg::pos(1)), -p.clone());
    combo.add_term(EulerTerm::depth1(SignedArg::neg(s + 1)).unwrap(), -p);
    Ok(combo)
}

/// Reduce a convergent Witten zeta value to a combo of alternating Euler
/// sums of depth at most two, numerically equal to the double series.
pub fn reduce_so(args: &ZetaSoArgs) -> Result<Combo, ReduceError> {
    if let Some(cond) = args.violated_condition() {
        return Err(ReduceError::Divergent(cond));
    }
    let ZetaSoArgs { s1, s2, s3, s4 } = *args;

    if s4 == 0 {
        // Case (i): a Mordell-Tornheim double value.
        return reduce_mt2(s1, s2, s3);
    }
    if s2 > 0 && s3 > 0 {
        return reduce_case_ii(s1, s2, s3, s4);
    }
    if s3 == 0 && s2 > 0 {
        return reduce_case_iiia(s1, s2, s4);
    }
    if s2 == 0 && s1 > 0 {
        return reduce_case_iiib(s1, s3, s4);
    }
    // s1 = s2 = 0
    if s3 == 0 {
        Ok(reduce_case_iiic1(s4))
    } else {
        reduce_case_iiic2(s3, s4)
    }
}

/// Case (ii): s2, s3, s4 > 0. Partial fractions with x1 = n, x2 = m+n
/// (so x1+x2 = m+2n) push the tuple to one with s2 = 0 or s3 = 0.
fn reduce_case_ii(s1: u32, s2: u32, s3: u32, s4: u32) -> Result<Combo, ReduceError> {
    let pf = partial_fraction2(s2, s3);
    let mut combo = Combo::new();
    for t in &pf.terms {
        let sub = if t.surviving == 1 {
            // n absorbed: (m+2n)^{s2+a} (m+n)^{s3-a} remain
            ZetaSoArgs::new(s1, 0, s3 - t.a, s4 + s2 + t.a)
        } else {
            ZetaSoArgs::new(s1, s2 - t.a, 0, s4 + s3 + t.a)
        };
        debug_assert!(sub.converges(), "intermediate tuple {sub:?} must converge");
        let reduced = reduce_so(&sub)?;
        combo.add_scaled(&Rat::from_integer(t.coeff.clone()), &reduced);
    }
    Ok(combo)
}

/// Case (iii.a): s3 = 0, s2 > 0, s4 > 0. Doubling the inner index turns
/// (m+2n) into (m+n) at the cost of a parity filter (1 + (-1)^n)/2.
fn reduce_case_iiia(s1: u32, s2: u32, s4: u32) -> Result<Combo, ReduceError> {
    let mut inner = reduce_mt2(s1, s2, s4)?;
    if s1 == 0 {
        // Alternating part collapses to a single double zeta.
        inner.add_term(term2(SignedArg::pos(s4), SignedArg::neg(s2)), Rat::one());
    } else {
        // Partial fractions with x1 = m, x2 = n; x1+x2 = m+n.
        let pf = partial_fraction2(s1, s2);
        for t in &pf.terms {
            let coeff = Rat::from_integer(t.coeff.clone());
            let term = if t.surviving == 1 {
                // m absorbed: (m+n)^{-(s4+s1+a)} n^{-(s2-a)}, sign on n
                term2(SignedArg::pos(s4 + s1 + t.a), SignedArg::neg(s2 - t.a))
            } else {
                // n absorbed: (m+n)^{-(s4+s2+a)} m^{-(s1-a)}; with k = m+n
                // the sign (-1)^n = (-1)^k (-1)^m lands on both slots.
                term2(SignedArg::neg(s4 + s2 + t.a), SignedArg::neg(s1 - t.a))
            };
            inner.add_term(term, coeff);
        }
    }
    Ok(inner.scale(&pow2(s2 as i64 - 1)))
}

/// Case (iii.b): s2 = 0, s1 > 0, s4 > 0. Partial fractions with x1 = m,
/// x2 = m+2n (so x1+x2 = 2(m+n)).
fn reduce_case_iiib(s1: u32, s3: u32, s4: u32) -> Result<Combo, ReduceError> {
    let pf = partial_fraction2(s1, s4);
    let mut combo = Combo::new();
    for t in &pf.terms {
        let coeff = Rat::from_integer(t.coeff.clone());
        if t.surviving == 1 {
            // m absorbed: 2^{-(s1+a)} zeta_so(0, 0, s3+s1+a, s4-a)
            let sub = ZetaSoArgs::new(0, 0, s3 + s1 + t.a, s4 - t.a);
            debug_assert!(sub.converges(), "intermediate tuple {sub:?} must converge");
            let reduced = reduce_so(&sub)?;
            combo.add_scaled(&(coeff * pow2(-((s1 + t.a) as i64))), &reduced);
        } else {
            // m+2n absorbed: 2^{-(s4+a)} z(s3+s4+a, s1-a), via k = m+n
            combo.add_term(
                term2(SignedArg::pos(s3 + s4 + t.a), SignedArg::pos(s1 - t.a)),
                coeff * pow2(-((s4 + t.a) as i64)),
            );
        }
    }
    Ok(combo)
}

/// Case (iii.c.1): zeta_so(0,0,0,s) = (z(s-1) - (1 + 2^{-s}) z(s)) / 2.
fn reduce_case_iiic1(s: u32) -> Combo {
    let mut combo = Combo::new();
    combo.add_term(EulerTerm::depth1(SignedArg::pos(s - 1)).unwrap(), rat(1, 2));
    combo.add_term(
        EulerTerm::depth1(SignedArg::pos(s)).unwrap(),
        -(Rat::one() + pow2(-(s as i64))) * rat(1, 2),
    );
    combo
}

/// Case (iii.c.2): zeta_so(0,0,r,t) with r, t >= 1, via partial fractions
/// with x1 = -(m+n), x2 = m+2n (so x1+x2 = n). The two order-one leftover
/// pieces pair up into the finite limit handled by `reduce_tail_limit`.
fn reduce_case_iiic2(r: u32, t: u32) -> Result<Combo, ReduceError> {
    debug_assert!(r + t >= 3);
    let sign_r = if r % 2 == 0 { Rat::one() } else { -Rat::one() };
    let mut combo = Combo::new();
    // x2 absorbed: sign (-1)^a on z(r-a, t+a), for a <= r-2.
    for a in 0..r.saturating_sub(1) {
        let mut coeff = Rat::from_integer(binomial((t + a - 1) as u64, a as u64));
        if a % 2 == 1 {
            coeff = -coeff;
        }
        combo.add_term(term2(SignedArg::pos(r - a), SignedArg::pos(t + a)), coeff);
    }
    // x1 absorbed: (-1)^r sum over 1/(n^{r+a} (m+2n)^{t-a}), for a <= t-2.
    for a in 0..t.saturating_sub(1) {
        let coeff = Rat::from_integer(binomial((r + a - 1) as u64, a as u64));
        let part = reduce_sum_n_m2n(r + a, t - a)?;
        combo.add_scaled(&(coeff * &sign_r), &part);
    }
    // Remaining order-one pair: (-1)^r C(r+t-2, r-1) * lim S^(N).
    let coeff = Rat::from_integer(binomial((r + t - 2) as u64, (r - 1) as u64));
    let tail = reduce_tail_limit(r + t - 1)?;
    combo.add_scaled(&(coeff * &sign_r), &tail);
    Ok(combo)
}

/// Exact rational c(m) with zeta_so(2m,2m,2m,2m) = c(m) * pi^{8m}.
pub fn witten_c(m: u32) -> Rat {
    assert!(m >= 1);
    let m = m as u64;
    let mut total = Rat::zero();
    for nu in 0..=m {
        let b_pair = crate::exact::bernoulli(2 * nu) * crate::exact::bernoulli(8 * m - 2 * nu);
        if b_pair.is_zero() {
            continue;
        }
        let outer = Rat::from_integer(binomial(8 * m, 2 * nu)) * b_pair;
        let mut inner = Rat::zero();
        for mu in 0..=(2 * m - 1) {
            let sign = if mu % 2 == 0 { Rat::one() } else { -Rat::one() };
            let frac = pow2(2 * nu as i64 - 1) * pow2(-((2 * m + mu) as i64));
            let weight = frac - sign;
            inner += weight
                * Rat::from_integer(binomial(4 * m - mu - 2, 2 * m - 1))
                * Rat::from_integer(binomial(2 * m - 2 * nu + mu, 2 * m - 2 * nu));
        }
        for mu in 0..=(2 * m - 2 * nu) {
            let sign = if mu % 2 == 0 { Rat::one() } else { -Rat::one() };
            let weight = pow2(-((2 * m + mu) as i64)) + sign;
            inner += weight
                * Rat::from_integer(binomial(4 * m - 2 * nu - mu - 1, 2 * m - 1))
                * Rat::from_integer(binomial(2 * m - 1 + mu, 2 * m - 1));
        }
        total += outer * inner;
    }
    total * pow2(8 * m as i64 - 3) / Rat::from_integer(factorial(8 * m))
}

/// All convergent argument tuples of the given weight, lexicographic.
pub fn enumerate_convergent(weight: u32) -> Vec<ZetaSoArgs> {
    let mut out = Vec::new();
    for s1 in 0..=weight {
        for s2 in 0..=(weight - s1) {
            for s3 in 0..=(weight - s1 - s2) {
                let s4 = weight - s1 - s2 - s3;
                let args = ZetaSoArgs::new(s1, s2, s3, s4);
                if args.converges() {
                    out.push(args);
                }
            }
        }
    }
    out
}

/// Convergent tuples of the given weight excluding the two exceptional
/// patterns; what the tables call the regular values.
pub fn enumerate_regular(weight: u32) -> Vec<ZetaSoArgs> {
    enumerate_convergent(weight)
        .into_iter()
        .filter(|a| !a.is_exceptional())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn convergence_so_examples() {
        assert!(ZetaSoArgs::new(1, 0, 0, 2).converges());
        assert!(!ZetaSoArgs::new(2, 0, 0, 0).converges());
        assert_eq!(
            ZetaSoArgs::new(2, 0, 0, 0).violated_condition(),
            Some("s2+s3+s4>1")
        );
        assert!(!ZetaSoArgs::new(0, 0, 2, 0).converges());
        assert_eq!(
            ZetaSoArgs::new(0, 0, 2, 0).violated_condition(),
            Some("s1+s2+s3+s4>2")
        );
    }

    #[test]
    fn convergence_mt_examples() {
        assert!(MtArgs::new(vec![2, 2], 2).converges());
        assert!(!MtArgs::new(vec![0, 0], 2).converges());
        assert!(MtArgs::new(vec![1, 1], 1).converges());
    }

    fn rand_rat(rng: &mut StdRng) -> Rat {
        loop {
            let n = rng.gen_range(-20i64..=20);
            let d = rng.gen_range(1i64..=20);
            if n != 0 {
                return rat(n, d);
            }
        }
    }

    #[test]
    fn pf2_unit_cases() {
        // (1,1) at x1 = x2 = 1: 1 = 1/2 + 1/2
        let pf = partial_fraction2(1, 1);
        assert_eq!(pf.eval_at(&rat_int(1), &rat_int(1)), rat_int(1));

        // (2,1) at (1,2): 1/2 = 1/18 + 1/3 + 1/9
        let pf = partial_fraction2(2, 1);
        assert_eq!(pf.eval_at(&rat_int(1), &rat_int(2)), rat(1, 2));
    }

    #[test]
    fn pf2_randomized_identity() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for n1 in 1..=6u32 {
            for n2 in 1..=6u32 {
                let pf = partial_fraction2(n1, n2);
                let trials = if (n1, n2) == (3, 2) { 100 } else { 12 };
                for _ in 0..trials {
                    let x1 = rand_rat(&mut rng);
                    let x2 = rand_rat(&mut rng);
                    if (&x1 + &x2).is_zero() {
                        continue;
                    }
                    let lhs = Rat::one() / (pow_rat(&x1, n1) * pow_rat(&x2, n2));
                    assert_eq!(pf.eval_at(&x1, &x2), lhs, "pf2({n1},{n2}) at {x1},{x2}");
                }
            }
        }
    }

    #[test]
    fn mt2_degenerate_cases() {
        assert_eq!(
            reduce_mt2(0, 0, 4).unwrap().render_plain(),
            "z(3) - z(4)"
        );
        assert_eq!(reduce_mt2(0, 3, 2).unwrap().render_plain(), "z(2,3)");
        assert_eq!(reduce_mt2(3, 0, 2).unwrap().render_plain(), "z(2,3)");
        // s = 0: product expanded by stuffle
        assert_eq!(
            reduce_mt2(2, 3, 0).unwrap().render_plain(),
            "z(2,3) + z(3,2) + z(5)"
        );
        // the classic zeta_MT(1,1;1) = 2 z(2,1)
        assert_eq!(reduce_mt2(1, 1, 1).unwrap().render_plain(), "2*z(2,1)");
        assert_eq!(
            reduce_mt2(2, 2, 2).unwrap().render_plain(),
            "2*z(4,2) + 4*z(5,1)"
        );
        assert!(reduce_mt2(0, 0, 2).is_err());
    }

    #[test]
    fn so_case_i_and_exceptional_forms() {
        assert_eq!(
            reduce_so(&ZetaSoArgs::new(0, 0, 5, 0)).unwrap().render_plain(),
            "z(4) - z(5)"
        );
        // Syntactic exceptional contract for s = 3..8.
        for s in 3..=8u32 {
            let c = reduce_so(&ZetaSoArgs::new(0, 0, s, 0)).unwrap();
            let mut expected = Combo::new();
            expected.add_term(EulerTerm::depth1(SignedArg::pos(s - 1)).unwrap(), rat_int(1));
            expected.add_term(EulerTerm::depth1(SignedArg::pos(s)).unwrap(), rat_int(-1));
            assert_eq!(c, expected);

            let c = reduce_so(&ZetaSoArgs::new(0, 0, 0, s)).unwrap();
            let mut expected = Combo::new();
            expected.add_term(EulerTerm::depth1(SignedArg::pos(s - 1)).unwrap(), rat(1, 2));
            expected.add_term(
                EulerTerm::depth1(SignedArg::pos(s)).unwrap(),
                -(Rat::one() + pow2(-(s as i64))) * rat(1, 2),
            );
            assert_eq!(c, expected);
        }
        // (0,0,0,3) = 1/2 z(2) - 9/16 z(3)
        assert_eq!(
            reduce_so(&ZetaSoArgs::new(0, 0, 0, 3)).unwrap().render_plain(),
            "1/2*z(2) - 9/16*z(3)"
        );
    }

    #[test]
    fn so_divergent_rejected() {
        assert_eq!(
            reduce_so(&ZetaSoArgs::new(2, 0, 0, 0)),
            Err(ReduceError::Divergent("s2+s3+s4>1"))
        );
    }

    #[test]
    fn so_outputs_depth_at_most_two_and_admissible() {
        for w in 3..=7u32 {
            for args in enumerate_convergent(w) {
                let combo = reduce_so(&args).unwrap();
                assert!(combo.max_depth() <= 2, "{args:?}");
                for (term, _) in combo.iter() {
                    assert_ne!(
                        term.args()[0],
                        SignedArg::pos(1),
                        "inadmissible leading slot in output for {args:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn so_weight_homogeneity() {
        for w in 3..=7u32 {
            for args in enumerate_convergent(w) {
                let combo = reduce_so(&args).unwrap();
                let weights = combo.weights();
                if args.is_exceptional() {
                    let off: Vec<u32> =
                        weights.iter().copied().filter(|&x| x != w).collect();
                    assert_eq!(off, vec![w - 1], "{args:?}");
                    // exactly one off-weight term, depth 1
                    let off_terms: Vec<_> = combo
                        .iter()
                        .filter(|(t, _)| t.weight() == w - 1)
                        .collect();
                    assert_eq!(off_terms.len(), 1, "{args:?}");
                    assert_eq!(off_terms[0].0.depth(), 1, "{args:?}");
                } else {
                    assert!(
                        weights.iter().all(|&x| x == w),
                        "{args:?} produced weights {weights:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn sum_n_m2n_forms() {
        assert_eq!(
            reduce_sum_n_m2n(1, 2).unwrap().render_plain(),
            "z(2,1) + z(2,b1)"
        );
        assert_eq!(
            reduce_sum_n_m2n(2, 3).unwrap().render_plain(),
            "2*z(3,2) + 2*z(3,b2)"
        );
        assert!(reduce_sum_n_m2n(1, 1).is_err());
        assert!(reduce_sum_n_m2n(0, 3).is_err());
    }

    #[test]
    fn tail_limit_forms() {
        // s=2: -(z(3) + z(2,1)) - 2 (z(b2,1) + z(b3))
        let c = reduce_tail_limit(2).unwrap();
        assert_eq!(
            c.coefficient(&EulerTerm::depth1(SignedArg::pos(3)).unwrap()),
            rat_int(-1)
        );
        assert_eq!(c.coefficient(&term2(SignedArg::pos(2), SignedArg::pos(1))), rat_int(-1));
        assert_eq!(c.coefficient(&term2(SignedArg::neg(2), SignedArg::pos(1))), rat_int(-2));
        assert_eq!(
            c.coefficient(&EulerTerm::depth1(SignedArg::neg(3)).unwrap()),
            rat_int(-2)
        );
        // s=3: -3 (z(4) + z(3,1)) - 4 (z(b3,1) + z(b4))
        let c = reduce_tail_limit(3).unwrap();
        assert_eq!(
            c.coefficient(&EulerTerm::depth1(SignedArg::pos(4)).unwrap()),
            rat_int(-3)
        );
        assert_eq!(c.coefficient(&term2(SignedArg::pos(3), SignedArg::pos(1))), rat_int(-3));
        assert_eq!(c.coefficient(&term2(SignedArg::neg(3), SignedArg::pos(1))), rat_int(-4));
        assert_eq!(
            c.coefficient(&EulerTerm::depth1(SignedArg::neg(4)).unwrap()),
            rat_int(-4)
        );
        assert!(reduce_tail_limit(1).is_err());
    }

    #[test]
    fn witten_rationals() {
        assert_eq!(witten_c(1), Rat::new(Int::from(6), factorial(9) * Int::from(5)));
        assert_eq!(
            witten_c(2),
            Rat::new(Int::from(32 * 479), factorial(17) * Int::from(5))
        );
        assert_eq!(
            witten_c(3),
            Rat::new(
                Int::from(128u64 * 5 * 43 * 19309),
                factorial(23) * Int::from(9 * 7 * 13)
            )
        );
        assert_eq!(
            witten_c(4),
            Rat::new(
                Int::from(256u64 * 13 * 241 * 64009163),
                factorial(31) * Int::from(5 * 17)
            )
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_regular(3).len(), 10);
        assert_eq!(enumerate_regular(4).len(), 25);
        assert_eq!(enumerate_regular(5).len(), 46);
        assert_eq!(enumerate_regular(6).len(), 74);
        // Each weight has exactly the two exceptional tuples on top.
        for w in 3..=6u32 {
            assert_eq!(
                enumerate_convergent(w).len(),
                enumerate_regular(w).len() + 2
            );
        }
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        for w in 3..=6u32 {
            let listed = enumerate_convergent(w);
            let mut brute = Vec::new();
            for s1 in 0..=w {
                for s2 in 0..=w {
                    for s3 in 0..=w {
                        for s4 in 0..=w {
                            if s1 + s2 + s3 + s4 == w {
                                let a = ZetaSoArgs::new(s1, s2, s3, s4);
                                if a.converges() {
                                    brute.push(a);
                                }
                            }
                        }
                    }
                }
            }
            brute.sort();
            let mut sorted = listed.clone();
            sorted.sort();
            assert_eq!(sorted, brute);
            assert_eq!(listed, sorted, "enumeration must be lexicographic");
        }
    }
}

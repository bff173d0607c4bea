//! High-precision evaluation of alternating Euler sums of depth <= 2.
//!
//! Depth-1 sums are a short direct sum plus an Euler-Maclaurin (plain
//! sign) or Boole (alternating sign) tail with a certified remainder.
//! Depth-2 sums split at a cutoff N: below it the outer tail is carried
//! down by exact recursion; above it the outer tail is replaced by its
//! asymptotic expansion, and each resulting one-dimensional tail
//! sum_{n>=N} x^n n^{-b} (n+1)^{-p} is reduced by exact partial
//! fractions to cached power tails. All remainder bounds are explicit.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num::{One, Zero};

use crate::exact::{
    bernoulli, binomial, factorial, rat, rat_abs_f64_upper, rising, Int, Rat,
};
use crate::terms::{Combo, EulerTerm, Sign, SignedArg};

use super::bigfloat::{Bf, PrecisionReal};
use super::cache::ConstantCache;
use super::{EvalConfig, EvalError};

const LOG10_2: f64 = 0.301029995663981195;
const LOG10_PI: f64 = 0.497149872694133854;

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Plus => Sign::Minus,
        Sign::Minus => Sign::Plus,
    }
}

/// Upper bound on log10 |x| (within one bit).
fn log10_int_upper(x: &Int) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    x.bits() as f64 * LOG10_2
}

fn log10_rat_upper(r: &Rat) -> f64 {
    let dbits = r.denom().bits().saturating_sub(1);
    log10_int_upper(r.numer()) - dbits as f64 * LOG10_2
}

/// log10 of an upper bound on sum_{m >= n} m^{-e}, for e > 1:
/// n^{-e} (1 + n/(e-1)).
fn log10_power_tail(e: f64, n: f64) -> f64 {
    debug_assert!(e > 1.0);
    -e * n.log10() + (1.0 + n / (e - 1.0)).log10()
}

/// Bernoulli coefficient of the Euler-Maclaurin tail expansion:
/// sum_{m>=a} m^{-s} = a^{1-s}/(s-1) + a^{-s}/2
///                   + sum_{j>=1} B_{2j}/(2j)! (s)_{2j-1} a^{-(s+2j-1)}.
fn hurwitz_bcoeff(s: u32, j: u32) -> Rat {
    bernoulli(2 * j as u64)
        * Rat::new(rising(s as u64, 2 * j as u64 - 1), factorial(2 * j as u64))
}

/// Boole expansion coefficient: sum_{j>=0} (-1)^j (a+j)^{-s} equals
/// sum_k g_k a^{-(s+k)} asymptotically, with g_0 = 1/2 and, for odd k,
/// g_k = (2^{k+1} - 1) B_{k+1} / (k+1)! * (s)_k. Even k >= 2 vanish.
fn boole_coeff(s: u32, k: u32) -> Rat {
    if k == 0 {
        return rat(1, 2);
    }
    debug_assert!(k % 2 == 1);
    let two_pow = Rat::from_integer((Int::one() << (k as usize + 1)) - Int::one());
    two_pow
        * bernoulli(k as u64 + 1)
        * Rat::new(rising(s as u64, k as u64), factorial(k as u64 + 1))
}

/// sum_{n >= a} n^{-s} for s >= 2 by Euler-Maclaurin at a. None when the
/// expansion cannot reach the target at this base point (a too small).
fn em_zeta_tail(s: u32, a: u64, target: f64, bits: u32) -> Option<PrecisionReal> {
    let la = (a as f64).log10();
    let tlog = target.max(1e-300).log10();
    // Integral and half terms.
    let mut value = Bf::recip_upow(a, s - 1, bits)
        .mul_rat(&Rat::new(Int::one(), Int::from(s - 1)));
    value = value.add(&Bf::recip_upow(a, s, bits).mul_rat(&rat(1, 2)));
    let mut ops = 4u64;
    let mut prev = f64::INFINITY;
    for j in 1..=400u32 {
        let c = hurwitz_bcoeff(s, j);
        let q = s + 2 * j - 1;
        // Remainder when truncating before term j: twice the term itself
        // (the derivatives of x^{-s} are totally monotone).
        let rl = LOG10_2 + log10_rat_upper(&c) - q as f64 * la;
        if rl <= tlog {
            let err = 10f64.powf(rl) + ops as f64 * 2f64.powi(-(bits as i32) + 1);
            return Some(PrecisionReal::new(value, err));
        }
        if rl >= prev {
            return None;
        }
        prev = rl;
        // Large Bernoulli-derived coefficients would amplify the power's
        // truncation error, so form each term at elevated precision and
        // truncate the product once.
        let extra = (log10_rat_upper(&c) / LOG10_2).ceil().max(0.0) as u32 + 16;
        let term = Bf::recip_upow(a, q, bits + extra).mul_rat(&c).with_bits(bits);
        value = value.add(&term);
        ops += 2;
    }
    None
}

/// sum_{n >= a} (-1)^n n^{-s} by Boole summation at a, s >= 1. None when
/// the expansion cannot reach the target at this base point.
fn boole_alt_tail(s: u32, a: u64, target: f64, bits: u32) -> Option<PrecisionReal> {
    let la = (a as f64).log10();
    let tlog = target.max(1e-300).log10();
    let mut value = Bf::recip_upow(a, s, bits).mul_rat(&rat(1, 2));
    let mut ops = 3u64;
    // Remainder with m derivative orders kept:
    // |R_m| <= 8 / pi^m * (s)_{m-1} * a^{1-s-m}.
    let mut lpoch = 0.0; // log10 (s)_{m-1}
    let mut m = 1u32;
    let mut prev = f64::INFINITY;
    loop {
        let rl = 0.903_089_986_991_943_6 // log10 8
            + lpoch
            - m as f64 * LOG10_PI
            + (1.0 - s as f64 - m as f64) * la;
        if rl <= tlog {
            let signed = if a % 2 == 1 { value.neg() } else { value };
            let err = 10f64.powf(rl) + ops as f64 * 2f64.powi(-(bits as i32) + 1);
            return Some(PrecisionReal::new(signed, err));
        }
        if rl >= prev || m > 800 {
            return None;
        }
        prev = rl;
        let k = m; // next odd derivative order
        let g = boole_coeff(s, k);
        // Same coefficient-amplification guard as the plain tail.
        let extra = (log10_rat_upper(&g) / LOG10_2).ceil().max(0.0) as u32 + 16;
        let term = Bf::recip_upow(a, s + k, bits + extra).mul_rat(&g).with_bits(bits);
        value = value.add(&term);
        ops += 2;
        lpoch += ((s as f64 + m as f64 - 1.0) * (s as f64 + m as f64)).log10();
        m += 2;
    }
}

type TailKey = (i8, u32, u64, u32);

static TAIL_MEMO: OnceLock<Mutex<HashMap<TailKey, PrecisionReal>>> = OnceLock::new();

/// sum_{n >= start} x^n n^{-s} with absolute error below `target`.
fn tail_power_sum(
    x: Sign,
    s: u32,
    start: u64,
    target: f64,
    bits: u32,
) -> Result<PrecisionReal, EvalError> {
    if x == Sign::Plus && s < 2 {
        return Err(EvalError::DivergentTerm);
    }
    let target = target.max(1e-300);
    let key: TailKey = (x.as_i32() as i8, s, start, bits);
    let memo = TAIL_MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().unwrap().get(&key) {
        if v.err <= target {
            return Ok(v.clone());
        }
    }
    let mut a = start.max(40 + bits as u64 / 2);
    for _ in 0..10 {
        let tail = match x {
            Sign::Plus => em_zeta_tail(s, a, target * 0.5, bits),
            Sign::Minus => boole_alt_tail(s, a, target * 0.5, bits),
        };
        if let Some(t) = tail {
            let mut value = t.value;
            for n in start..a {
                let p = Bf::recip_upow(n, s, bits);
                value = if x == Sign::Minus && n % 2 == 1 {
                    value.sub(&p)
                } else {
                    value.add(&p)
                };
            }
            let err = t.err + (a - start + 4) as f64 * 2f64.powi(-(bits as i32) + 1);
            let out = PrecisionReal::new(value, err);
            memo.lock().unwrap().insert(key, out.clone());
            return Ok(out);
        }
        a *= 2;
    }
    Err(EvalError::TargetUnreachable(format!(
        "power tail x={:?} s={s} start={start}",
        x
    )))
}

/// Evaluate a depth-1 sum: sum_{n>=1} x^n n^{-s} up to sign conventions
/// of the term notation (z(b1) = -ln 2, z(s) = zeta(s)).
pub fn eval_depth1(arg: SignedArg, cfg: &EvalConfig) -> Result<PrecisionReal, EvalError> {
    if arg == SignedArg::pos(1) {
        return Err(EvalError::DivergentTerm);
    }
    let v = tail_power_sum(arg.sign, arg.exponent, 1, cfg.epsilon() * 0.25, cfg.bits())?;
    Ok(v)
}

/// Truncated asymptotic expansion of the outer tail Z(a) = sum_{m>=a}
/// x^m m^{-s} in powers of a^{-1}, with the expansion remainder already
/// summed against the inner weight n^{-si} over n >= nn. For x = -1 the
/// listed coefficients describe A(s,a) = sum_j (-1)^j (a+j)^{-s}, i.e.
/// Z(a) = (-1)^a A(s,a). Returns (coefficients, summed remainder bound).
fn outer_expansion(
    so: u32,
    xo: Sign,
    si: u32,
    nn: u64,
    target: f64,
) -> Option<(Vec<(Rat, u32)>, f64)> {
    let nf = nn as f64;
    let tlog = target.max(1e-300).log10();
    let mut entries: Vec<(Rat, u32)> = Vec::new();
    match xo {
        Sign::Plus => {
            entries.push((Rat::new(Int::one(), Int::from(so - 1)), so - 1));
            entries.push((rat(1, 2), so));
            let mut prev = f64::INFINITY;
            for j in 1..=300u32 {
                let c = hurwitz_bcoeff(so, j);
                let q = so + 2 * j - 1;
                let rl = LOG10_2
                    + log10_rat_upper(&c)
                    + log10_power_tail((si + q) as f64, nf);
                if rl <= tlog {
                    return Some((entries, 10f64.powf(rl)));
                }
                if rl >= prev {
                    return None;
                }
                prev = rl;
                entries.push((c, q));
            }
            None
        }
        Sign::Minus => {
            entries.push((rat(1, 2), so));
            let mut lpoch = 0.0;
            let mut m = 1u32;
            let mut prev = f64::INFINITY;
            loop {
                // (n+1)^{1-so-m} <= n^{1-so-m}, so the summed remainder is
                // below 8/pi^m (so)_{m-1} sum_{n>=nn} n^{-(si+so+m-1)}.
                let rl = 0.903_089_986_991_943_6
                    + lpoch
                    - m as f64 * LOG10_PI
                    + log10_power_tail((si + so + m) as f64 - 1.0, nf);
                if rl <= tlog {
                    return Some((entries, 10f64.powf(rl)));
                }
                if rl >= prev || m > 800 {
                    return None;
                }
                prev = rl;
                entries.push((boole_coeff(so, m), so + m));
                lpoch += ((so as f64 + m as f64 - 1.0) * (so as f64 + m as f64)).log10();
                m += 2;
            }
        }
    }
}

/// U(b, p, x) = sum_{n >= n0} x^n n^{-b} (n+1)^{-p}, via the exact
/// partial fractions
/// n^{-b}(n+1)^{-p} = sum_t (-1)^t C(p+t-1,t) n^{-(b-t)}
///                  + sum_u (-1)^b C(b+u-1,u) (n+1)^{-(p-u)}.
/// For x = +1 the two first-order pieces diverge separately but their
/// coefficients are exact negatives; the pair telescopes to alpha/n0.
fn u_tail(
    b: u32,
    p: u32,
    x: Sign,
    n0: u64,
    budget: f64,
    bits: u32,
) -> Result<PrecisionReal, EvalError> {
    let budget = budget.max(1e-300);
    let mut parts: Vec<(Rat, u32, u64, bool)> = Vec::new();
    for t in 0..b {
        let i = b - t;
        if x == Sign::Plus && i == 1 {
            continue;
        }
        let mut c = Rat::from_integer(binomial((p + t - 1) as u64, t as u64));
        if t % 2 == 1 {
            c = -c;
        }
        parts.push((c, i, n0, false));
    }
    for u in 0..p {
        let j = p - u;
        if x == Sign::Plus && j == 1 {
            continue;
        }
        let mut c = Rat::from_integer(binomial((b + u - 1) as u64, u as u64));
        if b % 2 == 1 {
            c = -c;
        }
        // W(j) = sum x^n (n+1)^{-j} = x * sum_{m >= n0+1} x^m m^{-j}
        parts.push((c, j, n0 + 1, x == Sign::Minus));
    }
    let mut acc = PrecisionReal::exact_zero(bits);
    if x == Sign::Plus {
        let mut alpha = Rat::from_integer(binomial((p + b - 2) as u64, (b - 1) as u64));
        if (b - 1) % 2 == 1 {
            alpha = -alpha;
        }
        let v = Bf::from_rat(&(alpha / Rat::from_integer(Int::from(n0))), bits);
        acc = acc.add(&PrecisionReal::new(v, 2f64.powi(-(bits as i32) + 1)));
    }
    let count = parts.len().max(1) as f64;
    for (c, s, start, negate) in parts {
        let cb = rat_abs_f64_upper(&c);
        // Compute the power tail with enough extra guard bits that the
        // absolute truncation error survives multiplication by c.
        let extra = cb.log2().ceil().max(0.0) as u32 + 16;
        let v = tail_power_sum(x, s, start, (budget / (2.0 * count)) / cb.max(1.0), bits + extra)?;
        let v = if negate { v.neg() } else { v };
        let scaled = v.scale_rat(&c);
        let scaled = PrecisionReal::new(
            scaled.value.with_bits(bits),
            scaled.err + 2f64.powi(-(bits as i32) + 1),
        );
        acc = acc.add(&scaled);
    }
    Ok(acc)
}

/// One attempt at the depth-2 sum S = sum_{m > n >= 1} xo^m xi^n
/// m^{-so} n^{-si} with cutoff nn.
fn depth2_at(
    so: u32,
    xo: Sign,
    si: u32,
    xi: Sign,
    nn: u64,
    cfg: &EvalConfig,
) -> Result<PrecisionReal, EvalError> {
    let bits = cfg.bits();
    let eps = cfg.epsilon();
    let (entries, rem_err) = outer_expansion(so, xo, si, nn, eps / 8.0)
        .ok_or_else(|| EvalError::TargetUnreachable(format!("outer expansion at {nn}")))?;
    // Tail part: T = sum_{n >= nn} xi^n n^{-si} Z(n+1). For xo = -1,
    // Z(n+1) = (-1)^{n+1} A(so, n+1), so the sign flips onto xi and an
    // overall minus appears.
    let y = match xo {
        Sign::Plus => xi,
        Sign::Minus => flip(xi),
    };
    let mut tail = PrecisionReal::new(Bf::zero(bits), rem_err);
    let per = eps / (8.0 * entries.len() as f64);
    for (c, q) in &entries {
        let cb = rat_abs_f64_upper(c);
        let extra = cb.log2().ceil().max(0.0) as u32 + 16;
        let u = u_tail(si, *q, y, nn, (per / cb.max(1.0)).max(1e-300), bits + extra)?;
        let scaled = u.scale_rat(c);
        let scaled = PrecisionReal::new(
            scaled.value.with_bits(bits),
            scaled.err + 2f64.powi(-(bits as i32) + 1),
        );
        tail = tail.add(&scaled);
    }
    if xo == Sign::Minus {
        tail = tail.neg();
    }
    // Direct part n = 1..nn-1, carrying Z(n+1) down by exact recursion.
    let z = tail_power_sum(xo, so, nn, eps / 8.0, bits)?;
    let mut zcur = z.value.clone();
    let mut acc = tail.value.clone();
    for n in (1..nn).rev() {
        let inner = Bf::recip_upow(n, si, bits);
        let prod = inner.mul(&zcur);
        acc = if xi == Sign::Minus && n % 2 == 1 {
            acc.sub(&prod)
        } else {
            acc.add(&prod)
        };
        let outer = Bf::recip_upow(n, so, bits);
        zcur = if xo == Sign::Minus && n % 2 == 1 {
            zcur.sub(&outer)
        } else {
            zcur.add(&outer)
        };
    }
    let nf = nn as f64;
    let ulp = 2f64.powi(-(bits as i32) + 1);
    let err = tail.err + (z.err + 3.0 * nf * ulp) * (2.0 + nf.ln()) + 4.0 * nf * ulp;
    Ok(PrecisionReal::new(acc, err))
}

fn eval_depth2(
    outer: SignedArg,
    inner: SignedArg,
    cfg: &EvalConfig,
) -> Result<PrecisionReal, EvalError> {
    let mut nn = 64u64.max(3 * cfg.digits as u64);
    let mut last = String::new();
    for _ in 0..3 {
        match depth2_at(outer.exponent, outer.sign, inner.exponent, inner.sign, nn, cfg) {
            Ok(v) => return Ok(v),
            Err(EvalError::TargetUnreachable(e)) => {
                last = e;
                nn *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(EvalError::TargetUnreachable(last))
}

type MemoKey = (String, u32);

static TERM_MEMO: OnceLock<Mutex<HashMap<MemoKey, PrecisionReal>>> = OnceLock::new();

/// Evaluate one admissible Euler term with err <= 10^-digits.
pub fn eval_term(term: &EulerTerm, cfg: &EvalConfig) -> Result<PrecisionReal, EvalError> {
    let key = (term.key(), cfg.digits);
    let memo = TERM_MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = match *term.args() {
        [a] => eval_depth1(a, cfg)?,
        [o, i] => eval_depth2(o, i, cfg)?,
        _ => unreachable!("terms have depth 1 or 2"),
    };
    debug_assert!(
        v.err <= 10f64.powi(-(cfg.digits as i32)),
        "error bound {} misses the {} digit request for {}",
        v.err,
        cfg.digits,
        term.key()
    );
    memo.lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// Evaluate a rational combination of terms, consulting the on-disk
/// constant cache when one is supplied.
pub fn eval_combo(
    combo: &Combo,
    cfg: &EvalConfig,
    cache: Option<&ConstantCache>,
) -> Result<PrecisionReal, EvalError> {
    let mut acc = PrecisionReal::exact_zero(cfg.bits());
    for (t, c) in combo.iter() {
        let v = match cache.and_then(|ch| ch.get(&t.key(), cfg.digits, cfg.bits())) {
            Some(v) => v,
            None => {
                let v = eval_term(t, cfg)?;
                if let Some(ch) = cache {
                    ch.put(&t.key(), cfg.digits, &v);
                }
                v
            }
        };
        acc = acc.add(&v.scale_rat(c));
    }
    Ok(acc)
}

/// arctan(1/k) by its alternating Taylor series; the truncation error is
/// below the first omitted term, which is below one ulp at the stop.
fn atan_recip(k: u64, bits: u32) -> PrecisionReal {
    let step = Rat::new(Int::one(), Int::from(k * k));
    let mut p = Bf::recip_upow(k, 1, bits);
    let mut acc = Bf::zero(bits);
    let mut j = 0u64;
    loop {
        let term = p.mul_rat(&Rat::new(Int::one(), Int::from(2 * j + 1)));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        p = p.mul_rat(&step);
        j += 1;
        if p.is_zero() || j > 1_000_000 {
            break;
        }
    }
    PrecisionReal::new(acc, (2 * j + 8) as f64 * 2f64.powi(-(bits as i32) + 1))
}

/// pi by the Machin formula 16 arctan(1/5) - 4 arctan(1/239).
pub fn pi(cfg: &EvalConfig) -> PrecisionReal {
    let key = ("pi".to_string(), cfg.digits);
    let memo = TERM_MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().unwrap().get(&key) {
        return v.clone();
    }
    let bits = cfg.bits();
    let a5 = atan_recip(5, bits).scale_rat(&crate::exact::rat_int(16));
    let a239 = atan_recip(239, bits).scale_rat(&crate::exact::rat_int(4));
    let v = a5.sub(&a239);
    memo.lock().unwrap().insert(key, v.clone());
    v
}

/// zeta_so(2m, 2m, 2m, 2m) = c(m) pi^{8m} with its exact rational c(m).
pub fn eval_witten(m: u32, cfg: &EvalConfig) -> PrecisionReal {
    let p = pi(cfg);
    let mut acc = PrecisionReal::new(Bf::from_u64(1, cfg.bits()), 0.0);
    for _ in 0..(8 * m) {
        acc = acc.mul(&p);
    }
    acc.scale_rat(&crate::reduce::witten_c(m))
}

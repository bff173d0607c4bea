//! Exact integer and rational arithmetic: binomials, factorials and
//! Bernoulli numbers used by the reduction formulas and by `witten_c`.

use std::sync::Mutex;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// C(n, k), with C(n, k) = 0 for k > n.
pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> Int {
    let mut acc = Int::one();
    for i in 2..=n {
        acc *= Int::from(i);
    }
    acc
}

/// Rising factorial (s)_k = s (s+1) ... (s+k-1), with (s)_0 = 1.
pub fn rising(s: u64, k: u64) -> Int {
    let mut acc = Int::one();
    for i in 0..k {
        acc *= Int::from(s + i);
    }
    acc
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// 2^e as an exact rational, for any integer e (negative allowed).
pub fn pow2(e: i64) -> Rat {
    let p = Int::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(Int::one(), p)
    }
}

static BERNOULLI_CACHE: Mutex<Vec<Option<Rat>>> = Mutex::new(Vec::new());

/// Bernoulli number B_n under the convention B_1 = -1/2, by the defining
/// recurrence sum_{k=0}^{n} C(n+1, k) B_k = 0.
pub fn bernoulli(n: u64) -> Rat {
    let n = n as usize;
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    if cache.len() <= n {
        cache.resize(n + 1, None);
    }
    if let Some(v) = &cache[n] {
        return v.clone();
    }
    // Fill in order; each entry depends on all previous ones.
    for m in 0..=n {
        if cache[m].is_some() {
            continue;
        }
        let v = if m == 0 {
            Rat::one()
        } else {
            let mut acc = Rat::zero();
            for k in 0..m {
                acc += Rat::from_integer(binomial(m as u64 + 1, k as u64))
                    * cache[k].as_ref().unwrap();
            }
            -acc / Rat::from_integer(Int::from(m as u64 + 1))
        };
        cache[m] = Some(v);
    }
    cache[n].clone().unwrap()
}

/// Upper bound on |x| as f64, rounded up a little. Used for error budgets.
pub fn rat_abs_f64_upper(x: &Rat) -> f64 {
    let n = x.numer().abs();
    let d = x.denom().clone();
    let nf = bigint_to_f64(&n);
    let df = bigint_to_f64(&d);
    (nf / df) * (1.0 + 1e-12) + f64::MIN_POSITIVE
}

pub fn bigint_to_f64(x: &Int) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

//! Fixed-point arbitrary-precision reals: an integer mantissa at a fixed
//! binary scale. Addition is exact; multiplication and division truncate
//! at one ulp (2^-bits), which the evaluators fold into their error
//! budgets via generous guard bits.

use num::{One, Signed, ToPrimitive, Zero};

use crate::exact::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bf {
    mant: Int,
    bits: u32,
}

impl Bf {
    pub fn zero(bits: u32) -> Self {
        Bf { mant: Int::zero(), bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn from_rat(r: &Rat, bits: u32) -> Self {
        let mant = (r.numer() << bits) / r.denom();
        Bf { mant, bits }
    }

    pub fn from_u64(n: u64, bits: u32) -> Self {
        Bf { mant: Int::from(n) << bits, bits }
    }

    pub fn from_f64(x: f64, bits: u32) -> Self {
        let r = Rat::from_float(x).expect("finite float");
        Bf::from_rat(&r, bits)
    }

    /// 1 / n^s at this scale.
    pub fn recip_upow(n: u64, s: u32, bits: u32) -> Self {
        let den = Int::from(n).pow(s);
        Bf { mant: (Int::one() << bits) / den, bits }
    }

    pub fn add(&self, other: &Bf) -> Bf {
        debug_assert_eq!(self.bits, other.bits);
        Bf { mant: &self.mant + &other.mant, bits: self.bits }
    }

    pub fn sub(&self, other: &Bf) -> Bf {
        debug_assert_eq!(self.bits, other.bits);
        Bf { mant: &self.mant - &other.mant, bits: self.bits }
    }

    pub fn neg(&self) -> Bf {
        Bf { mant: -&self.mant, bits: self.bits }
    }

    pub fn mul(&self, other: &Bf) -> Bf {
        debug_assert_eq!(self.bits, other.bits);
        Bf { mant: (&self.mant * &other.mant) >> self.bits, bits: self.bits }
    }

    pub fn div(&self, other: &Bf) -> Bf {
        debug_assert_eq!(self.bits, other.bits);
        assert!(!other.mant.is_zero(), "division by zero");
        Bf { mant: (&self.mant << self.bits) / &other.mant, bits: self.bits }
    }

    /// Multiply by an exact rational (single truncation).
    pub fn mul_rat(&self, r: &Rat) -> Bf {
        Bf { mant: (&self.mant * r.numer()) / r.denom(), bits: self.bits }
    }

    pub fn abs(&self) -> Bf {
        Bf { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// Change the scale, truncating or zero-extending the mantissa.
    pub fn with_bits(&self, bits: u32) -> Bf {
        if bits == self.bits {
            self.clone()
        } else if bits > self.bits {
            Bf { mant: &self.mant << (bits - self.bits), bits }
        } else {
            Bf { mant: &self.mant >> (self.bits - bits), bits }
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Split the shift so huge mantissas survive the conversion.
        let half = self.bits / 2;
        let hi = &self.mant >> half;
        let hi_f = hi.to_f64().unwrap_or(f64::INFINITY);
        hi_f * 2f64.powi(-((self.bits - half) as i32))
    }

    /// Decimal rendering with the given number of fractional digits,
    /// rounded half to even.
    pub fn to_decimal(&self, digits: u32) -> String {
        let negative = self.mant.is_negative();
        let x = self.mant.abs();
        let pow10 = Int::from(10u32).pow(digits);
        let scaled = x * &pow10;
        let mut q = &scaled >> self.bits;
        let rem = &scaled - (&q << self.bits);
        let half = Int::one() << (self.bits - 1);
        if rem > half || (rem == half && (&q % 2) == Int::one()) {
            q += 1;
        }
        let int_part = &q / &pow10;
        let frac_part = &q % &pow10;
        let sign = if negative && !q.is_zero() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac:0>width$}", frac = frac_part, width = digits as usize)
        }
    }

    /// Parse a plain decimal string at the given scale.
    pub fn parse_decimal(s: &str, bits: u32) -> Result<Bf, String> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_str, frac_str) = match body.split_once('.') {
            Some((a, b)) => (a, b),
            None => (body, ""),
        };
        if int_str.is_empty() && frac_str.is_empty() {
            return Err(format!("empty decimal {s:?}"));
        }
        let digits = format!("{}{}", if int_str.is_empty() { "0" } else { int_str }, frac_str);
        let num: Int = digits.parse().map_err(|_| format!("bad decimal {s:?}"))?;
        let den = Int::from(10u32).pow(frac_str.len() as u32);
        let r = Rat::new(if neg { -num } else { num }, den);
        Ok(Bf::from_rat(&r, bits))
    }
}

/// A numeric value with a certified absolute error bound: the true
/// quantity lies in [value - err, value + err].
#[derive(Debug, Clone)]
pub struct PrecisionReal {
    pub value: Bf,
    pub err: f64,
}

impl PrecisionReal {
    pub fn new(value: Bf, err: f64) -> Self {
        debug_assert!(err >= 0.0);
        PrecisionReal { value, err }
    }

    pub fn exact_zero(bits: u32) -> Self {
        PrecisionReal { value: Bf::zero(bits), err: 0.0 }
    }

    pub fn from_f64(v: f64, err: f64, bits: u32) -> Self {
        PrecisionReal { value: Bf::from_f64(v, bits), err }
    }

    pub fn add(&self, other: &PrecisionReal) -> PrecisionReal {
        PrecisionReal {
            value: self.value.add(&other.value),
            err: self.err + other.err,
        }
    }

    pub fn sub(&self, other: &PrecisionReal) -> PrecisionReal {
        PrecisionReal {
            value: self.value.sub(&other.value),
            err: self.err + other.err,
        }
    }

    pub fn neg(&self) -> PrecisionReal {
        PrecisionReal { value: self.value.neg(), err: self.err }
    }

    pub fn mul(&self, other: &PrecisionReal) -> PrecisionReal {
        let am = self.to_f64().abs() * (1.0 + 1e-12) + self.err;
        let bm = other.to_f64().abs() * (1.0 + 1e-12) + other.err;
        PrecisionReal {
            value: self.value.mul(&other.value),
            err: am * other.err
                + bm * self.err
                + 2f64.powi(-(self.value.bits() as i32) + 2),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> PrecisionReal {
        let factor = crate::exact::rat_abs_f64_upper(r);
        PrecisionReal {
            value: self.value.mul_rat(r),
            err: self.err * factor + 2f64.powi(-(self.value.bits() as i32) + 1),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        self.value.to_decimal(digits)
    }
}

/// True iff the two certified intervals overlap:
/// |a.value - b.value| <= a.err + b.err.
pub fn numeric_equal(a: &PrecisionReal, b: &PrecisionReal) -> bool {
    let bits = a.value.bits().min(b.value.bits());
    let av = a.value.with_bits(bits);
    let bv = b.value.with_bits(bits);
    let diff = av.sub(&bv).abs();
    // One ulp of slack for the alignment truncation above.
    let budget = a.err + b.err + 2f64.powi(-(bits as i32) + 2);
    let bound = Bf::from_f64(budget, bits);
    diff.sub(&bound).is_negative() || diff == bound
}

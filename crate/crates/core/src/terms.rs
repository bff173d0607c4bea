//! Canonical alternating Euler sums of depth one or two, and finite
//! rational linear combinations of them.
//!
//! A term is written outer index first, matching the summation order
//! m1 > m2 >= 1. A bar marks a negative sign, so `z(b1,2)` is the sum
//! over m1 > m2 of (-1)^{m1} / (m1 * m2^2).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exact::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// One slot of an Euler sum: an exponent >= 1 together with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedArg {
    pub exponent: u32,
    pub sign: Sign,
}

impl SignedArg {
    pub fn pos(exponent: u32) -> Self {
        SignedArg { exponent, sign: Sign::Plus }
    }

    pub fn neg(exponent: u32) -> Self {
        SignedArg { exponent, sign: Sign::Minus }
    }

    /// Merge of two slots on the diagonal m = n: exponents add, signs multiply.
    pub fn merge(self, other: SignedArg) -> SignedArg {
        SignedArg {
            exponent: self.exponent + other.exponent,
            sign: self.sign.mul(other.sign),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("divergent term: leading argument (1, +1)")]
    DivergentTerm,
    #[error("bad depth {0}: only depth 1 and 2 are supported")]
    BadDepth(usize),
    #[error("bad exponent 0: exponents must be >= 1")]
    BadExponent,
}

/// An admissible alternating Euler sum of depth 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EulerTerm {
    args: Vec<SignedArg>,
}

impl EulerTerm {
    pub fn new(args: Vec<SignedArg>) -> Result<Self, TermError> {
        if args.is_empty() || args.len() > 2 {
            return Err(TermError::BadDepth(args.len()));
        }
        if args.iter().any(|a| a.exponent == 0) {
            return Err(TermError::BadExponent);
        }
        if args[0] == SignedArg::pos(1) {
            return Err(TermError::DivergentTerm);
        }
        Ok(EulerTerm { args })
    }

    pub fn depth1(arg: SignedArg) -> Result<Self, TermError> {
        EulerTerm::new(vec![arg])
    }

    pub fn depth2(outer: SignedArg, inner: SignedArg) -> Result<Self, TermError> {
        EulerTerm::new(vec![outer, inner])
    }

    pub fn args(&self) -> &[SignedArg] {
        &self.args
    }

    pub fn depth(&self) -> usize {
        self.args.len()
    }

    pub fn weight(&self) -> u32 {
        self.args.iter().map(|a| a.exponent).sum()
    }

    /// Stable text key, e.g. `z(3)` or `z(b1,2)`. Doubles as the cache key.
    pub fn key(&self) -> String {
        let body: Vec<String> = self
            .args
            .iter()
            .map(|a| match a.sign {
                Sign::Plus => a.exponent.to_string(),
                Sign::Minus => format!("b{}", a.exponent),
            })
            .collect();
        format!("z({})", body.join(","))
    }

    pub fn latex(&self) -> String {
        let body: Vec<String> = self
            .args
            .iter()
            .map(|a| match a.sign {
                Sign::Plus => a.exponent.to_string(),
                Sign::Minus => format!("\\overline{{{}}}", a.exponent),
            })
            .collect();
        format!("\\zeta({})", body.join(","))
    }

    /// Parse the `z(...)` key syntax back into a term.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let inner = s
            .strip_prefix("z(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("malformed term {s:?}: expected z(...)"))?;
        let mut args = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            let (sign, digits) = match part.strip_prefix('b') {
                Some(rest) => (Sign::Minus, rest),
                None => (Sign::Plus, part),
            };
            let exponent: u32 = digits
                .parse()
                .map_err(|_| format!("bad exponent {digits:?} in {s:?}"))?;
            args.push(SignedArg { exponent, sign });
        }
        EulerTerm::new(args).map_err(|e| e.to_string())
    }
}

impl fmt::Display for EulerTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// A finite formal rational linear combination of Euler terms.
/// Zero coefficients are never stored; keys are canonical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Combo {
    terms: BTreeMap<EulerTerm, Rat>,
}

impl Combo {
    pub fn new() -> Self {
        Combo::default()
    }

    pub fn single(term: EulerTerm, coef: Rat) -> Self {
        let mut c = Combo::new();
        c.add_term(term, coef);
        c
    }

    pub fn add_term(&mut self, term: EulerTerm, coef: Rat) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(term.clone()).or_insert_with(Rat::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&term);
        }
    }

    pub fn add(&self, other: &Combo) -> Combo {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rat) -> Combo {
        if factor.is_zero() {
            return Combo::new();
        }
        let mut out = Combo::new();
        for (t, c) in &self.terms {
            out.terms.insert(t.clone(), c * factor);
        }
        out
    }

    pub fn add_scaled(&mut self, factor: &Rat, other: &Combo) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * factor);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EulerTerm, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, term: &EulerTerm) -> Rat {
        self.terms.get(term).cloned().unwrap_or_else(Rat::zero)
    }

    /// The set of distinct term weights present in the combo.
    pub fn weights(&self) -> BTreeSet<u32> {
        self.terms.keys().map(|t| t.weight()).collect()
    }

    pub fn max_depth(&self) -> usize {
        self.terms.keys().map(|t| t.depth()).max().unwrap_or(0)
    }

    pub fn render_plain(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if abs.is_one() {
                out.push_str(&t.key());
            } else {
                out.push_str(&format!("{}*{}", abs, t.key()));
            }
        }
        out
    }

    pub fn render_latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !abs.is_one() {
                if abs.denom().is_one() {
                    out.push_str(&format!("{}", abs.numer()));
                } else {
                    out.push_str(&format!("\\frac{{{}}}{{{}}}", abs.numer(), abs.denom()));
                }
            }
            out.push_str(&t.latex());
        }
        out
    }

    /// JSON form: array of `{term, num, den}` objects in canonical order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(t, c)| {
                    json!({
                        "term": t.key(),
                        "num": c.numer().to_string(),
                        "den": c.denom().to_string(),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let arr = v.as_array().ok_or("combo JSON must be an array")?;
        let mut combo = Combo::new();
        for item in arr {
            let term = item
                .get("term")
                .and_then(Value::as_str)
                .ok_or("missing term field")?;
            let num = item
                .get("num")
                .and_then(Value::as_str)
                .ok_or("missing num field")?;
            let den = item
                .get("den")
                .and_then(Value::as_str)
                .ok_or("missing den field")?;
            let num: crate::exact::Int = num.parse().map_err(|_| format!("bad num {num:?}"))?;
            let den: crate::exact::Int = den.parse().map_err(|_| format!("bad den {den:?}"))?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            combo.add_term(EulerTerm::parse(term)?, Rat::new(num, den));
        }
        Ok(combo)
    }

    /// Parse the plain rendering, e.g. `3/2*z(b1,2) + 1/16*z(3)` or `-z(3)`.
    pub fn parse_plain(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(Combo::new());
        }
        let mut combo = Combo::new();
        // Split on +/- at top level; '(' never nests so a simple scan works.
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut cur_neg = false;
        let mut depth = 0i32;
        for ch in s.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 => {
                    if cur.trim().is_empty() && ch == '-' {
                        cur_neg = !cur_neg;
                    } else if cur.trim().is_empty() {
                        // leading '+', ignore
                    } else {
                        chunks.push((cur_neg, cur.trim().to_string()));
                        cur = String::new();
                        cur_neg = ch == '-';
                    }
                }
                _ => cur.push(ch),
            }
        }
        if !cur.trim().is_empty() {
            chunks.push((cur_neg, cur.trim().to_string()));
        }
        if chunks.is_empty() {
            return Err(format!("empty combo expression {s:?}"));
        }
        for (neg, chunk) in chunks {
            let (coef, term_str) = match chunk.split_once('*') {
                Some((c, t)) => (parse_rat(c.trim())?, t.trim().to_string()),
                None => (Rat::one(), chunk),
            };
            let coef = if neg { -coef } else { coef };
            combo.add_term(EulerTerm::parse(&term_str)?, coef);
        }
        Ok(combo)
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: crate::exact::Int = n.parse().map_err(|_| format!("bad numerator {n:?}"))?;
    let d: crate::exact::Int = d.parse().map_err(|_| format!("bad denominator {d:?}"))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rat::new(n, d))
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_plain())
    }
}

/// Stuffle product of two admissible depth-1 sums:
/// z(a) * z(b) = z(a,b) + z(b,a) + z(a (+) b), from splitting the index
/// set {(m,n)} into m > n, n > m and m = n.
pub fn stuffle_product(a: SignedArg, b: SignedArg) -> Result<Combo, TermError> {
    // Both factors must be admissible on their own.
    EulerTerm::depth1(a)?;
    EulerTerm::depth1(b)?;
    let mut combo = Combo::new();
    combo.add_term(EulerTerm::depth2(a, b)?, Rat::one());
    combo.add_term(EulerTerm::depth2(b, a)?, Rat::one());
    combo.add_term(EulerTerm::depth1(a.merge(b))?, Rat::one());
    Ok(combo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn term(args: &[(u32, i32)]) -> EulerTerm {
        EulerTerm::new(
            args.iter()
                .map(|&(e, s)| SignedArg {
                    exponent: e,
                    sign: if s > 0 { Sign::Plus } else { Sign::Minus },
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn make_term_basics() {
        let z3 = term(&[(3, 1)]);
        assert_eq!(z3.key(), "z(3)");
        assert_eq!(z3.weight(), 3);
        assert_eq!(z3.depth(), 1);

        let zb12 = term(&[(1, -1), (2, 1)]);
        assert_eq!(zb12.key(), "z(b1,2)");
        assert_eq!(zb12.weight(), 3);
        assert_eq!(zb12.depth(), 2);
    }

    #[test]
    fn make_term_rejects_divergent_and_bad_depth() {
        assert_eq!(
            EulerTerm::new(vec![SignedArg::pos(1)]),
            Err(TermError::DivergentTerm)
        );
        assert_eq!(
            EulerTerm::new(vec![SignedArg::pos(1), SignedArg::pos(2)]),
            Err(TermError::DivergentTerm)
        );
        assert_eq!(EulerTerm::new(vec![]), Err(TermError::BadDepth(0)));
        assert_eq!(
            EulerTerm::new(vec![SignedArg::pos(2); 3]),
            Err(TermError::BadDepth(3))
        );
        assert_eq!(
            EulerTerm::new(vec![SignedArg::pos(2), SignedArg::pos(0)]),
            Err(TermError::BadExponent)
        );
        // z(b1) is legal: the alternating weight-1 sum converges to -ln 2.
        assert!(EulerTerm::new(vec![SignedArg::neg(1)]).is_ok());
    }

    #[test]
    fn combo_add_cancels() {
        let z3 = term(&[(3, 1)]);
        let a = Combo::single(z3.clone(), rat_int(1));
        let b = Combo::single(z3, rat_int(-1));
        assert!(a.add(&b).is_empty());
        assert!(a.scale(&Rat::zero()).is_empty());
    }

    #[test]
    fn combo_weight3_example() {
        let mut c = Combo::single(term(&[(1, -1), (2, 1)]), rat_int(1)).scale(&rat(3, 2));
        c.add_term(term(&[(3, 1)]), rat(1, 16));
        assert_eq!(c.coefficient(&term(&[(1, -1), (2, 1)])), rat(3, 2));
        assert_eq!(c.coefficient(&term(&[(3, 1)])), rat(1, 16));
        assert_eq!(c.render_plain(), "3/2*z(b1,2) + 1/16*z(3)");
    }

    #[test]
    fn weights_mixed() {
        let mut c = Combo::single(term(&[(2, 1)]), rat(1, 2));
        c.add_term(term(&[(3, 1)]), rat(-1, 2));
        let w: Vec<u32> = c.weights().into_iter().collect();
        assert_eq!(w, vec![2, 3]);
    }

    #[test]
    fn stuffle_examples() {
        // z(2) * z(3) = z(2,3) + z(3,2) + z(5)
        let c = stuffle_product(SignedArg::pos(2), SignedArg::pos(3)).unwrap();
        assert_eq!(c.render_plain(), "z(2,3) + z(3,2) + z(5)");

        // z(b1) * z(b1) = 2 z(b1,b1) + z(2)
        let c = stuffle_product(SignedArg::neg(1), SignedArg::neg(1)).unwrap();
        assert_eq!(c.coefficient(&term(&[(1, -1), (1, -1)])), rat_int(2));
        assert_eq!(c.coefficient(&term(&[(2, 1)])), rat_int(1));
        assert_eq!(c.len(), 2);

        // z(b2) * z(3) = z(b2,3) + z(3,b2) + z(b5)
        let c = stuffle_product(SignedArg::neg(2), SignedArg::pos(3)).unwrap();
        assert_eq!(c.coefficient(&term(&[(2, -1), (3, 1)])), rat_int(1));
        assert_eq!(c.coefficient(&term(&[(3, 1), (2, -1)])), rat_int(1));
        assert_eq!(c.coefficient(&term(&[(5, -1)])), rat_int(1));
    }

    #[test]
    fn stuffle_rejects_divergent_factor() {
        assert!(stuffle_product(SignedArg::pos(1), SignedArg::pos(2)).is_err());
    }

    #[test]
    fn parse_round_trips() {
        for s in [
            "3/2*z(b1,2) + 1/16*z(3)",
            "-z(3)",
            "z(b1)",
            "1/2*z(2) - 9/16*z(3)",
            "0",
            "2*z(4,2) + 4*z(5,1)",
        ] {
            let c = Combo::parse_plain(s).unwrap();
            assert_eq!(c.render_plain(), s, "canonical form of {s:?}");
            let back = Combo::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c, "json round trip of {s:?}");
        }
    }

    #[test]
    fn latex_rendering() {
        let mut c = Combo::single(term(&[(1, -1), (2, 1)]), rat(3, 2));
        c.add_term(term(&[(3, 1)]), rat_int(-2));
        assert_eq!(
            c.render_latex(),
            "\\frac{3}{2}\\zeta(\\overline{1},2) - 2\\zeta(3)"
        );
    }
}

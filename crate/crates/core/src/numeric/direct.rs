//! Independent evaluation of the double series
//! sum_{m,n>=1} 1/(m^s1 n^s2 (m+n)^s3 (m+2n)^s4) in f64, with a
//! certified error bound. The inner m-sum is closed out exactly through
//! a one-variable partial fraction expansion (the integrand is
//! homogeneous in n), leaving an outer sum over n whose tail is handled
//! by Euler-Maclaurin with explicit remainders. This path shares no
//! code with the reduction formulas or the high-precision evaluator, so
//! agreement between the two is a genuine cross-check.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::exact::{bigint_to_f64, binomial, Int, Rat};
use crate::reduce::ZetaSoArgs;

use super::bigfloat::PrecisionReal;
use super::EvalError;

/// Below this the f64 error accounting cannot be trusted.
pub const DIRECT_FLOOR: f64 = 5e-11;

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

fn bern_f64(n: u64) -> f64 {
    let b = crate::exact::bernoulli(n);
    bigint_to_f64(b.numer()) / bigint_to_f64(b.denom())
}

fn rising_f64(s: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (s + i) as f64;
    }
    acc
}

fn factorial_f64(n: u32) -> f64 {
    let mut acc = 1.0;
    for i in 2..=n {
        acc *= i as f64;
    }
    acc
}

/// (value, error bound) of sum_{n >= a} n^{-q}, q >= 2, integer a.
fn zeta_tail_f64(q: u32, a: f64) -> (f64, f64) {
    let qa = q as f64;
    let mut val = a.powf(1.0 - qa) / (qa - 1.0) + a.powf(-qa) / 2.0;
    for r in 1..=4u32 {
        val += bern_f64(2 * r as u64) / factorial_f64(2 * r) * rising_f64(q, 2 * r - 1)
            * a.powf(1.0 - qa - 2.0 * r as f64);
    }
    let rem = 2.0
        * (bern_f64(10) / factorial_f64(10) * rising_f64(q, 9)).abs()
        * a.powf(-qa - 9.0);
    (val, rem)
}

/// Upper bound on sum_{n >= a} n^{-q}.
fn zeta_tail_bound(q: f64, a: f64) -> f64 {
    a.powf(-q) + a.powf(1.0 - q) / (q - 1.0)
}

/// (value, error bound) of sum_{n >= a} n^{-q} ln n, q >= 2, via
/// Euler-Maclaurin with three derivative corrections. The derivatives of
/// f = x^{-q} ln x are x^{-q-j} (P_j ln x + Q_j) with
/// P_{j+1} = -(q+j) P_j and Q_{j+1} = P_j - (q+j) Q_j.
fn log_tail_f64(q: u32, a: f64) -> (f64, f64) {
    let qa = q as f64;
    let la = a.ln();
    // integral: a^{1-q} (ln a / (q-1) + 1/(q-1)^2)
    let mut val = a.powf(1.0 - qa) * (la / (qa - 1.0) + (qa - 1.0).powi(-2));
    val += a.powf(-qa) * la / 2.0;
    let (mut p, mut qq) = (1.0f64, 0.0f64);
    let mut j = 0u32;
    for r in 1..=3u32 {
        // advance derivatives to order 2r-1
        while j < 2 * r - 1 {
            let pn = -(qa + j as f64) * p;
            let qn = p - (qa + j as f64) * qq;
            p = pn;
            qq = qn;
            j += 1;
        }
        let deriv = a.powf(-qa - j as f64) * (p * la + qq);
        val -= bern_f64(2 * r as u64) / factorial_f64(2 * r) * deriv;
    }
    // remainder via the order-8 derivative: |R| <= 2 zeta(8)/(2 pi)^8 *
    // integral of |f^(8)|
    while j < 8 {
        let pn = -(qa + j as f64) * p;
        let qn = p - (qa + j as f64) * qq;
        p = pn;
        qq = qn;
        j += 1;
    }
    let e = qa + 8.0;
    let int_plain = a.powf(1.0 - e) / (e - 1.0);
    let int_log = a.powf(1.0 - e) * (la / (e - 1.0) + (e - 1.0).powi(-2));
    let factor = 2.0 * 1.004_077_356_197_944 / (2.0 * std::f64::consts::PI).powi(8);
    let rem = factor * (p.abs() * int_log + qq.abs() * int_plain);
    (val, rem)
}

fn zeta_f64(k: u32) -> f64 {
    let mut s = 0.0;
    for n in (1..20u32).rev() {
        s += (n as f64).powi(-(k as i32));
    }
    s + zeta_tail_f64(k, 20.0).0
}

/// Euler's constant from H_M - ln M at M = 30 with EM corrections.
fn euler_gamma_f64() -> f64 {
    let m = 30.0f64;
    let mut h = 0.0;
    for n in (1..=30u32).rev() {
        h += 1.0 / n as f64;
    }
    let mut g = h - m.ln() - 1.0 / (2.0 * m);
    for r in 1..=4u32 {
        g += bern_f64(2 * r as u64) / (2.0 * r as f64) * m.powi(-2 * r as i32);
    }
    g
}

/// Exact partial fraction coefficients: with poles (c_i, e_i),
/// prod_i (u + c_i)^{-e_i} = sum_{i,k} gamma[i][k-1] (u + c_i)^{-k}.
fn pf_gamma(poles: &[(u32, u32)]) -> Vec<Vec<Rat>> {
    poles
        .iter()
        .enumerate()
        .map(|(i, &(ci, ei))| {
            let ord = ei as usize;
            // Taylor series of prod_{l != i} (v + (c_l - c_i))^{-e_l} at v = 0.
            let mut series = vec![Rat::zero(); ord];
            series[0] = Rat::one();
            for (l, &(cl, el)) in poles.iter().enumerate() {
                if l == i {
                    continue;
                }
                let d = cl as i64 - ci as i64;
                debug_assert!(d != 0);
                let mut factor = vec![Rat::zero(); ord];
                for (t, slot) in factor.iter_mut().enumerate() {
                    // coefficient of v^t in (d + v)^{-el}
                    let mut c = Rat::new(
                        binomial((el as usize + t - 1) as u64, t as u64),
                        Int::from(d).pow((el as usize + t) as u32),
                    );
                    if t % 2 == 1 {
                        c = -c;
                    }
                    *slot = c;
                }
                let mut out = vec![Rat::zero(); ord];
                for s in 0..ord {
                    for t in 0..=s {
                        if !series[t].is_zero() {
                            out[s] += &series[t] * &factor[s - t];
                        }
                    }
                }
                series = out;
            }
            (1..=ei).map(|k| series[(ei - k) as usize].clone()).collect()
        })
        .collect()
}

fn rat_f64(r: &Rat) -> f64 {
    bigint_to_f64(r.numer()) / bigint_to_f64(r.denom())
}

/// Evaluate the double series directly, independent of any reduction,
/// with a certified absolute error bound at or below `target_err`.
pub fn eval_so_direct(args: &ZetaSoArgs, target_err: f64) -> Result<PrecisionReal, EvalError> {
    if args.violated_condition().is_some() {
        return Err(EvalError::DivergentTerm);
    }
    if !(target_err >= DIRECT_FLOOR) {
        return Err(EvalError::TargetUnreachable(format!(
            "direct evaluator floor is {DIRECT_FLOOR:e}"
        )));
    }
    let ZetaSoArgs { s1, s2, s3, s4 } = *args;
    let wp = s1 + s3 + s4;
    let w = wp + s2;
    let poles: Vec<(u32, u32)> = [(0, s1), (1, s3), (2, s4)]
        .into_iter()
        .filter(|&(_, e)| e > 0)
        .collect();
    let gam = pf_gamma(&poles);
    // Residues cancel: the product decays like u^{-wp} with wp >= 2.
    debug_assert!(
        poles.len() < 2
            || gam
                .iter()
                .fold(Rat::zero(), |acc, g| acc + &g[0])
                .is_zero(),
        "first-order partial fraction coefficients must cancel"
    );
    let gamf: Vec<Vec<f64>> = gam.iter().map(|g| g.iter().map(rat_f64).collect()).collect();
    let kmax = poles.iter().map(|&(_, e)| e).max().unwrap();
    let zetas: Vec<f64> = (0..=kmax).map(|k| if k >= 2 { zeta_f64(k) } else { 0.0 }).collect();
    let gamma_e = euler_gamma_f64();

    for nc in [2_000u64, 8_000, 32_000] {
        let (value, err) = direct_at(
            &poles, &gamf, s2, wp, w, &zetas, gamma_e, nc,
        );
        if err <= target_err {
            return Ok(PrecisionReal::from_f64(value, err, 128));
        }
    }
    Err(EvalError::TargetUnreachable(format!(
        "direct sum did not reach {target_err:e} for {args:?}"
    )))
}

#[allow(clippy::too_many_arguments)]
fn direct_at(
    poles: &[(u32, u32)],
    gamf: &[Vec<f64>],
    s2: u32,
    wp: u32,
    w: u32,
    zetas: &[f64],
    gamma_e: f64,
    nc: u64,
) -> (f64, f64) {
    // Harmonic accumulators H_{cn} and H^{(k)}_{cn} for c in {1, 2}.
    let mut h1 = [Kahan::default(), Kahan::default()];
    let mut hk: Vec<[Kahan; 2]> = vec![[Kahan::default(); 2]; (wp + 1) as usize];
    let need = |c: u32| poles.iter().any(|&(ci, _)| ci == c);
    let (need1, need2) = (need(1), need(2));
    let mut main = Kahan::default();
    let mut sumabs = 0.0f64;
    // Coefficient mass multiplying near-cancelling differences
    // zeta(k) - H^{(k)}_{cn}: those carry a few ulp of zeta(k) in absolute
    // error no matter how small the difference is.
    let mut cancel = 0.0f64;
    for n in 1..=nc {
        let nf = n as f64;
        if need1 {
            h1[0].add(1.0 / nf);
            for k in 2..=wp {
                hk[k as usize][0].add(nf.powi(-(k as i32)));
            }
        }
        if need2 {
            for m in [2 * n - 1, 2 * n] {
                let mf = m as f64;
                h1[1].add(1.0 / mf);
                for k in 2..=wp {
                    hk[k as usize][1].add(mf.powi(-(k as i32)));
                }
            }
        }
        for (i, &(ci, ei)) in poles.iter().enumerate() {
            for k in 2..=ei {
                let p = (s2 + wp - k) as i32;
                let s_val = if ci == 0 {
                    zetas[k as usize]
                } else {
                    zetas[k as usize] - hk[k as usize][(ci - 1) as usize].sum
                };
                let piece = gamf[i][(k - 1) as usize] * nf.powi(-p) * s_val;
                main.add(piece);
                sumabs += piece.abs();
                if ci >= 1 {
                    cancel += (gamf[i][(k - 1) as usize] * nf.powi(-p) * zetas[k as usize]).abs();
                }
            }
            if ci >= 1 {
                let piece = -gamf[i][0] * nf.powi(-((w - 1) as i32)) * h1[(ci - 1) as usize].sum;
                main.add(piece);
                sumabs += piece.abs();
            }
        }
    }
    // Tail over n > nc: expand each inner closed form asymptotically and
    // collect everything onto the two primitives sum n^{-q} and
    // sum n^{-q} ln n.
    let a = (nc + 1) as f64;
    let mut zc: BTreeMap<u32, f64> = BTreeMap::new();
    let mut lc: BTreeMap<u32, f64> = BTreeMap::new();
    let mut errb = 0.0f64;
    for (i, &(ci, ei)) in poles.iter().enumerate() {
        for k in 2..=ei {
            let p = s2 + wp - k;
            let g = gamf[i][(k - 1) as usize];
            if ci == 0 {
                *zc.entry(p).or_default() += g * zetas[k as usize];
                continue;
            }
            let c = ci as f64;
            let kf = k as f64;
            // sum_{m > cn} m^{-k} = (cn)^{1-k}/(k-1) - (cn)^{-k}/2 + EM terms
            *zc.entry(p + k - 1).or_default() += g * c.powf(1.0 - kf) / (kf - 1.0);
            *zc.entry(p + k).or_default() += -g * c.powf(-kf) / 2.0;
            for r in 1..=4u32 {
                let q = k + 2 * r - 1;
                let coef = bern_f64(2 * r as u64) / factorial_f64(2 * r) * rising_f64(k, 2 * r - 1);
                *zc.entry(p + q).or_default() += g * coef * c.powf(-(q as f64));
            }
            let remc = 2.0
                * (bern_f64(10) / factorial_f64(10) * rising_f64(k, 9)).abs()
                * c.powf(-(kf + 9.0));
            errb += g.abs() * remc * zeta_tail_bound((p + k + 9) as f64, a);
        }
        if ci >= 1 {
            let g = gamf[i][0];
            if g != 0.0 {
                let c = ci as f64;
                let base = w - 1; // >= 2
                // H_{cn} = ln c + ln n + gamma + 1/(2cn) - EM terms
                *zc.entry(base).or_default() += -g * (c.ln() + gamma_e);
                *lc.entry(base).or_default() += -g;
                *zc.entry(base + 1).or_default() += -g / (2.0 * c);
                for r in 1..=4u32 {
                    *zc.entry(base + 2 * r).or_default() +=
                        g * bern_f64(2 * r as u64) / (2.0 * r as f64) * c.powi(-2 * r as i32);
                }
                errb += g.abs() * (bern_f64(10) / 10.0).abs() * c.powi(-10)
                    * zeta_tail_bound((base + 10) as f64, a);
            }
        }
    }
    let mut tail = Kahan::default();
    for (&q, &coef) in &zc {
        let (v, e) = zeta_tail_f64(q, a);
        tail.add(coef * v);
        errb += coef.abs() * e;
        sumabs += (coef * v).abs();
    }
    for (&q, &coef) in &lc {
        let (v, e) = log_tail_f64(q, a);
        tail.add(coef * v);
        errb += coef.abs() * e;
        sumabs += (coef * v).abs();
    }
    let value = main.sum + tail.sum;
    let round = 2e-14 * (1.0 + sumabs) * (1.0 + (nc as f64).ln()) + 1e-15 * cancel;
    (value, errb + round)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::numeric::{eval_combo, numeric_equal, EvalConfig};
    use crate::reduce::reduce_so;

    fn pow_rat(x: &Rat, e: u32) -> Rat {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc *= x;
        }
        acc
    }

    #[test]
    fn partial_fractions_reproduce_the_product() {
        for poles in [
            vec![(0u32, 2u32), (2, 2)],
            vec![(0, 1), (1, 2), (2, 1)],
            vec![(1, 3), (2, 2)],
            vec![(0, 2), (1, 1), (2, 3)],
        ] {
            let gam = pf_gamma(&poles);
            for u in [rat(1, 3), rat(7, 5), rat(-9, 4)] {
                let mut lhs = Rat::one();
                for &(c, e) in &poles {
                    lhs /= pow_rat(&(&u + Rat::from_integer(Int::from(c))), e);
                }
                let mut rhs = Rat::zero();
                for (i, &(c, e)) in poles.iter().enumerate() {
                    for k in 1..=e {
                        rhs += &gam[i][(k - 1) as usize]
                            / pow_rat(&(&u + Rat::from_integer(Int::from(c))), k);
                    }
                }
                assert_eq!(lhs, rhs, "poles {poles:?} at u = {u}");
            }
        }
    }

    #[test]
    fn primitives_match_naive_sums() {
        let mut z = 0.0f64;
        let mut l = 0.0f64;
        for n in (101u64..3_000_000).rev() {
            let nf = n as f64;
            z += nf.powi(-3);
            l += nf.powi(-3) * nf.ln();
        }
        let (zv, ze) = zeta_tail_f64(3, 101.0);
        let (lv, le) = log_tail_f64(3, 101.0);
        // naive truncation at 3e6 leaves ~ln(N)/N^2 behind
        assert!((zv - z).abs() < 1e-11 + ze);
        assert!((lv - l).abs() < 1e-10 + le);
    }

    #[test]
    fn matches_brute_force_box() {
        for (args, tol) in [
            (ZetaSoArgs::new(0, 1, 2, 1), 2e-3),
            (ZetaSoArgs::new(2, 2, 0, 2), 2e-3),
            (ZetaSoArgs::new(1, 0, 0, 2), 5e-3),
        ] {
            let mut brute = 0.0f64;
            let b = 800u64;
            for m in (1..=b).rev() {
                for n in (1..=b).rev() {
                    let t = (m as f64).powi(-(args.s1 as i32))
                        * (n as f64).powi(-(args.s2 as i32))
                        * ((m + n) as f64).powi(-(args.s3 as i32))
                        * ((m + 2 * n) as f64).powi(-(args.s4 as i32));
                    brute += t;
                }
            }
            let v = eval_so_direct(&args, 1e-9).unwrap();
            assert!(
                (v.to_f64() - brute).abs() < tol,
                "{args:?}: direct {} vs box {}",
                v.to_f64(),
                brute
            );
        }
    }

    #[test]
    fn agrees_with_reduction_pipeline() {
        let cfg = EvalConfig::new(20);
        for args in [
            ZetaSoArgs::new(0, 0, 0, 4),
            ZetaSoArgs::new(0, 0, 2, 1),
            ZetaSoArgs::new(1, 1, 1, 1),
            ZetaSoArgs::new(2, 0, 2, 2),
            ZetaSoArgs::new(0, 0, 2, 2),
        ] {
            let direct = eval_so_direct(&args, 1e-9).unwrap();
            let combo = reduce_so(&args).unwrap();
            let exact = eval_combo(&combo, &cfg, None).unwrap();
            assert!(
                numeric_equal(&direct, &exact),
                "{args:?}: direct {} vs reduced {}",
                direct.to_f64(),
                exact.to_f64()
            );
        }
    }

    #[test]
    fn divergent_and_floor_errors() {
        assert!(matches!(
            eval_so_direct(&ZetaSoArgs::new(2, 0, 0, 0), 1e-8),
            Err(EvalError::DivergentTerm)
        ));
        assert!(matches!(
            eval_so_direct(&ZetaSoArgs::new(1, 1, 1, 1), 1e-14),
            Err(EvalError::TargetUnreachable(_))
        ));
    }
}

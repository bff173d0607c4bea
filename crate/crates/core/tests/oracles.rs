//! Cross-checks of the reduction building blocks and the evaluator
//! against slow-but-obviously-correct summation, plus a high-precision
//! smoke test.

use witten_zeta::{
    eval_combo, eval_depth1, eval_so_direct, eval_term, eval_witten, numeric_equal, pi,
    reduce_sum_n_m2n, reduce_tail_limit, EulerTerm, EvalConfig, SignedArg, ZetaSoArgs,
};

/// The two-parameter helper sum over m,n of 1/(n^u (m+2n)^v) must agree
/// with the raw double series, which eval_so_direct computes through a
/// completely separate f64 pipeline.
#[test]
fn sum_n_m2n_matches_direct_series() {
    let cfg = EvalConfig::new(20);
    for (u, v) in [(1u32, 3u32), (2, 2), (2, 3), (3, 2)] {
        let combo = reduce_sum_n_m2n(u, v).unwrap();
        let exact = eval_combo(&combo, &cfg, None).unwrap();
        let direct = eval_so_direct(&ZetaSoArgs::new(0, u, 0, v), 1e-9).unwrap();
        assert!(
            numeric_equal(&exact, &direct),
            "(u,v)=({u},{v}): {} vs {}",
            exact.to_f64(),
            direct.to_f64()
        );
    }
}

/// The paired-limit identity: the limit equals sum over n of
/// n^{-s} (H_n - H_{2n}), checked against a 100k-term partial sum whose
/// truncation error is well under 1e-4 for s = 2.
#[test]
fn tail_limit_matches_partial_sums() {
    let combo = reduce_tail_limit(2).unwrap();
    let exact = eval_combo(&combo, &EvalConfig::new(20), None).unwrap();
    let mut h = 0.0f64;
    let mut h2 = 0.0f64;
    let mut sum = 0.0f64;
    for n in 1u64..=100_000 {
        h += 1.0 / n as f64;
        h2 += 1.0 / (2 * n - 1) as f64 + 1.0 / (2 * n) as f64;
        sum += (h - h2) / (n * n) as f64;
    }
    assert!((exact.to_f64() - sum).abs() <= 1e-4, "{} vs {sum}", exact.to_f64());
}

/// The depth-1 evaluator against a ten-million-term partial sum of the
/// defining series for z(2): the difference must equal the true tail
/// 1/N + O(1/N^2) almost exactly.
#[test]
fn depth1_matches_partial_sum() {
    let cfg = EvalConfig::new(30);
    let z2 = eval_depth1(SignedArg::pos(2), &cfg).unwrap();
    let n = 10_000_000u64;
    let mut sum = 0.0f64;
    for k in (1..=n).rev() {
        sum += 1.0 / (k * k) as f64;
    }
    let residual = z2.to_f64() - sum - 1.0 / n as f64;
    assert!(residual.abs() <= 1e-13, "residual {residual:e}");
}

/// Same series, alternating sign: z(bar 2) = -pi^2/12.
#[test]
fn depth1_alternating_matches_partial_sum() {
    let cfg = EvalConfig::new(30);
    let v = eval_depth1(SignedArg::neg(2), &cfg).unwrap();
    let n = 2_000_000u64;
    let mut sum = 0.0f64;
    for k in (1..=n).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / (k * k) as f64;
    }
    assert!((v.to_f64() - sum).abs() <= 1e-12);
}

/// 100-digit evaluation works and is internally consistent: the same
/// constants evaluated at 100 and 110 digits overlap, and pi matches its
/// published expansion.
#[test]
fn hundred_digit_smoke() {
    let hi = EvalConfig::new(110);
    let lo = EvalConfig::new(100);
    for key in ["z(5)", "z(b4)", "z(b3,1)", "z(b1,3)", "z(3,3)", "z(b3,3)"] {
        let t = EulerTerm::parse(key).unwrap();
        let a = eval_term(&t, &lo).unwrap();
        let b = eval_term(&t, &hi).unwrap();
        assert!(a.err <= 1e-100 && b.err <= 1e-110, "{key}");
        assert!(numeric_equal(&a, &b), "{key} disagrees at 100 vs 110 digits");
    }
    let p = pi(&lo);
    assert_eq!(
        p.to_decimal(100),
        "3.1415926535897932384626433832795028841971693993751\
         058209749445923078164062862089986280348253421170680"
    );
    // The m=1 Witten value to 100 digits stays within its certified bound
    // of the 110-digit run.
    let w_lo = eval_witten(1, &lo);
    let w_hi = eval_witten(1, &hi);
    assert!(w_lo.err <= 1e-99);
    assert!(numeric_equal(&w_lo, &w_hi));
}

//! Command-line front end: single reductions, numeric evaluation,
//! exhaustive weight tables, Witten-value computation, and batch
//! verification against the direct double series.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use witten_zeta::{
    enumerate_convergent, enumerate_regular, eval_combo, eval_so_direct, eval_witten,
    numeric_equal, reduce_so, witten_c, Combo, ConstantCache, EvalConfig, EvalError,
    PrecisionReal, ReduceError, ZetaSoArgs,
};

/// Environment variable naming the cache directory.
const CACHE_DIR_ENV: &str = "WITTEN_ZETA_CACHE_DIR";

const EXIT_USAGE: u8 = 1;
const EXIT_DIVERGENT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "wzeta", version, about = "Exact reduction and certified numeric \
evaluation of so(5) Witten zeta values in terms of alternating Euler sums")]
struct Cli {
    /// Disable the on-disk constant cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce one value to a rational combination of Euler sums.
    Reduce {
        s1: u32,
        s2: u32,
        s3: u32,
        s4: u32,
        /// Also evaluate the combination to this many digits.
        #[arg(long, value_name = "DIGITS")]
        eval: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reduce and evaluate every convergent tuple of one weight.
    Table {
        weight: u32,
        /// Exclude the two exceptional patterns (0,0,w,0) and (0,0,0,w).
        #[arg(long)]
        regular: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// The rational c(m) with value(2m,2m,2m,2m) = c(m) pi^{8m}.
    Witten {
        m: u32,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Check every reduction of weight <= W against the direct series.
    Verify {
        #[arg(long, value_name = "W")]
        max_weight: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Evaluate an Euler-sum expression such as "3/4*z(3) + z(b1,2)".
    Eval {
        expr: String,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
}

fn cache_path() -> PathBuf {
    let dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| {
        std::env::var_os("HOME")
            .map(|h| PathBuf::from(h).join(".cache"))
            .unwrap_or_else(std::env::temp_dir)
            .join("witten-zeta")
    });
    dir.join("constants.json")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cache = if cli.no_cache { None } else { Some(ConstantCache::load(&cache_path())) };
    let code = run(cli.cmd, cache.as_ref());
    if let Some(c) = &cache {
        if let Err(e) = c.save() {
            eprintln!("warning: could not save constant cache: {e}");
        }
    }
    ExitCode::from(code)
}

fn run(cmd: Cmd, cache: Option<&ConstantCache>) -> u8 {
    match cmd {
        Cmd::Reduce { s1, s2, s3, s4, eval, format } => {
            cmd_reduce(ZetaSoArgs::new(s1, s2, s3, s4), eval, format, cache)
        }
        Cmd::Table { weight, regular, format, digits } => {
            cmd_table(weight, regular, format, digits, cache)
        }
        Cmd::Witten { m, digits } => cmd_witten(m, digits),
        Cmd::Verify { max_weight, tol } => cmd_verify(max_weight, tol, cache),
        Cmd::Eval { expr, digits } => cmd_eval(&expr, digits, cache),
    }
}

fn eval_exit(e: &EvalError) -> u8 {
    match e {
        EvalError::DivergentTerm => EXIT_DIVERGENT,
        _ => EXIT_USAGE,
    }
}

fn json_row(
    args: &ZetaSoArgs,
    combo: &Combo,
    numeric: Option<(&PrecisionReal, u32)>,
) -> serde_json::Value {
    json!({
        "args": [args.s1, args.s2, args.s3, args.s4],
        "terms": combo.to_json(),
        "value": numeric.map(|(v, d)| v.to_decimal(d)),
        "err": numeric.map(|(v, _)| format!("{:e}", v.err)),
        "exceptional": args.is_exceptional(),
    })
}

fn cmd_reduce(
    args: ZetaSoArgs,
    eval: Option<u32>,
    format: Format,
    cache: Option<&ConstantCache>,
) -> u8 {
    let combo = match reduce_so(&args) {
        Ok(c) => c,
        Err(ReduceError::Divergent(cond)) => {
            eprintln!("divergent: the arguments violate {cond}");
            return EXIT_DIVERGENT;
        }
        Err(ReduceError::Domain(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let digits = eval.unwrap_or(30);
    let numeric = if eval.is_some() || format == Format::Json {
        match eval_combo(&combo, &EvalConfig::new(digits), cache) {
            Ok(v) => Some(v),
            Err(e) => {
                eprintln!("error: {e}");
                return eval_exit(&e);
            }
        }
    } else {
        None
    };
    match format {
        Format::Text => {
            println!("{}", combo.render_plain());
            if let Some(v) = &numeric {
                println!("= {}", v.to_decimal(digits));
            }
        }
        Format::Latex => {
            println!("{}", combo.render_latex());
            if let Some(v) = &numeric {
                println!("= {}", v.to_decimal(digits));
            }
        }
        Format::Json => {
            let row = json_row(&args, &combo, numeric.as_ref().map(|v| (v, digits)));
            println!("{}", serde_json::to_string_pretty(&row).unwrap());
        }
    }
    0
}

fn cmd_table(
    weight: u32,
    regular: bool,
    format: Format,
    digits: u32,
    cache: Option<&ConstantCache>,
) -> u8 {
    if weight < 3 {
        eprintln!("error: table needs weight >= 3");
        return EXIT_USAGE;
    }
    let tuples = if regular { enumerate_regular(weight) } else { enumerate_convergent(weight) };
    let cfg = EvalConfig::new(digits);
    let mut rows = Vec::new();
    for args in &tuples {
        let combo = reduce_so(args).expect("convergent tuples reduce");
        let numeric = match eval_combo(&combo, &cfg, cache) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: {e}");
                return eval_exit(&e);
            }
        };
        rows.push((args, combo, numeric));
    }
    match format {
        Format::Text => {
            for (args, combo, numeric) in &rows {
                let mark = if args.is_exceptional() { " [exceptional]" } else { "" };
                println!(
                    "({},{},{},{}): {} = {}{mark}",
                    args.s1,
                    args.s2,
                    args.s3,
                    args.s4,
                    combo.render_plain(),
                    numeric.to_decimal(digits)
                );
            }
            println!("{} rows of weight {weight}", rows.len());
        }
        Format::Latex => {
            for (args, combo, numeric) in &rows {
                println!(
                    "\\zeta_{{so}}({},{},{},{}) &= {} = {} \\\\",
                    args.s1,
                    args.s2,
                    args.s3,
                    args.s4,
                    combo.render_latex(),
                    numeric.to_decimal(digits)
                );
            }
        }
        Format::Json => {
            let out: Vec<_> = rows
                .iter()
                .map(|(args, combo, numeric)| json_row(args, combo, Some((numeric, digits))))
                .collect();
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
    }
    0
}

fn cmd_witten(m: u32, digits: u32) -> u8 {
    if m < 1 {
        eprintln!("error: witten needs m >= 1");
        return EXIT_USAGE;
    }
    let c = witten_c(m);
    let v = eval_witten(m, &EvalConfig::new(digits));
    println!("{c} * pi^{} = {}", 8 * m, v.to_decimal(digits));
    0
}

fn cmd_verify(max_weight: u32, tol: f64, cache: Option<&ConstantCache>) -> u8 {
    if max_weight < 3 {
        eprintln!("error: verify needs --max-weight >= 3");
        return EXIT_USAGE;
    }
    if !(tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return EXIT_USAGE;
    }
    let digits = 20u32.max((-tol.log10()).ceil() as u32 + 6).min(40);
    let cfg = EvalConfig::new(digits);
    let mut max_diff = 0.0f64;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut failed = 0usize;
    for weight in 3..=max_weight {
        for args in enumerate_convergent(weight) {
            let combo = reduce_so(&args).expect("convergent tuples reduce");
            let exact = match eval_combo(&combo, &cfg, cache) {
                Ok(v) => v,
                Err(e) => {
                    println!("skip ({},{},{},{}): {e}", args.s1, args.s2, args.s3, args.s4);
                    skipped += 1;
                    continue;
                }
            };
            let direct = match eval_so_direct(&args, tol / 4.0) {
                Ok(v) => v,
                Err(e) => {
                    println!("skip ({},{},{},{}): {e}", args.s1, args.s2, args.s3, args.s4);
                    skipped += 1;
                    continue;
                }
            };
            let diff = (exact.to_f64() - direct.to_f64()).abs();
            max_diff = max_diff.max(diff);
            checked += 1;
            let mark = if args.is_exceptional() { " [exceptional]" } else { "" };
            if diff <= tol && numeric_equal(&exact, &direct) {
                println!(
                    "ok   ({},{},{},{}): |reduced - direct| = {diff:e}{mark}",
                    args.s1, args.s2, args.s3, args.s4
                );
            } else {
                failed += 1;
                println!(
                    "FAIL ({},{},{},{}): reduced {} vs direct {} (diff {diff:e}){mark}",
                    args.s1,
                    args.s2,
                    args.s3,
                    args.s4,
                    exact.to_decimal(digits),
                    direct.to_f64()
                );
            }
        }
    }
    println!(
        "{checked} checked, {failed} failed, {skipped} skipped; max discrepancy {max_diff:e}"
    );
    if failed > 0 {
        EXIT_VERIFY
    } else {
        0
    }
}

fn cmd_eval(expr: &str, digits: u32, cache: Option<&ConstantCache>) -> u8 {
    let combo = match Combo::parse_plain(expr) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match eval_combo(&combo, &EvalConfig::new(digits), cache) {
        Ok(v) => {
            println!("{} = {} (err <= {:e})", combo.render_plain(), v.to_decimal(digits), v.err);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            eval_exit(&e)
        }
    }
}

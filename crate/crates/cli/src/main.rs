use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use extremal::characters::KroneckerChar;
use extremal::eigenforms::{sieve, HeckeEigenform};
use extremal::exactseries::dim_cusp_forms;
use extremal::kohnenplus::{plus_sign, waldspurger_norm_with, waldspurger_ratio_with, DISCRIMINANT_CONVENTION};
use extremal::lcentral::{
    central_value_with, moment_sum_from, omega_corridor, omega_star, omega_star_series, required_nmax, CentralValue,
    KernelTable, WeightMethod,
};
use extremal::petersson::trace_check_with;
use extremal::resonance::{count_extreme_from, diagonal_classification_check, ratio_exponent_trend, sigma_identity_check};
use extremal::specialfn::ErrBoundedReal;

mod cache;

use cache::{float_hex, Cache, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "extremal", version, about = "Central values of level-one modular L-functions")]
struct Cli {
    /// Working precision in bits
    #[arg(long, global = true, default_value_t = extremal::DEFAULT_PREC_BITS)]
    prec_bits: u32,

    /// Directory for cached eigen-data; caching is off when unset
    #[arg(long, global = true, env = "EXTREMAL_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Emit JSON Lines
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Emit CSV
    #[arg(long, global = true)]
    csv: bool,

    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Central values sum n up to cutoff_mult * k * |D|
    #[arg(long, global = true, default_value_t = 2.0)]
    cutoff_mult: f64,

    /// Last modulus c kept in Kloosterman-Bessel sums
    #[arg(long, global = true, default_value_t = 200)]
    cmax: u64,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions of S_k for even k
    Dims {
        #[arg(long, default_value_t = 2)]
        kmin: u32,
        #[arg(long)]
        kmax: u32,
    },
    /// Normalized Hecke eigenvalues lambda_f(n)
    Eigen {
        #[arg(long)]
        k: u32,
        /// Defaults to what central values at D = 1 need
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// L(1/2, f x chi_D) for every f in H_k
    Lvalue {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        /// Only this eigen_index
        #[arg(long)]
        index: Option<usize>,
    },
    /// Harmonic weights omega(f)*
    Omega {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
    },
    /// Both sides of the Petersson formula
    TraceCheck {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// sum_f L(1/2, f x chi_D)^r, optionally divided by omega(f)*
    Moments {
        #[command(flatten)]
        range: WeightRange,
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        weighted: bool,
    },
    /// Forms whose central value reaches exp(c sqrt(log x / log log x))
    CountExtreme {
        #[command(flatten)]
        range: WeightRange,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 1.41)]
        constant: f64,
    },
    /// Randomized instances of the divisor-sum identity behind the resonator bound
    ResonatorIdentity {
        /// Largest N drawn
        #[arg(long, default_value_t = 200)]
        n: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Exhaustive diagonal classification for m1 m2 = m3 m4 up to N
    DiagonalCheck {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        budget: u64,
    },
    /// Prime sums of the resonator window against sqrt(4 log N / log log N)
    RatioTrend {
        #[arg(long, value_delimiter = ',', default_values_t = [1_000_000_000u64, 10_000_000_000, 100_000_000_000, 1_000_000_000_000])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
    },
    /// Waldspurger formula: absolute form, or the ratio form when --d2 is given
    Waldspurger {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        d2: Option<i64>,
        /// Mesh depth of the fundamental-domain quadrature
        #[arg(long, default_value_t = 24)]
        depth: usize,
    },
}

#[derive(clap::Args, Debug)]
struct WeightRange {
    /// A single weight
    #[arg(long, conflicts_with_all = ["kmin", "kmax"])]
    k: Option<u32>,
    #[arg(long, requires = "kmax")]
    kmin: Option<u32>,
    #[arg(long, requires = "kmin")]
    kmax: Option<u32>,
    #[arg(long, default_value_t = 4)]
    step: u32,
}

impl WeightRange {
    fn weights(&self) -> Result<Vec<u32>, Failure> {
        match (self.k, self.kmin, self.kmax) {
            (Some(k), _, _) => Ok(vec![k]),
            (None, Some(a), Some(b)) if self.step > 0 && a <= b => Ok((a..=b).step_by(self.step as usize).collect()),
            _ => Err(Failure::Usage("give --k or a nonempty --kmin/--kmax range".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Series,
    TraceInverted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Assertion(String),
}

impl From<extremal::Error> for Failure {
    fn from(e: extremal::Error) -> Self {
        if e.is_assertion() {
            Failure::Assertion(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

struct Ctx {
    prec: u32,
    cutoff_mult: f64,
    cmax: u64,
    seed: u64,
    cache: Cache,
}

/// Rows to print, plus a failure to report after them.
struct Output {
    rows: Vec<Value>,
    failed: Option<String>,
}

impl From<Vec<Value>> for Output {
    fn from(rows: Vec<Value>) -> Self {
        Output { rows, failed: None }
    }
}

fn real(x: &ErrBoundedReal) -> Value {
    json!({ "value": x.to_f64(), "err": x.err, "hex": float_hex(&x.value) })
}

fn record(v: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    if let Value::Object(o) = v {
        m.extend(o);
    }
    Value::Object(m)
}

fn forms_for(ctx: &Ctx, k: u32, nmax: usize) -> Result<Vec<HeckeEigenform>, Failure> {
    if k % 2 == 1 || k == 0 {
        return Err(Failure::Usage(format!("weight {k} must be positive and even")));
    }
    Ok(ctx.cache.eigenforms(k, nmax, ctx.prec)?)
}

fn central_values(ctx: &Ctx, k: u32, d: i64) -> Result<(Vec<HeckeEigenform>, Vec<CentralValue>), Failure> {
    let chi = KroneckerChar::new(d)?;
    if dim_cusp_forms(k) > 0 && !chi.parity_matches(k)? {
        return Err(extremal::Error::ParityMismatch { d, k }.into());
    }
    let forms = forms_for(ctx, k, required_nmax(k, d, ctx.cutoff_mult))?;
    if forms.is_empty() {
        return Ok((forms, Vec::new()));
    }
    let table = KernelTable::new(k, d, ctx.cutoff_mult, ctx.prec)?;
    let values = forms.iter().map(|f| central_value_with(f, &table)).collect::<Result<Vec<_>, _>>()?;
    Ok((forms, values))
}

fn check_plus_discriminant(k: u32, d: i64) -> Result<(), Failure> {
    KroneckerChar::new(d)?;
    if d % 2 == 0 {
        return Err(Failure::Usage(format!("{d} is not an odd discriminant")));
    }
    if plus_sign(k) * d < 0 {
        return Err(extremal::Error::ParityMismatch { d, k }.into());
    }
    Ok(())
}

fn run(cmd: &Command, ctx: &Ctx) -> Result<Output, Failure> {
    match cmd {
        Command::Dims { kmin, kmax } => {
            let start = kmin + kmin % 2;
            Ok((start..=*kmax)
                .step_by(2)
                .map(|k| record(json!({ "k": k, "dim": dim_cusp_forms(k) })))
                .collect::<Vec<_>>()
                .into())
        }
        Command::Eigen { k, nmax } => {
            let nmax = nmax.unwrap_or_else(|| required_nmax(*k, 1, ctx.cutoff_mult));
            let forms = forms_for(ctx, *k, nmax)?;
            Ok(forms
                .iter()
                .flat_map(|f| {
                    f.lambda.iter().enumerate().map(move |(i, l)| {
                        record(json!({
                            "k": f.k,
                            "eigen_index": f.eigen_index,
                            "n": i + 1,
                            "lambda": real(l),
                            "prec_bits": f.prec_bits,
                        }))
                    })
                })
                .collect::<Vec<_>>()
                .into())
        }
        Command::Lvalue { k, d, index } => {
            let (_, values) = central_values(ctx, *k, *d)?;
            if let Some(i) = index {
                if *i >= values.len() {
                    return Err(Failure::Usage(format!("eigen_index {i} out of range, dim S_{k} = {}", values.len())));
                }
            }
            Ok(values
                .iter()
                .filter(|v| index.map_or(true, |i| v.eigen_index == i))
                .map(|v| {
                    record(json!({
                        "k": v.k,
                        "eigen_index": v.eigen_index,
                        "d": v.d,
                        "central_value": real(&v.value),
                        "cutoff": v.cutoff,
                        "cutoff_mult": v.cutoff_mult,
                    }))
                })
                .collect::<Vec<_>>()
                .into())
        }
        Command::Omega { k, method } => {
            let forms = forms_for(ctx, *k, required_nmax(*k, 1, 0.0))?;
            let method = match method {
                Method::Series => WeightMethod::Series,
                Method::TraceInverted => WeightMethod::TraceInverted,
            };
            let (lo, hi) = omega_corridor(*k);
            let mut rows = Vec::new();
            for f in &forms {
                let w = omega_star(f, method)?;
                rows.push(record(json!({
                    "k": w.k,
                    "eigen_index": w.eigen_index,
                    "omega_star": real(&w.omega_star),
                    "method": w.method.tag(),
                    "corridor_lo": lo,
                    "corridor_hi": hi,
                })));
            }
            Ok(rows.into())
        }
        Command::TraceCheck { k, m, n } => {
            if *m == 0 || *n == 0 {
                return Err(Failure::Usage("m and n must be positive".into()));
            }
            let nmax = required_nmax(*k, 1, 0.0).max(*m.max(n) as usize);
            let forms = forms_for(ctx, *k, nmax)?;
            let weights = forms.iter().map(omega_star_series).collect::<Result<Vec<_>, _>>()?;
            let r = trace_check_with(&forms, &weights, *k, *m, *n, ctx.cmax, ctx.prec)?;
            let allowed = r.lhs.err + r.rhs_bessel_tail.err + r.tail_bound;
            let failed = (r.discrepancy > allowed)
                .then(|| format!("discrepancy {:e} exceeds the error budget {:e}", r.discrepancy, allowed));
            let rows = vec![record(json!({
                "k": r.k,
                "m": r.m,
                "n": r.n,
                "q": r.q,
                "lhs": real(&r.lhs),
                "rhs_delta": r.rhs_delta,
                "rhs_bessel_tail": real(&r.rhs_bessel_tail),
                "cmax": r.cmax,
                "tail_bound": r.tail_bound,
                "discrepancy": r.discrepancy,
                "small_regime": r.small_regime,
            }))];
            Ok(Output { rows, failed })
        }
        Command::Moments { range, r, d, weighted } => {
            if !(1..=3).contains(r) {
                return Err(Failure::Usage(format!("moment order {r} not in 1..=3")));
            }
            let ks = range.weights()?;
            let rows = ks
                .par_iter()
                .map(|&k| -> Result<Value, Failure> {
                    let (forms, values) = central_values(ctx, k, *d)?;
                    let weights = if *weighted {
                        Some(forms.iter().map(omega_star_series).collect::<Result<Vec<_>, _>>()?)
                    } else {
                        None
                    };
                    let sum = moment_sum_from(&values, weights.as_deref(), *r)?;
                    let kf = k as f64;
                    Ok(record(json!({
                        "k": k,
                        "d": d,
                        "r": r,
                        "weighted": weighted,
                        "dim": forms.len(),
                        "moment": real(&sum),
                        "reference": kf * kf.ln().powf(4.5),
                    })))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(rows.into())
        }
        Command::CountExtreme { range, d, constant } => {
            let ks = range.weights()?;
            let rows = ks
                .par_iter()
                .map(|&k| -> Result<Value, Failure> {
                    let (_, values) = central_values(ctx, k, *d)?;
                    let rep = count_extreme_from(&values, k, *d, *constant);
                    let members: Vec<Value> = rep
                        .members
                        .iter()
                        .map(|(i, v)| json!({ "eigen_index": i, "central_value": v }))
                        .collect();
                    Ok(record(json!({
                        "k": rep.k,
                        "d": rep.d,
                        "constant": rep.constant,
                        "threshold": rep.threshold,
                        "dim": values.len(),
                        "count": rep.count,
                        "members": members,
                    })))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(rows.into())
        }
        Command::ResonatorIdentity { n, d, trials } => {
            if *n < 2 {
                return Err(Failure::Usage("--n must be at least 2".into()));
            }
            let chi = KroneckerChar::new(*d)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut rows = Vec::new();
            let mut worst: Option<String> = None;
            for trial in 0..*trials {
                let big_n = rng.gen_range(2..=*n);
                let mut vals = BTreeMap::new();
                for p in sieve(big_n as usize) {
                    let r: f64 = rng.gen();
                    if chi.conductor() % p as u64 != 0 {
                        vals.insert(p as u64, r);
                    }
                }
                let rep = sigma_identity_check(big_n, &vals, *d)?;
                if !rep.pass && worst.is_none() {
                    worst = Some(format!("trial {trial}: residual {:e} at N = {big_n}", rep.residual));
                }
                rows.push(record(json!({
                    "trial": trial,
                    "seed": ctx.seed,
                    "n": big_n,
                    "d": d,
                    "lhs": rep.lhs,
                    "rhs": rep.rhs,
                    "residual": rep.residual,
                    "pass": rep.pass,
                })));
            }
            Ok(Output { rows, failed: worst })
        }
        Command::DiagonalCheck { n, budget } => {
            let rep = diagonal_classification_check(*n, *budget)?;
            let failed = (!rep.pass).then(|| format!("{} counterexamples at N = {n}", rep.counterexamples.len()));
            let rows = vec![record(json!({
                "n": rep.n,
                "quadruples": rep.quadruples,
                "diagonal": rep.diagonal,
                "counterexamples": rep.counterexamples,
                "pass": rep.pass,
            }))];
            Ok(Output { rows, failed })
        }
        Command::RatioTrend { n, d } => {
            let rows = ratio_exponent_trend(n, *d)?;
            Ok(rows
                .iter()
                .map(|r| {
                    record(json!({
                        "n": r.n,
                        "p_lo": r.p_lo,
                        "p_hi": r.p_hi,
                        "primes": r.primes.len(),
                        "prime_sum": r.prime_sum,
                        "target": r.target,
                        "deviation": r.deviation,
                        "log_ratio": r.log_ratio,
                        "empty_window": r.empty_window,
                    }))
                })
                .collect::<Vec<_>>()
                .into())
        }
        Command::Waldspurger { k, d, d2, depth } => {
            eprintln!("discriminant convention: {DISCRIMINANT_CONVENTION}");
            check_plus_discriminant(*k, *d)?;
            if let Some(d2) = d2 {
                check_plus_discriminant(*k, *d2)?;
            }
            let top = d.unsigned_abs().max(d2.map_or(0, |x| x.unsigned_abs())) as usize;
            let gs = ctx.cache.plus_basis(*k, top, ctx.prec)?;
            let mut nmax = required_nmax(*k, *d, ctx.cutoff_mult);
            if let Some(d2) = d2 {
                nmax = nmax.max(required_nmax(*k, *d2, ctx.cutoff_mult));
            }
            let fs = forms_for(ctx, *k, nmax)?;
            let mut rows = Vec::new();
            for g in &gs {
                let partner = g
                    .shimura_partner
                    .ok_or_else(|| Failure::Assertion("plus-space eigenform without a Shimura partner".into()))?;
                let f = &fs[partner];
                let row = match d2 {
                    Some(d2) => {
                        let e = waldspurger_ratio_with(g, f, *d, *d2, ctx.cutoff_mult)?;
                        json!({
                            "k": k,
                            "d1": d,
                            "d2": d2,
                            "eigen_index": e.eigen_index,
                            "lhs": e.lhs,
                            "rhs": e.rhs,
                            "residual": e.residual,
                            "vacuous": e.vacuous,
                            "scale_tag": g.scale_tag,
                        })
                    }
                    None => {
                        let r = waldspurger_norm_with(g, f, *d, *depth)?;
                        json!({
                            "k": r.k,
                            "d": r.d,
                            "eigen_index": r.eigen_index,
                            "norm_sq": r.norm_sq,
                            "quadrature_change": r.quadrature_change,
                            "c_sq_normalized": r.c_sq_normalized,
                            "central_value": r.central_value,
                            "rhs": r.rhs,
                            "rel_err": r.rel_err,
                            "petersson_f": r.petersson_f,
                            "rel_err_index_normalized": r.rel_err_index_normalized,
                            "corollary_threshold": r.corollary_threshold,
                            "exceeds_threshold": r.exceeds_threshold,
                        })
                    }
                };
                let mut row = record(row);
                row["discriminant_convention"] = json!(DISCRIMINANT_CONVENTION);
                rows.push(row);
            }
            Ok(rows.into())
        }
    }
}

/// Nested objects become dotted columns, arrays are kept as JSON text.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (key, x) in m {
                let name = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten(&name, x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn render(rows: &[Value], format: Format) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            for r in rows {
                serde_json::to_writer(&mut buf, r).map_err(|e| Failure::Assertion(e.to_string()))?;
                buf.push(b'\n');
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            let mut header: Option<Vec<String>> = None;
            for r in rows {
                let mut cells = Vec::new();
                flatten("", r, &mut cells);
                let names: Vec<String> = cells.iter().map(|c| c.0.clone()).collect();
                match &header {
                    None => {
                        w.write_record(&names).map_err(|e| Failure::Assertion(e.to_string()))?;
                        header = Some(names);
                    }
                    Some(h) if *h != names => return Err(Failure::Assertion("rows do not share columns".into())),
                    _ => {}
                }
                w.write_record(cells.iter().map(|c| &c.1)).map_err(|e| Failure::Assertion(e.to_string()))?;
            }
            w.flush().map_err(|e| Failure::Assertion(e.to_string()))?;
            drop(w);
        }
    }
    Ok(buf)
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Dims { .. } | Command::Eigen { .. } | Command::RatioTrend { .. } => Format::Csv,
        _ => Format::Json,
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Assertion(_) => "assertion",
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Assertion(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Assertion(m) => m,
        }
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let obj = record(json!({ "error": { "kind": kind, "message": message } }));
    println!("{obj}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return fail("usage", "--threads must be positive", 1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return fail("usage", &e.to_string(), 1);
        }
    }
    if !(cli.cutoff_mult > 0.0 && cli.cutoff_mult.is_finite()) {
        return fail("usage", "--cutoff-mult must be positive", 1);
    }
    if cli.prec_bits < 32 {
        return fail("usage", "--prec-bits must be at least 32", 1);
    }
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        default_format(&cli.cmd)
    };
    let ctx = Ctx {
        prec: cli.prec_bits,
        cutoff_mult: cli.cutoff_mult,
        cmax: cli.cmax,
        seed: cli.seed,
        cache: Cache::new(cli.cache_dir.clone()),
    };
    let out = match run(&cli.cmd, &ctx) {
        Ok(o) => o,
        Err(f) => return fail(f.kind(), f.message(), f.code()),
    };
    let bytes = match render(&out.rows, format) {
        Ok(b) => b,
        Err(f) => return fail(f.kind(), f.message(), f.code()),
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(&bytes).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(1);
    }
    drop(stdout);
    match out.failed {
        Some(m) => fail("assertion", &m, 2),
        None => ExitCode::SUCCESS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let a: Failure = extremal::Error::Assertion("plus-space dimension 1, expected 2".into()).into();
        assert_eq!((a.kind(), a.code()), ("assertion", 2));
        let c: Failure = extremal::Error::Convergence("no".into()).into();
        assert_eq!(c.code(), 2);
        let u: Failure = extremal::Error::NotFundamental(12).into();
        assert_eq!((u.kind(), u.code()), ("usage", 1));
    }

    #[test]
    fn csv_flattens_nested_fields_in_order() {
        let rows = vec![record(json!({ "k": 12, "x": { "value": 1.5, "err": 0.0 }, "m": [1, 2], "s": null }))];
        let out = String::from_utf8(render(&rows, Format::Csv).unwrap()).unwrap();
        assert_eq!(out, "schema_version,k,x.value,x.err,m,s\n1,12,1.5,0.0,\"[1,2]\",\n");
    }

    #[test]
    fn mismatched_columns_are_rejected() {
        let rows = vec![json!({ "a": 1 }), json!({ "b": 1 })];
        assert!(render(&rows, Format::Csv).is_err());
    }
}

//! Command-line front end: `verify`, `counterexample`, `ntt` and `bench`.
//!
//! Exit status: 0 when every check passes, 1 when a property violation was
//! found, 2 for configuration, usage or budget errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ntt_kernel::analysis::{search_counterexamples, verify_alg6_case, CaseReport, SearchSpace, Verdict};
use ntt_kernel::bench::{run_bench, BenchConfig, BenchMode, BenchReport, CSV_HEADER};
use ntt_kernel::butterflies::{
    harvey_butterfly, improved_ct_butterfly, improved_gs_butterfly, ntl_butterfly, scott_butterfly, MontTwiddle,
    NtlTwiddle, PlantardTwiddle,
};
use ntt_kernel::crt::{crt_recombine, qin_identity, ModulusPair};
use ntt_kernel::oracle::{mul_mod, naive_dft, reference_residue, schoolbook_cyclic_convolution, Factor, SignMode};
use ntt_kernel::params::{bit_reverse, build_params, preset_dims};
use ntt_kernel::transform::cyclic_convolution_with;
use ntt_kernel::{
    intt_inverse, ntt_forward, preset, NttParams, Polynomial, ReductionContext, ShiftSemantics, TransformKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SEED_ENV: &str = "NTT_KERNEL_SEED";
pub const SCHEMA: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ntt-kernel",
    version,
    about = "Verify, search and benchmark NTT reduction kernels"
)]
pub struct Cli {
    /// Output format (defaults to json for `counterexample`, text otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// RNG seed for sampled suites; the NTT_KERNEL_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run oracle suites for one algorithm family or all of them.
    Verify(VerifyArgs),
    /// Search for inputs where the published signed Plantard reduction is wrong.
    Counterexample(CounterexampleArgs),
    /// Round-trip, DFT and convolution checks of the transforms.
    Ntt(NttArgs),
    /// Time whole forward transforms per kind.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    Montgomery,
    SignedMontgomery,
    Plantard,
    SignedPlantard,
    ModifiedPlantard,
    Crt,
    Butterflies,
    Transform,
    /// Every suite except signed-plantard, which is known to fail.
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub alg: Alg,
    #[arg(long)]
    pub preset: Option<String>,
    /// Modulus; overrides the preset.
    #[arg(long)]
    pub p: Option<u64>,
    /// Word size in bits.
    #[arg(long)]
    pub n: Option<u32>,
    /// Transform size, for the butterfly and transform suites with `--p`.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub alpha: u32,
    /// Lazy-input exponent for modified Plantard; defaults to the largest admissible.
    #[arg(long)]
    pub ell: Option<u32>,
    /// Largest modulus of the exhaustive Montgomery sweep.
    #[arg(long, default_value_t = 63)]
    pub exhaustive_max_p: u64,
    /// Samples per randomized suite (suites with n <= 8 are exhaustive).
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Random polynomials per kind in the transform suite.
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SemanticsArg {
    Signed,
    Arith,
    Both,
}

impl SemanticsArg {
    fn list(self) -> Vec<ShiftSemantics> {
        match self {
            SemanticsArg::Signed => vec![ShiftSemantics::SignedFloor],
            SemanticsArg::Arith => vec![ShiftSemantics::ArithmeticFloor],
            SemanticsArg::Both => vec![ShiftSemantics::SignedFloor, ShiftSemantics::ArithmeticFloor],
        }
    }
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 31)]
    pub p: u64,
    #[arg(long, default_value_t = 6)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub alpha: u32,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Both)]
    pub semantics: SemanticsArg,
    /// Largest number of cases evaluated per semantics.
    #[arg(long, default_value_t = 1 << 24)]
    pub limit: u64,
    /// Sample this many random cases instead of the exhaustive box
    /// (the default when n > 8 is 100000 samples).
    #[arg(long)]
    pub random: Option<u64>,
    /// Succeed only if (19, -5) is reported with the published outputs.
    #[arg(long)]
    pub expect_paper_case: bool,
}

#[derive(Debug, Args)]
pub struct NttArgs {
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub size: Option<usize>,
    /// Word size; overrides the preset's.
    #[arg(long)]
    pub n_bits: Option<u32>,
    /// A transform kind or `all`.
    #[arg(long, default_value = "all")]
    pub kind: String,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Every polynomial over Z_p of length N (small parameters only).
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Preset name; repeat for several.
    #[arg(long, default_values_t = vec!["kyber256".to_string()])]
    pub preset: Vec<String>,
    /// A transform kind or `all`.
    #[arg(long, default_value = "all")]
    pub kind: String,
    #[arg(long, default_value_t = 100_000)]
    pub iters: u64,
    /// Untimed iterations per kind (default: iters / 10, at most 10000).
    #[arg(long)]
    pub warmup: Option<u64>,
    /// Time batches of single butterflies instead of whole transforms.
    #[arg(long)]
    pub micro: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(ntt_kernel::Error),
}

impl From<ntt_kernel::Error> for CliError {
    fn from(e: ntt_kernel::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let seed = match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                let _ = writeln!(err, "error: {SEED_ENV}={v:?} is not an unsigned integer");
                return EXIT_CONFIG;
            }
        },
        Err(_) => cli.seed,
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, seed, cli.format.unwrap_or(Format::Text)),
        Command::Counterexample(a) => cmd_counterexample(a, seed, cli.format.unwrap_or(Format::Json)),
        Command::Ntt(a) => cmd_ntt(a, seed, cli.format.unwrap_or(Format::Text)),
        Command::Bench(a) => cmd_bench(a, seed, cli.format.unwrap_or(Format::Text)),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

// ---- suites -----------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Suite {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
}

impl Suite {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: 0,
        }
    }

    fn check(&mut self, ok: bool) {
        self.cases += 1;
        self.failures += u64::from(!ok);
    }
}

#[derive(Serialize)]
struct SuiteReport<'a> {
    schema: u32,
    command: &'a str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<String>,
    suites: &'a [Suite],
    failures: u64,
}

fn render_suites(
    command: &str,
    target: Option<String>,
    suites: &[Suite],
    seed: u64,
    format: Format,
) -> CliResult<(String, i32)> {
    let failures: u64 = suites.iter().map(|s| s.failures).sum();
    let code = if failures == 0 { EXIT_PASS } else { EXIT_VIOLATION };
    let mut s = String::new();
    match format {
        Format::Json => {
            let report = SuiteReport {
                schema: SCHEMA,
                command,
                seed,
                target,
                suites,
                failures,
            };
            s = serde_json::to_string(&report).expect("report serializes");
            s.push('\n');
        }
        Format::Csv => {
            s.push_str("suite,cases,failures\n");
            for suite in suites {
                let _ = writeln!(s, "{},{},{}", suite.name, suite.cases, suite.failures);
            }
        }
        Format::Text => {
            if let Some(t) = target {
                let _ = writeln!(s, "{command} {t} (seed {seed})");
            }
            for suite in suites {
                let status = if suite.failures == 0 { "ok" } else { "FAIL" };
                let _ = writeln!(
                    s,
                    "{:<48} {:>10} cases {:>8} failures  {status}",
                    suite.name, suite.cases, suite.failures
                );
            }
            let _ = writeln!(s, "{}", if failures == 0 { "PASS" } else { "FAIL" });
        }
    }
    Ok((s, code))
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Modulus and word size a verify run targets.
struct Target {
    p: u64,
    n: u32,
    preset: Option<String>,
}

impl Target {
    fn from_args(a: &VerifyArgs) -> CliResult<Self> {
        let (pp, pn, name) = match &a.preset {
            Some(name) => {
                let (p, _, n) = preset_dims(name)?;
                (Some(p), Some(n), Some(name.clone()))
            }
            None => (None, None, None),
        };
        let p = a.p.or(pp).unwrap_or(13);
        let n = a.n.or(pn).unwrap_or(if a.p.is_some() { 32 } else { 8 });
        // `--p` replaces the preset's modulus, so the preset no longer applies.
        let preset = if a.p.is_some() && a.p != pp {
            None
        } else {
            name.or_else(|| a.p.is_none().then(|| "toy13".into()))
        };
        Ok(Self { p, n, preset })
    }

    fn ctx(&self) -> CliResult<ReductionContext> {
        Ok(ReductionContext::new(self.p, self.n)?)
    }

    fn exhaustive(&self) -> bool {
        self.n <= 8
    }

    fn describe(&self) -> String {
        match &self.preset {
            Some(name) => format!("{name} (p = {}, n = {})", self.p, self.n),
            None => format!("p = {}, n = {}", self.p, self.n),
        }
    }
}

fn montgomery_suites(a: &VerifyArgs, t: &Target, seed: u64) -> CliResult<Vec<Suite>> {
    let mut out = Vec::new();
    let mut s = Suite::new(format!("montgomery exhaustive p <= {}", a.exhaustive_max_p));
    if a.exhaustive_max_p > 4093 {
        return Err(CliError::Usage("--exhaustive-max-p must be at most 4093".into()));
    }
    for p in (3..=a.exhaustive_max_p).step_by(2) {
        let n = 64 - p.leading_zeros();
        let ctx = ReductionContext::new(p, n)?;
        for v in 0..p * p {
            let want = reference_residue(v as i128, p, 1 << n, SignMode::Unsigned, Factor::RInv);
            s.check(ctx.mont_redc(v).map(|r| r as i128) == Ok(want));
        }
    }
    out.push(s);
    let ctx = t.ctx()?;
    let p = t.p;
    let mut s = Suite::new(format!("montgomery {}", t.describe()));
    let check = |s: &mut Suite, v: u64| {
        let want = reference_residue(v as i128, p, 1 << t.n, SignMode::Unsigned, Factor::RInv);
        s.check(ctx.mont_redc(v).map(|r| r as i128) == Ok(want));
    };
    if t.exhaustive() {
        (0..p * p).for_each(|v| check(&mut s, v));
    } else {
        let mut r = rng(seed, 1);
        (0..a.samples).for_each(|_| check(&mut s, r.random_range(0..p * p)));
    }
    out.push(s);
    Ok(out)
}

fn signed_montgomery_suite(a: &VerifyArgs, t: &Target, seed: u64) -> CliResult<Suite> {
    let ctx = t.ctx()?;
    ctx.check_signed_montgomery()?;
    let p = t.p as i64;
    let half = (p << t.n) / 2;
    let mut s = Suite::new(format!("signed-montgomery {}", t.describe()));
    let check = |s: &mut Suite, v: i64| {
        let want = reference_residue(v as i128, t.p, 1 << t.n, SignMode::Unsigned, Factor::RInv);
        s.check(
            ctx.signed_mont_redc(v)
                .is_ok_and(|r| r.abs() < p && (r as i128).rem_euclid(p as i128) == want),
        );
    };
    if t.exhaustive() {
        (-half + 1..half).for_each(|v| check(&mut s, v));
    } else {
        let mut r = rng(seed, 2);
        (0..a.samples).for_each(|_| check(&mut s, r.random_range(-half + 1..half)));
    }
    Ok(s)
}

fn plantard_suite(a: &VerifyArgs, t: &Target, seed: u64) -> CliResult<Suite> {
    let ctx = t.ctx()?;
    ctx.check_plantard()?;
    let p = t.p;
    let mut s = Suite::new(format!("plantard {}", t.describe()));
    let check = |s: &mut Suite, w: u64, v: u64| {
        let want = reference_residue(
            w as i128 * v as i128,
            p,
            1 << (2 * t.n),
            SignMode::Unsigned,
            Factor::NegRInv,
        );
        s.check(ctx.plantard_redc(w, v).is_ok_and(|r| r < p && r as i128 == want));
    };
    if t.exhaustive() {
        for w in 0..=p {
            (0..=p).for_each(|v| check(&mut s, w, v));
        }
    } else {
        let mut r = rng(seed, 3);
        (0..a.samples).for_each(|_| check(&mut s, r.random_range(0..=p), r.random_range(0..=p)));
    }
    Ok(s)
}

fn signed_plantard_suites(a: &VerifyArgs, t: &Target, seed: u64) -> CliResult<Vec<Suite>> {
    let ctx = t.ctx()?.with_alpha(a.alpha);
    ctx.check_signed_plantard()?;
    let lim = (t.p as i64) << a.alpha;
    let mut out = Vec::new();
    for sem in [ShiftSemantics::SignedFloor, ShiftSemantics::ArithmeticFloor] {
        let mut s = Suite::new(format!(
            "signed-plantard {} alpha = {} {}",
            t.describe(),
            a.alpha,
            sem.name()
        ));
        let check = |s: &mut Suite, w: i64, v: i64| -> CliResult<()> {
            s.check(verify_alg6_case(w, v, &ctx, sem)?.verdict == Verdict::Match);
            Ok(())
        };
        if t.exhaustive() {
            for w in -lim..=lim {
                for v in -lim..=lim {
                    check(&mut s, w, v)?;
                }
            }
        } else {
            let mut r = rng(seed, 4);
            for _ in 0..a.samples {
                check(&mut s, r.random_range(-lim..=lim), r.random_range(-lim..=lim))?;
            }
        }
        out.push(s);
    }
    Ok(out)
}

fn admissible_ell(p: u64, n: u32) -> Option<u32> {
    (0..n.saturating_sub(2))
        .rev()
        .find(|&ell| p < 1u64 << (n - ell - 2))
        .map(|e| e.min(16))
}

fn modified_plantard_suite(a: &VerifyArgs, t: &Target, seed: u64) -> CliResult<Suite> {
    let ell = match a.ell {
        Some(e) => e,
        None => match &t.preset {
            Some(name) => preset(name)?.ell(),
            None => admissible_ell(t.p, t.n).ok_or_else(|| {
                CliError::Usage(format!("no ell satisfies p < 2^(n-ell-2) for p = {}, n = {}", t.p, t.n))
            })?,
        },
    };
    let ctx = t.ctx()?.with_ell(ell);
    ctx.check_modified_plantard()?;
    let p = t.p;
    let wide = 1u128 << (2 * t.n);
    let mut s = Suite::new(format!("modified-plantard {} ell = {ell}", t.describe()));
    let check = |s: &mut Suite, w: u64, v: u64| {
        let want = reference_residue(w as i128 * v as i128, p, wide, SignMode::Unsigned, Factor::NegRInv);
        let h = ctx.modified_plantard_h(w, v) as u128;
        let exact = (h * p as u128).wrapping_sub(w as u128 * v as u128).is_multiple_of(wide);
        s.check(
            exact
                && ctx
                    .modified_plantard_mul(w, v)
                    .is_ok_and(|r| r < p && r as i128 == want),
        );
    };
    if t.exhaustive() {
        for w in 0..p {
            (0..p << ell).for_each(|v| check(&mut s, w, v));
        }
    } else {
        let mut r = rng(seed, 5);
        (0..a.samples).for_each(|_| check(&mut s, r.random_range(0..p), r.random_range(0..p << ell)));
    }
    Ok(s)
}

fn crt_suites(t: &Target) -> CliResult<Vec<Suite>> {
    let mut qin = Suite::new("crt qin identity p <= 255, R <= 2^16");
    for p in (3u128..=255).step_by(2) {
        for k in 2..=16 {
            let r = 1u128 << k;
            qin.check(qin_identity(p, r).is_ok_and(|q| q.p_inv * p + q.r_inv * r == 1 + p * r));
        }
    }
    let mut rec = Suite::new("crt recombine p <= 31, R <= 64");
    for p in (3u128..=31).step_by(2) {
        for k in 1..=6 {
            let pair = ModulusPair::new(p, 1 << k)?;
            for x in 0..pair.product() {
                rec.check(crt_recombine(x % p, x % pair.r(), &pair) == Ok(x));
            }
        }
    }
    // K soundness needs a signed Plantard context; fall back to (31, 6).
    let ctx = t
        .ctx()
        .ok()
        .filter(|c| c.check_signed_plantard().is_ok() && t.exhaustive());
    let ctx = match ctx {
        Some(c) => c,
        None => ReductionContext::new(31, 6)?,
    };
    let p = ctx.p() as i64;
    let mut k_suite = Suite::new(format!("crt predicted value p = {}, n = {}", ctx.p(), ctx.word_bits()));
    for w in -p..=p {
        for v in -p..=p {
            let k = ntt_kernel::analysis::crt_predicted_value(w, v, &ctx)?;
            let want = reference_residue(
                (w * v) as i128,
                ctx.p(),
                1 << (2 * ctx.word_bits()),
                SignMode::Centered,
                Factor::NegRInv,
            );
            k_suite.check(2 * k.abs() < p && k as i128 == want);
        }
    }
    Ok(vec![qin, rec, k_suite])
}

fn target_params(a: &VerifyArgs, t: &Target) -> CliResult<NttParams> {
    if let Some(name) = &t.preset {
        if a.n.is_none() || Some(t.n) == preset_dims(name).ok().map(|d| d.2) {
            return Ok(preset(name)?);
        }
        let (p, size, _) = preset_dims(name)?;
        return Ok(build_params(p, size, t.n, &TransformKind::ALL)?);
    }
    let size = a
        .size
        .ok_or_else(|| CliError::Usage("the butterfly and transform suites need --preset or --size".into()))?;
    Ok(build_params(t.p, size, t.n, &TransformKind::ALL)?)
}

fn butterfly_suites(a: &VerifyArgs, params: &NttParams, seed: u64) -> CliResult<Vec<Suite>> {
    let ctx = params.ctx();
    let p = params.p();
    let scott = params
        .scott_config()
        .ok_or_else(|| CliError::Usage("parameters carry no Scott configuration".into()))?;
    let names = ["ntl", "harvey", "scott", "improved-ct", "improved-gs"];
    let mut suites: Vec<Suite> = names
        .iter()
        .map(|k| Suite::new(format!("butterfly {k} p = {p}, n = {}", params.word_bits())))
        .collect();
    let mut check = |x: u64, y: u64, w: u64| -> CliResult<()> {
        let sum = (x + y) % p;
        let dw = mul_mod(w, (x + p - y) % p, p);
        let wy = mul_mod(w, y, p);
        let o = ntl_butterfly(x, y, NtlTwiddle::new(w, ctx), ctx)?;
        suites[0].check((o.x_out, o.y_out) == (sum, dw));
        let o = harvey_butterfly(x, y, MontTwiddle::new(w, ctx), ctx)?;
        suites[1].check(o.x_out < 2 * p && o.y_out < 2 * p && (o.x_out % p, o.y_out % p) == (sum, dw));
        let o = scott_butterfly(x, y, MontTwiddle::new(w, ctx), ctx, scott, false)?;
        suites[2].check((o.x_out % p, o.y_out % p) == (sum, dw));
        let o = improved_ct_butterfly(x, y, PlantardTwiddle::new(w, ctx), ctx)?;
        suites[3].check((o.x_out % p, o.y_out % p) == ((x + wy) % p, (x + p - wy) % p) && o.x_out < x + p);
        let o = improved_gs_butterfly(x, y, PlantardTwiddle::new(w, ctx), ctx, 1)?;
        suites[4].check(o.y_out < p && (o.x_out % p, o.y_out) == (sum, dw));
        Ok(())
    };
    if params.word_bits() <= 8 {
        for w in 1..p {
            for x in 0..p {
                for y in 0..p {
                    check(x, y, w)?;
                }
            }
        }
    } else {
        let mut r = rng(seed, 6);
        for _ in 0..a.samples {
            check(r.random_range(0..p), r.random_range(0..p), r.random_range(1..p))?;
        }
    }
    Ok(suites)
}

fn random_poly(r: &mut ChaCha8Rng, p: u64, size: usize) -> Polynomial {
    Polynomial::new((0..size).map(|_| r.random_range(0..p)).collect()).expect("power-of-two size")
}

/// Round-trip, DFT and convolution checks for `kinds`.
fn transform_suites(
    params: &NttParams,
    kinds: &[TransformKind],
    trials: u64,
    exhaustive: bool,
    seed: u64,
) -> CliResult<Vec<Suite>> {
    let p = params.p();
    let size = params.size();
    let bits = params.ell();
    let label = format!("p = {p}, N = {size}, n = {}", params.word_bits());
    let inputs: Vec<Polynomial> = if exhaustive {
        let total = (p as u128)
            .checked_pow(size as u32)
            .filter(|&t| t <= 1 << 20)
            .ok_or_else(|| CliError::Usage(format!("--exhaustive needs p^N <= 2^20, got p = {p}, N = {size}")))?;
        (0..total as u64)
            .map(|idx| {
                let coeffs = (0..size as u32).map(|i| idx / p.pow(i) % p).collect();
                Polynomial::new(coeffs).expect("power-of-two size")
            })
            .collect()
    } else {
        let mut r = rng(seed, 7);
        (0..trials).map(|_| random_poly(&mut r, p, size)).collect()
    };
    let dfts: Vec<Vec<u64>> = inputs
        .iter()
        .map(|f| naive_dft(f.coeffs(), params.omega(), p))
        .collect();
    let mut r = rng(seed, 8);
    let pairs: Vec<(Polynomial, Polynomial, Vec<u64>)> = (0..trials.clamp(1, 100))
        .map(|_| {
            let a = random_poly(&mut r, p, size);
            let b = random_poly(&mut r, p, size);
            let c = schoolbook_cyclic_convolution(a.coeffs(), b.coeffs(), p).expect("equal lengths");
            (a, b, c)
        })
        .collect();
    let mut out = Vec::new();
    for &kind in kinds {
        let mut rt = Suite::new(format!("ntt {kind} round-trip {label}"));
        let mut dft = Suite::new(format!("ntt {kind} naive-dft {label}"));
        let mut conv = Suite::new(format!("ntt {kind} convolution {label}"));
        for (f, want) in inputs.iter().zip(&dfts) {
            let s = ntt_forward(f, params, kind)?;
            let canon = s.canonical(p);
            dft.check((0..size).all(|j| canon[j] == want[bit_reverse(j, bits)]));
            rt.check(intt_inverse(&s, params, kind)? == *f);
        }
        for (a, b, c) in &pairs {
            conv.check(cyclic_convolution_with(a, b, params, kind)?.coeffs() == c.as_slice());
        }
        out.extend([rt, dft, conv]);
    }
    Ok(out)
}

fn cmd_verify(a: &VerifyArgs, seed: u64, format: Format) -> CliResult<(String, i32)> {
    let t = Target::from_args(a)?;
    let mut suites = Vec::new();
    let all = a.alg == Alg::All;
    if all || a.alg == Alg::Montgomery {
        suites.extend(montgomery_suites(a, &t, seed)?);
    }
    if all || a.alg == Alg::SignedMontgomery {
        suites.push(signed_montgomery_suite(a, &t, seed)?);
    }
    if all || a.alg == Alg::Plantard {
        suites.push(plantard_suite(a, &t, seed)?);
    }
    if a.alg == Alg::SignedPlantard {
        suites.extend(signed_plantard_suites(a, &t, seed)?);
    }
    if all || a.alg == Alg::ModifiedPlantard {
        suites.push(modified_plantard_suite(a, &t, seed)?);
    }
    if all || a.alg == Alg::Crt {
        suites.extend(crt_suites(&t)?);
    }
    if all || a.alg == Alg::Butterflies {
        suites.extend(butterfly_suites(a, &target_params(a, &t)?, seed)?);
    }
    if all || a.alg == Alg::Transform {
        let params = target_params(a, &t)?;
        suites.extend(transform_suites(&params, &TransformKind::ALL, a.trials, false, seed)?);
    }
    render_suites("verify", Some(t.describe()), &suites, seed, format)
}

// ---- counterexample ---------------------------------------------------------

fn cmd_counterexample(a: &CounterexampleArgs, seed: u64, format: Format) -> CliResult<(String, i32)> {
    let ctx = ReductionContext::new(a.p, a.n)?.with_alpha(a.alpha);
    ctx.check_signed_plantard()?;
    let space = match a.random {
        Some(count) => SearchSpace::Random { count, seed },
        None if a.n <= 8 => SearchSpace::Exhaustive,
        None => SearchSpace::Random { count: 100_000, seed },
    };
    let mut reports: Vec<CaseReport> = Vec::new();
    for sem in a.semantics.list() {
        reports.extend(search_counterexamples(&ctx, sem, &space, a.limit)?);
    }
    let mut s = String::new();
    match format {
        Format::Json => {
            for r in &reports {
                s.push_str(&serde_json::to_string(r).expect("report serializes"));
                s.push('\n');
            }
        }
        Format::Csv => {
            s.push_str("w,t,a,h,k,alg_output,semantics,verdict\n");
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},mismatch",
                    r.w,
                    r.t,
                    r.a,
                    r.h,
                    r.k,
                    r.alg_output,
                    r.semantics.name()
                );
            }
        }
        Format::Text => {
            for r in &reports {
                let _ = writeln!(
                    s,
                    "W = {:>4}, T = {:>4}: alg {:>4} vs true {:>4} ({})",
                    r.w,
                    r.t,
                    r.alg_output,
                    r.k,
                    r.semantics.name()
                );
            }
            let _ = writeln!(s, "{} mismatches", reports.len());
        }
    }
    let code = if a.expect_paper_case {
        let found = a.semantics.list().into_iter().all(|sem| {
            let want = match sem {
                ShiftSemantics::SignedFloor => -14,
                ShiftSemantics::ArithmeticFloor => -16,
            };
            reports
                .iter()
                .any(|r| (r.w, r.t, r.k, r.alg_output, r.semantics) == (19, -5, -15, want, sem))
        });
        if found {
            EXIT_PASS
        } else {
            EXIT_VIOLATION
        }
    } else {
        EXIT_PASS
    };
    Ok((s, code))
}

// ---- ntt --------------------------------------------------------------------

fn parse_kinds(kind: &str) -> CliResult<Vec<TransformKind>> {
    if kind == "all" {
        return Ok(TransformKind::ALL.to_vec());
    }
    kind.split(',')
        .map(|k| Ok(k.trim().parse::<TransformKind>()?))
        .collect()
}

fn cmd_ntt(a: &NttArgs, seed: u64, format: Format) -> CliResult<(String, i32)> {
    let kinds = parse_kinds(&a.kind)?;
    let (p, size, n, label) = match (&a.preset, a.p) {
        (Some(name), None) => {
            let (p, size, n) = preset_dims(name)?;
            (p, size, a.n_bits.unwrap_or(n), Some(name.clone()))
        }
        (None, Some(p)) => {
            let size = a.size.ok_or_else(|| CliError::Usage("--p needs --size".into()))?;
            (p, size, a.n_bits.unwrap_or(32), None)
        }
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --preset or --p, not both".into())),
        (None, None) => return Err(CliError::Usage("give --preset or --p with --size".into())),
    };
    let params = build_params(p, size, n, &kinds)?;
    let suites = transform_suites(&params, &kinds, a.trials, a.exhaustive, seed)?;
    let target = match label {
        Some(name) => format!("{name} (p = {p}, N = {size}, n = {n})"),
        None => format!("p = {p}, N = {size}, n = {n}"),
    };
    render_suites("ntt", Some(target), &suites, seed, format)
}

// ---- bench ------------------------------------------------------------------

fn cmd_bench(a: &BenchArgs, seed: u64, format: Format) -> CliResult<(String, i32)> {
    let kinds = parse_kinds(&a.kind)?;
    let mut reports: Vec<BenchReport> = Vec::new();
    for name in &a.preset {
        let mut cfg = BenchConfig::new(name.clone(), a.iters, seed);
        cfg.kinds = kinds.clone();
        if let Some(w) = a.warmup {
            cfg.warmup = w;
        }
        if a.micro {
            cfg.mode = BenchMode::Butterfly;
        }
        reports.push(run_bench(&cfg)?);
    }
    let mut s = String::new();
    match format {
        Format::Json => {
            for r in &reports {
                s.push_str(&serde_json::to_string(r).expect("report serializes"));
                s.push('\n');
            }
        }
        Format::Csv => {
            s.push_str(CSV_HEADER);
            s.push('\n');
            for r in &reports {
                s.push_str(&r.csv_rows());
            }
        }
        Format::Text => {
            for r in &reports {
                s.push_str(&r.to_text());
            }
        }
    }
    Ok((s, EXIT_PASS))
}

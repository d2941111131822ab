//! Command-line front end. Each subcommand wraps one library operation and
//! reports a [`RunRecord`].
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numerical-domain error,
//! 4 synthesis failure, 1 I/O failure.

pub mod record;
pub mod units;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constants::Registry;
use crate::donor::{spectrum, hamiltonian_full, DonorParams, FieldConfig};
use crate::entangler::{concurrence, solve_entangler_branch, subspace_state, verify_entangling_conditions};
use crate::error::{Error, Result};
use crate::gate_fidelity::{entangling_time, fidelity_curve};
use crate::heisenberg::{prepare, PreparationPlan, PulseParams};
use crate::schmidt::{decompose, fidelity_states, synthesize};
use crate::state::{TwoQubitState, BASIS_LABELS};

pub use record::{Quantity, RunRecord};

/// Largest accepted `|‖ψ‖ − 1|` for user-supplied targets before renormalizing.
pub const TARGET_NORM_TOL: f64 = 1e-6;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_SYNTHESIS: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "spinprep", version, about = "Two-spin state preparation and donor entangling gates")]
pub struct Cli {
    /// Constants registry (TOML); defaults to $SPINPREP_CONSTANTS, then the built-in table.
    #[arg(long, global = true, value_name = "FILE")]
    pub constants: Option<PathBuf>,
    /// Record format on stdout and in sidecar files.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the two-step protocol forward.
    Prepare(PrepareArgs),
    /// Find a plan that prepares a target state.
    Synthesize(SynthesizeArgs),
    /// Field and time for a maximally entangled electron–nuclear state.
    Entangle(EntangleArgs),
    /// Gate fidelity against the entangling gate over time.
    FidelityCurve(CurveArgs),
    /// Energies and eigenvectors of the donor hamiltonian.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Exchange coupling, s⁻¹.
    #[arg(long = "A", allow_hyphen_values = true, required_unless_present = "plan")]
    pub a: Option<f64>,
    /// Free-evolution time (s or ns suffix).
    #[arg(long, value_parser = units::parse_time, default_value = "0")]
    pub t1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub chi1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub theta1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub phi1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub chi2: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub theta2: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub phi2: f64,
    /// JSON plan file (`coupling_a`, `t1`, `pulse1`, `pulse2`) instead of flags.
    #[arg(long, conflicts_with = "a")]
    pub plan: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["target", "target_file", "random"]))]
pub struct SynthesizeArgs {
    /// Exchange coupling, s⁻¹.
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: f64,
    /// Eight comma-separated numbers: re,im of the ↑↑, ↑↓, ↓↑, ↓↓ amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    /// File holding the same eight numbers (whitespace or commas, `#` comments).
    #[arg(long)]
    pub target_file: Option<PathBuf>,
    /// Synthesize this many random targets.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DonorArgs {
    /// Donor preset from the constants registry.
    #[arg(long, default_value = "P31")]
    pub preset: String,
    /// Override γₑ, s⁻¹ T⁻¹.
    #[arg(long)]
    pub gamma_e: Option<f64>,
    /// Override γₙ, s⁻¹ T⁻¹.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_n: Option<f64>,
    /// Override the hyperfine coupling, s⁻¹.
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EntangleArgs {
    #[command(flatten)]
    pub donor: DonorArgs,
    /// Relative phase of the target (|↑↓⟩ + e^{iχ}|↓↑⟩)/√2, rad.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub chi: f64,
    /// Extra half-periods added to the minimal time.
    #[arg(long, default_value_t = 0)]
    pub branch: u32,
    /// Sweep χ over this many points of [0, 2π) instead of a single χ.
    #[arg(long, conflicts_with = "chi")]
    pub sweep: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub donor: DonorArgs,
    /// End of the time window (s or ns suffix).
    #[arg(long, value_parser = units::parse_time, default_value = "40ns")]
    pub t_max: f64,
    /// Number of samples, endpoints included.
    #[arg(long, default_value_t = crate::gate_fidelity::DEFAULT_POINTS)]
    pub n: usize,
    /// Curve file; the record goes next to it with a `.record` suffix.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub donor: DonorArgs,
    /// Field magnitude (T or mT suffix).
    #[arg(long = "B", value_parser = units::parse_field, default_value = "0")]
    pub b: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub phi: f64,
    /// Sweep B uniformly from 0 to this value instead of a single field.
    #[arg(long, value_parser = units::parse_field, conflicts_with = "b")]
    pub b_max: Option<f64>,
    /// Points in a B sweep.
    #[arg(long, default_value_t = 11, requires = "b_max")]
    pub points: usize,
}

/// A finished run: the record plus the exit status it implies.
#[derive(Clone, Debug)]
pub struct Report {
    pub record: RunRecord,
    pub exit_code: u8,
}

impl Report {
    fn ok(record: RunRecord) -> Self {
        Self { record, exit_code: EXIT_OK }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::NonFinite(_) | Error::NonHermitian { .. } | Error::NonUnitary { .. } => EXIT_DOMAIN,
        Error::SynthesisFailed { .. } => EXIT_SYNTHESIS,
        Error::Io(_) => EXIT_IO,
        Error::InvalidParameter(_) | Error::NotNormalized { .. } | Error::Registry(_) => EXIT_USAGE,
    }
}

pub fn render(record: &RunRecord, format: Format) -> String {
    match format {
        Format::Text => record.to_text(),
        Format::Json => record.to_json() + "\n",
    }
}

/// Parses nothing; runs an already-parsed command line.
pub fn execute(cli: &Cli) -> Result<Report> {
    let registry = Registry::resolve(cli.constants.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    match &cli.command {
        Command::Prepare(a) => cmd_prepare(a, &registry),
        Command::Synthesize(a) => pool.install(|| cmd_synthesize(a, &registry)),
        Command::Entangle(a) => pool.install(|| cmd_entangle(a, &registry)),
        Command::FidelityCurve(a) => pool.install(|| cmd_fidelity_curve(a, &registry, cli.format)),
        Command::Spectrum(a) => pool.install(|| cmd_spectrum(a, &registry)),
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let _ = stdout.write_all(render(&report.record, cli.format).as_bytes());
            report.exit_code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::SynthesisFailed { best, .. } = &e {
                let _ = writeln!(stderr, "best plan reached fidelity {:.16e}", best.residual_fidelity);
            }
            exit_code(&e)
        }
    }
}

fn donor_from(args: &DonorArgs, registry: &Registry) -> Result<DonorParams> {
    let base = registry.donor_preset(&args.preset)?;
    DonorParams::new(
        args.gamma_e.unwrap_or(base.gamma_e),
        args.gamma_n.unwrap_or(base.gamma_n),
        args.a.unwrap_or(base.hyperfine_a),
    )
}

fn record_donor(rec: &mut RunRecord, d: &DonorParams) {
    rec.input("gamma_e", d.gamma_e, "s^-1 T^-1")
        .input("gamma_n", d.gamma_n, "s^-1 T^-1")
        .input("A", d.hyperfine_a, "s^-1");
}

fn record_state(rec: &mut RunRecord, prefix: &str, psi: &TwoQubitState) {
    for (label, amp) in BASIS_LABELS.iter().zip(psi.amplitudes()) {
        rec.output(format!("{prefix}.{label}.re"), amp.re, "dimensionless")
            .output(format!("{prefix}.{label}.im"), amp.im, "dimensionless");
    }
}

fn record_plan(rec: &mut RunRecord, plan: &PreparationPlan, inputs: bool) {
    let mut put = |k: &str, v: f64, u: &str| {
        if inputs {
            rec.input(k, v, u);
        } else {
            rec.output(k, v, u);
        }
    };
    if inputs {
        put("A", plan.coupling_a(), "s^-1");
    }
    put("t1", plan.t1(), "s");
    for (n, p) in [(1, plan.pulse1()), (2, plan.pulse2())] {
        put(&format!("chi{n}"), p.chi(), "rad");
        put(&format!("theta{n}"), p.theta(), "rad");
        put(&format!("phi{n}"), p.phi(), "rad");
    }
}

fn cmd_prepare(args: &PrepareArgs, registry: &Registry) -> Result<Report> {
    let plan = match &args.plan {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<PreparationPlan>(&text)
                .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?
        }
        None => PreparationPlan::new(
            args.a.expect("clap enforces --A"),
            args.t1,
            PulseParams::new(args.chi1, args.theta1, args.phi1),
            PulseParams::new(args.chi2, args.theta2, args.phi2),
        )?,
    };
    let psi = prepare(&plan);
    let form = decompose(&psi)?;

    let mut rec = RunRecord::new("prepare", &registry.version);
    record_plan(&mut rec, &plan, true);
    record_state(&mut rec, "psi", &psi);
    rec.output("schmidt.c1", form.c1, "dimensionless")
        .output("schmidt.c2", form.c2, "dimensionless")
        .output("concurrence", concurrence(&psi), "dimensionless");
    for (n, (al, be)) in form.alpha.iter().zip(form.beta.iter()).enumerate() {
        for (side, v) in [("alpha", al), ("beta", be)] {
            for (lbl, z) in ["u", "d"].iter().zip(v.amplitudes()) {
                rec.output(format!("schmidt.{side}{}.{lbl}.re", n + 1), z.re, "dimensionless")
                    .output(format!("schmidt.{side}{}.{lbl}.im", n + 1), z.im, "dimensionless");
            }
        }
    }
    rec.residual("norm", (psi.norm() - 1.0).abs(), "dimensionless")
        .residual("schmidt.reconstruction", form.reconstruct().max_abs_diff(&psi), "dimensionless")
        .residual("schmidt.orthonormality", form.orthonormality_residual(), "dimensionless");
    Ok(Report::ok(rec))
}

/// Eight numbers (re, im per basis state) to a state, renormalizing small norm drift.
pub fn parse_target(text: &str) -> Result<TwoQubitState> {
    let nums: Vec<f64> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| units::parse_finite(t).map_err(Error::InvalidParameter))
        .collect::<Result<_>>()?;
    if nums.len() != 8 {
        return Err(Error::InvalidParameter(format!("target needs 8 numbers, got {}", nums.len())));
    }
    let amps: [C64; 4] = std::array::from_fn(|k| C64::new(nums[2 * k], nums[2 * k + 1]));
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > TARGET_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    TwoQubitState::normalized(amps)
}

fn cmd_synthesize(args: &SynthesizeArgs, registry: &Registry) -> Result<Report> {
    let mut rec = RunRecord::new("synthesize", &registry.version);
    rec.input("A", args.a, "s^-1");

    if let Some(count) = args.random {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let targets: Vec<TwoQubitState> = (0..count).map(|_| TwoQubitState::random(&mut rng)).collect();
        let results: Vec<Result<f64>> = targets
            .par_iter()
            .map(|t| {
                let res = synthesize(t, args.a)?;
                // recompute from the plan, not from the solver's bookkeeping
                Ok(fidelity_states(t, &prepare(&res.plan)))
            })
            .collect();
        rec.input("count", count as f64, "dimensionless")
            .input("seed", args.seed as f64, "dimensionless");
        let mut failures = 0usize;
        let mut worst = 1.0_f64;
        for (k, r) in results.iter().enumerate() {
            let f = match r {
                Ok(f) => *f,
                Err(Error::SynthesisFailed { residual_fidelity, .. }) => {
                    failures += 1;
                    *residual_fidelity
                }
                Err(_) => unreachable!("random targets are normalized and A was validated"),
            };
            worst = worst.min(f);
            rec.output(format!("fidelity[{k}]"), f, "dimensionless");
        }
        rec.output("failures", failures as f64, "dimensionless")
            .residual("min_fidelity", worst, "dimensionless");
        let exit_code = if failures > 0 { EXIT_SYNTHESIS } else { EXIT_OK };
        return Ok(Report { record: rec, exit_code });
    }

    let text = match (&args.target, &args.target_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => fs::read_to_string(p)?,
        (None, None) => unreachable!("clap requires a target source"),
    };
    let target = parse_target(&text)?;
    for (label, amp) in BASIS_LABELS.iter().zip(target.amplitudes()) {
        rec.input(format!("target.{label}.re"), amp.re, "dimensionless")
            .input(format!("target.{label}.im"), amp.im, "dimensionless");
    }
    let res = synthesize(&target, args.a)?;
    record_plan(&mut rec, &res.plan, false);
    let overlap = target.inner(&prepare(&res.plan));
    rec.output("global_phase", overlap.arg(), "rad")
        .output("used_fallback", f64::from(u8::from(res.used_fallback)), "dimensionless")
        .residual("fidelity", overlap.norm_sqr(), "dimensionless")
        .residual("infidelity", 1.0 - overlap.norm_sqr(), "dimensionless");
    Ok(Report::ok(rec))
}

fn cmd_entangle(args: &EntangleArgs, registry: &Registry) -> Result<Report> {
    let d = donor_from(&args.donor, registry)?;
    let mut rec = RunRecord::new("entangle", &registry.version);
    record_donor(&mut rec, &d);
    rec.input("branch", f64::from(args.branch), "dimensionless");

    let chis: Vec<f64> = match args.sweep {
        Some(0) => return Err(Error::InvalidParameter("sweep needs at least one point".into())),
        Some(n) => (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect(),
        None => vec![args.chi],
    };
    let rows: Vec<_> = chis
        .par_iter()
        .map(|&chi| {
            let spec = solve_entangler_branch(&d, chi, args.branch)?;
            let report = verify_entangling_conditions(&d, &spec);
            let psi = subspace_state(&d, spec.bz, spec.t);
            Ok((spec, report, concurrence(&psi)))
        })
        .collect::<Result<_>>()?;

    let mut all_met = true;
    if args.sweep.is_none() {
        let (spec, report, conc) = rows[0];
        all_met = report.conditions_met;
        rec.input("chi", spec.chi, "rad")
            .output("bz", spec.bz, "T")
            .output("bz_mT", spec.bz * 1e3, "mT")
            .output("t", spec.t, "s")
            .output("t_ns", spec.t * 1e9, "ns")
            .output("achieved_chi", report.achieved_chi, "rad")
            .output("concurrence", conc, "dimensionless")
            .output("fidelity", report.fidelity_achieved, "dimensionless")
            .residual("cot_condition", report.cot_residual, "dimensionless")
            .residual("tan_condition", report.tan_residual, "dimensionless")
            .residual("domain_margin", report.domain_margin, "dimensionless")
            .residual("concurrence_deficit", 1.0 - conc, "dimensionless");
    } else {
        rec.input("points", chis.len() as f64, "dimensionless");
        let mut worst = 1.0_f64;
        for (k, (spec, report, conc)) in rows.iter().enumerate() {
            all_met &= report.conditions_met;
            worst = worst.min(*conc);
            rec.output(format!("chi[{k}]"), spec.chi, "rad")
                .output(format!("bz[{k}]"), spec.bz, "T")
                .output(format!("t[{k}]"), spec.t, "s")
                .output(format!("concurrence[{k}]"), *conc, "dimensionless");
        }
        rec.residual("min_concurrence", worst, "dimensionless");
    }
    let exit_code = if all_met { EXIT_OK } else { EXIT_DOMAIN };
    Ok(Report { record: rec, exit_code })
}

/// Companion path `<output>.record`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".record");
    PathBuf::from(s)
}

fn cmd_fidelity_curve(args: &CurveArgs, registry: &Registry, format: Format) -> Result<Report> {
    let d = donor_from(&args.donor, registry)?;
    let curve = fidelity_curve(&d, args.t_max, args.n)?;
    let deviation = curve
        .samples
        .par_iter()
        .map(|&(t, f)| (f - crate::gate_fidelity::fidelity_numeric(&d, t)).abs())
        .reduce(|| 0.0, f64::max);
    let peak = curve.refined_peak();
    let grid_peak = curve.grid_peak();

    let mut body = String::from("# t_ns F\n");
    for (t, f) in &curve.samples {
        body.push_str(&format!("{:.16e} {:.16e}\n", t * 1e9, f));
    }

    let mut rec = RunRecord::new("fidelity-curve", &registry.version);
    record_donor(&mut rec, &d);
    rec.input("t_max", args.t_max, "s")
        .input("n", args.n as f64, "dimensionless")
        .output("rows", curve.samples.len() as f64, "dimensionless")
        .output("peak_t", peak.t, "s")
        .output("peak_t_ns", peak.t * 1e9, "ns")
        .output("peak_fidelity", peak.fidelity, "dimensionless")
        .output("grid_peak_t", grid_peak.t, "s")
        .output("grid_peak_fidelity", grid_peak.fidelity, "dimensionless")
        .output("entangling_time", entangling_time(&d), "s")
        .residual("max_trace_deviation", deviation, "dimensionless")
        .residual("peak_deficit", 1.0 - peak.fidelity, "dimensionless");

    fs::write(&args.output, body)?;
    fs::write(sidecar_path(&args.output), render(&rec, format))?;
    Ok(Report::ok(rec))
}

fn cmd_spectrum(args: &SpectrumArgs, registry: &Registry) -> Result<Report> {
    let d = donor_from(&args.donor, registry)?;
    let mut rec = RunRecord::new("spectrum", &registry.version);
    record_donor(&mut rec, &d);
    rec.input("theta", args.theta, "rad").input("phi", args.phi, "rad");

    let fields: Vec<f64> = match args.b_max {
        Some(b_max) => {
            if args.points < 2 {
                return Err(Error::InvalidParameter("a B sweep needs at least 2 points".into()));
            }
            (0..args.points)
                .map(|k| b_max * k as f64 / (args.points - 1) as f64)
                .collect()
        }
        None => vec![args.b],
    };
    let configs: Vec<FieldConfig> = fields
        .iter()
        .map(|&b| FieldConfig::new(b, args.theta, args.phi))
        .collect::<Result<_>>()?;
    let spectra: Vec<_> = configs
        .par_iter()
        .map(|f| {
            let s = spectrum(&d, f);
            let h = hamiltonian_full(&d, f);
            let scale = h.max_abs().max(f64::MIN_POSITIVE);
            (s, s.eigen_residual(&h) / scale)
        })
        .collect();

    let worst_eigen = spectra.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let worst_ortho = spectra.iter().map(|(s, _)| s.orthonormality_residual()).fold(0.0, f64::max);
    if args.b_max.is_none() {
        let (s, _) = &spectra[0];
        rec.input("B", args.b, "T");
        for (k, e) in s.energies.iter().enumerate() {
            rec.output(format!("E{}", k + 1), *e, "s^-1");
        }
        rec.output("eta", s.eta, "rad").output("splitting", s.splitting(), "s^-1");
        for (k, v) in s.eigenvectors.iter().enumerate() {
            record_state(&mut rec, &format!("v{}", k + 1), v);
        }
    } else {
        rec.input("b_max", args.b_max.unwrap_or(0.0), "T")
            .input("points", args.points as f64, "dimensionless");
        for (k, (b, (s, _))) in fields.iter().zip(&spectra).enumerate() {
            rec.output(format!("B[{k}]"), *b, "T");
            for (j, e) in s.energies.iter().enumerate() {
                rec.output(format!("E{}[{k}]", j + 1), *e, "s^-1");
            }
            rec.output(format!("eta[{k}]"), s.eta, "rad")
                .output(format!("splitting[{k}]"), s.splitting(), "s^-1");
        }
        let monotone = spectra.windows(2).all(|w| w[1].0.splitting() >= w[0].0.splitting());
        rec.output("splitting_monotone", f64::from(u8::from(monotone)), "dimensionless");
    }
    rec.residual("eigen_relative", worst_eigen, "dimensionless")
        .residual("orthonormality", worst_ortho, "dimensionless");
    Ok(Report::ok(rec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(
            std::iter::once("spinprep").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn record(args: &[&str]) -> RunRecord {
        let (code, out, err) = run(args);
        assert_eq!(code, 0, "stderr: {err}");
        RunRecord::from_text(&out).unwrap()
    }

    #[test]
    fn prepare_zero_plan() {
        let r = record(&["prepare", "--A", "1", "--t1", "0"]);
        assert_eq!(r.get("psi.ud.re"), Some(1.0));
        for k in ["psi.uu.re", "psi.uu.im", "psi.ud.im", "psi.du.re", "psi.du.im", "psi.dd.re"] {
            assert_eq!(r.get(k), Some(0.0), "{k}");
        }
    }

    #[test]
    fn prepare_missing_coupling_is_usage_error() {
        assert_eq!(run(&["prepare", "--t1", "0"]).0, EXIT_USAGE);
        assert_eq!(run(&["prepare", "--A", "x"]).0, EXIT_USAGE);
    }

    #[test]
    fn target_parsing() {
        let s = parse_target("0 0\n0.7071067811865476 0 # ud\n0.7071067811865476,0\n0 0").unwrap();
        assert!((fidelity_states(&s, &TwoQubitState::triplet_zero()) - 1.0).abs() < 1e-15);
        assert!(matches!(parse_target("1 0 1 0 0 0 0 0"), Err(Error::NotNormalized { .. })));
        assert!(parse_target("1 0 0").is_err());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("/tmp/c.dat")), PathBuf::from("/tmp/c.dat.record"));
    }
}

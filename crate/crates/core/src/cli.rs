//! Command-line front end.
//!
//! `sharp-ineq <command> [flags]`, where the command is one of `constants`,
//! `optimize`, `verify`, `sweep`, `fields` or `all`. A JSON config file
//! (`--config`) may supply any [`RunConfig`] field; flags win on conflict.
//! The resolved config is echoed into every report.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::cases::InequalityCase;
use crate::constants::{sharp_constant, SharpConstant};
use crate::error::{Error, Result};
use crate::fields::{divergence_check, DivergenceReport, RadialVectorField};
use crate::optimize::{crosscheck_closed_forms_with, OptimizationResult, RellichVariant};
use crate::quadrature::{McSpec, QuadratureSpec};
use crate::radial::RadialProfile;
use crate::verify::{
    canonical_profile, canonical_schedule, describe_profile, fixed_window_schedule, run_battery, sweep, verify_case,
    verify_case_timed, ScheduleEntry, SweepSeries, VerificationReport,
};

/// Exit code for usage and configuration errors.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Constants,
    Optimize,
    Verify,
    Sweep,
    Fields,
    All,
}

/// Inequality selector. `hardy` picks the sub- or supercritical form from
/// the sign of `n - p`; `ckn` is the interpolated family (needs `b` or `theta`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseName {
    Hardy,
    Hardy1d,
    CknPlus1,
    CknEqual,
    Ckn,
    Rellich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    Mollifier,
    NearExtremal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, serde::Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleName {
    #[default]
    Canonical,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, serde::Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantFlag {
    Squared,
    Literal,
}

/// Fully resolved run configuration. A config file holds any subset of
/// these fields.
#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub case: Option<CaseName>,
    pub n: Option<u32>,
    pub p: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub theta: Option<f64>,
    pub profile: Option<ProfileName>,
    pub radius: Option<f64>,
    pub eps: Option<f64>,
    pub r_in: Option<f64>,
    pub r_out: Option<f64>,
    pub schedule: ScheduleName,
    pub rellich_variant: RellichVariant,
    pub quadrature: QuadratureSpec,
    pub monte_carlo: Option<McSpec>,
    pub seed: u64,
    /// Relative tolerance for closed-form comparisons.
    pub tol: f64,
    /// Sample points per divergence check.
    pub points: usize,
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            case: None,
            n: None,
            p: None,
            a: None,
            b: None,
            theta: None,
            profile: None,
            radius: None,
            eps: None,
            r_in: None,
            r_out: None,
            schedule: ScheduleName::default(),
            rellich_variant: RellichVariant::default(),
            quadrature: QuadratureSpec::default(),
            monte_carlo: None,
            seed: McSpec::default().seed,
            tol: 1e-8,
            points: 200,
            timing: false,
            out: None,
            format: Format::default(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sharp-ineq",
    version,
    about = "Sharp constants of Hardy, CKN and Rellich inequalities"
)]
struct Cli {
    /// What to run
    #[arg(value_enum)]
    command: Option<Command>,

    /// JSON file with RunConfig fields; flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_enum)]
    case: Option<CaseName>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,

    /// Test function family for `verify`
    #[arg(long, value_enum)]
    profile: Option<ProfileName>,
    /// Mollifier radius
    #[arg(long)]
    radius: Option<f64>,
    /// Near-extremal decay offset
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    r_in: Option<f64>,
    #[arg(long)]
    r_out: Option<f64>,

    /// Sweep schedule
    #[arg(long, value_enum)]
    schedule: Option<ScheduleName>,
    /// Prefactor of the two-parameter Rellich objective
    #[arg(long, value_enum)]
    variant: Option<VariantFlag>,

    /// Relative tolerance for closed-form comparisons
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_subdivisions: Option<usize>,

    /// Attach a Monte Carlo crosscheck to `verify`
    #[arg(long)]
    mc: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    radius_cap: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Points per divergence check
    #[arg(long)]
    points: Option<usize>,

    /// Record wall time in verification reports
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn resolve(cli: Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| Error::Config(format!("bad config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($($field:ident),*) => {$(
            if cli.$field.is_some() {
                cfg.$field = cli.$field;
            }
        )*};
    }
    take!(command, case, n, p, a, b, theta, profile, radius, eps, r_in, r_out, out);
    if let Some(s) = cli.schedule {
        cfg.schedule = s;
    }
    if let Some(v) = cli.variant {
        cfg.rellich_variant = match v {
            VariantFlag::Squared => RellichVariant::Squared,
            VariantFlag::Literal => RellichVariant::Literal,
        };
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(t) = cli.rel_tol {
        cfg.quadrature.rel_tol = t;
    }
    if let Some(t) = cli.abs_tol {
        cfg.quadrature.abs_tol = t;
    }
    if let Some(m) = cli.max_subdivisions {
        cfg.quadrature.max_subdivisions = m;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.mc || cli.samples.is_some() || cli.radius_cap.is_some() {
        let mut mc = cfg.monte_carlo.unwrap_or_default();
        if let Some(s) = cli.samples {
            mc.samples = s;
        }
        if let Some(r) = cli.radius_cap {
            mc.radius_cap = r;
        }
        cfg.monte_carlo = Some(mc);
    }
    if let Some(mc) = cfg.monte_carlo.as_mut() {
        mc.seed = cfg.seed;
    }
    if let Some(p) = cli.points {
        cfg.points = p;
    }
    if cli.timing {
        cfg.timing = true;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cfg.command.is_none() {
        return Err(Error::Config("no command given".into()));
    }
    Ok(cfg)
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("--{flag} is required for this case")))
}

/// Builds the case selected by the config.
pub fn case_from_config(cfg: &RunConfig) -> Result<InequalityCase> {
    match need(cfg.case, "case")? {
        CaseName::Hardy => {
            let n = need(cfg.n, "n")?;
            let p = need(cfg.p, "p")?;
            if p > n as f64 {
                InequalityCase::hardy_supercritical(n, p)
            } else {
                InequalityCase::hardy_subcritical(n, p)
            }
        }
        CaseName::Hardy1d => InequalityCase::hardy_1d(need(cfg.p, "p")?),
        CaseName::CknPlus1 => InequalityCase::ckn_edge_plus1(need(cfg.n, "n")?, need(cfg.a, "a")?),
        CaseName::CknEqual => InequalityCase::ckn_edge_equal(need(cfg.n, "n")?, need(cfg.a, "a")?),
        CaseName::Ckn => {
            let n = need(cfg.n, "n")?;
            let a = need(cfg.a, "a")?;
            match (cfg.b, cfg.theta) {
                (Some(b), _) => InequalityCase::ckn_interpolated(n, a, b),
                (None, Some(theta)) => InequalityCase::ckn_interpolated_theta(n, a, theta),
                (None, None) => Err(Error::Config("--b or --theta is required for ckn".into())),
            }
        }
        CaseName::Rellich => InequalityCase::rellich(need(cfg.n, "n")?),
    }
}

fn profile_from_config(cfg: &RunConfig, case: &InequalityCase) -> Result<RadialProfile> {
    match cfg.profile {
        None => canonical_profile(case),
        Some(ProfileName::Mollifier) => RadialProfile::mollifier(cfg.radius.unwrap_or(1.0)),
        Some(ProfileName::NearExtremal) => RadialProfile::near_extremal_for(
            case,
            cfg.eps.unwrap_or(0.1),
            cfg.r_in.unwrap_or(1e-2),
            cfg.r_out.unwrap_or(1e2),
        ),
    }
}

// ---- serialization -------------------------------------------------------

/// Pretty JSON formatter writing every float with 17 significant digits.
struct SeventeenDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SeventeenDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-printed JSON with 17 significant digits per float.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn g17(v: f64) -> String {
    format!("{v:.16e}")
}

pub const CSV_HEADER: &str = "param,lhs,rhs,ratio,margin";

/// Sweep as CSV, one row per schedule entry.
pub fn sweep_csv(series: &SweepSeries) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for (i, entry) in series.schedule.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            g17(entry.parameter()),
            g17(series.lhs[i]),
            g17(series.rhs[i]),
            g17(series.ratios[i]),
            g17(series.margins[i])
        ));
    }
    out
}

fn report_csv(reports: &[VerificationReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in reports {
        let param = match r.profile.family {
            crate::radial::Family::Mollifier { radius } => radius,
            crate::radial::Family::NearExtremal { eps, .. } => eps,
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            g17(param),
            g17(r.lhs),
            g17(r.rhs),
            g17(r.ratio),
            g17(r.margin)
        ));
    }
    out
}

// ---- commands --------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct Envelope<T> {
    pub config: RunConfig,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct FieldsReport {
    pub checks: Vec<DivergenceReport>,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct OptimizeEntry {
    pub case: InequalityCase,
    pub result: Option<OptimizationResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct AllReport {
    pub constants: Vec<SharpConstant>,
    pub optimizations: Vec<OptimizeEntry>,
    pub battery: Vec<VerificationReport>,
    pub sweeps: Vec<SweepSeries>,
    pub fields: FieldsReport,
    pub violations: usize,
}

fn fields_report(cfg: &RunConfig) -> Result<FieldsReport> {
    let fields: Vec<RadialVectorField> = match (cfg.n, cfg.p, cfg.b) {
        (Some(n), Some(p), _) => vec![RadialVectorField::hardy(n, p)?],
        (Some(n), None, Some(b)) => vec![RadialVectorField::ckn(n, b)?],
        (None, None, None) => default_field_grid(),
        _ => return Err(Error::Config("fields needs --n with --p (HardyV) or --b (CknW)".into())),
    };
    let checks = fields
        .iter()
        .enumerate()
        .map(|(i, f)| divergence_check(f, cfg.points, cfg.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let max_error = checks.iter().map(|c| c.max_error).fold(0.0, f64::max);
    Ok(FieldsReport { checks, max_error })
}

/// `(n, exponent)` grid used when no field is specified.
pub fn default_field_grid() -> Vec<RadialVectorField> {
    let mut out = Vec::new();
    for n in 2..=6u32 {
        for s in [0.5, 1.5, 2.5, 4.0] {
            if s != n as f64 {
                out.push(RadialVectorField::hardy(n, s).expect("p != n"));
            }
            if 2.0 * s != n as f64 {
                out.push(RadialVectorField::ckn(n, s).expect("2b != n"));
            }
        }
    }
    out
}

/// Parameter points of the constants table.
pub fn constants_table() -> Result<Vec<InequalityCase>> {
    Ok(vec![
        InequalityCase::hardy_subcritical(3, 2.0)?,
        InequalityCase::hardy_supercritical(2, 3.0)?,
        InequalityCase::hardy_1d(2.0)?,
        InequalityCase::ckn_edge_plus1(5, 0.0)?,
        InequalityCase::ckn_edge_equal(3, 0.0)?,
        InequalityCase::ckn_interpolated(3, 0.0, 0.5)?,
        InequalityCase::rellich(5)?,
        InequalityCase::rellich(8)?,
    ])
}

fn optimize_table() -> Result<Vec<InequalityCase>> {
    Ok(vec![
        InequalityCase::hardy_subcritical(3, 2.0)?,
        InequalityCase::hardy_supercritical(2, 3.0)?,
        InequalityCase::hardy_1d(2.0)?,
        InequalityCase::ckn_edge_plus1(3, 0.0)?,
        InequalityCase::ckn_edge_equal(3, -0.5)?,
        InequalityCase::rellich(5)?,
        InequalityCase::rellich(13)?,
    ])
}

fn run_all(cfg: &RunConfig) -> Result<AllReport> {
    let constants = constants_table()?
        .iter()
        .map(sharp_constant)
        .collect::<Result<Vec<_>>>()?;
    let optimizations = optimize_table()?
        .into_iter()
        .map(
            |case| match crosscheck_closed_forms_with(&case, cfg.rellich_variant, cfg.tol) {
                Ok(r) => OptimizeEntry {
                    case,
                    result: Some(r),
                    error: None,
                },
                Err(e) => OptimizeEntry {
                    case,
                    result: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();
    let battery = run_battery(&cfg.quadrature)?;
    let sweeps = [
        InequalityCase::hardy_subcritical(3, 2.0)?,
        InequalityCase::ckn_edge_plus1(5, 0.5)?,
    ]
    .iter()
    .map(|case| sweep(case, &schedule_for(cfg), &cfg.quadrature))
    .collect::<Result<Vec<_>>>()?;
    let fields = fields_report(&RunConfig {
        n: None,
        p: None,
        b: None,
        ..cfg.clone()
    })?;
    let violations = battery.iter().filter(|r| r.violation).count()
        + sweeps
            .iter()
            .flat_map(|s| &s.ratios)
            .filter(|r| **r > 1.0 + crate::verify::VIOLATION_SLACK)
            .count();
    Ok(AllReport {
        constants,
        optimizations,
        battery,
        sweeps,
        fields,
        violations,
    })
}

fn schedule_for(cfg: &RunConfig) -> Vec<ScheduleEntry> {
    match cfg.schedule {
        ScheduleName::Canonical => canonical_schedule(),
        ScheduleName::Fixed => fixed_window_schedule(),
    }
}

/// Output of one command, rendered and paired with its exit code.
struct Rendered {
    body: String,
    exit: i32,
}

fn csv_unsupported(cmd: Command) -> Error {
    Error::Config(format!(
        "csv output is available for verify, sweep and fields, not {cmd:?}"
    ))
}

fn execute(cfg: &RunConfig) -> Result<Rendered> {
    let cmd = cfg.command.expect("resolved");
    let (body, exit) = match cmd {
        Command::Constants => {
            let c = sharp_constant(&case_from_config(cfg)?)?;
            let body = match cfg.format {
                Format::Json => envelope_json(cfg, &c)?,
                Format::Text => format!(
                    "{}\n  value = {}\n  from  {}\n",
                    case_label(&c.case),
                    g17(c.value),
                    c.provenance
                ),
                Format::Csv => return Err(csv_unsupported(cmd)),
            };
            (body, 0)
        }
        Command::Optimize => {
            let case = case_from_config(cfg)?;
            let r = crosscheck_closed_forms_with(&case, cfg.rellich_variant, cfg.tol)?;
            let body = match cfg.format {
                Format::Json => envelope_json(cfg, &r)?,
                Format::Text => optimize_text(&case, &r),
                Format::Csv => return Err(csv_unsupported(cmd)),
            };
            (body, 0)
        }
        Command::Verify => {
            let case = case_from_config(cfg)?;
            let profile = profile_from_config(cfg, &case)?;
            let mc = cfg.monte_carlo.as_ref();
            let r = if cfg.timing {
                verify_case_timed(&case, &profile, &cfg.quadrature, mc)?
            } else {
                verify_case(&case, &profile, &cfg.quadrature, mc)?
            };
            let exit = if r.violation { 3 } else { 0 };
            let body = match cfg.format {
                Format::Json => envelope_json(cfg, &r)?,
                Format::Csv => report_csv(std::slice::from_ref(&r)),
                Format::Text => verify_text(&r),
            };
            (body, exit)
        }
        Command::Sweep => {
            let case = case_from_config(cfg)?;
            let s = sweep(&case, &schedule_for(cfg), &cfg.quadrature)?;
            let exit = if s.ratios.iter().any(|r| *r > 1.0 + crate::verify::VIOLATION_SLACK) {
                3
            } else {
                0
            };
            let body = match cfg.format {
                Format::Json => envelope_json(cfg, &s)?,
                Format::Csv => sweep_csv(&s),
                Format::Text => {
                    let mut t = format!("{}\n", case_label(&s.case));
                    for (e, r) in s.schedule.iter().zip(&s.ratios) {
                        t.push_str(&format!("  {:<60} ratio {}\n", format!("{e:?}"), g17(*r)));
                    }
                    t.push_str(&format!("  sup ratio {}\n", g17(s.sup_ratio)));
                    t
                }
            };
            (body, exit)
        }
        Command::Fields => {
            let f = fields_report(cfg)?;
            let body = match cfg.format {
                Format::Json => envelope_json(cfg, &f)?,
                Format::Csv => {
                    let mut t = String::from("kind,n,exponent,points,max_error\n");
                    for c in &f.checks {
                        t.push_str(&format!(
                            "{:?},{},{},{},{}\n",
                            c.field.kind,
                            c.field.n,
                            g17(c.field.exponent),
                            c.points,
                            g17(c.max_error)
                        ));
                    }
                    t
                }
                Format::Text => {
                    let mut t = String::new();
                    for c in &f.checks {
                        t.push_str(&format!(
                            "{:?} n={} exponent={}: max relative error {:.3e} over {} points\n",
                            c.field.kind, c.field.n, c.field.exponent, c.max_error, c.points
                        ));
                    }
                    t
                }
            };
            (body, 0)
        }
        Command::All => {
            let all = run_all(cfg)?;
            let exit = if all.violations > 0 { 3 } else { 0 };
            let body = match cfg.format {
                Format::Json => envelope_json(cfg, &all)?,
                Format::Text => all_text(&all),
                Format::Csv => return Err(csv_unsupported(cmd)),
            };
            (body, exit)
        }
    };
    Ok(Rendered { body, exit })
}

fn envelope_json<T: Serialize + Clone>(cfg: &RunConfig, result: &T) -> Result<String> {
    to_json(&Envelope {
        config: cfg.clone(),
        result: result.clone(),
    })
}

fn case_label(case: &InequalityCase) -> String {
    let mut s = format!("{:?} n={} p={}", case.variant(), case.n(), case.p());
    if let Some(a) = case.a() {
        s.push_str(&format!(" a={a}"));
    }
    if let Some(b) = case.b() {
        s.push_str(&format!(" b={b}"));
    }
    if let Some(t) = case.theta() {
        s.push_str(&format!(" theta={t}"));
    }
    s
}

fn optimize_text(case: &InequalityCase, r: &OptimizationResult) -> String {
    let mut t = format!(
        "{}\n  argmin    {:?}\n  minimum   {}\n",
        case_label(case),
        r.argmin,
        g17(r.min_value)
    );
    if let Some(x) = &r.closed_form_argmin {
        t.push_str(&format!("  printed argmin  {x:?}\n"));
    }
    if let Some(v) = r.closed_form_value {
        t.push_str(&format!("  printed minimum {}\n", g17(v)));
    }
    match &r.discrepancy {
        Some(d) => t.push_str(&format!("  DISCREPANCY: {d}\n")),
        None => t.push_str("  agrees with the printed closed form\n"),
    }
    t
}

fn verify_text(r: &VerificationReport) -> String {
    let mut t = format!(
        "{}\n  profile  {}\n  lhs      {}\n  rhs      {}\n  constant {}\n  ratio    {}\n  margin   {}\n",
        case_label(&r.case),
        describe_profile(&r.profile),
        g17(r.lhs),
        g17(r.rhs),
        g17(r.constant.value),
        g17(r.ratio),
        g17(r.margin)
    );
    if let Some(mc) = &r.monte_carlo {
        t.push_str(&format!(
            "  monte carlo z-scores: lhs {:.2}, rhs {:.2} (seed {})\n",
            mc.lhs.z_score, mc.rhs.z_score, mc.seed
        ));
    }
    if r.violation {
        t.push_str("  VIOLATION: ratio exceeds 1\n");
    }
    t
}

fn all_text(all: &AllReport) -> String {
    let mut t = String::from("constants\n");
    for c in &all.constants {
        t.push_str(&format!("  {:<50} {}\n", case_label(&c.case), g17(c.value)));
    }
    t.push_str("optimizer crosschecks\n");
    for o in &all.optimizations {
        let status = match (&o.result, &o.error) {
            (Some(r), _) => r.discrepancy.clone().unwrap_or_else(|| "agrees".into()),
            (None, Some(e)) => e.clone(),
            (None, None) => String::new(),
        };
        t.push_str(&format!("  {:<50} {status}\n", case_label(&o.case)));
    }
    t.push_str("battery\n");
    for r in &all.battery {
        let flag = if r.violation { "VIOLATION" } else { "ok" };
        t.push_str(&format!(
            "  {:<50} {:<60} ratio {:.6} {flag}\n",
            case_label(&r.case),
            describe_profile(&r.profile),
            r.ratio
        ));
    }
    t.push_str("sweeps\n");
    for s in &all.sweeps {
        t.push_str(&format!("  {:<50} sup ratio {:.6}\n", case_label(&s.case), s.sup_ratio));
    }
    t.push_str(&format!("fields: max divergence error {:.3e}\n", all.fields.max_error));
    t.push_str(&format!("violations: {}\n", all.violations));
    t
}

/// Parses `args` (program name first), runs the command, writes the report
/// to `--out` or `stdout`, and returns the process exit code. Diagnostics
/// go to `stderr`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let cfg = match resolve(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(
                stderr,
                "error: {e}\n\nusage: sharp-ineq <COMMAND> [OPTIONS]; see --help"
            );
            return e.exit_code();
        }
    };
    let rendered = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cfg.out {
        Some(path) => fs::write(path, &rendered.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(rendered.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    if rendered.exit == 3 {
        let _ = writeln!(stderr, "inequality violation reported (ratio > 1)");
    }
    rendered.exit
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

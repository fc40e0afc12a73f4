use std::fmt::Write as _;

use num::ToPrimitive;
use serde::Serialize;

use swirl_core::ensembles::{build_circulant_toeplitz, build_exchange};
use swirl_core::link::{gcd_audit, PatternClass};
use swirl_core::moments::{enumerate_matchings, equation_matrix, finite_n_expected_trace};
use swirl_core::spectra::{
    histogram, run_monte_carlo, ReferenceDistribution, HISTOGRAM_BINS, HISTOGRAM_RANGE,
};
use swirl_core::swirl::{
    verify_iterated_trace_identity, verify_trace_identity, verify_transpose_identity,
    TraceIdentityReport,
};
use swirl_core::{DenseMatrix, EntryDistribution, PatternFamily, PatternSpec};

use crate::args::{
    Cli, Command, CosetCountArgs, EnsembleArg, MomentsExactArgs, OracleArgs, PartitionAuditArgs,
    SimulateArgs, TraceCheckArgs,
};
use crate::output::{
    config_hash, csv_header_comment, format_f64, to_json, write_text, JsonlMeta, VERSION,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Core(swirl_core::Error),
    /// A verification that mathematically must hold came out false, i.e.
    /// the numerics broke down.
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "i/o failure: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<swirl_core::Error> for CliError {
    fn from(e: swirl_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Core(e) => {
                if e.is_numerical() {
                    2
                } else {
                    1
                }
            }
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::TraceCheck(args) => run_trace_check(args),
        Command::MomentsExact(args) => run_moments_exact(args),
        Command::PartitionAudit(args) => run_partition_audit(args),
        Command::CosetCount(args) => run_coset_count(args),
        Command::Oracle(args) => run_oracle(args),
    }
}

fn pattern_spec(
    ensemble: EnsembleArg,
    n: usize,
    s: Option<i64>,
    t: Option<i64>,
    symmetric_link: bool,
) -> Result<PatternSpec, CliError> {
    if ensemble == EnsembleArg::Link {
        let (Some(s), Some(t)) = (s, t) else {
            return Err(CliError::Usage(
                "the link ensemble requires --s and --t".into(),
            ));
        };
        return Ok(PatternSpec::link(n, s, t, symmetric_link)?);
    }
    Ok(PatternSpec::new(ensemble.family(), n)?)
}

#[derive(Serialize)]
struct SimulateConfig {
    ensemble: &'static str,
    n: usize,
    s: Option<i64>,
    t: Option<i64>,
    symmetric_link: bool,
    trials: u64,
    seed: u64,
    dist: &'static str,
    histogram_bins: usize,
    histogram_range: (f64, f64),
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    subcommand: &'static str,
    config_hash: &'a str,
    version: &'static str,
    config: &'a SimulateConfig,
    out: String,
    matrix_dim: usize,
    c: usize,
    pooled_count: usize,
    flagged_trials: u64,
    histogram_outside_range: usize,
    /// Sample moments of orders 1..=8.
    moments: Vec<f64>,
    ks_symmetrized_rayleigh: f64,
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let spec = pattern_spec(args.ensemble, args.n, args.s, args.t, args.symmetric_link)?;
    let dist = EntryDistribution::new(args.dist.kind(), args.seed);

    // Fail fast with a clear message on ensembles whose draws are not
    // symmetric; the eigensolver only handles symmetric matrices.
    let probe = spec.build(&dist, 0)?;
    if !probe.is_symmetric_within(probe.default_symmetry_tol()) {
        return Err(CliError::Usage(format!(
            "ensemble {} draws are not symmetric; spectral simulation needs a symmetric ensemble",
            args.ensemble.name()
        )));
    }
    drop(probe);

    let config = SimulateConfig {
        ensemble: args.ensemble.name(),
        n: args.n,
        s: args.s,
        t: args.t,
        symmetric_link: args.symmetric_link,
        trials: args.trials,
        seed: args.seed,
        dist: args.dist.name(),
        histogram_bins: HISTOGRAM_BINS,
        histogram_range: HISTOGRAM_RANGE,
    };
    let hash = config_hash(&config);

    let sample = run_monte_carlo(&spec, &dist, args.trials)?;
    let (bins, outside) = histogram(
        &sample.scaled_eigs,
        HISTOGRAM_BINS,
        HISTOGRAM_RANGE.0,
        HISTOGRAM_RANGE.1,
    );
    let moments: Vec<f64> = (1..=8)
        .map(|k| sample.moment(k))
        .collect::<swirl_core::Result<_>>()?;
    let ks = sample.ks_statistic(&ReferenceDistribution::SymmetrizedRayleigh)?;

    std::fs::create_dir_all(&args.out)?;
    let comment = csv_header_comment("simulate", &hash);

    let mut eigs = String::new();
    let _ = writeln!(eigs, "{comment}");
    let _ = writeln!(eigs, "value");
    for v in &sample.scaled_eigs {
        let _ = writeln!(eigs, "{}", format_f64(*v));
    }
    write_text(Some(&args.out.join("eigs.csv")), &eigs)?;

    let mut hist = String::new();
    let _ = writeln!(hist, "{comment}");
    let _ = writeln!(hist, "bin_left,bin_right,density");
    for b in &bins {
        let _ = writeln!(
            hist,
            "{},{},{}",
            format_f64(b.left),
            format_f64(b.right),
            format_f64(b.density)
        );
    }
    write_text(Some(&args.out.join("hist.csv")), &hist)?;

    let summary = SimulateSummary {
        subcommand: "simulate",
        config_hash: &hash,
        version: VERSION,
        config: &config,
        out: args.out.display().to_string(),
        matrix_dim: sample.n,
        c: sample.c,
        pooled_count: sample.scaled_eigs.len(),
        flagged_trials: sample.flagged_trials,
        histogram_outside_range: outside,
        moments,
        ks_symmetrized_rayleigh: ks,
    };
    let mut text = to_json(&summary);
    text.push('\n');
    write_text(Some(&args.out.join("summary.json")), &text)?;
    Ok(())
}

#[derive(Serialize)]
struct TraceCheckConfig {
    ensemble: &'static str,
    n: usize,
    k: usize,
    ell: usize,
    seed: u64,
    dist: &'static str,
    s: Option<i64>,
    t: Option<i64>,
    symmetric_link: bool,
    tol: f64,
}

/// The generator matrix the identities are checked on. For the swirl
/// families this is the circulant Toeplitz ring that generates the 2N x 2N
/// ensemble matrix; for everything else it is the ensemble draw itself.
fn generator_matrix(
    ensemble: EnsembleArg,
    n: usize,
    s: Option<i64>,
    t: Option<i64>,
    symmetric_link: bool,
    dist: &EntryDistribution,
) -> Result<DenseMatrix, CliError> {
    match ensemble {
        EnsembleArg::ConcentricEven | EnsembleArg::HankelSwirl | EnsembleArg::CirculantToeplitz => {
            Ok(build_circulant_toeplitz(&dist.sample_sequence(n))?)
        }
        EnsembleArg::Exchange => Ok(build_exchange(n)?),
        EnsembleArg::CirculantHankel => {
            let spec = PatternSpec::new(PatternFamily::CirculantHankel, n)?;
            Ok(spec.build(dist, 0)?)
        }
        EnsembleArg::Link => {
            let spec = pattern_spec(EnsembleArg::Link, n, s, t, symmetric_link)?;
            Ok(spec.build(dist, 0)?)
        }
    }
}

fn run_trace_check(args: TraceCheckArgs) -> Result<(), CliError> {
    if args.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    if args.ell == 0 || args.ell > 8 {
        return Err(CliError::Usage("--ell must be in 1..=8".into()));
    }
    let config = TraceCheckConfig {
        ensemble: args.ensemble.name(),
        n: args.n,
        k: args.k,
        ell: args.ell,
        seed: args.seed,
        dist: args.dist.name(),
        s: args.s,
        t: args.t,
        symmetric_link: args.symmetric_link,
        tol: args.tol,
    };
    let hash = config_hash(&config);
    let dist = EntryDistribution::new(args.dist.kind(), args.seed);
    let a = generator_matrix(
        args.ensemble,
        args.n,
        args.s,
        args.t,
        args.symmetric_link,
        &dist,
    )?;
    let x = build_exchange(args.n)?;

    let mut reports: Vec<TraceIdentityReport> = Vec::new();
    for k in 1..=args.k {
        reports.push(verify_trace_identity(&a, &x, k)?);
        reports.push(verify_iterated_trace_identity(&a, &x, k, args.ell)?);
        reports.push(verify_transpose_identity(&a, &x, k)?);
    }

    let mut text = to_json(&JsonlMeta {
        subcommand: "trace-check",
        config_hash: &hash,
        version: VERSION,
    });
    text.push('\n');
    for r in &reports {
        text.push_str(&to_json(r));
        text.push('\n');
    }
    write_text(args.out.as_deref(), &text)?;

    let failures: Vec<&TraceIdentityReport> =
        reports.iter().filter(|r| !r.passes_at(args.tol)).collect();
    if !failures.is_empty() {
        let worst = failures
            .iter()
            .map(|r| r.rel_err)
            .fold(0.0f64, f64::max);
        return Err(CliError::Numerical(format!(
            "{} of {} trace identity checks exceeded tol {:e} (worst rel_err {:e})",
            failures.len(),
            reports.len(),
            args.tol,
            worst
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct MomentsExactConfig {
    k: usize,
}

#[derive(Serialize)]
struct MomentsExactReport<'a> {
    subcommand: &'static str,
    config_hash: &'a str,
    version: &'static str,
    k: usize,
    matchings_total: u64,
    contributing: u64,
    limit_moment: u64,
}

fn run_moments_exact(args: MomentsExactArgs) -> Result<(), CliError> {
    let config = MomentsExactConfig { k: args.k };
    let hash = config_hash(&config);
    let matchings = enumerate_matchings(args.k)?;
    let target = args.k + 1;
    let mut contributing = 0u64;
    for m in &matchings {
        if equation_matrix(m).nullity()? == target {
            contributing += 1;
        }
    }
    let report = MomentsExactReport {
        subcommand: "moments-exact",
        config_hash: &hash,
        version: VERSION,
        k: args.k,
        matchings_total: matchings.len() as u64,
        contributing,
        limit_moment: contributing,
    };
    let mut text = to_json(&report);
    text.push('\n');
    write_text(args.out.as_deref(), &text)?;
    Ok(())
}

#[derive(Serialize)]
struct PartitionAuditConfig {
    k: usize,
}

fn run_partition_audit(args: PartitionAuditArgs) -> Result<(), CliError> {
    let config = PartitionAuditConfig { k: args.k };
    let hash = config_hash(&config);
    let matchings = enumerate_matchings(args.k)?;

    let mut buf = Vec::new();
    {
        use std::io::Write;
        writeln!(buf, "{}", csv_header_comment("partition-audit", &hash))?;
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["pairs", "odd_even", "nullity"])
            .map_err(csv_io)?;
        for m in &matchings {
            let nullity = equation_matrix(m).nullity()?;
            w.write_record([
                m.to_string(),
                m.is_odd_even().to_string(),
                nullity.to_string(),
            ])
            .map_err(csv_io)?;
        }
        w.flush()?;
    }
    write_text(
        args.out.as_deref(),
        &String::from_utf8(buf).expect("CSV is UTF-8"),
    )?;
    Ok(())
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

#[derive(Serialize)]
struct CosetCountConfig {
    n_min: usize,
    n_max: usize,
    s: Option<i64>,
    t: Option<i64>,
}

fn run_coset_count(args: CosetCountArgs) -> Result<(), CliError> {
    let (n_min, n_max) = match args.n {
        Some(n) => (n, n),
        None => (args.n_min, args.n_max),
    };
    if n_min < 2 || n_max < n_min {
        return Err(CliError::Usage(
            "need 2 <= n-min <= n-max (or --n >= 2)".into(),
        ));
    }
    let config = CosetCountConfig {
        n_min,
        n_max,
        s: args.s,
        t: args.t,
    };
    let hash = config_hash(&config);

    let mut buf = Vec::new();
    {
        use std::io::Write;
        writeln!(buf, "{}", csv_header_comment("coset-count", &hash))?;
        writeln!(
            buf,
            "n,s,t,class_count_plain,class_count_symmetric,subgroup_order,coset_index,gcd_value,classification,ratio"
        )?;
        for n in n_min..=n_max {
            let s_range: Vec<i64> = match args.s {
                Some(s) => vec![s],
                None => (0..n as i64).collect(),
            };
            let t_range: Vec<i64> = match args.t {
                Some(t) => vec![t],
                None => (0..n as i64).collect(),
            };
            for &s in &s_range {
                for &t in &t_range {
                    let r = gcd_audit(n, s, t);
                    let class = match r.classification {
                        PatternClass::CirculantHankel => "circulant-hankel",
                        PatternClass::CirculantToeplitz => "circulant-toeplitz",
                        PatternClass::Other => "other",
                    };
                    writeln!(
                        buf,
                        "{},{},{},{},{},{},{},{},{},{}",
                        r.n,
                        r.s,
                        r.t,
                        r.class_count_plain,
                        r.class_count_symmetric,
                        r.subgroup_order,
                        r.coset_index,
                        r.gcd_value,
                        class,
                        format_f64(r.ratio)
                    )?;
                }
            }
        }
    }
    write_text(
        args.out.as_deref(),
        &String::from_utf8(buf).expect("CSV is UTF-8"),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct OracleConfig {
    n: usize,
    power: usize,
    dist: &'static str,
}

#[derive(Serialize)]
struct OracleReport<'a> {
    subcommand: &'static str,
    config_hash: &'a str,
    version: &'static str,
    n: usize,
    power: usize,
    dist: &'static str,
    /// Exact expected trace as a rational number.
    expected_trace_numer: String,
    expected_trace_denom: String,
    expected_trace: f64,
    /// expected trace / N^{power/2 + 1}, the finite-N spectral moment.
    normalized_moment: f64,
}

fn run_oracle(args: OracleArgs) -> Result<(), CliError> {
    let config = OracleConfig {
        n: args.n,
        power: args.power,
        dist: args.dist.name(),
    };
    let hash = config_hash(&config);
    let moments = args.dist.kind().moments_through(args.power);
    let exact = finite_n_expected_trace(args.n, args.power, &moments)?;
    let value = exact.to_f64().unwrap_or(f64::NAN);
    let normalized = value / (args.n as f64).powf(args.power as f64 / 2.0 + 1.0);
    let report = OracleReport {
        subcommand: "oracle",
        config_hash: &hash,
        version: VERSION,
        n: args.n,
        power: args.power,
        dist: args.dist.name(),
        expected_trace_numer: exact.numer().to_string(),
        expected_trace_denom: exact.denom().to_string(),
        expected_trace: value,
        normalized_moment: normalized,
    };
    let mut text = to_json(&report);
    text.push('\n');
    write_text(args.out.as_deref(), &text)?;
    Ok(())
}

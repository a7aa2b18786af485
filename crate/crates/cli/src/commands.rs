use std::path::PathBuf;

use circmat::car::{build_precision, car_covariance_curve, CarOrder, CarSpec};
use circmat::fields::{fit_kappa, run_ergodicity_experiment, sample_fields, Boundary, FitOptions, GridField};
use circmat::linkage::{besag_approx_a, compare_curves, CurveComparison, DISCREPANCY_WARNING};
use circmat::matern::{matern_curve, matern_curve_series, MaternParams};
use circmat::spectral::DEFAULT_SERIES_TOL;
use circmat::LagCovariance;
use clap::{Args, Subcommand, ValueEnum};

use crate::fieldio::read_fields;
use crate::output::{Cell, Report};
use crate::CliError;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Circular Matérn covariance at every lattice lag.
    Cov(CovArgs),
    /// CAR precision row and covariance curve.
    Car(CarArgs),
    /// Matched CAR model for a Matérn field, with a lag-by-lag comparison.
    Match(MatchArgs),
    /// Matérn (alpha = 2) and matched CAR(2) correlations on two lattices.
    Figure1(Figure1Args),
    /// Simulate fields on the lattice.
    Sample(SampleArgs),
    /// Maximum-likelihood kappa for fields read from a file.
    Fit(FitArgs),
    /// Variance of the circle average under grid refinement.
    Ergodicity(ErgodicityArgs),
}

#[derive(Debug, Args)]
pub struct CovArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long)]
    pub n: usize,
    /// Require the closed form (alpha 1, 2 or 3).
    #[arg(long, overrides_with = "series")]
    pub closed: bool,
    /// Force the spectral series.
    #[arg(long, overrides_with = "closed")]
    pub series: bool,
    /// Series accuracy relative to the zero-frequency coefficient.
    #[arg(long, default_value_t = DEFAULT_SERIES_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub variance_scale: f64,
}

#[derive(Debug, Args)]
pub struct CarArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub alpha: u32,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long)]
    pub n: usize,
    /// Also report the second-order Taylor approximation of `a`.
    #[arg(long)]
    pub besag: bool,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long, default_value_t = 10.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 10)]
    pub n_left: usize,
    #[arg(long, default_value_t = 50)]
    pub n_right: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Matern,
    Car,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    /// Matérn range parameter.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Matérn smoothness.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub variance_scale: f64,
    /// CAR order.
    #[arg(long)]
    pub order: Option<u32>,
    /// CAR neighbour weight.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 1)]
    pub replicates: u64,
    #[arg(long)]
    pub seed: u64,
    /// Report empirical against theoretical lag covariances instead of the fields.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Field file in the format written by `sample`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    pub alpha: u32,
    #[arg(long, default_value_t = 1e-3)]
    pub lower: f64,
    #[arg(long, default_value_t = 1e3)]
    pub upper: f64,
}

#[derive(Debug, Args)]
pub struct ErgodicityArgs {
    #[arg(long)]
    pub kappa: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 20_000)]
    pub replicates: u64,
    #[arg(long)]
    pub seed: u64,
    /// Variance of an additive constant shared by the whole field.
    #[arg(long, default_value_t = 0.0)]
    pub extra_variance: f64,
}

pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Cov(args) => cov(args),
        Command::Car(args) => car(args),
        Command::Match(args) => match_models(args),
        Command::Figure1(args) => figure1(args),
        Command::Sample(args) => sample(args),
        Command::Fit(args) => fit(args),
        Command::Ergodicity(args) => ergodicity(args),
    }
}

fn lag_theta(lag: usize, n: usize) -> [Cell; 2] {
    [lag.into(), (lag as f64 / n as f64).into()]
}

fn cov(args: &CovArgs) -> Result<Report, CliError> {
    let params = MaternParams::with_variance_scale(args.kappa, args.alpha, args.variance_scale)?;
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let closed = params.closed_form_order().is_some();
    if args.closed && !closed {
        return Err(CliError::Usage(format!("no closed form for alpha = {}; use 1, 2 or 3", args.alpha)));
    }
    let (curve, method) = if args.series || !closed {
        (matern_curve_series(&params, args.n, args.tol)?, "series")
    } else {
        (matern_curve(&params, args.n)?, "closed")
    };
    let mut report = Report::new("cov", &["lag", "theta", "value"]);
    report
        .meta("alpha", args.alpha)
        .meta("kappa", args.kappa)
        .meta("n", args.n)
        .meta("variance_scale", args.variance_scale)
        .meta("method", method);
    for (lag, v) in curve.values().iter().enumerate() {
        let [l, t] = lag_theta(lag, args.n);
        report.row(vec![l, t, (*v).into()]);
    }
    Ok(report)
}

fn car(args: &CarArgs) -> Result<Report, CliError> {
    let order = CarOrder::try_from(args.order)?;
    let spec = CarSpec::new(args.n, order, args.a, args.sigma2)?;
    let precision = build_precision(&spec);
    let curve = car_covariance_curve(&spec)?;
    curve.check_psd()?;
    let mut report = Report::new("car", &["lag", "theta", "precision", "covariance"]);
    report
        .meta("n", args.n)
        .meta("order", args.order)
        .meta("a", args.a)
        .meta("sigma2", args.sigma2)
        .meta("beta", spec.beta());
    if order == CarOrder::Second {
        report.meta("a1", spec.a1()).meta("a2", spec.a2());
    }
    report.meta("psd", true);
    for lag in 0..args.n {
        let [l, t] = lag_theta(lag, args.n);
        report.row(vec![l, t, precision.first_row()[lag].into(), curve.values()[lag].into()]);
    }
    Ok(report)
}

fn warn_if_poor(c: &CurveComparison) {
    if c.exceeds_warning() {
        eprintln!(
            "warning: discrepancy factor {} at n = {} exceeds {DISCREPANCY_WARNING}; the CAR(2) match is poor on this lattice",
            crate::output::format_number(c.discrepancy_factor),
            c.n
        );
    }
}

fn match_models(args: &MatchArgs) -> Result<Report, CliError> {
    let c = compare_curves(args.kappa, args.alpha, args.n)?;
    warn_if_poor(&c);
    let mut report =
        Report::new("match", &["lag", "theta", "matern_cov", "car_cov", "matern_corr", "car_corr", "abs_diff"]);
    report
        .meta("alpha", args.alpha)
        .meta("kappa", args.kappa)
        .meta("n", args.n)
        .meta("order", c.car.order().as_u32())
        .meta("a", c.car.a())
        .meta("sigma2", c.car.sigma2())
        .meta("beta", c.car.beta());
    if args.besag {
        let besag = besag_approx_a(args.kappa, args.n);
        report.meta("besag_a", besag).meta("besag_minus_exact", besag - c.car.a());
    }
    report
        .meta("discrepancy_factor", c.discrepancy_factor)
        .meta("max_corr_diff", c.max_corr_diff)
        .meta("warning", c.exceeds_warning());
    for r in &c.rows {
        report.row(vec![
            r.lag.into(),
            r.theta.into(),
            r.matern_cov.into(),
            r.car_cov.into(),
            r.matern_corr.into(),
            r.car_corr.into(),
            r.abs_diff.into(),
        ]);
    }
    Ok(report)
}

fn figure1(args: &Figure1Args) -> Result<Report, CliError> {
    let left = compare_curves(args.kappa, 2, args.n_left)?;
    let right = compare_curves(args.kappa, 2, args.n_right)?;
    let mut report = Report::new("figure1", &["panel", "n", "lag", "theta", "matern_corr", "car_corr", "abs_diff"]);
    report
        .meta("alpha", 2u32)
        .meta("kappa", args.kappa)
        .meta("n_left", args.n_left)
        .meta("n_right", args.n_right)
        .meta("discrepancy_factor_left", left.discrepancy_factor)
        .meta("discrepancy_factor_right", right.discrepancy_factor)
        .meta("max_corr_diff_left", left.max_corr_diff)
        .meta("max_corr_diff_right", right.max_corr_diff);
    for (panel, c) in [("left", &left), ("right", &right)] {
        for r in &c.rows {
            report.row(vec![
                panel.into(),
                c.n.into(),
                r.lag.into(),
                r.theta.into(),
                r.matern_corr.into(),
                r.car_corr.into(),
                r.abs_diff.into(),
            ]);
        }
    }
    Ok(report)
}

fn required<T: Copy>(value: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
}

fn sample_curve(args: &SampleArgs, report: &mut Report) -> Result<LagCovariance, CliError> {
    match args.model {
        Model::Matern => {
            let kappa = required(args.kappa, "kappa", "matern")?;
            let alpha = required(args.alpha, "alpha", "matern")?;
            let params = MaternParams::with_variance_scale(kappa, alpha, args.variance_scale)?;
            report
                .meta("model", "matern")
                .meta("kappa", kappa)
                .meta("alpha", alpha)
                .meta("variance_scale", args.variance_scale);
            Ok(matern_curve(&params, args.n)?)
        }
        Model::Car => {
            let order = required(args.order, "order", "car")?;
            let a = required(args.a, "a", "car")?;
            let spec = CarSpec::new(args.n, CarOrder::try_from(order)?, a, args.sigma2)?;
            report.meta("model", "car").meta("order", order).meta("a", a).meta("sigma2", args.sigma2);
            Ok(car_covariance_curve(&spec)?)
        }
    }
}

/// Per-replicate lag covariance averaged around the circle.
fn circular_lag_product(field: &GridField, lag: usize) -> f64 {
    let v = field.values();
    let n = v.len();
    (0..n).map(|i| v[i] * v[(i + lag) % n]).sum::<f64>() / n as f64
}

fn sample(args: &SampleArgs) -> Result<Report, CliError> {
    if args.replicates == 0 {
        return Err(CliError::Usage("--replicates must be at least 1".into()));
    }
    if args.summary && args.replicates < 2 {
        return Err(CliError::Usage("--summary needs at least 2 replicates".into()));
    }
    let mut report = Report::new("sample", &[]);
    let curve = sample_curve(args, &mut report)?;
    report.meta("n", args.n).meta("replicates", args.replicates).meta("seed", args.seed);
    let fields = sample_fields(&curve, args.seed, args.replicates)?;
    if args.summary {
        report.columns = vec!["lag", "theta", "theory", "empirical", "standard_error", "z_score"];
        let r = fields.len() as f64;
        for lag in 0..=args.n / 2 {
            let stats: Vec<f64> = fields.iter().map(|f| circular_lag_product(f, lag)).collect();
            let mean = stats.iter().sum::<f64>() / r;
            let var = stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (r - 1.0);
            let se = (var / r).sqrt();
            let theory = curve.values()[lag];
            let [l, t] = lag_theta(lag, args.n);
            report.row(vec![l, t, theory.into(), mean.into(), se.into(), ((mean - theory) / se).into()]);
        }
    } else {
        report.columns = vec!["replicate", "index", "value"];
        for f in &fields {
            for (i, v) in f.values().iter().enumerate() {
                report.row(vec![f.provenance().replicate.into(), i.into(), (*v).into()]);
            }
        }
    }
    Ok(report)
}

fn fit(args: &FitArgs) -> Result<Report, CliError> {
    let fields = read_fields(&args.input).map_err(CliError::Usage)?;
    let options = FitOptions { lower: args.lower, upper: args.upper, ..FitOptions::default() };
    let result = fit_kappa(&fields, args.alpha, &options)?;
    let boundary = match result.boundary {
        None => "none",
        Some(Boundary::Lower) => "lower",
        Some(Boundary::Upper) => "upper",
    };
    if result.boundary.is_some() {
        eprintln!("warning: likelihood maximum on the {boundary} end of the kappa bracket");
    }
    let mut report = Report::new("fit", &["kappa", "log_likelihood", "boundary"]);
    report
        .meta("alpha", args.alpha)
        .meta("fields", fields.len())
        .meta("n", fields[0].n())
        .meta("lower", args.lower)
        .meta("upper", args.upper)
        .meta("evaluations", result.evaluations);
    report.row(vec![result.kappa.into(), result.log_likelihood.into(), boundary.into()]);
    Ok(report)
}

fn ergodicity(args: &ErgodicityArgs) -> Result<Report, CliError> {
    if args.replicates < 2 {
        return Err(CliError::Usage(format!("--replicates must be at least 2, got {}", args.replicates)));
    }
    let params = MaternParams::new(args.kappa, args.alpha)?;
    let r = run_ergodicity_experiment(&params, &args.sizes, args.replicates, args.seed, args.extra_variance)?;
    let mut report =
        Report::new("ergodicity", &["n", "mean", "variance", "standard_error", "lattice_variance", "z_score"]);
    report
        .meta("kappa", args.kappa)
        .meta("alpha", args.alpha)
        .meta("replicates", args.replicates)
        .meta("seed", args.seed)
        .meta("extra_variance", args.extra_variance)
        .meta("theoretical_floor", r.theoretical_floor)
        .meta("expected_variance", r.expected_variance)
        .meta("within_3se", r.within(3.0));
    for row in &r.rows {
        report.row(vec![
            row.n.into(),
            row.mean.into(),
            row.variance.into(),
            row.standard_error.into(),
            row.lattice_variance.into(),
            row.z_score.into(),
        ]);
    }
    Ok(report)
}

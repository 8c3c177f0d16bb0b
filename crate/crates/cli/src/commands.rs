use std::str::FromStr;

use chui_lab_core::asymptotics::{
    corollary_rates, limit_constant, parse_ns, proposition_sweep, scaled_norm_sequence, CorollaryCase, RateReport,
};
use chui_lab_core::experiments::{closure_density_demo, closure_lower_bound_check, distance_limit_experiment};
use chui_lab_core::moments::{annulus_energy, annulus_sweep, moments_experiment};
use chui_lab_core::norms::{norm_sq_gram, norm_sq_quadrature, norm_sq_taylor_fraction, psi_norm_sq};
use chui_lab_core::optimize::{
    distance_to_sfn, minimize_norm, set_distance_experiment, OptimizationResult, OptimizeOptions,
};
use chui_lab_core::report::ExperimentReport;
use chui_lab_core::selftest::{run_criterion, CRITERIA};
use chui_lab_core::thompson::{
    check_integral_bound, check_pointwise_bound, construct_poles, disk_samples, evaluation_noise, sup_error,
    CALIBRATED_C0,
};
use chui_lab_core::{BoundedAnalyticFunction, Error, PoleConfiguration, Result, SimplestFraction, Weight};
use clap::{Args, ValueEnum};
use rand::SeedableRng;
use serde::Serialize;

use crate::output::{Outcome, Table};
use crate::Command;

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Norm(a) => norm(a),
        Command::Minimize(a) => minimize(a),
        Command::Distance(a) => distance(a),
        Command::Setdist(a) => setdist(a),
        Command::Asymptotics(a) => asymptotics(a),
        Command::Rates(a) => rates(a),
        Command::Thompson(a) => thompson(a),
        Command::Moments(a) => moments(a),
        Command::Annulus(a) => annulus(a),
        Command::Closure(a) => closure(a),
        Command::Distlimit(a) => distlimit(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn to_json<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// Where the poles come from; exactly one source is allowed.
#[derive(Args, Debug, Serialize)]
pub struct PoleArgs {
    /// JSON file with an array of angles, or `equispaced:N`.
    #[arg(long, value_name = "FILE|equispaced:N")]
    poles: Option<String>,
    /// N equispaced poles.
    #[arg(long, value_name = "N")]
    equispaced: Option<usize>,
    /// N uniform random poles (see --seed).
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl PoleArgs {
    fn configuration(&self) -> Result<PoleConfiguration> {
        let given = [self.poles.is_some(), self.equispaced.is_some(), self.random.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(usage("give exactly one of --poles, --equispaced, --random"));
        }
        let positive = |n: usize| {
            if n == 0 {
                Err(usage("N must be positive"))
            } else {
                Ok(n)
            }
        };
        if let Some(n) = self.equispaced {
            return Ok(PoleConfiguration::equispaced(positive(n)?));
        }
        if let Some(n) = self.random {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
            return Ok(PoleConfiguration::random(positive(n)?, &mut rng));
        }
        let spec = self.poles.as_deref().unwrap_or_default();
        match spec.strip_prefix("equispaced") {
            Some(rest) => {
                let n = rest
                    .trim_start_matches([':', ' ', '='])
                    .parse()
                    .map_err(|_| usage(format!("bad pole spec `{spec}`")))?;
                Ok(PoleConfiguration::equispaced(positive(n)?))
            }
            None => PoleConfiguration::from_json_file(spec),
        }
    }
}

/// Multistart settings shared by the optimizing commands.
#[derive(Args, Debug, Serialize)]
pub struct OptArgs {
    /// Number of starts (default depends on the command).
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gradient sup-norm tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Keep the objective trace of the best start.
    #[arg(long)]
    trace: bool,
}

impl OptArgs {
    fn options(&self, default_starts: usize) -> OptimizeOptions {
        OptimizeOptions {
            starts: self.starts.unwrap_or(default_starts),
            seed: self.seed,
            tol: self.tol,
            max_iterations: self.max_iter,
            record_trace: self.trace,
        }
    }
}

fn start_table(r: &OptimizationResult) -> Table {
    let mut t = Table::new(vec![
        "start",
        "value",
        "gradient_norm",
        "iterations",
        "converged",
        "gauge_distance",
    ]);
    for o in &r.outcomes {
        t.push([
            o.start.to_string(),
            num(o.value),
            num(o.gradient_norm),
            o.iterations.to_string(),
            o.converged.to_string(),
            num(o.gauge_distance_to_equispaced),
        ]);
    }
    t
}

fn report_outcome(report: ExperimentReport, table: Option<Table>) -> Result<Outcome> {
    Ok(Outcome {
        passed: report.passed(),
        result: to_json(&report)?,
        table,
    })
}

fn ns_or(spec: &Option<String>, default: &str) -> Result<Vec<usize>> {
    parse_ns(spec.as_deref().unwrap_or(default))
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gram,
    Quad,
    Taylor,
    Radial,
}

#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    #[command(flatten)]
    poles: PoleArgs,
    #[arg(long, default_value = "alpha:1")]
    weight: String,
    #[arg(long, value_enum, default_value = "gram")]
    method: Method,
    /// Taylor coefficients kept by `--method taylor`.
    #[arg(long, default_value_t = 100_000)]
    terms: usize,
}

fn norm(a: &NormArgs) -> Result<Outcome> {
    let g = Weight::parse(&a.weight)?;
    let c = a.poles.configuration()?;
    let r = match a.method {
        Method::Gram => norm_sq_gram(&c, &g)?,
        Method::Quad => norm_sq_quadrature(&c, &g)?,
        Method::Taylor => norm_sq_taylor_fraction(&c, &g, a.terms)?,
        Method::Radial => {
            if c.gauge_distance_to_equispaced() > 1e-12 {
                return Err(usage("--method radial needs equispaced poles"));
            }
            psi_norm_sq(c.len(), &g)?
        }
    };
    let mut t = Table::new(vec!["N", "value_sq", "error_estimate"]);
    t.push([c.len().to_string(), num(r.value_sq), num(r.error_estimate)]);
    Ok(Outcome {
        result: serde_json::json!({
            "N": c.len(), "weight": g.to_string(), "value_sq": r.value_sq, "norm": r.norm(),
            "method": r.method, "error_estimate": r.error_estimate, "poles": c.angles(),
        }),
        table: Some(t),
        passed: true,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct MinimizeArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value = "alpha:1")]
    weight: String,
    #[command(flatten)]
    opt: OptArgs,
}

fn minimize(a: &MinimizeArgs) -> Result<Outcome> {
    let g = Weight::parse(&a.weight)?;
    let r = minimize_norm(a.n, &g, &a.opt.options(20))?;
    let psi = psi_norm_sq(a.n, &g)?.value_sq;
    let gap = r.best_norm_sq - psi;
    // equispaced is the minimizer only for concave nondecreasing weights
    let passed =
        !g.is_concave_nondecreasing || (gap.abs() <= 1e-6 * psi.max(1.0) && r.gauge_distance_to_equispaced < 1e-3);
    let mut result = to_json(&r)?;
    result["psi_norm_sq"] = psi.into();
    result["gap_to_psi"] = gap.into();
    result["weight"] = g.to_string().into();
    Ok(Outcome {
        table: Some(start_table(&r)),
        result,
        passed,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct DistanceArgs {
    /// `zero`, `const:re[,im]` or `taylor:<file.json>`.
    #[arg(long, alias = "f", default_value = "zero")]
    target: String,
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value = "alpha:1")]
    weight: String,
    #[command(flatten)]
    opt: OptArgs,
}

fn distance(a: &DistanceArgs) -> Result<Outcome> {
    let g = Weight::parse(&a.weight)?;
    let f = BoundedAnalyticFunction::parse(&a.target)?;
    let r = distance_to_sfn(&f, a.n, &g, &a.opt.options(20))?;
    let mut result = to_json(&r)?;
    result["distance"] = r.best_norm_sq.max(0.0).sqrt().into();
    result["weight"] = g.to_string().into();
    Ok(Outcome {
        table: Some(start_table(&r)),
        result,
        passed: true,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct SetdistArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "alpha:1")]
    weight: String,
    #[command(flatten)]
    opt: OptArgs,
}

fn setdist(a: &SetdistArgs) -> Result<Outcome> {
    let g = Weight::parse(&a.weight)?;
    let report = set_distance_experiment(a.n, a.k, &g, &a.opt.options(20))?;
    let mut t = Table::new(vec!["start", "value"]);
    if let Some(s) = report.series.iter().find(|s| s.name == "start values") {
        for (x, y) in s.x.iter().zip(&s.y) {
            t.push([num(*x), num(*y)]);
        }
    }
    report_outcome(report, Some(t))
}

#[derive(Args, Debug, Serialize)]
pub struct AsymptoticsArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Sweep N = 1..N-max (ignored with --Ns).
    #[arg(long = "N-max", default_value_t = 1000)]
    n_max: usize,
    /// Explicit sweep: `a,b,c`, `a:b`, `a:b:step`, `a:b:geom` or `a:b:log`.
    #[arg(long = "Ns")]
    ns: Option<String>,
}

fn asymptotics(a: &AsymptoticsArgs) -> Result<Outcome> {
    let ns = match &a.ns {
        Some(s) => parse_ns(s)?,
        None if a.n_max >= 1 => (1..=a.n_max).collect(),
        None => return Err(usage("--N-max must be positive")),
    };
    let r = scaled_norm_sequence(a.alpha, &ns)?;
    let mut t = Table::new(vec!["N", "scaled_norm_sq", "ratio"]);
    for ((n, v), q) in r.ns.iter().zip(&r.values).zip(&r.ratios) {
        t.push([n.to_string(), num(*v), num(*q)]);
    }
    let mut result = to_json(&r)?;
    result["limit_constant"] = limit_constant(a.alpha)?.into();
    Ok(Outcome {
        passed: r.passed,
        result,
        table: Some(t),
    })
}

#[derive(Args, Debug, Serialize)]
pub struct RatesArgs {
    /// A, B, C, D, or `bracket` for the two-integral comparison.
    #[arg(long)]
    case: String,
    /// Weight parameter: logpow:q for C, exppow:q for D.
    #[arg(long)]
    q: Option<f64>,
    /// Explicit weight, instead of the case default.
    #[arg(long, conflicts_with = "q")]
    weight: Option<String>,
    #[arg(long = "Ns", default_value = "100:10000:log")]
    ns: String,
}

fn rate_table(r: &RateReport) -> Table {
    let mut t = Table::new(vec!["N", "value", "reference", "ratio"]);
    for i in 0..r.ns.len() {
        t.push([
            r.ns[i].to_string(),
            num(r.values[i]),
            num(r.reference[i]),
            num(r.ratios[i]),
        ]);
    }
    t
}

fn rates(a: &RatesArgs) -> Result<Outcome> {
    let ns = parse_ns(&a.ns)?;
    let bracket = a.case.eq_ignore_ascii_case("bracket");
    let case = if bracket {
        None
    } else {
        Some(CorollaryCase::from_str(&a.case)?)
    };
    let weight = match (&a.weight, case) {
        (Some(w), _) => Weight::parse(w)?,
        (None, Some(CorollaryCase::C)) => Weight::log_power(a.q.unwrap_or(2.0))?,
        (None, Some(CorollaryCase::D)) => Weight::exp_power(a.q.unwrap_or(1.0))?,
        (None, _) if a.q.is_some() => return Err(usage("--q applies to cases C and D only")),
        (None, Some(CorollaryCase::B)) => Weight::power(1.5)?,
        (None, _) => Weight::power(1.0)?,
    };
    let r = match case {
        None => proposition_sweep(&weight, &ns)?,
        Some(c) => corollary_rates(c, &weight, &ns)?,
    };
    let mut result = to_json(&r)?;
    result["weight"] = weight.to_string().into();
    Ok(Outcome {
        passed: r.passed,
        table: Some(rate_table(&r)),
        result,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct ThompsonArgs {
    /// `zero`, `const:re[,im]` or `taylor:<file.json>`.
    #[arg(long, default_value = "const:0.5")]
    f: String,
    #[arg(long = "N")]
    n: usize,
    /// Radius of the disk on which the sup error is measured.
    #[arg(long = "K-radius", default_value_t = 0.4)]
    k_radius: f64,
    /// Also check the pointwise and circle-mean bounds.
    #[arg(long)]
    check_bounds: bool,
    #[arg(long, default_value_t = CALIBRATED_C0)]
    c0: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

fn thompson(a: &ThompsonArgs) -> Result<Outcome> {
    if !(a.k_radius > 0.0 && a.k_radius < 1.0) {
        return Err(usage("--K-radius must lie in (0, 1)"));
    }
    let f = BoundedAnalyticFunction::parse(&a.f)?;
    let c = construct_poles(&f, a.n)?;
    let h = SimplestFraction::new(c.clone());
    let err = sup_error(&f, &h, a.k_radius)?;
    let mut result = serde_json::json!({
        "N": a.n, "M": f.sup_bound_m, "poles": c.angles(),
        "sup_error": err, "noise_floor": evaluation_noise(a.n, a.k_radius),
        "min_separation": c.min_separation(),
    });
    let mut passed = true;
    if a.check_bounds {
        let samples = disk_samples(a.samples, a.seed);
        let pointwise = check_pointwise_bound(&h, f.sup_bound_m, a.c0, &samples)?;
        let radii = [0.5, 0.9, 0.99, 1.0 - 1.0 / a.n as f64];
        let integral = check_integral_bound(&f, a.n, a.p, a.beta, a.c0, &radii)?;
        passed = pointwise.passed && integral.passed;
        result["pointwise_bound"] = to_json(&pointwise)?;
        result["circle_mean_bound"] = to_json(&integral)?;
    }
    let mut t = Table::new(vec!["k", "x", "angle"]);
    for (k, th) in c.angles().iter().enumerate() {
        t.push([k.to_string(), num(th / std::f64::consts::TAU), num(*th)]);
    }
    Ok(Outcome {
        result,
        table: Some(t),
        passed,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    /// A single family size (default: 2,4,...,64).
    #[arg(long = "N", conflicts_with = "ns")]
    n: Option<usize>,
    #[arg(long = "Ns")]
    ns: Option<String>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn moments(a: &MomentsArgs) -> Result<Outcome> {
    let ns = match a.n {
        Some(0) => return Err(usage("N must be positive")),
        Some(n) => vec![n],
        None => ns_or(&a.ns, "2,4,8,16,32,64")?,
    };
    let report = moments_experiment(&ns, a.trials, a.seed);
    let mut t = Table::new(vec!["N", "min_moment_ratio", "min_fejer_ratio"]);
    for ((n, a), b) in ns.iter().zip(&report.series[0].y).zip(&report.series[1].y) {
        t.push([n.to_string(), num(*a), num(*b)]);
    }
    report_outcome(report, Some(t))
}

#[derive(Args, Debug, Serialize)]
pub struct AnnulusArgs {
    #[command(flatten)]
    poles: PoleArgs,
    /// With --random: sweep this many seeded configurations and report the least I/N.
    #[arg(long)]
    configs: Option<usize>,
}

fn annulus(a: &AnnulusArgs) -> Result<Outcome> {
    if let Some(k) = a.configs {
        let n = a.poles.random.ok_or_else(|| usage("--configs needs --random N"))?;
        let least = annulus_sweep(n, k, a.poles.seed)?;
        let mut t = Table::new(vec!["N", "configs", "min_ratio"]);
        t.push([n.to_string(), k.to_string(), num(least)]);
        return Ok(Outcome {
            result: serde_json::json!({ "N": n, "configs": k, "min_ratio": least }),
            table: Some(t),
            passed: true,
        });
    }
    let c = a.poles.configuration()?;
    let r = annulus_energy(&c)?;
    let mut t = Table::new(vec!["N", "quadrature", "taylor_proxy", "ratio"]);
    t.push([r.n.to_string(), num(r.quadrature), num(r.taylor_proxy), num(r.ratio)]);
    Ok(Outcome {
        result: to_json(&r)?,
        table: Some(t),
        passed: true,
    })
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Lower,
    Density,
}

#[derive(Args, Debug, Serialize)]
pub struct ClosureArgs {
    #[arg(long, value_enum)]
    branch: Branch,
    #[arg(long, default_value = "const:0.5")]
    f: String,
    /// Weight for the density branch (default alpha:2); the lower branch uses alpha:1.
    #[arg(long)]
    weight: Option<String>,
    /// Default 2:64:geom (lower) or 32:512:geom (density).
    #[arg(long = "Ns")]
    ns: Option<String>,
    #[command(flatten)]
    opt: OptArgs,
}

fn series_table(report: &ExperimentReport, name: &str, column: &'static str) -> Option<Table> {
    let s = report.series.iter().find(|s| s.name == name)?;
    let mut t = Table::new(vec!["N", column]);
    for (x, y) in s.x.iter().zip(&s.y) {
        t.push([num(*x), num(*y)]);
    }
    Some(t)
}

fn closure(a: &ClosureArgs) -> Result<Outcome> {
    let f = BoundedAnalyticFunction::parse(&a.f)?;
    match a.branch {
        Branch::Lower => {
            if let Some(w) = &a.weight {
                if Weight::parse(w)? != Weight::power(1.0)? {
                    return Err(usage("the lower branch runs in alpha:1"));
                }
            }
            let ns = ns_or(&a.ns, "2:64:geom")?;
            let report = closure_lower_bound_check(&f, &ns, &a.opt.options(4))?;
            let t = series_table(&report, "distance", "distance");
            report_outcome(report, t)
        }
        Branch::Density => {
            let g = Weight::parse(a.weight.as_deref().unwrap_or("alpha:2"))?;
            let ns = ns_or(&a.ns, "32:512:geom")?;
            let report = closure_density_demo(&f, &g, &ns)?;
            let t = series_table(&report, "‖f - h_N‖", "distance");
            report_outcome(report, t)
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct DistlimitArgs {
    #[arg(long, default_value = "const:0.5")]
    f: String,
    /// Largest N; the sweep halves down to N-max/8 (ignored with --Ns).
    #[arg(long = "N-max", default_value_t = 512)]
    n_max: usize,
    #[arg(long = "Ns")]
    ns: Option<String>,
    #[command(flatten)]
    opt: OptArgs,
}

fn distlimit(a: &DistlimitArgs) -> Result<Outcome> {
    let f = BoundedAnalyticFunction::parse(&a.f)?;
    let ns = match &a.ns {
        Some(s) => parse_ns(s)?,
        None => {
            let mut ns = Vec::new();
            let mut n = a.n_max;
            while n >= 1 && ns.len() < 4 && n as f64 > 2.0 * f.sup_bound_m {
                ns.push(n);
                n /= 2;
            }
            ns.reverse();
            ns
        }
    };
    let report = distance_limit_experiment(&f, &ns, &a.opt.options(1))?;
    let mut t = Table::new(vec!["N", "constructive", "optimized"]);
    for ((n, a), b) in ns.iter().zip(&report.series[0].y).zip(&report.series[1].y) {
        t.push([n.to_string(), num(*a), num(*b)]);
    }
    report_outcome(report, Some(t))
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// Comma-separated criterion numbers (default: all).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<usize>>,
}

fn selftest(a: &SelftestArgs) -> Result<Outcome> {
    let ids: Vec<usize> = a
        .criteria
        .clone()
        .unwrap_or_else(|| CRITERIA.iter().map(|c| c.0).collect());
    if let Some(bad) = ids.iter().find(|&&i| !(1..=CRITERIA.len()).contains(&i)) {
        return Err(usage(format!("no criterion {bad}")));
    }
    let mut entries = Vec::new();
    let mut t = Table::new(vec!["criterion", "title", "passed", "runtime_seconds"]);
    let mut all = true;
    for id in ids {
        let title = chui_lab_core::selftest::title(id);
        let (passed, entry, secs) = match run_criterion(id) {
            Ok(r) => (r.passed(), to_json(&r)?, r.runtime_seconds),
            Err(e) => (false, serde_json::json!({ "error": e.to_string() }), 0.0),
        };
        eprintln!("{} {id:>2} {title}", if passed { "PASS" } else { "FAIL" });
        all &= passed;
        t.push([id.to_string(), title.to_string(), passed.to_string(), num(secs)]);
        entries.push(serde_json::json!({ "criterion": id, "title": title, "passed": passed, "report": entry }));
    }
    Ok(Outcome {
        result: serde_json::json!({ "criteria": entries }),
        table: Some(t),
        passed: all,
    })
}

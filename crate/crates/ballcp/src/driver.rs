//! Command line driver: dispatches subcommands to the library pipelines
//! and renders deterministic reports.

use std::sync::Arc;

use crate::catalog;
use crate::config::ExperimentConfig;
use crate::envelope::envelope;
use crate::error::{Error, Result};
use crate::expand::{
    component_bounds_check, extract_components, extreme_character_check, interval_fit,
    series_pd_check, CpSeries, ExtremeVerdict,
};
use crate::factorize::{
    assemble, lift_component, representation_correspondence, sn_universality_check,
    spanning_samples,
};
use crate::gns::{
    alpha_bounded_check, build_gram, dilation_via_scaling, gns_construct, scaling_grid,
    uniqueness_intertwiner,
};
use crate::linalg::{herm_eigen, CMat};
use crate::positivity::{
    choi, cp_sampled_check, function_gram, psd_certificate, typew_check, ClosureFunction,
    OperatorFunction,
};
use crate::report::{fmt_c64, fmt_f64, Report};
use crate::rng::fanout;
use crate::algebra::{AlgebraDescriptor, Element, Field};

/// The report-producing entry points of the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Gns,
    Dilate,
    Decompose,
    Factorize,
    Cpcheck,
    IntervalFit,
    Counterexamples,
    Universality,
    Catalog,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Gns => "gns",
            Subcommand::Dilate => "dilate",
            Subcommand::Decompose => "decompose",
            Subcommand::Factorize => "factorize",
            Subcommand::Cpcheck => "cpcheck",
            Subcommand::IntervalFit => "interval-fit",
            Subcommand::Counterexamples => "counterexamples",
            Subcommand::Universality => "universality",
            Subcommand::Catalog => "catalog",
        }
    }
}

fn default_function(cmd: Subcommand) -> &'static str {
    match cmd {
        Subcommand::Gns => "diag-1-z-extreme",
        Subcommand::Dilate | Subcommand::Decompose => "diag-1-z-extreme",
        Subcommand::Factorize => "trace-poly",
        Subcommand::Cpcheck => "transpose-map",
        Subcommand::IntervalFit => "0.5+0.3t^2",
        _ => "",
    }
}

/// Builtin analytic functions usable by dilate, decompose, and factorize.
fn analytic_builtin(name: &str) -> Result<Arc<dyn OperatorFunction + Send + Sync>> {
    match name {
        "diag-1-z-extreme" => Ok(Arc::new(catalog::diag_1_z_function())),
        "0.5+0.3t^2" => Ok(Arc::new(catalog::quadratic_function())),
        "trace-poly" => Ok(Arc::new(catalog::trace_polynomial())),
        other => Err(Error::Unsupported(format!(
            "no analytic builtin named {other}; see the catalog subcommand"
        ))),
    }
}

/// Run one subcommand against a configuration and return its report.
pub fn run(cmd: Subcommand, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(format!("ballcp {}", cmd.name()));
    let function = cfg
        .function
        .clone()
        .unwrap_or_else(|| default_function(cmd).to_string());
    report.section("configuration");
    report.kv("seed", cfg.seed.to_string());
    report.kv_f64("tol", cfg.tol);
    report.kv("degree cap", cfg.degree_cap.to_string());
    report.kv("trials", cfg.trials.to_string());
    if !function.is_empty() {
        report.kv("function", &function);
    }
    match cmd {
        Subcommand::Gns => run_gns(cfg, &function, &mut report)?,
        Subcommand::Dilate => run_dilate(cfg, &function, &mut report)?,
        Subcommand::Decompose => run_decompose(cfg, &function, &mut report)?,
        Subcommand::Factorize => run_factorize(cfg, &function, &mut report)?,
        Subcommand::Cpcheck => run_cpcheck(cfg, &function, &mut report)?,
        Subcommand::IntervalFit => run_interval_fit(cfg, &function, &mut report)?,
        Subcommand::Counterexamples => run_counterexamples(cfg, &mut report)?,
        Subcommand::Universality => run_universality(cfg, &mut report)?,
        Subcommand::Catalog => run_catalog(&mut report),
    }
    Ok(report)
}

fn run_gns(cfg: &ExperimentConfig, function: &str, report: &mut Report) -> Result<()> {
    if function != "diag-1-z-extreme" {
        return Err(Error::Unsupported(format!(
            "the gns subcommand works on table builtins; {function} is not one"
        )));
    }
    let (_domain, phi) = catalog::diag_1_z_extreme()?;
    let gram = build_gram(&phi)?;
    let gram_cert = psd_certificate(&gram, cfg.tol);
    report.section("kernel");
    report.kv("gram dimension", gram_cert.dim.to_string());
    report.kv_f64("gram min eigenvalue", gram_cert.min_eig);
    report.check("kernel positive definite", gram_cert.passed());
    let (alpha_ok, margin) = alpha_bounded_check(&phi, cfg.tol)?;
    report.kv_f64("alpha bound margin", margin);
    report.check("alpha bounded", alpha_ok);

    let dilation = gns_construct(&phi, cfg.tol)?;
    report.section("dilation");
    report.kv("hilbert dimension", dilation.hilbert_dim.to_string());
    let recon = dilation.reconstruction_residuals.iter().copied().fold(0.0, f64::max);
    report.kv_f64("reconstruction residual", recon);
    report.kv_f64("relation residual", dilation.relation_residual);
    report.kv_f64("adjoint defect", dilation.adjoint_defect);
    report.kv_f64("multiplicativity defect", dilation.multiplicativity_defect);
    report.kv_f64("contraction margin", dilation.contraction_margin);
    report.check("reconstruction within tolerance", recon <= cfg.tol);
    report.check("representation relations hold", dilation.adjoint_defect <= 1e-9);
    report.check("dilation minimal", dilation.minimal);

    let second = gns_construct(&phi, cfg.tol)?;
    let uniq = uniqueness_intertwiner(&dilation, &second)?;
    report.section("uniqueness");
    report.kv_f64("intertwining residual", uniq.intertwining_residual);
    report.kv_f64("unitarity defect", uniq.unitarity_defect);
    report.check(
        "minimal dilation unique up to unitary",
        uniq.intertwining_residual <= 1e-9 && uniq.unitarity_defect <= 1e-9,
    );
    Ok(())
}

fn run_dilate(cfg: &ExperimentConfig, function: &str, report: &mut Report) -> Result<()> {
    let phi = analytic_builtin(function)?;
    let grid = match &cfg.grid {
        Some(g) => g.clone(),
        None => scaling_grid(8),
    };
    let scaling = dilation_via_scaling(phi.as_ref(), &grid, cfg.tol)?;
    report.section("scaling grid");
    report.kv("points", scaling.grid.len().to_string());
    report.kv_f64("largest grid point", *scaling.grid.last().unwrap());
    report.kv_f64("sup |phi(gamma(r))|", scaling.sup_phi_norm);
    report.kv_f64("extrapolated limit norm", scaling.phi_limit_norm);
    report.kv_f64("|iota|^2", scaling.iota_norm_sq);
    report.kv_f64("cauchy defect", scaling.cauchy_defect);
    report.section("dilation");
    report.kv("hilbert dimension", scaling.dilation.hilbert_dim.to_string());
    report.kv_f64("relation residual", scaling.dilation.relation_residual);
    let recon =
        scaling.dilation.reconstruction_residuals.iter().copied().fold(0.0, f64::max);
    report.kv_f64("reconstruction residual", recon);
    report.check("norm bound |iota|^2 <= sup + tol", scaling.bound_ok);
    report.check("kernel sections converge", scaling.converged);
    report.check("reconstruction within tolerance", recon <= cfg.tol.max(1e-8));
    Ok(())
}

fn builtin_is_pd(name: &str) -> bool {
    matches!(name, "diag-1-z-extreme" | "0.5+0.3t^2" | "trace-poly")
}

fn sample_tuples(
    domain: &Arc<AlgebraDescriptor>,
    count: usize,
    width: usize,
    radius: f64,
    seed: u64,
) -> Vec<Vec<Element>> {
    (0..count)
        .map(|i| {
            let mut rng = fanout(seed, "tuples", i as u64);
            (0..width).map(|_| Element::random_in_ball(domain, &mut rng, radius)).collect()
        })
        .collect()
}

fn run_decompose(cfg: &ExperimentConfig, function: &str, report: &mut Report) -> Result<()> {
    let phi = analytic_builtin(function)?;
    let domain = phi.domain().clone();
    let samples = spanning_samples(&domain, 10, 0.8, cfg.seed, "decompose-samples");
    let expansion = extract_components(phi.clone(), &samples, cfg.degree_cap, None, cfg.tol)?;
    report.section("components");
    for n in 0..=expansion.degree_cap {
        report.kv(&format!("degree {n} sup norm"), fmt_f64(expansion.sup_norms[n]));
    }
    report.kv_f64("tail estimate", expansion.tail_estimate);
    let worst_fit = expansion.fit_residuals.iter().copied().fold(0.0, f64::max);
    report.kv_f64("fit residual", worst_fit);
    report.check("restriction fits within tolerance", worst_fit <= cfg.tol);
    let nonzero: Vec<usize> = (0..=expansion.degree_cap)
        .filter(|&n| expansion.sup_norms[n] > 1e-9)
        .collect();
    report.kv(
        "nonzero degrees",
        format!("{nonzero:?}"),
    );
    report.kv("homogeneous", if nonzero.len() <= 1 { "yes" } else { "no" });

    let bounds = component_bounds_check(&expansion, &samples, builtin_is_pd(function), cfg.tol)?;
    report.section("norm bounds");
    report.kv_f64("|phi| sup", bounds.phi_sup);
    match &bounds.bounds_hold {
        Some(flags) => {
            report.check("component norms bounded by |phi|", flags.iter().all(|b| *b));
        }
        None => report.note("bounds skipped: function not certified completely positive"),
    }

    let tuples = sample_tuples(&domain, 6, 3, 0.45, cfg.seed);
    let series = series_pd_check(&expansion.components(), &tuples, cfg.tol)?;
    report.section("positive definiteness");
    report.check("every component positive definite", series.components_pass);
    report.check("component sum positive definite", series.sum_passes);

    if function == "diag-1-z-extreme" {
        // per-entry coefficient series of diag(1, t): the constant in the
        // first entry and the identity in the second, both extreme
        report.section("extreme characters");
        let probe = Element::unit(&domain)?.scale(0.5);
        for entry in 0..phi.output_dim() {
            let mut coeffs = Vec::with_capacity(expansion.degree_cap + 1);
            for n in 0..=expansion.degree_cap {
                let value = expansion.component(n).eval(&probe)?[(entry, entry)].re;
                coeffs.push((value / 0.5_f64.powi(n as i32)).max(0.0));
            }
            let series = CpSeries::from_scalars(&coeffs);
            match extreme_character_check(&series, 1e-6)? {
                ExtremeVerdict::Extreme { degree } => {
                    report.kv(&format!("entry {entry}"), format!("extreme character t^{degree}"));
                }
                ExtremeVerdict::NotExtreme { reason } => {
                    report.kv(&format!("entry {entry}"), format!("not extreme ({reason})"));
                }
            }
        }
    }
    Ok(())
}

fn run_factorize(cfg: &ExperimentConfig, function: &str, report: &mut Report) -> Result<()> {
    let phi = analytic_builtin(function)?;
    let domain = phi.domain().clone();
    let env = envelope(&domain)?;
    let samples = spanning_samples(&domain, 10, 0.7, cfg.seed, "factorize-extract");
    let expansion = extract_components(phi.clone(), &samples, cfg.degree_cap, None, cfg.tol)?;
    let top_dim = crate::envelope::SymBasis::blocks(env.target_blocks(), cfg.degree_cap).dim();
    let training = spanning_samples(&domain, 2 * top_dim + 8, 0.75, cfg.seed, "factorize-train");
    let holdout = spanning_samples(&domain, 8, 0.6, cfg.seed, "factorize-holdout");
    report.section("lifted components");
    let mut components = Vec::new();
    let mut all_choi = true;
    for n in 0..=cfg.degree_cap {
        let comp = expansion.component(n);
        let lifted = lift_component(&comp, &env, n, &training, &holdout)?;
        all_choi &= lifted.choi.passed();
        report.kv(
            &format!("degree {n}"),
            format!(
                "choi {} | solve {} | holdout {}",
                if lifted.choi.passed() { "PASS" } else { "FAIL" },
                fmt_f64(lifted.solve_residual),
                fmt_f64(lifted.holdout_residual)
            ),
        );
        components.push(lifted);
    }
    report.check("every lifted choi certificate passes", all_choi);
    let fresh = spanning_samples(&domain, 8, 0.65, cfg.seed, "factorize-fresh");
    let factorization = assemble(components, &env, phi.as_ref(), &fresh)?;
    report.section("assembly");
    report.kv_f64("verification residual", factorization.verification_residual);
    report.check(
        "reassembled function matches the original",
        factorization.verification_residual <= cfg.tol.max(1e-8),
    );

    // the identity representation demonstrates the multiplicative lift
    let rep_domain = AlgebraDescriptor::matrix(2, Field::Real);
    let pi: Arc<dyn OperatorFunction + Send + Sync> = Arc::new(ClosureFunction::new(
        rep_domain,
        2,
        "identity representation",
        |a| Ok(a.matrix()?.clone()),
    ));
    let correspondence = representation_correspondence(pi, 2, cfg.seed, cfg.tol.max(1e-8))?;
    report.section("representation correspondence");
    report.kv_f64("homomorphism defect", correspondence.hom_defect);
    report.kv_f64("multiplicativity residual", correspondence.multiplicativity_residual);
    report.kv("commutant dimension", correspondence.commutant_dim.to_string());
    report.kv_f64("commutant residual", correspondence.commutant_residual);
    report.kv_f64("split tensor residual", correspondence.split_residual);
    report.check(
        "lifted representation multiplicative",
        correspondence.multiplicativity_residual <= 1e-8,
    );
    report.check(
        "commutant preserved on witnesses",
        correspondence.commutant_residual <= 1e-8 && correspondence.split_residual <= 1e-8,
    );
    Ok(())
}

fn run_cpcheck(cfg: &ExperimentConfig, function: &str, report: &mut Report) -> Result<()> {
    if function != "transpose-map" {
        return Err(Error::Unsupported(format!(
            "the cpcheck subcommand works on linear map builtins; {function} is not one"
        )));
    }
    let map = catalog::transpose_map();
    let choi_matrix = choi(&map);
    let cert = psd_certificate(&choi_matrix, cfg.tol);
    let (eigs, _) = herm_eigen(&choi_matrix);
    report.section("choi certificate");
    report.kv(
        "choi spectrum",
        format!("[{}]", eigs.iter().map(|e| fmt_f64(*e)).collect::<Vec<_>>().join(", ")),
    );
    report.kv_f64("min eigenvalue", cert.min_eig);
    report.check("choi positivity", cert.passed());

    let domain = AlgebraDescriptor::matrix(2, Field::Complex);
    let as_function = ClosureFunction::new(domain, 2, "transpose-map", move |a| {
        Ok(map.apply(a.matrix()?))
    });
    let falsifier = cp_sampled_check(&as_function, 2, cfg.trials, cfg.seed, cfg.tol)?;
    report.section("sampled falsifier");
    report.kv("trials", falsifier.trials.to_string());
    match &falsifier.counterexample {
        Some(ce) => {
            report.kv("counterexample trial", ce.trial.to_string());
            report.kv_f64("violating eigenvalue", ce.certificate.min_eig);
        }
        None => report.note("no counterexample found"),
    }
    report.check(
        "falsifier agrees with the certificate",
        falsifier.pass == cert.passed(),
    );
    Ok(())
}

fn run_interval_fit(cfg: &ExperimentConfig, function: &str, report: &mut Report) -> Result<()> {
    if function != "0.5+0.3t^2" {
        return Err(Error::Unsupported(format!(
            "the interval-fit subcommand works on scalar series builtins; {function} is not one"
        )));
    }
    let samples = catalog::quadratic_samples(25);
    let fit = interval_fit(&samples, cfg.degree_cap, cfg.tol)?;
    report.section("fit");
    for (n, c) in fit.series.coefficients.iter().enumerate() {
        report.kv(&format!("coefficient t^{n}"), fmt_f64(c[(0, 0)].re));
    }
    report.kv_f64("residual", fit.residual);
    report.kv("iterations", fit.iterations.to_string());
    report.check("nonnegative series fits the samples", fit.residual <= cfg.tol);
    let c0 = fit.series.coefficients[0][(0, 0)].re;
    let c2 = fit.series.coefficients.get(2).map(|c| c[(0, 0)].re).unwrap_or(0.0);
    report.check(
        "recovered coefficients match 0.5 and 0.3",
        (c0 - 0.5).abs() <= 1e-8 && (c2 - 0.3).abs() <= 1e-8,
    );
    match extreme_character_check(&fit.series, 1e-9)? {
        ExtremeVerdict::Extreme { degree } => {
            report.kv("extreme point", format!("character t^{degree}"));
        }
        ExtremeVerdict::NotExtreme { reason } => {
            report.kv("extreme point", format!("no ({reason})"));
        }
    }
    Ok(())
}

fn run_counterexamples(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let (phi, pair) = catalog::example_7_4();
    report.section("separating disc function");
    let typew = typew_check(&phi, 2, 1000, cfg.seed, cfg.tol)?;
    report.kv("type-W trials", typew.trials.to_string());
    report.check("completely positive of type W over all trials", typew.pass);
    let gram = function_gram(&phi, &pair)?;
    report.note("witness gram at the stored two-point pair:");
    for i in 0..gram.nrows() {
        let row: Vec<String> = (0..gram.ncols()).map(|j| fmt_c64(gram[(i, j)])).collect();
        report.note(format!("  [{}]", row.join(", ")));
    }
    let cert = psd_certificate(&gram, cfg.tol);
    report.kv_f64("hermitian defect", cert.hermitian_defect);
    report.check(
        "stored witness falsifies positive definiteness",
        !cert.passed() && cert.hermitian_defect > cfg.tol,
    );

    report.section("non-dilatable divergence");
    let rows = catalog::nondilatable_l1(&[1, 4, 25, 100]);
    let mut exact = true;
    let mut increasing = true;
    let mut previous = f64::NEG_INFINITY;
    for (n, norm) in &rows {
        report.kv(&format!("truncation {n}"), fmt_f64(*norm));
        exact &= (norm - (*n as f64).sqrt()).abs() <= 1e-10;
        increasing &= *norm > previous;
        previous = *norm;
    }
    report.check("norms equal sqrt(truncation size)", exact);
    report.check("norms strictly increase", increasing);
    report.note("unbounded truncation norms rule out any dilation for this function");
    Ok(())
}

fn run_universality(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let tol = cfg.tol.max(1e-8);
    let real2 = AlgebraDescriptor::matrix(2, Field::Real);
    let env = envelope(&real2)?;
    let sym = AlgebraDescriptor::symmetric_power(&real2, 2)?;
    let training = spanning_samples(&real2, 30, 0.7, cfg.seed, "universality-train");
    let holdout = spanning_samples(&real2, 8, 0.55, cfg.seed, "universality-holdout");

    let defining = ClosureFunction::new(sym.clone(), 4, "defining representation", |x| {
        Ok(x.matrix()?.clone())
    });
    let rep = sn_universality_check(&defining, &env, 2, &training, &holdout)?;
    report.section("defining representation");
    report.kv("achieved rank", rep.achieved_rank.to_string());
    report.kv("reachable rank", rep.reachable_rank.to_string());
    report.kv_f64("holdout residual", rep.residual);
    report.check("defining representation factors", rep.residual <= tol);

    let iso = CMat::from_fn(4, 2, |i, j| match (i, j) {
        (0, 0) => crate::linalg::cr(0.6),
        (2, 0) => crate::linalg::cr(0.8),
        (1, 1) => crate::linalg::cr(std::f64::consts::FRAC_1_SQRT_2),
        (3, 1) => crate::linalg::cr(std::f64::consts::FRAC_1_SQRT_2),
        _ => crate::linalg::cr(0.0),
    });
    let compressed = ClosureFunction::new(sym, 2, "compressed representation", move |x| {
        Ok(iso.adjoint() * x.matrix()? * &iso)
    });
    let comp = sn_universality_check(&compressed, &env, 2, &training, &holdout)?;
    report.section("compressed representation");
    report.kv_f64("holdout residual", comp.residual);
    report.check("compression factors", comp.residual <= tol);

    let complex2 = AlgebraDescriptor::matrix(2, Field::Complex);
    let cenv = envelope(&complex2)?;
    let csym = AlgebraDescriptor::symmetric_power(&complex2, 2)?;
    let ctraining = spanning_samples(&complex2, 90, 0.7, cfg.seed, "universality-ctrain");
    let choldout = spanning_samples(&complex2, 10, 0.55, cfg.seed, "universality-choldout");
    let conjugation = ClosureFunction::new(csym, 4, "conjugation", |x| {
        Ok(x.matrix()?.map(|z| z.conj()))
    });
    let conj = sn_universality_check(&conjugation, &cenv, 2, &ctraining, &choldout)?;
    report.section("conjugation on the complex symmetric square");
    report.kv("achieved rank", conj.achieved_rank.to_string());
    report.kv_f64("holdout residual", conj.residual);
    report.check("real-linear conjugation factors", conj.residual <= tol);
    Ok(())
}

fn run_catalog(report: &mut Report) {
    report.section("builtins");
    let entries = catalog::catalog();
    for e in &entries {
        report.kv(e.name, format!("{} | {}", e.kind, e.summary));
    }
    let names: Vec<&str> = entries.iter().map(|e| e.name).collect();
    report.check(
        "catalog lists the named builtins",
        ["example-7.4", "nondilatable-l1", "diag-1-z-extreme"]
            .iter()
            .all(|n| names.contains(n)),
    );
}

//! One runner per subcommand. Each returns the `results` JSON fragment,
//! the residual rows, and whether the run's certificates all closed.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use gradcon_core::blcert::{construct_bl_element, eligible_indices, certify_start_point, BlRecipe};
use gradcon_core::contraction::{commutator_map, iterate_fixed_point, sandwich_map, Element};
use gradcon_core::dynamics::{remove_cutoff, solve_heisenberg, verify_p1_p4, CutoffModel};
use gradcon_core::fock::TruncOp;
use gradcon_core::picard::{
    rhs_lifted_probe, rhs_scalar_identity, rhs_scalar_probe, solve_ivp, OpTrajectory, TimeGrid,
};
use gradcon_core::seminorm::truncation_margin;

use crate::config::{Config, MapConfig, RhsKind};
use crate::report::{rows_from_report, ResidualRow};
use crate::CliError;

type Outcome = (Value, Vec<ResidualRow>, bool);

fn build_map<'a>(
    cfg: &Config,
    gen: &TruncOp,
) -> Result<gradcon_core::contraction::ContractionMap<'a, TruncOp>, CliError> {
    match cfg.map {
        MapConfig::Sandwich { alpha, left, right } => {
            sandwich_map(Complex64::new(alpha, 0.0), left, right, gen)
                .map_err(|e| CliError::Certificate(format!("sandwich map: {e}")))
        }
        MapConfig::Commutator { power } => commutator_map(power, gen)
            .map_err(|e| CliError::Certificate(format!("commutator map: {e}"))),
    }
}

pub fn fixedpoint(cfg: &Config, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let panel = cfg.panel.build(cfg.dim)?;
    let gen = panel.generator().clone();
    let map = build_map(cfg, &gen)?;
    let start = cfg.probe_op(rng);
    let (fixed, report) = iterate_fixed_point(&map, &start, &panel, cfg.tol, cfg.max_iter)
        .map_err(|e| CliError::Certificate(format!("iteration: {e}")))?;
    let results = json!({
        "iterations": report.iterations,
        "rate": report.rate,
        "bl_constant": report.bl_constant,
        "fixed_point_sup_seminorm": Element::sup_seminorm(&fixed, &panel),
        "fixed_point_max_entry": fixed.max_abs_entry(),
        "tail_bound_at_final": report.tail_bound(report.iterations),
    });
    let rows = rows_from_report(&report, "");
    let certified = report.certified;
    Ok((results, rows, certified))
}

pub fn ode(cfg: &Config, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    if cfg.rhs == RhsKind::Heisenberg {
        return heisenberg(cfg, rng);
    }
    let panel = cfg.panel.build(cfg.dim)?;
    let gen = panel.generator().clone();
    let grid = TimeGrid::new(cfg.delta, cfg.nodes)
        .map_err(|e| CliError::Config(format!("time grid: {e}")))?;
    let probe = cfg.probe_op(rng);
    let delta = cfg.delta;
    let rhs = match cfg.rhs {
        RhsKind::ScalarIdentity => {
            rhs_scalar_identity(move |t| Complex64::new(t.cos(), 0.0), delta, &gen)
        }
        RhsKind::ScalarProbe => rhs_scalar_probe(
            move |t| Complex64::new(0.0, t).exp() * Complex64::new(0.5 / delta, 0.0),
            probe.clone(),
            delta,
            &gen,
        ),
        RhsKind::LiftedProbe => rhs_lifted_probe(
            move |t| Complex64::new(0.0, t).exp() * Complex64::new(0.5 / delta, 0.0),
            cfg.lift,
            probe.clone(),
            delta,
            &gen,
        )
        .map_err(|e| CliError::Certificate(format!("lifted rhs: {e}")))?,
        RhsKind::Heisenberg => unreachable!("handled above"),
    };
    let x0 = TruncOp::zeros(cfg.dim);
    let (trajectory, report) = solve_ivp(&rhs, &x0, grid, &panel, cfg.tol, cfg.max_iter)
        .map_err(|e| CliError::Certificate(format!("picard solve: {e}")))?;
    let check = gradcon_core::picard::verify_rhs(
        &rhs,
        &[OpTrajectory::constant(grid, probe), trajectory.clone()],
        &panel,
    );
    let results = json!({
        "iterations": report.iterations,
        "rate": report.rate,
        "bl_constant": report.bl_constant,
        "final_value_sup_seminorm": Element::sup_seminorm(
            trajectory.value(grid.n_nodes() - 1), &panel),
        "rhs_bound_certified": check.bound_certified,
        "rhs_lipschitz_certified": check.lipschitz_certified,
    });
    let rows = rows_from_report(&report, "");
    let certified = report.certified && check.bound_certified && check.lipschitz_certified;
    Ok((results, rows, certified))
}

pub fn heisenberg(cfg: &Config, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let panel = cfg.panel.build(cfg.dim)?;
    let h = panel.generator().clone();
    let grid = TimeGrid::new(cfg.delta, cfg.nodes)
        .map_err(|e| CliError::Config(format!("time grid: {e}")))?;
    let x0 = cfg.probe_op(rng);
    let sol = solve_heisenberg(&h, &x0, grid, &panel, cfg.tol, cfg.max_iter)
        .map_err(|e| CliError::Certificate(format!("heisenberg solve: {e}")))?;
    let results = json!({
        "iterations": sol.report.iterations,
        "rate": sol.report.rate,
        "bl_constant": sol.report.bl_constant,
        "oracle_error": sol.oracle_error,
        "tail_bound_at_final": sol.report.tail_bound(sol.report.iterations),
    });
    let rows = rows_from_report(&sol.report, "");
    let certified = sol.report.certified;
    Ok((results, rows, certified))
}

pub fn cutoff(cfg: &Config, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let panel = cfg.panel.build(cfg.dim)?;
    let model = CutoffModel::free_boson(cfg.dim, cfg.cutoffs.clone(), cfg.delta)
        .map_err(|e| CliError::Config(format!("cutoff model: {e}")))?;
    let probe = cfg.probe_op(rng);
    let hypotheses = verify_p1_p4(&model, &[probe.clone()], &panel)
        .map_err(|e| CliError::Certificate(format!("hypotheses: {e}")))?;
    let grid = TimeGrid::new(cfg.delta, cfg.nodes)
        .map_err(|e| CliError::Config(format!("time grid: {e}")))?;
    let removal = remove_cutoff(&model, &probe, grid, &panel, cfg.tol, cfg.max_iter)
        .map_err(|e| CliError::Certificate(format!("cutoff removal: {e}")))?;

    let mut c_alphas = Vec::new();
    for i in 0..cfg.cutoffs.len() {
        c_alphas.push(
            model
                .contraction_constant(i)
                .map_err(|e| CliError::Certificate(format!("constants: {e}")))?,
        );
    }
    let results = json!({
        "alphas": model.alphas(),
        "c_alpha": c_alphas,
        "p1_commuting": hypotheses.p1_commuting,
        "p2_limit": hypotheses.p2_limit,
        "p3_decay": hypotheses.p3_decay,
        "p4_inverse_norm": hypotheses.p4_norm,
        "hypotheses_ok": hypotheses.all_ok,
        "net_tail_maxima": removal.net.tail_maxima,
        "net_pairwise_sup": removal.net.pairwise_sup,
        "propagator_errors": removal.propagator_errors,
        "oracle_error": removal.oracle_error,
    });
    let mut rows = Vec::new();
    for (cutoff, report) in cfg.cutoffs.iter().zip(&removal.net.member_reports) {
        rows.extend(rows_from_report(report, &format!("L{cutoff}:")));
    }
    let certified = hypotheses.all_ok && removal.net.certified;
    Ok((results, rows, certified))
}

pub fn blcert(cfg: &Config, _rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let panel = cfg.panel.build(cfg.dim)?;
    let gen = panel.generator().clone();
    let eligible = eligible_indices(&gen)
        .map_err(|e| CliError::Certificate(format!("eligibility: {e}")))?;
    let coeffs: Vec<Complex64> = if cfg.coeffs.is_empty() {
        let n = eligible.len().max(1);
        vec![Complex64::new(1.0 / n as f64, 0.0); eligible.len()]
    } else {
        cfg.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect()
    };
    let recipe = BlRecipe::new(gen.clone(), coeffs, cfg.m, cfg.l)
        .map_err(|e| CliError::Certificate(format!("recipe: {e}")))?;
    let built = construct_bl_element(&recipe, &panel);
    let map = build_map(cfg, &gen)?;
    let start = certify_start_point(&built.element, &map, &panel, cfg.l);

    let mut rows = Vec::new();
    let mut cert_values = Vec::new();
    for cert in &built.certificates {
        cert_values.push(json!({
            "index": cert.index_label,
            "value": cert.value,
            "bound": cert.bound,
            "rescale_factor": cert.rescale_factor,
        }));
        rows.push(ResidualRow {
            n: 1,
            index_id: cert.index_label.clone(),
            residual: cert.value,
            rate: None,
        });
    }
    let results = json!({
        "eligible_indices": eligible,
        "coeff_sum": recipe.coeff_sum(),
        "construction_certified": built.certified,
        "certificates": cert_values,
        "start_l1": start.l1,
        "start_l2": start.l2,
        "start_min_l": start.min_l,
        "start_certified": start.certified,
        "start_direct_check": start.direct_check,
    });
    let certified = built.certified && start.certified && start.direct_check;
    Ok((results, rows, certified))
}

pub fn panel(cfg: &Config, _rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let panel = cfg.panel.build(cfg.dim)?;
    let gen = panel.generator();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for idx in panel.indices() {
        let margin = truncation_margin(idx, gen)
            .map_err(|e| CliError::Certificate(format!("margin: {e}")))?;
        entries.push(json!({
            "index": idx.label(),
            "truncation_margin": margin,
        }));
        rows.push(ResidualRow {
            n: 1,
            index_id: idx.label(),
            residual: margin,
            rate: None,
        });
    }
    let results = json!({
        "dim": cfg.dim,
        "indices": entries,
    });
    Ok((results, rows, true))
}

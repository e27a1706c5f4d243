//! Heisenberg dynamics as a Picard fixed point, and cutoff removal on the
//! free-boson model.
//!
//! The equation of motion `dx/dt = i [H, x]` becomes the integral map
//! `(Ux)(t) = x0 + i int_0^t [H, x(s)] ds`, contractive on `[0, delta]`
//! when `||H^-1|| <= 1/(2(delta+1))`. For diagonal `H` the exact propagator
//! `x(t) = e^(iHt) x0 e^(-iHt)` is an entry-wise phase rotation and serves
//! as the module's oracle.
//!
//! [`CutoffModel`] carries the occupation-cutoff family `H_L`: one Picard
//! map per cutoff, a hypothesis report (commutation, uniform constants,
//! commutator decay, inverse bound), and [`remove_cutoff`], which runs the
//! fixed-point net and compares its small-parameter corner against the
//! full-generator phase oracle.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::contraction::{ContractionMap, ConvergenceReport, Element};
use crate::family::{fixed_point_net, Family, FamilyError, NetReport};
use crate::fock::{
    commutator, cutoff_hamiltonian, op_norm, shifted_hamiltonian, FockError, TruncOp,
};
use crate::picard::{
    picard_map, solve_ivp, OpTrajectory, PicardError, Rhs, TimeGrid, trajectory_seminorm,
};
use crate::seminorm::{IndexTransport, Panel, SeminormError};

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    /// The generator must be diagonal with real entries.
    NotDiagonal,
    /// `||H^-1||` too large for the interval; reports the minimal extra
    /// shift that would fix it.
    InverseNormBound {
        norm: f64,
        required: f64,
        required_shift: f64,
    },
    /// Cutoff grid must be strictly increasing and inside the dimension.
    BadCutoffGrid,
    /// The hypothesis report must pass before building the Picard family.
    HypothesesFailed,
    Contraction(crate::contraction::ContractionError),
    Picard(PicardError),
    Family(FamilyError),
    Fock(FockError),
    Seminorm(SeminormError),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::NotDiagonal => write!(f, "generator is not diagonal"),
            DynamicsError::InverseNormBound {
                norm,
                required,
                required_shift,
            } => write!(
                f,
                "||H^-1|| = {norm} exceeds {required}; shift the generator by at least {required_shift}"
            ),
            DynamicsError::BadCutoffGrid => write!(f, "cutoff grid not strictly increasing"),
            DynamicsError::HypothesesFailed => {
                write!(f, "cutoff hypotheses (p1)-(p4) not certified")
            }
            DynamicsError::Contraction(e) => write!(f, "{e}"),
            DynamicsError::Picard(e) => write!(f, "{e}"),
            DynamicsError::Family(e) => write!(f, "{e}"),
            DynamicsError::Fock(e) => write!(f, "{e}"),
            DynamicsError::Seminorm(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<crate::contraction::ContractionError> for DynamicsError {
    fn from(e: crate::contraction::ContractionError) -> Self {
        DynamicsError::Contraction(e)
    }
}

impl From<PicardError> for DynamicsError {
    fn from(e: PicardError) -> Self {
        DynamicsError::Picard(e)
    }
}

impl From<FamilyError> for DynamicsError {
    fn from(e: FamilyError) -> Self {
        DynamicsError::Family(e)
    }
}

impl From<FockError> for DynamicsError {
    fn from(e: FockError) -> Self {
        DynamicsError::Fock(e)
    }
}

impl From<SeminormError> for DynamicsError {
    fn from(e: SeminormError) -> Self {
        DynamicsError::Seminorm(e)
    }
}

fn check_inverse_bound(h: &TruncOp, delta: f64) -> Result<(), DynamicsError> {
    let inv = h.inverse_diag().map_err(|_| DynamicsError::NotDiagonal)?;
    let norm = op_norm(&inv);
    let required = 1.0 / (2.0 * (delta + 1.0));
    if norm > required * (1.0 + 1e-12) {
        let min_eig = 1.0 / norm;
        return Err(DynamicsError::InverseNormBound {
            norm,
            required,
            required_shift: 2.0 * (delta + 1.0) - min_eig,
        });
    }
    Ok(())
}

/// Right-hand side `f(t, x) = i [H, x]` with Lipschitz constant
/// `M = 1/(1+delta)` and the one-power one-grade transport.
///
/// The bounding net is `d_(h,k) = ||x0||^(h,k)` for the intended initial
/// value. Requires `||H^-1|| <= 1/(2(delta+1))`.
pub fn heisenberg_rhs<'a>(
    h: &TruncOp,
    delta: f64,
    x0: &TruncOp,
    gen: &TruncOp,
) -> Result<Rhs<'a>, DynamicsError> {
    check_inverse_bound(h, delta)?;
    let h = h.clone();
    let x0 = x0.clone();
    let gen = gen.clone();
    Ok(Rhs::new(
        1.0 / (1.0 + delta),
        IndexTransport::new(1, 1),
        IndexTransport::new(1, 1),
        move |idx| Element::seminorm(&x0, idx, &gen),
        move |_t, x| commutator(&h, x).expect("dimension mismatch").scale(Complex64::I),
    ))
}

/// Exact propagator of a diagonal generator: entry-wise phases
/// `X(t)_ls = e^(i (h_l - h_s) t) (x0)_ls`.
pub fn exact_evolution(h: &TruncOp, x0: &TruncOp, t: f64) -> Result<TruncOp, DynamicsError> {
    let diag = h.diagonal_real().map_err(|_| DynamicsError::NotDiagonal)?;
    let d = x0.dim();
    let mut out = TruncOp::zeros(d);
    for row in 0..d {
        for col in 0..d {
            let phase = Complex64::new(0.0, (diag[row] - diag[col]) * t).exp();
            out.set(row, col, phase * x0.get(row, col));
        }
    }
    Ok(out)
}

/// Picard solution of the Heisenberg equation plus its deviation from the
/// phase oracle.
#[derive(Debug, Clone)]
pub struct HeisenbergSolution {
    pub trajectory: OpTrajectory,
    pub report: ConvergenceReport,
    /// Max over panel indices of the trajectory seminorm of the difference
    /// from the exact propagator.
    pub oracle_error: f64,
}

/// Max-panel trajectory distance between a computed trajectory and the
/// phase-oracle evolution under `h`.
pub fn oracle_deviation(
    traj: &OpTrajectory,
    h: &TruncOp,
    x0: &TruncOp,
    panel: &Panel,
) -> Result<f64, DynamicsError> {
    let grid = traj.grid();
    let mut diffs = Vec::with_capacity(grid.n_nodes());
    for i in 0..grid.n_nodes() {
        let exact = exact_evolution(h, x0, grid.node(i))?;
        diffs.push(TruncOp::sub(traj.value(i), &exact)?);
    }
    let diff_traj = OpTrajectory::from_values(grid, diffs)?;
    let mut worst = 0.0f64;
    for idx in panel.indices() {
        worst = worst.max(trajectory_seminorm(&diff_traj, idx, panel.generator()));
    }
    Ok(worst)
}

/// Solves `dx/dt = i [H, x]` by Picard iteration and reports the deviation
/// from the exact propagator.
pub fn solve_heisenberg(
    h: &TruncOp,
    x0: &TruncOp,
    grid: TimeGrid,
    panel: &Panel,
    tol: f64,
    max_iter: usize,
) -> Result<HeisenbergSolution, DynamicsError> {
    let rhs = heisenberg_rhs(h, grid.delta(), x0, panel.generator())?;
    let (trajectory, report) = solve_ivp(&rhs, x0, grid, panel, tol, max_iter)?;
    let oracle_error = oracle_deviation(&trajectory, h, x0, panel)?;
    Ok(HeisenbergSolution {
        trajectory,
        report,
        oracle_error,
    })
}

/// Full generator plus its occupation-cutoff family on one interval.
#[derive(Debug, Clone)]
pub struct CutoffModel {
    h: TruncOp,
    cutoffs: Vec<usize>,
    members: Vec<TruncOp>,
    delta: f64,
}

impl CutoffModel {
    /// Free-boson model: `H = 4 + N` and `H_L` with entries `4 + min(l, L)`
    /// on a strictly increasing cutoff grid.
    pub fn free_boson(dim: usize, cutoffs: Vec<usize>, delta: f64) -> Result<Self, DynamicsError> {
        if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DynamicsError::BadCutoffGrid);
        }
        let h = shifted_hamiltonian(dim, 4.0);
        check_inverse_bound(&h, delta)?;
        let mut members = Vec::with_capacity(cutoffs.len());
        for &l in &cutoffs {
            members.push(cutoff_hamiltonian(dim, l).map_err(|_| DynamicsError::BadCutoffGrid)?);
        }
        Ok(CutoffModel {
            h,
            cutoffs,
            members,
            delta,
        })
    }

    pub fn generator(&self) -> &TruncOp {
        &self.h
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn members(&self) -> &[TruncOp] {
        &self.members
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Cutoff labels mapped into a decreasing parameter `1/(1 + L)`, so
    /// removing the cutoff drives the parameter to zero.
    pub fn alphas(&self) -> Vec<f64> {
        self.cutoffs.iter().map(|&l| 1.0 / (1.0 + l as f64)).collect()
    }

    /// `c_alpha = 2 delta ||H^-1|| ||H^-1 H_alpha||`.
    pub fn contraction_constant(&self, member: usize) -> Result<f64, DynamicsError> {
        let inv = self.h.inverse_diag()?;
        let inv_norm = op_norm(&inv);
        let mixed = op_norm(&inv.matmul(&self.members[member])?);
        Ok(2.0 * self.delta * inv_norm * mixed)
    }
}

/// Numerical record of the cutoff hypotheses.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    /// `[H_a, H_b] = 0` exactly for all pairs.
    pub p1_commuting: bool,
    /// `c_alpha` per member.
    pub p2_constants: Vec<f64>,
    /// Extrapolated limit of `2 ||H^-1|| ||H^-1 H_alpha||`.
    pub p2_limit: f64,
    pub p2_ok: bool,
    /// `||[H - H_L, Y]||` per member and panel index, max over probes.
    pub p3_decay: Vec<Vec<f64>>,
    pub p3_ok: bool,
    /// `||H^-1||` against `1/(2(delta+1))`.
    pub p4_norm: f64,
    pub p4_ok: bool,
    /// Implied check `[H, H_alpha] = 0`.
    pub full_commutes: bool,
    pub all_ok: bool,
}

/// Evaluates hypotheses (p1)-(p4) on the model, with the commutator decay
/// table taken over the given probes.
pub fn verify_p1_p4(
    model: &CutoffModel,
    probes: &[TruncOp],
    panel: &Panel,
) -> Result<HypothesisReport, DynamicsError> {
    let n = model.members.len();
    let dim = model.h.dim();
    let zero = TruncOp::zeros(dim);

    let mut p1 = true;
    for i in 0..n {
        for j in (i + 1)..n {
            if commutator(&model.members[i], &model.members[j])? != zero {
                p1 = false;
            }
        }
    }
    let mut full_commutes = true;
    for m in &model.members {
        if commutator(&model.h, m)? != zero {
            full_commutes = false;
        }
    }

    let mut constants = Vec::with_capacity(n);
    for i in 0..n {
        constants.push(model.contraction_constant(i)?);
    }
    // limit of the delta-free product along the grid, by Aitken when the
    // differences still move
    let scaled: Vec<f64> = constants.iter().map(|c| c / model.delta).collect();
    let p2_limit = if n >= 3 {
        let (c1, c2, c3) = (scaled[n - 3], scaled[n - 2], scaled[n - 1]);
        let denom = (c3 - c2) - (c2 - c1);
        if denom.abs() < 1e-14 {
            c3
        } else {
            c3 - (c3 - c2) * (c3 - c2) / denom
        }
    } else {
        scaled[n - 1]
    };
    let p2_ok = constants.iter().all(|&c| c < 1.0) && p2_limit > 0.0;

    let gen = panel.generator();
    let mut p3_decay = Vec::with_capacity(n);
    for member in &model.members {
        let gap = TruncOp::sub(&model.h, member)?;
        let mut row = alloc::vec![0.0f64; panel.indices().len()];
        for probe in probes {
            let comm = commutator(&gap, probe)?;
            for (col, idx) in panel.indices().iter().enumerate() {
                row[col] = row[col].max(Element::seminorm(&comm, idx, gen));
            }
        }
        p3_decay.push(row);
    }
    let mut p3_ok = true;
    for col in 0..panel.indices().len() {
        for pair in p3_decay.windows(2) {
            if pair[1][col] > pair[0][col] + 1e-15 {
                p3_ok = false;
            }
        }
    }

    let inv = model.h.inverse_diag()?;
    let p4_norm = op_norm(&inv);
    let p4_ok = p4_norm <= 1.0 / (2.0 * (model.delta + 1.0)) * (1.0 + 1e-12);

    let all_ok = p1 && p2_ok && p3_ok && p4_ok && full_commutes;
    Ok(HypothesisReport {
        p1_commuting: p1,
        p2_constants: constants,
        p2_limit,
        p2_ok,
        p3_decay,
        p3_ok,
        p4_norm,
        p4_ok,
        full_commutes,
        all_ok,
    })
}

/// One Picard integral map per cutoff member, sharing the one-power
/// one-grade transport, with constants `c_alpha` from the model.
///
/// Requires a passing hypothesis report.
pub fn cutoff_picard_family<'a>(
    model: &'a CutoffModel,
    x: &'a TruncOp,
    grid: TimeGrid,
    hypotheses: &HypothesisReport,
) -> Result<Family<'a, OpTrajectory>, DynamicsError> {
    if !hypotheses.all_ok {
        return Err(DynamicsError::HypothesesFailed);
    }
    let mut maps = Vec::with_capacity(model.members.len());
    for (i, member) in model.members.iter().enumerate() {
        let c = model.contraction_constant(i)?;
        let rhs_member = member.clone();
        let map = ContractionMap::new(c, IndexTransport::new(1, 1), move |z: &OpTrajectory| {
            let rhs = Rhs::new(
                // the Lipschitz data is carried by the outer constant
                0.5,
                IndexTransport::new(1, 1),
                IndexTransport::new(1, 1),
                |_| 0.0,
                |_t, op: &TruncOp| {
                    commutator(&rhs_member, op)
                        .expect("dimension mismatch")
                        .scale(Complex64::I)
                },
            );
            picard_map(&rhs, x, z).expect("picard map failed on matching grid")
        })?;
        maps.push(map);
    }
    let _ = grid;
    Family::new(model.alphas(), maps).map_err(DynamicsError::from)
}

/// Pairwise check of the strong-Cauchy estimate
/// `||U_a y - U_b y||_delta <= delta ||[H_a - H_b, y]||_delta` per index.
#[derive(Debug, Clone)]
pub struct StrongCauchyBound {
    pub certified: bool,
    /// `(pair, index) -> (lhs, rhs)` worst entries per pair.
    pub worst_margin: f64,
}

pub fn cutoff_strong_cauchy_bound(
    model: &CutoffModel,
    family: &Family<'_, OpTrajectory>,
    y: &OpTrajectory,
    panel: &Panel,
) -> Result<StrongCauchyBound, DynamicsError> {
    let gen = panel.generator();
    let n = family.len();
    let mut worst = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let ui = family.member(i).apply(y);
            let uj = family.member(j).apply(y);
            let diff = Element::sub(&ui, &uj);
            let gap = TruncOp::sub(&model.members[i], &model.members[j])?;
            let grid = y.grid();
            let mut comm_nodes = Vec::with_capacity(grid.n_nodes());
            for k in 0..grid.n_nodes() {
                comm_nodes.push(commutator(&gap, y.value(k))?);
            }
            let comm_traj = OpTrajectory::from_values(grid, comm_nodes)?;
            for idx in panel.indices() {
                let lhs = trajectory_seminorm(&diff, idx, gen);
                let rhs = model.delta * trajectory_seminorm(&comm_traj, idx, gen);
                worst = worst.min(rhs * (1.0 + 1e-9) + 1e-14 - lhs);
            }
        }
    }
    Ok(StrongCauchyBound {
        certified: worst >= 0.0,
        worst_margin: worst,
    })
}

/// Outcome of the cutoff-removal pipeline.
#[derive(Debug, Clone)]
pub struct CutoffRemoval {
    pub net: NetReport<OpTrajectory>,
    /// Per member: max-panel deviation of the Picard fixed point from the
    /// closed cutoff propagator `e^(i H_a t) x e^(-i H_a t)`.
    pub propagator_errors: Vec<f64>,
    /// Max-panel deviation of the net limit from the full-generator
    /// phase oracle.
    pub oracle_error: f64,
}

/// Runs the fixed-point net over the cutoff Picard family from the
/// constant trajectory at `x` and compares against the phase oracles.
pub fn remove_cutoff(
    model: &CutoffModel,
    x: &TruncOp,
    grid: TimeGrid,
    panel: &Panel,
    tol: f64,
    max_iter: usize,
) -> Result<CutoffRemoval, DynamicsError> {
    let hypotheses = verify_p1_p4(model, &[x.clone()], panel)?;
    let family = cutoff_picard_family(model, x, grid, &hypotheses)?;
    let z0 = OpTrajectory::constant(grid, x.clone());
    let net = fixed_point_net(&family, &z0, panel, tol, max_iter)?;

    let mut propagator_errors = Vec::with_capacity(model.members.len());
    for (i, member) in model.members.iter().enumerate() {
        propagator_errors.push(oracle_deviation(&net.fixed_points[i], member, x, panel)?);
    }
    let oracle_error = oracle_deviation(net.limit_fixed_point(), &model.h, x, panel)?;

    Ok(CutoffRemoval {
        net,
        propagator_errors,
        oracle_error,
    })
}

//! Operator-valued initial-value problems as trajectory fixed points.
//!
//! A right-hand side `f(t, x)` with a Lipschitz constant `M < 1/delta` turns
//! the integral map `(Uz)(t) = x0 + int_0^t f(s, z(s)) ds` into a
//! contraction on trajectory space with constant `M * delta`, so the
//! engine in [`crate::contraction`] solves the initial-value problem.
//! Integration uses the composite trapezoid rule on a uniform grid, which
//! is exact for the affine-in-`t` model right-hand sides.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::contraction::{
    iterate_fixed_point, ContractionError, ContractionMap, ConvergenceReport, Element,
};
use crate::fock::{op_norm, FockError, TruncOp};
use crate::seminorm::{self, IndexTransport, Panel, SeminormIndex};

#[derive(Debug, Clone, PartialEq)]
pub enum PicardError {
    /// Grid must have positive length and at least two nodes.
    BadGrid { delta: f64, n_nodes: usize },
    /// Trajectory and initial value dimensions must agree.
    DimMismatch { left: usize, right: usize },
    /// `M * delta` outside (0, 1): the integral map is not contractive.
    ContractionFactor(f64),
    Contraction(ContractionError),
    Fock(FockError),
}

impl fmt::Display for PicardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PicardError::BadGrid { delta, n_nodes } => {
                write!(f, "bad time grid: delta = {delta}, n_nodes = {n_nodes}")
            }
            PicardError::DimMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            PicardError::ContractionFactor(c) => {
                write!(f, "M * delta = {c} outside (0, 1)")
            }
            PicardError::Contraction(e) => write!(f, "{e}"),
            PicardError::Fock(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PicardError {}

impl From<ContractionError> for PicardError {
    fn from(e: ContractionError) -> Self {
        PicardError::Contraction(e)
    }
}

impl From<FockError> for PicardError {
    fn from(e: FockError) -> Self {
        PicardError::Fock(e)
    }
}

/// Uniform partition of `[0, delta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    delta: f64,
    n_nodes: usize,
}

impl TimeGrid {
    pub fn new(delta: f64, n_nodes: usize) -> Result<Self, PicardError> {
        if !(delta > 0.0) || !delta.is_finite() || n_nodes < 2 {
            return Err(PicardError::BadGrid { delta, n_nodes });
        }
        Ok(TimeGrid { delta, n_nodes })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn dt(&self) -> f64 {
        self.delta / (self.n_nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.dt() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.node(i)).collect()
    }
}

/// Operator-valued function sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct OpTrajectory {
    grid: TimeGrid,
    values: Vec<TruncOp>,
}

impl OpTrajectory {
    pub fn from_values(grid: TimeGrid, values: Vec<TruncOp>) -> Result<Self, PicardError> {
        assert_eq!(values.len(), grid.n_nodes(), "one value per node");
        let dim = values[0].dim();
        for v in &values {
            if v.dim() != dim {
                return Err(PicardError::DimMismatch { left: dim, right: v.dim() });
            }
        }
        Ok(OpTrajectory { grid, values })
    }

    /// `z(t) = x` at every node.
    pub fn constant(grid: TimeGrid, x: TruncOp) -> Self {
        let values = alloc::vec![x; grid.n_nodes()];
        OpTrajectory { grid, values }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn value(&self, i: usize) -> &TruncOp {
        &self.values[i]
    }

    pub fn values(&self) -> &[TruncOp] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }
}

/// `sup_t ||z(t)||^(h,k)` over the grid nodes.
///
/// The exact operator norm is only computed at nodes whose
/// `sqrt(||.||_1 ||.||_inf)` bound can still beat the current maximum;
/// for the banded matrices produced by the weighted seminorms this prunes
/// almost every node.
pub fn trajectory_seminorm(traj: &OpTrajectory, idx: &SeminormIndex, gen: &TruncOp) -> f64 {
    let weighted: Vec<TruncOp> = traj
        .values
        .iter()
        .map(|x| seminorm::weighted_matrix(x, idx, gen).expect("seminorm evaluation failed"))
        .collect();
    let mut order: Vec<usize> = (0..weighted.len()).collect();
    let uppers: Vec<f64> = weighted.iter().map(crate::fock::holder_bound).collect();
    order.sort_by(|&a, &b| uppers[b].partial_cmp(&uppers[a]).expect("finite norms"));
    let mut best = 0.0f64;
    for i in order {
        if uppers[i] <= best {
            break;
        }
        best = best.max(op_norm(&weighted[i]));
    }
    best
}

impl Element for OpTrajectory {
    fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.values.len(), other.values.len(), "grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| TruncOp::sub(a, b).expect("dimension mismatch"))
            .collect();
        OpTrajectory { grid: self.grid, values }
    }

    fn zero_like(&self) -> Self {
        OpTrajectory::constant(self.grid, TruncOp::zeros(self.dim()))
    }

    fn seminorm(&self, idx: &SeminormIndex, gen: &TruncOp) -> f64 {
        trajectory_seminorm(self, idx, gen)
    }

    fn seminorm_upper(&self, idx: &SeminormIndex, gen: &TruncOp) -> f64 {
        self.values
            .iter()
            .map(|x| {
                let weighted =
                    seminorm::weighted_matrix(x, idx, gen).expect("seminorm evaluation failed");
                crate::fock::holder_bound(&weighted)
            })
            .fold(0.0, f64::max)
    }
}

/// Right-hand side `f(t, x)` with its admissibility data: the bounding net
/// `d`, the Lipschitz constant `M`, and the two index transports of the
/// bound and Lipschitz conditions.
pub struct Rhs<'a> {
    eval: Box<dyn Fn(f64, &TruncOp) -> TruncOp + 'a>,
    d_net: Box<dyn Fn(&SeminormIndex) -> f64 + 'a>,
    lipschitz: f64,
    bound_transport: IndexTransport,
    lip_transport: IndexTransport,
}

impl<'a> Rhs<'a> {
    pub fn new(
        lipschitz: f64,
        bound_transport: IndexTransport,
        lip_transport: IndexTransport,
        d_net: impl Fn(&SeminormIndex) -> f64 + 'a,
        eval: impl Fn(f64, &TruncOp) -> TruncOp + 'a,
    ) -> Self {
        Rhs {
            eval: Box::new(eval),
            d_net: Box::new(d_net),
            lipschitz,
            bound_transport,
            lip_transport,
        }
    }

    pub fn eval(&self, t: f64, x: &TruncOp) -> TruncOp {
        (self.eval)(t, x)
    }

    /// Net value at the transported index of the bound condition.
    pub fn d(&self, idx: &SeminormIndex) -> f64 {
        (self.d_net)(idx)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn bound_transport(&self) -> IndexTransport {
        self.bound_transport
    }

    pub fn lip_transport(&self) -> IndexTransport {
        self.lip_transport
    }
}

/// `f(t, x) = phi(t) * 1` with `|phi| <= 1`; the net is the seminorm of
/// the identity.
pub fn rhs_scalar_identity<'a>(
    phi: impl Fn(f64) -> Complex64 + 'a,
    delta: f64,
    gen: &TruncOp,
) -> Rhs<'a> {
    let dim = gen.dim();
    let gen = gen.clone();
    let identity = TruncOp::identity(dim);
    Rhs::new(
        0.5 / delta,
        IndexTransport::identity(),
        IndexTransport::identity(),
        move |idx| Element::seminorm(&identity, idx, &gen),
        move |t, x| TruncOp::identity(x.dim()).scale(phi(t)),
    )
}

/// `f(t, x) = phi(t) * X` with `|phi| <= 1/(2 delta)` for a fixed operator.
pub fn rhs_scalar_probe<'a>(
    phi: impl Fn(f64) -> Complex64 + 'a,
    probe: TruncOp,
    delta: f64,
    gen: &TruncOp,
) -> Rhs<'a> {
    let gen = gen.clone();
    let net_probe = probe.clone();
    Rhs::new(
        0.5 / delta,
        IndexTransport::identity(),
        IndexTransport::identity(),
        move |idx| 0.5 / delta * Element::seminorm(&net_probe, idx, &gen),
        move |t, _x| probe.scale(phi(t)),
    )
}

/// `f(t, x) = phi(t) * G^l X` with `|phi| <= 1/(2 delta)`; the bound
/// condition transports the index by the lift `(l, 0)`.
pub fn rhs_lifted_probe<'a>(
    phi: impl Fn(f64) -> Complex64 + 'a,
    l: u32,
    probe: TruncOp,
    delta: f64,
    gen: &TruncOp,
) -> Result<Rhs<'a>, PicardError> {
    let gl = gen.diag_pow(l)?;
    let gen = gen.clone();
    let net_probe = probe.clone();
    Ok(Rhs::new(
        0.5 / delta,
        IndexTransport::new(l, 0),
        IndexTransport::identity(),
        move |idx| 0.5 / delta * Element::seminorm(&net_probe, idx, &gen),
        move |t, _x| gl.matmul(&probe).expect("dimension mismatch").scale(phi(t)),
    ))
}

/// `(Uz)(t) = x0 + int_0^t f(s, z(s)) ds` by cumulative composite trapezoid.
pub fn picard_map(rhs: &Rhs<'_>, x0: &TruncOp, z: &OpTrajectory) -> Result<OpTrajectory, PicardError> {
    if x0.dim() != z.dim() {
        return Err(PicardError::DimMismatch { left: x0.dim(), right: z.dim() });
    }
    let grid = z.grid();
    let dt = grid.dt();
    let evals: Vec<TruncOp> = (0..grid.n_nodes())
        .map(|i| rhs.eval(grid.node(i), z.value(i)))
        .collect();
    let mut values = Vec::with_capacity(grid.n_nodes());
    values.push(x0.clone());
    let mut acc = x0.clone();
    for i in 1..grid.n_nodes() {
        let step = evals[i - 1].add(&evals[i])?.scale(Complex64::new(0.5 * dt, 0.0));
        acc = acc.add(&step)?;
        values.push(acc.clone());
    }
    OpTrajectory::from_values(grid, values)
}

/// Admissibility report: worst margins of the bound and Lipschitz
/// conditions over probes, nodes, and panel indices.
#[derive(Debug, Clone)]
pub struct RhsReport {
    pub bound_certified: bool,
    pub lipschitz_certified: bool,
    /// Min over checks of `d_(h',k') - ||f(t, z(t))||^(h,k)`.
    pub worst_bound_margin: f64,
    /// Min over checks of `M ||x-y||^(h'',k'') - ||f(t,x) - f(t,y)||^(h,k)`.
    pub worst_lipschitz_margin: f64,
}

/// Checks the bound and Lipschitz conditions on the given probe
/// trajectories at every node and panel index.
pub fn verify_rhs(rhs: &Rhs<'_>, probes: &[OpTrajectory], panel: &Panel) -> RhsReport {
    let gen = panel.generator();
    let slack = 1e-12;
    let mut worst_bound = f64::INFINITY;
    let mut worst_lip = f64::INFINITY;
    for probe in probes {
        let grid = probe.grid();
        for i in 0..grid.n_nodes() {
            let t = grid.node(i);
            let fv = rhs.eval(t, probe.value(i));
            for idx in panel.indices() {
                let lhs = Element::seminorm(&fv, idx, gen);
                let bound = rhs.d(&rhs.bound_transport().apply(idx));
                worst_bound = worst_bound.min(bound - lhs);
            }
        }
    }
    for pair in probes.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let grid = a.grid();
        for i in 0..grid.n_nodes() {
            let t = grid.node(i);
            let fa = rhs.eval(t, a.value(i));
            let fb = rhs.eval(t, b.value(i));
            let df = TruncOp::sub(&fa, &fb).expect("dimension mismatch");
            let dx = TruncOp::sub(a.value(i), b.value(i)).expect("dimension mismatch");
            for idx in panel.indices() {
                let lhs = Element::seminorm(&df, idx, gen);
                let rhs_val =
                    rhs.lipschitz() * Element::seminorm(&dx, &rhs.lip_transport().apply(idx), gen);
                worst_lip = worst_lip.min(rhs_val - lhs);
            }
        }
    }
    RhsReport {
        bound_certified: worst_bound >= -slack,
        lipschitz_certified: worst_lip >= -slack,
        worst_bound_margin: worst_bound,
        worst_lipschitz_margin: worst_lip,
    }
}

/// `||f(t, x0)||^(h,k) <= l_prime` at every node and index: then the
/// constant trajectory at `x0` is admissible with `L = l_prime * delta`.
pub fn start_certificate(
    rhs: &Rhs<'_>,
    x0: &TruncOp,
    grid: TimeGrid,
    panel: &Panel,
    l_prime: f64,
) -> bool {
    let gen = panel.generator();
    for i in 0..grid.n_nodes() {
        let fv = rhs.eval(grid.node(i), x0);
        for idx in panel.indices() {
            if Element::seminorm(&fv, idx, gen) > l_prime * (1.0 + 1e-12) {
                return false;
            }
        }
    }
    true
}

/// Solves the initial-value problem by iterating the integral map from the
/// constant trajectory at `x0`.
pub fn solve_ivp(
    rhs: &Rhs<'_>,
    x0: &TruncOp,
    grid: TimeGrid,
    panel: &Panel,
    tol: f64,
    max_iter: usize,
) -> Result<(OpTrajectory, ConvergenceReport), PicardError> {
    let c = rhs.lipschitz() * grid.delta();
    if !(c > 0.0 && c < 1.0) {
        return Err(PicardError::ContractionFactor(c));
    }
    let map = ContractionMap::new(c, rhs.lip_transport(), |z: &OpTrajectory| {
        picard_map(rhs, x0, z).expect("picard map failed on matching grid")
    })?;
    let z0 = OpTrajectory::constant(grid, x0.clone());
    let (traj, report) = iterate_fixed_point(&map, &z0, panel, tol, max_iter)?;
    Ok((traj, report))
}

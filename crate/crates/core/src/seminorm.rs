//! Weight functions, graded seminorm indices, and panel evaluation.
//!
//! A [`Weight`] is `f(x) = s * x^i * exp(-p x)` on `x >= 0`. The family is
//! closed under the lifts `h -> x^i h(x)` that every transport in the crate
//! uses, every member is positive, bounded, and dominated by any inverse
//! power, and square roots of even-power members stay in the family.
//!
//! A [`SeminormIndex`] pairs a weight with an integer grade `k`; the
//! seminorm of an operator `X` against a diagonal generator `G` is the
//! operator norm of `f(G) X G^k`. A [`Panel`] is a finite ordered list of
//! indices together with the generator, the computable surrogate for a sup
//! over the full index set.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fock::{op_norm, FockError, TruncOp};

#[derive(Debug, Clone, PartialEq)]
pub enum SeminormError {
    /// The generator must be exactly diagonal with nonnegative real entries.
    BadGenerator(String),
    /// `G^k` overflowed at the declared dimension; the panel is inadequate.
    GradeOverflow { grade: u32, entry: f64 },
    /// Spectral-sum form needs distinct generator eigenvalues.
    DegenerateSpectrum { first: usize, second: usize },
    /// Panels must carry at least one index.
    EmptyPanel,
    Fock(FockError),
    /// Weight parameters outside the admissible range.
    BadWeight(String),
}

impl fmt::Display for SeminormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeminormError::BadGenerator(msg) => write!(f, "bad generator: {msg}"),
            SeminormError::GradeOverflow { grade, entry } => {
                write!(f, "generator power overflow at grade {grade} (entry {entry})")
            }
            SeminormError::DegenerateSpectrum { first, second } => {
                write!(f, "degenerate generator spectrum at {first}, {second}")
            }
            SeminormError::EmptyPanel => write!(f, "panel has no indices"),
            SeminormError::Fock(e) => write!(f, "{e}"),
            SeminormError::BadWeight(msg) => write!(f, "bad weight: {msg}"),
        }
    }
}

impl core::error::Error for SeminormError {}

impl From<FockError> for SeminormError {
    fn from(e: FockError) -> Self {
        SeminormError::Fock(e)
    }
}

/// `f(x) = scale * x^power * exp(-rate * x)` on `x >= 0`.
///
/// `scale = 0` encodes the zero weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    rate: f64,
    power: u32,
    scale: f64,
}

impl Weight {
    pub fn new(rate: f64, power: u32, scale: f64) -> Result<Self, SeminormError> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(SeminormError::BadWeight(format!("rate {rate} must be positive")));
        }
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(SeminormError::BadWeight(format!(
                "scale {scale} must be nonnegative"
            )));
        }
        Ok(Weight { rate, power, scale })
    }

    /// `exp(-rate * x)`.
    pub fn exponential(rate: f64) -> Self {
        Weight::new(rate, 0, 1.0).expect("positive rate")
    }

    /// The zero weight.
    pub fn zero() -> Self {
        Weight { rate: 1.0, power: 0, scale: 0.0 }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let mono = if self.power == 0 {
            1.0
        } else {
            libm::pow(x, self.power as f64)
        };
        self.scale * mono * libm::exp(-self.rate * x)
    }

    /// Lift `h -> x^i h(x)`; stays inside the family.
    pub fn lift(&self, i: u32) -> Weight {
        Weight {
            rate: self.rate,
            power: self.power + i,
            scale: self.scale,
        }
    }

    /// Supremum of `f(x) * x^k` over `x >= 0`, by calculus:
    /// `scale * ((i+k)/rate)^(i+k) * e^-(i+k)`, or `scale` when `i+k = 0`.
    pub fn sup_with_grade(&self, k: u32) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let total = (self.power + k) as f64;
        if total == 0.0 {
            return self.scale;
        }
        self.scale * libm::pow(total / self.rate, total) * libm::exp(-total)
    }

    /// Supremum of the weight itself.
    pub fn sup(&self) -> f64 {
        self.sup_with_grade(0)
    }

    /// Square root within the family; only even powers stay exactly inside.
    pub fn sqrt(&self) -> Option<Weight> {
        if self.power % 2 != 0 {
            return None;
        }
        Some(Weight {
            rate: self.rate / 2.0,
            power: self.power / 2,
            scale: libm::sqrt(self.scale),
        })
    }

    /// Short identifier, e.g. `p1_i0_s1`.
    pub fn label(&self) -> String {
        format!("p{}_i{}_s{}", self.rate, self.power, self.scale)
    }
}

/// Restriction to the admissible weight set `C_0`: rescales `w` so its values at the
/// given points are all at most `m`. Returns the scale factor and the
/// rescaled weight; a weight vanishing at every point maps to the zero
/// weight with factor 0.
pub fn c0_rescale(w: &Weight, points: &[f64], m: f64) -> (f64, Weight) {
    assert!(!points.is_empty(), "need at least one point");
    assert!(m > 0.0, "bound m must be positive");
    let max_val = points.iter().map(|&x| w.eval(x)).fold(0.0, f64::max);
    if max_val == 0.0 {
        return (0.0, Weight::zero());
    }
    let factor = m / max_val;
    let scaled = Weight {
        rate: w.rate,
        power: w.power,
        scale: w.scale * factor,
    };
    (factor, scaled)
}

/// A weight plus an integer grade `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormIndex {
    pub weight: Weight,
    pub grade: u32,
}

impl SeminormIndex {
    pub fn new(weight: Weight, grade: u32) -> Self {
        SeminormIndex { weight, grade }
    }

    /// Identifier used in residual tables, e.g. `p1_i0_s1_k2`.
    pub fn label(&self) -> String {
        format!("{}_k{}", self.weight.label(), self.grade)
    }
}

/// Index transport `(w, k) -> (lift(w, power), k + grade)`.
///
/// Every contraction map in the crate moves seminorm indices by a rule of
/// this shape; the identity transport marks strict contractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexTransport {
    pub power: u32,
    pub grade: u32,
}

impl IndexTransport {
    pub fn identity() -> Self {
        IndexTransport { power: 0, grade: 0 }
    }

    pub fn new(power: u32, grade: u32) -> Self {
        IndexTransport { power, grade }
    }

    pub fn is_identity(&self) -> bool {
        self.power == 0 && self.grade == 0
    }

    pub fn apply(&self, idx: &SeminormIndex) -> SeminormIndex {
        SeminormIndex {
            weight: idx.weight.lift(self.power),
            grade: idx.grade + self.grade,
        }
    }
}

/// Finite sampled seminorm family: a diagonal generator plus an ordered,
/// nonempty list of indices.
#[derive(Debug, Clone)]
pub struct Panel {
    generator: TruncOp,
    indices: Vec<SeminormIndex>,
}

impl Panel {
    pub fn new(generator: TruncOp, indices: Vec<SeminormIndex>) -> Result<Self, SeminormError> {
        let diag = generator
            .diagonal()
            .ok_or_else(|| SeminormError::BadGenerator("not diagonal".into()))?;
        for (l, z) in diag.iter().enumerate() {
            if z.im != 0.0 || z.re < 0.0 {
                return Err(SeminormError::BadGenerator(format!(
                    "entry {l} = {z} is not real nonnegative"
                )));
            }
        }
        if indices.is_empty() {
            return Err(SeminormError::EmptyPanel);
        }
        Ok(Panel { generator, indices })
    }

    /// Default panel: pure exponentials with rates 1/2, 1, 2 and grades 0..=3.
    pub fn default_for(generator: TruncOp) -> Result<Self, SeminormError> {
        let mut indices = Vec::new();
        for &rate in &[0.5, 1.0, 2.0] {
            for grade in 0..=3 {
                indices.push(SeminormIndex::new(Weight::exponential(rate), grade));
            }
        }
        Panel::new(generator, indices)
    }

    pub fn generator(&self) -> &TruncOp {
        &self.generator
    }

    pub fn indices(&self) -> &[SeminormIndex] {
        &self.indices
    }

    pub fn contains(&self, idx: &SeminormIndex) -> bool {
        self.indices.iter().any(|i| i == idx)
    }

    /// Panel extended with all transports of its indices up to `depth`
    /// compositions. Indices whose grade would exceed `grade_cap` are
    /// pruned; the count of pruned indices is returned alongside.
    pub fn closed_under(
        &self,
        transport: &IndexTransport,
        depth: u32,
        grade_cap: u32,
    ) -> (Panel, usize) {
        let mut indices = self.indices.clone();
        let mut pruned = 0;
        let mut frontier: Vec<SeminormIndex> = self.indices.clone();
        for _ in 0..depth {
            if transport.is_identity() {
                break;
            }
            let mut next = Vec::new();
            for idx in &frontier {
                let moved = transport.apply(idx);
                if moved.grade > grade_cap {
                    pruned += 1;
                    continue;
                }
                if !indices.iter().any(|i| i == &moved) {
                    indices.push(moved);
                    next.push(moved);
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        (
            Panel {
                generator: self.generator.clone(),
                indices,
            },
            pruned,
        )
    }

    /// True when every index transported once stays in the panel.
    pub fn is_closed_under(&self, transport: &IndexTransport) -> bool {
        self.indices
            .iter()
            .all(|idx| self.contains(&transport.apply(idx)))
    }

    pub fn max_grade(&self) -> u32 {
        self.indices.iter().map(|i| i.grade).max().unwrap_or(0)
    }

    /// Closure modulo pruning: transported indices must be present unless
    /// they fall beyond the panel's maximal grade or lift power (the
    /// pruned tail of a transport chain). A non-identity transport must
    /// hit the panel at least once.
    pub fn is_closed_modulo_pruning(&self, transport: &IndexTransport) -> bool {
        let max_grade = self.max_grade();
        let max_power = self.indices.iter().map(|i| i.weight.power()).max().unwrap_or(0);
        let mut any_hit = transport.is_identity();
        for idx in &self.indices {
            let moved = transport.apply(idx);
            if self.contains(&moved) {
                any_hit = true;
                continue;
            }
            if moved.grade <= max_grade && moved.weight.power() <= max_power {
                return false;
            }
        }
        any_hit
    }
}

fn generator_diag(gen: &TruncOp) -> Result<Vec<f64>, SeminormError> {
    gen.diagonal_real().map_err(SeminormError::from)
}

fn grade_weights(diag: &[f64], grade: u32) -> Result<Vec<f64>, SeminormError> {
    let mut out = Vec::with_capacity(diag.len());
    for &x in diag {
        let v = if grade == 0 { 1.0 } else { libm::pow(x, grade as f64) };
        if !v.is_finite() {
            return Err(SeminormError::GradeOverflow { grade, entry: x });
        }
        out.push(v);
    }
    Ok(out)
}

/// The matrix `f(G) X G^k` whose operator norm is the working-form seminorm.
pub fn weighted_matrix(
    x: &TruncOp,
    idx: &SeminormIndex,
    gen: &TruncOp,
) -> Result<TruncOp, SeminormError> {
    let diag = generator_diag(gen)?;
    let fw: Vec<f64> = diag.iter().map(|&v| idx.weight.eval(v)).collect();
    let gk = grade_weights(&diag, idx.grade)?;
    Ok(x.scale_rows(&fw).scale_cols(&gk))
}

/// Working-form seminorm `||f(G) X G^k||`.
pub fn seminorm(x: &TruncOp, idx: &SeminormIndex, gen: &TruncOp) -> Result<f64, SeminormError> {
    Ok(op_norm(&weighted_matrix(x, idx, gen)?))
}

/// Symmetric form `max(||f(G) X G^k||, ||G^k X f(G)||)`.
pub fn seminorm_max(x: &TruncOp, idx: &SeminormIndex, gen: &TruncOp) -> Result<f64, SeminormError> {
    let diag = generator_diag(gen)?;
    let fw: Vec<f64> = diag.iter().map(|&v| idx.weight.eval(v)).collect();
    let gk = grade_weights(&diag, idx.grade)?;
    let left = op_norm(&x.scale_rows(&fw).scale_cols(&gk));
    let right = op_norm(&x.scale_rows(&gk).scale_cols(&fw));
    Ok(left.max(right))
}

/// Spectral-decomposition form: `sum_{l,s} f(g_l) g_s^k |X_{ls}|`.
///
/// Rank-one projectors make each block norm the entry modulus. Always
/// dominates the working form, generally strictly.
pub fn seminorm_spectral_sum(
    x: &TruncOp,
    idx: &SeminormIndex,
    gen: &TruncOp,
) -> Result<f64, SeminormError> {
    let diag = generator_diag(gen)?;
    for i in 0..diag.len() {
        for j in (i + 1)..diag.len() {
            if diag[i] == diag[j] {
                return Err(SeminormError::DegenerateSpectrum { first: i, second: j });
            }
        }
    }
    let fw: Vec<f64> = diag.iter().map(|&v| idx.weight.eval(v)).collect();
    let gk = grade_weights(&diag, idx.grade)?;
    let d = x.dim();
    let mut sum = 0.0;
    for l in 0..d {
        for s in 0..d {
            sum += fw[l] * gk[s] * x.get(l, s).norm();
        }
    }
    Ok(sum)
}

/// Maximum of the working-form seminorm over the panel.
pub fn sup_seminorm(x: &TruncOp, panel: &Panel) -> Result<f64, SeminormError> {
    let mut best = 0.0f64;
    for idx in panel.indices() {
        best = best.max(seminorm(x, idx, panel.generator())?);
    }
    Ok(best)
}

/// Size of the first discarded weighted band: `f(g_{D-1}) * g_{D-1}^(k+1)`.
///
/// A panel is adequate for a given dimension when every index's margin is
/// below the configured threshold.
pub fn truncation_margin(idx: &SeminormIndex, gen: &TruncOp) -> Result<f64, SeminormError> {
    let diag = generator_diag(gen)?;
    let top = *diag.last().expect("dim >= 2");
    let pow = libm::pow(top, (idx.grade + 1) as f64);
    Ok(idx.weight.eval(top) * pow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_op, spectral_projector, TruncOp};
    use num_complex::Complex64;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn lift_examples() {
        let w = Weight::exponential(1.0);
        assert_eq!(w.lift(0), w);
        let lifted = w.lift(2);
        assert_eq!(lifted.power(), 2);
        assert_eq!(lifted.rate(), 1.0);
        // sup of x^2 e^-x = 4 e^-2
        approx(lifted.sup(), 4.0 * libm::exp(-2.0), 1e-15);
    }

    #[test]
    fn weight_sup_matches_grid_search() {
        // independent oracle: dense grid max of f(x) * x^k
        for (rate, power, grade) in [(1.0, 0u32, 2u32), (0.5, 1, 0), (2.0, 3, 1)] {
            let w = Weight::new(rate, power, 1.3).unwrap();
            let mut grid_max = 0.0f64;
            let mut x = 0.0;
            while x < 200.0 {
                grid_max = grid_max.max(w.eval(x) * libm::pow(x, grade as f64));
                x += 1e-3;
            }
            approx(w.sup_with_grade(grade), grid_max, 1e-9);
        }
    }

    #[test]
    fn weight_decays_beyond_turning_point() {
        // f(x) x^k decreasing past x = (i+k)/p for every tested k
        let w = Weight::new(0.5, 2, 1.0).unwrap();
        for k in 0..5u32 {
            let turn = (w.power() + k) as f64 / w.rate();
            let mut prev = f64::INFINITY;
            let mut x = turn + 0.5;
            while x < turn + 50.0 {
                let v = w.eval(x) * libm::pow(x, k as f64);
                assert!(v < prev);
                prev = v;
                x += 0.5;
            }
        }
    }

    #[test]
    fn seminorm_number_op_examples() {
        let n = number_op(64);
        let idx = SeminormIndex::new(Weight::exponential(1.0), 0);
        // max_l l e^-l = e^-1
        approx(seminorm(&n, &idx, &n).unwrap(), libm::exp(-1.0), 1e-15);

        let zero = TruncOp::zeros(64);
        approx(seminorm(&zero, &idx, &n).unwrap(), 0.0, 0.0);

        let idx2 = SeminormIndex::new(Weight::exponential(1.0), 2);
        let id = TruncOp::identity(64);
        approx(
            seminorm(&id, &idx2, &n).unwrap(),
            4.0 * libm::exp(-2.0),
            1e-15,
        );
    }

    #[test]
    fn spectral_sum_examples() {
        let n = number_op(64);
        let idx = SeminormIndex::new(Weight::exponential(1.0), 0);
        // sum l e^-l = e^-1 / (1 - e^-1)^2, tail at l >= 64 is negligible
        let q = libm::exp(-1.0);
        approx(
            seminorm_spectral_sum(&n, &idx, &n).unwrap(),
            q / ((1.0 - q) * (1.0 - q)),
            1e-12,
        );

        let zero = TruncOp::zeros(64);
        approx(seminorm_spectral_sum(&zero, &idx, &n).unwrap(), 0.0, 0.0);

        let e3 = spectral_projector(&n, 3).unwrap();
        let idx1 = SeminormIndex::new(Weight::exponential(1.0), 1);
        approx(
            seminorm_spectral_sum(&e3, &idx1, &n).unwrap(),
            3.0 * libm::exp(-3.0),
            1e-15,
        );
    }

    #[test]
    fn spectral_sum_rejects_degenerate() {
        let gen = TruncOp::from_diag_real(&[1.0, 1.0, 2.0]);
        let x = TruncOp::identity(3);
        let idx = SeminormIndex::new(Weight::exponential(1.0), 0);
        assert!(matches!(
            seminorm_spectral_sum(&x, &idx, &gen),
            Err(SeminormError::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn sup_seminorm_examples() {
        let n = number_op(64);
        let panel = Panel::new(
            n.clone(),
            alloc::vec![
                SeminormIndex::new(Weight::exponential(1.0), 0),
                SeminormIndex::new(Weight::exponential(1.0), 2),
            ],
        )
        .unwrap();
        let id = TruncOp::identity(64);
        // max(1, 4e^-2) = 1, attained at k=0 on the l=0 eigenvalue
        approx(sup_seminorm(&id, &panel).unwrap(), 1.0, 1e-15);
        approx(sup_seminorm(&TruncOp::zeros(64), &panel).unwrap(), 0.0, 0.0);

        let single = Panel::new(
            n.clone(),
            alloc::vec![SeminormIndex::new(Weight::exponential(1.0), 1)],
        )
        .unwrap();
        let idx = SeminormIndex::new(Weight::exponential(1.0), 1);
        approx(
            sup_seminorm(&n, &single).unwrap(),
            seminorm(&n, &idx, &n).unwrap(),
            0.0,
        );
    }

    #[test]
    fn truncation_margin_examples() {
        let n = number_op(64);
        let idx = SeminormIndex::new(Weight::exponential(1.0), 0);
        approx(
            truncation_margin(&idx, &n).unwrap(),
            63.0 * libm::exp(-63.0),
            1e-36,
        );

        let zero_idx = SeminormIndex::new(Weight::zero(), 0);
        approx(truncation_margin(&zero_idx, &n).unwrap(), 0.0, 0.0);

        let n8 = number_op(8);
        let idx3 = SeminormIndex::new(Weight::exponential(1.0), 3);
        // 7^4 e^-7 ~ 2.19: too large, flags small D
        let margin = truncation_margin(&idx3, &n8).unwrap();
        approx(margin, libm::pow(7.0, 4.0) * libm::exp(-7.0), 1e-12);
        assert!(margin > 1.0);
    }

    #[test]
    fn c0_rescale_examples() {
        let w = Weight::exponential(1.0);
        let (factor, scaled) = c0_rescale(&w, &[0.0, 1.0], 1.0);
        approx(factor, 1.0, 0.0);
        assert_eq!(scaled, w);

        let w2 = Weight::new(1.0, 0, 2.0).unwrap();
        let (factor, scaled) = c0_rescale(&w2, &[0.0], 1.0);
        approx(factor, 0.5, 0.0);
        assert_eq!(scaled, Weight::exponential(1.0));

        let vanishing = Weight::new(1.0, 1, 1.0).unwrap(); // x e^-x, zero at 0
        let (factor, scaled) = c0_rescale(&vanishing, &[0.0], 1.0);
        approx(factor, 0.0, 0.0);
        assert!(scaled.is_zero());
    }

    #[test]
    fn c0_membership_always_holds() {
        let points = [0.0, 0.7, 3.0, 10.0];
        for (rate, power, scale) in [(1.0, 0u32, 3.0), (0.5, 2, 1.0), (2.0, 1, 0.1)] {
            let w = Weight::new(rate, power, scale).unwrap();
            let (_, scaled) = c0_rescale(&w, &points, 1.0);
            for &x in &points {
                assert!(scaled.eval(x) <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn panel_closure() {
        let panel = Panel::default_for(number_op(8)).unwrap();
        let t = IndexTransport::new(1, 1);
        assert!(!panel.is_closed_under(&t));
        let (closed, pruned) = panel.closed_under(&t, 3, 6);
        assert!(closed.is_closed_under(&IndexTransport::identity()));
        assert_eq!(pruned, 0);
        // all transports of the original indices up to the depth are present
        for idx in panel.indices() {
            let mut moved = *idx;
            for _ in 0..3 {
                moved = t.apply(&moved);
                assert!(closed.contains(&moved));
            }
        }
    }

    #[test]
    fn grade_overflow_detected() {
        let gen = TruncOp::from_diag_real(&[1.0, 1e300]);
        let idx = SeminormIndex::new(Weight::exponential(1e-12), 2);
        let x = TruncOp::identity(2);
        assert!(matches!(
            seminorm(&x, &idx, &gen),
            Err(SeminormError::GradeOverflow { .. })
        ));
    }

    #[test]
    fn sqrt_weight_stays_in_family() {
        let w = Weight::new(1.0, 2, 4.0).unwrap();
        let r = w.sqrt().unwrap();
        assert_eq!(r.power(), 1);
        approx(r.rate(), 0.5, 0.0);
        approx(r.scale(), 2.0, 0.0);
        // pointwise: r(x)^2 = w(x)
        for x in [0.0, 0.5, 1.0, 3.0, 10.0] {
            approx(r.eval(x) * r.eval(x), w.eval(x), 1e-12 * w.eval(x).max(1e-30));
        }
        assert!(Weight::new(1.0, 1, 1.0).unwrap().sqrt().is_none());
    }

    #[test]
    fn seminorm_axioms_on_random_operators() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let gen = number_op(12);
        let panel = Panel::default_for(gen.clone()).unwrap();
        for _ in 0..20 {
            let d = 12;
            let rand_op = |rng: &mut rand_chacha::ChaCha8Rng| {
                let entries: alloc::vec::Vec<Complex64> = (0..d * d)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                TruncOp::new(d, entries).unwrap()
            };
            let x = rand_op(&mut rng);
            let y = rand_op(&mut rng);
            let lambda = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            for idx in panel.indices() {
                let nx = seminorm(&x, idx, &gen).unwrap();
                let ny = seminorm(&y, idx, &gen).unwrap();
                let nscaled = seminorm(&x.scale(lambda), idx, &gen).unwrap();
                approx(nscaled, lambda.norm() * nx, 1e-12 * nx.max(1.0));
                let nsum = seminorm(&x.add(&y).unwrap(), idx, &gen).unwrap();
                assert!(nsum <= (nx + ny) * (1.0 + 1e-12));
                // dominance of the spectral sum
                let spectral = seminorm_spectral_sum(&x, idx, &gen).unwrap();
                assert!(nx <= spectral * (1.0 + 1e-12));
                // adjoint symmetry of the max form
                let mx = seminorm_max(&x, idx, &gen).unwrap();
                let madj = seminorm_max(&x.adjoint(), idx, &gen).unwrap();
                approx(mx, madj, 1e-12 * mx.max(1.0));
            }
        }
    }
}

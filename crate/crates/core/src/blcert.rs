//! Explicit construction of admissible start points and their membership
//! certificates.
//!
//! The iteration engine only guarantees geometric convergence from start
//! points whose one-step displacement `sup ||Tx - x||` is at most some
//! `L`. This module builds such elements directly from the spectrum of the
//! generator: on the finite set of eigenvalues with modulus at most one, a
//! coefficient vector with `sum |c_l| <= sqrt(L/m)` yields the diagonal
//! element `X = sum c_l^2 E_l` with `||X||^(w,k) <= m (sum |c_l|)^2 <= L`
//! for every weight bounded by `m` on those eigenvalues.
//!
//! [`certify_start_point`] turns a plain sup-seminorm bound on `x` into a
//! displacement bound: `L >= L1 (1 + c)` when the map fixes zero, plus the
//! displacement `L2` of zero otherwise.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::contraction::{bl_membership, ContractionMap, Element};
use crate::fock::TruncOp;
use crate::seminorm::{c0_rescale, Panel, SeminormIndex};

#[derive(Debug, Clone, PartialEq)]
pub enum BlError {
    /// The generator must be diagonal with real entries.
    NotDiagonal,
    /// Need one coefficient per eligible index.
    CoeffCountMismatch { expected: usize, got: usize },
    /// `sum |c_l| <= sqrt(L/m)` violated.
    CoefficientSumBound { sum: f64, allowed: f64 },
    /// `m` and `L` must be positive.
    BadBounds,
}

impl fmt::Display for BlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlError::NotDiagonal => write!(f, "generator is not diagonal"),
            BlError::CoeffCountMismatch { expected, got } => {
                write!(f, "expected {expected} coefficients, got {got}")
            }
            BlError::CoefficientSumBound { sum, allowed } => {
                write!(f, "coefficient sum {sum} exceeds sqrt(L/m) = {allowed}")
            }
            BlError::BadBounds => write!(f, "m and L must be positive"),
        }
    }
}

impl core::error::Error for BlError {}

/// Indices of generator eigenvalues with modulus at most one. Returns the
/// (possibly empty) index set; an empty set means the construction below
/// has no room to work with.
pub fn eligible_indices(gen: &TruncOp) -> Result<Vec<usize>, BlError> {
    let diag = gen.diagonal().ok_or(BlError::NotDiagonal)?;
    Ok(diag
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() <= 1.0)
        .map(|(i, _)| i)
        .collect())
}

/// Validated input for the explicit construction: a diagonal generator,
/// one complex coefficient per eligible eigenvalue, and the bounds `m`
/// (weight cap on the eligible spectrum) and `L` (target displacement).
#[derive(Debug, Clone)]
pub struct BlRecipe {
    generator: TruncOp,
    eligible: Vec<usize>,
    coeffs: Vec<Complex64>,
    m: f64,
    l: f64,
}

impl BlRecipe {
    /// Checks eligibility and the coefficient-sum bound
    /// `sum |c_l| <= sqrt(L/m)`.
    pub fn new(
        generator: TruncOp,
        coeffs: Vec<Complex64>,
        m: f64,
        l: f64,
    ) -> Result<Self, BlError> {
        if !(m > 0.0 && l > 0.0) {
            return Err(BlError::BadBounds);
        }
        let eligible = eligible_indices(&generator)?;
        if coeffs.len() != eligible.len() {
            return Err(BlError::CoeffCountMismatch {
                expected: eligible.len(),
                got: coeffs.len(),
            });
        }
        let sum: f64 = coeffs.iter().map(|c| c.norm()).sum();
        let allowed = libm::sqrt(l / m);
        if sum > allowed * (1.0 + 1e-12) {
            return Err(BlError::CoefficientSumBound { sum, allowed });
        }
        Ok(BlRecipe {
            generator,
            eligible,
            coeffs,
            m,
            l,
        })
    }

    pub fn eligible(&self) -> &[usize] {
        &self.eligible
    }

    pub fn coeff_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn l(&self) -> f64 {
        self.l
    }
}

/// Per-index outcome of the construction certificate.
#[derive(Debug, Clone)]
pub struct IndexCertificate {
    pub index_label: String,
    /// Factor applied to pull the weight under `m` on the eligible
    /// spectrum; 1 when the weight already qualified.
    pub rescale_factor: f64,
    /// Seminorm of the constructed element at the (rescaled) index.
    pub value: f64,
    /// `m (sum |c_l|)^2`, the guaranteed cap.
    pub bound: f64,
}

/// The constructed element together with its per-index certificates.
#[derive(Debug, Clone)]
pub struct BlConstruction {
    pub element: TruncOp,
    pub certificates: Vec<IndexCertificate>,
    /// All certified values sit below the cap, and the cap below `L`.
    pub certified: bool,
}

/// Builds `X = sum c_l^2 E_l` on the eligible indices and certifies
/// `||X||^(w,k) <= m (sum |c_l|)^2 <= L` on every panel index, rescaling
/// weights that exceed `m` on the eligible spectrum.
pub fn construct_bl_element(recipe: &BlRecipe, panel: &Panel) -> BlConstruction {
    let dim = recipe.generator.dim();
    let mut element = TruncOp::zeros(dim);
    for (pos, &l) in recipe.eligible.iter().enumerate() {
        let c = recipe.coeffs[pos];
        element.set(l, l, c * c);
    }

    let diag = recipe
        .generator
        .diagonal_real()
        .expect("recipe generator is diagonal");
    let points: Vec<f64> = recipe.eligible.iter().map(|&l| diag[l]).collect();
    let sum = recipe.coeff_sum();
    let bound = recipe.m * sum * sum;

    let mut certificates = Vec::with_capacity(panel.indices().len());
    let mut certified = bound <= recipe.l * (1.0 + 1e-12);
    for idx in panel.indices() {
        let max_on_eligible = points.iter().map(|&x| idx.weight.eval(x)).fold(0.0, f64::max);
        let (factor, weight) = if max_on_eligible <= recipe.m {
            (1.0, idx.weight)
        } else {
            c0_rescale(&idx.weight, &points, recipe.m)
        };
        let scaled_idx = SeminormIndex::new(weight, idx.grade);
        let value = Element::seminorm(&element, &scaled_idx, &recipe.generator);
        if value > bound * (1.0 + 1e-12) {
            certified = false;
        }
        certificates.push(IndexCertificate {
            index_label: idx.label(),
            rescale_factor: factor,
            value,
            bound,
        });
    }

    BlConstruction {
        element,
        certificates,
        certified,
    }
}

/// Displacement certificate for a start point obtained from a plain
/// sup-seminorm bound.
#[derive(Debug, Clone)]
pub struct StartCertificate {
    /// `L1 = sup-panel ||x||`.
    pub l1: f64,
    /// `L2 = sup-panel ||T 0||` (zero for maps fixing zero).
    pub l2: f64,
    /// The smallest certified displacement bound `L1 (1 + c) + L2`.
    pub min_l: f64,
    /// `L >= min_l` held for the requested `L`.
    pub certified: bool,
    /// Direct evaluation of `sup ||Tx - x|| <= L` agrees.
    pub direct_check: bool,
}

/// Certifies `sup ||Tx - x|| <= L` from `sup ||x|| <= L1`: a weak
/// contraction moves `x` by at most `c L1 + L1` when it fixes zero, plus
/// the displacement of zero otherwise. Cross-checks the conclusion by
/// direct evaluation.
pub fn certify_start_point(
    x: &TruncOp,
    map: &ContractionMap<'_, TruncOp>,
    panel: &Panel,
    l: f64,
) -> StartCertificate {
    let l1 = Element::sup_seminorm(x, panel);
    let zero = TruncOp::zeros(x.dim());
    let l2 = Element::sup_seminorm(&map.apply(&zero), panel);
    let min_l = l1 * (1.0 + map.constant()) + l2;
    let certified = l >= min_l * (1.0 - 1e-12);
    let direct_check = bl_membership(x, map, panel, l * (1.0 + 1e-12));
    StartCertificate {
        l1,
        l2,
        min_l,
        certified,
        direct_check,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::sandwich_map;
    use crate::fock::{number_op, shifted_hamiltonian};
    use crate::seminorm::{Panel, SeminormIndex, Weight};
    use std::vec::Vec;

    fn fifth_number_op(dim: usize) -> TruncOp {
        number_op(dim).scale(Complex64::new(0.2, 0.0))
    }

    #[test]
    fn eligibility_examples() {
        // eigenvalues 0, 0.2, ..., 1.0 qualify; 1.2 does not
        let gen = fifth_number_op(64);
        assert_eq!(eligible_indices(&gen).unwrap(), std::vec![0, 1, 2, 3, 4, 5]);
        // spectrum starting at 4: nothing qualifies
        let shifted = shifted_hamiltonian(16, 4.0);
        assert!(eligible_indices(&shifted).unwrap().is_empty());
        // entries 0, 1, 2: the first two qualify
        assert_eq!(eligible_indices(&number_op(3)).unwrap(), std::vec![0, 1]);
    }

    #[test]
    fn recipe_validates_sum_bound() {
        let gen = fifth_number_op(16);
        let sixth = Complex64::new(1.0 / 6.0, 0.0);
        assert!(BlRecipe::new(gen.clone(), std::vec![sixth; 6], 1.0, 1.0).is_ok());
        // seven coefficients for six eligible indices
        let err = BlRecipe::new(gen.clone(), std::vec![sixth; 7], 1.0, 1.0).unwrap_err();
        assert!(matches!(err, BlError::CoeffCountMismatch { expected: 6, got: 7 }));
        // sum 1.2 > sqrt(1/1)
        let big = Complex64::new(0.2, 0.0);
        let err = BlRecipe::new(gen, std::vec![big; 6], 1.0, 1.0).unwrap_err();
        assert!(matches!(err, BlError::CoefficientSumBound { .. }));
    }

    fn c0_panel(gen: TruncOp) -> Panel {
        let mut indices = Vec::new();
        for &rate in &[0.5, 1.0, 2.0] {
            for grade in 0..=3 {
                indices.push(SeminormIndex::new(Weight::exponential(rate), grade));
            }
        }
        Panel::new(gen, indices).unwrap()
    }

    #[test]
    fn six_projector_element_certified() {
        let gen = fifth_number_op(64);
        let panel = c0_panel(gen.clone());
        let sixth = Complex64::new(1.0 / 6.0, 0.0);
        let recipe = BlRecipe::new(gen.clone(), std::vec![sixth; 6], 1.0, 1.0).unwrap();
        let built = construct_bl_element(&recipe, &panel);
        assert!(built.certified);
        // X = (1/36) sum of the first six projectors
        for l in 0..6 {
            let got = built.element.get(l, l);
            assert!((got - Complex64::new(1.0 / 36.0, 0.0)).norm() <= 1e-15);
        }
        assert!(built.element.get(6, 6).norm() == 0.0);
        for cert in &built.certificates {
            assert!(cert.value <= cert.bound * (1.0 + 1e-12), "{cert:?}");
            assert!(cert.bound <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn single_coefficient_saturates() {
        // one eligible eigenvalue: c_0 = sqrt(L/m) puts all weight on E_0
        let gen = number_op(8); // only l = 0, 1 eligible
        let panel = c0_panel(gen.clone());
        let recipe =
            BlRecipe::new(gen, std::vec![Complex64::ONE, Complex64::ZERO], 1.0, 1.0).unwrap();
        let built = construct_bl_element(&recipe, &panel);
        assert!(built.certified);
        // zero coefficients: the zero operator, certified trivially
        let gen = fifth_number_op(16);
        let panel = c0_panel(gen.clone());
        let recipe =
            BlRecipe::new(gen, std::vec![Complex64::ZERO; 6], 1.0, 1.0).unwrap();
        let built = construct_bl_element(&recipe, &panel);
        assert!(built.certified);
        assert_eq!(built.element, TruncOp::zeros(16));
    }

    #[test]
    fn weights_above_m_get_rescaled() {
        // a weight with value > 1 on the eligible spectrum must be pulled
        // down, and the certificate still closes
        let gen = fifth_number_op(32);
        let hot = Weight::new(0.1, 0, 50.0).unwrap(); // ~50 e^(-0.1 x) near 0
        let panel = Panel::new(
            gen.clone(),
            std::vec![SeminormIndex::new(hot, 0), SeminormIndex::new(hot, 2)],
        )
        .unwrap();
        let sixth = Complex64::new(1.0 / 6.0, 0.0);
        let recipe = BlRecipe::new(gen, std::vec![sixth; 6], 1.0, 1.0).unwrap();
        let built = construct_bl_element(&recipe, &panel);
        assert!(built.certified);
        for cert in &built.certificates {
            assert!(cert.rescale_factor < 1.0, "{cert:?}");
        }
    }

    #[test]
    fn start_certificate_matches_displacement_bound() {
        let gen = fifth_number_op(64);
        let panel = c0_panel(gen.clone());
        let sixth = Complex64::new(1.0 / 6.0, 0.0);
        let recipe = BlRecipe::new(gen.clone(), std::vec![sixth; 6], 1.0, 1.0).unwrap();
        let built = construct_bl_element(&recipe, &panel);

        let map = sandwich_map(Complex64::new(0.5, 0.0), 0, 0, &gen).unwrap();
        let l1 = Element::sup_seminorm(&built.element, &panel);
        let cert = certify_start_point(&built.element, &map, &panel, 1.5 * l1);
        assert!(cert.certified);
        assert!(cert.direct_check);
        assert!((cert.l2).abs() <= 1e-15);
        assert!((cert.min_l - 1.5 * l1).abs() <= 1e-12 * l1);

        // just below the certified threshold the certificate refuses, though
        // the direct displacement (1 - c) L1 = 0.5 L1 still passes
        let tight = certify_start_point(&built.element, &map, &panel, 1.4 * l1);
        assert!(!tight.certified);
        assert!(tight.direct_check);
    }

    #[test]
    fn affine_map_shifts_certificate() {
        let gen = fifth_number_op(32);
        let panel = c0_panel(gen.clone());
        let shift = TruncOp::identity(32).scale(Complex64::new(0.1, 0.0));
        let shift_in_map = shift.clone();
        let map = ContractionMap::new(
            0.5,
            crate::seminorm::IndexTransport::identity(),
            move |x: &TruncOp| {
                x.scale(Complex64::new(0.5, 0.0))
                    .add(&shift_in_map)
                    .expect("dimension match")
            },
        )
        .unwrap();
        let x = TruncOp::zeros(32);
        let probe = certify_start_point(&x, &map, &panel, 1.0);
        assert!(probe.l2 > 0.0);
        assert!((probe.min_l - probe.l2).abs() <= 1e-15);
        // requesting exactly the shifted threshold certifies
        let cert = certify_start_point(&x, &map, &panel, probe.min_l);
        assert!(cert.certified);
        assert!(cert.direct_check);
        // and anything below it does not
        let below = certify_start_point(&x, &map, &panel, 0.9 * probe.min_l);
        assert!(!below.certified);
    }

    #[test]
    fn zero_start_point_always_certified() {
        let gen = fifth_number_op(16);
        let panel = c0_panel(gen.clone());
        let map = sandwich_map(Complex64::new(0.5, 0.0), 1, 1, &gen).unwrap();
        let cert = certify_start_point(&TruncOp::zeros(16), &map, &panel, 1e-9);
        assert!(cert.certified);
        assert!(cert.direct_check);
    }
}

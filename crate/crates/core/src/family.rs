//! Cutoff-indexed families of contractions sharing one index transport.
//!
//! A [`Family`] holds one map per parameter value on a decreasing grid,
//! all with the same transport and constants bounded away from 1. The
//! diagnostics certify uniformity, pairwise strong-Cauchy decay, and
//! commutation, and the fixed-point net runs the engine per member and
//! tabulates pairwise distances toward the small-parameter corner, where
//! the smallest member stands in for the limit map.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::contraction::{
    bl_membership, iterate_fixed_point, verify_contraction, ContractionError, ContractionMap,
    ConvergenceReport, Element,
};
use crate::seminorm::{IndexTransport, Panel};

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyError {
    /// Members disagree on the index transport.
    TransportMismatch { member: usize },
    /// Parameter grid must be strictly decreasing and nonempty.
    BadGrid(String),
    /// Extrapolated limiting constant left (0, 1).
    BadLimitConstant(f64),
    /// Strong-Cauchy certificate required before taking a limit map.
    NotCauchyCertified,
    /// Some members reject the common start point; offenders listed.
    IntersectionFailure { members: Vec<usize> },
    /// A non-strict member where strictness is required.
    NotStrict { member: usize },
    Contraction(ContractionError),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::TransportMismatch { member } => {
                write!(f, "member {member} has a different transport")
            }
            FamilyError::BadGrid(msg) => write!(f, "bad parameter grid: {msg}"),
            FamilyError::BadLimitConstant(c) => {
                write!(f, "extrapolated constant {c} outside (0, 1)")
            }
            FamilyError::NotCauchyCertified => {
                write!(f, "strong-Cauchy certificate missing")
            }
            FamilyError::IntersectionFailure { members } => {
                write!(f, "start point rejected by members {members:?}")
            }
            FamilyError::NotStrict { member } => write!(f, "member {member} is not strict"),
            FamilyError::Contraction(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FamilyError {}

impl From<ContractionError> for FamilyError {
    fn from(e: ContractionError) -> Self {
        FamilyError::Contraction(e)
    }
}

/// Uniform family: decreasing parameter grid, one map per value, shared
/// transport.
pub struct Family<'a, E> {
    alphas: Vec<f64>,
    members: Vec<ContractionMap<'a, E>>,
}

impl<E> fmt::Debug for Family<'_, E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(alphas={:?})", self.alphas)
    }
}

impl<'a, E: Element> Family<'a, E> {
    pub fn new(alphas: Vec<f64>, members: Vec<ContractionMap<'a, E>>) -> Result<Self, FamilyError> {
        if alphas.is_empty() || alphas.len() != members.len() {
            return Err(FamilyError::BadGrid(String::from(
                "grid empty or member count mismatch",
            )));
        }
        for pair in alphas.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(FamilyError::BadGrid(String::from("grid not strictly decreasing")));
            }
        }
        let transport = members[0].transport();
        for (i, m) in members.iter().enumerate() {
            if m.transport() != transport {
                return Err(FamilyError::TransportMismatch { member: i });
            }
        }
        Ok(Family { alphas, members })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &ContractionMap<'a, E> {
        &self.members[i]
    }

    pub fn shared_transport(&self) -> IndexTransport {
        self.members[0].transport()
    }

    pub fn constants(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.constant()).collect()
    }

    /// Limiting constant by Aitken extrapolation on the last three grid
    /// values; falls back to the last value for shorter or stalled grids.
    pub fn limit_constant(&self) -> f64 {
        let cs = self.constants();
        let n = cs.len();
        if n < 3 {
            return cs[n - 1];
        }
        let (c1, c2, c3) = (cs[n - 3], cs[n - 2], cs[n - 1]);
        let denom = (c3 - c2) - (c2 - c1);
        if denom.abs() < 1e-14 {
            return c3;
        }
        c3 - (c3 - c2) * (c3 - c2) / denom
    }

    /// The smallest-parameter member, the computable stand-in for the
    /// limit map. Requires a strong-Cauchy certificate.
    pub fn limit_member(&self, cauchy_certified: bool) -> Result<&ContractionMap<'a, E>, FamilyError> {
        if !cauchy_certified {
            return Err(FamilyError::NotCauchyCertified);
        }
        let c = self.limit_constant();
        if !(c > 0.0 && c < 1.0) {
            return Err(FamilyError::BadLimitConstant(c));
        }
        Ok(self.members.last().expect("nonempty family"))
    }
}

/// Per-member contraction certificates plus composition bounds on words of
/// members.
#[derive(Debug, Clone)]
pub struct UniformReport {
    pub member_reports: Vec<ConvergenceReport>,
    pub word_certified: bool,
    pub worst_word_margin: f64,
    pub certified: bool,
}

/// Verifies each member's contraction inequality and, on the given words
/// of member indices, the composition bound: the constant of a word is the
/// product of member constants with the transport applied once per letter.
pub fn verify_uniform<E: Element>(
    family: &Family<'_, E>,
    samples: &[(E, E)],
    words: &[&[usize]],
    probes: &[E],
    panel: &Panel,
    abs_tol: f64,
) -> Result<UniformReport, FamilyError> {
    let mut member_reports = Vec::with_capacity(family.len());
    for i in 0..family.len() {
        member_reports.push(verify_contraction(family.member(i), samples, panel, abs_tol)?);
    }
    let gen = panel.generator();
    let transport = family.shared_transport();
    let mut worst = f64::INFINITY;
    for word in words {
        for probe in probes {
            let mut image = probe.clone();
            let mut constant = 1.0;
            for &letter in word.iter() {
                image = family.member(letter).apply(&image);
                constant *= family.member(letter).constant();
            }
            for idx in panel.indices() {
                let mut moved = *idx;
                for _ in 0..word.len() {
                    moved = transport.apply(&moved);
                }
                let lhs = image.seminorm(idx, gen);
                let rhs = constant * probe.seminorm(&moved, gen) * (1.0 + 1e-9) + abs_tol;
                worst = worst.min(rhs - lhs);
            }
        }
    }
    let word_certified = worst >= 0.0 || words.is_empty();
    let certified = word_certified && member_reports.iter().all(|r| r.certified);
    Ok(UniformReport {
        member_reports,
        word_certified,
        worst_word_margin: worst,
        certified,
    })
}

/// One pairwise strong-Cauchy entry: distances `||T_a y - T_b y||` per
/// panel index for a probe.
#[derive(Debug, Clone)]
pub struct PairDistance {
    pub probe: usize,
    pub first: usize,
    pub second: usize,
    pub per_index: Vec<f64>,
    pub sup: f64,
}

/// Pairwise distance tables with a tail-decay certificate.
#[derive(Debug, Clone)]
pub struct StrongCauchyReport {
    pub alphas: Vec<f64>,
    pub pairs: Vec<PairDistance>,
    /// `tail_maxima[m]` is the max sup-distance among pairs drawn from the
    /// last `n - m` grid points.
    pub tail_maxima: Vec<f64>,
    pub certified: bool,
}

/// Tabulates `||T_a y - T_b y||` for every grid pair and probe; certifies
/// when the maxima over shrinking tails of the grid never increase.
pub fn verify_strong_cauchy<E: Element>(
    family: &Family<'_, E>,
    probes: &[E],
    panel: &Panel,
) -> StrongCauchyReport {
    let n = family.len();
    let gen = panel.generator();
    let mut pairs = Vec::new();
    for (probe_id, probe) in probes.iter().enumerate() {
        let images: Vec<E> = (0..n).map(|i| family.member(i).apply(probe)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = images[i].sub(&images[j]);
                let per_index = diff.per_index_seminorms(panel);
                let sup = per_index.iter().copied().fold(0.0, f64::max);
                pairs.push(PairDistance {
                    probe: probe_id,
                    first: i,
                    second: j,
                    per_index,
                    sup,
                });
            }
        }
    }
    let mut tail_maxima = Vec::new();
    for start in 0..n.saturating_sub(1) {
        let max = pairs
            .iter()
            .filter(|p| p.first >= start && p.second >= start)
            .map(|p| p.sup)
            .fold(0.0, f64::max);
        tail_maxima.push(max);
    }
    let certified = tail_maxima.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let _ = gen;
    StrongCauchyReport {
        alphas: family.alphas().to_vec(),
        pairs,
        tail_maxima,
        certified,
    }
}

/// Max over probes and member pairs of `sup ||T_a T_b y - T_b T_a y||`,
/// compared against the tolerance.
pub fn verify_commuting<E: Element>(
    family: &Family<'_, E>,
    probes: &[E],
    panel: &Panel,
    tol: f64,
) -> bool {
    let n = family.len();
    for probe in probes {
        for i in 0..n {
            for j in (i + 1)..n {
                let ij = family.member(i).apply(&family.member(j).apply(probe));
                let ji = family.member(j).apply(&family.member(i).apply(probe));
                if ij.sub(&ji).sup_seminorm(panel) > tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Fixed points per member with the pairwise Cauchy-net table.
#[derive(Debug, Clone)]
pub struct NetReport<E> {
    pub alphas: Vec<f64>,
    pub fixed_points: Vec<E>,
    pub member_reports: Vec<ConvergenceReport>,
    /// `pairwise_sup[i][j]` = sup-panel distance of fixed points i and j.
    pub pairwise_sup: Vec<Vec<f64>>,
    /// Max pairwise distance among the last `n - m` members, per `m`.
    pub tail_maxima: Vec<f64>,
    pub certified: bool,
}

impl<E> NetReport<E> {
    /// Fixed point of the smallest-parameter member, the net's limit proxy.
    pub fn limit_fixed_point(&self) -> &E {
        self.fixed_points.last().expect("nonempty net")
    }
}

/// Runs the engine per member from the common start point and certifies
/// that pairwise fixed-point distances decrease toward the small-parameter
/// corner.
///
/// The start point must be admissible for every member (the intersection
/// condition); offenders are reported together. The commutation
/// certificate is the caller's precondition.
pub fn fixed_point_net<E: Element>(
    family: &Family<'_, E>,
    x0: &E,
    panel: &Panel,
    tol: f64,
    max_iter: usize,
) -> Result<NetReport<E>, FamilyError> {
    let n = family.len();
    let mut rejected = Vec::new();
    for i in 0..n {
        let member = family.member(i);
        let bound = member.apply(x0).sub(x0).sup_seminorm(panel);
        if !bl_membership(x0, member, panel, bound * (1.0 + 1e-12) + 1e-300) {
            rejected.push(i);
        }
    }
    if !rejected.is_empty() {
        return Err(FamilyError::IntersectionFailure { members: rejected });
    }

    let mut fixed_points = Vec::with_capacity(n);
    let mut member_reports = Vec::with_capacity(n);
    for i in 0..n {
        let (fp, report) = iterate_fixed_point(family.member(i), x0, panel, tol, max_iter)?;
        fixed_points.push(fp);
        member_reports.push(report);
    }

    let mut pairwise_sup = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = fixed_points[i].sub(&fixed_points[j]).sup_seminorm(panel);
            pairwise_sup[i][j] = d;
            pairwise_sup[j][i] = d;
        }
    }
    let mut tail_maxima = Vec::new();
    for start in 0..n.saturating_sub(1) {
        let mut max = 0.0f64;
        for i in start..n {
            for j in (i + 1)..n {
                max = max.max(pairwise_sup[i][j]);
            }
        }
        tail_maxima.push(max);
    }
    // allow the iteration tolerance as noise floor in the decrease check
    let certified = tail_maxima.windows(2).all(|w| w[1] <= w[0] + 2.0 * tol);

    Ok(NetReport {
        alphas: family.alphas().to_vec(),
        fixed_points,
        member_reports,
        pairwise_sup,
        tail_maxima,
        certified,
    })
}

/// Gap bound for strict families: the distance of a
/// member's fixed point to the limit map's fixed point is controlled by
/// `1/(1 - c_plus)` times the one-step defect at the limit fixed point.
pub fn prop5_gap_bound<E: Element>(
    family: &Family<'_, E>,
    member_idx: usize,
    c_plus: f64,
    limit_map: &ContractionMap<'_, E>,
    limit_fixed: &E,
    member_fixed: &E,
    panel: &Panel,
) -> Result<bool, FamilyError> {
    let member = family.member(member_idx);
    if !member.is_strict() {
        return Err(FamilyError::NotStrict { member: member_idx });
    }
    assert!(c_plus < 1.0, "c_plus must be below 1");
    let gen = panel.generator();
    let defect = member.apply(limit_fixed).sub(&limit_map.apply(limit_fixed));
    let gap = member_fixed.sub(limit_fixed);
    for idx in panel.indices() {
        let lhs = gap.seminorm(idx, gen);
        let rhs = defect.seminorm(idx, gen) / (1.0 - c_plus);
        if lhs > rhs * (1.0 + 1e-9) + 1e-14 {
            return Ok(false);
        }
    }
    Ok(true)
}

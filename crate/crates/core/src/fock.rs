//! Dense operators on the truncated Fock number basis.
//!
//! [`TruncOp`] is a `D x D` complex matrix over the basis `{|0>, ..., |D-1>}`,
//! the finite-dimensional surrogate for an unbounded operator. Unboundedness
//! shows up as growth of diagonal entries; whether the truncation is faithful
//! for a given seminorm is certified by the seminorm module, not here.
//!
//! Besides plain matrix arithmetic this module carries the model operators:
//! the number operator, the ladder pair, shifted and occupation-cutoff
//! Hamiltonians, and rank-one spectral projectors.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Errors from operator construction and arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum FockError {
    /// Two operands have different truncation dimensions.
    DimMismatch { left: usize, right: usize },
    /// An operation required a diagonal operator.
    NotDiagonal,
    /// `inverse_diag` hit a zero diagonal entry.
    ZeroDiagonalEntry { index: usize },
    /// Spectral decomposition requires distinct diagonal entries.
    DegenerateSpectrum { first: usize, second: usize },
    /// A basis index was out of range for the truncation dimension.
    IndexOutOfRange { index: usize, dim: usize },
    /// A matrix entry was NaN or infinite.
    NonFiniteEntry { row: usize, col: usize },
    /// Truncation dimension below the minimum of 2.
    DimTooSmall { dim: usize },
}

impl fmt::Display for FockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FockError::DimMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            FockError::NotDiagonal => write!(f, "operator is not diagonal"),
            FockError::ZeroDiagonalEntry { index } => {
                write!(f, "zero diagonal entry at index {index}")
            }
            FockError::DegenerateSpectrum { first, second } => {
                write!(f, "degenerate spectrum: entries {first} and {second} collide")
            }
            FockError::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            FockError::NonFiniteEntry { row, col } => {
                write!(f, "non-finite entry at ({row}, {col})")
            }
            FockError::DimTooSmall { dim } => {
                write!(f, "truncation dimension {dim} < 2")
            }
        }
    }
}

impl core::error::Error for FockError {}

/// Dense complex matrix on the truncated number basis, row-major.
#[derive(Clone, PartialEq)]
pub struct TruncOp {
    dim: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for TruncOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncOp(dim={})", self.dim)
    }
}

impl TruncOp {
    /// Builds an operator from row-major entries, checking finiteness.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, FockError> {
        if dim < 2 {
            return Err(FockError::DimTooSmall { dim });
        }
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        for (pos, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(FockError::NonFiniteEntry {
                    row: pos / dim,
                    col: pos % dim,
                });
            }
        }
        Ok(TruncOp { dim, entries })
    }

    /// Zero operator. Panics if `dim < 2`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 2, "truncation dimension must be >= 2");
        TruncOp {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    /// Identity operator. Panics if `dim < 2`.
    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for l in 0..dim {
            op.entries[l * dim + l] = Complex64::ONE;
        }
        op
    }

    /// Diagonal operator from the given entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let dim = diag.len();
        let mut op = Self::zeros(dim);
        for (l, &z) in diag.iter().enumerate() {
            op.entries[l * dim + l] = z;
        }
        op
    }

    /// Diagonal operator with real entries.
    pub fn from_diag_real(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut op = Self::zeros(dim);
        for (l, &x) in diag.iter().enumerate() {
            op.entries[l * dim + l] = Complex64::new(x, 0.0);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        for row in 0..self.dim {
            for col in 0..self.dim {
                if row != col && self.entries[row * self.dim + col] != Complex64::ZERO {
                    return false;
                }
            }
        }
        true
    }

    /// Diagonal entries when the operator is exactly diagonal.
    pub fn diagonal(&self) -> Option<Vec<Complex64>> {
        if !self.is_diagonal() {
            return None;
        }
        Some((0..self.dim).map(|l| self.entries[l * self.dim + l]).collect())
    }

    /// Real parts of the diagonal of an exactly diagonal operator.
    pub fn diagonal_real(&self) -> Result<Vec<f64>, FockError> {
        let diag = self.diagonal().ok_or(FockError::NotDiagonal)?;
        Ok(diag.iter().map(|z| z.re).collect())
    }

    fn check_dims(&self, other: &TruncOp) -> Result<(), FockError> {
        if self.dim != other.dim {
            return Err(FockError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncOp) -> Result<TruncOp, FockError> {
        self.check_dims(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TruncOp { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &TruncOp) -> Result<TruncOp, FockError> {
        self.check_dims(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(TruncOp { dim: self.dim, entries })
    }

    pub fn scale(&self, factor: Complex64) -> TruncOp {
        TruncOp {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &TruncOp) -> Result<TruncOp, FockError> {
        self.check_dims(other)?;
        let d = self.dim;
        let mut out = vec![Complex64::ZERO; d * d];
        for row in 0..d {
            for k in 0..d {
                let a = self.entries[row * d + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let rhs_row = &other.entries[k * d..(k + 1) * d];
                let out_row = &mut out[row * d..(row + 1) * d];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(TruncOp { dim: d, entries: out })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> TruncOp {
        let d = self.dim;
        let mut out = vec![Complex64::ZERO; d * d];
        for row in 0..d {
            for col in 0..d {
                out[col * d + row] = self.entries[row * d + col].conj();
            }
        }
        TruncOp { dim: d, entries: out }
    }

    /// Entry-wise inverse of a diagonal operator.
    pub fn inverse_diag(&self) -> Result<TruncOp, FockError> {
        let diag = self.diagonal().ok_or(FockError::NotDiagonal)?;
        let mut inv = Vec::with_capacity(self.dim);
        for (l, z) in diag.iter().enumerate() {
            if z.norm() == 0.0 {
                return Err(FockError::ZeroDiagonalEntry { index: l });
            }
            inv.push(z.inv());
        }
        Ok(TruncOp::from_diag(&inv))
    }

    /// `k`-th power of a diagonal operator.
    pub fn diag_pow(&self, k: u32) -> Result<TruncOp, FockError> {
        let diag = self.diagonal().ok_or(FockError::NotDiagonal)?;
        let powered: Vec<Complex64> = diag.iter().map(|z| z.powu(k)).collect();
        Ok(TruncOp::from_diag(&powered))
    }

    /// Left multiplication by a real diagonal: row `l` scaled by `weights[l]`.
    pub fn scale_rows(&self, weights: &[f64]) -> TruncOp {
        let d = self.dim;
        let mut entries = self.entries.clone();
        for row in 0..d {
            let w = weights[row];
            for e in &mut entries[row * d..(row + 1) * d] {
                *e *= w;
            }
        }
        TruncOp { dim: d, entries }
    }

    /// Right multiplication by a real diagonal: column `s` scaled by `weights[s]`.
    pub fn scale_cols(&self, weights: &[f64]) -> TruncOp {
        let d = self.dim;
        let mut entries = self.entries.clone();
        for row in 0..d {
            for (col, e) in entries[row * d..(row + 1) * d].iter_mut().enumerate() {
                *e *= weights[col];
            }
        }
        TruncOp { dim: d, entries }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let sum: f64 = self.entries.iter().map(|z| z.norm_sqr()).sum();
        libm::sqrt(sum)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|l| self.entries[l * self.dim + l]).sum()
    }

    /// Label for error messages, e.g. "TruncOp(8)".
    pub fn describe(&self) -> String {
        format!("TruncOp({})", self.dim)
    }
}

/// `AB - BA`. A diagonal left operand reduces to the entry-wise form
/// `(a_l - a_s) b_ls`.
pub fn commutator(a: &TruncOp, b: &TruncOp) -> Result<TruncOp, FockError> {
    if a.dim() != b.dim() {
        return Err(FockError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if let Some(diag) = a.diagonal() {
        let d = b.dim();
        let mut out = TruncOp::zeros(d);
        for row in 0..d {
            for col in 0..d {
                out.set(row, col, (diag[row] - diag[col]) * b.get(row, col));
            }
        }
        return Ok(out);
    }
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    ab.sub(&ba)
}

/// Number operator `diag(0, 1, ..., D-1)`.
pub fn number_op(dim: usize) -> TruncOp {
    assert!(dim >= 2, "truncation dimension must be >= 2");
    let diag: Vec<f64> = (0..dim).map(|l| l as f64).collect();
    TruncOp::from_diag_real(&diag)
}

/// Annihilation and creation pair `(a, a^dag)` with `a[l, l+1] = sqrt(l+1)`.
///
/// `a^dag a` equals the number operator exactly; the commutator `[a, a^dag]`
/// equals the identity on the interior block `l <= D-2` and picks up the
/// truncation defect `-(D-1)` at the last diagonal entry.
pub fn ladder_ops(dim: usize) -> (TruncOp, TruncOp) {
    let mut a = TruncOp::zeros(dim);
    for l in 0..dim - 1 {
        a.set(l, l + 1, Complex64::new(libm::sqrt((l + 1) as f64), 0.0));
    }
    let adag = a.adjoint();
    (a, adag)
}

/// `diag(shift, shift+1, ..., shift+D-1)`; `shift = 0` gives the number operator.
pub fn shifted_hamiltonian(dim: usize, shift: f64) -> TruncOp {
    assert!(dim >= 2, "truncation dimension must be >= 2");
    assert!(shift >= 0.0, "shift must be nonnegative");
    let diag: Vec<f64> = (0..dim).map(|l| shift + l as f64).collect();
    TruncOp::from_diag_real(&diag)
}

/// Rank-one spectral projector `|l><l|` of a diagonal operator with
/// nondegenerate entries.
pub fn spectral_projector(diag_op: &TruncOp, l: usize) -> Result<TruncOp, FockError> {
    let diag = diag_op.diagonal().ok_or(FockError::NotDiagonal)?;
    let dim = diag_op.dim();
    if l >= dim {
        return Err(FockError::IndexOutOfRange { index: l, dim });
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            if diag[i] == diag[j] {
                return Err(FockError::DegenerateSpectrum { first: i, second: j });
            }
        }
    }
    let mut proj = TruncOp::zeros(dim);
    proj.set(l, l, Complex64::ONE);
    Ok(proj)
}

/// Occupation-cutoff Hamiltonian: `diag(4, 5, ..., 4+L, 4, 4, ...)`.
///
/// Entries are `4 + l` up to the cutoff index `L` and `4` beyond it, so the
/// whole family is diagonal and mutually commuting.
pub fn cutoff_hamiltonian(dim: usize, cutoff: usize) -> Result<TruncOp, FockError> {
    if cutoff >= dim {
        return Err(FockError::IndexOutOfRange { index: cutoff, dim });
    }
    let diag: Vec<f64> = (0..dim)
        .map(|l| if l <= cutoff { 4.0 + l as f64 } else { 4.0 })
        .collect();
    Ok(TruncOp::from_diag_real(&diag))
}

/// Operator norm: the largest singular value.
///
/// Diagonal operators are handled exactly; for dense matrices the largest
/// eigenvalue of `X^dag X` is computed with cyclic complex Jacobi rotations.
pub fn op_norm(x: &TruncOp) -> f64 {
    if let Some(diag) = x.diagonal() {
        return diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let gram = x.adjoint().matmul(x).expect("square operands");
    let max_eig = max_eig_hermitian(gram);
    libm::sqrt(max_eig.max(0.0))
}

/// `sqrt(max row abs-sum * max column abs-sum)`: a cheap upper bound on
/// the operator norm (Schur test / Holder interpolation between the
/// induced 1- and infinity-norms).
pub fn holder_bound(x: &TruncOp) -> f64 {
    let d = x.dim();
    let mut row_sums = alloc::vec![0.0f64; d];
    let mut col_sums = alloc::vec![0.0f64; d];
    for r in 0..d {
        for c in 0..d {
            let a = x.get(r, c).norm();
            row_sums[r] += a;
            col_sums[c] += a;
        }
    }
    let max_row = row_sums.iter().copied().fold(0.0, f64::max);
    let max_col = col_sums.iter().copied().fold(0.0, f64::max);
    libm::sqrt(max_row * max_col)
}

/// Largest eigenvalue of a Hermitian matrix by cyclic Jacobi sweeps.
fn max_eig_hermitian(mut a: TruncOp) -> f64 {
    let d = a.dim();
    let scale = a.max_abs_entry();
    if scale == 0.0 {
        return 0.0;
    }
    let tol = 1.0e-15 * scale;
    for _sweep in 0..40 {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let z = a.get(p, q);
                let abs_z = z.norm();
                if abs_z <= tol {
                    continue;
                }
                rotated = true;
                let phase = z / abs_z;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // Real Jacobi angle for the phase-stripped 2x2 block.
                let theta = (aqq - app) / (2.0 * abs_z);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                // Unitary U: U[p][p]=c, U[p][q]=s, U[q][p]=-s/phase, U[q][q]=c/phase.
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -s * phase.conj();
                let uqq = c * phase.conj();
                // Columns: A <- A U.
                for row in 0..d {
                    let aip = a.get(row, p);
                    let aiq = a.get(row, q);
                    a.set(row, p, aip * upp + aiq * uqp);
                    a.set(row, q, aip * upq + aiq * uqq);
                }
                // Rows: A <- U^dag A.
                for col in 0..d {
                    let apj = a.get(p, col);
                    let aqj = a.get(q, col);
                    a.set(p, col, upp.conj() * apj + uqp.conj() * aqj);
                    a.set(q, col, upq.conj() * apj + uqq.conj() * aqj);
                }
                // Pin the pivot to exact Hermitian form.
                a.set(p, q, Complex64::ZERO);
                a.set(q, p, Complex64::ZERO);
            }
        }
        if !rotated {
            break;
        }
    }
    (0..d).map(|l| a.get(l, l).re).fold(f64::NEG_INFINITY, f64::max)
}

//! Truncated operators in the number basis `|0⟩, …, |D-1⟩` and the plane-rotator
//! angle operator in the momentum basis `|-m⟩, …, |m⟩`.
//!
//! Closed-form matrices are filled entry by entry; [`phase_function_operator`]
//! is the independent quadrature route that every closed form is checked against.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_2, SQRT_2};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::{hermiticity_defect, ComplexMatrix, PhaseGrid};
use crate::states::eigenfunction_value;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Basis an operator is represented in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Number states `|0⟩ … |D-1⟩`.
    Number(usize),
    /// Rotator momentum states `|-m⟩ … |m⟩`, dimension `2m + 1`.
    Rotator(usize),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Number(d) => d,
            Basis::Rotator(m) => 2 * m + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    matrix: ComplexMatrix,
    basis: Basis,
    label: String,
}

impl TruncatedOperator {
    pub fn new(matrix: ComplexMatrix, basis: Basis, label: impl Into<String>) -> Result<Self> {
        if matrix.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: matrix.dim(),
            });
        }
        Ok(Self {
            matrix,
            basis,
            label: label.into(),
        })
    }

    fn from_entries(entries: DMatrix<Complex64>, basis: Basis, label: &str) -> Result<Self> {
        Self::new(ComplexMatrix::new(entries)?, basis, label)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Matrix element `⟨row|op|col⟩`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.get(row, col)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let m = self.matrix.as_matrix();
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Operator with entry `(row, col)` shifted by `delta`. Intended for fault injection.
    pub fn perturbed(&self, row: usize, col: usize, delta: Complex64) -> Result<Self> {
        if row >= self.dim() || col >= self.dim() {
            return Err(invalid(format!(
                "entry ({row}, {col}) outside a {0}x{0} operator",
                self.dim()
            )));
        }
        let mut m = self.matrix.as_matrix().clone();
        m[(row, col)] += delta;
        Self::from_entries(m, self.basis, &self.label)
    }

    fn combine(
        &self,
        other: &Self,
        label: &str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.basis != other.basis {
            return Err(invalid(format!(
                "basis mismatch: {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        let a = self.matrix.as_matrix();
        let b = other.matrix.as_matrix();
        let m = a.zip_map(b, f);
        Self::from_entries(m, self.basis, label)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let label = format!("({} + {})", self.label, other.label);
        self.combine(other, &label, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let label = format!("({} - {})", self.label, other.label);
        self.combine(other, &label, |x, y| x - y)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis {
            return Err(invalid(format!(
                "basis mismatch: {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        let m = self.matrix.as_matrix() * other.matrix.as_matrix();
        let label = format!("{}·{}", self.label, other.label);
        Self::from_entries(m, self.basis, &label)
    }
}

fn require_dim(d: usize, min: usize, what: &str) -> Result<()> {
    if d < min {
        Err(invalid(format!("{what} needs dimension >= {min}, got {d}")))
    } else {
        Ok(())
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Identity on the first `d` number states.
pub fn identity(d: usize) -> Result<TruncatedOperator> {
    require_dim(d, 1, "identity")?;
    TruncatedOperator::from_entries(DMatrix::identity(d, d), Basis::Number(d), "I")
}

/// `N = diag(0, 1, …, D-1)`.
pub fn number_operator(d: usize) -> Result<TruncatedOperator> {
    require_dim(d, 1, "number operator")?;
    let m = DMatrix::from_fn(d, d, |i, j| if i == j { real(i as f64) } else { ZERO });
    TruncatedOperator::from_entries(m, Basis::Number(d), "N")
}

/// The one-sided shifts `(E, E†)`.
///
/// `E†` lowers (`E†|n⟩ = |n-1⟩`, `E†|0⟩ = 0`) so that `a = E† N^{1/2}`.
/// `E` raises and annihilates the top state `|D-1⟩` under truncation.
pub fn exponential_phase_operators(d: usize) -> Result<(TruncatedOperator, TruncatedOperator)> {
    require_dim(d, 2, "exponential phase operators")?;
    let raise = DMatrix::from_fn(d, d, |i, j| if i == j + 1 { real(1.0) } else { ZERO });
    let lower = DMatrix::from_fn(d, d, |i, j| if j == i + 1 { real(1.0) } else { ZERO });
    Ok((
        TruncatedOperator::from_entries(raise, Basis::Number(d), "E")?,
        TruncatedOperator::from_entries(lower, Basis::Number(d), "E†")?,
    ))
}

/// Carruthers–Nieto `C = (E + E†)/2` and `S = (E - E†)/(2i)`.
pub fn carruthers_nieto(d: usize) -> Result<(TruncatedOperator, TruncatedOperator)> {
    let (e, ed) = exponential_phase_operators(d)?;
    let (e, ed) = (e.matrix().as_matrix(), ed.matrix().as_matrix());
    let c = e.zip_map(ed, |a, b| (a + b) * 0.5);
    // 1/(2i) = -i/2
    let s = e.zip_map(ed, |a, b| (a - b) * Complex64::new(0.0, -0.5));
    Ok((
        TruncatedOperator::from_entries(c, Basis::Number(d), "C")?,
        TruncatedOperator::from_entries(s, Basis::Number(d), "S")?,
    ))
}

/// Closed-form `⟨n|Φ|n'⟩`.
pub fn abs_phase_element(n: usize, np: usize) -> f64 {
    if n == np {
        return FRAC_PI_2;
    }
    if (n + np) % 2 == 0 {
        return 0.0;
    }
    if n == 0 || np == 0 {
        let k = (n + np) as f64;
        return -2.0 * SQRT_2 * FRAC_1_PI / (k * k);
    }
    let sum = (n + np) as f64;
    let diff = n.abs_diff(np) as f64;
    -2.0 * FRAC_1_PI * (1.0 / (sum * sum) + 1.0 / (diff * diff))
}

/// The absolute-phase operator `Φ` truncated to `D` number states.
pub fn abs_phase_operator(d: usize) -> Result<TruncatedOperator> {
    require_dim(d, 1, "absolute phase operator")?;
    let m = DMatrix::from_fn(d, d, |i, j| real(abs_phase_element(i, j)));
    TruncatedOperator::from_entries(m, Basis::Number(d), "Phi")
}

/// `⟨n|f(Φ)|n'⟩ = ∫₀^π f(Φ) u_n(Φ) u_{n'}(Φ) dΦ` evaluated on `grid`.
///
/// Accuracy is governed by the grid: integrands oscillate up to frequency
/// `2(D-1)` plus whatever `f` contributes, so use at least `8·D` nodes for
/// results near machine precision.
pub fn phase_function_operator<F>(f: F, d: usize, grid: &PhaseGrid) -> Result<TruncatedOperator>
where
    F: Fn(f64) -> f64,
{
    require_dim(d, 1, "phase function operator")?;
    let p = grid.len();
    let mut weighted = Vec::with_capacity(p);
    for (k, (phi, w)) in grid.iter().enumerate() {
        let value = f(phi);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                index: k,
                phi,
                value,
            });
        }
        weighted.push(value * w);
    }
    let basis = DMatrix::from_fn(d, p, |n, k| eigenfunction_value(n, grid.nodes()[k]));
    let mut scaled = basis.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= weighted[k];
    }
    let product = scaled * basis.transpose();
    // symmetrize: the two triangles differ only by summation order
    let sym = DMatrix::from_fn(d, d, |i, j| real(0.5 * (product[(i, j)] + product[(j, i)])));
    TruncatedOperator::from_entries(sym, Basis::Number(d), "f(Phi)")
}

/// Closed-form `cos Φ = C + ½(√2 - 1)(|0⟩⟨1| + |1⟩⟨0|)`.
pub fn cos_phase(d: usize) -> Result<TruncatedOperator> {
    require_dim(d, 3, "cos Phi")?;
    let (c, _) = carruthers_nieto(d)?;
    let mut m = c.matrix().as_matrix().clone();
    let corr = 0.5 * (SQRT_2 - 1.0);
    m[(0, 1)] += corr;
    m[(1, 0)] += corr;
    TruncatedOperator::from_entries(m, Basis::Number(d), "cosPhi")
}

/// Closed-form `sin²Φ = S² + ¼(1 - √2)(|0⟩⟨2| + |2⟩⟨0|) + ¼(|0⟩⟨0| - |1⟩⟨1|)`.
///
/// `S²` is the product of the truncated `S` with itself. Truncation spoils the
/// `(D-1, D-1)` entry only: it reads `1/4` where the untruncated operator has `1/2`.
pub fn sin2_phase(d: usize) -> Result<TruncatedOperator> {
    require_dim(d, 3, "sin^2 Phi")?;
    let (_, s) = carruthers_nieto(d)?;
    let mut m = s.mul(&s)?.matrix().as_matrix().clone();
    let corr = 0.25 * (1.0 - SQRT_2);
    m[(0, 2)] += corr;
    m[(2, 0)] += corr;
    m[(0, 0)] += 0.25;
    m[(1, 1)] -= 0.25;
    TruncatedOperator::from_entries(m, Basis::Number(d), "sin2Phi")
}

/// `cos²Φ = I - sin²Φ`, inheriting the `(D-1, D-1)` truncation defect.
pub fn cos2_phase(d: usize) -> Result<TruncatedOperator> {
    let s2 = sin2_phase(d)?;
    let mut out = identity(d)?.sub(&s2)?;
    out.label = "cos2Phi".into();
    Ok(out)
}

/// Garrison–Wong–Galindo angle operator on rotator states `n ∈ {-m, …, m}`:
/// `⟨n|Θ|n'⟩ = i(-1)^{n-n'}/(n-n')` off the diagonal, zero on it.
/// Row/column index `i` holds momentum `n = i - m`.
pub fn gwg_angle_operator(m: usize) -> Result<TruncatedOperator> {
    if m < 1 {
        return Err(invalid("rotator basis needs m >= 1"));
    }
    let dim = 2 * m + 1;
    let entries = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            return ZERO;
        }
        let k = i as i64 - j as i64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, sign / k as f64)
    });
    TruncatedOperator::from_entries(entries, Basis::Rotator(m), "Theta")
}

/// `⟨n|[N, Φ]|n'⟩ = (n - n')⟨n|Φ|n'⟩`, built from the closed form.
pub fn number_phase_commutator(d: usize) -> Result<TruncatedOperator> {
    require_dim(d, 1, "commutator")?;
    let m = DMatrix::from_fn(d, d, |i, j| {
        real((i as f64 - j as f64) * abs_phase_element(i, j))
    });
    TruncatedOperator::from_entries(m, Basis::Number(d), "[N,Phi]")
}

/// Best residual of fitting `[N, Φ]` by `i(I - c·v vᵀ)` with a free complex
/// scalar `c`, minimised over the candidate profiles `v` that a boundary
/// delta term could contribute: `u_n(0)`, `u_n(π)`, all ones and `(-1)^n`.
///
/// A rotator-style relation would make this residual vanish.
pub fn rank_one_commutator_residual(d: usize) -> Result<f64> {
    require_dim(d, 2, "commutator fit")?;
    let k = number_phase_commutator(d)?;
    let k = k.matrix().as_matrix();
    let i = Complex64::i();
    let profiles: [Box<dyn Fn(usize) -> f64>; 4] = [
        Box::new(|n| eigenfunction_value(n, 0.0)),
        Box::new(|n| eigenfunction_value(n, std::f64::consts::PI)),
        Box::new(|_| 1.0),
        Box::new(|n| if n % 2 == 0 { 1.0 } else { -1.0 }),
    ];
    let mut best = f64::INFINITY;
    for v in &profiles {
        let proj = DMatrix::from_fn(d, d, |a, b| v(a) * v(b));
        // K - iI ≈ -i c P  ⇒  least squares c = <-iP, K - iI> / <P, P>
        let mut num = ZERO;
        let mut den = 0.0;
        for a in 0..d {
            for b in 0..d {
                let target = k[(a, b)] - if a == b { i } else { ZERO };
                let basis = -i * proj[(a, b)];
                num += basis.conj() * target;
                den += proj[(a, b)] * proj[(a, b)];
            }
        }
        let c = num / den;
        let mut resid = 0.0_f64;
        for a in 0..d {
            for b in 0..d {
                let model = i * (if a == b { 1.0 } else { 0.0 } - c * proj[(a, b)]);
                resid = resid.max((k[(a, b)] - model).norm());
            }
        }
        best = best.min(resid);
    }
    Ok(best)
}

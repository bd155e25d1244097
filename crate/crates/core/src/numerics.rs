//! Quadrature on the phase interval `[0, π]` and small matrix checks shared
//! by the operator, state and distribution modules.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Quadrature nodes and weights on the open interval `(0, π)`.
///
/// Nodes are strictly increasing and interior, so the endpoint `Φ = 0` is
/// never sampled. Weights are positive and sum to `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: String,
}

impl PhaseGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Iterate over `(node, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Sample `f` at every node.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// Quadrature sum of a real integrand evaluated at the nodes.
    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule with `n_points` nodes, mapped affinely from `[-1, 1]`
/// onto `[0, π]`.
///
/// Nodes are found by Newton iteration on the three-term Legendre recurrence,
/// starting from the Tricomi estimate. Only half the roots are computed; the
/// rest follow from the reflection symmetry `x -> -x`.
pub fn gauss_legendre_grid(n_points: usize) -> Result<PhaseGrid> {
    if n_points < 2 {
        return Err(invalid(format!(
            "Gauss-Legendre grid needs at least 2 points, got {n_points}"
        )));
    }
    let n = n_points;
    let nf = n as f64;
    let half = n / 2;
    // (x in (0, 1), weight) for the positive half, in decreasing x.
    let mut positive = Vec::with_capacity(half);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        positive.push((x, w));
    }

    let mut ref_nodes = Vec::with_capacity(n);
    let mut ref_weights = Vec::with_capacity(n);
    for &(x, w) in &positive {
        ref_nodes.push(-x);
        ref_weights.push(w);
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        ref_nodes.push(0.0);
        ref_weights.push(2.0 / (dp * dp));
    }
    for &(x, w) in positive.iter().rev() {
        ref_nodes.push(x);
        ref_weights.push(w);
    }

    let nodes = ref_nodes.iter().map(|&x| FRAC_PI_2 * (1.0 + x)).collect();
    let weights = ref_weights.iter().map(|&w| FRAC_PI_2 * w).collect();
    Ok(PhaseGrid {
        nodes,
        weights,
        scheme: format!("gauss-legendre-{n}"),
    })
}

/// `(P_n(x), P_n'(x))` via the Bonnet recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = nf * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// `Σ_k w_k · samples[k]`.
pub fn integrate(samples: &[Complex64], grid: &PhaseGrid) -> Result<Complex64> {
    if samples.len() != grid.len() {
        return Err(invalid(format!(
            "sample count {} does not match grid size {}",
            samples.len(),
            grid.len()
        )));
    }
    Ok(samples
        .iter()
        .zip(grid.weights())
        .map(|(s, &w)| s * w)
        .sum())
}

/// Real-valued counterpart of [`integrate`].
pub fn integrate_real(samples: &[f64], grid: &PhaseGrid) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(invalid(format!(
            "sample count {} does not match grid size {}",
            samples.len(),
            grid.len()
        )));
    }
    Ok(samples.iter().zip(grid.weights()).map(|(s, w)| s * w).sum())
}

/// Square matrix of finite complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(invalid(format!(
                "matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        if let Some((idx, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            let value = if v.re.is_finite() { v.im } else { v.re };
            return Err(Error::NonFinite {
                index: idx,
                phi: f64::NAN,
                value,
            });
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Real parts as a real matrix.
    pub fn real_part(&self) -> DMatrix<f64> {
        self.0.map(|z| z.re)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `max_{i,j} |M_ij - conj(M_ji)|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let a = m.as_matrix();
    let d = m.dim();
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

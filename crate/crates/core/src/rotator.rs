//! Plane rotator on the momentum basis `|n⟩`, `n = -m, …, m`, in units with
//! `ħ = 1` and box length `2π`, so that `J_z = diag(n)` and `Θ` is the angle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::distributions::{DistributionSource, PhaseDistribution};
use crate::error::{invalid, Result};
use crate::numerics::{ComplexMatrix, PhaseGrid};
use crate::operators::{gwg_angle_operator, Basis, TruncatedOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotatorBasisSpec {
    m: usize,
}

impl RotatorBasisSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(invalid("rotator basis needs m >= 1"));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m + 1
    }

    /// Momentum quantum number stored at matrix index `i`.
    pub fn momentum(&self, i: usize) -> i64 {
        i as i64 - self.m as i64
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        let i = n + self.m as i64;
        (0..self.dim() as i64).contains(&i).then_some(i as usize)
    }
}

/// `J_z = diag(-m, …, m)`.
pub fn angular_momentum_operator(m: usize) -> Result<TruncatedOperator> {
    let spec = RotatorBasisSpec::new(m)?;
    let d = spec.dim();
    let entries = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(spec.momentum(i) as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    TruncatedOperator::new(ComplexMatrix::new(entries)?, Basis::Rotator(m), "Jz")
}

/// `i(δ_{nn'} - (-1)^{n-n'})`: matrix elements of `i(1 - 2π δ(Θ - π))`.
pub fn periodic_commutator_element(n: i64, np: i64) -> Complex64 {
    let delta = if n == np { 1.0 } else { 0.0 };
    let sign = if (n - np).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    Complex64::new(0.0, delta - sign)
}

/// Largest entrywise deviation of the commutator `[Θ, J_z]`, formed by matrix
/// products, from `i(δ_{nn'} - (-1)^{n-n'})`.
///
/// With `⟨n|Θ|n'⟩ = i(-1)^{n-n'}/(n-n')` the off-diagonal elements of
/// `[J_z, Θ]` are `+i(-1)^{n-n'}`, so the boundary-delta relation appears
/// with the operands in this order.
pub fn rotator_commutator_check(m: usize) -> Result<f64> {
    let spec = RotatorBasisSpec::new(m)?;
    let theta = gwg_angle_operator(m)?;
    let jz = angular_momentum_operator(m)?;
    let comm = theta.mul(&jz)?.sub(&jz.mul(&theta)?)?;
    let mut worst = 0.0_f64;
    for i in 0..spec.dim() {
        for j in 0..spec.dim() {
            let want = periodic_commutator_element(spec.momentum(i), spec.momentum(j));
            worst = worst.max((comm.get(i, j) - want).norm());
        }
    }
    Ok(worst)
}

/// Symmetric quadrature on `(-π, π)` obtained by mirroring a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AngleGrid {
    pub fn from_phase_grid(grid: &PhaseGrid) -> Self {
        let mut nodes: Vec<f64> = grid.nodes().iter().rev().map(|x| -x).collect();
        let mut weights: Vec<f64> = grid.weights().iter().rev().copied().collect();
        nodes.extend_from_slice(grid.nodes());
        weights.extend_from_slice(grid.weights());
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(invalid("sample count does not match angle grid"));
        }
        Ok(samples.iter().zip(&self.weights).map(|(s, w)| s * w).sum())
    }
}

/// `⟨θ|n⟩ = e^{-inθ}/√(2π)`.
pub fn momentum_wavefunction(n: i64, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), -(n as f64) * theta)
}

/// `|⟨n|θ⟩|²` on the given angles; uniform `1/(2π)` for every momentum state.
pub fn rotator_angle_distribution(n: i64, m: usize, angles: &[f64]) -> Result<Vec<f64>> {
    let spec = RotatorBasisSpec::new(m)?;
    if spec.index(n).is_none() {
        return Err(invalid(format!("momentum {n} outside -{m}..={m}")));
    }
    if angles.iter().any(|t| !(*t > -PI && *t <= PI)) {
        return Err(invalid("angles must lie in (-pi, pi]"));
    }
    Ok(angles
        .iter()
        .map(|&t| momentum_wavefunction(n, t).norm_sqr())
        .collect())
}

/// Density of `|θ|` on `(0, π]` for the reflection-even rotator state built
/// from momentum `n`: `|0⟩` for `n = 0`, `(|n⟩ + |-n⟩)/√2` otherwise.
///
/// The density is `|ψ(θ)|² + |ψ(-θ)|²`, evaluated from the complex momentum
/// wavefunctions.
pub fn folded_angle_distribution(n: usize, grid: &PhaseGrid) -> PhaseDistribution {
    let n = n as i64;
    let amplitude = |t: f64| {
        if n == 0 {
            momentum_wavefunction(0, t)
        } else {
            (momentum_wavefunction(n, t) + momentum_wavefunction(-n, t)) / 2.0_f64.sqrt()
        }
    };
    let density = grid.sample(|t| amplitude(t).norm_sqr() + amplitude(-t).norm_sqr());
    PhaseDistribution::from_parts(
        grid.clone(),
        density,
        DistributionSource::FromState(format!("rotator |{n}>+ folded onto |theta|")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::number_state_phase_distribution;
    use crate::numerics::gauss_legendre_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_indexing() {
        let s = RotatorBasisSpec::new(3).unwrap();
        assert_eq!(s.dim(), 7);
        assert_eq!(s.momentum(0), -3);
        assert_eq!(s.index(3), Some(6));
        assert_eq!(s.index(4), None);
        assert!(RotatorBasisSpec::new(0).is_err());
    }

    #[test]
    fn commutator_identity_exact() {
        assert_eq!(rotator_commutator_check(1).unwrap(), 0.0);
        for m in [2, 5, 16] {
            assert!(rotator_commutator_check(m).unwrap() <= 1e-13);
        }
        assert!(rotator_commutator_check(32).unwrap() <= 1e-13);
    }

    #[test]
    fn commutator_diagonal_vanishes() {
        for n in -4..=4 {
            assert_eq!(periodic_commutator_element(n, n), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn reversed_order_flips_sign() {
        let m = 4;
        let spec = RotatorBasisSpec::new(m).unwrap();
        let theta = gwg_angle_operator(m).unwrap();
        let jz = angular_momentum_operator(m).unwrap();
        let comm = jz
            .mul(&theta)
            .unwrap()
            .sub(&theta.mul(&jz).unwrap())
            .unwrap();
        for i in 0..spec.dim() {
            for j in 0..spec.dim() {
                let want = -periodic_commutator_element(spec.momentum(i), spec.momentum(j));
                assert_abs_diff_eq!((comm.get(i, j) - want).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn uniform_angle_distribution() {
        let g = AngleGrid::from_phase_grid(&gauss_legendre_grid(128).unwrap());
        for n in [0, 5, -7] {
            let p = rotator_angle_distribution(n, 8, g.nodes()).unwrap();
            let (lo, hi) = p
                .iter()
                .fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
            assert!(hi - lo <= 1e-15);
            assert_abs_diff_eq!(lo, 1.0 / (2.0 * PI), epsilon = 1e-15);
            assert_abs_diff_eq!(g.integrate(&p).unwrap(), 1.0, epsilon = 1e-10);
        }
        assert!(rotator_angle_distribution(9, 8, &[0.0]).is_err());
        assert!(rotator_angle_distribution(0, 8, &[-PI]).is_err());
    }

    #[test]
    fn folded_distribution_examples() {
        let g = gauss_legendre_grid(256).unwrap();
        let f0 = folded_angle_distribution(0, &g);
        for p in f0.density() {
            assert_abs_diff_eq!(*p, 1.0 / PI, epsilon = 1e-15);
        }
        let single = PhaseGrid::clone(&g);
        let f1 = folded_angle_distribution(1, &single);
        let mid = single
            .nodes()
            .iter()
            .position(|&x| (x - PI / 2.0).abs() < 0.02)
            .unwrap();
        let x = single.nodes()[mid];
        assert_abs_diff_eq!(
            f1.density()[mid],
            2.0 / PI * x.cos().powi(2),
            epsilon = 1e-15
        );
        for n in 0..6 {
            assert_abs_diff_eq!(
                folded_angle_distribution(n, &g).total(),
                1.0,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn folded_matches_absolute_phase_distribution() {
        let g = gauss_legendre_grid(256).unwrap();
        for n in 0..=16 {
            let a = folded_angle_distribution(n, &g);
            let b = number_state_phase_distribution(n, &g);
            for (x, y) in a.density().iter().zip(b.density()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }
}

//! Absolute-phase distributions `P(Φ)` on `(0, π]` and their moments.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::numerics::{integrate_real, PhaseGrid};
use crate::states::FockVector;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSource {
    /// `P_n(Φ)` for the number state `|n⟩`.
    ClosedForm(usize),
    FromState(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    grid: PhaseGrid,
    density: Vec<f64>,
    source: DistributionSource,
}

impl PhaseDistribution {
    pub(crate) fn from_parts(
        grid: PhaseGrid,
        density: Vec<f64>,
        source: DistributionSource,
    ) -> Self {
        debug_assert_eq!(grid.len(), density.len());
        Self {
            grid,
            density,
            source,
        }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn source(&self) -> &DistributionSource {
        &self.source
    }

    /// Quadrature integral of the density.
    pub fn total(&self) -> f64 {
        integrate_real(&self.density, &self.grid).expect("density sampled on its own grid")
    }

    /// `∫ Φ^m P(Φ) dΦ` by quadrature.
    pub fn moment(&self, m: u32) -> f64 {
        self.grid
            .iter()
            .zip(&self.density)
            .map(|((x, w), p)| w * p * x.powi(m as i32))
            .sum()
    }
}

fn number_state_density(n: usize, phi: f64) -> f64 {
    if n == 0 {
        1.0 / PI
    } else {
        (1.0 + (2.0 * n as f64 * phi).cos()) / PI
    }
}

/// `P_0 = 1/π`, `P_n(Φ) = (1/π)(1 + cos 2nΦ)` for `n > 0`.
pub fn number_state_phase_distribution(n: usize, grid: &PhaseGrid) -> PhaseDistribution {
    PhaseDistribution {
        density: grid.sample(|x| number_state_density(n, x)),
        grid: grid.clone(),
        source: DistributionSource::ClosedForm(n),
    }
}

/// `⟨Φ^m⟩_n = (1/π)∫₀^π (1 + cos 2nΦ) Φ^m dΦ`, computed from the closed-form
/// density rather than from powers of the truncated `Φ` matrix.
pub fn phase_moment(n: usize, m: u32, grid: &PhaseGrid) -> f64 {
    grid.integrate_fn(|x| number_state_density(n, x) * x.powi(m as i32))
}

/// Moment of the uniform density `1/π` on `(0, π]`: `π^m/(m+1)`.
pub fn classical_moment(m: u32) -> f64 {
    PI.powi(m as i32) / (m as f64 + 1.0)
}

/// Exact variance of `Φ` in `|n⟩`: `π²/12 + 1/(2n²)`, or `π²/12` for the vacuum.
pub fn phase_variance(n: usize) -> f64 {
    let base = PI * PI / 12.0;
    if n == 0 {
        base
    } else {
        base + 0.5 / (n as f64 * n as f64)
    }
}

/// `|Σ_n c_n u_n(Φ)|²` sampled on the grid.
pub fn state_phase_distribution(state: &FockVector, grid: &PhaseGrid) -> Result<PhaseDistribution> {
    if !state.is_normalizable() {
        return Err(invalid("phase distribution needs a finite-norm state"));
    }
    let density = grid.sample(|x| state.wavefunction(x).norm_sqr());
    Ok(PhaseDistribution {
        grid: grid.clone(),
        density,
        source: DistributionSource::FromState(format!("fock vector, dim {}", state.dim())),
    })
}

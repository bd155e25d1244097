//! Large-field limits: Fourier series for `|θ|` and `|sin θ|`, and coherent-state
//! expectation sweeps in the mean photon number.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::{gauss_legendre_grid, PhaseGrid};
use crate::operators::{
    abs_phase_operator, cos2_phase, cos_phase, phase_function_operator, sin2_phase,
};
use crate::states::{coherent_dimension, coherent_state, expectation, wrap_angle, CoherentParams};

/// Quadrature nodes per basis state used when the caller's grid is too coarse.
pub const NODES_PER_DIM: usize = 8;

/// `π/2 - (4/π) Σ_{s odd ≤ s_max} cos(θs)/s²`, which converges to `|θ|` on `(-π, π]`.
pub fn fourier_abs_theta(theta: f64, s_max: usize) -> Result<f64> {
    if s_max % 2 == 0 {
        return Err(invalid(format!("s_max must be odd, got {s_max}")));
    }
    let sum: f64 = (1..=s_max)
        .rev()
        .step_by(2)
        .map(|s| {
            let s = s as f64;
            (theta * s).cos() / (s * s)
        })
        .sum();
    Ok(PI / 2.0 - 4.0 / PI * sum)
}

/// `2/π - (4/π) Σ_{s even ≤ s_max} cos(θs)/(s² - 1)`, which converges to `|sin θ|`.
pub fn fourier_abs_sin(theta: f64, s_max: usize) -> Result<f64> {
    if s_max == 0 || s_max % 2 == 1 {
        return Err(invalid(format!(
            "s_max must be even and positive, got {s_max}"
        )));
    }
    let sum: f64 = (2..=s_max)
        .rev()
        .step_by(2)
        .map(|s| {
            let s = s as f64;
            (theta * s).cos() / (s * s - 1.0)
        })
        .sum();
    Ok(2.0 / PI - 4.0 / PI * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    AbsPhase,
    SinPhase,
    CosPhase,
    Cos2Phase,
    Sin2Phase,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::AbsPhase,
        Quantity::SinPhase,
        Quantity::CosPhase,
        Quantity::Cos2Phase,
        Quantity::Sin2Phase,
    ];

    /// Classical value the coherent-state expectation approaches for phase `θ`.
    pub fn classical_target(self, theta: f64) -> f64 {
        let t = wrap_angle(theta);
        match self {
            Quantity::AbsPhase => t.abs(),
            Quantity::SinPhase => t.sin().abs(),
            Quantity::CosPhase => t.cos(),
            Quantity::Cos2Phase => t.cos().powi(2),
            Quantity::Sin2Phase => t.sin().powi(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::AbsPhase => "AbsPhase",
            Quantity::SinPhase => "SinPhase",
            Quantity::CosPhase => "CosPhase",
            Quantity::Cos2Phase => "Cos2Phase",
            Quantity::Sin2Phase => "Sin2Phase",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "absphase" | "abs" | "phi" => Ok(Quantity::AbsPhase),
            "sinphase" | "sin" => Ok(Quantity::SinPhase),
            "cosphase" | "cos" => Ok(Quantity::CosPhase),
            "cos2phase" | "cos2" => Ok(Quantity::Cos2Phase),
            "sin2phase" | "sin2" => Ok(Quantity::Sin2Phase),
            _ => Err(invalid(format!("unknown quantity '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n_mean: f64,
    pub value: f64,
    pub target: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub quantity: Quantity,
    pub theta: f64,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// True when `abs_error` never grows along the sweep, except for at most one
    /// step whose increase is below `noise`.
    pub fn error_non_increasing(&self, noise: f64) -> bool {
        let mut inversions = 0;
        for w in self.records.windows(2) {
            let rise = w[1].abs_error - w[0].abs_error;
            if rise > 0.0 {
                if rise >= noise {
                    return false;
                }
                inversions += 1;
            }
        }
        inversions <= 1
    }
}

/// `⟨γ|q(Φ)|γ⟩` for `γ = √N e^{iθ}`, truncated at [`coherent_dimension`].
///
/// `sin Φ` is evaluated with the quadrature operator on `grid`, or on a
/// Gauss–Legendre grid of `NODES_PER_DIM · D` nodes when `grid` is smaller.
pub fn coherent_expectation(
    quantity: Quantity,
    theta: f64,
    n_mean: f64,
    grid: &PhaseGrid,
) -> Result<f64> {
    let params = CoherentParams::new(n_mean, theta)?;
    let d = coherent_dimension(n_mean);
    let state = coherent_state(params, d)?;
    let op = match quantity {
        Quantity::AbsPhase => abs_phase_operator(d)?,
        Quantity::CosPhase => cos_phase(d)?,
        Quantity::Cos2Phase => cos2_phase(d)?,
        Quantity::Sin2Phase => sin2_phase(d)?,
        Quantity::SinPhase => {
            let needed = NODES_PER_DIM * d;
            if grid.len() >= needed {
                phase_function_operator(f64::sin, d, grid)?
            } else {
                phase_function_operator(f64::sin, d, &gauss_legendre_grid(needed)?)?
            }
        }
    };
    Ok(expectation(&op, &state)?.re)
}

/// Expectation of `quantity` in coherent states of phase `theta` for each mean
/// photon number in `n_list`. Cells are evaluated in parallel; records keep
/// the order of `n_list`.
pub fn coherent_sweep(
    quantity: Quantity,
    theta: f64,
    n_list: &[f64],
    grid: &PhaseGrid,
) -> Result<SweepResult> {
    if n_list.is_empty() {
        return Err(invalid("sweep needs at least one mean photon number"));
    }
    if n_list.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(invalid("mean photon numbers must be finite and >= 0"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("mean photon numbers must be strictly increasing"));
    }
    if !theta.is_finite() {
        return Err(invalid("theta must be finite"));
    }
    let target = quantity.classical_target(theta);
    let records = n_list
        .par_iter()
        .map(|&n_mean| {
            let value = coherent_expectation(quantity, theta, n_mean, grid)?;
            Ok(SweepRecord {
                n_mean,
                value,
                target,
                abs_error: (value - target).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        quantity,
        theta,
        records,
    })
}

//! Number eigenfunctions on the phase interval, truncated phase states,
//! coherent states, and expectation values.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::operators::{Basis, TruncatedOperator};

/// Tail probability allowed outside a truncated coherent state.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-9;

/// `u_n(Φ)` without domain checks; callers guarantee `Φ` is a grid node.
#[inline]
pub(crate) fn eigenfunction_value(n: usize, phi: f64) -> f64 {
    if n == 0 {
        1.0 / PI.sqrt()
    } else {
        (2.0 / PI).sqrt() * (n as f64 * phi).cos()
    }
}

fn check_phase(phi: f64) -> Result<()> {
    if phi > 0.0 && phi <= PI {
        Ok(())
    } else {
        Err(invalid(format!("phase {phi} outside (0, pi]")))
    }
}

/// `u_n(Φ) = ⟨Φ|n⟩`: `1/√π` for `n = 0`, `√(2/π) cos(nΦ)` otherwise.
pub fn number_eigenfunction(n: usize, phi: f64) -> Result<f64> {
    check_phase(phi)?;
    Ok(eigenfunction_value(n, phi))
}

/// Coefficients in the number basis together with the probability weight
/// estimated to lie beyond the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coefficients: Vec<Complex64>,
    tail_mass: f64,
    normalizable: bool,
}

impl FockVector {
    /// A finite-norm state with the given tail estimate.
    pub fn new(coefficients: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(invalid("state needs at least one coefficient"));
        }
        if !(tail_mass >= 0.0 && tail_mass.is_finite()) {
            return Err(invalid(format!(
                "tail mass must be finite and >= 0, got {tail_mass}"
            )));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(invalid("state coefficients must be finite"));
        }
        Ok(Self {
            coefficients,
            tail_mass,
            normalizable: true,
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// Estimated weight beyond index `D-1`; `+∞` for delta-normalized states.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_normalizable(&self) -> bool {
        self.normalizable
    }

    /// `Σ |c_n|²` over the retained coefficients.
    pub fn retained_norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_n c_n u_n(Φ)`.
    pub fn wavefunction(&self, phi: f64) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| c * eigenfunction_value(n, phi))
            .sum()
    }
}

/// `|n⟩` in a `D`-dimensional basis.
pub fn number_state(n: usize, d: usize) -> Result<FockVector> {
    if n >= d {
        return Err(invalid(format!(
            "number state {n} does not fit in dimension {d}"
        )));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); d];
    c[n] = Complex64::new(1.0, 0.0);
    FockVector::new(c, 0.0)
}

/// Truncated phase state `|Φ⟩` with coefficients `u_n(Φ)`.
///
/// The untruncated state is delta-normalized, so the result is flagged
/// non-normalizable and only meant for overlaps.
pub fn phase_state(phi: f64, d: usize) -> Result<FockVector> {
    check_phase(phi)?;
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let coefficients = (0..d)
        .map(|n| Complex64::new(eigenfunction_value(n, phi), 0.0))
        .collect();
    Ok(FockVector {
        coefficients,
        tail_mass: f64::INFINITY,
        normalizable: false,
    })
}

/// `γ = √N e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentParams {
    n_mean: f64,
    theta: f64,
}

impl CoherentParams {
    /// `theta` is wrapped into `(-π, π]`.
    pub fn new(n_mean: f64, theta: f64) -> Result<Self> {
        if !(n_mean >= 0.0 && n_mean.is_finite()) {
            return Err(invalid(format!(
                "mean photon number must be finite and >= 0, got {n_mean}"
            )));
        }
        if !theta.is_finite() {
            return Err(invalid("theta must be finite"));
        }
        Ok(Self {
            n_mean,
            theta: wrap_angle(theta),
        })
    }

    pub fn n_mean(&self) -> f64 {
        self.n_mean
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(self.n_mean.sqrt(), self.theta)
    }
}

/// Map an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Truncation rule for coherent states: `ceil(N + 12√N + 20)`.
pub fn coherent_dimension(n_mean: f64) -> usize {
    (n_mean + 12.0 * n_mean.sqrt() + 20.0).ceil() as usize
}

fn log_poisson(n: usize, n_mean: f64) -> f64 {
    if n_mean == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * n_mean.ln() - ln_gamma(n as f64 + 1.0) - n_mean
}

/// `Σ_{n ≥ d} Poisson(n; N)`, summed directly until the terms are negligible.
pub(crate) fn poisson_tail(d: usize, n_mean: f64) -> f64 {
    if n_mean == 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    let mut total = 0.0;
    let mut n = d;
    loop {
        let term = log_poisson(n, n_mean).exp();
        total += term;
        if n as f64 > n_mean && term <= 1e-20 * total.max(1e-300) {
            break;
        }
        n += 1;
    }
    total
}

/// Smallest dimension whose Poisson tail is below [`COHERENT_TAIL_LIMIT`].
pub fn minimal_coherent_dimension(n_mean: f64) -> usize {
    let mut d = coherent_dimension(n_mean);
    while d > 1 && poisson_tail(d - 1, n_mean) < COHERENT_TAIL_LIMIT {
        d -= 1;
    }
    while poisson_tail(d, n_mean) >= COHERENT_TAIL_LIMIT {
        d += 1;
    }
    d
}

/// `c_n = e^{-N/2} γⁿ/√(n!)` for `n < D`.
///
/// Moduli come from `exp(n ln|γ| - ½ lnΓ(n+1) - N/2)`; the phase `e^{inθ}` is
/// applied separately. Fails when the Poisson tail beyond `D-1` reaches
/// [`COHERENT_TAIL_LIMIT`].
pub fn coherent_state(params: CoherentParams, d: usize) -> Result<FockVector> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let n_mean = params.n_mean;
    let tail = poisson_tail(d, n_mean);
    if tail >= COHERENT_TAIL_LIMIT {
        return Err(Error::InsufficientDimension {
            dim: d,
            tail_mass: tail,
            limit: COHERENT_TAIL_LIMIT,
            required: minimal_coherent_dimension(n_mean),
        });
    }
    let coefficients = (0..d)
        .map(|n| {
            let modulus = (0.5 * log_poisson(n, n_mean)).exp();
            Complex64::from_polar(modulus, n as f64 * params.theta)
        })
        .collect();
    FockVector::new(coefficients, tail)
}

/// `⟨ψ|A|ψ⟩` for a number-basis operator and a finite-norm state.
pub fn expectation(op: &TruncatedOperator, state: &FockVector) -> Result<Complex64> {
    if !matches!(op.basis(), Basis::Number(_)) {
        return Err(invalid(format!(
            "operator {} is not in the number basis",
            op.label()
        )));
    }
    if op.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: state.dim(),
        });
    }
    if !state.is_normalizable() {
        return Err(invalid("expectation requires a finite-norm state"));
    }
    let a = op.matrix().as_matrix();
    let c = state.coefficients();
    let mut total = Complex64::new(0.0, 0.0);
    for (j, cj) in c.iter().enumerate() {
        if *cj == Complex64::new(0.0, 0.0) {
            continue;
        }
        let col: Complex64 = a
            .column(j)
            .iter()
            .zip(c)
            .map(|(aij, ci)| ci.conj() * aij)
            .sum();
        total += col * cj;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_legendre_grid;
    use crate::operators::{abs_phase_operator, identity, number_operator};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn eigenfunction_values() {
        assert_abs_diff_eq!(
            number_eigenfunction(0, 1.3).unwrap(),
            0.564190,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            number_eigenfunction(2, PI / 2.0).unwrap(),
            -(2.0 / PI).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            number_eigenfunction(1, PI / 2.0).unwrap(),
            0.0,
            epsilon = 1e-16
        );
        assert!(number_eigenfunction(1, 0.0).is_err());
        assert!(number_eigenfunction(1, -0.1).is_err());
        assert!(number_eigenfunction(1, 3.2).is_err());
        assert!(number_eigenfunction(1, PI).is_ok());
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let g = gauss_legendre_grid(512).unwrap();
        for n in 0..=32 {
            for m in 0..=32 {
                let v = g.integrate_fn(|x| eigenfunction_value(n, x) * eigenfunction_value(m, x));
                let want = if n == m { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn phase_state_coefficients() {
        let s = phase_state(PI, 4).unwrap();
        let a = 1.0 / PI.sqrt();
        let b = (2.0 / PI).sqrt();
        let want = [a, -b, b, -b];
        for (c, w) in s.coefficients().iter().zip(want) {
            assert_abs_diff_eq!(c.re, w, epsilon = 1e-15);
        }
        assert!(!s.is_normalizable());
        assert!(s.tail_mass().is_infinite());
        let s = phase_state(0.7, 3).unwrap();
        assert_abs_diff_eq!(s.coefficients()[0].norm_sqr(), 1.0 / PI, epsilon = 1e-15);
        assert!(phase_state(0.0, 3).is_err());
        assert!(expectation(&identity(3).unwrap(), &s).is_err());
    }

    #[test]
    fn phase_state_overlaps_resolve_identity() {
        let g = gauss_legendre_grid(256).unwrap();
        let states: Vec<_> = g
            .nodes()
            .iter()
            .map(|&x| phase_state(x, 8).unwrap())
            .collect();
        for n in 0..8 {
            for m in 0..8 {
                let v: f64 = states
                    .iter()
                    .zip(g.weights())
                    .map(|(s, w)| w * (s.coefficients()[n] * s.coefficients()[m].conj()).re)
                    .sum();
                assert_abs_diff_eq!(v, if n == m { 1.0 } else { 0.0 }, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn vacuum() {
        let s = coherent_state(CoherentParams::new(0.0, 0.4).unwrap(), 5).unwrap();
        assert_eq!(s.coefficients()[0], Complex64::new(1.0, 0.0));
        assert!(s.coefficients()[1..].iter().all(|c| c.norm() == 0.0));
        let n = expectation(&number_operator(5).unwrap(), &s).unwrap();
        assert_eq!(n.norm(), 0.0);
    }

    #[test]
    fn poisson_statistics() {
        let s = coherent_state(CoherentParams::new(4.0, 0.0).unwrap(), 40).unwrap();
        assert!(s.retained_norm_sqr() >= 1.0 - 1e-12);
        // direct Poisson(4) pmf via running product 4^n/n!
        let mut pmf = (-4.0f64).exp();
        for (n, c) in s.coefficients().iter().enumerate() {
            if n > 0 {
                pmf *= 4.0 / n as f64;
            }
            assert_abs_diff_eq!(c.norm_sqr(), pmf, epsilon = 1e-14);
        }
        let mean = expectation(&number_operator(40).unwrap(), &s).unwrap();
        assert_abs_diff_eq!(mean.re, 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(mean.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn insufficient_dimension_names_minimum() {
        let p = CoherentParams::new(25.0, 1.0).unwrap();
        match coherent_state(p, 30) {
            Err(Error::InsufficientDimension { required, dim, .. }) => {
                assert_eq!(dim, 30);
                assert!(coherent_state(p, required).is_ok());
                assert!(coherent_state(p, required - 1).is_err());
                assert!(required <= coherent_dimension(25.0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn large_mean_does_not_overflow() {
        let n = 1e4;
        let d = coherent_dimension(n);
        let s = coherent_state(CoherentParams::new(n, 2.0).unwrap(), d).unwrap();
        assert!(s
            .coefficients()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite()));
        assert_abs_diff_eq!(s.retained_norm_sqr() + s.tail_mass(), 1.0, epsilon = 1e-9);
        let mean = expectation(&number_operator(d).unwrap(), &s).unwrap();
        assert_abs_diff_eq!(mean.re, n, epsilon = 1e-6 * n);
    }

    #[test]
    fn expectation_examples() {
        let three = number_state(3, 6).unwrap();
        let phi = expectation(&abs_phase_operator(6).unwrap(), &three).unwrap();
        assert_eq!(phi.re, PI / 2.0);
        assert!(expectation(&abs_phase_operator(5).unwrap(), &three).is_err());
        assert!(number_state(6, 6).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert_abs_diff_eq!(wrap_angle(PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(-0.3), -0.3, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn coherent_norm_budget(n_mean in 0.0..400.0f64, theta in -3.1..3.1f64) {
            let p = CoherentParams::new(n_mean, theta).unwrap();
            let s = coherent_state(p, coherent_dimension(n_mean)).unwrap();
            prop_assert!(s.tail_mass() < COHERENT_TAIL_LIMIT);
            prop_assert!((s.retained_norm_sqr() + s.tail_mass() - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn identity_expectation_is_one(n_mean in 0.0..100.0f64, theta in -3.1..3.1f64) {
            let d = coherent_dimension(n_mean);
            let s = coherent_state(CoherentParams::new(n_mean, theta).unwrap(), d).unwrap();
            let v = expectation(&identity(d).unwrap(), &s).unwrap();
            prop_assert!((v.re - 1.0).abs() <= 1e-9);
            prop_assert!(v.im.abs() <= 1e-12);
        }

        #[test]
        fn hermitian_expectations_are_real(n_mean in 0.0..60.0f64, theta in -3.1..3.1f64) {
            let d = coherent_dimension(n_mean);
            let s = coherent_state(CoherentParams::new(n_mean, theta).unwrap(), d).unwrap();
            for op in [abs_phase_operator(d).unwrap(), crate::operators::cos_phase(d).unwrap(),
                       crate::operators::sin2_phase(d).unwrap(), crate::operators::carruthers_nieto(d).unwrap().1] {
                let v = expectation(&op, &s).unwrap();
                prop_assert!(v.im.abs() <= 1e-12, "{} {}", op.label(), v.im);
            }
        }
    }
}

//! Wootters concurrence: the general spectral definition, the X-state
//! shortcut, and the closed forms for the two evolved families.

use std::fmt;

use crate::error::{Error, Result};
use crate::matcore::{singular_values, sqrt_psd, ComplexMatrix, DensityMatrix};
use crate::states::{Acceleration, Family};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Eigen,
    XState,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eigen => "eigen",
            Method::XState => "xstate",
            Method::ClosedForm => "closed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrenceResult {
    /// `max(0, raw)`.
    pub value: f64,
    /// Unclamped expression; negative inside the sudden-death region.
    pub raw: f64,
    pub method: Method,
}

impl ConcurrenceResult {
    fn new(raw: f64, method: Method) -> Self {
        ConcurrenceResult {
            value: raw.max(0.0),
            raw,
            method,
        }
    }
}

/// `σ_y ⊗ σ_y`, which happens to be real.
fn sigma_yy() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ])
}

/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`
pub fn spin_flip(rho: &DensityMatrix) -> ComplexMatrix {
    let yy = sigma_yy();
    &(&yy * &rho.matrix().conj()) * &yy
}

/// Concurrence from the spectrum of `ρρ̃`.
///
/// The `√λᵢ` are the singular values of `√ρ̃ √ρ` (its Gram matrix
/// `√ρ ρ̃ √ρ` is Hermitian and isospectral with `ρρ̃`). Taking them as
/// singular values rather than square roots of eigenvalues keeps vanishing
/// `λᵢ` from turning `1e-17` of round-off into `1e-9` of concurrence.
pub fn concurrence_eigen(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let root = sqrt_psd(rho.matrix())?;
    let yy = sigma_yy();
    let flipped_root = &(&yy * &root.conj()) * &yy;
    let roots = singular_values(&(&flipped_root * &root))?;
    let raw = roots[0] - roots[1..].iter().sum::<f64>();
    Ok(ConcurrenceResult::new(raw, Method::Eigen))
}

/// Largest modulus off the diagonal and anti-diagonal.
pub fn x_shape_violation(m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            if j != i && j != 3 - i {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

pub const X_SHAPE_TOLERANCE: f64 = 1e-12;

/// `2·max(0, |ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄))` for X-shaped states.
pub fn concurrence_xstate(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let m = rho.matrix();
    let magnitude = x_shape_violation(m);
    if magnitude > X_SHAPE_TOLERANCE {
        return Err(Error::NotXState { magnitude });
    }
    let d = |i: usize| m[(i, i)].re.max(0.0);
    let outer = m[(0, 3)].norm() - (d(1) * d(2)).sqrt();
    let inner = m[(1, 2)].norm() - (d(0) * d(3)).sqrt();
    Ok(ConcurrenceResult::new(
        2.0 * outer.max(inner),
        Method::XState,
    ))
}

/// The braced factor of the closed forms, i.e. the concurrence divided by
/// `2|α|(1−P)`. Its sign decides whether the state is entangled, and it is
/// strictly decreasing in `P`.
pub fn decay_bracket(family: Family, alpha: f64, r: Acceleration, p: f64) -> f64 {
    let a2 = alpha * alpha;
    let g = 1.0 - a2;
    let (sin_r, cos_r) = r.r().sin_cos();
    let s2 = sin_r * sin_r;
    let lead = g.max(0.0).sqrt() * cos_r;
    match family {
        Family::Theta1 => lead - (p * (p * a2 + g * s2)).max(0.0).sqrt(),
        Family::Theta2 => lead - sin_r * (p * (g + a2 * (cos_r * cos_r + p * s2))).max(0.0).sqrt(),
    }
}

pub fn closed_form(family: Family, alpha: f64, r: Acceleration, p: f64) -> ConcurrenceResult {
    let raw = 2.0 * (1.0 - p) * (alpha.abs() * decay_bracket(family, alpha, r, p));
    ConcurrenceResult::new(raw, Method::ClosedForm)
}

/// `2|α|(1−P)[√(1−α²) cos r − √(P(Pα² + (1−α²) sin²r))]`, clamped at zero.
pub fn c_s1_closed(alpha: f64, r: Acceleration, p: f64) -> ConcurrenceResult {
    closed_form(Family::Theta1, alpha, r, p)
}

/// `2|α|(1−P)[√(1−α²) cos r − sin r √(P((1−α²) + α²(cos²r + P sin²r)))]`,
/// clamped at zero.
pub fn c_s2_closed(alpha: f64, r: Acceleration, p: f64) -> ConcurrenceResult {
    closed_form(Family::Theta2, alpha, r, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_local_channel, evolved_closed_form};
    use crate::matcore::{ONE, ZERO};
    use crate::states::{reduced_state, StateSpec};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_6};

    fn bell() -> DensityMatrix {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(&[h, ZERO, ZERO, h]).unwrap()
    }

    #[test]
    fn eigen_reference_states() {
        assert_abs_diff_eq!(
            concurrence_eigen(&bell()).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
        let ground = DensityMatrix::pure(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        assert_eq!(concurrence_eigen(&ground).unwrap().value, 0.0);
        let mixed = DensityMatrix::new(ComplexMatrix::diag(&[0.25; 4])).unwrap();
        let c = concurrence_eigen(&mixed).unwrap();
        assert_eq!(c.value, 0.0);
        assert_abs_diff_eq!(c.raw, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn eigen_handles_complex_coherences() {
        // (|01⟩ + i|10⟩)/√2 is maximally entangled
        let h = FRAC_1_SQRT_2;
        let rho =
            DensityMatrix::pure(&[ZERO, Complex64::new(h, 0.0), Complex64::new(0.0, h), ZERO])
                .unwrap();
        assert_abs_diff_eq!(concurrence_eigen(&rho).unwrap().value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            concurrence_xstate(&rho).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn xstate_reference_states() {
        let mixed = DensityMatrix::new(ComplexMatrix::diag(&[0.25; 4])).unwrap();
        assert_eq!(concurrence_xstate(&mixed).unwrap().value, 0.0);
        assert_abs_diff_eq!(
            concurrence_xstate(&bell()).unwrap().value,
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn xstate_rejects_general_states() {
        let h = Complex64::new(0.5, 0.0);
        let plus_plus = DensityMatrix::pure(&[h, h, h, h]).unwrap();
        assert!(matches!(
            concurrence_xstate(&plus_plus),
            Err(Error::NotXState { .. })
        ));
    }

    #[test]
    fn xstate_reproduces_closed_form_brackets() {
        for family in Family::ALL {
            for &alpha in &[0.2, 0.6, 0.9] {
                for &r in &[0.0, 0.3, FRAC_PI_4] {
                    for &p in &[0.05, 0.4, 0.8] {
                        let spec = StateSpec::new(family, alpha).unwrap();
                        let r = Acceleration::new(r).unwrap();
                        let rho = evolved_closed_form(&spec, r, p).unwrap();
                        let x = concurrence_xstate(&rho).unwrap();
                        let c = closed_form(family, alpha, r, p);
                        assert_abs_diff_eq!(x.value, c.value, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn bell_inertial_closed_forms() {
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let c1 = c_s1_closed(FRAC_1_SQRT_2, Acceleration::INERTIAL, p);
            let c2 = c_s2_closed(FRAC_1_SQRT_2, Acceleration::INERTIAL, p);
            assert_abs_diff_eq!(c1.value, (1.0 - p) * (1.0 - p), epsilon = 1e-15);
            assert_abs_diff_eq!(c2.value, 1.0 - p, epsilon = 1e-15);
        }
    }

    #[test]
    fn families_agree_without_noise() {
        let r = Acceleration::new(FRAC_PI_6).unwrap();
        for alpha in [0.1_f64, 0.5, 0.9] {
            let want = 2.0 * alpha * (1.0 - alpha * alpha).sqrt() * FRAC_PI_6.cos();
            assert_abs_diff_eq!(c_s1_closed(alpha, r, 0.0).value, want, epsilon = 1e-15);
            assert_abs_diff_eq!(c_s2_closed(alpha, r, 0.0).value, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn theta1_dies_before_full_decay_when_alpha_large() {
        let c = c_s1_closed(0.9, Acceleration::INERTIAL, 0.8);
        assert_eq!(c.value, 0.0);
        assert!(c.raw < 0.0);
        let spec = StateSpec::new(Family::Theta1, 0.9).unwrap();
        let rho = apply_local_channel(
            &reduced_state(&spec, Acceleration::INERTIAL).unwrap(),
            0.8,
            0.8,
        )
        .unwrap();
        assert_eq!(concurrence_eigen(&rho).unwrap().value, 0.0);
    }

    #[test]
    fn theta2_never_dies_in_inertial_frame() {
        for alpha in [0.1_f64, 0.5, 0.9, 0.99] {
            for i in 0..100 {
                let p = i as f64 / 100.0;
                let c = c_s2_closed(alpha, Acceleration::INERTIAL, p);
                let want = 2.0 * alpha * (1.0 - alpha * alpha).sqrt() * (1.0 - p);
                assert_abs_diff_eq!(c.value, want, epsilon = 1e-15);
                assert!(c.value > 0.0);
            }
        }
    }

    #[test]
    fn inertial_partner_pair_shares_curve() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let a = c_s2_closed(0.6, Acceleration::INERTIAL, p);
            let b = c_s2_closed(0.8, Acceleration::INERTIAL, p);
            // 0.8 is √(1−0.6²) only up to rounding, so equality is to the ulp
            assert_abs_diff_eq!(a.value, b.value, epsilon = 4e-16);
        }
    }
}

//! Initial state families, the fermionic Rindler expansion of Rob's mode, and
//! the Alice–Rob reduced states obtained by tracing out region II.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::matcore::{partial_trace_last, ComplexMatrix, DensityMatrix, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `√(1−α²)|00⟩ + α|11⟩`
    Theta1,
    /// `√(1−α²)|01⟩ + α|10⟩`
    Theta2,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::Theta1, Family::Theta2];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Theta1 => "theta1",
            Family::Theta2 => "theta2",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "theta1" | "1" => Ok(Family::Theta1),
            "theta2" | "2" => Ok(Family::Theta2),
            other => Err(Error::InvalidSweep(format!("unknown family {other:?}"))),
        }
    }
}

/// Initial-state selector. `alpha` lies in `(-1, 1) \ {0}` unless the spec
/// was built with [`StateSpec::degenerate`], which also admits `0` and `±1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateSpec {
    family: Family,
    alpha: f64,
}

impl StateSpec {
    pub fn new(family: Family, alpha: f64) -> Result<Self> {
        check_range("alpha", alpha, -1.0, 1.0, "must lie in (-1, 1)")?;
        if alpha.abs() == 1.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must lie in the open interval (-1, 1)",
            });
        }
        if alpha == 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must be non-zero",
            });
        }
        Ok(StateSpec { family, alpha })
    }

    /// Accepts the product-state endpoints `α ∈ {0, ±1}` as well.
    pub fn degenerate(family: Family, alpha: f64) -> Result<Self> {
        check_range("alpha", alpha, -1.0, 1.0, "must lie in [-1, 1]")?;
        Ok(StateSpec { family, alpha })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `√(1−α²)`
    pub fn partner(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }
}

/// Rob's acceleration parameter `r`, with `cos r = (e^{−2πωc/a} + 1)^{−1/2}`.
/// Fermionic single-mode range is `0 ≤ r ≤ π/4`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Acceleration(f64);

impl Acceleration {
    pub const INERTIAL: Acceleration = Acceleration(0.0);
    pub const MAX: Acceleration = Acceleration(FRAC_PI_4);

    pub fn new(r: f64) -> Result<Self> {
        check_range("r", r, 0.0, FRAC_PI_4, "must lie in [0, pi/4]").map(Acceleration)
    }

    pub fn r(self) -> f64 {
        self.0
    }

    /// `cos 2r`, evaluated as `sin(π/2 − 2r)` so that `r = π/4` yields exactly 0.
    pub fn cos_2r(self) -> f64 {
        (FRAC_PI_2 - 2.0 * self.0).sin().max(0.0)
    }
}

/// Maps a proper acceleration to `r`. Only the ratio `ωc/a` enters, so any
/// consistent unit system works; natural units take `c = 1`.
pub fn acceleration_to_r(a: f64, omega: f64, c: f64) -> Result<Acceleration> {
    for (name, v) in [("a", a), ("omega", omega), ("c", c)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must be positive and finite",
            });
        }
    }
    let cos_r = ((-2.0 * PI * omega * c / a).exp() + 1.0).powf(-0.5);
    Acceleration::new(cos_r.clamp(0.0, 1.0).acos().min(FRAC_PI_4))
}

/// Amplitudes over `|A, I, II⟩`, index `4·A + 2·I + II`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripartiteKet(pub [Complex64; 8]);

impl TripartiteKet {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn amplitude(&self, a: usize, region_i: usize, region_ii: usize) -> Complex64 {
        self.0[4 * a + 2 * region_i + region_ii]
    }
}

pub fn build_initial(spec: &StateSpec) -> [Complex64; 4] {
    let major = Complex64::new(spec.partner(), 0.0);
    let minor = Complex64::new(spec.alpha(), 0.0);
    match spec.family() {
        Family::Theta1 => [major, ZERO, ZERO, minor],
        Family::Theta2 => [ZERO, major, minor, ZERO],
    }
}

/// Rewrites Rob's Minkowski mode in Rindler modes:
/// `|0⟩ → cos r |0⟩_I|0⟩_II + sin r |1⟩_I|1⟩_II`, `|1⟩ → |1⟩_I|0⟩_II`.
pub fn rindler_expand(spec: &StateSpec, r: Acceleration) -> TripartiteKet {
    let (sin_r, cos_r) = r.r().sin_cos();
    let ket = build_initial(spec);
    let mut out = [ZERO; 8];
    for alice in 0..2 {
        let vacuum = ket[2 * alice];
        let excited = ket[2 * alice + 1];
        out[4 * alice] += vacuum * cos_r;
        out[4 * alice + 3] += vacuum * sin_r;
        out[4 * alice + 2] += excited;
    }
    TripartiteKet(out)
}

/// `Tr_II |Θ⟩⟨Θ|` for the Rindler-expanded state.
pub fn reduced_state(spec: &StateSpec, r: Acceleration) -> Result<DensityMatrix> {
    let ket = rindler_expand(spec, r);
    DensityMatrix::new(partial_trace_last(&ComplexMatrix::projector(&ket.0))?)
}

/// Entry-by-entry construction of the reduced state, independent of the
/// expansion and partial trace. Used as an oracle for [`reduced_state`].
pub fn reduced_state_closed_form(spec: &StateSpec, r: Acceleration) -> Result<DensityMatrix> {
    let a = spec.alpha();
    let a2 = a * a;
    let g = 1.0 - a2;
    let (sin_r, cos_r) = r.r().sin_cos();
    let (c2, s2) = (cos_r * cos_r, sin_r * sin_r);
    let coh = a * g.sqrt() * cos_r;
    let m = match spec.family() {
        Family::Theta1 => ComplexMatrix::from_real_rows([
            [g * c2, 0.0, 0.0, coh],
            [0.0, g * s2, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [coh, 0.0, 0.0, a2],
        ]),
        Family::Theta2 => ComplexMatrix::from_real_rows([
            [0.0, 0.0, 0.0, 0.0],
            [0.0, g, coh, 0.0],
            [0.0, coh, a2 * c2, 0.0],
            [0.0, 0.0, 0.0, a2 * s2],
        ]),
    };
    DensityMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_6};

    fn re(v: &[Complex64]) -> Vec<f64> {
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn initial_states_reduce_to_bell_states() {
        let phi = build_initial(&StateSpec::new(Family::Theta1, FRAC_1_SQRT_2).unwrap());
        for (got, want) in re(&phi)
            .iter()
            .zip([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])
        {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let psi = build_initial(&StateSpec::new(Family::Theta2, -FRAC_1_SQRT_2).unwrap());
        for (got, want) in re(&psi)
            .iter()
            .zip([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0])
        {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let t = build_initial(&StateSpec::new(Family::Theta1, 0.6).unwrap());
        assert_abs_diff_eq!(t[0].re, 0.8, epsilon = 1e-15);
        assert_eq!(t[3].re, 0.6);
    }

    #[test]
    fn alpha_domain_is_enforced() {
        for bad in [0.0, 1.0, -1.0, 1.5, f64::NAN] {
            assert!(StateSpec::new(Family::Theta1, bad).is_err(), "{bad}");
        }
        for ok in [0.0, 1.0, -1.0] {
            assert!(StateSpec::degenerate(Family::Theta2, ok).is_ok());
        }
        assert!(StateSpec::degenerate(Family::Theta2, 1.01).is_err());
    }

    #[test]
    fn acceleration_range() {
        assert!(Acceleration::new(-0.1).is_err());
        assert!(Acceleration::new(FRAC_PI_4 + 1e-9).is_err());
        assert_eq!(Acceleration::MAX.cos_2r(), 0.0);
        assert_eq!(Acceleration::INERTIAL.cos_2r(), 1.0);
    }

    #[test]
    fn acceleration_limits() {
        let fast = acceleration_to_r(1e12, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(fast.r(), FRAC_PI_4, epsilon = 1e-6);
        assert_abs_diff_eq!(fast.r().cos(), FRAC_1_SQRT_2, epsilon = 1e-6);
        let slow = acceleration_to_r(1e-3, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(slow.r(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn acceleration_at_two_pi_omega_c() {
        let r = acceleration_to_r(2.0 * PI, 1.0, 1.0).unwrap();
        let cos_r = 1.0 / ((-1.0_f64).exp() + 1.0).sqrt();
        assert_abs_diff_eq!(cos_r, 0.855_020, epsilon = 1e-6);
        assert_abs_diff_eq!(r.r(), cos_r.acos(), epsilon = 1e-15);
    }

    #[test]
    fn acceleration_rejects_non_positive() {
        assert!(acceleration_to_r(0.0, 1.0, 1.0).is_err());
        assert!(acceleration_to_r(1.0, -1.0, 1.0).is_err());
        assert!(acceleration_to_r(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn inertial_expansion_leaves_region_ii_empty() {
        let spec = StateSpec::new(Family::Theta1, FRAC_1_SQRT_2).unwrap();
        let ket = rindler_expand(&spec, Acceleration::INERTIAL);
        assert_abs_diff_eq!(ket.amplitude(0, 0, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(ket.amplitude(1, 1, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(ket.0.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn theta1_expansion_has_three_amplitudes() {
        let (alpha, r) = (0.6, Acceleration::new(FRAC_PI_6).unwrap());
        let ket = rindler_expand(&StateSpec::new(Family::Theta1, alpha).unwrap(), r);
        assert_abs_diff_eq!(
            ket.amplitude(0, 0, 0).re,
            0.8 * FRAC_PI_6.cos(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(ket.amplitude(1, 1, 0).re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ket.amplitude(0, 1, 1).re,
            0.8 * FRAC_PI_6.sin(),
            epsilon = 1e-15
        );
        assert_eq!(ket.0.iter().filter(|z| z.norm() > 0.0).count(), 3);
        assert_abs_diff_eq!(ket.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn theta2_expansion() {
        let (alpha, r) = (0.7, Acceleration::new(0.4).unwrap());
        let ket = rindler_expand(&StateSpec::new(Family::Theta2, alpha).unwrap(), r);
        let g = (1.0 - alpha * alpha).sqrt();
        assert_abs_diff_eq!(ket.amplitude(0, 1, 0).re, g, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ket.amplitude(1, 0, 0).re,
            alpha * 0.4_f64.cos(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            ket.amplitude(1, 1, 1).re,
            alpha * 0.4_f64.sin(),
            epsilon = 1e-15
        );
        assert_eq!(ket.0.iter().filter(|z| z.norm() > 0.0).count(), 3);
    }

    #[test]
    fn reduced_theta1_entries() {
        let spec = StateSpec::new(Family::Theta1, 0.6).unwrap();
        let rho = reduced_state(&spec, Acceleration::new(FRAC_PI_6).unwrap()).unwrap();
        assert_abs_diff_eq!(rho.get(0, 0).re, 0.48, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(1, 1).re, 0.16, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(2, 2).re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(3, 3).re, 0.36, epsilon = 1e-12);
        // α√(1−α²) = 0.48, carried by the cos r branch of the vacuum
        assert_abs_diff_eq!(rho.get(0, 3).re, 0.48 * FRAC_PI_6.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(3, 0).re, 0.48 * FRAC_PI_6.cos(), epsilon = 1e-12);
    }

    #[test]
    fn inertial_reduced_state_is_bell_projector() {
        let spec = StateSpec::new(Family::Theta1, FRAC_1_SQRT_2).unwrap();
        let rho = reduced_state(&spec, Acceleration::INERTIAL).unwrap();
        let bell = ComplexMatrix::projector(&build_initial(&spec));
        assert!(rho.matrix().max_abs_diff(&bell) < 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn generic_pipeline_matches_closed_form_on_grid() {
        for family in Family::ALL {
            for i in 0..20 {
                let alpha = -0.95 + 1.9 * i as f64 / 19.0;
                for j in 0..20 {
                    let r = Acceleration::new(FRAC_PI_4 * j as f64 / 19.0).unwrap();
                    let spec = StateSpec::new(family, alpha).unwrap();
                    let a = reduced_state(&spec, r).unwrap();
                    let b = reduced_state_closed_form(&spec, r).unwrap();
                    assert!(a.max_abs_diff(&b) <= 1e-12, "{family} {alpha} {}", r.r());
                    if family == Family::Theta1 {
                        assert_eq!(a.get(2, 2), ZERO);
                    }
                    if j == 0 {
                        assert_abs_diff_eq!(a.purity(), 1.0, epsilon = 1e-12);
                    } else {
                        assert!(a.purity() < 1.0);
                    }
                }
            }
        }
    }
}

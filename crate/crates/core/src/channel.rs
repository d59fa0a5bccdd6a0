//! Local amplitude damping on Alice's and Rob's qubits.

use crate::error::{check_range, Error, Result};
use crate::matcore::{tensor, ComplexMatrix, DensityMatrix};
use crate::states::{Acceleration, Family, StateSpec};

/// Decay specification, resolved to a probability `P ∈ [0, 1]` once at the
/// boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    Probability(f64),
    /// Markovian decay, `P = 1 − e^{−Γt}`.
    Markov {
        gamma: f64,
        t: f64,
    },
}

impl NoiseSpec {
    pub fn resolve(self) -> Result<f64> {
        match self {
            NoiseSpec::Probability(p) => check_probability(p),
            NoiseSpec::Markov { gamma, t } => {
                check_range("gamma", gamma, 0.0, f64::INFINITY, "must be non-negative")?;
                check_range("t", t, 0.0, f64::INFINITY, "must be non-negative")?;
                let p = -(-gamma * t).exp_m1();
                check_probability(p)
            }
        }
    }
}

/// Inverse of the Markov model: the time at which decay probability `p` is
/// reached for rate `gamma`. Infinite for `p = 1`.
pub fn decay_time(p: f64, gamma: f64) -> Result<f64> {
    check_probability(p)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must be positive and finite",
        });
    }
    Ok(-(-p).ln_1p() / gamma)
}

pub(crate) fn check_probability(p: f64) -> Result<f64> {
    check_range("p", p, 0.0, 1.0, "decay probability must lie in [0, 1]")
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausPair {
    pub m0: ComplexMatrix,
    pub m1: ComplexMatrix,
}

impl KrausPair {
    /// `m0†m0 + m1†m1`, which should be the identity.
    pub fn completeness(&self) -> ComplexMatrix {
        &(&self.m0.adjoint() * &self.m0) + &(&self.m1.adjoint() * &self.m1)
    }

    fn ops(&self) -> [&ComplexMatrix; 2] {
        [&self.m0, &self.m1]
    }
}

pub fn kraus_amplitude_damping(p: f64) -> Result<KrausPair> {
    let p = check_probability(p)?;
    Ok(KrausPair {
        m0: ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, (1.0 - p).sqrt()]]),
        m1: ComplexMatrix::from_real_rows([[0.0, p.sqrt()], [0.0, 0.0]]),
    })
}

/// `Σ_{μν} (M_μ^A ⊗ M_ν^R) ρ (M_μ^A ⊗ M_ν^R)†` with independent decay
/// probabilities on each side.
pub fn apply_local_channel(rho: &DensityMatrix, p_alice: f64, p_rob: f64) -> Result<DensityMatrix> {
    let alice = kraus_amplitude_damping(p_alice)?;
    let rob = kraus_amplitude_damping(p_rob)?;
    let mut out = ComplexMatrix::zeros(4);
    for ma in alice.ops() {
        for mr in rob.ops() {
            let k = tensor(ma, mr);
            let term = &(&k * rho.matrix()) * &k.adjoint();
            out = &out + &term;
        }
    }
    DensityMatrix::new(out)
}

/// The evolved state written out entry by entry, with `β = 1 − P` and
/// `γ = 1 − α²`. Oracle partner of [`apply_local_channel`] on
/// [`crate::states::reduced_state`].
pub fn evolved_closed_form(spec: &StateSpec, r: Acceleration, p: f64) -> Result<DensityMatrix> {
    let p = check_probability(p)?;
    let a = spec.alpha();
    let a2 = a * a;
    let g = 1.0 - a2;
    let b = 1.0 - p;
    let (sin_r, cos_r) = r.r().sin_cos();
    let (c2, s2) = (cos_r * cos_r, sin_r * sin_r);
    let coh = a * b * g.sqrt() * cos_r;
    let m = match spec.family() {
        Family::Theta1 => ComplexMatrix::from_real_rows([
            [p * p * a2 + g * (c2 + p * s2), 0.0, 0.0, coh],
            [0.0, b * (p * a2 + g * s2), 0.0, 0.0],
            [0.0, 0.0, p * b * a2, 0.0],
            [coh, 0.0, 0.0, b * b * a2],
        ]),
        Family::Theta2 => ComplexMatrix::from_real_rows([
            [p * g + p * a2 * (c2 + p * s2), 0.0, 0.0, 0.0],
            [0.0, b * (g + p * a2 * s2), coh, 0.0],
            [0.0, coh, b * a2 * (c2 + p * s2), 0.0],
            [0.0, 0.0, 0.0, b * b * a2 * s2],
        ]),
    };
    DensityMatrix::new(m)
}

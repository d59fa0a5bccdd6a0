//! The invariant battery behind `rdecay verify`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use crate::channel::{apply_local_channel, evolved_closed_form, kraus_amplitude_damping};
use crate::entanglement::{closed_form, concurrence_eigen, concurrence_xstate};
use crate::error::Result;
use crate::matcore::{eig_hermitian, ComplexMatrix, DensityMatrix};
use crate::states::{reduced_state, reduced_state_closed_form, Acceleration, Family, StateSpec};
use crate::sudden_death::{boundary_alpha, compare_death_ranges, death_range, find_death_point};
use crate::sweep::{evaluate, linspace, to_csv_string, with_jobs, MethodSet, SweepSpec};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("bell_inertial_curves", bell_inertial_curves),
    ("reduced_state_oracle", reduced_state_oracle),
    ("oracle_equivalence", oracle_equivalence),
    ("density_invariants", density_invariants),
    ("channel_properties", channel_properties),
    ("inertial_dichotomy", inertial_dichotomy),
    ("boundary_root_consistency", boundary_root_consistency),
    ("range_endpoints_containment", range_endpoints_containment),
    ("symmetries", symmetries),
    ("noiseless_family_equivalence", noiseless_family_equivalence),
    ("monotone_decay", monotone_decay),
    ("acceleration_monotonicity", acceleration_monotonicity),
    ("death_order_sample", death_order_sample),
    ("sweep_determinism", sweep_determinism),
];

pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, check)| match check() {
            Ok((passed, detail)) => CheckOutcome {
                name,
                passed,
                detail,
            },
            Err(e) => CheckOutcome {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn acc(r: f64) -> Acceleration {
    Acceleration::new(r).expect("grid r within range")
}

/// Ten α values symmetric about zero (none of them zero).
pub fn alpha_grid() -> Vec<f64> {
    linspace(-0.95, 0.95, 10)
}

pub fn r_grid(n: usize) -> Vec<f64> {
    linspace(0.0, FRAC_PI_4, n)
}

fn bell_inertial_curves() -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for p in linspace(0.0, 1.0, 201) {
        for family in Family::ALL {
            let spec = StateSpec::new(family, FRAC_1_SQRT_2)?;
            let rho = apply_local_channel(&reduced_state(&spec, Acceleration::INERTIAL)?, p, p)?;
            let c = concurrence_eigen(&rho)?.value;
            let want = match family {
                Family::Theta1 => (1.0 - p) * (1.0 - p),
                Family::Theta2 => 1.0 - p,
            };
            worst = worst.max((c - want).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max |C - law| = {worst:.2e}")))
}

fn reduced_state_oracle() -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for family in Family::ALL {
        for alpha in linspace(-0.95, 0.95, 20) {
            for r in r_grid(20) {
                let spec = StateSpec::new(family, alpha)?;
                let a = reduced_state(&spec, acc(r))?;
                let b = reduced_state_closed_form(&spec, acc(r))?;
                worst = worst.max(a.max_abs_diff(&b));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max entry diff = {worst:.2e}")))
}

fn oracle_equivalence() -> Result<(bool, String)> {
    let (mut state_diff, mut conc_diff, mut points) = (0.0_f64, 0.0_f64, 0);
    for family in Family::ALL {
        for alpha in alpha_grid() {
            for r in r_grid(10) {
                for p in linspace(0.0, 1.0, 10) {
                    let spec = StateSpec::new(family, alpha)?;
                    let rho = apply_local_channel(&reduced_state(&spec, acc(r))?, p, p)?;
                    let closed_rho = evolved_closed_form(&spec, acc(r), p)?;
                    state_diff = state_diff.max(rho.max_abs_diff(&closed_rho));
                    let c = closed_form(family, alpha, acc(r), p).value;
                    conc_diff = conc_diff.max((concurrence_eigen(&rho)?.value - c).abs());
                    conc_diff = conc_diff.max((concurrence_xstate(&rho)?.value - c).abs());
                    points += 1;
                }
            }
        }
    }
    Ok((
        state_diff <= 1e-12 && conc_diff <= 1e-10,
        format!("{points} points, state diff {state_diff:.2e}, concurrence diff {conc_diff:.2e}"),
    ))
}

fn density_invariants() -> Result<(bool, String)> {
    // DensityMatrix::new enforces Hermiticity, trace and PSD; reaching the
    // end means every evolved state validated.
    let mut count = 0;
    for family in Family::ALL {
        for alpha in linspace(-0.95, 0.95, 20) {
            for r in r_grid(20) {
                for p in linspace(0.0, 1.0, 5) {
                    let spec = StateSpec::new(family, alpha)?;
                    let rho = apply_local_channel(&reduced_state(&spec, acc(r))?, p, p)?;
                    let sum: f64 = eig_hermitian(rho.matrix())?.values.iter().sum();
                    if (sum - 1.0).abs() > 1e-10 {
                        return Ok((false, format!("eigenvalue sum {sum}")));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok((true, format!("{count} evolved states valid")))
}

fn channel_properties() -> Result<(bool, String)> {
    let id2 = ComplexMatrix::identity(2);
    let mut completeness = 0.0_f64;
    for p in linspace(0.0, 1.0, 21) {
        completeness = completeness.max(
            kraus_amplitude_damping(p)?
                .completeness()
                .max_abs_diff(&id2),
        );
    }

    let (mut trace, mut semigroup) = (0.0_f64, 0.0_f64);
    let mut identity_exact = true;
    for family in Family::ALL {
        for &alpha in &[-0.8, 0.3, 0.9] {
            for &r in &[0.0, 0.4, FRAC_PI_4] {
                let rho = reduced_state(&StateSpec::new(family, alpha)?, acc(r))?;
                identity_exact &= apply_local_channel(&rho, 0.0, 0.0)? == rho;
                for &(pa, pr) in &[(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)] {
                    let out = apply_local_channel(&rho, pa, pr)?;
                    trace = trace.max((out.matrix().trace().re - 1.0).abs());
                }
                for &(p1, p2) in &[(0.1, 0.3), (0.45, 0.45), (0.8, 0.6)] {
                    let twice = apply_local_channel(&apply_local_channel(&rho, p1, p1)?, p2, p2)?;
                    let p = 1.0 - (1.0 - p1) * (1.0 - p2);
                    let once = apply_local_channel(&rho, p, p)?;
                    semigroup = semigroup.max(twice.max_abs_diff(&once));
                }
            }
        }
    }
    let ground = DensityMatrix::new(ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0]))?;
    let mut fixed = true;
    for p in linspace(0.0, 1.0, 11) {
        fixed &= apply_local_channel(&ground, p, p)? == ground;
    }
    Ok((
        completeness <= 1e-12 && trace <= 1e-12 && semigroup <= 1e-12 && identity_exact && fixed,
        format!(
            "completeness {completeness:.1e}, trace {trace:.1e}, semigroup {semigroup:.1e}, identity {identity_exact}, ground fixed {fixed}"
        ),
    ))
}

fn inertial_dichotomy() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for &alpha in &[0.5, 0.7, 0.71, 0.9] {
        let d1 = find_death_point(Family::Theta1, alpha, Acceleration::INERTIAL)?;
        let d2 = find_death_point(Family::Theta2, alpha, Acceleration::INERTIAL)?;
        ok &= d1.exists_before_full_decay == (alpha > FRAC_1_SQRT_2);
        ok &= d2.p_star == 1.0;
        notes.push(format!("{alpha}: {:.4}/{:.4}", d1.p_star, d2.p_star));
    }
    Ok((ok, notes.join(", ")))
}

fn boundary_root_consistency() -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for family in Family::ALL {
        for r in r_grid(50) {
            for k in 1..=50 {
                let p = k as f64 / 50.0;
                match boundary_alpha(family, acc(r), p) {
                    Ok(a) => {
                        worst = worst.max(closed_form(family, a, acc(r), p).raw.abs());
                    }
                    Err(_) if family == Family::Theta2 && r == 0.0 => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok((worst <= 1e-10, format!("max |raw| = {worst:.2e}")))
}

fn range_endpoints_containment() -> Result<(bool, String)> {
    let mut endpoint = 0.0_f64;
    let mut contained = true;
    for r in r_grid(100) {
        // r = FRAC_PI_4 stands for π/4 itself, where cos 2r vanishes
        let c2 = (FRAC_PI_2 - 2.0 * r).sin();
        let cmp = compare_death_ranges(acc(r));
        endpoint = endpoint.max((cmp.theta1.alpha_min - (c2 / (1.0 + c2)).sqrt()).abs());
        endpoint = endpoint.max((cmp.theta2.alpha_min - c2.sqrt() / r.cos()).abs());
        contained &= cmp.theta1_contains_theta2();
        if r > 0.0 {
            for family in Family::ALL {
                let at_full = boundary_alpha(family, acc(r), 1.0)?;
                endpoint = endpoint.max((at_full - death_range(family, acc(r)).alpha_min).abs());
            }
        }
    }
    Ok((
        endpoint <= 1e-10 && contained,
        format!("endpoint diff {endpoint:.2e}, containment {contained}"),
    ))
}

fn symmetries() -> Result<(bool, String)> {
    let mut sign_exact = true;
    let mut partner = 0.0_f64;
    for family in Family::ALL {
        for alpha in linspace(0.05, 0.95, 10) {
            for r in r_grid(10) {
                for p in linspace(0.0, 1.0, 10) {
                    sign_exact &= closed_form(family, alpha, acc(r), p)
                        == closed_form(family, -alpha, acc(r), p);
                }
            }
        }
    }
    for alpha in linspace(0.05, 0.95, 19) {
        let other = (1.0 - alpha * alpha).sqrt();
        for p in linspace(0.0, 1.0, 21) {
            let a = closed_form(Family::Theta2, alpha, Acceleration::INERTIAL, p).value;
            let b = closed_form(Family::Theta2, other, Acceleration::INERTIAL, p).value;
            partner = partner.max((a - b).abs());
        }
    }
    Ok((
        sign_exact && partner <= 10.0 * f64::EPSILON,
        format!("sign exact {sign_exact}, partner diff {partner:.1e}"),
    ))
}

fn noiseless_family_equivalence() -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for alpha in alpha_grid() {
        for r in r_grid(10) {
            let want = 2.0 * alpha.abs() * (1.0 - alpha * alpha).sqrt() * r.cos();
            for family in Family::ALL {
                worst = worst.max((closed_form(family, alpha, acc(r), 0.0).value - want).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max diff {worst:.2e}")))
}

fn monotone_decay() -> Result<(bool, String)> {
    let mut ok = true;
    let mut in_range = true;
    for family in Family::ALL {
        for alpha in linspace(0.05, 0.95, 10) {
            for r in r_grid(6) {
                let mut prev = f64::INFINITY;
                for p in linspace(0.0, 1.0, 401) {
                    let c = closed_form(family, alpha, acc(r), p).value;
                    ok &= c <= prev;
                    in_range &= (0.0..=1.0).contains(&c);
                    prev = c;
                }
            }
        }
    }
    Ok((
        ok && in_range,
        format!("non-increasing {ok}, within [0,1] {in_range}"),
    ))
}

fn acceleration_monotonicity() -> Result<(bool, String)> {
    let rs = [0.0, PI / 12.0, PI / 6.0, FRAC_PI_4];
    let mut ok = true;
    let mut notes = Vec::new();
    for family in Family::ALL {
        let stars = rs
            .iter()
            .map(|&r| find_death_point(family, 0.9, acc(r)).map(|d| d.p_star))
            .collect::<Result<Vec<_>>>()?;
        ok &= stars.windows(2).all(|w| w[1] <= w[0]);
        notes.push(format!(
            "{family}: {}",
            stars
                .iter()
                .map(|s| format!("{s:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn death_order_sample() -> Result<(bool, String)> {
    let limit = 3.0_f64.sqrt() / 2.0;
    let mut ok = true;
    let mut count = 0;
    for alpha in linspace(0.05, limit - 1e-6, 12) {
        for r in r_grid(12) {
            let d1 = find_death_point(Family::Theta1, alpha, acc(r))?;
            let d2 = find_death_point(Family::Theta2, alpha, acc(r))?;
            ok &= d1.p_star <= d2.p_star;
            count += 1;
        }
    }
    Ok((ok, format!("{count} sampled (alpha, r) pairs")))
}

fn sweep_determinism() -> Result<(bool, String)> {
    let spec = SweepSpec {
        families: Family::ALL.to_vec(),
        alphas: linspace(0.1, 0.9, 5),
        rs: r_grid(4),
        ps: linspace(0.0, 1.0, 11),
        methods: MethodSet::ALL,
        allow_degenerate: false,
    };
    let a = with_jobs(Some(1), || evaluate(&spec))?;
    let b = with_jobs(Some(4), || evaluate(&spec))?;
    let c = evaluate(&spec)?;
    let (a, b, c) = (to_csv_string(&a)?, to_csv_string(&b)?, to_csv_string(&c)?);
    Ok((a == b && b == c, format!("{} bytes", a.len())))
}

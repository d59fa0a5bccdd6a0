//! Where the concurrence reaches zero: closed-form boundary curves in
//! `(r, P, |α|)`, the ranges of `|α|` that can die before full decay, and a
//! scan-plus-bisection solver for the death point of a given state.

use crate::channel::check_probability;
use crate::entanglement::decay_bracket;
use crate::error::{check_range, Error, Result};
use crate::states::{Acceleration, Family};

/// Step of the coarse scan over `P` in [`find_death_point`].
pub const SCAN_STEP: f64 = 1e-3;
/// Target `|bracket|` for the bisection refinement.
pub const ROOT_TOLERANCE: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

fn check_boundary_p(p: f64) -> Result<f64> {
    check_probability(p)?;
    if p == 0.0 {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "boundary is defined for 0 < p <= 1",
        });
    }
    Ok(p)
}

/// `|α|` at which the Θ₁ concurrence vanishes:
/// `√[(1−P+cos2r+P cos2r) / (1−P+2P²+cos2r+P cos2r)]`.
pub fn boundary_alpha_theta1(r: Acceleration, p: f64) -> Result<f64> {
    let p = check_boundary_p(p)?;
    let c2 = r.cos_2r();
    let num = 1.0 - p + c2 + p * c2;
    let den = num + 2.0 * p * p;
    assert!(den > 0.0, "boundary denominator {den} must be positive");
    Ok((num / den).sqrt())
}

/// `|α|` at which the Θ₂ concurrence vanishes:
/// `2√[(1−P+cos2r+P cos2r) / (4−3P+3P²+4(1+P−P²)cos2r+(P−1)P cos4r)]`.
///
/// There is no root in the inertial frame, where Θ₂ stays entangled until
/// `P = 1` for every `α`.
pub fn boundary_alpha_theta2(r: Acceleration, p: f64) -> Result<f64> {
    let p = check_boundary_p(p)?;
    if r.r() == 0.0 {
        return Err(Error::NoRoot("theta2 stays entangled for r = 0"));
    }
    let c2 = r.cos_2r();
    let c4 = 2.0 * c2 * c2 - 1.0;
    let num = 1.0 - p + c2 + p * c2;
    let den = 4.0 - 3.0 * p + 3.0 * p * p + 4.0 * (1.0 + p - p * p) * c2 + (p - 1.0) * p * c4;
    assert!(den > 0.0, "boundary denominator {den} must be positive");
    Ok(2.0 * (num / den).sqrt())
}

pub fn boundary_alpha(family: Family, r: Acceleration, p: f64) -> Result<f64> {
    match family {
        Family::Theta1 => boundary_alpha_theta1(r, p),
        Family::Theta2 => boundary_alpha_theta2(r, p),
    }
}

/// States with `alpha_min < |α| < alpha_max` lose all entanglement at some
/// `P < 1`. The range is empty when `alpha_min` reaches 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeathRange {
    pub family: Family,
    pub r: Acceleration,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl DeathRange {
    pub fn is_empty(&self) -> bool {
        self.alpha_min >= self.alpha_max
    }

    pub fn contains(&self, alpha: f64) -> bool {
        let a = alpha.abs();
        a > self.alpha_min && a < self.alpha_max
    }
}

pub fn death_range(family: Family, r: Acceleration) -> DeathRange {
    let c2 = r.cos_2r();
    let alpha_min = match family {
        Family::Theta1 => c2.sqrt() / (1.0 + c2).sqrt(),
        Family::Theta2 => c2.sqrt() / r.r().cos(),
    };
    DeathRange {
        family,
        r,
        alpha_min: alpha_min.min(1.0),
        alpha_max: 1.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeathPoint {
    /// Smallest decay probability with zero concurrence.
    pub p_star: f64,
    /// `p_star < 1`: entanglement dies in finite time.
    pub exists_before_full_decay: bool,
}

/// Locates the first `P` at which the concurrence of the evolved state hits
/// zero. Scans `P` on a `SCAN_STEP` grid for the first non-positive bracket,
/// then bisects. Returns `p_star = 1` when the concurrence only vanishes at
/// full decay.
pub fn find_death_point(family: Family, alpha: f64, r: Acceleration) -> Result<DeathPoint> {
    check_range("alpha", alpha, -1.0, 1.0, "must lie in [-1, 1]")?;
    let f = |p: f64| decay_bracket(family, alpha, r, p);

    if f(0.0) <= 0.0 {
        return Ok(DeathPoint {
            p_star: 0.0,
            exists_before_full_decay: true,
        });
    }

    let steps = (1.0 / SCAN_STEP).round() as usize;
    let mut lo = 0.0;
    for k in 1..=steps {
        let hi = if k == steps {
            1.0
        } else {
            k as f64 * SCAN_STEP
        };
        let f_hi = f(hi);
        let crossed = if k == steps {
            // the bracket touches zero at P = 1 for states on the range edge
            f_hi < -ROOT_TOLERANCE
        } else {
            f_hi <= 0.0
        };
        if crossed {
            let p_star = bisect(&f, lo, hi);
            return Ok(DeathPoint {
                p_star,
                exists_before_full_decay: p_star < 1.0,
            });
        }
        lo = hi;
    }
    Ok(DeathPoint {
        p_star: 1.0,
        exists_before_full_decay: false,
    })
}

/// Bisection for a decreasing function with `f(lo) > 0 ≥ f(hi)`, run down to
/// adjacent floats. Returns the right end of the final bracket, so the
/// concurrence there is already zero.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    debug_assert!(f(hi).abs() <= ROOT_TOLERANCE);
    hi
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeComparison {
    pub theta1: DeathRange,
    pub theta2: DeathRange,
}

impl RangeComparison {
    /// The Θ₁ range contains the Θ₂ range.
    pub fn theta1_contains_theta2(&self) -> bool {
        self.theta1.alpha_min <= self.theta2.alpha_min
    }
}

pub fn compare_death_ranges(r: Acceleration) -> RangeComparison {
    RangeComparison {
        theta1: death_range(Family::Theta1, r),
        theta2: death_range(Family::Theta2, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{c_s1_closed, c_s2_closed, closed_form};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn r(x: f64) -> Acceleration {
        Acceleration::new(x).unwrap()
    }

    /// Plain bisection in α on the raw closed form; shares nothing with the
    /// boundary formulas.
    fn alpha_root(family: Family, r: Acceleration, p: f64) -> f64 {
        let g = |a: f64| closed_form(family, a, r, p).raw;
        let (mut lo, mut hi) = (1e-9, 1.0 - 1e-15);
        assert!(g(lo) > 0.0 && g(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn theta1_boundary_limits() {
        assert_abs_diff_eq!(
            boundary_alpha_theta1(Acceleration::INERTIAL, 1.0).unwrap(),
            FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            boundary_alpha_theta1(Acceleration::INERTIAL, 1e-9).unwrap(),
            1.0,
            epsilon = 1e-8
        );
        assert!(boundary_alpha_theta1(Acceleration::INERTIAL, 0.0).is_err());
    }

    #[test]
    fn theta1_boundary_matches_bisection() {
        let a = boundary_alpha_theta1(r(FRAC_PI_6), 0.5).unwrap();
        // high-precision root of the bracket
        assert_abs_diff_eq!(a, 0.845_154_254_728_516_6, epsilon = 1e-12);
        assert_abs_diff_eq!(
            a,
            alpha_root(Family::Theta1, r(FRAC_PI_6), 0.5),
            epsilon = 1e-12
        );
        assert!(c_s1_closed(a, r(FRAC_PI_6), 0.5).raw.abs() <= 1e-10);
    }

    #[test]
    fn theta2_boundary_values() {
        assert_eq!(boundary_alpha_theta2(Acceleration::MAX, 1.0).unwrap(), 0.0);

        let a = boundary_alpha_theta2(r(FRAC_PI_6), 1.0).unwrap();
        assert_abs_diff_eq!(a, 0.5_f64.sqrt() / FRAC_PI_6.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(a, 0.816_496_580_927_726, epsilon = 1e-12);

        let a = boundary_alpha_theta2(r(FRAC_PI_8), 0.3).unwrap();
        assert_abs_diff_eq!(a, 0.976_503_768_450_378, epsilon = 1e-12);
        assert_abs_diff_eq!(
            a,
            alpha_root(Family::Theta2, r(FRAC_PI_8), 0.3),
            epsilon = 1e-10
        );
        assert!(c_s2_closed(a, r(FRAC_PI_8), 0.3).raw.abs() <= 1e-10);
    }

    #[test]
    fn theta2_boundary_has_no_inertial_root() {
        assert!(matches!(
            boundary_alpha_theta2(Acceleration::INERTIAL, 0.5),
            Err(Error::NoRoot(_))
        ));
    }

    #[test]
    fn death_range_endpoints() {
        let t1 = death_range(Family::Theta1, Acceleration::INERTIAL);
        assert_abs_diff_eq!(t1.alpha_min, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(t1.contains(0.9) && !t1.contains(0.5) && t1.contains(-0.9));

        let t2 = death_range(Family::Theta2, Acceleration::INERTIAL);
        assert_eq!(t2.alpha_min, 1.0);
        assert!(t2.is_empty());

        for family in Family::ALL {
            assert_eq!(death_range(family, Acceleration::MAX).alpha_min, 0.0);
        }
    }

    #[test]
    fn range_comparison() {
        let cmp = compare_death_ranges(Acceleration::INERTIAL);
        assert!(cmp.theta1_contains_theta2());
        assert!(cmp.theta1.alpha_min < cmp.theta2.alpha_min);

        let cmp = compare_death_ranges(Acceleration::MAX);
        assert_eq!((cmp.theta1.alpha_min, cmp.theta2.alpha_min), (0.0, 0.0));

        let cmp = compare_death_ranges(r(FRAC_PI_6));
        assert_abs_diff_eq!(
            cmp.theta1.alpha_min,
            0.577_350_269_189_625_8,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(cmp.theta2.alpha_min, 0.816_496_580_927_726, epsilon = 1e-12);
        assert!(cmp.theta1_contains_theta2());
    }

    #[test]
    fn bell_inertial_dies_only_at_full_decay() {
        let d = find_death_point(Family::Theta1, FRAC_1_SQRT_2, Acceleration::INERTIAL).unwrap();
        assert_eq!(d.p_star, 1.0);
        assert!(!d.exists_before_full_decay);
        let d = find_death_point(Family::Theta2, 0.5, Acceleration::INERTIAL).unwrap();
        assert_eq!(d.p_star, 1.0);
        assert!(!d.exists_before_full_decay);
    }

    #[test]
    fn interior_death_point_round_trips_through_boundary() {
        let d = find_death_point(Family::Theta1, 0.9, Acceleration::INERTIAL).unwrap();
        assert!(d.exists_before_full_decay);
        assert_abs_diff_eq!(d.p_star, 0.484_322_104_837_852_6, epsilon = 1e-12);
        let a = boundary_alpha_theta1(Acceleration::INERTIAL, d.p_star).unwrap();
        assert_abs_diff_eq!(a, 0.9, epsilon = 1e-8);

        let c_at = c_s1_closed(0.9, Acceleration::INERTIAL, d.p_star).value;
        let c_before = c_s1_closed(0.9, Acceleration::INERTIAL, d.p_star - 1e-6).value;
        assert!(c_at <= 1e-10 && c_before > 0.0);
    }

    #[test]
    fn accelerated_death_points_match_high_precision_roots() {
        let d = find_death_point(Family::Theta1, 0.9, r(std::f64::consts::PI / 12.0)).unwrap();
        assert_abs_diff_eq!(d.p_star, 0.460_028_660_837_677_9, epsilon = 1e-12);
        let d = find_death_point(Family::Theta2, 0.9, r(FRAC_PI_6)).unwrap();
        assert_abs_diff_eq!(d.p_star, 0.617_814_259_549_956, epsilon = 1e-12);
    }

    #[test]
    fn product_state_is_dead_from_the_start() {
        let d = find_death_point(Family::Theta1, 1.0, r(0.2)).unwrap();
        assert_eq!(d.p_star, 0.0);
    }

    #[test]
    fn death_point_symmetric_in_sign_of_alpha() {
        for family in Family::ALL {
            let a = find_death_point(family, 0.93, r(0.5)).unwrap();
            let b = find_death_point(family, -0.93, r(0.5)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn root_consistency_spot_grid() {
        for i in 1..=10 {
            let p = i as f64 / 10.0;
            for j in 0..=10 {
                let rr = r(FRAC_PI_4 * j as f64 / 10.0);
                let a1 = boundary_alpha_theta1(rr, p).unwrap();
                assert!(c_s1_closed(a1, rr, p).raw.abs() <= 1e-10);
                if j > 0 {
                    let a2 = boundary_alpha_theta2(rr, p).unwrap();
                    assert!(a2 <= 1.0 + 1e-12);
                    assert!(c_s2_closed(a2, rr, p).raw.abs() <= 1e-10);
                }
            }
        }
    }
}

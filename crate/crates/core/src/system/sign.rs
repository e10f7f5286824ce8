//! Certified sign classification of real trigonometric polynomials.
//!
//! Sampling on a uniform grid with a Lipschitz bound settles most inputs.
//! When it does not (a polynomial that touches zero, such as `1 + cos t`),
//! the half-angle substitution `z = tan(t/2)` turns `b` into a rational
//! polynomial `R(z) / (1 + z^2)^D`, and `b` changes sign exactly when `R`
//! has a real root of odd multiplicity, which a Sturm sequence on the
//! square-free factors decides.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::RatPoly;
use crate::gevrey::{ExactTrig, RealTrig};

/// Largest sampling grid tried before falling back to exact arithmetic.
const MAX_GRID: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignProfile {
    IdenticallyZero,
    NonNegativeNotZero,
    NonPositiveNotZero,
    ChangesSign,
    /// Neither sampling nor exact arithmetic settled the sign.
    Unknown,
}

impl SignProfile {
    /// `true` for the two profiles satisfying the fixed-sign condition.
    pub fn is_definite(&self) -> bool {
        matches!(self, SignProfile::NonNegativeNotZero | SignProfile::NonPositiveNotZero)
    }
}

/// Profile plus how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub profile: SignProfile,
    /// `sampling`, `exact` or `coefficients`.
    pub method: String,
    /// Grid size of the last sampling pass.
    pub grid: usize,
    /// `true` when the result rests on a float tolerance.
    pub approximate: bool,
    pub min_sample: f64,
    pub max_sample: f64,
}

/// Classifies `b`.
pub fn sign_analysis(b: &RealTrig) -> SignReport {
    if b.is_zero() {
        return SignReport {
            profile: SignProfile::IdenticallyZero,
            method: "coefficients".into(),
            grid: 0,
            approximate: !b.is_exact(),
            min_sample: 0.0,
            max_sample: 0.0,
        };
    }
    let lipschitz = b.lipschitz();
    let mut n = 64 * (b.degree() + 1);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    loop {
        let threshold = lipschitz * std::f64::consts::PI / n as f64;
        let step = std::f64::consts::TAU / n as f64;
        let mut pos = false;
        let mut neg = false;
        let mut all_pos = true;
        let mut all_neg = true;
        for k in 0..n {
            let v = b.eval(step * k as f64);
            lo = lo.min(v);
            hi = hi.max(v);
            // a small safety factor for the evaluation round-off
            let margin = threshold + 1e-13 * b.max_coeff();
            pos |= v > margin;
            neg |= v < -margin;
            all_pos &= v > margin;
            all_neg &= v < -margin;
        }
        let profile = if pos && neg {
            Some(SignProfile::ChangesSign)
        } else if all_pos {
            Some(SignProfile::NonNegativeNotZero)
        } else if all_neg {
            Some(SignProfile::NonPositiveNotZero)
        } else {
            None
        };
        if let Some(profile) = profile {
            return SignReport { profile, method: "sampling".into(), grid: n, approximate: false, min_sample: lo, max_sample: hi };
        }
        if n >= MAX_GRID {
            break;
        }
        n *= 2;
    }
    // Float coefficients are exact binary rationals, so the exact test still
    // decides the polynomial as given.
    let exact = match b.exact() {
        Some(e) => Some(e.clone()),
        None => exact_from_floats(b),
    };
    let profile = match exact {
        Some(e) => exact_profile(&e),
        None => SignProfile::Unknown,
    };
    SignReport { profile, method: "exact".into(), grid: n, approximate: false, min_sample: lo, max_sample: hi }
}

fn exact_from_floats(b: &RealTrig) -> Option<ExactTrig> {
    let conv = |x: f64| BigRational::from_float(x);
    Some(ExactTrig {
        c0: conv(b.constant())?,
        cos: b.cos_coeffs().iter().map(|&x| conv(x)).collect::<Option<_>>()?,
        sin: b.sin_coeffs().iter().map(|&x| conv(x)).collect::<Option<_>>()?,
    })
}

/// `(Re, Im)` of `(1 + i z)^n` as rational polynomials.
fn re_im_power(n: usize) -> (RatPoly, RatPoly) {
    let mut re = vec![BigRational::zero(); n + 1];
    let mut im = vec![BigRational::zero(); n + 1];
    let mut binom = BigInt::one();
    for j in 0..=n {
        let c = BigRational::from_integer(binom.clone());
        match j % 4 {
            0 => re[j] = c,
            1 => im[j] = c,
            2 => re[j] = -c,
            _ => im[j] = -c,
        }
        binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    (RatPoly::new(re), RatPoly::new(im))
}

/// `R(z)` with `b(2 arctan z) = R(z) / (1 + z^2)^D`.
pub fn half_angle_polynomial(b: &ExactTrig) -> RatPoly {
    let d = b.cos.len().max(b.sin.len());
    let one_plus_z2 = RatPoly::new(vec![BigRational::one(), BigRational::zero(), BigRational::one()]);
    let mut r = one_plus_z2.pow(d).scale(&b.c0);
    for k in 1..=d {
        let a = b.cos.get(k - 1).cloned().unwrap_or_else(BigRational::zero);
        let s = b.sin.get(k - 1).cloned().unwrap_or_else(BigRational::zero);
        if a.is_zero() && s.is_zero() {
            continue;
        }
        let (re, im) = re_im_power(2 * k);
        let numer = re.scale(&a).add(&im.scale(&s));
        r = r.add(&numer.mul(&one_plus_z2.pow(d - k)));
    }
    r
}

/// Exact profile of a non-zero polynomial.
fn exact_profile(b: &ExactTrig) -> SignProfile {
    let r = half_angle_polynomial(b);
    if r.is_zero() {
        return SignProfile::IdenticallyZero;
    }
    if r.changes_sign_on_reals() {
        return SignProfile::ChangesSign;
    }
    // fixed sign: the mean carries it, unless the mean is zero, which
    // would force b to vanish identically
    if b.c0.is_positive() {
        SignProfile::NonNegativeNotZero
    } else if b.c0.is_negative() {
        SignProfile::NonPositiveNotZero
    } else {
        SignProfile::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig(c0: &str, cos: &[&str], sin: &[&str]) -> RealTrig {
        RealTrig::from_strs(c0, cos, sin).unwrap()
    }

    #[test]
    fn basic_profiles() {
        assert_eq!(sign_analysis(&trig("0", &[], &["1"])).profile, SignProfile::ChangesSign);
        assert_eq!(sign_analysis(&RealTrig::zero()).profile, SignProfile::IdenticallyZero);
        assert_eq!(sign_analysis(&trig("-1", &[], &[])).profile, SignProfile::NonPositiveNotZero);
        let r = sign_analysis(&trig("2", &["1"], &[]));
        assert_eq!((r.profile, r.method.as_str()), (SignProfile::NonNegativeNotZero, "sampling"));
    }

    #[test]
    fn touching_zero_is_certified_exactly() {
        let r = sign_analysis(&trig("1", &["1"], &[]));
        assert_eq!(r.profile, SignProfile::NonNegativeNotZero);
        assert_eq!(r.method, "exact");
        let r = sign_analysis(&trig("-1/2", &["-1/2"], &[]));
        assert_eq!(r.profile, SignProfile::NonPositiveNotZero);
        // (1 - cos t)^2 = 3/2 - 2 cos t + 1/2 cos 2t touches zero to second order
        assert_eq!(sign_analysis(&trig("3/2", &["-2", "1/2"], &[])).profile, SignProfile::NonNegativeNotZero);
        // sin^3 changes sign through a triple root
        assert_eq!(sign_analysis(&trig("0", &[], &["3/4", "0", "-1/4"])).profile, SignProfile::ChangesSign);
    }

    #[test]
    fn float_input() {
        let b = RealTrig::from_floats(1.0, vec![1.0], vec![]);
        assert_eq!(sign_analysis(&b).profile, SignProfile::NonNegativeNotZero);
        let z = RealTrig::from_floats(0.0, vec![1e-16], vec![]);
        let r = sign_analysis(&z);
        assert!(r.profile == SignProfile::IdenticallyZero && r.approximate);
    }

    #[test]
    fn half_angle_identity() {
        let b = trig("1/3", &["1", "-2/5"], &["3", "0", "1/7"]);
        let r = half_angle_polynomial(b.exact().unwrap());
        for &z in &[-3.0f64, -0.4, 0.0, 0.9, 5.0] {
            let zr = BigRational::from_float(z).unwrap();
            let rv = crate::exact::rational_to_f64(&r.eval(&zr));
            let t = 2.0 * z.atan();
            assert!((rv / (1.0 + z * z).powi(3) - b.eval(t)).abs() < 1e-12);
        }
    }
}

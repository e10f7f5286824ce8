//! The index set `Delta(m) = {(k_1..k_m) : k_1 + 2k_2 + ... + m k_m = m}`
//! and the identities built on it.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::GevreyError;

pub const MAX_DELTA_ORDER: usize = 30;
pub const MAX_SUM_ORDER: usize = 20;

/// All tuples of `Delta(m)`, ordered by decreasing `k_1`, then `k_2`, ...
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSet {
    pub m: usize,
    pub tuples: Vec<Vec<u32>>,
}

impl DeltaSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

fn check_range(m: usize, max: usize) -> Result<(), GevreyError> {
    if m == 0 || m > max {
        return Err(GevreyError::OutOfRange { what: "m", value: m, max });
    }
    Ok(())
}

pub fn enumerate_delta(m: usize) -> Result<DeltaSet, GevreyError> {
    check_range(m, MAX_DELTA_ORDER)?;
    let mut tuples = Vec::new();
    let mut current = vec![0u32; m];
    fill(1, m, &mut current, &mut tuples);
    Ok(DeltaSet { m, tuples })
}

fn fill(level: usize, remaining: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let m = current.len();
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    if level > m {
        return;
    }
    for k in (0..=remaining / level).rev() {
        current[level - 1] = k as u32;
        fill(level + 1, remaining - k * level, current, out);
    }
    current[level - 1] = 0;
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

fn check_tuple(tuple: &[u32]) -> Result<usize, GevreyError> {
    let m = tuple.len();
    let weight: usize = tuple.iter().enumerate().map(|(i, &k)| (i + 1) * k as usize).sum();
    if m == 0 || weight != m {
        return Err(GevreyError::Malformed(format!("{tuple:?} is not in Delta({m})")));
    }
    Ok(m)
}

/// `(k!)^s prod_l (l!)^{(s-1) k_l} <= k! (m!)^{s-1}` with `s = a/b > 1`,
/// checked exactly after raising both sides to the power `b`.
pub fn check_lemma_product_bound(tuple: &[u32], s: &BigRational) -> Result<bool, GevreyError> {
    let m = check_tuple(tuple)?;
    if *s <= BigRational::one() {
        return Err(GevreyError::OrderError(crate::exact::rational_to_f64(s)));
    }
    let to_usize = |x: &BigInt| -> Result<usize, GevreyError> {
        usize::try_from(x).map_err(|_| GevreyError::Malformed("order too large".into()))
    };
    let a = to_usize(s.numer())?;
    let b = to_usize(s.denom())?;
    let k: usize = tuple.iter().map(|&x| x as usize).sum();
    let kf = factorial(k);
    let mut lhs = num_traits::pow(kf.clone(), a);
    for (i, &kl) in tuple.iter().enumerate() {
        lhs *= num_traits::pow(factorial(i + 1), (a - b) * kl as usize);
    }
    let rhs = num_traits::pow(kf, b) * num_traits::pow(factorial(m), a - b);
    Ok(lhs <= rhs)
}

/// Floating-point version for irrational orders: compares logarithms with a
/// relative safety margin and reports `true` only when the margin is met.
pub fn check_lemma_product_bound_f64(tuple: &[u32], s: f64) -> Result<bool, GevreyError> {
    let m = check_tuple(tuple)?;
    if !(s > 1.0 && s.is_finite()) {
        return Err(GevreyError::OrderError(s));
    }
    let lf = |n: usize| crate::exact::ln_biguint(&factorial(n));
    let k: usize = tuple.iter().map(|&x| x as usize).sum();
    let mut lhs = s * lf(k);
    for (i, &kl) in tuple.iter().enumerate() {
        lhs += (s - 1.0) * kl as f64 * lf(i + 1);
    }
    let rhs = lf(k) + (s - 1.0) * lf(m);
    Ok(lhs <= rhs + 1e-12 * rhs.abs().max(1.0))
}

/// `sum_{Delta(m)} k!/(k_1! ... k_m!) R^k`, which equals `R (1+R)^{m-1}`.
pub fn sum_over_delta(m: usize, r: &BigRational) -> Result<BigRational, GevreyError> {
    check_range(m, MAX_SUM_ORDER)?;
    let set = enumerate_delta(m)?;
    let mut total = BigRational::zero();
    for tuple in &set.tuples {
        let k: usize = tuple.iter().map(|&x| x as usize).sum();
        let denom = tuple.iter().fold(BigUint::one(), |acc, &kl| acc * factorial(kl as usize));
        let coeff = BigRational::new(BigInt::from(factorial(k)), BigInt::from(denom));
        total += coeff * num_traits::pow(r.clone(), k);
    }
    Ok(total)
}

/// `d^m e^g / e^g` from the derivatives `g_derivs[l-1] = g^{(l)}`, summed over
/// `Delta(m)` (Faa di Bruno).
pub fn exp_composition_derivatives<T: Real>(g_derivs: &[Complex<T>], m: usize) -> Result<Complex<T>, GevreyError> {
    check_range(m, MAX_DELTA_ORDER)?;
    if g_derivs.len() < m {
        return Err(GevreyError::InsufficientData { needed: m, got: g_derivs.len() });
    }
    let set = enumerate_delta(m)?;
    let fact: Vec<T> = (0..=m).map(|n| T::lit((1..=n).map(|k| k as f64).product())).collect();
    let mut total = Complex::new(T::zero(), T::zero());
    for tuple in &set.tuples {
        let mut term = Complex::new(fact[m], T::zero());
        for (i, &kl) in tuple.iter().enumerate() {
            if kl == 0 {
                continue;
            }
            let base = g_derivs[i] / fact[i + 1];
            term = term * base.powu(kl) / fact[kl as usize];
        }
        total += term;
    }
    Ok(total)
}

/// Complete Bell values `Y_0..=Y_m` with `Y_n = d^n e^g / e^g`, from
/// `Y_{n+1} = sum_k C(n,k) Y_{n-k} g^{(k+1)}`.
pub fn bell_recurrence<T: Real>(g_derivs: &[Complex<T>], m: usize) -> Result<Vec<Complex<T>>, GevreyError> {
    if g_derivs.len() < m {
        return Err(GevreyError::InsufficientData { needed: m, got: g_derivs.len() });
    }
    let mut y = vec![Complex::new(T::one(), T::zero())];
    for n in 0..m {
        let mut binom = T::one();
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..=n {
            acc += y[n - k] * g_derivs[k] * binom;
            binom = binom * T::from_usize_lossy(n - k) / T::from_usize_lossy(k + 1);
        }
        y.push(acc);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_delta_sets() {
        assert_eq!(enumerate_delta(1).unwrap().tuples, vec![vec![1]]);
        assert_eq!(enumerate_delta(3).unwrap().tuples, vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(enumerate_delta(6).unwrap().len(), 11);
        assert_eq!(enumerate_delta(30).unwrap().len(), 5604);
        assert!(enumerate_delta(0).is_err() && enumerate_delta(31).is_err());
    }

    #[test]
    fn product_bound_examples() {
        let two = BigRational::from_integer(2.into());
        assert!(check_lemma_product_bound(&[0, 1], &two).unwrap());
        assert!(check_lemma_product_bound(&[1], &BigRational::new(3.into(), 2.into())).unwrap());
        assert!(check_lemma_product_bound_f64(&[0, 1], 2.0).unwrap());
        assert!(check_lemma_product_bound(&[1, 1], &two).is_err());
    }

    #[test]
    fn sum_examples() {
        let one = BigRational::one();
        assert_eq!(sum_over_delta(2, &one).unwrap(), BigRational::from_integer(2.into()));
        let r = BigRational::new(3.into(), 7.into());
        assert_eq!(sum_over_delta(1, &r).unwrap(), r);
        let expect = &r * num_traits::pow(BigRational::new(10.into(), 7.into()), 4);
        assert_eq!(sum_over_delta(5, &r).unwrap(), expect);
    }

    #[test]
    fn composition_examples() {
        let a = Complex::new(0.3, -1.1);
        let b = Complex::new(2.0, 0.5);
        assert_eq!(exp_composition_derivatives(&[a], 1).unwrap(), a);
        assert!((exp_composition_derivatives(&[a, b], 2).unwrap() - (a * a + b)).norm() < 1e-14);
        let g = [Complex::new(0.0, 1.0), Complex::default(), Complex::default(), Complex::default()];
        assert!((exp_composition_derivatives(&g, 4).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn recurrence_agrees_with_delta_sum() {
        let g: Vec<Complex<f64>> = (1..=12).map(|l| Complex::new((l as f64).sin(), 0.5 / l as f64)).collect();
        let y = bell_recurrence(&g, 12).unwrap();
        for m in 1..=12 {
            let d = exp_composition_derivatives(&g, m).unwrap();
            assert!((d - y[m]).norm() <= 1e-10 * d.norm().max(1.0), "m={m}");
        }
    }
}

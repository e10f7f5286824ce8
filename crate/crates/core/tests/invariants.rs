use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use torus_hypo::diophantine::{ContinuedFraction, DigitSpec};
use torus_hypo::gevrey::{check_lemma_product_bound_f64, enumerate_delta, sum_over_delta, RealTrig};
use torus_hypo::normalform::{apply_gauge, build_normal_form, GaugeDirection};
use torus_hypo::system::{Coefficient, Order, SystemSpec, Tube};
use torus_hypo::{Field, Trig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_sum_has_closed_form(m in 1usize..=12, p in -30i64..=30, q in 1i64..=30) {
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        let expect = &r * num_traits::pow(BigRational::one() + &r, m - 1);
        prop_assert_eq!(sum_over_delta(m, &r).unwrap(), expect);
    }

    #[test]
    fn lemma_bound_holds_for_every_order(m in 1usize..=10, s in 1.0f64..4.0) {
        for tuple in &enumerate_delta(m).unwrap().tuples {
            prop_assert!(check_lemma_product_bound_f64(tuple, s).unwrap());
        }
    }

    #[test]
    fn consecutive_convergents_are_unimodular(digits in prop::collection::vec(1u32..500, 2..24)) {
        let spec = DigitSpec::Explicit { digits: digits.iter().map(u32::to_string).collect() };
        let cf = ContinuedFraction::expand(&spec, digits.len()).unwrap();
        let pairs = cf.exact_pairs(digits.len()).unwrap();
        for w in pairs.windows(2) {
            let (p0, q0) = (BigInt::from(w[0].0.clone()), BigInt::from(w[0].1.clone()));
            let (p1, q1) = (BigInt::from(w[1].0.clone()), BigInt::from(w[1].1.clone()));
            let det = p1 * q0 - p0 * q1;
            prop_assert!(det == BigInt::one() || det == -BigInt::one());
        }
    }

    #[test]
    fn antiderivative_inverts_derivative(coeffs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6)) {
        let modes: Vec<(i64, Complex<f64>)> = coeffs.iter().enumerate().map(|(k, (re, im))| (k as i64 + 1, Complex::new(*re, *im))).collect();
        let p = Trig::from_modes(&modes);
        let (back, mean) = p.derivative().antiderivative();
        prop_assert!(mean.norm() < 1e-14);
        for t in [0.0, 1.0, 2.5, 4.0] {
            prop_assert!((back.eval(t) - p.eval(t) + p.coeff(0)).norm() < 1e-12);
        }
    }

    #[test]
    fn gauge_is_unitary_and_invertible(c1 in -2.0f64..2.0, s1 in -2.0f64..2.0, c2 in -1.0f64..1.0) {
        let a = RealTrig::from_floats(0.25, vec![c1, c2], vec![s1]);
        let spec = SystemSpec::new(Order::Gevrey(2.0), vec![Tube::new(Coefficient::Trig(a), RealTrig::from_floats(0.0, vec![], vec![1.0]))]);
        let data = build_normal_form(&spec);
        let ones = Field::from_fn(1, 64, -5..=5, |xi, t| Complex::from_polar(1.0, xi as f64 * t[0].sin()));
        let there = apply_gauge(&ones, &data, GaugeDirection::Forward).unwrap();
        for (_, block) in there.modes() {
            for z in block {
                prop_assert!((z.norm() - 1.0).abs() < 1e-13);
            }
        }
        let back = apply_gauge(&there, &data, GaugeDirection::Inverse).unwrap();
        prop_assert!(back.sub(&ones).unwrap().max_abs() < 1e-13);
    }
}

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_hypo::normalform::{apply_gauge, build_normal_form, GaugeDirection};
use torus_hypo::solver::{apply_operator, residual, solve_by_division, solve_single_tube, TubeSolveOptions};
use torus_hypo::system::{classify_system, DecideOptions, Order, SystemSpec};
use torus_hypo::{Decision, Field};

/// Smooth random field; modes with `eta = 0` at `xi = 0` are left out.
fn random_field(seed: u64, n: usize, nt: usize, xi_max: i64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = Field::zero(n, nt);
    for xi in -xi_max..=xi_max {
        let terms: Vec<(Vec<i64>, Complex<f64>)> = (0..4)
            .map(|_| {
                let eta: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
                (eta, Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            })
            .filter(|(eta, _)| xi != 0 || eta[0] != 0)
            .collect();
        let block = Field::from_fn(n, nt, [xi], |_, t| {
            terms.iter().map(|(eta, c)| c * Complex::from_polar(1.0, eta.iter().zip(t).map(|(e, t)| *e as f64 * t).sum())).sum()
        });
        u.insert(xi, block.get(xi).unwrap().to_vec()).unwrap();
    }
    u
}

fn spec(json: &str) -> SystemSpec {
    SystemSpec::from_json_str(json).expect("valid spec")
}

#[test]
fn division_inverts_the_real_fields() {
    let spec = spec(r#"{"n":2,"s":"2","tubes":[{"a":{"cf":"constant:2"},"b":{"zero":true}},{"a":"1/3","b":{"zero":true}}]}"#);
    let mut u = random_field(7, 2, 16, 4);
    // the (eta, xi) = 0 mode is not determined by the equations
    let mut zero = u.get(0).unwrap().to_vec();
    let mean = zero.iter().sum::<Complex<f64>>() / zero.len() as f64;
    zero.iter_mut().for_each(|z| *z -= mean);
    u.insert(0, zero).unwrap();
    let f: Vec<Field> = (0..2).map(|j| apply_operator(&spec.tubes[j], j, &u).unwrap()).collect();
    let sol = solve_by_division(&spec, &f, 60).unwrap();
    assert_eq!(sol.j, [1, 2]);
    assert!(sol.compatibility_defect < 1e-12);
    assert!(sol.u.sub(&u).unwrap().max_abs() < 1e-11);
    assert!(residual(&spec, &sol.u, &f).unwrap().iter().all(|r| *r < 1e-11));
}

#[test]
fn division_rejects_incompatible_data() {
    let spec = spec(r#"{"n":2,"s":"2","tubes":[{"a":{"cf":"constant:2"},"b":{"zero":true}},{"a":"1/3","b":{"zero":true}}]}"#);
    let f = [random_field(1, 2, 16, 3), random_field(2, 2, 16, 3)];
    assert!(solve_by_division(&spec, &f, 60).is_err());
}

#[test]
fn gauged_solve_matches_direct_solve() {
    // a non-constant `a` is removed by the gauge, then the tube is solved
    let spec = spec(r#"{"n":1,"s":"2","tubes":[{"a":{"const":"1/3","cos":["1"]},"b":{"const":"-1","cos":["1/2"]}}]}"#);
    let u = random_field(3, 1, 64, 3);
    let f = apply_operator(&spec.tubes[0], 0, &u).unwrap();
    let data = build_normal_form(&spec);
    assert!(!data.is_trivial());
    let g = apply_gauge(&f, &data, GaugeDirection::Forward).unwrap();
    let v = solve_single_tube(0, &data.normalized, &g, &TubeSolveOptions::default()).unwrap();
    let back = apply_gauge(&v, &data, GaugeDirection::Inverse).unwrap();
    assert!(back.sub(&u).unwrap().max_abs() < 1e-9);
}

#[test]
fn binary_format_round_trips() {
    let u = random_field(9, 2, 8, 2);
    let mut bytes = Vec::new();
    u.write_binary(&mut bytes).unwrap();
    let back = Field::read_binary(bytes.as_slice()).unwrap();
    assert_eq!(back.sub(&u).unwrap().max_abs(), 0.0);
    assert!(Field::read_binary(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn gevrey_and_smooth_verdicts_split_on_a_liouville_average() {
    let spec = spec(
        r#"{"n":2,"s":"2","tubes":[{"a":{"cf":"factorial_pow10"},"b":{"zero":true}},{"a":"1/2","b":{"zero":true}}]}"#,
    );
    let (_, gevrey) = classify_system(&spec, Order::Gevrey(2.0), DecideOptions::default()).unwrap();
    let (_, smooth) = classify_system(&spec, Order::Smooth, DecideOptions::default()).unwrap();
    assert_eq!(gevrey.decision, Decision::Hypoelliptic);
    assert_eq!(smooth.decision, Decision::NotHypoelliptic);
}

use std::sync::Arc;

use asymmetry::series::{rat, ratio, Context, PowerSeries, Rational};
use num_traits::One;
use proptest::prelude::*;

const ORDER: u32 = 5;

fn ctx() -> Arc<Context> {
    Context::new(&["t", "u", "x"], "x").unwrap()
}

fn series_with(constant: Option<i64>) -> impl Strategy<Value = PowerSeries> {
    let lo = if constant.is_some() { 1 } else { 0 };
    prop::collection::vec((0u32..=2, 0u32..=1, lo..=ORDER, -5i64..=5, 1i64..=3), 0..8).prop_map(
        move |terms| {
            let mut t: Vec<(Vec<u32>, Rational)> = terms
                .into_iter()
                .map(|(a, b, c, p, q)| (vec![a, b, c], ratio(p, q)))
                .collect();
            if let Some(k) = constant {
                t.push((vec![0, 0, 0], rat(k)));
            }
            PowerSeries::from_terms(&ctx(), ORDER, t).unwrap()
        },
    )
}

fn any_series() -> impl Strategy<Value = PowerSeries> {
    series_with(None)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz(f in any_series(), g in any_series()) {
        for v in ["t", "u"] {
            let lhs = f.mul(&g).unwrap().derivative(v).unwrap();
            let rhs = f.derivative(v).unwrap().mul(&g).unwrap()
                .add(&f.mul(&g.derivative(v).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn records_round_trip(f in any_series()) {
        let back = PowerSeries::from_records(f.context(), f.order(), &f.to_records()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn substitution_is_a_ring_map(f in any_series(), g in any_series(), s in any_series()) {
        let sub = |h: &PowerSeries| h.substitute("t", &s).unwrap();
        prop_assert_eq!(sub(&f.mul(&g).unwrap()), sub(&f).mul(&sub(&g)).unwrap());
        prop_assert_eq!(sub(&f.add(&g).unwrap()), sub(&f).add(&sub(&g)).unwrap());
    }

    #[test]
    fn rational_powers_compose(f in series_with(Some(1)), p in -3i64..=3, q in 1i64..=3) {
        let a = ratio(p, q);
        let lhs = f.pow_rational(&a).unwrap().pow_rational(&rat(q)).unwrap();
        prop_assert_eq!(lhs, f.pow_rational(&rat(p)).unwrap());
        if p >= 0 {
            prop_assert_eq!(f.pow(p as u32).unwrap(), f.pow_rational(&rat(p)).unwrap());
        }
    }

    #[test]
    fn specialization_commutes_with_product(f in any_series(), g in any_series(), p in -2i64..=2) {
        let at = [("t", rat(p)), ("u", Rational::one())];
        let sp = |h: &PowerSeries| h.specialize(&at).unwrap();
        prop_assert_eq!(sp(&f.mul(&g).unwrap()), sp(&f).mul(&sp(&g)).unwrap());
    }

    #[test]
    fn egf_product_counts(f in any_series(), g in any_series()) {
        let lhs = f.egf_scaled().binomial_mul(&g.egf_scaled()).unwrap();
        let rhs = f.mul(&g).unwrap().egf_scaled();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn exp_of_log_of_geometric() {
    let c = ctx();
    let x = PowerSeries::var(&c, 8, "x").unwrap();
    let geo = PowerSeries::one(&c, 8).sub(&x).unwrap().invert().unwrap();
    // -log(1-x) = sum x^n/n, whose exponential is 1/(1-x)
    let terms = (1..=8).map(|n| (vec![0, 0, n], ratio(1, n as i64)));
    let log = PowerSeries::from_terms(&c, 8, terms).unwrap();
    assert_eq!(log.exp().unwrap(), geo);
    assert!(geo.size_coefficients().iter().all(|a| a.is_one()));
}

use connexion_core::series::{ComplexRational, PuiseuxSeries, SeriesLiteral};
use num_complex::Complex64;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = ComplexRational> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| ComplexRational::from_ratios(a, b, c, d))
}

/// Exact Laurent polynomial with exponents in `[-3, 4]`.
fn laurent() -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((-3i64..=4, coeff()), 0..5).prop_map(PuiseuxSeries::laurent)
}

proptest! {
    #[test]
    fn ring_axioms(f in laurent(), g in laurent(), h in laurent()) {
        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        prop_assert!(f.sub(&f).is_exact_zero());
    }

    #[test]
    fn derivation_is_leibniz(f in laurent(), g in laurent()) {
        prop_assert_eq!(f.mul(&g).derive(), f.derive().mul(&g).add(&f.mul(&g.derive())));
    }

    #[test]
    fn inverse_to_truncation(f in laurent()) {
        prop_assume!(!f.is_zero());
        let inv = f.inverse().unwrap();
        prop_assert!(f.mul(&inv).eq_to_trunc(&PuiseuxSeries::one(1)));
    }

    #[test]
    fn literal_round_trip(f in laurent()) {
        let lit = SeriesLiteral::from_series(&f);
        let json = serde_json::to_string(&lit).unwrap();
        let back: SeriesLiteral = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_series().unwrap(), f);
    }

    /// `f(t^m)` evaluated at `t` agrees with `f` at `z = t^m`.
    #[test]
    fn substitution_matches_evaluation(f in laurent(), m in 1u32..4, r in 0.2f64..0.9, th in -3.0f64..3.0) {
        let t = Complex64::from_polar(r, th);
        let lhs = f.substitute_power(m).eval(t);
        let rhs = f.eval(t.powu(m));
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }
}

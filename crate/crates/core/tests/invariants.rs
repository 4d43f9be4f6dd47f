use normwalk_core::census::{census, count_bruteforce};
use normwalk_core::functions::FunctionSpec;
use normwalk_core::measure::mu_k_integral;
use normwalk_core::rng::replica_rng;
use normwalk_core::stats::ks_statistic;
use normwalk_core::summability::{decide_iv, decide_v};
use normwalk_core::{NormFamily, NormSpec, UnimodularMatrix};
use proptest::prelude::*;
use rand::Rng;

fn family() -> impl Strategy<Value = NormFamily> {
    prop_oneof![Just(NormFamily::Max), Just(NormFamily::L1), Just(NormFamily::WeightedL1)]
}

/// Product of shears with random signs.
fn unimodular(d: usize) -> impl Strategy<Value = UnimodularMatrix> {
    prop::collection::vec((0..d, 0..d, prop::bool::ANY), 1..5).prop_map(move |ops| {
        let mut m: Vec<i64> = (0..d * d).map(|i| (i % (d + 1) == 0) as i64).collect();
        for (r, c, neg) in ops {
            if r == c {
                continue;
            }
            let s = if neg { -1 } else { 1 };
            // row_r += s · row_c
            for j in 0..d {
                m[r * d + j] += s * m[c * d + j];
            }
        }
        UnimodularMatrix::new(d, m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_axioms(fam in family(), x in prop::collection::vec(-30i64..30, 3), y in prop::collection::vec(-30i64..30, 3), t in -5i64..5) {
        let s = NormSpec::new(fam, 3).unwrap();
        let nx = s.norm_value(&x).unwrap();
        let ny = s.norm_value(&y).unwrap();
        let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(s.norm_value(&sum).unwrap() <= nx + ny);
        let scaled: Vec<i64> = x.iter().map(|a| a * t).collect();
        prop_assert_eq!(s.norm_value(&scaled).unwrap(), t.unsigned_abs() * nx);
        prop_assert_eq!(nx == 0, x.iter().all(|&c| c == 0));
    }

    #[test]
    fn unimodular_transforms_preserve_counts(fam in family(), a in unimodular(3)) {
        let base = NormSpec::new(fam, 3).unwrap();
        let moved = base.clone().with_transform(a).unwrap();
        prop_assert_eq!(count_bruteforce(&moved, 4).unwrap().counts, count_bruteforce(&base, 4).unwrap().counts);
    }

    #[test]
    fn sphere_measures_are_probability_measures(fam in family(), k in 1u64..20) {
        let s = NormSpec::new(fam, 3).unwrap();
        prop_assert!((mu_k_integral(&s, k, &|_| 1.0).unwrap() - 1.0).abs() < 1e-12);
        let sq = mu_k_integral(&s, k, &|x| x[0] * x[0]).unwrap();
        prop_assert!((0.0..=1.0).contains(&sq));
    }

    #[test]
    fn criteria_agree_on_power_laws(beta in 0.0f64..6.0, gamma in -3.0f64..3.0, fam in family()) {
        let c = census(&NormSpec::new(fam, 3).unwrap(), 200, false).unwrap();
        for f in [FunctionSpec::power_law(beta), FunctionSpec::power_log(beta, gamma)] {
            prop_assert_eq!(decide_iv(&f, &c).verdict, decide_v(&f).verdict);
        }
    }

    #[test]
    fn function_specs_round_trip(beta in 0.0f64..8.0, gamma in -4.0f64..4.0, k in 0usize..50) {
        for f in [
            FunctionSpec::power_law(beta),
            FunctionSpec::power_log(beta, gamma),
            FunctionSpec::indicator_le(k),
            FunctionSpec::even_only(FunctionSpec::power_law(beta)),
        ] {
            let text = match &f {
                FunctionSpec::PowerLaw { beta, .. } => format!("power:{beta}"),
                FunctionSpec::PowerLog { beta, gamma } => format!("powerlog:{beta}:{gamma}"),
                FunctionSpec::EvenOnly { .. } => format!("even:power:{beta}"),
                _ => format!("indicator:{k}"),
            };
            prop_assert_eq!(text.parse::<FunctionSpec>().unwrap(), f);
        }
    }

    #[test]
    fn ks_is_a_symmetric_distance(seed in 0u64..1000, n in 5usize..60, m in 5usize..60) {
        let mut r = replica_rng(seed, "ks", 0);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(0..10) as f64).collect();
        let b: Vec<f64> = (0..m).map(|_| r.random_range(0..10) as f64).collect();
        let d = ks_statistic(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_statistic(&b, &a));
        prop_assert_eq!(ks_statistic(&a, &a), 0.0);
    }
}

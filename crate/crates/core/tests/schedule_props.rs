use proptest::prelude::*;

use qca_clocking::schedule::{smooth_map, smooth_map_derivative, Schedule, ScheduleKind};

fn kind() -> impl Strategy<Value = ScheduleKind> {
    prop::sample::select(ScheduleKind::ALL.to_vec())
}

proptest! {
    #[test]
    fn endpoints(k in kind(), a0 in 1.5f64..20.0, a1 in 0.01f64..0.5) {
        let s = Schedule::new(k, a0, a1).unwrap();
        let (a_start, b_start) = s.evaluate(0.0).unwrap();
        let (a_end, b_end) = s.evaluate(1.0).unwrap();
        prop_assert!((a_start / b_start - a0).abs() < 1e-12 * a0);
        prop_assert!((a_end / b_end - a1).abs() < 1e-12);
        prop_assert!((b_end - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences(
        k in kind(), a0 in 1.5f64..20.0, a1 in 0.01f64..0.5, s in 0.01f64..0.99, sigma in prop::sample::select(vec![0.0, 0.02, 0.1])
    ) {
        let sch = Schedule::new(k, a0, a1).unwrap().with_smoothing(sigma).unwrap();
        let h = 1e-6;
        let (ap, bp) = sch.evaluate(s + h).unwrap();
        let (am, bm) = sch.evaluate(s - h).unwrap();
        let (da, db) = sch.derivative(s).unwrap();
        let scale = 1.0 + a0;
        prop_assert!(((ap - am) / (2.0 * h) - da).abs() < 1e-5 * scale, "{} vs {}", (ap - am) / (2.0 * h), da);
        prop_assert!(((bp - bm) / (2.0 * h) - db).abs() < 1e-5 * scale);
    }

    #[test]
    fn smoothing_is_monotone_and_contracting(sigma in 1e-3f64..0.3, s in 0.0f64..1.0) {
        let v = smooth_map(s, sigma);
        prop_assert!((0.0..=s + 1e-15).contains(&v));
        prop_assert!(smooth_map_derivative(s, sigma) >= -1e-12);
        prop_assert!(smooth_map(s + 1e-3, sigma) >= v);
    }

    #[test]
    fn ratio_decreases_across_the_clock(k in kind(), a0 in 1.5f64..20.0, a1 in 0.01f64..0.5) {
        let s = Schedule::new(k, a0, a1).unwrap();
        let r: Vec<f64> = (0..=50).map(|i| s.ratio(i as f64 / 50.0).unwrap()).collect();
        prop_assert!(r.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}

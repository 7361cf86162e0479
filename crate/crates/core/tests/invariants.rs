use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrfss::constraint::{
    deb_better, epsilon_less, epsilon_less_equal, normalized_feeding, EpsilonSchedule, RunningExtremes,
};
use wrfss::wfss::{link_formator, LinkGraph};
use wrfss::{Evaluation, Interval, Problem};

fn evaluation() -> impl Strategy<Value = Evaluation> {
    let violation = prop_oneof![Just(0.0), 0.0..10.0f64, (1..4u8).prop_map(|k| k as f64)];
    (prop_oneof![-10.0..10.0f64, (-2..3i8).prop_map(|k| k as f64)], violation)
        .prop_map(|(f, phi)| Evaluation::new(f, phi))
}

proptest! {
    #[test]
    fn deb_is_a_strict_weak_order(a in evaluation(), b in evaluation(), c in evaluation()) {
        prop_assert!(!deb_better(&a, &a));
        prop_assert!(!(deb_better(&a, &b) && deb_better(&b, &a)));
        if deb_better(&a, &b) && deb_better(&b, &c) {
            prop_assert!(deb_better(&a, &c));
        }
        let inc = |x: &Evaluation, y: &Evaluation| !deb_better(x, y) && !deb_better(y, x);
        if inc(&a, &b) && inc(&b, &c) {
            prop_assert!(inc(&a, &c));
        }
    }

    #[test]
    fn epsilon_limits(a in evaluation(), b in evaluation(), eps in 0.0..20.0f64) {
        prop_assert_eq!(epsilon_less(&a, &b, f64::INFINITY), a.fitness < b.fitness);
        prop_assert_eq!(epsilon_less(&a, &b, 0.0), deb_better(&a, &b));
        prop_assert!(!epsilon_less(&a, &a, eps));
        prop_assert!(epsilon_less_equal(&a, &a, eps));
        if epsilon_less(&a, &b, eps) {
            prop_assert!(epsilon_less_equal(&a, &b, eps));
        }
    }

    #[test]
    fn feeding_stays_in_range(
        values in prop::collection::vec(-1e6..1e6f64, 1..50),
        extra in prop::collection::vec(-1e7..1e7f64, 0..3),
        w_scale in 1.0001..1e5f64,
    ) {
        let mut ext = RunningExtremes::default();
        ext.observe_all(values.iter().copied().chain(extra.iter().copied()));
        let w = normalized_feeding(&values, ext, w_scale);
        for (v, x) in values.iter().zip(&w) {
            prop_assert!((1.0..=w_scale).contains(x));
            if ext.max > ext.min {
                if *v == ext.min { prop_assert_eq!(*x, w_scale); }
                if *v == ext.max { prop_assert_eq!(*x, 1.0); }
            } else {
                prop_assert_eq!(*x, w_scale / 2.0);
            }
        }
    }

    #[test]
    fn epsilon_schedule_decays(eps0 in 0.0..1e6f64, tc in 1..5000u64, cp_min in 0.0..10.0f64) {
        let s = EpsilonSchedule::new(eps0, tc, cp_min).unwrap();
        let mut last = f64::INFINITY;
        for t in (0..tc + 10).step_by(((tc / 200).max(1)) as usize) {
            let e = s.at(t);
            prop_assert!(e <= last && e >= 0.0);
            if t >= tc { prop_assert_eq!(e, 0.0); }
            last = e;
        }
    }

    #[test]
    fn links_remain_a_forest(
        rounds in prop::collection::vec(prop::collection::vec(1.0..10.0f64, 12), 1..30),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut links = LinkGraph::new(12);
        for weights in &rounds {
            link_formator(&mut links, weights, &mut rng);
            prop_assert!(links.is_forest());
            for (a, l) in links.links() {
                prop_assert!(a != l);
                prop_assert!(weights[a] <= weights[l]);
            }
        }
    }

    #[test]
    fn equal_weights_never_link(n in 2..40usize, seed in any::<u64>(), w in 1.0..5000.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut links = LinkGraph::new(n);
        for _ in 0..5 {
            link_formator(&mut links, &vec![w; n], &mut rng);
        }
        prop_assert_eq!(links.link_count(), 0);
    }

    #[test]
    fn clamp_is_idempotent(x in prop::collection::vec(-1e3..1e3f64, 4)) {
        let p = Problem::builder(vec![Interval::new(-10.0, 10.0); 4], |_| 0.0).build().unwrap();
        let once = p.clamp(&x);
        prop_assert!(p.contains(&once));
        prop_assert_eq!(p.clamp(&once), once);
    }

    #[test]
    fn violation_is_nonnegative_and_monotone(g in -5.0..5.0f64, h in -5.0..5.0f64, bump in 0.0..3.0f64) {
        let p = Problem::builder(vec![Interval::new(-10.0, 10.0); 2], |_| 0.0)
            .inequality(|x| x[0])
            .equality(|x| x[1])
            .delta(1e-4)
            .build()
            .unwrap();
        let phi = p.violation(&[g, h]).unwrap();
        prop_assert!(phi >= 0.0);
        prop_assert_eq!(phi == 0.0, g <= 0.0 && h.abs() <= 1e-4);
        // increasing a breach never lowers the violation
        prop_assert!(p.violation(&[g + bump, h]).unwrap() >= phi);
        let h_out = h + bump * h.signum();
        prop_assert!(p.violation(&[g, h_out]).unwrap() >= phi);
    }
}

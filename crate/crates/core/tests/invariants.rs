use proptest::prelude::*;

use hashpeak_core::coin::{CoinState, TOTAL_BTC};
use hashpeak_core::dynamics::simulate;
use hashpeak_core::econ::{equilibrium_hash_rate, MiningParams};
use hashpeak_core::exog_series::{ExogenousSeries, Unit};
use hashpeak_core::scenario::PinkNoise;

fn flat(price: f64, fees: f64, end: f64) -> (ExogenousSeries, ExogenousSeries) {
    (
        ExogenousSeries::constant("price", Unit::UsdPerBtc, price, 0.0, end).unwrap(),
        ExogenousSeries::constant("fees", Unit::BtcPerDay, fees, 0.0, end).unwrap(),
    )
}

fn frozen(tau: f64, dt: f64, h0: f64) -> MiningParams {
    MiningParams {
        initial_hash_rate: h0,
        ..MiningParams::default()
            .with_single_tau(tau)
            .with_dt(dt)
            .with_efficiency_frozen_at(0.0)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coin_stock_is_conserved_and_monotone(dt in 0.05f64..20.0, steps in 1usize..3000) {
        let mut s = CoinState::genesis();
        for _ in 0..steps {
            let next = s.step(dt);
            prop_assert!(next.circulating >= s.circulating);
            prop_assert!(next.remaining <= s.remaining);
            prop_assert!(next.remaining >= 0.0);
            prop_assert!((next.circulating + next.remaining - TOTAL_BTC).abs() <= 1e-6);
            s = next;
        }
    }

    #[test]
    fn fixed_point_holds(price in 1.0f64..1e5, fees in 0.0f64..500.0, tau in 20.0f64..2000.0) {
        let (p, f) = flat(price, fees, 300.0);
        let probe = frozen(tau, 1.0, 1.0);
        let h_star = equilibrium_hash_rate(50.0, fees, price, &probe, 0.0);
        let traj = simulate(&frozen(tau, 1.0, h_star), &p, &f, 300.0).unwrap();
        for r in &traj.records {
            prop_assert!((r.hash_rate_ghs - h_star).abs() <= 1e-12 * h_star);
        }
    }

    #[test]
    fn relaxation_is_monotone_and_first_order(
        ratio in 0.01f64..20.0,
        tau in 20.0f64..1500.0,
        dt in prop::sample::select(vec![0.25, 0.5, 1.0, 2.0]),
    ) {
        prop_assume!(dt < tau);
        let horizon = (10.0 * tau).min(1400.0).ceil();
        let (p, f) = flat(300.0, 2.0, horizon);
        let probe = frozen(tau, dt, 1.0);
        let h_star = equilibrium_hash_rate(50.0, 2.0, 300.0, &probe, 0.0);
        let h0 = ratio * h_star;
        let traj = simulate(&frozen(tau, dt, h0), &p, &f, horizon).unwrap();
        let mut gap = (h0 - h_star).abs();
        for r in traj.records.iter().skip(1) {
            let g = (r.hash_rate_ghs - h_star).abs();
            prop_assert!(g <= gap);
            prop_assert!((r.hash_rate_ghs - h_star).signum() == (h0 - h_star).signum() || g == 0.0);
            gap = g;
            let exact = h_star + (h0 - h_star) * (-r.t / tau).exp();
            prop_assert!((r.hash_rate_ghs / exact - 1.0).abs() <= dt / tau);
        }
    }

    #[test]
    fn halving_the_step_stays_close(ratio in 0.01f64..20.0, tau in 20.0f64..1500.0) {
        let horizon = (10.0 * tau).min(1400.0).ceil();
        let (p, f) = flat(300.0, 2.0, horizon);
        let probe = frozen(tau, 1.0, 1.0);
        let h0 = ratio * equilibrium_hash_rate(50.0, 2.0, 300.0, &probe, 0.0);
        let coarse = simulate(&frozen(tau, 1.0, h0), &p, &f, horizon).unwrap();
        let fine = simulate(&frozen(tau, 0.5, h0), &p, &f, horizon).unwrap();
        for c in &coarse.records {
            let h = fine.record_at_or_after(c.t).unwrap().hash_rate_ghs;
            prop_assert!((c.hash_rate_ghs / h - 1.0).abs() <= 2.0 / tau);
        }
    }

    #[test]
    fn pink_noise_is_reproducible_and_nonnegative(
        seed in any::<u64>(),
        mean in 0.0f64..100.0,
        sd in 0.0f64..100.0,
    ) {
        let noise = PinkNoise { mean, sd, correlation_time: 28.0 };
        let a = noise.generate(0.0, 500.0, 1.0, seed, 0).unwrap();
        let b = noise.generate(0.0, 500.0, 1.0, seed, 0).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iter().all(|p| p.1 >= 0.0));
    }
}

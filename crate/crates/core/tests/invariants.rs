use occupancy::pareto::{evaluate_all, sweep_filter};
use occupancy::{
    brute_force_frontier, expected_detection_time, pareto_sweep, trajectory_single_group, DetectionRule,
    InfectionEstimator, OrganizationParams, SpreadModel,
};
use proptest::prelude::*;

fn spread() -> impl Strategy<Value = SpreadModel> {
    (2u32..200, 0.0..1.0f64, 0.0..0.5f64, 0.0..1.0f64, 0.0..40.0f64).prop_map(|(n, share, beta_u, ratio, kappa)| {
        SpreadModel {
            n,
            n_v: ((f64::from(n - 1)) * share) as u32,
            beta_u,
            beta_v: beta_u * ratio,
            kappa,
        }
    })
}

fn organization() -> impl Strategy<Value = OrganizationParams> {
    (
        spread(),
        0.0..0.99f64,
        1u32..=14,
        0.0..0.3f64,
        0.0..3000.0f64,
        0usize..4,
    )
        .prop_map(|(m, prod, tau, slope, incidence, est)| OrganizationParams {
            n: m.n,
            n_v: m.n_v,
            beta_u: m.beta_u,
            beta_v: m.beta_v,
            prod,
            tau,
            contact_base: m.kappa.min(10.0),
            contact_slope: slope,
            incidence_7day: incidence,
            estimator: InfectionEstimator::ALL[est],
            ..Default::default()
        })
}

proptest! {
    #[test]
    fn trajectory_is_bounded_and_monotone_in_time(m in spread(), occup in 0.0..=1.0f64) {
        let t = m.trajectory(occup, 14).unwrap();
        prop_assert_eq!(t.expected_infected[0], 1.0);
        for w in t.expected_infected.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for (v, u) in t.p_v.iter().zip(&t.p_u) {
            prop_assert!(*v <= *u);
            prop_assert!((0.0..=1.0).contains(u));
        }
        prop_assert!(*t.expected_infected.last().unwrap() <= f64::from(m.n) + 1e-9);
    }

    #[test]
    fn more_presence_means_more_spread(m in spread(), a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let tl = m.trajectory(lo, 10).unwrap();
        let th = m.trajectory(hi, 10).unwrap();
        for (l, h) in tl.expected_infected.iter().zip(&th.expected_infected) {
            prop_assert!(l <= h);
        }
    }

    #[test]
    fn more_transmission_means_more_spread(m in spread(), occup in 0.0..=1.0f64, bump in 0.0..0.5f64) {
        let higher = SpreadModel { beta_u: m.beta_u + bump, ..m };
        let tl = m.trajectory(occup, 10).unwrap();
        let th = higher.trajectory(occup, 10).unwrap();
        for (l, h) in tl.expected_infected.iter().zip(&th.expected_infected) {
            prop_assert!(l <= h);
        }
    }

    #[test]
    fn expected_count_matches_group_probabilities(m in spread(), occup in 0.0..=1.0f64) {
        let t = m.trajectory(occup, 14).unwrap();
        for d in 0..=14 {
            prop_assert!((t.reconstruct_expected(d) - t.expected_infected[d]).abs() <= 1e-12 * f64::from(m.n));
        }
    }

    #[test]
    fn unvaccinated_workforce_matches_single_group(m in spread(), occup in 0.0..=1.0f64) {
        let two = SpreadModel { n_v: 0, ..m }.trajectory(occup, 14).unwrap();
        let one = trajectory_single_group(m.n, m.beta_u, m.kappa, occup, 14).unwrap();
        prop_assert_eq!(two.p_u, one.p_u);
        prop_assert_eq!(two.expected_infected, one.expected_infected);
    }

    #[test]
    fn detection_time_within_interval(m in spread(), tau in 1u32..=14, a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let dl = expected_detection_time(&m.trajectory(lo, 14).unwrap(), m.n, tau, DetectionRule::ResidualAtInterval).unwrap();
        let dh = expected_detection_time(&m.trajectory(hi, 14).unwrap(), m.n, tau, DetectionRule::ResidualAtInterval).unwrap();
        prop_assert!(dl.tau_bar >= 1.0 - 1e-12 && dl.tau_bar <= f64::from(tau) + 1e-12);
        prop_assert!(dh.tau_bar <= dl.tau_bar + 1e-9);
    }

    #[test]
    fn sweep_agrees_with_pairwise_filter(p in organization()) {
        let candidates = evaluate_all(&p).unwrap();
        let oracle = brute_force_frontier(&candidates);
        prop_assert_eq!(&sweep_filter(&candidates), &oracle.points);
        let frontier = pareto_sweep(&p).unwrap();
        prop_assert!(frontier.check_invariants().is_ok());
    }
}

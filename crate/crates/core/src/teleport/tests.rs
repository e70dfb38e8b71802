use super::*;
use crate::css::overlap_coherent;
use proptest::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn basis(order: usize, q0: usize) -> Vec<C64> {
    (0..order)
        .map(|q| if q == q0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
        .collect()
}

fn uniform(order: usize) -> Vec<C64> {
    vec![c(1.0 / (order as f64).sqrt(), 0.0); order]
}

#[test]
fn config_validation() {
    assert!(TeleportConfig::new(3, c(1.0, 0.0), uniform(3))
        .validate()
        .is_err());
    assert!(TeleportConfig::new(2, c(1.0, 0.0), uniform(3))
        .validate()
        .is_err());
    assert!(TeleportConfig::new(2, c(1.0, 0.0), vec![c(0.0, 0.0); 2])
        .validate()
        .is_err());
    assert!(TeleportConfig::new(4, c(1.0, 0.0), uniform(4))
        .validate()
        .is_ok());
}

#[test]
fn prepare_joint_shapes() {
    let cfg = TeleportConfig::new(4, c(2.0, 0.0), basis(4, 0));
    let s = prepare_joint(&cfg).unwrap();
    assert_eq!(s.mode_count(), 3);
    // C collapses to the single coherent state |alpha>.
    for b in s.branches() {
        assert_eq!(b.amps[0], c(2.0, 0.0));
    }
    assert!((s.norm_sqr() - 1.0).abs() < 1e-10);

    let cfg = TeleportConfig::new(2, c(0.8, 0.0), vec![c(FRAC_1_SQRT_2, 0.0); 2]);
    let s = prepare_joint(&cfg).unwrap();
    assert_eq!(s.branch_count(), 4);
    assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn dilution_rules() {
    let s = CssState::coherent(vec![c(0.3, 0.4), c(1.0, 0.0)]);
    assert_eq!(dilute(&s, 0, 1).unwrap(), s);
    let d = dilute(&CssState::coherent(vec![c(2f64.sqrt(), 0.0)]), 0, 2).unwrap();
    for a in &d.branches()[0].amps {
        assert!((a - c(1.0, 0.0)).norm() < 1e-15);
    }
    let g = c(1.3, -0.7);
    let d = dilute(&CssState::coherent(vec![g]), 0, 5).unwrap();
    let energy: f64 = d.branches()[0].amps.iter().map(|a| a.norm_sqr()).sum();
    assert!((energy - g.norm_sqr()).abs() < 1e-14);
}

/// Balanced 50/50 tree: each level splits every mode with a fresh vacuum.
fn dilute_by_tree(state: &CssState, levels: usize) -> CssState {
    let mut s = state.clone();
    for _ in 0..levels {
        let width = s.mode_count();
        s = s.tensor(&CssState::vacuum(width));
        for i in 0..width {
            s = s.beamsplitter(i, width + i).unwrap();
        }
    }
    s
}

/// Chain of unequal beamsplitters peeling off 1/L, 1/(L-1), ... of the intensity.
fn dilute_by_chain(state: &CssState, copies: usize) -> CssState {
    let mut s = state.tensor(&CssState::vacuum(copies - 1));
    let branches = s
        .branches()
        .iter()
        .map(|b| {
            let mut amps = b.amps.clone();
            for k in 0..copies - 1 {
                let remaining = (copies - k) as f64;
                let t = ((remaining - 1.0) / remaining).sqrt();
                let r = (1.0 / remaining).sqrt();
                let (main, vac) = (amps[0], amps[k + 1]);
                amps[0] = t * main - r * vac;
                amps[k + 1] = r * main + t * vac;
            }
            CoherentBranch::new(b.coeff, amps)
        })
        .collect();
    s = CssState::new(copies, branches).unwrap();
    s
}

proptest! {
    #[test]
    fn dilution_equals_beamsplitter_realizations(
        re in -3.0f64..3.0, im in -3.0f64..3.0, levels in 1usize..4, copies in 1usize..7
    ) {
        let g = c(re, im);
        let f = crate::css::fq_closed(3).unwrap();
        let input = CssState::new(1, (0..3).map(|q| {
            CoherentBranch::new(f.f[q], vec![g * root_of_unity(q as i64, 3)])
        }).collect()).unwrap();

        let tree = dilute_by_tree(&input, levels);
        let direct = dilute(&input, 0, 1 << levels).unwrap();
        prop_assert!(1.0 - fidelity(&tree, &direct).unwrap() < 1e-12);

        let chain = dilute_by_chain(&input, copies);
        let direct = dilute(&input, 0, copies).unwrap();
        prop_assert!(1.0 - fidelity(&chain, &direct).unwrap() < 1e-12);
    }

    #[test]
    fn linear_optics_preserve_norm_and_energy(
        order in prop::sample::select(vec![2usize, 4, 6]),
        re in 0.1f64..3.0, im in -1.0f64..1.0,
        w in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6)
    ) {
        let q: Vec<C64> = w.iter().take(order).map(|&(a, b)| c(a, b)).collect();
        prop_assume!(q.iter().any(|x| x.norm() > 1e-3));
        let cfg = TeleportConfig::new(order, c(re, im), q);
        let joint = prepare_joint(&cfg).unwrap();
        let out = alice_network(&joint, &cfg).unwrap();
        prop_assert!((joint.norm_sqr() - out.norm_sqr()).abs() < 1e-10);
        let e0 = joint.mean_photon_number().unwrap();
        let e1 = out.mean_photon_number().unwrap();
        prop_assert!((e0 - e1).abs() < 1e-10 * e0.max(1.0));
    }
}

#[test]
fn network_matches_joint_branch_structure() {
    // Every output branch must equal alpha (w^q -+ w^{p+k}) / sqrt(2L) on G_k/H_k.
    for order in [2usize, 4, 6, 8] {
        let alpha = c(1.7, 0.4);
        let q: Vec<C64> = (0..order).map(|i| c(1.0 + i as f64, 0.5)).collect();
        let cfg = TeleportConfig::new(order, alpha, q);
        let out = alice_network(&prepare_joint(&cfg).unwrap(), &cfg).unwrap();
        let l = cfg.copies();
        let norm = (2.0 * l as f64).sqrt();
        assert_eq!(out.branch_count(), order * order);
        for (idx, b) in out.branches().iter().enumerate() {
            let (p, qq) = (idx / order, idx % order);
            let wq = root_of_unity(qq as i64, order);
            assert!((b.amps[2 * l] - alpha * wq).norm() < 1e-12);
            for k in 0..l {
                let wpk = root_of_unity((p + k) as i64, order);
                let g = alpha * (wq - wpk) / norm;
                let h = alpha * (wq + wpk) / norm;
                assert!(
                    (b.amps[k] - g).norm() < 1e-12,
                    "M={order} q={qq} p={p} k={k}"
                );
                assert!((b.amps[l + k] - h).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn order_two_dark_outputs() {
    let cfg = TeleportConfig::new(2, c(1.0, 0.0), uniform(2));
    let out = alice_network(&prepare_joint(&cfg).unwrap(), &cfg).unwrap();
    for (idx, b) in out.branches().iter().enumerate() {
        let (p, q) = (idx / 2, idx % 2);
        if p == q {
            assert_eq!(b.amps[0].norm(), 0.0);
        } else {
            assert!(b.amps[1].norm() < 1e-16);
        }
    }
}

#[test]
fn selection_rule_for_dark_h_mode() {
    let order = 4;
    let l = 2;
    let alpha = c(4.0 * order as f64, 0.0);
    let q: Vec<C64> = (0..order).map(|i| c(0.5, 0.1 * i as f64)).collect();
    let cfg = TeleportConfig::new(order, alpha, q);
    let out = alice_network(&prepare_joint(&cfg).unwrap(), &cfg).unwrap();
    let max_coeff = out
        .branches()
        .iter()
        .map(|b| b.coeff.norm())
        .fold(0.0, f64::max);
    for m in 0..l {
        let projected = out.project_number(l + m, 0).unwrap();
        for (idx, b) in projected.branches().iter().enumerate() {
            let (p, qq) = (idx / order, idx % order);
            let survives = b.coeff.norm() > 1e-12 * max_coeff;
            let rule = (p + m) % order == (qq + l) % order;
            assert_eq!(survives, rule, "m={m} q={qq} p={p}");
        }
    }
}

#[test]
fn classification() {
    assert_eq!(
        classify(&[3, 0]),
        Classification::Success {
            empty: EmptyMode::H(0),
            n_tot: 3
        }
    );
    assert_eq!(
        classify(&[0, 0]),
        Classification::Failure(FailureReason::MultipleEmptyModes)
    );
    assert_eq!(
        classify(&[2, 1]),
        Classification::Failure(FailureReason::NoEmptyMode)
    );
    assert_eq!(
        classify(&[0, 4, 1, 2]),
        Classification::Success {
            empty: EmptyMode::G(0),
            n_tot: 7
        }
    );
    assert_eq!(EmptyMode::H(1).index(2), 3);
    assert!(!classify(&[0, 4]).is_success(true));
    assert!(classify(&[0, 4]).is_success(false));
}

#[test]
fn bob_correction_rules() {
    let g = c(0.9, 0.2);
    let s = CssState::coherent(vec![g]);
    // m = L: identity.
    let same = bob_correct(&s, EmptyMode::H(2), 4).unwrap();
    assert!((same.branches()[0].amps[0] - g).norm() < 1e-15);
    // M = 2, m = 0: rotation by -pi.
    let flipped = bob_correct(&s, EmptyMode::H(0), 2).unwrap();
    assert!((flipped.branches()[0].amps[0] + g).norm() < 1e-15);
}

#[test]
fn corrected_state_carries_input_weights() {
    // Large alpha: after correction the coefficient on |alpha w^q> is proportional
    // to Q_q times the residual phase.
    let order = 4;
    let alpha = c(12.0, 0.0);
    let q: Vec<C64> = vec![c(0.6, 0.0), c(0.0, 0.3), c(-0.2, 0.2), c(0.5, -0.1)];
    let cfg = TeleportConfig::new(order, alpha, q.clone()).with_seed(11);
    let runner = TrialRunner::new(&cfg).unwrap();
    let mut checked = 0;
    for t in 0..40 {
        let o = runner.run(t).unwrap();
        let Classification::Success { empty, n_tot } = o.classification else {
            continue;
        };
        let target = residual_target(&cfg, empty, n_tot).unwrap();
        let bob = o.bob_state.prune(1e-12);
        for b in bob.branches() {
            let qq = (0..order)
                .find(|&k| (b.amps[0] - cfg.symmetric_amplitude(k)).norm() < 1e-9)
                .expect("aligned with a symmetric component");
            let t_coeff = target
                .branches()
                .iter()
                .find(|tb| (tb.amps[0] - b.amps[0]).norm() < 1e-9)
                .unwrap()
                .coeff;
            assert!(q[qq].norm() > 0.0);
            let ratio = b.coeff / t_coeff;
            let first = bob.branches()[0].coeff
                / target
                    .branches()
                    .iter()
                    .find(|tb| (tb.amps[0] - bob.branches()[0].amps[0]).norm() < 1e-9)
                    .unwrap()
                    .coeff;
            assert!((ratio - first).norm() < 1e-6);
        }
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn residual_target_of_basis_state_is_that_state() {
    let cfg = TeleportConfig::new(4, c(1.5, 0.0), basis(4, 2));
    let ideal = ideal_target(&cfg).unwrap();
    for (empty, n) in [(EmptyMode::H(0), 5), (EmptyMode::G(1), 2)] {
        let r = residual_target(&cfg, empty, n).unwrap();
        assert!((fidelity(&r, &ideal).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn residual_target_differs_from_ideal_for_generic_input() {
    let cfg = TeleportConfig::new(4, c(3.0, 0.0), uniform(4));
    let r = residual_target(&cfg, EmptyMode::H(0), 7).unwrap();
    let f = fidelity(&r, &ideal_target(&cfg).unwrap()).unwrap();
    assert!(f < 1.0 - 1e-3, "{f}");
}

#[test]
fn fidelity_rules() {
    let a = CssState::coherent(vec![c(0.4, 0.1)]);
    assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
    let alpha = 2.0;
    let order = 4;
    let x = CssState::coherent(vec![c(alpha, 0.0)]);
    let y = CssState::coherent(vec![c(alpha, 0.0) * root_of_unity(1, order)]);
    let f = fidelity(&x, &y).unwrap();
    let bound = overlap_coherent(c(alpha, 0.0), c(alpha, 0.0) * root_of_unity(1, order)).norm_sqr();
    assert!((f - bound).abs() < 1e-15);
    let s = (std::f64::consts::PI / order as f64).sin();
    assert!(f <= (-4.0 * alpha * alpha * s * s).exp() * (1.0 + 1e-12));
    assert!((fidelity(&x, &y).unwrap() - fidelity(&y, &x).unwrap()).abs() < 1e-15);
    assert_eq!(
        fidelity(&x, &CssState::new(1, vec![]).unwrap()),
        Err(Error::ZeroNorm)
    );
}

#[test]
fn vacuum_alpha_gives_all_zero_counts() {
    let cfg = TeleportConfig::new(2, c(0.0, 0.0), uniform(2)).with_seed(3);
    let runner = TrialRunner::new(&cfg).unwrap();
    let network = runner.network();
    for t in 0..20 {
        let o = runner.run(t).unwrap();
        assert_eq!(o.counts, vec![0, 0]);
        assert_eq!(
            o.classification,
            Classification::Failure(FailureReason::MultipleEmptyModes)
        );
    }
    let exact = exact_event_probabilities(network, 2).unwrap();
    assert!(exact.success.abs() < 1e-15);
    assert!((exact.all_empty - 1.0).abs() < 1e-12);
}

#[test]
fn conditional_norm_is_outcome_probability() {
    let cfg = TeleportConfig::new(2, c(1.0, 0.3), vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let network = alice_network(&prepare_joint(&cfg).unwrap(), &cfg).unwrap();
    let mut rng = trial_rng(5, 0);
    for _ in 0..10 {
        let s = sample_counts(&network, 2, None, &mut rng).unwrap();
        let direct = network
            .project_number(0, s.counts[0])
            .unwrap()
            .project_number(0, s.counts[1])
            .unwrap();
        let p = direct.norm_sqr() / network.norm_sqr();
        assert!((s.unnormalized().norm_sqr() - p).abs() < 1e-12 * p.max(1e-300) + 1e-300);
        assert!((s.probability - p).abs() <= 1e-10 * p);
    }
}

#[test]
fn small_cap_is_rejected() {
    let cfg = TeleportConfig::new(2, c(3.0, 0.0), uniform(2));
    let network = alice_network(&prepare_joint(&cfg).unwrap(), &cfg).unwrap();
    let mut rng = trial_rng(0, 0);
    assert!(matches!(
        sample_counts(&network, 2, Some(3), &mut rng),
        Err(Error::CutoffTooSmall { cap: 3, .. })
    ));
}

#[test]
fn run_trials_empty_and_deterministic() {
    let cfg = TeleportConfig::new(2, c(1.0, 0.0), uniform(2));
    let stats = run_trials(&cfg).unwrap();
    assert_eq!(stats.trials, 0);
    assert_eq!(stats.successes, 0);
    assert!(stats.mean_fidelity_ideal.is_none());

    let cfg = cfg.with_seed(42).with_trials(500);
    let a = run_trials(&cfg).unwrap();
    let b = run_trials(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        a.successes + a.no_empty_failures + a.multiple_empty_failures,
        500
    );
}

#[test]
fn h_only_accounting() {
    let mut cfg = TeleportConfig::new(4, c(3.0, 0.0), uniform(4))
        .with_seed(9)
        .with_trials(300);
    let all = run_trials(&cfg).unwrap();
    cfg.h_only = true;
    let h = run_trials(&cfg).unwrap();
    assert_eq!(h.successes, all.h_successes);
    assert_eq!(all.successes, all.h_successes + all.g_successes);
    let exact = all.exact.unwrap();
    assert!(exact.success_h_only <= exact.success);
}

#[test]
fn success_probability_grows_with_alpha() {
    let mut last = 0.0;
    for a in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
        let cfg = TeleportConfig::new(2, c(a, 0.0), uniform(2));
        let network = alice_network(&prepare_joint(&cfg).unwrap(), &cfg).unwrap();
        let p = exact_event_probabilities(&network, 2).unwrap().success;
        assert!(p >= last - 1e-12, "alpha={a}: {p} < {last}");
        last = p;
    }
    assert!(last >= 0.999);
}

#[test]
fn exact_probabilities_are_consistent() {
    let cfg = TeleportConfig::new(4, c(1.2, 0.3), uniform(4));
    let network = alice_network(&prepare_joint(&cfg).unwrap(), &cfg).unwrap();
    let e = exact_event_probabilities(&network, 4).unwrap();
    let total = e.none_empty + e.success + e.multiple_empty;
    assert!((total - 1.0).abs() < 1e-12);
    assert!(e.success > 0.0 && e.success < 1.0);
    assert!(e.all_empty <= e.multiple_empty + 1e-15);
}

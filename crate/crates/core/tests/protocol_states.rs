//! Reproduces the states of the generation, swapping and concentration
//! procedures term by term.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use railconc::fock::{superpose, FockState, ModeRegister};
use railconc::optics::{
    apply_beam_splitter, detect_single_photon, phase_flip, qnd_measure, BeamSplitter,
    DetectionEvent, QndConfig,
};
use railconc::protocols::*;
use railconc::C64;

const TOL: f64 = 1e-12;

fn pair(alpha_sq: f64, theta: f64, a: &str, b: &str) -> SingleRailPair {
    SingleRailPair::from_alpha_sq(alpha_sq, theta, a, b).unwrap()
}

fn two_copies(alpha_sq: f64, theta: f64) -> FockState {
    pair(alpha_sq, theta, "a1", "b1").to_state()
        .tensor(&pair(alpha_sq, theta, "a2", "b2").to_state())
        .unwrap()
}

fn amp(s: &FockState, occ: &[(&str, u32)]) -> C64 {
    s.amplitude_of(occ).unwrap()
}

fn close(x: C64, y: C64) -> bool { (x - y).norm() < TOL }

fn balanced(a: &str, b: &str, sign: f64) -> FockState {
    let vac = FockState::vacuum(ModeRegister::new([a, b]).unwrap()).unwrap();
    superpose(&[
        (C64::new(1.0, 0.0), &vac.create(a).unwrap()),
        (C64::new(sign, 0.0), &vac.create(b).unwrap()),
    ]).unwrap()
}

#[test]
fn two_copy_expansion() {
    let s = two_copies(0.5, 0.0);
    assert_eq!(s.len(), 4);
    for occ in [[("a1", 1), ("a2", 1)], [("a1", 1), ("b2", 1)], [("a2", 1), ("b1", 1)], [("b1", 1), ("b2", 1)]] {
        assert!(close(amp(&s, &occ), C64::new(0.5, 0.0)));
    }
    let s = two_copies(0.8, 0.9);
    assert!((amp(&s, &[("a1", 1), ("a2", 1)]).norm_sqr() - 0.64).abs() < TOL);
    let e = C64::from_polar(1.0, 0.9);
    let ab = 0.8f64.sqrt() * 0.2f64.sqrt();
    assert!(close(amp(&s, &[("a1", 1), ("b2", 1)]), e * ab));
    assert!(close(amp(&s, &[("a2", 1), ("b1", 1)]), e * ab));
    assert!(close(amp(&s, &[("b1", 1), ("b2", 1)]), e * e * 0.2));
}

#[test]
fn projection_probabilities() {
    let s = two_copies(0.5, 0.0);
    let p = s.project_photons(&["b1", "b2"], |n| n == 1).unwrap();
    assert!((p.probability - 0.5).abs() < TOL);
    let s = two_copies(0.8, 0.0);
    let p = s.project_photons(&["b1", "b2"], |n| n == 0).unwrap();
    assert!((p.probability - 0.64).abs() < TOL);
}

#[test]
fn qnd_generic_theta_keeps_cross_terms() {
    let s = two_copies(0.5, 0.0);
    let out = qnd_measure(&s, &QndConfig::new(["b1", "b2"], 0.3)).unwrap();
    let one = out.iter().find(|o| o.class == vec![1]).unwrap();
    assert!((one.probability - 0.5).abs() < TOL);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    assert!(close(amp(&one.post_state, &[("a1", 1), ("b2", 1)]), h));
    assert!(close(amp(&one.post_state, &[("a2", 1), ("b1", 1)]), h));
    assert_eq!(one.post_state.len(), 2);
}

#[test]
fn qnd_parity_mode_keeps_even_terms() {
    let theta_ab = 0.4;
    let s = two_copies(0.5, theta_ab);
    let out = qnd_measure(&s, &QndConfig::new(["b1", "b2"], PI)).unwrap();
    let even = out.iter().find(|o| o.class == vec![0, 2]).unwrap();
    assert!((even.probability - 0.5).abs() < TOL);
    let a = amp(&even.post_state, &[("a1", 1), ("a2", 1)]);
    let b = amp(&even.post_state, &[("b1", 1), ("b2", 1)]);
    assert!(close(b / a, C64::from_polar(1.0, 2.0 * theta_ab)));
}

#[test]
fn concentration_splitter_on_kept_state() {
    let s = two_copies(0.5, 0.0);
    let kept = s.project_photons(&["b1", "b2"], |n| n == 1).unwrap().state.unwrap();
    let mixed = apply_beam_splitter(&kept, &BeamSplitter::concentration("a2", "b2", "c2", "d2")).unwrap();
    let q = C64::new(0.5, 0.0);
    assert!(close(amp(&mixed, &[("a1", 1), ("c2", 1)]), q));
    assert!(close(amp(&mixed, &[("b1", 1), ("c2", 1)]), q));
    assert!(close(amp(&mixed, &[("a1", 1), ("d2", 1)]), q));
    assert!(close(amp(&mixed, &[("b1", 1), ("d2", 1)]), -q));

    let det = detect_single_photon(&mixed, &["c2", "d2"]).unwrap();
    assert_eq!(det.len(), 2);
    let d1 = det.iter().find(|d| d.event == DetectionEvent::Click("c2".into())).unwrap();
    let d2 = det.iter().find(|d| d.event == DetectionEvent::Click("d2".into())).unwrap();
    assert!((d1.probability - 0.5).abs() < TOL && (d2.probability - 0.5).abs() < TOL);
    assert!((d1.post_state.fidelity(&balanced("a1", "b1", 1.0)).unwrap() - 1.0).abs() < TOL);
    assert!((d2.post_state.fidelity(&balanced("a1", "b1", -1.0)).unwrap() - 1.0).abs() < TOL);
    let corrected = phase_flip(&d2.post_state, "b1").unwrap();
    assert!((corrected.fidelity(&balanced("a1", "b1", 1.0)).unwrap() - 1.0).abs() < TOL);
}

#[test]
fn recycled_branch_states() {
    let (alpha_sq, theta_ab) = (0.8, 0.35);
    let r = concentration_round(&pair(alpha_sq, theta_ab, "a1", "b1"), &pair(alpha_sq, theta_ab, "a2", "b2"), PI).unwrap();
    let rec = r.iter().find(|x| x.tag == Tag::Recyclable).unwrap();
    let branches = recyclable_branches(rec).unwrap();
    assert_eq!(branches.len(), 2);
    let e2 = C64::from_polar(1.0, 2.0 * theta_ab);
    let plus = SingleRailPair::new(C64::new(0.8, 0.0), e2 * 0.2, "a1", "b1").unwrap();
    let minus = SingleRailPair::new(C64::new(0.8, 0.0), -e2 * 0.2, "a1", "b1").unwrap();
    let c2 = branches.iter().find(|b| b.herald.last_outcome() == Some("c2")).unwrap();
    let d2 = branches.iter().find(|b| b.herald.last_outcome() == Some("d2")).unwrap();
    assert!(c2.pair.as_ref().unwrap().same_coefficients(&plus, TOL));
    assert!(d2.pair.as_ref().unwrap().same_coefficients(&minus, TOL));
    assert_eq!(d2.pending_flip.as_deref(), Some("b1"));
    assert!(d2.corrected_pair().unwrap().unwrap().same_coefficients(&plus, TOL));
    assert!((c2.probability - 0.34).abs() < TOL && (d2.probability - 0.34).abs() < TOL);
    let p = recyclable_to_pair(rec).unwrap();
    assert!((p.alpha_sq() - 16.0 / 17.0).abs() < TOL);
    assert!((p.theta() - 2.0 * theta_ab).abs() < TOL);
}

#[test]
fn swap_station_expansion() {
    let (t1, t2) = (0.3, 1.2);
    let ab = pair(0.8, t1, "a", "b");
    let cd = pair(0.8, t2, "c", "d");
    let joint = ab.to_state().tensor(&cd.to_state()).unwrap();
    let (al, be) = (0.8f64.sqrt(), 0.2f64.sqrt());
    assert!(close(amp(&joint, &[("a", 1), ("c", 1)]), C64::new(al * al, 0.0)));
    assert!(close(amp(&joint, &[("b", 1), ("d", 1)]), C64::from_polar(be * be, t1 + t2)));
    assert!(close(amp(&joint, &[("b", 1), ("c", 1)]), C64::from_polar(al * be, t1)));
    assert!(close(amp(&joint, &[("a", 1), ("d", 1)]), C64::from_polar(al * be, t2)));

    let v = FockState::vacuum(ModeRegister::new(["b", "c"]).unwrap()).unwrap();
    let bs = BeamSplitter::swap_station("b", "c", "D1", "D2");
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let b_out = apply_beam_splitter(&v.create("b").unwrap(), &bs).unwrap();
    assert!(close(amp(&b_out, &[("D1", 1)]), h) && close(amp(&b_out, &[("D2", 1)]), h));
    let c_out = apply_beam_splitter(&v.create("c").unwrap(), &bs).unwrap();
    assert!(close(amp(&c_out, &[("D1", 1)]), h) && close(amp(&c_out, &[("D2", 1)]), -h));

    let results = swap(&ab, &cd).unwrap();
    let total: f64 = results.iter().map(|r| r.probability).sum();
    assert!((total - 1.0).abs() < TOL);
    let e = C64::from_polar(1.0, t1 + t2);
    let d1 = results.iter().find(|r| r.herald.last_outcome() == Some("D1")).unwrap();
    let d2 = results.iter().find(|r| r.herald.last_outcome() == Some("D2")).unwrap();
    let expect_plus = SingleRailPair::new(C64::new(0.8, 0.0), e * 0.2, "a", "d").unwrap();
    assert!(d1.pair.as_ref().unwrap().same_coefficients(&expect_plus, TOL));
    assert!(d2.pair.as_ref().unwrap().same_coefficients(&expect_plus.flipped(), TOL));
    assert!((d1.probability - 0.34).abs() < TOL);
    let failures: Vec<_> = results.iter().filter(|r| r.tag == Tag::Failure).collect();
    // two bunched outcomes plus the no-click branch
    assert_eq!(failures.len(), 3);
    let bunched: f64 = failures.iter().filter(|r| r.herald.last_outcome() != Some("none")).map(|r| r.probability).sum();
    assert!((bunched - 0.16).abs() < TOL);
}

#[test]
fn swap_chain_matches_closed_form() {
    let p = pair(0.8, 0.25, "a", "k");
    for n in 1..=5 {
        let sim = swap_chain(&p, n).unwrap();
        let closed = swap_chain_closed_form(&p, n).unwrap();
        assert!(sim.same_coefficients(&closed, TOL), "n = {n}");
        let ratio = sim.alpha_sq() / sim.beta_sq();
        assert!((ratio / 4f64.powi(n as i32 + 1) - 1.0).abs() < TOL);
        assert!((sim.theta() - ((n + 1) as f64 * 0.25)).abs() < 1e-10);
    }
    let balanced = pair(0.5, 0.0, "a", "k");
    for n in 1..=4 {
        assert!((swap_chain(&balanced, n).unwrap().alpha_sq() - 0.5).abs() < TOL);
    }
}

#[test]
fn second_round_from_full_simulation() {
    // recycled pair ⊗ recycled pair, simulated from scratch
    let (alpha_sq, theta) = (0.8, 0.6);
    let r1 = concentration_round(&pair(alpha_sq, theta, "a1", "b1"), &pair(alpha_sq, theta, "a2", "b2"), PI).unwrap();
    let recycled = recyclable_to_pair(r1.iter().find(|x| x.tag == Tag::Recyclable).unwrap()).unwrap();
    let joint = recycled.to_state().tensor(&recycled.with_modes("a2", "b2").unwrap().to_state()).unwrap();
    let norm = 0.68f64;
    let e2 = C64::from_polar(1.0, 2.0 * theta);
    assert!(close(amp(&joint, &[("a1", 1), ("a2", 1)]), C64::new(0.64 / norm, 0.0)));
    assert!(close(amp(&joint, &[("a1", 1), ("b2", 1)]), e2 * (0.16 / norm)));
    assert!(close(amp(&joint, &[("b1", 1), ("b2", 1)]), e2 * e2 * (0.04 / norm)));
    let kept = joint.project_photons(&["b1", "b2"], |n| n == 1).unwrap();
    let expected = 2.0 * 0.64 * 0.04 / (0.68 * 0.68);
    assert!((kept.probability - expected).abs() < TOL);

    let ledger = iterate_concentration(&pair(alpha_sq, theta, "a", "b"), 2, PI).unwrap();
    assert!((ledger.entries[1].success_probability - expected).abs() < TOL);
}

#[test]
fn generation_pipeline() {
    let g = generate_entanglement(&SourceParams::new(0.016, 0.004, 0.7).unwrap()).unwrap();
    assert!((g.pair.alpha_sq() - 0.8).abs() < TOL);
    assert!((g.pair.theta() - 0.7).abs() < TOL);
    assert!((g.herald_probability - 0.01).abs() < TOL);
    assert!((g.click_probability - 0.01 / 1.01).abs() < TOL);
}

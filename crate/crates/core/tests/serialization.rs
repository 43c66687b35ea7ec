use std::f64::consts::PI;
use railconc::protocols::{concentration_round, iterate_concentration, SingleRailPair, Tag};
use serde_json::{json, Value};

#[test]
fn fock_state_lists_modes_and_terms() {
    let p = SingleRailPair::from_alpha_sq(0.5, 0.0, "a", "b").unwrap();
    let v = serde_json::to_value(p.to_state()).unwrap();
    assert_eq!(v["modes"], json!(["a", "b"]));
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    for t in terms {
        assert!((t[1].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(t[2].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn herald_is_an_ordered_event_list() {
    let a = SingleRailPair::from_alpha_sq(0.7, 0.0, "a1", "b1").unwrap();
    let b = a.with_modes("a2", "b2").unwrap();
    let results = concentration_round(&a, &b, PI).unwrap();
    let success = results.iter().find(|r| r.tag == Tag::Success).unwrap();
    let v = serde_json::to_value(&success.herald).unwrap();
    let events = v.as_array().unwrap();
    assert_eq!(events.len(), 2);
    let keys: Vec<&String> = events[0].as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 3);
    for k in ["stage", "outcome", "probability"] {
        assert!(events.iter().all(|e| e.get(k).is_some()), "missing {k}");
    }
}

#[test]
fn ledger_serializes() {
    let p = SingleRailPair::from_alpha_sq(0.8, 0.0, "a", "b").unwrap();
    let v: Value = serde_json::to_value(iterate_concentration(&p, 2, PI).unwrap()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 2);
    assert!((v["entries"][0]["success_probability"].as_f64().unwrap() - 0.32).abs() < 1e-12);
}

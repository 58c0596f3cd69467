use dictatest::family_file::FamilyFile;
use dictatest::testers::{basic_test_prob_mc, htest_prob_exact, htest_prob_mc};
use dictatest::{
    dictator, inverse_wht, majority, random_folded, wht, BooleanFunction, Error, FnSpec,
};

#[test]
fn spec_strings_round_trip() {
    for text in ["dict:2", "-dict:1", "maj", "random:7", "noisydict:1:0.1:3"] {
        let spec: FnSpec = text.parse().unwrap();
        let again: FnSpec = spec.to_string().parse().unwrap();
        assert_eq!(spec.build(5).unwrap(), again.build(5).unwrap(), "{text}");
    }
    assert!("dict:0".parse::<FnSpec>().map(|s| s.build(3)).map_or(true, |r| r.is_err()));
}

#[test]
fn hex_tables_survive_round_trip() {
    for seed in 0..20 {
        let f = random_folded(6, seed).unwrap();
        assert_eq!(BooleanFunction::from_hex(6, &f.to_hex()).unwrap(), f);
    }
}

#[test]
fn inverse_transform_recovers_table() {
    let f = majority(5).unwrap();
    let back = inverse_wht(&wht(&f)).unwrap();
    for x in 0..1usize << 5 {
        assert!((back.at(x) - f.at(x) as f64).abs() < 1e-12);
    }
}

#[test]
fn mc_interval_covers_exact_value() {
    let f = majority(5).unwrap();
    let exact = dictatest::testers::basic_test_prob_exact(&f, 26).unwrap().value();
    let est = basic_test_prob_mc(&f, 50_000, 11, 0.999).unwrap();
    assert!(est.ci_low <= exact && exact <= est.ci_high, "{exact} vs {est:?}");
}

#[test]
fn family_file_drives_htest() {
    let json = r#"{"n": 3, "k": 2, "edges": [[1, 2]], "members": {"all": "dict:3"}}"#;
    let fam = FamilyFile::from_json(json).unwrap().build().unwrap();
    assert!(htest_prob_exact(&fam, 26).unwrap().is_one());
    let mc = htest_prob_mc(&fam, 2_000, 1, 0.99).unwrap();
    assert_eq!(mc.accepts, mc.trials);
}

#[test]
fn guard_is_enforced() {
    let f = dictator(12, 1).unwrap();
    match dictatest::testers::basic_test_prob_exact(&f, 20) {
        Err(Error::GuardExceeded { .. }) => {}
        other => panic!("expected guard error, got {other:?}"),
    }
}

use sdlab::format::*;
use sdlab_core::constructions::three_forms_catalog;
use sdlab_core::finite::{random_dist, Dist, FiniteGroup, Profile};
use sdlab_core::*;

fn roundtrip<T: serde::Serialize + serde::de::DeserializeOwned>(x: &T) -> T {
    serde_json::from_str(&serde_json::to_string(x).unwrap()).unwrap()
}

#[test]
fn spec_json_shape() {
    let spec: SpecJson = serde_json::from_str(r#"{"default": 1, "exceptions": {"2": "inf", "5": 0}}"#).unwrap();
    let core = spec.to_core().unwrap();
    assert_eq!(core.height(2), Height::Infinite);
    assert_eq!(core.height(5), Height::Finite(0));
    assert_eq!(core.height(7), Height::Finite(1));
    assert_eq!(
        serde_json::to_string(&SpecJson::from_core(&core)).unwrap(),
        r#"{"default":1,"exceptions":{"2":"inf","5":0}}"#
    );
    assert!(serde_json::from_str::<SpecJson>(r#"{"default": "infinite"}"#).is_err());
    // 4 is not prime
    let bad: SpecJson = serde_json::from_str(r#"{"default": 1, "exceptions": {"4": 2}}"#).unwrap();
    assert!(bad.to_core().is_err());
}

#[test]
fn rationals_are_strings() {
    assert_eq!(serde_json::to_string(&Q(Rational::new(-2, 6))).unwrap(), r#""-1/3""#);
    assert_eq!(serde_json::to_string(&Q(Rational::from_integer(4))).unwrap(), r#""4""#);
    assert_eq!(serde_json::from_str::<Q>("7").unwrap(), Q(Rational::from_integer(7)));
    assert_eq!(serde_json::from_str::<Q>(r#"" 3/9 ""#).unwrap(), Q(Rational::new(1, 3)));
    assert!(serde_json::from_str::<Q>(r#""1/0""#).is_err());
    assert!(serde_json::from_str::<Q>(r#""x""#).is_err());
}

#[test]
fn values_in_all_three_shapes() {
    for v in [
        Value::Rational(Rational::new(1, 2)),
        Value::polar(Rational::new(3, 4), Rational::new(1, 7)),
        Value::Approx(sdlab_core::value::Complex64::new(0.1, -1.0 / 3.0)),
    ] {
        assert_eq!(roundtrip(&ValueJson::from_core(&v)).to_core(), v);
    }
    let unit: ValueJson = serde_json::from_str(r#"{"angle": "1/4"}"#).unwrap();
    assert_eq!(unit.to_core(), Value::unit(Rational::new(1, 4)));
}

#[test]
fn every_charfn_variant_round_trips() {
    let spec = SupernaturalSpec::new(Height::Finite(0), [(5, Height::Infinite)]).unwrap();
    let mut fs: Vec<CharFn> = three_forms_catalog().into_iter().flat_map(|(_, fs)| fs).collect();
    fs.push(CharFn::two_level(RationalSubgroup::cyclic(HElement::new(1, 3)), 2, Rational::new(1, 4)).unwrap());
    fs.push(CharFn::gaussian(0.3, PhaseChar::new(HElement::new(1, 2), Rational::new(1, 3)).unwrap()).unwrap());
    fs.push(CharFn::ModulusSquare(Box::new(fs[0].clone())));
    fs.push(CharFn::Product(vec![fs[1].clone(), fs[2].clone()]));
    fs.push(CharFn::idempotent(RationalSubgroup::Trivial, PhaseChar::trivial()));
    fs.push(CharFn::idempotent(RationalSubgroup::scaled(Rational::new(2, 3), spec).unwrap(), PhaseChar::trivial()));
    for f in &fs {
        let back = roundtrip(&CharFnJson::from_core(f)).to_core().unwrap();
        assert_eq!(&back, f);
    }
}

#[test]
fn charfn_json_is_tagged() {
    let text = r#"{"kind": "finite_support", "entries": [
        {"point": "1", "value": "1/2"}, {"point": "-1", "value": "1/2"}]}"#;
    let f = serde_json::from_str::<CharFnJson>(text).unwrap().to_core().unwrap();
    assert_eq!(f.eval_at(&HElement::integer(-1)).unwrap(), Value::Rational(Rational::new(1, 2)));
    assert_eq!(f.eval_at(&HElement::integer(2)).unwrap(), Value::zero());
    let dup = r#"{"kind": "finite_support", "entries": [{"point": "1", "value": "1"}, {"point": "1", "value": "0"}]}"#;
    assert!(serde_json::from_str::<CharFnJson>(dup).unwrap().to_core().is_err());
    assert!(serde_json::from_str::<CharFnJson>(r#"{"kind": "levy"}"#).is_err());
}

#[test]
fn manifests_round_trip() {
    let spec5 = SupernaturalSpec::new(Height::Finite(0), [(5, Height::Infinite)]).unwrap();
    let spec3 = SupernaturalSpec::new(Height::Finite(0), [(3, Height::Infinite)]).unwrap();
    for m in [
        build_lemma37_case1(2, 3, Rational::new(1, 2), 3).unwrap(),
        build_lemma37_case1(3, 2, Rational::new(1, 4), 4).unwrap(),
        build_thm41_part2(&spec5, 5, &HElement::integer(1)).unwrap(),
        build_thm41_part2(&spec3, 3, &HElement::integer(-1)).unwrap(),
    ] {
        let json = ManifestJson::from_core(&m);
        assert_eq!(roundtrip(&json), json);
        assert_eq!(json.to_core().unwrap(), m);
    }
}

#[test]
fn forms_with_a_non_automorphism_are_rejected_on_load() {
    let m = build_thm41_part2(
        &SupernaturalSpec::new(Height::Finite(0), [(5, Height::Infinite)]).unwrap(),
        5,
        &HElement::integer(1),
    )
    .unwrap();
    let mut json = ManifestJson::from_core(&m);
    json.forms[1][1] = Q(Rational::from_integer(3));
    assert!(json.to_core().is_err());
}

#[test]
fn report_marks_exact_zero() {
    let m = build_lemma37_case1(2, 3, Rational::new(1, 2), 3).unwrap();
    let r = verify_on_box(&m.fs, &m.forms, &m.spec, &m.recommended_box, &VerifyConfig::default()).unwrap();
    let json = serde_json::to_value(ReportJson::from_core(&r)).unwrap();
    assert_eq!(json["worst_residual"], EXACT_ZERO);
    assert_eq!(json["violations"], serde_json::json!([]));
    assert_eq!(json["points"], r.points);
}

#[test]
fn dist_json_shape() {
    let g = FiniteGroup::new(vec![2, 3]).unwrap();
    let d = Dist::from_weights(&g, vec![1, 0, 0, 0, 2, 1]).unwrap();
    let json = DistJson::from_core(&g, &d);
    assert_eq!(serde_json::to_string(&json).unwrap(), r#"{"probs":{"(0,0)":"1/4","(1,1)":"1/2","(1,2)":"1/4"}}"#);
    assert_eq!(roundtrip(&json).to_core(&g).unwrap(), d);
    let reduced: DistJson = serde_json::from_str(r#"{"probs": {"(2,-1)": "1"}}"#).unwrap();
    assert_eq!(reduced.to_core(&g).unwrap(), Dist::degenerate(&g, &[0, 2]));
    for bad in [r#"{"probs": {"(0)": "1"}}"#, r#"{"probs": {"(0,0)": "1/2"}}"#, r#"{"probs": {"0,0": "1"}}"#] {
        assert!(serde_json::from_str::<DistJson>(bad).unwrap().to_core(&g).is_err(), "{bad}");
    }
}

#[test]
fn group_strings() {
    assert_eq!(parse_group(" 4, 3").unwrap().moduli(), &[4, 3]);
    assert_eq!(group_to_string(&parse_group("2,3,5").unwrap()), "2,3,5");
    assert!(parse_group("4,x").is_err());
    assert!(parse_group("").is_err());
}

/// Regenerate with `UPDATE_GOLDEN=1`.
pub fn check_golden(name: &str, actual: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

#[test]
fn random_dist_seed_42_is_pinned() {
    let g = FiniteGroup::new(vec![5]).unwrap();
    let d = random_dist(&g, 42, Profile::Sparse);
    let text = serde_json::to_string_pretty(&DistJson::from_core(&g, &d)).unwrap() + "\n";
    check_golden("random_dist_z5_sparse_seed42.json", &text);
}

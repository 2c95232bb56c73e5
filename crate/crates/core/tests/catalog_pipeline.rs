use walker_core::catalog::{builtin, find, from_jsonl, load, save, to_jsonl};
use walker_core::expr::{parse, ZeroTest};
use walker_core::jets::reduced_system;
use walker_core::liealg::{subalgebra_closed, StructureConstants};
use walker_core::pis::{defect, invariant_rank, verify_triple, Q};
use walker_core::suite::{einstein_check, verify_entry, Verdict, VerifyOptions};

#[test]
fn shipped_expressions_survive_render_and_parse() {
    for e in builtin() {
        for (field, text) in e.expression_fields() {
            let once = parse(text).unwrap();
            let twice = parse(&once.to_string()).unwrap_or_else(|err| panic!("{}.{field}: {err}", e.id));
            assert_eq!(once, twice, "{}.{field}", e.id);
        }
    }
}

#[test]
fn shipped_subalgebras_close() {
    let sc = StructureConstants::standard();
    for e in builtin() {
        if let Some(h) = e.subalgebra() {
            assert!(subalgebra_closed(&h, sc).closed, "{}", e.id);
        }
    }
}

#[test]
fn save_then_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.jsonl");
    let all = builtin();
    save(&all, &path).unwrap();
    assert_eq!(load(&path).unwrap(), all);
    save(&[], &path).unwrap();
    assert!(load(&path).unwrap().is_empty());
    assert!(from_jsonl("").unwrap().is_empty());
    assert_eq!(to_jsonl(&[]), "");
}

#[test]
fn rank_and_defect_identities() {
    for e in builtin() {
        if e.invariants.is_empty() {
            continue;
        }
        let (rank, delta) = invariant_rank(&e.invariant_set(), 42).unwrap();
        assert_eq!(rank + delta, Q, "{}", e.id);
        let Some(h) = e.subalgebra() else { continue };
        for s in e.triples() {
            let d = defect(&h, &s, 42).unwrap();
            assert!(d <= h.gens.len().min(Q), "{}", e.id);
            if verify_triple(&reduced_system(), &s, &ZeroTest::default()).iter().all(|v| v.is_zero()) {
                assert!(d <= e.defect.unwrap_or(0), "{}: defect {d}", e.id);
            }
        }
    }
}

#[test]
fn solutions_of_the_system_are_einstein() {
    let test = ZeroTest { samples: 100, ..ZeroTest::default() };
    for e in builtin() {
        for (i, s) in e.triples().iter().enumerate() {
            let solves = verify_triple(&reduced_system(), s, &test).iter().all(|v| v.is_zero());
            let einstein = einstein_check(format!("{}/{i}", e.id), s, &test);
            assert_eq!(solves, einstein.verdict == Verdict::Pass, "{}: {:?}", e.id, einstein);
        }
    }
}

#[test]
fn translation_scaling_pipeline() {
    let all = builtin();
    let checks = verify_entry(find(&all, "a71.pipeline").unwrap(), &VerifyOptions::default());
    let ids: Vec<&str> = checks.iter().map(|c| c.id.as_str()).collect();
    for id in ["closure", "invariants", "rank", "ansatz", "reduced1", "reduced2", "reduced3", "reduced4"] {
        assert!(ids.contains(&format!("a71.pipeline/{id}").as_str()), "missing {id}");
    }
    for c in &checks {
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
    }
}

#[test]
fn partially_invariant_families() {
    let all = builtin();
    for k in 1..=4 {
        let id = format!("eq25.family{k}");
        let checks = verify_entry(find(&all, &id).unwrap(), &VerifyOptions::default());
        for c in &checks {
            let want = if c.id.ends_with("reducibility") { Verdict::Flag } else { Verdict::Pass };
            assert_eq!(c.verdict, want, "{c:?}");
        }
        let r = checks.iter().find(|c| c.id.ends_with("reducibility")).unwrap();
        assert!(r.detail.contains("(1 : 0)"), "{}", r.detail);
    }
}

#[test]
fn third_invariant_family_fails_with_witness() {
    let all = builtin();
    let checks = verify_entry(find(&all, "eq26.family3").unwrap(), &VerifyOptions::default());
    let sys = checks.iter().find(|c| c.id == "eq26.family3/solution/system").unwrap();
    assert_eq!(sys.verdict, Verdict::Fail);
    assert!(sys.witness.as_deref().unwrap().contains("c1="));
}

#[test]
fn table_rows_have_definite_verdicts() {
    let all = builtin();
    for row in 1..=4 {
        let id = format!("table1.row{row}");
        let checks = verify_entry(find(&all, &id).unwrap(), &VerifyOptions::default());
        let sys = checks.iter().find(|c| c.id == format!("{id}/solution/system")).unwrap();
        assert_eq!(sys.verdict, Verdict::Pass, "{sys:?}");
        let d = checks.iter().find(|c| c.id == format!("{id}/solution/defect")).unwrap();
        assert_eq!(d.verdict, Verdict::Pass, "{d:?}");
    }
}

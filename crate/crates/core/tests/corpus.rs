//! The proof corpus shipped with the repository.

use std::path::PathBuf;

use bangtensor::calculus::{Checker, RuleError, TheoremReport, Theory};
use bangtensor::syntax::{parse_proof, parse_theory};

fn corpus(file: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(file);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

const PROOFS: [&str; 3] = ["merge_lemma.btp", "merge.btp", "antihom.btp"];

/// Every theorem of the corpus, in dependency order.
fn script() -> bangtensor::calculus::ProofScript {
    let theorems = PROOFS
        .iter()
        .flat_map(|f| parse_proof(&corpus(f)).unwrap().theorems)
        .collect();
    bangtensor::calculus::ProofScript { theorems }
}

fn monoid() -> Theory {
    parse_theory(&corpus("monoid.bth")).unwrap()
}

fn run(theory: &Theory, files: &[&str]) -> Vec<TheoremReport> {
    let mut checker = Checker::new(theory);
    let mut out = Vec::new();
    for f in files {
        let script = parse_proof(&corpus(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        out.extend(checker.check_script(&script).theorems);
    }
    out
}

#[test]
fn monoid_proofs_are_accepted() {
    for r in run(&monoid(), &PROOFS) {
        assert!(r.accepted(), "{r}");
    }
}

/// Check a mutation after the accepted corpus and return its report.
fn mutation(file: &str) -> TheoremReport {
    let mut reports = run(&monoid(), &[&PROOFS[..], &[file]].concat());
    let r = reports.pop().unwrap();
    assert!(reports.iter().all(TheoremReport::accepted));
    assert!(!r.accepted(), "{file} should be rejected");
    assert!(
        r.errors().next().is_some(),
        "{file}: rejection is not attached to an item\n{r}"
    );
    r
}

#[test]
fn flipped_arc_is_a_claim_mismatch() {
    let r = mutation("mutations/flipped_arc.btp");
    let mismatch = r
        .errors()
        .find(|i| matches!(i.error, Some(RuleError::ClaimMismatch { .. })))
        .expect("a claim mismatch");
    assert_eq!(mismatch.id, "g5", "{r}");
}

#[test]
fn op_on_the_induction_box_is_refused_without_annotation() {
    let r = mutation("mutations/unfixed_op.btp");
    let first = r.errors().next().unwrap();
    assert_eq!(first.id, "c1");
    assert!(
        matches!(first.error, Some(RuleError::FixedBoxViolation { .. })),
        "{r}"
    );
}

#[test]
fn wrong_base_case_is_reported_at_the_induction() {
    let r = mutation("mutations/wrong_base.btp");
    let errs: Vec<_> = r.errors().collect();
    assert_eq!(errs.len(), 1, "{r}");
    assert!(
        matches!(
            errs[0].error,
            Some(RuleError::CaseMismatch { case: "base", .. })
        ),
        "{r}"
    );
}

#[test]
fn lemmas_are_needed_in_order() {
    let th = monoid();
    let mut checker = Checker::new(&th);
    let script = script();
    let mut reversed = script.clone();
    reversed.theorems.reverse();
    let v = checker.check_script(&reversed);
    assert!(!v.accepted());
    assert!(
        v.theorems.last().unwrap().accepted(),
        "spider_one needs no lemma"
    );
}

#[test]
fn theorems_hold_in_the_matrix_model() {
    use bangtensor::instantiate::InstanceBound;
    use bangtensor::model::{check_equation_instances, matrix_algebra, symmetrized};
    let th = monoid();
    let m = matrix_algebra::<i64>(2).unwrap();
    for ax in &th.axioms {
        let r = check_equation_instances(ax, &m, InstanceBound(2)).unwrap();
        assert!(r.passed(), "{r}");
    }
    let script = script();
    for t in &script.theorems {
        let r = check_equation_instances(&t.statement, &m, InstanceBound(3)).unwrap();
        assert!(r.passed(), "{r}");
    }
    let sym = symmetrized(&m).unwrap();
    let failing: Vec<_> = th
        .axioms
        .iter()
        .map(|ax| check_equation_instances(ax, &sym, InstanceBound(2)).unwrap())
        .filter(|r| !r.passed())
        .map(|r| r.equation)
        .collect();
    assert!(failing.contains(&"assoc".to_string()), "{failing:?}");
}

/// The matrix algebra with its basis relabelled by `perm`; the symmetrized
/// variant when `sym` is set.
fn relabelled(k: usize, perm: Vec<usize>, sym: bool) -> bangtensor::model::Model<i64> {
    use bangtensor::model::{matrix_algebra, symmetrized, Family, Model};
    use std::sync::Arc;
    let mut base = matrix_algebra::<i64>(k).unwrap();
    if sym {
        base = symmetrized(&base).unwrap();
    }
    let d = base.dim();
    let base = Arc::new(base);
    let mut out = Model::new(d).unwrap();
    for g in ["m", "u", "s", "a"] {
        let (base, perm) = (base.clone(), perm.clone());
        let fam: Family<i64> = Arc::new(move |word: &str| {
            let src = base.array(g, word).ok()?;
            let rank = word.len();
            let mut data = vec![0; src.len()];
            for (pos, v) in src.iter().enumerate() {
                let mut rest = pos;
                let mut idx = vec![0; rank];
                for slot in idx.iter_mut().rev() {
                    *slot = perm[rest % d];
                    rest /= d;
                }
                data[idx.iter().fold(0, |a, &i| a * d + i)] = *v;
            }
            Some(data)
        });
        out.assign_family(g, fam);
    }
    out
}

#[test]
fn accepted_theorems_hold_in_sampled_models_of_the_axioms() {
    use bangtensor::instantiate::InstanceBound;
    use bangtensor::model::check_equation_instances;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let th = monoid();
    let reports = run(&th, &PROOFS);
    let script = script();
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut models = 0;
    for _ in 0..6 {
        let k = r.gen_range(1..=2);
        let mut perm: Vec<usize> = (0..k * k).collect();
        perm.shuffle(&mut r);
        let m = relabelled(k, perm, r.gen_bool(0.3));
        let sound = th.axioms.iter().all(|ax| {
            check_equation_instances(ax, &m, InstanceBound(2))
                .unwrap()
                .passed()
        });
        if !sound {
            continue;
        }
        models += 1;
        for (t, rep) in script.theorems.iter().zip(&reports) {
            assert!(rep.accepted());
            let res = check_equation_instances(&t.statement, &m, InstanceBound(2)).unwrap();
            assert!(res.passed(), "{res}");
        }
    }
    assert!(models > 0);
}

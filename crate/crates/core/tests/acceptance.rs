//! Prints one line per acceptance criterion and exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use bangtensor::boxops::{apply_op, contexts_after, fresh_for, BoxOp, OpKind};
use bangtensor::calculus::equation::instance_keys;
use bangtensor::calculus::{Checker, Equation, RuleError, TheoremReport};
use bangtensor::instantiate::{
    apply_instantiation, apply_sequence, enumerate_instances, enumerate_raw, normal_form,
    normal_form_sides, pair_key, step, InstanceBound,
};
use bangtensor::model::{check_equation_instances, matrix_algebra, symmetrized};
use bangtensor::normalize::normalize_anon;
use bangtensor::syntax::{parse_proof, parse_theory};
use bangtensor::{
    check_wellformed, equiv, normalize, parse_tensor, print_tensor, BoxName, Condition,
    DirectedEdge, TensorExpr,
};
use common::{perturb, random_instantiation, random_tensor, rng, Limits};

const KINDS: [OpKind; 4] = [OpKind::Exp, OpKind::Kill, OpKind::Copy, OpKind::Drop];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

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

fn sample(n: usize, seed: u64) -> Vec<TensorExpr> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| random_tensor(&mut r, &Limits::default()))
        .collect()
}

fn wellformedness() -> Outcome {
    let codes = |s: &str| -> Vec<Condition> {
        match check_wellformed(&parse_tensor(s).unwrap()) {
            Ok(()) => Vec::new(),
            Err(v) => v.into_iter().map(|v| v.code).collect(),
        }
    };
    let allowed = codes("psi{[+a>A} [phi{-a}]A");
    let not = codes("psi{+a} [phi{-a}]A");
    let nested = codes("phi{[[-a>A>B} [[psi{-b}]B]A");
    let ok = allowed.is_empty() && not == [Condition::C3] && nested == [Condition::C2];
    outcome(
        ok,
        format!("allowed {allowed:?}, C3 term {not:?}, nesting term {nested:?}"),
    )
}

fn ops_create_tensors() -> Outcome {
    let mut results = 0;
    let mut bad = Vec::new();
    for g in sample(200, 1) {
        for b in g.boxes() {
            for kind in KINDS {
                let mut fr = fresh_for([&g]);
                let h = apply_op(&BoxOp::new(kind, b.clone()), &mut fr, &g).unwrap();
                results += 1;
                if check_wellformed(&h).is_err() {
                    bad.push(format!("{kind} {b} on {g}"));
                }
            }
        }
    }
    outcome(
        bad.is_empty() && results >= 200,
        format!("200 terms, {results} results, {} ill-formed", bad.len()),
    )
}

fn exp_factorization_and_congruence() -> Outcome {
    let mut factor_cases = 0;
    let mut factor_fail = 0;
    for g in sample(200, 2) {
        for b in g.boxes() {
            let mut fr = fresh_for([&g]);
            let copied = apply_op(&BoxOp::new(OpKind::Copy, b.clone()), &mut fr, &g).unwrap();
            let copy_name = fr.box_image(&b).unwrap().clone();
            let dropped = apply_op(&BoxOp::new(OpKind::Drop, copy_name), &mut fr, &copied).unwrap();
            let mut fr2 = fresh_for([&g]);
            let expanded = apply_op(&BoxOp::new(OpKind::Exp, b.clone()), &mut fr2, &g).unwrap();
            factor_cases += 1;
            if !equiv(&expanded, &dropped).unwrap() {
                factor_fail += 1;
            }
        }
    }
    let mut pairs = 0;
    let mut cong_fail = 0;
    let mut r = rng(3);
    while pairs < 100 {
        let g = random_tensor(&mut r, &Limits::default());
        if g.boxes().is_empty() {
            continue;
        }
        let h = perturb(&g, &mut r);
        pairs += 1;
        for b in g.boxes() {
            for kind in KINDS {
                let mut fr = fresh_for([&g, &h]);
                let op = BoxOp::new(kind, b.clone());
                let (g1, h1) = (
                    apply_op(&op, &mut fr, &g).unwrap(),
                    apply_op(&op, &mut fr, &h).unwrap(),
                );
                if !equiv(&g1, &h1).unwrap() {
                    cong_fail += 1;
                }
            }
        }
    }
    outcome(
        factor_fail == 0 && cong_fail == 0 && pairs >= 100,
        format!("{factor_cases} factorizations ({factor_fail} failed), {pairs} equivalent pairs x 4 ops ({cong_fail} failed)"),
    )
}

fn free_split(
    g: &TensorExpr,
) -> std::collections::BTreeMap<DirectedEdge, (Vec<BoxName>, Vec<BoxName>)> {
    let free = g.free_edges();
    g.occurrences()
        .into_iter()
        .filter(|o| free.contains(&o.edge))
        .map(|o| (o.edge, (o.ectx, o.nctx)))
        .collect()
}

fn context_table() -> Outcome {
    let mut triples = 0;
    let mut fresh_checked = 0;
    let mut fail = 0;
    for g in sample(200, 4) {
        let before = free_split(&g);
        for b in g.boxes() {
            for kind in KINDS {
                let op = BoxOp::new(kind, b.clone());
                let mut fr = fresh_for([&g]);
                let after = free_split(&apply_op(&op, &mut fr, &g).unwrap());
                for (e, (ectx, nctx)) in &before {
                    let pred = contexts_after(&op, &fr, ectx, nctx);
                    triples += 1;
                    if after.get(e).cloned() != pred.original {
                        fail += 1;
                    }
                    if let Some(fresh) = pred.fresh {
                        fresh_checked += 1;
                        let image = DirectedEdge {
                            name: fr.edge_image(&e.name).unwrap().clone(),
                            dir: e.dir,
                        };
                        if after.get(&image) != Some(&fresh) {
                            fail += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        fail == 0 && triples >= 200,
        format!("{triples} triples, {fresh_checked} fresh copies, {fail} mismatches"),
    )
}

fn normal_forms() -> Outcome {
    let mut r = rng(5);
    let mut n = 0;
    let mut fail = 0;
    while n < 100 {
        let g = random_tensor(&mut r, &Limits::default());
        if g.boxes().is_empty() {
            continue;
        }
        n += 1;
        let i = random_instantiation(&g, &mut r, 2);
        let nf = normal_form(&i, &g).unwrap();
        let fixed = g.free_names();
        let same = normalize_anon(&apply_instantiation(&i, &g).unwrap(), &fixed)
            == normalize_anon(&apply_instantiation(&nf, &g).unwrap(), &fixed);
        if !same || normal_form(&nf, &g).unwrap() != nf {
            fail += 1;
        }
    }
    outcome(fail == 0, format!("{n} instantiations, {fail} failures"))
}

fn instance_counts() -> Outcome {
    let spider = parse_tensor("s{+o [-x>A} [u{+x}]A").unwrap();
    let counts: Vec<usize> = (0..=4)
        .map(|n| enumerate_instances(&spider, InstanceBound(n)).len())
        .collect();
    let two = enumerate_instances(&parse_tensor("[x{}]A [y{}]B").unwrap(), InstanceBound(1)).len();
    outcome(
        counts == [1, 2, 3, 4, 5] && two == 4,
        format!("spider {counts:?}, two boxes {two}"),
    )
}

fn proof_corpus() -> Outcome {
    let theory = parse_theory(&corpus("monoid.bth")).unwrap();
    let mut checker = Checker::new(&theory);
    let reports = checker.check_script(&script()).theorems;
    let accepted: Vec<&str> = reports
        .iter()
        .filter(|r| r.accepted())
        .map(|r| r.name.as_str())
        .collect();
    let wanted = ["merge_lemma", "merge", "antihom"];
    let all =
        wanted.iter().all(|w| accepted.contains(w)) && reports.iter().all(TheoremReport::accepted);
    let mut mutations = Vec::new();
    for (file, expect) in [
        ("mutations/flipped_arc.btp", "ClaimMismatch"),
        ("mutations/unfixed_op.btp", "FixedBoxViolation"),
        ("mutations/wrong_base.btp", "CaseMismatch"),
    ] {
        let r = checker
            .check_script(&parse_proof(&corpus(file)).unwrap())
            .theorems
            .remove(0);
        let hit = r.errors().any(|i| {
            matches!(
                (&i.error, expect),
                (Some(RuleError::ClaimMismatch { .. }), "ClaimMismatch")
                    | (
                        Some(RuleError::FixedBoxViolation { .. }),
                        "FixedBoxViolation"
                    )
                    | (Some(RuleError::CaseMismatch { .. }), "CaseMismatch")
            )
        });
        mutations.push((!r.accepted() && r.error.is_none() && hit, file, expect));
    }
    let muts_ok = mutations.iter().all(|m| m.0);
    let desc: Vec<String> = mutations
        .iter()
        .map(|(ok, f, e)| format!("{f} {}{e}", if *ok { "" } else { "NOT " }))
        .collect();
    outcome(
        all && muts_ok,
        format!("accepted {accepted:?}; rejected {}", desc.join(", ")),
    )
}

fn op_soundness() -> Outcome {
    let theory = parse_theory(&corpus("monoid.bth")).unwrap();
    let merge = script()
        .theorems
        .into_iter()
        .find(|t| t.name == "merge")
        .unwrap()
        .statement;
    let mut eqs: Vec<Equation> = theory.axioms.clone();
    eqs.push(merge);
    let mut checks = 0;
    let mut fail = Vec::new();
    let bound = InstanceBound(2);
    for eq in &eqs {
        let name = eq.name.clone().unwrap_or_default();
        let sides = eq.sides();
        for b in eq.lhs.boxes() {
            let wider = instance_keys(eq, InstanceBound(bound.0 + 1));
            let same = instance_keys(eq, bound);
            let exp = eq.apply(&BoxOp::new(OpKind::Exp, b.clone())).unwrap();
            let kill = eq.apply(&BoxOp::new(OpKind::Kill, b.clone())).unwrap();
            checks += 2;
            if !instance_keys(&exp, bound).is_subset(&wider) {
                fail.push(format!("Exp {b} on {name}"));
            }
            if !instance_keys(&kill, bound).is_subset(&same) {
                fail.push(format!("Kill {b} on {name}"));
            }
            let copy = BoxOp::new(OpKind::Copy, b.clone());
            let (copied, _) = step(&copy, &sides).unwrap();
            for inst in enumerate_raw(&copied, bound) {
                checks += 1;
                let mut full = vec![copy.clone()];
                full.extend(inst.ops.iter().cloned());
                let nf = normal_form_sides(&full, &sides).unwrap();
                let only_ke = nf
                    .iter()
                    .all(|o| matches!(o.kind, OpKind::Exp | OpKind::Kill));
                let redone = apply_sequence(&nf, &sides).unwrap();
                let empty = BTreeSet::new();
                if !only_ke
                    || pair_key(&redone[0], &redone[1], &empty)
                        != pair_key(&inst.sides[0], &inst.sides[1], &empty)
                {
                    fail.push(format!("Copy {b} on {name} via {:?}", inst.ops));
                }
            }
        }
    }
    outcome(
        fail.is_empty() && checks > 0,
        format!(
            "{} equations, {checks} inclusion checks, failures {fail:?}",
            eqs.len()
        ),
    )
}

fn numerical_model() -> Outcome {
    let theory = parse_theory(&corpus("monoid.bth")).unwrap();
    let statements = script().theorems;
    let stmt = |n: &str| {
        statements
            .iter()
            .find(|t| t.name == n)
            .unwrap()
            .statement
            .clone()
    };
    let m = matrix_algebra::<i64>(2).unwrap();
    let mut checked = 0;
    let mut fail = Vec::new();
    let mut run = |eq: &Equation, bound: usize| {
        let r = check_equation_instances(eq, &m, InstanceBound(bound)).unwrap();
        checked += r.checked;
        if !r.passed() {
            fail.push(r.equation.clone());
        }
    };
    for ax in &theory.axioms {
        run(ax, 2);
    }
    run(&stmt("merge"), 2);
    run(&stmt("antihom"), 3);
    let sym = symmetrized(&m).unwrap();
    let caught: Vec<String> = theory
        .axioms
        .iter()
        .map(|ax| check_equation_instances(ax, &sym, InstanceBound(2)).unwrap())
        .filter(|r| !r.passed())
        .map(|r| r.equation)
        .collect();
    outcome(
        fail.is_empty() && !caught.is_empty(),
        format!(
            "d = {}, {checked} instances, failures {fail:?}; symmetrized fails {caught:?}",
            m.dim()
        ),
    )
}

fn syntax_round_trip() -> Outcome {
    let mut fail = 0;
    for g in sample(1000, 10) {
        if parse_tensor(&print_tensor(&g)).ok() != Some(g) {
            fail += 1;
        }
    }
    let worked = "phi{+a [<(-e)]B>A <(-d)]C} [psi{+d -c}]C [[psi{+e -b}]B]A";
    let once = print_tensor(&normalize(&parse_tensor(worked).unwrap()).unwrap());
    let twice = print_tensor(&normalize(&parse_tensor(&once).unwrap()).unwrap());
    outcome(
        fail == 0 && once == twice,
        format!("1000 terms, {fail} mismatches; worked example prints as {once}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("well-formedness of the literal examples", wellformedness, 1),
        (
            "box operations create well-formed tensors",
            ops_create_tensors,
            10,
        ),
        (
            "Exp factorization and congruence of the operations",
            exp_factorization_and_congruence,
            10,
        ),
        ("context table", context_table, 10),
        ("KE normal form", normal_forms, 10),
        ("instance enumeration", instance_counts, 1),
        ("proof corpus and mutations", proof_corpus, 5),
        ("operation soundness on bounded instances", op_soundness, 30),
        ("numerical check in the matrix algebra", numerical_model, 30),
        ("syntax round trip", syntax_round_trip, 5),
    ];
    let mut failed = Vec::new();
    for (n, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let pass = o.ok && in_time;
        println!(
            "criterion {:>2}: {} {name} ({}; {:.0} ms of {limit} s)",
            n + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64() * 1000.0
        );
        if !pass {
            failed.push(n + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

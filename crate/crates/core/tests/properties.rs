use std::collections::HashSet;

use proptest::prelude::*;

use cdtools::cache::CachePolicy;
use cdtools::compress::{compress, reduce, to_combinators, Grammar, DEFAULT_STEP_CAP};
use cdtools::dterm::{dims, parse_dnotation, print_dnotation, DTerm, DTermDag, Side};
use cdtools::enumerate::{enumerate_level, level_table, GeneratorKind, Mode};
use cdtools::formula::{parse_goal, parse_polish, print_polish, unify, Formula, Sym, SymbolTable};
use cdtools::kernel;
use cdtools::mgt::{ipt, mgt, n_simplify, verify, AxiomBase};
use cdtools::problem::{print_meredith, read_cd_problem, read_meredith, Registry};
use cdtools::sgcd::{search, GoalStatus, SearchConfig, SearchMode};

const AXIOMS: [&str; 4] = ["CpCqp", "CCpCqrCCpqCpr", "CCNppp", "CpCNpq"];

fn base() -> AxiomBase {
    AxiomBase::from_polish(&AXIOMS).unwrap()
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = (0u32..4).prop_map(Formula::var);
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            inner.prop_map(|a| Formula::app(Sym::NOT, vec![a])),
        ]
    })
}

fn dterm(axioms: u32, depth: u32) -> impl Strategy<Value = DTerm> {
    let leaf = (1..=axioms).prop_map(DTerm::axiom);
    leaf.prop_recursive(depth, 64, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| DTerm::d(a, b)))
}

/// D-terms built by reusing earlier subterms, so they contain repetition.
fn repetitive_dterm() -> impl Strategy<Value = DTerm> {
    prop::collection::vec((0usize..64, 0usize..64), 1..40).prop_map(|picks| {
        let mut pool: Vec<DTerm> = (1..=3).map(DTerm::axiom).collect();
        for (a, b) in picks {
            let d = DTerm::d(pool[a % pool.len()].clone(), pool[b % pool.len()].clone());
            if d.tree_size() <= 50 {
                pool.push(d);
            }
        }
        pool.pop().unwrap()
    })
}

fn ground(f: &Formula, axioms: &mut AxiomBase) -> Formula {
    let text = axioms.polish(f);
    parse_goal(&text, axioms.symbols_mut()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unifiers_are_idempotent_solutions(a in formula(), b in formula()) {
        if let Ok(s) = unify(&a, &b) {
            prop_assert_eq!(s.apply(&a), s.apply(&b));
            prop_assert_eq!(s.apply(&s.apply(&a)), s.apply(&a));
        }
    }

    #[test]
    fn polish_round_trip(f in formula()) {
        let syms = SymbolTable::standard();
        let text = print_polish(&f, &syms);
        let back = parse_polish(&text, &syms).unwrap();
        prop_assert!(back.is_variant_of(&f));
        prop_assert_eq!(print_polish(&back, &syms), text);
    }

    #[test]
    fn dnotation_and_dag_round_trip(ds in prop::collection::vec(dterm(3, 5), 1..4)) {
        for d in &ds {
            prop_assert_eq!(&parse_dnotation(&print_dnotation(d)).unwrap(), d);
        }
        prop_assert_eq!(DTermDag::compact(&ds).expand(), ds);
    }

    /// The MGT agrees with independent hyperresolution replay, and every
    /// in-place theorem is an instance of its subproof's MGT.
    #[test]
    fn mgt_is_most_general(d in dterm(4, 5)) {
        let axioms = base();
        match mgt(&d, &axioms) {
            Ok(m) => {
                let replayed = kernel::replay(&d, &axioms).unwrap();
                prop_assert!(m.conclusion.is_variant_of(&replayed));
                for path in d.positions() {
                    let sub = d.at(&path).unwrap();
                    let own = mgt(sub, &axioms).unwrap().conclusion;
                    let here = ipt(&d, &path, &axioms).unwrap().formula;
                    prop_assert!(own.subsumes(&here));
                }
            }
            Err(_) => prop_assert!(kernel::replay(&d, &axioms).is_err()),
        }
    }

    #[test]
    fn n_simplify_is_sound_and_idempotent(d in dterm(2, 5)) {
        let axioms = AxiomBase::from_polish(&AXIOMS[..2]).unwrap();
        if let Ok(m) = mgt(&d, &axioms) {
            let s = n_simplify(&d, &axioms).unwrap();
            prop_assert!(s.tree_size() <= d.tree_size());
            let mut grounded = axioms.clone();
            let goal = ground(&m.conclusion, &mut grounded);
            prop_assert!(verify(&s, &grounded, &goal).passed());
            prop_assert_eq!(n_simplify(&s, &axioms).unwrap(), s);
        }
    }

    #[test]
    fn compression_round_trip(d in repetitive_dterm()) {
        let g = compress(&d, 10_000);
        prop_assert_eq!(&g.expand().unwrap(), &d);
        prop_assert!(g.size() <= 2 * dims(std::slice::from_ref(&d)).compacted);
        let text = g.to_string();
        let back = Grammar::parse(&text).unwrap();
        prop_assert_eq!(back.expand().unwrap(), d.clone());
        if let Ok(c) = to_combinators(&g) {
            prop_assert_eq!(reduce(&c, DEFAULT_STEP_CAP).unwrap().0, d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mode_coherence(first in 0usize..4, second in 0usize..4, level in 0usize..4, pick in any::<prop::sample::Index>()) {
        let mut axioms = AxiomBase::from_polish(&[AXIOMS[first], AXIOMS[second]]).unwrap();
        let found = enumerate_level(GeneratorKind::TreeSize, level, &Mode::AxiomDriven, &axioms);
        prop_assume!(!found.is_empty());
        let (_, lemma) = &found[pick.index(found.len())];
        let goal = ground(lemma, &mut axioms);
        for l in 0..=level {
            let all = enumerate_level(GeneratorKind::TreeSize, l, &Mode::AxiomDriven, &axioms);
            let expect: HashSet<DTerm> = all.into_iter().filter(|(_, f)| f.subsumes(&goal)).map(|(d, _)| d).collect();
            let got: HashSet<DTerm> = enumerate_level(GeneratorKind::TreeSize, l, &Mode::GoalDriven(goal.clone()), &axioms)
                .into_iter().map(|(d, _)| d).collect();
            prop_assert_eq!(got, expect);
        }
    }

    #[test]
    fn cache_neutrality(mask in 1usize..16) {
        let chosen: Vec<&str> = (0..4).filter(|i| mask & (1 << i) != 0).map(|i| AXIOMS[i]).collect();
        let mut axioms = AxiomBase::from_polish(&chosen).unwrap();
        let goal = parse_goal("p", axioms.symbols_mut()).unwrap();
        let cfg = SearchConfig {
            mode: SearchMode::AxiomDrivenOnly,
            max_level: Some(3),
            ..SearchConfig::new(GeneratorKind::TreeSize, vec![goal])
        };
        let out = search(&axioms, &cfg, &CachePolicy::unrestricted()).unwrap();
        let table = level_table(GeneratorKind::TreeSize, &axioms, 3);
        for level in 0..=3 {
            let mut engine: Vec<Formula> = out.cache.level(level).iter().map(|e| e.lemma.normalized()).collect();
            let mut raw: Vec<Formula> = table.levels()[level].iter().map(|e| e.lemma.normalized()).collect();
            engine.sort();
            raw.sort();
            prop_assert_eq!(engine, raw);
        }
    }

    /// Any goal the goal-driven mode proves within level n is proved by
    /// blended search without pruning by level n as well.
    #[test]
    fn blending_dominance(
        kind in prop_oneof![Just(GeneratorKind::TreeSize), Just(GeneratorKind::Height), Just(GeneratorKind::Psp)],
        level in 0usize..4,
        lookahead in 1usize..3,
        pick in any::<prop::sample::Index>(),
    ) {
        let mut axioms = AxiomBase::from_polish(&AXIOMS[..2]).unwrap();
        let found = enumerate_level(kind, level, &Mode::AxiomDriven, &axioms);
        prop_assume!(!found.is_empty());
        let goal = ground(&found[pick.index(found.len())].1, &mut axioms);
        let goal_only = SearchConfig {
            mode: SearchMode::GoalDrivenOnly,
            max_level: Some(level),
            ..SearchConfig::new(kind, vec![goal.clone()])
        };
        let blended = SearchConfig { lookahead, ..SearchConfig { mode: SearchMode::Blended, ..goal_only.clone() } };
        let a = search(&axioms, &goal_only, &CachePolicy::unrestricted()).unwrap();
        let b = search(&axioms, &blended, &CachePolicy::unrestricted()).unwrap();
        prop_assert!(a.all_proved());
        prop_assert!(b.all_proved());
        let (GoalStatus::Proved { level: la, .. }, GoalStatus::Proved { level: lb, .. }) = (&a.goals[0].status, &b.goals[0].status) else {
            unreachable!()
        };
        prop_assert!(lb <= la);
    }

    #[test]
    fn search_is_deterministic(level in 0usize..5, pick in any::<prop::sample::Index>()) {
        let mut axioms = AxiomBase::from_polish(&AXIOMS[..2]).unwrap();
        let found = enumerate_level(GeneratorKind::TreeSize, level, &Mode::AxiomDriven, &axioms);
        prop_assume!(!found.is_empty());
        let goal = ground(&found[pick.index(found.len())].1, &mut axioms);
        let (cfg, policy) = cdtools::sgcd::Preset::Sgcd1.config(vec![goal]);
        let a = search(&axioms, &cfg, &policy).unwrap();
        let b = search(&axioms, &cfg, &policy).unwrap();
        prop_assert_eq!(a.goals[0].proof(), b.goals[0].proof());
        prop_assert_eq!(a.stats.to_kv(), b.stats.to_kv());
    }

    #[test]
    fn meredith_round_trip(ds in prop::collection::vec(dterm(2, 4), 1..4)) {
        let axioms = AxiomBase::from_polish(&AXIOMS[..2]).unwrap();
        let valid: Vec<DTerm> = ds.into_iter().filter(|d| !d.is_leaf() && mgt(d, &axioms).is_ok()).collect();
        prop_assume!(!valid.is_empty());
        let text = print_meredith(&axioms, &valid);
        let back = read_meredith(&text).unwrap();
        let mut goals: Vec<DTerm> = back.goals().map(|s| s.proof.clone().unwrap()).collect();
        let mut want = valid.clone();
        want.sort();
        want.dedup();
        goals.sort();
        prop_assert_eq!(goals, want);
        prop_assert_eq!(text.matches('D').count(), dims(&valid).compacted);
    }

    /// Detection ignores clause order and variable names; canonical output
    /// reads back to the same problem and verification is unaffected.
    #[test]
    fn detection_is_stable(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(), d in dterm(2, 4)) {
        let clauses = [
            "cnf(det, axiom, ~t(i(A,B)) | ~t(A) | t(B)).",
            "cnf(k, axiom, t(i(X,i(Y,X)))).",
            "cnf(s, axiom, t(i(i(X,i(Y,Z)),i(i(X,Y),i(X,Z))))).",
            "cnf(goal, negated_conjecture, ~t(i(a,i(b,a)))).",
        ];
        let text: String = perm.iter().map(|&i| format!("{}\n", clauses[i].replace('X', "Q"))).collect();
        let p = read_cd_problem(&text, "prob").unwrap();
        let reference = read_cd_problem(&clauses.join("\n"), "prob").unwrap();
        let formulas = |b: &AxiomBase| {
            let mut v: Vec<String> = b.iter().map(|(_, f)| b.polish(f)).collect();
            v.sort();
            v
        };
        prop_assert_eq!(formulas(&p.axioms), formulas(&reference.axioms));
        prop_assert_eq!(p.goal_polish(), reference.goal_polish());
        let again = read_cd_problem(&p.to_tptp(), "prob").unwrap();
        prop_assert_eq!(
            verify(&d, &p.axioms, &p.goal).passed(),
            verify(&d, &again.axioms, &again.goal).passed()
        );
    }
}

#[test]
fn registry_round_trip() {
    let r = Registry::bundled();
    let back = Registry::load(&r.to_text(), SymbolTable::standard()).unwrap();
    assert_eq!(back.to_text(), r.to_text());
    let fresh = parse_polish("CCCCCpqrsts", &SymbolTable::standard()).unwrap();
    assert!(r.lookup(&fresh).is_empty());
}

#[test]
fn ipt_at_root_is_mgt() {
    let axioms = base();
    let d = parse_dnotation("DD211").unwrap();
    assert_eq!(ipt(&d, &[], &axioms).unwrap().formula.normalized(), mgt(&d, &axioms).unwrap().conclusion);
    let minor = ipt(&d, &[Side::Minor], &axioms).unwrap().formula;
    assert!(mgt(&DTerm::axiom(1), &axioms).unwrap().conclusion.subsumes(&minor));
}

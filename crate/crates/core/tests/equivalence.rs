mod common;

use common::{atom, db, inst, subst};
use dms_core::{
    abstract_matches, alpha, check_forall_bisim, explore, hom_equiv, largest_bisimulation, matches, sample, simulates,
    AbstractState, Action, ConstantPool, Dedup, DmsSystem, DomainId, Error, ExplorationConfig, FailureKind, Fragment, Gate,
    Guard, Instance, Label, Lts, State, Verdict, Vocabulary,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn g(s: &str) -> Guard {
    Guard::Atom(atom(s))
}

fn vocabulary() -> Vocabulary {
    [dms_core::Predicate::new("P", 1), dms_core::Predicate::new("F", 2)].into_iter().collect()
}

fn system(actions: Vec<Action>) -> DmsSystem {
    DmsSystem::new(Instance::empty(), actions, vocabulary())
}

#[test]
fn similar_but_not_bisimilar() {
    // u -a-> u, u -a-> w, v -a-> v
    let mut lts: Lts<&str, char> = Lts::new("u");
    let v = lts.add_state("v");
    let w = lts.add_state("w");
    lts.add_transition(0, 'a', 0);
    lts.add_transition(0, 'a', w);
    lts.add_transition(v, 'a', v);
    assert!(simulates(&lts, 0, v) && simulates(&lts, v, 0));
    let blocks = largest_bisimulation(&lts);
    assert!(!blocks.same_block(0, v));
    assert_eq!(blocks.len(), 3);
}

#[test]
fn refinement_groups_hom_equivalent_duplicates() {
    // Exact dedup keeps {P(A)}, {P(A),P(_n0)}, … apart although they are
    // hom-equivalent; closing the chain with a loop makes them bisimilar.
    let dup = Action::new("dup", g("P(x)"), [], [atom("P(y)")]);
    let mut sys = system(vec![dup]);
    sys = DmsSystem::new(inst("P(A)"), sys.actions().to_vec(), vocabulary());
    let config = ExplorationConfig::new(ConstantPool::default()).with_depth(2).with_dedup(Dedup::Exact);
    let exact = explore(&sys, Some(DomainId::NullMeet), &config).unwrap();
    let chain: Vec<State> = exact.states().to_vec();
    assert!(chain.len() >= 3);
    let mut lts: Lts<State> = Lts::new(chain[0].clone());
    for s in &chain[1..] {
        lts.add_state(s.clone());
    }
    let label = Label::new("dup", subst(&[("x", "A")]));
    for i in 0..chain.len() {
        lts.add_transition(i, label.clone(), (i + 1).min(chain.len() - 1));
    }
    let other = lts.add_state(State::Abstract(AbstractState::single(DomainId::NullMeet, inst("F(A,A)")).unwrap()));
    let blocks = largest_bisimulation(&lts);
    for (i, s) in chain.iter().enumerate() {
        let (State::Abstract(a), State::Abstract(b)) = (s, &chain[0]) else { panic!("abstract states") };
        assert!(hom_equiv(a.instance(), b.instance()));
        assert!(blocks.same_block(0, i));
    }
    assert!(!blocks.same_block(0, other));

    let merged = explore(&sys, Some(DomainId::NullMeet), &config.clone().with_dedup(Dedup::HomEquiv)).unwrap();
    assert_eq!(merged.len(), 1);
}

#[test]
fn singletons_are_bisimilar_to_their_abstraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for domain in DomainId::ALL {
        for _ in 0..15 {
            let consts = sample::constants(3);
            let preds = sample::vocabulary(&mut rng, 2, 2);
            let act = sample::random_action(&mut rng, "a", &preds, &consts, domain.licensed_fragment());
            let d = sample::database(&mut rng, &preds, &consts, 4);
            let sys = DmsSystem::new(Instance::empty(), vec![act.clone()], preds.iter().cloned().collect());
            let config = ExplorationConfig::new(ConstantPool::new(consts.iter().cloned(), 1));
            let c = [d];
            let report = check_forall_bisim(&alpha(domain, &c).unwrap(), &c, &sys, &config, 2).unwrap();
            assert!(report.holds(), "{domain} {act} {:?}", report.verdict);
        }
    }
}

fn union_counterexample() -> [dms_core::Database; 2] {
    [db("P(A), P(B), F(A,B), F(B,A)"), db("P(A), P(B), P(C)")]
}

#[test]
fn union_with_conjunctive_guards_is_unsound() {
    let g_sf = Guard::and(g("F(x,y)"), g("F(y,x)"));
    let sys = system(vec![Action::new("sym", g_sf, [], [])]);
    let c = union_counterexample();
    let a = alpha(DomainId::Union, &c).unwrap();
    let strict = ExplorationConfig::new(ConstantPool::new(["A", "B", "C"], 0));
    assert_eq!(
        check_forall_bisim(&a, &c, &sys, &strict, 1).unwrap_err(),
        Error::FragmentViolation { domain: DomainId::Union, fragment: Fragment::PfCg }
    );
    let report = check_forall_bisim(&a, &c, &sys, &strict.clone().with_gate(Gate::Override), 1).unwrap();
    let Verdict::FailsAt(f) = report.verdict else { panic!("override mode must expose the discrepancy") };
    assert_eq!(f.kind, FailureKind::AbstractOnly);
    assert_eq!(f.label.unwrap().action.as_ref(), "sym");
}

#[test]
fn null_meet_separates_projections_from_intersection() {
    let d1 = db("P(A), P(B), F(A,B)");
    let d2 = db("P(A), P(C), F(A,C)");
    let af = Guard::exists("y", g("F(A,y)"));
    let pool = ConstantPool::default();
    assert!(!matches(&af, &d1, &pool).is_empty() && !matches(&af, &d2, &pool).is_empty());
    let b = AbstractState::single(DomainId::NullMeet, inst("P(A), F(A,_n0)")).unwrap();
    assert!(!abstract_matches(&b, &af, &pool, Gate::Strict).unwrap().is_empty());
    let meet = alpha(DomainId::NullMeet, &[d1.clone(), d2.clone()]).unwrap();
    assert!(!abstract_matches(&meet, &af, &pool, Gate::Strict).unwrap().is_empty());
    let a = alpha(DomainId::Intersection, &[d1, d2]).unwrap();
    assert_eq!(a.instance(), &inst("P(A)"));
    assert!(abstract_matches(&a, &af, &pool, Gate::Override).unwrap().is_empty());
}

#[test]
fn abstraction_mismatch_is_reported() {
    let c = [db("P(A)"), db("P(B)")];
    let wrong = alpha(DomainId::Union, &c[..1]).unwrap();
    let sys = system(vec![Action::new("add", Guard::True, [], [atom("P(x)")])]);
    let config = ExplorationConfig::new(ConstantPool::new(["A"], 0));
    let report = check_forall_bisim(&wrong, &c, &sys, &config, 1).unwrap();
    assert!(matches!(report.verdict, Verdict::FailsAt(ref f) if f.kind == FailureKind::AbstractionMismatch));
}

#[test]
fn null_meet_steps_lose_precision_under_additions() {
    // Every member has some P(u,C); adding P(C,C) everywhere makes
    // ∃x. P(A,x) ∧ P(x,x) true in each member, but the meet taken before
    // the step has already forgotten which P(A,·) atom to pair it with.
    let act = Action::new("loop", Guard::exists("u", g("P(u,x)")), [], [atom("P(x,x)")]);
    let sys = DmsSystem::new(Instance::empty(), vec![act.clone()], [dms_core::Predicate::new("P", 2)].into_iter().collect());
    let c = [db("P(A,C)"), db("P(A,A), P(B,C)"), db("P(A,B), P(A,C), P(C,A), P(C,B)")];
    let a = alpha(DomainId::NullMeet, &c).unwrap();
    let sigma = subst(&[("x", "C")]);
    let pool = ConstantPool::new(["A", "B", "C"], 0);
    assert!(abstract_matches(&a, act.guard(), &pool, Gate::Strict).unwrap().contains(&sigma));

    let next = dms_core::abstract_step(&a, &act, &sigma, &pool, Gate::Strict, &mut dms_core::NullSupply::new()).unwrap();
    let lifted = dms_core::lifted_forall_step(&c, &act, &sigma, &sigma).unwrap();
    let after = alpha(DomainId::NullMeet, &lifted).unwrap();
    // The step is sound but loses precision: γ(α(C')) ⊊ γ(I').
    assert!(dms_core::state_leq(&after, &next).unwrap());
    assert!(!next.equivalent(&after), "{next} vs {after}");

    let probe = Guard::exists("x", Guard::and(g("P(A,x)"), g("P(x,x)")));
    assert!(lifted.iter().all(|d| !matches(&probe, d, &pool).is_empty()));
    assert!(abstract_matches(&next, &probe, &pool, Gate::Strict).unwrap().is_empty());

    // The pair domain inherits the loss through its meet component.
    for domain in [DomainId::NullMeet, DomainId::NullPair] {
        let a = alpha(domain, &c).unwrap();
        let report = check_forall_bisim(&a, &c, &sys, &ExplorationConfig::new(pool.clone()), 2).unwrap();
        assert!(
            matches!(report.verdict, Verdict::FailsAt(ref f) if f.kind == FailureKind::SuccessorMismatch),
            "{domain}: {:?}",
            report.verdict
        );
    }
}

//! Hand-checked values for the friendship network and the lattice of
//! instances with labeled nulls.

mod common;

use std::collections::BTreeSet;

use common::{atom, db, inst, subst};
use dms_core::{
    abstract_matches, abstract_step, alpha, concrete_step, concrete_successors, explore, find_homomorphism, gamma_contains,
    gamma_enumerate, hom_equiv, hom_leq, label_compatible, lattice_join, lattice_meet, lifted_forall_step, matches, normalize,
    satisfies, state_leq, validate, AbstractState, Action, ConstantPool, Dedup, DmsSystem, DomainId, Error, ExplorationConfig,
    Fragment, Gate, Guard, Instance, Label, NullSupply, Polarity, Predicate, Rule, State, Substitution, Vocabulary,
};

fn a(s: &str) -> Guard {
    Guard::Atom(atom(s))
}

fn d_e() -> Instance {
    inst("P(A), P(B), P(C), F(A,B), F(B,A), F(A,C)")
}

fn g_sf() -> Guard {
    Guard::and(a("F(x,y)"), a("F(y,x)"))
}

fn g_df() -> Guard {
    Guard::and(a("F(x,y)"), Guard::not(a("F(y,x)")))
}

fn g_af() -> Guard {
    Guard::exists("y", a("F(x,y)"))
}

fn g_nf() -> Guard {
    Guard::and(Guard::not(a("F(x,y)")), Guard::not(a("F(y,x)")))
}

fn set(items: &[Substitution]) -> BTreeSet<Substitution> {
    items.iter().cloned().collect()
}

fn abc() -> ConstantPool {
    ConstantPool::new(["A", "B", "C"], 0)
}

fn vocabulary() -> Vocabulary {
    [Predicate::new("P", 1), Predicate::new("F", 2)].into_iter().collect()
}

fn a_add() -> Action {
    Action::new("a_add", Guard::True, [], [atom("P(x)")])
}

fn a_rev() -> Action {
    Action::new("a_rev", g_df(), [atom("F(x,y)")], [atom("F(y,x)")])
}

#[test]
fn friendship_guard_matches() {
    let pool = ConstantPool::default();
    assert_eq!(matches(&g_sf(), &d_e(), &pool), set(&[subst(&[("x", "A"), ("y", "B")]), subst(&[("x", "B"), ("y", "A")])]));
    assert_eq!(matches(&g_df(), &d_e(), &pool), set(&[subst(&[("x", "A"), ("y", "C")])]));
    assert_eq!(matches(&g_af(), &d_e(), &pool), set(&[subst(&[("x", "A")]), subst(&[("x", "B")])]));
    let nf = matches(&g_nf(), &d_e(), &abc());
    for listed in [[("x", "B"), ("y", "C")], [("x", "C"), ("y", "B")], [("x", "A"), ("y", "A")]] {
        assert!(nf.contains(&subst(&listed)));
    }
    let expected = [["B", "C"], ["C", "B"], ["A", "A"], ["B", "B"], ["C", "C"]];
    assert_eq!(nf, expected.iter().map(|[x, y]| subst(&[("x", x), ("y", y)])).collect());
}

#[test]
fn friendship_satisfaction() {
    let s = subst(&[("x", "A"), ("y", "B")]);
    assert!(satisfies(&d_e(), &s, &g_sf(), &ConstantPool::default()).unwrap());
    assert!(!satisfies(&d_e(), &s, &g_df(), &ConstantPool::default()).unwrap());
    assert_eq!(
        satisfies(&d_e(), &subst(&[("x", "A")]), &g_sf(), &ConstantPool::default()),
        Err(Error::UnboundVariable("y".into()))
    );
}

#[test]
fn friendship_guard_fragments() {
    let sf = normalize(&g_sf()).unwrap();
    assert_eq!(sf.fragment(), Fragment::PfCg);
    let df = normalize(&g_df()).unwrap();
    assert!(df.quantified().is_empty());
    assert_eq!(df.positive(), &[atom("F(x,y)")].into_iter().collect());
    assert_eq!(df.negative(), &[atom("F(y,x)")].into_iter().collect());
    assert!(df.is_safe());
    assert_eq!(df.fragment(), Fragment::PfNcg);
    let af = normalize(&g_af()).unwrap();
    assert_eq!(af.fragment(), Fragment::Cg);
    assert_eq!(af.free_vars(), &["x".into()].into_iter().collect());
    let nf = normalize(&g_nf()).unwrap();
    assert!(nf.positive().is_empty());
    assert_eq!(nf.polarity(), Polarity::Universal);
    assert_eq!(nf.fragment(), Fragment::Cna);
}

#[test]
fn lattice_join_and_meet() {
    let i = inst("P(A), P(B), F(_n0,_n1)");
    let j = inst("P(A), P(C), F(A,C)");
    assert_eq!(lattice_join(&i, &j), inst("P(A), P(B), P(C), F(_n0,_n1), F(A,C)"));
    assert!(hom_equiv(&lattice_meet(&i, &j), &inst("P(A), F(_n0,_n1)")));
    // The friend of A is a person in both databases, so the greatest lower
    // bound keeps P(_n0); {P(A), F(A,_n0)} is a strictly smaller lower bound.
    let d1 = inst("P(A), P(B), F(A,B)");
    let d2 = inst("P(A), P(C), F(A,C)");
    let meet = lattice_meet(&d1, &d2);
    assert_eq!(meet, inst("P(A), P(_n0), F(A,_n0)"));
    let weaker = inst("P(A), F(A,_n0)");
    assert!(hom_leq(&weaker, &meet) && !hom_leq(&meet, &weaker));
    assert!(hom_leq(&meet, &d1) && hom_leq(&meet, &d2));
}

#[test]
fn homomorphism_facts() {
    let p = inst("P(A)");
    let pn = inst("P(A), P(_n0)");
    assert!(hom_leq(&p, &pn) && hom_leq(&pn, &p) && hom_equiv(&p, &pn));
    let loose = inst("F(_n0,_n1)");
    let tight = inst("F(_n0,_n0)");
    assert!(find_homomorphism(&loose, &tight, &Default::default()).is_some());
    assert!(find_homomorphism(&tight, &loose, &Default::default()).is_none());
    assert!(!hom_equiv(&loose, &tight));
}

#[test]
fn abstraction_examples() {
    let c = [db("P(A), P(B), F(A,B), F(B,A)"), db("P(A), P(B), P(C)")];
    let u = alpha(DomainId::Union, &c).unwrap();
    assert_eq!(u.instance(), &inst("P(A), P(B), P(C), F(A,B), F(B,A)"));
    let c = [db("P(A), P(B), F(A,B)"), db("P(A), P(C), F(A,C)")];
    let m = alpha(DomainId::NullMeet, &c).unwrap();
    assert!(hom_equiv(m.instance(), &inst("P(A), P(_n1), F(A,_n1)")));
    assert!(gamma_contains(&m, &db("P(A), P(B), F(A,B)")));
    assert_eq!(alpha(DomainId::Pair, &[]), Err(Error::EmptyInput));
}

#[test]
fn abstract_guard_evaluation() {
    let m = AbstractState::single(DomainId::NullMeet, inst("P(A), F(A,_n1)")).unwrap();
    assert_eq!(abstract_matches(&m, &g_af(), &ConstantPool::default(), Gate::Strict).unwrap(), set(&[subst(&[("x", "A")])]));

    let i = AbstractState::single(DomainId::Intersection, inst("P(A)")).unwrap();
    let proj = Guard::exists("y", a("F(A,y)"));
    assert!(matches!(
        abstract_matches(&i, &proj, &ConstantPool::default(), Gate::Strict),
        Err(Error::FragmentViolation { domain: DomainId::Intersection, fragment: Fragment::Cg })
    ));

    let u = alpha(DomainId::Union, &[dms_core::Database::try_from(d_e()).unwrap()]).unwrap();
    assert_eq!(abstract_matches(&u, &g_nf(), &abc(), Gate::Strict).unwrap(), matches(&g_nf(), &d_e(), &abc()));
}

#[test]
fn concretization_enumeration() {
    let u = AbstractState::single(DomainId::Union, inst("P(A)")).unwrap();
    assert_eq!(gamma_enumerate(&u, &ConstantPool::new(["A"], 0), 1), vec![db(""), db("P(A)")]);
    let i = AbstractState::single(DomainId::Intersection, inst("P(A)")).unwrap();
    assert_eq!(gamma_enumerate(&i, &ConstantPool::new(["A", "B"], 0), 2), vec![db("P(A)"), db("P(A), P(B)")]);
    assert!(gamma_enumerate(&i, &ConstantPool::new(["A"], 0), 0).is_empty());
}

#[test]
fn domain_orders() {
    let u = |s| AbstractState::single(DomainId::Union, inst(s)).unwrap();
    assert!(state_leq(&u("P(A)"), &u("P(A), P(B)")).unwrap());
    let m = |s| AbstractState::single(DomainId::NullMeet, inst(s)).unwrap();
    assert!(state_leq(&m("P(A), F(A,_n0)"), &m("P(A)")).unwrap());
    assert!(!state_leq(&m("P(A)"), &m("P(A), F(A,_n0)")).unwrap());
    assert_eq!(state_leq(&u("P(A)"), &m("P(A)")), Err(Error::DomainMismatch(DomainId::Union, DomainId::NullMeet)));
}

#[test]
fn action_validation() {
    let sys = |acts| DmsSystem::new(Instance::empty(), acts, vocabulary());
    assert!(validate(&sys(vec![a_add(), a_rev()])).is_empty());
    let bad = Action::new("drop", Guard::True, [atom("P(x)")], []);
    let diags = validate(&sys(vec![bad]));
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].rule, Rule::DelNotGuardBound);
    assert_eq!(diags[0].action.as_deref(), Some("drop"));
}

#[test]
fn concrete_steps() {
    assert_eq!(concrete_step(&db(""), &a_add(), &subst(&[("x", "A")])).unwrap(), db("P(A)"));
    let d = dms_core::Database::try_from(d_e()).unwrap();
    let next = concrete_step(&d, &a_rev(), &subst(&[("x", "A"), ("y", "C")])).unwrap();
    assert_eq!(next, db("P(A), P(B), P(C), F(A,B), F(B,A), F(C,A)"));
    assert_eq!(concrete_step(&d, &a_rev(), &subst(&[("x", "A"), ("y", "B")])), Err(Error::NotEnabled("a_rev".into())));
    assert_eq!(concrete_step(&db(""), &a_add(), &Substitution::new()), Err(Error::IncompleteExtension("x".into())));

    let sys = DmsSystem::new(Instance::empty(), vec![a_add()], vocabulary());
    let succ = concrete_successors(&db(""), &sys, &ConstantPool::new(["A"], 0)).unwrap();
    assert_eq!(succ, vec![(Label::new("a_add", subst(&[("x", "A")])), db("P(A)"))]);
}

#[test]
fn abstract_steps_introduce_nulls() {
    let empty = AbstractState::single(DomainId::NullMeet, Instance::empty()).unwrap();
    let mut supply = NullSupply::new();
    let next =
        abstract_step(&empty, &a_add(), &Substitution::new(), &ConstantPool::default(), Gate::Strict, &mut supply).unwrap();
    assert_eq!(next.instance(), &inst("P(_n0)"));
    let again =
        abstract_step(&empty, &a_add(), &Substitution::new(), &ConstantPool::default(), Gate::Strict, &mut supply).unwrap();
    assert!(hom_equiv(next.instance(), again.instance()));
}

#[test]
fn lifted_steps() {
    let c = [db(""), db("P(B)")];
    let s = subst(&[("x", "A")]);
    assert_eq!(lifted_forall_step(&c, &a_add(), &Substitution::new(), &s), Some(vec![db("P(A)"), db("P(A), P(B)")]));
    let rm = Action::new("rm", a("P(x)"), [atom("P(x)")], []);
    assert_eq!(lifted_forall_step(&c, &rm, &subst(&[("x", "B")]), &subst(&[("x", "B")])), None);
    assert_eq!(lifted_forall_step(&[db("P(B)")], &rm, &subst(&[("x", "B")]), &subst(&[("x", "B")])), Some(vec![db("")]));
}

#[test]
fn label_compatibility() {
    let l = |act: &str, s: &[(&str, &str)]| Label::new(act, subst(s));
    assert!(label_compatible(&l("a", &[("x", "A")]), &l("a", &[("x", "A"), ("y", "B")])));
    assert!(!label_compatible(&l("a", &[("x", "A")]), &l("b", &[("x", "A")])));
    assert!(label_compatible(&l("a", &[("x", "_n0")]), &l("a", &[("x", "A")])));
    assert!(!label_compatible(&l("a", &[("x", "_n0"), ("y", "_n0")]), &l("a", &[("x", "A"), ("y", "B")])));
}

#[test]
fn bounded_exploration() {
    let sys = DmsSystem::new(Instance::empty(), vec![a_add()], vocabulary());
    let concrete = explore(&sys, None, &ExplorationConfig::new(ConstantPool::new(["A"], 0)).with_depth(2)).unwrap();
    let states: BTreeSet<State> = concrete.states().iter().cloned().collect();
    assert_eq!(states, [State::Concrete(db("")), State::Concrete(db("P(A)"))].into_iter().collect());

    // {P(_n0)} absorbs every further addition up to hom-equivalence.
    let config = ExplorationConfig::new(ConstantPool::default()).with_depth(4).with_dedup(Dedup::HomEquiv);
    let abs = explore(&sys, Some(DomainId::NullMeet), &config).unwrap();
    assert_eq!(abs.len(), 2);
    assert!(!abs.is_truncated());

    let idle = DmsSystem::new(Instance::empty(), Vec::new(), vocabulary());
    assert_eq!(explore(&idle, None, &ExplorationConfig::new(ConstantPool::default())).unwrap().len(), 1);
}

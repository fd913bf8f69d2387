mod common;

use std::sync::Arc;

use common::stack;
use kforce::combinators::{church, succ, succ_numeral, t0};
use kforce::machine::*;
use kforce::syntax::*;
use proptest::prelude::*;

fn p(s: &str) -> Term {
    parse_term(s).unwrap()
}

fn one_step(term: Term, items: Vec<Term>) -> (Process, RuleTag) {
    match Machine::default().step(Process::new(term, stack(items))) {
        StepOutcome::Next(p, r) => (p, r),
        other => panic!("no step: {other:?}"),
    }
}

#[test]
fn save_captures_the_stack() {
    let rest = vec![opaque("a")];
    let (next, rule) = one_step(p("cc"), vec![p("λx.x"), opaque("a")]);
    assert_eq!(rule, RuleTag::Save);
    let k = Term::Cont(Arc::new(stack(rest.clone())));
    let expected = Process::new(p("λx.x"), stack(vec![k, opaque("a")]));
    assert!(process_alpha_eq(&next, &expected));
}

#[test]
fn restore_discards_the_current_stack() {
    let pi = stack(vec![opaque("a")]);
    let k = Term::Cont(Arc::new(pi.clone()));
    let (next, rule) = one_step(k, vec![opaque("xi"), opaque("junk"), opaque("more")]);
    assert_eq!(rule, RuleTag::Restore);
    assert!(process_alpha_eq(&next, &Process::new(opaque("xi"), pi)));
}

#[test]
fn write_then_read_round_trips_a_token() {
    let tau = Term::Seq("tok".into(), 0);
    let (after_write, r1) = one_step(
        inst(Instruction::ChiPrime),
        vec![inst(Instruction::Chi), tau.clone(), p("λd.d"), opaque("eta")],
    );
    assert_eq!(r1, RuleTag::Write);
    assert_eq!(after_write.stack.bottom(), Some(&tau));
    // χ ⋆ ξ'·η·…·τ: the token comes back on top
    let mut st = after_write.stack.clone();
    st.push(opaque("xi2"));
    let mut m = Machine::default();
    match m.step(Process::new(after_write.term, st)) {
        StepOutcome::Next(q, RuleTag::Read) => {
            assert_eq!(q.term, opaque("xi2"));
            assert_eq!(q.stack.top(), Some(&tau));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn read_needs_a_bottom_item() {
    let out = Machine::default().step(Process::new(inst(Instruction::Chi), stack(vec![opaque("xi")])));
    assert!(matches!(out, StepOutcome::Stuck(_, StuckReason::ChiOnEmptyBottom)));
}

#[test]
fn open_variable_is_stuck() {
    let out = Machine::default().step(Process::new(var("x"), stack(vec![])));
    assert!(matches!(out, StepOutcome::Stuck(_, StuckReason::OpenVariable(_))));
}

#[test]
fn grab_on_empty_stack_halts() {
    let r = run(Process::new(p("λx.x"), stack(vec![])), 10);
    assert!(matches!(r.outcome, Outcome::Halted(_, HaltReason::EmptyStack)));
}

#[test]
fn storage_operator_delivers_three() {
    let config = MachineConfig::default().with_probe("phi", ProbeHandler::Spy);
    let mut m = Machine::new(config);
    let r = m.run(Process::new(t0(), stack(vec![probe("phi"), church(3)])), 10_000);
    assert!(r.outcome.is_halted());
    let delivered = m.spy_log[0].1.top().unwrap().clone();
    assert_eq!(decode_numeral(&delivered, 10_000), Ok(3));
}

#[test]
fn decode_examples() {
    assert_eq!(decode_numeral(&church(0), 100), Ok(0));
    assert_eq!(decode_numeral(&app(succ(), app(succ(), church(0))), 1000), Ok(2));
    assert_eq!(decode_numeral(&succ_numeral(5), 1000), Ok(5));
    assert!(decode_numeral(&p("λx.x"), 100).is_err());
    assert!(matches!(decode_numeral(&var("x"), 100), Err(DecodeError::NotClosed)));
}

#[test]
fn interning_is_first_seen() {
    let mut m = Machine::default();
    let s1 = stack(vec![p("λx.x")]);
    let s2 = stack(vec![opaque("a")]);
    assert_eq!(m.intern_stack(&s1), 0);
    assert_eq!(m.intern_stack(&s2), 1);
    assert_eq!(m.intern_stack(&s1), 0);
    assert_eq!(m.intern_stack(&stack(vec![p("λy.y")])), 0);
}

#[test]
fn quote_pushes_the_stack_number() {
    let mut m = Machine::default();
    m.intern_stack(&stack(vec![opaque("other")]));
    match m.step(Process::new(inst(Instruction::Sigma), stack(vec![opaque("xi"), opaque("a")]))) {
        StepOutcome::Next(q, RuleTag::Quote) => {
            assert_eq!(q.term, opaque("xi"));
            assert_eq!(decode_numeral(q.stack.top().unwrap(), 1000), Ok(1));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn fuel_exhaustion_is_an_outcome() {
    let omega = p("(λx.(x)x)λx.(x)x");
    let r = run(Process::new(omega, stack(vec![])), 50);
    assert!(matches!(r.outcome, Outcome::FuelExhausted(_)));
    assert_eq!(r.steps, 50);
}

#[test]
fn trace_records_contiguous_steps() {
    let mut m = Machine::new(MachineConfig::default().with_trace(None));
    let r = m.run(Process::new(p("(λx.λy.x)#a #b"), stack(vec![])), 100);
    let steps: Vec<u64> = r.trace.entries.iter().map(|e| e.step).collect();
    assert_eq!(steps, (0..r.steps).collect::<Vec<_>>());
    let json: serde_json::Value = serde_json::from_str(&r.trace.entries[0].to_json()).unwrap();
    assert_eq!(json["rule"], "push");
    assert_eq!(json["base"], 0);
}

#[test]
fn bounded_trace_keeps_the_tail() {
    let mut m = Machine::new(MachineConfig::default().with_trace(Some(2)));
    let r = m.run(Process::new(p("(λx.λy.x)#a #b"), stack(vec![])), 100);
    assert_eq!(r.trace.entries.len(), 2);
    assert_eq!(r.trace.dropped + 2, r.steps);
}

/// Items consumed from the top by each rule.
fn consumed(rule: RuleTag) -> Option<usize> {
    Some(match rule {
        RuleTag::Push | RuleTag::ApplyCont => 0,
        RuleTag::Grab | RuleTag::Save | RuleTag::Quote => 1,
        RuleTag::VCall => 2,
        _ => return None,
    })
}

proptest! {
    #[test]
    fn steps_are_deterministic(t in common::any_term()) {
        let t = common::close(t);
        let a = common::run_default(t.clone(), vec![opaque("a"), opaque("b")], 200);
        let b = common::run_default(t, vec![opaque("a"), opaque("b")], 200);
        prop_assert!(process_alpha_eq(a.outcome.process(), b.outcome.process()));
        prop_assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn bottom_token_is_untouched_by_ordinary_rules(t in common::any_term()) {
        let t = common::close(t);
        let tau = Term::Seq("tau".into(), 0);
        let mut m = Machine::new(MachineConfig::default());
        let mut cur = Process::new(t, stack(vec![opaque("a"), opaque("b"), tau.clone()]));
        for _ in 0..200 {
            let before = cur.stack.clone();
            match m.step(cur) {
                StepOutcome::Next(next, rule) => {
                    if let Some(n) = consumed(rule) {
                        if before.bottom() == Some(&tau) && before.len() > n {
                            prop_assert_eq!(next.stack.bottom(), Some(&tau), "{:?}", rule);
                        }
                    }
                    cur = next;
                }
                _ => break,
            }
        }
    }
}

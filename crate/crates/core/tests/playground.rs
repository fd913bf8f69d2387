mod common;

use common::{any_bits, raw_contains, stack};
use kforce::combinators::{beta, church, h};
use kforce::machine::{decode_numeral, Machine, MachineConfig, ProbeHandler};
use kforce::playground::*;
use kforce::syntax::{apps, probe, Process};
use proptest::prelude::*;

/// Far enough to cover both prefixes and two common periods of sets with
/// prefixes and periods shorter than 7.
const SCAN: u64 = 6 + 2 * 60;

fn set(s: &str) -> EvSet {
    s.parse().unwrap()
}

fn ev((prefix, period): &(Vec<bool>, Vec<bool>)) -> EvSet {
    EvSet::new(prefix.clone(), period.clone())
}

/// Runs `t ⋆ m̄·spy·π` and decodes the numeral handed to the spy.
fn spy_numeral(t: kforce::syntax::Term, m: u64) -> u64 {
    let mut machine = Machine::new(MachineConfig::default().with_probe("spy", ProbeHandler::Spy));
    let r = machine.run(Process::new(t, stack(vec![church(m), probe("spy")])), 100_000);
    assert!(r.outcome.is_halted(), "{}", r.outcome.describe());
    let (_, st) = &machine.spy_log[0];
    decode_numeral(st.top().unwrap(), 100_000).unwrap()
}

#[test]
fn algebra_examples() {
    let evens = set(":10");
    let odds = set(":01");
    assert_eq!(evens.meet(&odds), EvSet::empty());
    assert_eq!(EvSet::unit().diff(&evens), odds);
    assert_eq!(evens.complement(), odds);
    assert!(evens.is_infinite());
    assert!(!EvSet::finite(&[0, 1, 2]).is_infinite());
    assert!(evens.diff(&EvSet::residue(4, 0)).is_infinite());
}

#[test]
fn order_examples() {
    let evens = set(":10");
    assert!(EvSet::residue(4, 0).leq_cond(&evens));
    assert!(evens.join(&EvSet::finite(&[1, 3, 5])).leq_cond(&evens));
    assert!(!evens.leq_cond(&set(":01")));
}

#[test]
fn text_format() {
    assert_eq!(set(":10").to_string(), ":10");
    assert_eq!(set("1:0").to_string(), "1:0");
    for bad in ["10", ":", "1:2", "a:1"] {
        assert!(bad.parse::<EvSet>().is_err(), "{bad}");
    }
}

#[test]
fn chain_examples() {
    let nat = chain_meet(&[EvSet::unit()]).unwrap();
    assert_eq!((0..4).map(|j| nat.f(j)).collect::<Vec<_>>(), [1, 2, 3, 4]);
    assert_eq!(nat.image, EvSet::unit().diff(&EvSet::finite(&[0])));
    let c = chain_meet(&[set(":10"), EvSet::residue(4, 0)]).unwrap();
    assert_eq!((c.f(0), c.f(1), c.f(2)), (2, 4, 4));
    assert!(c.image.contains(2) && c.image.contains(8) && !c.image.contains(6));
    assert!(matches!(chain_meet(&[]), Err(PlaygroundError::EmptyChain)));
    assert!(matches!(chain_meet(&[set(":10"), set(":01")]), Err(PlaygroundError::NotDecreasing(1))));
    assert!(matches!(chain_meet(&[set("1:0")]), Err(PlaygroundError::Finite(_))));
}

#[test]
fn prem_examples() {
    assert_eq!(prem_set(&EvSet::unit(), &PartitionSpec::Mod(3), 10), [0, 1, 2]);
    assert_eq!(prem_set(&set(":10"), &PartitionSpec::Mod(3), 20), [0, 2, 4]);
    assert_eq!(prem_set(&set(":01"), &"div4".parse().unwrap(), 12), [1, 5, 9]);
    assert!("mod0".parse::<PartitionSpec>().is_err());
    assert!("parity".parse::<PartitionSpec>().is_err());
}

#[test]
fn find_delivers_the_least_offset() {
    let r = c_realizer(&SetExpr::Leaf(set(":10"))).unwrap();
    assert_eq!(spy_numeral(r.clone(), 3), 1);
    assert_eq!(spy_numeral(r, 4), 0);
    assert!(matches!(c_realizer(&SetExpr::Leaf(EvSet::finite(&[3]))), Err(PlaygroundError::Finite(_))));
}

#[test]
fn lifted_projection_on_a_meet() {
    let s = SetExpr::Leaf(set(":100"));
    let t = SetExpr::Leaf(set(":10"));
    let r = c_realizer(&SetExpr::meet(s, t)).unwrap();
    let n = spy_numeral(apps(h(), [beta(0), r]), 7);
    assert!((7 + n).is_multiple_of(6), "n = {n}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn membership_matches_bits(a in any_bits()) {
        let x = ev(&a);
        for n in 0..SCAN {
            prop_assert_eq!(x.contains(n), raw_contains(&a.0, &a.1, n));
        }
        prop_assert_eq!(x.to_string().parse::<EvSet>().unwrap(), x);
    }

    #[test]
    fn boolean_algebra_laws(a in any_bits(), b in any_bits(), c in any_bits()) {
        let (x, y, z) = (ev(&a), ev(&b), ev(&c));
        let one = EvSet::unit();
        prop_assert_eq!(x.meet(&one), x.clone());
        prop_assert_eq!(x.join(&x.complement()), one.clone());
        prop_assert_eq!(x.meet(&x.complement()), EvSet::empty());
        prop_assert_eq!(x.meet(&y.join(&z)), x.meet(&y).join(&x.meet(&z)));
        prop_assert_eq!(x.join(&y).complement(), x.complement().meet(&y.complement()));
        prop_assert_eq!(x.diff(&y), x.meet(&y.complement()));
        for n in 0..SCAN {
            let (p, q, r) = (raw_contains(&a.0, &a.1, n), raw_contains(&b.0, &b.1, n), raw_contains(&c.0, &c.1, n));
            prop_assert_eq!(x.meet(&y).join(&z).contains(n), (p && q) || r);
            prop_assert_eq!(x.diff(&z).contains(n), p && !r);
        }
    }

    #[test]
    fn infinitude_matches_scan(a in any_bits()) {
        let x = ev(&a);
        let tail = (a.0.len() as u64..a.0.len() as u64 + 2 * a.1.len() as u64).any(|n| raw_contains(&a.0, &a.1, n));
        prop_assert_eq!(x.is_infinite(), tail);
    }

    #[test]
    fn next_member_is_least(a in any_bits(), m in 0u64..40) {
        let x = ev(&a);
        let scan = (m..m + SCAN).find(|&n| raw_contains(&a.0, &a.1, n));
        prop_assert_eq!(x.next_member(m), scan);
    }

    #[test]
    fn chains_meet_below_every_link(a in any_bits(), cuts in prop::collection::vec(any_bits(), 0..5)) {
        let mut seq = vec![ev(&a)];
        for c in &cuts {
            let next = seq.last().unwrap().meet(&ev(c));
            if next.is_infinite() {
                seq.push(next);
            }
        }
        prop_assume!(seq[0].is_infinite());
        let cm = chain_meet(&seq).unwrap();
        prop_assert!(cm.image.is_infinite());
        for s in &seq {
            prop_assert!(cm.image.leq_cond(s));
        }
        for j in 0..20u64 {
            let k = (j as usize).min(seq.len() - 1);
            let brute = (j + 1..).find(|&n| seq[..=k].iter().all(|s| s.contains(n))).unwrap();
            prop_assert_eq!(cm.f(j), brute);
        }
    }

    #[test]
    fn prem_is_selective(a in any_bits(), k in 1u64..6, div in any::<bool>()) {
        let x = ev(&a);
        let z = if div { PartitionSpec::Div(k) } else { PartitionSpec::Mod(k) };
        let bound = 300;
        let prem = prem_set(&x, &z, bound);
        let mut classes: Vec<u64> = prem.iter().map(|&j| z.class_of(j)).collect();
        classes.sort_unstable();
        classes.dedup();
        prop_assert_eq!(classes.len(), prem.len());
        for j in 0..=bound {
            let first = x.contains(j) && (0..j).all(|i| !(x.contains(i) && z.class_of(i) == z.class_of(j)));
            prop_assert_eq!(prem.contains(&j), first);
        }
    }

    #[test]
    fn prem_is_unbounded_when_classes_are(a in any_bits(), k in 1u64..6) {
        let x = ev(&a);
        prop_assume!(x.is_infinite());
        let z = PartitionSpec::Div(k);
        let prem = prem_set(&x, &z, 2000);
        for n in 0..1000 {
            prop_assert!(prem.iter().any(|&j| j > n));
        }
    }

    #[test]
    fn lifted_projections_land_in_the_meet(s in any_bits(), t in any_bits(), m in 0u64..20) {
        let (s, t) = (ev(&s), ev(&t));
        let both = s.meet(&t);
        prop_assume!(both.is_infinite());
        let r = c_realizer(&SetExpr::meet(SetExpr::Leaf(s.clone()), SetExpr::Leaf(t.clone()))).unwrap();
        let n0 = spy_numeral(apps(h(), [beta(0), r.clone()]), m);
        prop_assert!(s.contains(m + n0));
        let n1 = spy_numeral(apps(h(), [beta(1), r]), m);
        prop_assert!(t.contains(m + n1));
    }
}

//! Brute-force reachability for condition trees, independent of the library.
//!
//! Trees are hash-consed into `u32` ids: 0..=3 are the leaves `p`, `q`, `r`
//! and `1`; larger ids are meets.

use std::collections::{HashMap, VecDeque};

use kforce::conditions::{cvar, meet, Cond};

pub const LEAVES: [&str; 3] = ["p", "q", "r"];
pub const UNIT: u32 = 3;

#[derive(Default)]
pub struct Arena {
    nodes: Vec<(u32, u32)>,
    size: Vec<u8>,
    supp: Vec<u8>,
    index: HashMap<(u32, u32), u32>,
}

impl Arena {
    pub fn new() -> Self {
        let mut a = Arena::default();
        for i in 0..4u32 {
            a.nodes.push((i, i));
            a.size.push(1);
            a.supp.push(if i == UNIT { 0 } else { 1 << i });
        }
        a
    }

    pub fn mk(&mut self, l: u32, r: u32) -> u32 {
        if let Some(&id) = self.index.get(&(l, r)) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push((l, r));
        self.size.push(self.size[l as usize].saturating_add(self.size[r as usize]));
        self.supp.push(self.supp[l as usize] | self.supp[r as usize]);
        self.index.insert((l, r), id);
        id
    }

    pub fn is_meet(&self, t: u32) -> bool {
        t > UNIT
    }

    pub fn size(&self, t: u32) -> u8 {
        self.size[t as usize]
    }

    pub fn support(&self, t: u32) -> u8 {
        self.supp[t as usize]
    }

    /// The five root moves: drop right, swap, duplicate, rotate, pad.
    pub fn step(&mut self, i: u8, t: u32) -> Option<u32> {
        let (l, r) = self.nodes[t as usize];
        let meet_t = self.is_meet(t);
        match i {
            0 if meet_t => Some(l),
            1 if meet_t => Some(self.mk(r, l)),
            2 => Some(self.mk(t, t)),
            3 if meet_t && self.is_meet(r) => {
                let (q, s) = self.nodes[r as usize];
                let lq = self.mk(l, q);
                Some(self.mk(lq, s))
            }
            4 => Some(self.mk(t, UNIT)),
            _ => None,
        }
    }

    pub fn to_cond(&self, t: u32) -> Cond {
        if t == UNIT {
            Cond::Unit
        } else if t < UNIT {
            cvar(LEAVES[t as usize])
        } else {
            let (l, r) = self.nodes[t as usize];
            meet(self.to_cond(l), self.to_cond(r))
        }
    }

    /// All trees of depth at most `depth` over `p`, `q`, `r`, `1`.
    pub fn trees(&mut self, depth: usize) -> Vec<u32> {
        let mut level: Vec<u32> = (0..4).collect();
        for _ in 1..depth {
            let mut next: Vec<u32> = (0..4).collect();
            for &a in &level {
                for &b in &level {
                    next.push(self.mk(a, b));
                }
            }
            level = next;
        }
        level
    }

    /// Breadth-first search from `src`, keeping trees with at most `cap`
    /// leaves, until every target is found or `max_moves` is exhausted.
    /// Returns the targets that were not found.
    pub fn search(&mut self, src: u32, targets: &[u32], cap: u8, max_moves: u8) -> Vec<u32> {
        let mut need: HashMap<u32, ()> = targets.iter().filter(|&&t| t != src).map(|&t| (t, ())).collect();
        let mut seen: HashMap<u32, u8> = HashMap::from([(src, 0)]);
        let mut queue = VecDeque::from([src]);
        while let Some(t) = queue.pop_front() {
            if need.is_empty() {
                break;
            }
            let d = seen[&t];
            if d >= max_moves {
                continue;
            }
            for i in 0..5 {
                if let Some(u) = self.step(i, t) {
                    assert_eq!(self.support(u) & !self.support(src), 0, "a move introduced a variable");
                    if self.size(u) <= cap && !seen.contains_key(&u) {
                        seen.insert(u, d + 1);
                        need.remove(&u);
                        queue.push_back(u);
                    }
                }
            }
        }
        need.into_keys().collect()
    }

    /// Renames the variables of `t` by the permutation `perm` of `p`, `q`, `r`.
    pub fn permute(&mut self, t: u32, perm: [u32; 3]) -> u32 {
        if t < UNIT {
            perm[t as usize]
        } else if t == UNIT {
            t
        } else {
            let (l, r) = self.nodes[t as usize];
            let (l, r) = (self.permute(l, perm), self.permute(r, perm));
            self.mk(l, r)
        }
    }
}

pub const PERMS: [[u32; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// For every pair of trees of depth at most 3, whether a path of at most
/// `max_moves` moves (through trees of at most `cap` leaves) was found.
/// Targets using a variable absent from the source are never searched for,
/// since no move introduces a variable; this is asserted along the way.
pub fn all_pairs(cap: u8, max_moves: u8) -> (Vec<Cond>, Vec<Vec<bool>>) {
    let mut a = Arena::new();
    let trees = a.trees(3);
    let pos: HashMap<u32, usize> = trees.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let n = trees.len();
    let mut found = vec![vec![false; n]; n];
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let s = trees[i];
        let targets: Vec<u32> = trees.iter().copied().filter(|&d| a.support(d) & !a.support(s) == 0).collect();
        let missing = a.search(s, &targets, cap, max_moves);
        for perm in PERMS {
            let ps = a.permute(s, perm);
            let pi = pos[&ps];
            if done[pi] {
                continue;
            }
            done[pi] = true;
            for &d in &targets {
                if !missing.contains(&d) {
                    let pd = a.permute(d, perm);
                    found[pi][pos[&pd]] = true;
                }
            }
        }
    }
    (trees.iter().map(|&t| a.to_cond(t)).collect(), found)
}

/// How many of the given pairs are found within `max_moves` moves.
pub fn all_pairs_among(cap: u8, max_moves: u8, pairs: &[(Cond, Cond)]) -> (usize, usize) {
    let mut a = Arena::new();
    let trees = a.trees(3);
    let ids: HashMap<Cond, u32> = trees.iter().map(|&t| (a.to_cond(t), t)).collect();
    let found = pairs
        .iter()
        .filter(|(s, d)| a.search(ids[s], &[ids[d]], cap, max_moves).is_empty())
        .count();
    (found, pairs.len())
}

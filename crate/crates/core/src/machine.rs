//! Small-step execution of processes.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde_json::json;
use thiserror::Error;

use crate::combinators;
use crate::syntax::{
    print_process, print_term, probe, stack_key, Instruction, Name, Process, ProbeFiring, ProbeRule, Stack,
    Term,
};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleTag {
    Push,
    Grab,
    Save,
    Restore,
    Read,
    Write,
    Quote,
    VCall,
    ApplyCont,
    StoreT,
    StoreS,
    Probe,
}

impl RuleTag {
    pub const ALL: [RuleTag; 12] = [
        RuleTag::Push,
        RuleTag::Grab,
        RuleTag::Save,
        RuleTag::Restore,
        RuleTag::Read,
        RuleTag::Write,
        RuleTag::Quote,
        RuleTag::VCall,
        RuleTag::ApplyCont,
        RuleTag::StoreT,
        RuleTag::StoreS,
        RuleTag::Probe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleTag::Push => "push",
            RuleTag::Grab => "grab",
            RuleTag::Save => "save",
            RuleTag::Restore => "restore",
            RuleTag::Read => "read",
            RuleTag::Write => "write",
            RuleTag::Quote => "quote",
            RuleTag::VCall => "vcall",
            RuleTag::ApplyCont => "apply_cont",
            RuleTag::StoreT => "store_t",
            RuleTag::StoreS => "store_s",
            RuleTag::Probe => "probe",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HaltReason {
    Opaque(Name),
    Probe(Name),
    /// An abstraction found no argument to grab.
    EmptyStack,
    /// A sequence token reached head position.
    SeqToken(Name, u64),
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaltReason::Opaque(n) => write!(f, "opaque constant #{n}"),
            HaltReason::Probe(n) => write!(f, "probe @{n}"),
            HaltReason::EmptyStack => f.write_str("abstraction on empty stack"),
            HaltReason::SeqToken(u, n) => write!(f, "sequence token {u}<{n}>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StuckReason {
    #[error("open variable `{0}` in head position")]
    OpenVariable(Name),
    #[error("χ found no token below its argument")]
    ChiOnEmptyBottom,
    #[error("{instruction} needs {needed} stack items, found {found}")]
    InstructionArity { instruction: String, needed: usize, found: usize },
    #[error("{instruction}: {message}")]
    BadArgument { instruction: String, message: String },
    #[error("probe @{0} has no handler")]
    UnhandledProbe(Name),
    #[error("probe @{0} failed: {1}")]
    ProbeFailed(Name, String),
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Next(Process, RuleTag),
    Halted(Process, HaltReason),
    Stuck(Process, StuckReason),
}

/// Final state of a run.
#[derive(Clone, Debug)]
pub enum Outcome {
    Halted(Process, HaltReason),
    Stuck(Process, StuckReason),
    FuelExhausted(Process),
}

impl Outcome {
    pub fn process(&self) -> &Process {
        match self {
            Outcome::Halted(p, _) | Outcome::Stuck(p, _) | Outcome::FuelExhausted(p) => p,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self, Outcome::Halted(..))
    }

    pub fn describe(&self) -> String {
        match self {
            Outcome::Halted(_, r) => format!("halted: {r}"),
            Outcome::Stuck(_, r) => format!("stuck: {r}"),
            Outcome::FuelExhausted(_) => "fuel exhausted".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub step: u64,
    pub rule: RuleTag,
    /// State before the rule fired.
    pub process: Process,
}

impl TraceEntry {
    pub fn to_json(&self) -> String {
        json!({
            "step": self.step,
            "rule": self.rule.as_str(),
            "term": print_term(&self.process.term),
            "stack": self.process.stack.iter_top_first().map(print_term).collect::<Vec<_>>(),
            "base": self.process.stack.base,
        })
        .to_string()
    }

    pub fn to_text(&self) -> String {
        format!("{:>6} {:<10} {}", self.step, self.rule.as_str(), print_process(&self.process))
    }
}

/// Step records, keeping only the most recent `limit` entries when bounded.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub entries: VecDeque<TraceEntry>,
    pub dropped: u64,
}

impl Trace {
    pub fn rules(&self) -> impl Iterator<Item = RuleTag> + '_ {
        self.entries.iter().map(|e| e.rule)
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    pub steps: u64,
    pub trace: Trace,
}

#[derive(Clone, Debug)]
pub enum ProbeHandler {
    /// `@n ⋆ ξ·π ≻ ξ ⋆ π`, counting firings.
    Counter,
    /// Records the stack and halts.
    Spy,
    Halt,
    Rule(Arc<dyn ProbeRule>),
}

#[derive(Clone, Debug)]
pub struct MachineConfig {
    pub probes: HashMap<Name, ProbeHandler>,
    /// `None` keeps every step; `Some(0)` disables tracing.
    pub trace_limit: Option<usize>,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig { probes: HashMap::new(), trace_limit: Some(0) }
    }
}

impl MachineConfig {
    pub fn with_probe(mut self, name: &str, handler: ProbeHandler) -> Self {
        self.probes.insert(name.into(), handler);
        self
    }

    pub fn with_trace(mut self, limit: Option<usize>) -> Self {
        self.trace_limit = limit;
        self
    }
}

/// A machine instance: configuration plus per-run state (stack interning,
/// probe counters, spy records).
#[derive(Debug, Default)]
pub struct Machine {
    pub config: MachineConfig,
    intern: HashMap<String, u64>,
    pub counters: HashMap<Name, u64>,
    pub spy_log: Vec<(Name, Stack)>,
}

fn arity(instruction: &str, needed: usize, found: usize) -> StuckReason {
    StuckReason::InstructionArity { instruction: instruction.into(), needed, found }
}

impl Machine {
    pub fn new(config: MachineConfig) -> Self {
        Machine { config, ..Default::default() }
    }

    /// Index of `stack` in first-seen order; alpha-variants share an index.
    pub fn intern_stack(&mut self, stack: &Stack) -> u64 {
        let next = self.intern.len() as u64;
        *self.intern.entry(stack_key(stack)).or_insert(next)
    }

    pub fn counter(&self, name: &str) -> u64 {
        self.counters.get(name).copied().unwrap_or(0)
    }

    pub fn step(&mut self, p: Process) -> StepOutcome {
        let Process { term, mut stack } = p;
        let next = |term: Term, stack: Stack, rule| StepOutcome::Next(Process { term, stack }, rule);
        match &term {
            Term::App(f, a) => {
                stack.push(a.as_ref().clone());
                next(f.as_ref().clone(), stack, RuleTag::Push)
            }
            Term::Lam(x, body) => match stack.pop() {
                Some(arg) => next(crate::syntax::subst_closed(body, x, &arg), stack, RuleTag::Grab),
                None => StepOutcome::Halted(Process { term, stack }, HaltReason::EmptyStack),
            },
            Term::Var(x) => {
                let reason = StuckReason::OpenVariable(x.clone());
                StepOutcome::Stuck(Process { term, stack }, reason)
            }
            Term::Seq(u, n) => {
                let reason = HaltReason::SeqToken(u.clone(), *n);
                StepOutcome::Halted(Process { term, stack }, reason)
            }
            Term::Cont(saved) => {
                if stack.is_empty() {
                    return StepOutcome::Stuck(Process { term, stack }, arity("restore", 1, 0));
                }
                let xi = stack.pop().unwrap();
                next(xi, saved.as_ref().clone(), RuleTag::Restore)
            }
            Term::Inst(i) => self.instruction(i, term.clone(), stack),
        }
    }

    fn instruction(&mut self, i: &Instruction, term: Term, mut stack: Stack) -> StepOutcome {
        let next = |term: Term, stack: Stack, rule| StepOutcome::Next(Process { term, stack }, rule);
        let need = |n: usize, stack: &Stack| stack.len() >= n;
        match i {
            Instruction::Cc => {
                if !need(1, &stack) {
                    return StepOutcome::Stuck(Process { term, stack }, arity("cc", 1, 0));
                }
                let xi = stack.pop().unwrap();
                let k = Term::Cont(Arc::new(stack.clone()));
                stack.push(k);
                next(xi, stack, RuleTag::Save)
            }
            Instruction::Chi => {
                if !need(1, &stack) {
                    return StepOutcome::Stuck(Process { term, stack }, arity("chi", 1, 0));
                }
                if stack.len() < 2 {
                    return StepOutcome::Stuck(Process { term, stack }, StuckReason::ChiOnEmptyBottom);
                }
                let xi = stack.pop().unwrap();
                let tau = stack.pop_bottom().unwrap();
                stack.push(tau);
                next(xi, stack, RuleTag::Read)
            }
            Instruction::ChiPrime => {
                if !need(2, &stack) {
                    let found = stack.len();
                    return StepOutcome::Stuck(Process { term, stack }, arity("chi'", 2, found));
                }
                let xi = stack.pop().unwrap();
                let tau = stack.pop().unwrap();
                stack.push_bottom(tau);
                next(xi, stack, RuleTag::Write)
            }
            Instruction::Sigma => {
                if !need(1, &stack) {
                    return StepOutcome::Stuck(Process { term, stack }, arity("sigma", 1, 0));
                }
                let xi = stack.pop().unwrap();
                let j = self.intern_stack(&stack);
                stack.push(combinators::succ_numeral(j));
                next(xi, stack, RuleTag::Quote)
            }
            Instruction::V => {
                if !need(2, &stack) {
                    let found = stack.len();
                    return StepOutcome::Stuck(Process { term, stack }, arity("V", 2, found));
                }
                let xi = stack.pop().unwrap();
                let eta = stack.pop().unwrap();
                let applied = Instruction::AppliedCont(Arc::new(xi), Arc::new(stack.clone()));
                stack.push(Term::Inst(applied));
                next(eta, stack, RuleTag::VCall)
            }
            Instruction::AppliedCont(xi, saved) => {
                stack.push(Term::Cont(saved.clone()));
                next(xi.as_ref().clone(), stack, RuleTag::ApplyCont)
            }
            Instruction::StoreT(u) => {
                if !need(2, &stack) {
                    let found = stack.len();
                    return StepOutcome::Stuck(Process { term, stack }, arity(&i.symbol(), 2, found));
                }
                let phi = stack.pop().unwrap();
                let nu = stack.pop().unwrap();
                stack.push(Term::Seq(u.clone(), 0));
                stack.push(phi);
                stack.push(Term::Inst(Instruction::StoreS(u.clone())));
                next(nu, stack, RuleTag::StoreT)
            }
            Instruction::StoreS(u) => {
                if !need(2, &stack) {
                    let found = stack.len();
                    return StepOutcome::Stuck(Process { term, stack }, arity(&i.symbol(), 2, found));
                }
                match stack.get(1) {
                    Some(Term::Seq(v, n)) if v == u => {
                        let n = *n;
                        let psi = stack.pop().unwrap();
                        stack.pop();
                        stack.push(Term::Seq(u.clone(), n + 1));
                        next(psi, stack, RuleTag::StoreS)
                    }
                    _ => {
                        let reason = StuckReason::BadArgument {
                            instruction: i.symbol(),
                            message: format!("second argument is not a {u}<n> token"),
                        };
                        StepOutcome::Stuck(Process { term, stack }, reason)
                    }
                }
            }
            Instruction::Opaque(n) => {
                StepOutcome::Halted(Process { term: term.clone(), stack }, HaltReason::Opaque(n.clone()))
            }
            Instruction::Probe(name, payload) => {
                let handler = match payload {
                    Some(rule) => Some(ProbeHandler::Rule(rule.clone())),
                    None => self.config.probes.get(name).cloned(),
                };
                self.fire_probe(name, handler, term.clone(), stack)
            }
        }
    }

    fn fire_probe(&mut self, name: &Name, handler: Option<ProbeHandler>, term: Term, mut stack: Stack) -> StepOutcome {
        match handler {
            None => StepOutcome::Stuck(Process { term, stack }, StuckReason::UnhandledProbe(name.clone())),
            Some(ProbeHandler::Halt) => StepOutcome::Halted(Process { term, stack }, HaltReason::Probe(name.clone())),
            Some(ProbeHandler::Spy) => {
                self.spy_log.push((name.clone(), stack.clone()));
                StepOutcome::Halted(Process { term, stack }, HaltReason::Probe(name.clone()))
            }
            Some(ProbeHandler::Counter) => match stack.pop() {
                Some(xi) => {
                    *self.counters.entry(name.clone()).or_insert(0) += 1;
                    StepOutcome::Next(Process { term: xi, stack }, RuleTag::Probe)
                }
                None => StepOutcome::Stuck(Process { term, stack }, arity(&format!("@{name}"), 1, 0)),
            },
            Some(ProbeHandler::Rule(rule)) => match rule.fire(&stack) {
                ProbeFiring::Continue(p) => StepOutcome::Next(p, RuleTag::Probe),
                ProbeFiring::Halt => StepOutcome::Halted(Process { term, stack }, HaltReason::Probe(name.clone())),
                ProbeFiring::Stuck(msg) => {
                    StepOutcome::Stuck(Process { term, stack }, StuckReason::ProbeFailed(name.clone(), msg))
                }
            },
        }
    }

    /// Steps until halt, stuck, or `fuel` steps have been taken.
    pub fn run(&mut self, p: Process, fuel: u64) -> RunResult {
        let limit = self.config.trace_limit;
        let mut trace = Trace::default();
        let mut current = p;
        for k in 0..fuel {
            let snapshot = match limit {
                Some(0) => None,
                _ => Some(current.clone()),
            };
            match self.step(current) {
                StepOutcome::Next(p2, rule) => {
                    if let Some(process) = snapshot {
                        trace.entries.push_back(TraceEntry { step: k, rule, process });
                        if let Some(l) = limit {
                            if trace.entries.len() > l {
                                trace.entries.pop_front();
                                trace.dropped += 1;
                            }
                        }
                    }
                    current = p2;
                }
                StepOutcome::Halted(p2, r) => {
                    return RunResult { outcome: Outcome::Halted(p2, r), steps: k, trace };
                }
                StepOutcome::Stuck(p2, r) => {
                    return RunResult { outcome: Outcome::Stuck(p2, r), steps: k, trace };
                }
            }
        }
        RunResult { outcome: Outcome::FuelExhausted(current), steps: fuel, trace }
    }
}

/// Runs with a default machine and no tracing.
pub fn run(p: Process, fuel: u64) -> RunResult {
    Machine::default().run(p, fuel)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("term is not closed")]
    NotClosed,
    #[error("fuel exhausted after {0} steps")]
    FuelExhausted(u64),
    #[error("stuck: {0}")]
    Stuck(StuckReason),
    #[error("not a numeral: {0}")]
    NotNumeral(String),
}

/// Observational decoding of `s^n 0̄`-like terms.
///
/// Runs `t ⋆ @tick · @zero · π0`. The term must consume both arguments before
/// using them, call `tick` with exactly one argument each time, and finish on
/// `zero` with nothing left on the stack.
pub fn decode_numeral(t: &Term, fuel: u64) -> Result<u64, DecodeError> {
    if !t.is_closed() {
        return Err(DecodeError::NotClosed);
    }
    let config = MachineConfig::default()
        .with_probe("tick", ProbeHandler::Counter)
        .with_probe("zero", ProbeHandler::Halt);
    let mut m = Machine::new(config);
    let mut p = Process::new(t.clone(), Stack::from_top_first([probe("tick"), probe("zero")], 0));
    let mut consumed = false;
    for _ in 0..fuel {
        if p.stack.is_empty() {
            consumed = true;
        }
        if let Term::Inst(Instruction::Probe(name, _)) = &p.term {
            if !consumed {
                return Err(DecodeError::NotNumeral(format!("@{name} used before both arguments were taken")));
            }
            let expected = if name.as_ref() == "tick" { 1 } else { 0 };
            if p.stack.len() != expected {
                return Err(DecodeError::NotNumeral(format!(
                    "@{name} reached with {} stack items",
                    p.stack.len()
                )));
            }
        }
        match m.step(p) {
            StepOutcome::Next(p2, _) => p = p2,
            StepOutcome::Halted(_, HaltReason::Probe(n)) if n.as_ref() == "zero" => {
                return Ok(m.counter("tick"));
            }
            StepOutcome::Halted(_, r) => return Err(DecodeError::NotNumeral(format!("halted on {r}"))),
            StepOutcome::Stuck(_, r) => return Err(DecodeError::Stuck(r)),
        }
    }
    Err(DecodeError::FuelExhausted(fuel))
}

//! DPLL(T) over a [`ClauseSet`] whose atom variables are decided by the
//! simplex in [`crate::lra`].
//!
//! Every assigned atom variable is asserted immediately: the atom when true,
//! its complement (`¬(e > 0)` as `e ≤ 0`) when false. Each decision level owns
//! one simplex push level. Conflicts backjump to the highest level involved
//! and flip that decision; when it was already flipped, the search falls back
//! to the nearest unflipped decision below. There is no clause learning.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::encoder::{BoolVar, ClauseSet, Lit, VarKind};
use crate::lra::{AssertOutcome, CheckOutcome, SimplexContext};
use crate::poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat {
        bool_model: BTreeMap<BoolVar, bool>,
        /// Values of the unknowns, indexed by unknown id.
        lra_model: Vec<Rational>,
        /// Truth value of every clause-set variable.
        assignment: Vec<bool>,
    },
    Unsat,
    /// The deadline passed before a verdict was reached.
    Interrupted,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat { .. })
    }
}

/// Counters from one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
}

struct Decision {
    lit: Lit,
    flipped: bool,
}

pub struct Engine<'a> {
    cs: &'a ClauseSet,
    deadline: Option<Instant>,
    order: Vec<usize>,
    values: Vec<Option<bool>>,
    level_of: Vec<usize>,
    trail: Vec<Lit>,
    /// Trail length at the start of each decision level.
    level_start: Vec<usize>,
    decisions: Vec<Decision>,
    theory_head: usize,
    simplex: SimplexContext,
    stats: EngineStats,
}

/// Decides satisfiability of `cs` modulo linear real arithmetic.
pub fn solve(cs: &ClauseSet) -> SolveResult {
    Engine::new(cs).run()
}

/// Like [`solve`], giving up with [`SolveResult::Interrupted`] at `deadline`.
pub fn solve_until(cs: &ClauseSet, deadline: Option<Instant>) -> SolveResult {
    Engine::new(cs).with_deadline(deadline).run()
}

impl<'a> Engine<'a> {
    pub fn new(cs: &'a ClauseSet) -> Self {
        let n = cs.num_vars();
        // Sign variables first, then everything else in creation order.
        let mut order: Vec<usize> = (0..n).filter(|&v| matches!(cs.kind(v), VarKind::Bool(_))).collect();
        order.extend((0..n).filter(|&v| !matches!(cs.kind(v), VarKind::Bool(_))));
        Engine {
            cs,
            deadline: None,
            order,
            values: vec![None; n],
            level_of: vec![0; n],
            trail: Vec::with_capacity(n),
            level_start: Vec::new(),
            decisions: Vec::new(),
            theory_head: 0,
            simplex: SimplexContext::with_unknowns(cs.num_unknowns()),
            stats: EngineStats::default(),
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn stats(&self) -> EngineStats {
        self.stats
    }

    pub fn run(&mut self) -> SolveResult {
        if self.cs.has_empty_clause() {
            return SolveResult::Unsat;
        }
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                if !self.backjump(&conflict) {
                    return SolveResult::Unsat;
                }
                continue;
            }
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                return SolveResult::Interrupted;
            }
            match self.order.iter().copied().find(|&v| self.values[v].is_none()) {
                Some(var) => {
                    self.stats.decisions += 1;
                    self.decide(Lit::new(var, false), false);
                }
                None => match self.simplex.check_and_model() {
                    CheckOutcome::Sat(lra_model) => return self.model(lra_model),
                    CheckOutcome::Unsat(tags) => {
                        self.stats.conflicts += 1;
                        if !self.backjump(&tags) {
                            return SolveResult::Unsat;
                        }
                    }
                },
            }
        }
    }

    fn level(&self) -> usize {
        self.decisions.len()
    }

    fn value(&self, lit: Lit) -> Option<bool> {
        self.values[lit.var()].map(|v| v == lit.is_positive())
    }

    fn assign(&mut self, lit: Lit) {
        let var = lit.var();
        debug_assert!(self.values[var].is_none(), "variable assigned twice");
        self.values[var] = Some(lit.is_positive());
        self.level_of[var] = self.level();
        self.trail.push(lit);
    }

    fn decide(&mut self, lit: Lit, flipped: bool) {
        self.level_start.push(self.trail.len());
        self.decisions.push(Decision { lit, flipped });
        self.simplex.push();
        self.assign(lit);
    }

    /// Theory assertions and unit propagation to a fixpoint. Returns the
    /// variables of a conflict, if any.
    fn propagate(&mut self) -> Option<Vec<usize>> {
        loop {
            while self.theory_head < self.trail.len() {
                let lit = self.trail[self.theory_head];
                self.theory_head += 1;
                if let VarKind::Atom(atom) = self.cs.kind(lit.var()) {
                    let atom = if lit.is_positive() {
                        atom.clone()
                    } else {
                        atom.complement()
                    };
                    let outcome = self
                        .simplex
                        .assert_atom(&atom, lit.var())
                        .expect("atom unknowns are registered");
                    if let AssertOutcome::Conflict(vars) = outcome {
                        return Some(vars);
                    }
                }
            }

            let mut changed = false;
            for clause in &self.cs.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in clause {
                    match self.value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return Some(clause.iter().map(|l| l.var()).collect()),
                    1 => {
                        self.assign(unassigned.expect("one open literal"));
                        self.stats.propagations += 1;
                        changed = true;
                        break;
                    }
                    _ => {}
                }
            }
            if !changed && self.theory_head == self.trail.len() {
                return None;
            }
        }
    }

    /// Undoes everything above `level`.
    fn backtrack_to(&mut self, level: usize) {
        while self.level() > level {
            let start = self.level_start.pop().expect("level has a start");
            for lit in self.trail.drain(start..) {
                self.values[lit.var()] = None;
            }
            self.decisions.pop();
            self.simplex.pop().expect("one simplex level per decision");
        }
        self.theory_head = self.trail.len();
    }

    /// Resolves a conflict over `vars`. Returns false when the formula is
    /// unsatisfiable.
    fn backjump(&mut self, vars: &[usize]) -> bool {
        let mut level = vars.iter().map(|&v| self.level_of[v]).max().unwrap_or(0);
        while level > 0 && self.decisions[level - 1].flipped {
            level -= 1;
        }
        if level == 0 {
            return false;
        }
        let lit = self.decisions[level - 1].lit;
        self.backtrack_to(level - 1);
        self.decide(lit.negate(), true);
        true
    }

    fn model(&self, lra_model: Vec<Rational>) -> SolveResult {
        let assignment: Vec<bool> = self.values.iter().map(|v| v.expect("complete assignment")).collect();
        debug_assert!(self.cs.satisfied_by(&assignment));
        let bool_model = self
            .cs
            .kinds()
            .iter()
            .zip(&assignment)
            .filter_map(|(kind, &value)| match kind {
                VarKind::Bool(b) => Some((*b, value)),
                _ => None,
            })
            .collect();
        SolveResult::Sat {
            bool_model,
            lra_model,
            assignment,
        }
    }
}

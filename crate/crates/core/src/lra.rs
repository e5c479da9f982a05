//! Exact feasibility checking for conjunctions of linear constraints.
//!
//! This is a general simplex in the style used by DPLL(T) solvers: every
//! constraint becomes a bound on a variable (an original unknown, or a slack
//! standing for a linear combination), and the tableau is repaired by Bland's
//! rule pivoting. Strict bounds are handled with delta-rationals, pairs
//! `a + bδ` for a symbolic infinitesimal `δ > 0`, which are instantiated with
//! a concrete positive rational when a model is extracted.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Signed, Zero};

use crate::poly::Rational;
use crate::{Error, Result};

/// Handle to a rational unknown registered in a [`SimplexContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unknown(pub usize);

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

/// `r + kδ` for an infinitesimal `δ > 0`, ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DeltaRational {
    pub standard: Rational,
    pub delta: Rational,
}

impl DeltaRational {
    pub fn new(standard: Rational, delta: Rational) -> Self {
        DeltaRational { standard, delta }
    }

    pub fn from_rational(standard: Rational) -> Self {
        DeltaRational {
            standard,
            delta: Rational::zero(),
        }
    }

    /// Substitutes a concrete value for `δ`.
    pub fn instantiate(&self, delta: &Rational) -> Rational {
        &self.standard + &self.delta * delta
    }
}

impl Add for &DeltaRational {
    type Output = DeltaRational;

    fn add(self, rhs: &DeltaRational) -> DeltaRational {
        DeltaRational::new(&self.standard + &rhs.standard, &self.delta + &rhs.delta)
    }
}

impl Sub for &DeltaRational {
    type Output = DeltaRational;

    fn sub(self, rhs: &DeltaRational) -> DeltaRational {
        DeltaRational::new(&self.standard - &rhs.standard, &self.delta - &rhs.delta)
    }
}

impl Mul<&Rational> for &DeltaRational {
    type Output = DeltaRational;

    fn mul(self, rhs: &Rational) -> DeltaRational {
        DeltaRational::new(&self.standard * rhs, &self.delta * rhs)
    }
}

impl fmt::Display for DeltaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}δ", self.standard, self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Gt,
    Lt,
    Ge,
    Le,
}

impl Relation {
    /// The relation of `¬(e ⋈ 0)`.
    pub fn complement(self) -> Relation {
        match self {
            Relation::Gt => Relation::Le,
            Relation::Lt => Relation::Ge,
            Relation::Ge => Relation::Lt,
            Relation::Le => Relation::Gt,
        }
    }

    /// The relation obtained after multiplying both sides by a negative number.
    pub fn mirror(self) -> Relation {
        match self {
            Relation::Gt => Relation::Lt,
            Relation::Lt => Relation::Gt,
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Gt | Relation::Lt)
    }

    pub fn holds(self, ordering: Ordering) -> bool {
        match self {
            Relation::Gt => ordering == Ordering::Greater,
            Relation::Lt => ordering == Ordering::Less,
            Relation::Ge => ordering != Ordering::Less,
            Relation::Le => ordering != Ordering::Greater,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        }
    }
}

/// `Σ a_j u_j + k ⋈ 0` with `⋈ ∈ {>, <, ≥, ≤}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearAtom {
    coefficients: BTreeMap<Unknown, Rational>,
    constant: Rational,
    relation: Relation,
}

impl LinearAtom {
    /// Builds an atom, summing repeated unknowns and dropping zero coefficients.
    pub fn new<I>(coefficients: I, constant: Rational, relation: Relation) -> Self
    where
        I: IntoIterator<Item = (Unknown, Rational)>,
    {
        let mut map: BTreeMap<Unknown, Rational> = BTreeMap::new();
        for (u, a) in coefficients {
            *map.entry(u).or_insert_with(Rational::zero) += a;
        }
        map.retain(|_, a| !a.is_zero());
        LinearAtom {
            coefficients: map,
            constant,
            relation,
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<Unknown, Rational> {
        &self.coefficients
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    /// `¬(e ⋈ 0)` expressed as an atom.
    pub fn complement(&self) -> LinearAtom {
        LinearAtom {
            coefficients: self.coefficients.clone(),
            constant: self.constant.clone(),
            relation: self.relation.complement(),
        }
    }

    /// For atoms without unknowns, their truth value.
    pub fn constant_truth(&self) -> Option<bool> {
        self.coefficients
            .is_empty()
            .then(|| self.relation.holds(self.constant.cmp(&Rational::zero())))
    }

    /// Value of the left-hand side under `model` (indexed by unknown id).
    pub fn lhs_value(&self, model: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .fold(self.constant.clone(), |acc, (u, a)| acc + a * &model[u.0])
    }

    /// Whether the atom holds under `model`, exactly.
    pub fn holds(&self, model: &[Rational]) -> bool {
        self.relation.holds(self.lhs_value(model).cmp(&Rational::zero()))
    }

    pub fn max_unknown(&self) -> Option<Unknown> {
        self.coefficients.keys().next_back().copied()
    }
}

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (u, a)) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}*{u}")?;
        }
        if self.coefficients.is_empty() || !self.constant.is_zero() {
            if !self.coefficients.is_empty() {
                write!(f, " + ")?;
            }
            write!(f, "{}", self.constant)?;
        }
        write!(f, " {} 0", self.relation.symbol())
    }
}

/// Result of asserting an atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssertOutcome {
    Consistent,
    /// Tags of asserted atoms that are jointly infeasible.
    Conflict(Vec<usize>),
}

/// Result of a feasibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    /// Exact values for every registered unknown, indexed by unknown id.
    Sat(Vec<Rational>),
    /// Tags of an infeasible subset of the asserted atoms.
    Unsat(Vec<usize>),
}

#[derive(Debug, Clone)]
struct Bound {
    value: DeltaRational,
    tag: usize,
}

#[derive(Debug, Clone)]
struct TrailEntry {
    var: usize,
    lower: Option<Bound>,
    upper: Option<Bound>,
}

#[derive(Debug, Clone)]
struct Level {
    trail_len: usize,
    asserted_len: usize,
    conflict: Option<Vec<usize>>,
}

/// Incremental simplex over delta-rationals with push/pop.
#[derive(Debug, Clone, Default)]
pub struct SimplexContext {
    /// Internal variable of each registered unknown.
    unknown_vars: Vec<usize>,
    values: Vec<DeltaRational>,
    lower: Vec<Option<Bound>>,
    upper: Vec<Option<Bound>>,
    /// Row index of each basic variable.
    row_of: Vec<Option<usize>>,
    /// `rows[r] = (basic, Σ coeff·nonbasic)`.
    rows: Vec<(usize, BTreeMap<usize, Rational>)>,
    slacks: BTreeMap<Vec<(usize, Rational)>, usize>,
    trail: Vec<TrailEntry>,
    asserted: Vec<(LinearAtom, usize)>,
    levels: Vec<Level>,
    conflict: Option<Vec<usize>>,
}

impl SimplexContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// A context with `count` unknowns `u0 … u{count-1}` already registered.
    pub fn with_unknowns(count: usize) -> Self {
        let mut ctx = Self::new();
        for _ in 0..count {
            ctx.new_unknown();
        }
        ctx
    }

    pub fn new_unknown(&mut self) -> Unknown {
        let var = self.new_var(DeltaRational::default());
        self.unknown_vars.push(var);
        Unknown(self.unknown_vars.len() - 1)
    }

    pub fn num_unknowns(&self) -> usize {
        self.unknown_vars.len()
    }

    /// Number of atoms asserted at the current level and below.
    pub fn num_asserted(&self) -> usize {
        self.asserted.len()
    }

    pub fn asserted(&self) -> impl Iterator<Item = &LinearAtom> {
        self.asserted.iter().map(|(a, _)| a)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn push(&mut self) {
        self.levels.push(Level {
            trail_len: self.trail.len(),
            asserted_len: self.asserted.len(),
            conflict: self.conflict.clone(),
        });
    }

    pub fn pop(&mut self) -> Result<()> {
        let level = self.levels.pop().ok_or(Error::EmptyStack)?;
        while self.trail.len() > level.trail_len {
            let entry = self.trail.pop().expect("trail length checked");
            self.lower[entry.var] = entry.lower;
            self.upper[entry.var] = entry.upper;
        }
        self.asserted.truncate(level.asserted_len);
        self.conflict = level.conflict;
        Ok(())
    }

    /// Asserts `atom`, labelled with `tag` in conflict explanations, and
    /// checks feasibility of everything asserted so far.
    pub fn assert_atom(&mut self, atom: &LinearAtom, tag: usize) -> Result<AssertOutcome> {
        if let Some(u) = atom.max_unknown() {
            if u.0 >= self.unknown_vars.len() {
                return Err(Error::UnregisteredUnknown(u.0));
            }
        }
        if let Some(conflict) = &self.conflict {
            return Ok(AssertOutcome::Conflict(conflict.clone()));
        }
        self.asserted.push((atom.clone(), tag));

        if let Some(truth) = atom.constant_truth() {
            return Ok(if truth {
                AssertOutcome::Consistent
            } else {
                self.fail(vec![tag])
            });
        }

        let (var, relation, bound) = self.bound_of(atom);
        let result = match relation {
            Relation::Gt => self.assert_lower(var, DeltaRational::new(bound, Rational::one()), tag),
            Relation::Ge => self.assert_lower(var, DeltaRational::from_rational(bound), tag),
            Relation::Lt => self.assert_upper(var, DeltaRational::new(bound, -Rational::one()), tag),
            Relation::Le => self.assert_upper(var, DeltaRational::from_rational(bound), tag),
        };
        if let Err(explanation) = result {
            return Ok(self.fail(explanation));
        }
        match self.repair() {
            Ok(()) => Ok(AssertOutcome::Consistent),
            Err(explanation) => Ok(self.fail(explanation)),
        }
    }

    /// Decides feasibility and, if feasible, returns an exact model in which
    /// every asserted atom holds.
    pub fn check_and_model(&mut self) -> CheckOutcome {
        if let Some(conflict) = &self.conflict {
            return CheckOutcome::Unsat(conflict.clone());
        }
        if let Err(explanation) = self.repair() {
            self.fail(explanation.clone());
            return CheckOutcome::Unsat(explanation);
        }
        let delta = self.choose_delta();
        let model: Vec<Rational> = self
            .unknown_vars
            .iter()
            .map(|&v| self.values[v].instantiate(&delta))
            .collect();
        for (atom, tag) in &self.asserted {
            assert!(atom.holds(&model), "simplex model violates asserted atom {tag}: {atom}");
        }
        CheckOutcome::Sat(model)
    }

    fn fail(&mut self, mut explanation: Vec<usize>) -> AssertOutcome {
        explanation.sort_unstable();
        explanation.dedup();
        self.conflict = Some(explanation.clone());
        AssertOutcome::Conflict(explanation)
    }

    fn new_var(&mut self, value: DeltaRational) -> usize {
        self.values.push(value);
        self.lower.push(None);
        self.upper.push(None);
        self.row_of.push(None);
        self.values.len() - 1
    }

    /// Rewrites `atom` as `var ⋈ bound` with `var` an unknown or a slack.
    fn bound_of(&mut self, atom: &LinearAtom) -> (usize, Relation, Rational) {
        let (_, lead) = atom
            .coefficients
            .iter()
            .next()
            .expect("non-constant atom has a coefficient");
        let lead = lead.clone();
        let relation = if lead.is_negative() {
            atom.relation.mirror()
        } else {
            atom.relation
        };
        let bound = -(&atom.constant / &lead);
        let combination: Vec<(usize, Rational)> = atom
            .coefficients
            .iter()
            .map(|(u, a)| (self.unknown_vars[u.0], a / &lead))
            .collect();
        let var = if combination.len() == 1 {
            combination[0].0
        } else {
            self.slack_for(combination)
        };
        (var, relation, bound)
    }

    fn slack_for(&mut self, combination: Vec<(usize, Rational)>) -> usize {
        if let Some(&slack) = self.slacks.get(&combination) {
            return slack;
        }
        let mut value = DeltaRational::default();
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for (var, a) in &combination {
            value = &value + &(&self.values[*var] * a);
            match self.row_of[*var] {
                Some(r) => {
                    for (nb, b) in &self.rows[r].1 {
                        add_coefficient(&mut row, *nb, a * b);
                    }
                }
                None => add_coefficient(&mut row, *var, a.clone()),
            }
        }
        let slack = self.new_var(value);
        self.row_of[slack] = Some(self.rows.len());
        self.rows.push((slack, row));
        self.slacks.insert(combination, slack);
        slack
    }

    fn record(&mut self, var: usize) {
        self.trail.push(TrailEntry {
            var,
            lower: self.lower[var].clone(),
            upper: self.upper[var].clone(),
        });
    }

    fn assert_lower(&mut self, var: usize, value: DeltaRational, tag: usize) -> Result<(), Vec<usize>> {
        if let Some(existing) = &self.lower[var] {
            if existing.value >= value {
                return Ok(());
            }
        }
        if let Some(upper) = &self.upper[var] {
            if value > upper.value {
                return Err(vec![tag, upper.tag]);
            }
        }
        self.record(var);
        self.lower[var] = Some(Bound {
            value: value.clone(),
            tag,
        });
        if self.row_of[var].is_none() && self.values[var] < value {
            self.update(var, value);
        }
        Ok(())
    }

    fn assert_upper(&mut self, var: usize, value: DeltaRational, tag: usize) -> Result<(), Vec<usize>> {
        if let Some(existing) = &self.upper[var] {
            if existing.value <= value {
                return Ok(());
            }
        }
        if let Some(lower) = &self.lower[var] {
            if value < lower.value {
                return Err(vec![tag, lower.tag]);
            }
        }
        self.record(var);
        self.upper[var] = Some(Bound {
            value: value.clone(),
            tag,
        });
        if self.row_of[var].is_none() && self.values[var] > value {
            self.update(var, value);
        }
        Ok(())
    }

    /// Moves nonbasic `var` to `value`, keeping the tableau equations.
    fn update(&mut self, var: usize, value: DeltaRational) {
        let shift = &value - &self.values[var];
        for (basic, row) in &self.rows {
            if let Some(a) = row.get(&var) {
                self.values[*basic] = &self.values[*basic] + &(&shift * a);
            }
        }
        self.values[var] = value;
    }

    fn below_lower(&self, var: usize) -> bool {
        matches!(&self.lower[var], Some(b) if self.values[var] < b.value)
    }

    fn above_upper(&self, var: usize) -> bool {
        matches!(&self.upper[var], Some(b) if self.values[var] > b.value)
    }

    fn can_increase(&self, var: usize) -> bool {
        !matches!(&self.upper[var], Some(b) if self.values[var] >= b.value)
    }

    fn can_decrease(&self, var: usize) -> bool {
        !matches!(&self.lower[var], Some(b) if self.values[var] <= b.value)
    }

    /// Restores bound feasibility with Bland's rule or explains the conflict.
    fn repair(&mut self) -> Result<(), Vec<usize>> {
        loop {
            let violated = self
                .rows
                .iter()
                .map(|(basic, _)| *basic)
                .filter(|&b| self.below_lower(b) || self.above_upper(b))
                .min();
            let Some(basic) = violated else {
                return Ok(());
            };
            let row = &self.rows[self.row_of[basic].expect("basic variable has a row")].1;
            let increase = self.below_lower(basic);
            let entering = row
                .iter()
                .filter(|(&nb, a)| {
                    let up = a.is_positive() == increase;
                    if up {
                        self.can_increase(nb)
                    } else {
                        self.can_decrease(nb)
                    }
                })
                .map(|(&nb, _)| nb)
                .min();
            match entering {
                Some(nonbasic) => {
                    let target = if increase {
                        self.lower[basic].as_ref().map(|b| b.value.clone())
                    } else {
                        self.upper[basic].as_ref().map(|b| b.value.clone())
                    }
                    .expect("violated bound exists");
                    self.pivot_and_update(basic, nonbasic, target);
                }
                None => {
                    let mut explanation = Vec::with_capacity(row.len() + 1);
                    let own = if increase {
                        &self.lower[basic]
                    } else {
                        &self.upper[basic]
                    };
                    explanation.push(own.as_ref().expect("violated bound exists").tag);
                    for (&nb, a) in row {
                        let blocking = if a.is_positive() == increase {
                            &self.upper[nb]
                        } else {
                            &self.lower[nb]
                        };
                        explanation.push(blocking.as_ref().expect("blocking bound exists").tag);
                    }
                    return Err(explanation);
                }
            }
        }
    }

    fn pivot_and_update(&mut self, basic: usize, nonbasic: usize, target: DeltaRational) {
        let r = self.row_of[basic].expect("basic variable has a row");
        let a = self.rows[r].1[&nonbasic].clone();
        let theta = &(&target - &self.values[basic]) * &a.recip();
        self.values[basic] = target;
        self.values[nonbasic] = &self.values[nonbasic] + &theta;
        for (other, row) in &self.rows {
            if *other == basic {
                continue;
            }
            if let Some(c) = row.get(&nonbasic) {
                self.values[*other] = &self.values[*other] + &(&theta * c);
            }
        }
        self.pivot(r, basic, nonbasic, a);
    }

    /// Exchanges `basic` (row `r`) with `nonbasic` in the tableau.
    fn pivot(&mut self, r: usize, basic: usize, nonbasic: usize, a: Rational) {
        let (_, mut row) = std::mem::take(&mut self.rows[r]);
        row.remove(&nonbasic);
        let inv = a.recip();
        let mut solved: BTreeMap<usize, Rational> = row.into_iter().map(|(var, c)| (var, -(c * &inv))).collect();
        solved.insert(basic, inv);

        for (i, (_, other)) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            if let Some(c) = other.remove(&nonbasic) {
                for (var, s) in &solved {
                    add_coefficient(other, *var, &c * s);
                }
            }
        }
        self.rows[r] = (nonbasic, solved);
        self.row_of[basic] = None;
        self.row_of[nonbasic] = Some(r);
    }

    /// Half the largest `δ` that keeps every bound satisfied once instantiated.
    fn choose_delta(&self) -> Rational {
        let mut limit: Option<Rational> = None;
        let mut tighten = |candidate: Rational| {
            if limit.as_ref().is_none_or(|l| candidate < *l) {
                limit = Some(candidate);
            }
        };
        for (var, value) in self.values.iter().enumerate() {
            if let Some(lower) = &self.lower[var] {
                if value.standard > lower.value.standard && value.delta < lower.value.delta {
                    tighten((&value.standard - &lower.value.standard) / (&lower.value.delta - &value.delta));
                }
            }
            if let Some(upper) = &self.upper[var] {
                if value.standard < upper.value.standard && value.delta > upper.value.delta {
                    tighten((&upper.value.standard - &value.standard) / (&value.delta - &upper.value.delta));
                }
            }
        }
        match limit {
            Some(l) => l / Rational::from_integer(2.into()),
            None => Rational::one(),
        }
    }
}

fn add_coefficient(row: &mut BTreeMap<usize, Rational>, var: usize, c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = row.entry(var).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        row.remove(&var);
    }
}

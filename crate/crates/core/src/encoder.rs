//! Linear encodings of vertex-cluster existence, and their clausification.
//!
//! Unknowns are the direction `n = (n_1, …, n_d)` and one offset `c_i` per
//! constraint polynomial. An exponent vector `p` contributes atoms of the
//! form `n^T p + c_i ⋈ 0`, whose coefficients are the exponents themselves.
//! Sign variants are encoded with one Boolean variable per problem variable,
//! true when that variable is negated.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::lra::{LinearAtom, Relation, Unknown};
use crate::poly::{int, ExponentVector, Polynomial, Rational, SignedFrame};
use crate::{Error, Result};

/// A propositional variable of a [`PropFormula`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoolVar(pub u32);

/// Boolean structure over linear atoms and propositional variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropFormula {
    True,
    False,
    Atom(LinearAtom),
    Var(BoolVar),
    Not(Box<PropFormula>),
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
    Xor(Vec<PropFormula>),
}

impl PropFormula {
    /// Conjunction with constant folding.
    pub fn and(children: impl IntoIterator<Item = PropFormula>) -> PropFormula {
        let mut kept = Vec::new();
        for child in children {
            match child {
                PropFormula::True => {}
                PropFormula::False => return PropFormula::False,
                PropFormula::And(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => PropFormula::True,
            1 => kept.pop().expect("one child"),
            _ => PropFormula::And(kept),
        }
    }

    /// Disjunction with constant folding.
    pub fn or(children: impl IntoIterator<Item = PropFormula>) -> PropFormula {
        let mut kept = Vec::new();
        for child in children {
            match child {
                PropFormula::False => {}
                PropFormula::True => return PropFormula::True,
                PropFormula::Or(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => PropFormula::False,
            1 => kept.pop().expect("one child"),
            _ => PropFormula::Or(kept),
        }
    }

    /// Exclusive or (odd parity) with constant folding.
    pub fn xor(children: impl IntoIterator<Item = PropFormula>) -> PropFormula {
        let mut parity = false;
        let mut kept = Vec::new();
        for child in children {
            match child {
                PropFormula::False => {}
                PropFormula::True => parity = !parity,
                other => kept.push(other),
            }
        }
        let base = match kept.len() {
            0 => PropFormula::False,
            1 => kept.pop().expect("one child"),
            _ => PropFormula::Xor(kept),
        };
        if parity {
            PropFormula::not(base)
        } else {
            base
        }
    }

    /// Negation with constant folding.
    #[allow(clippy::should_implement_trait)]
    pub fn not(child: PropFormula) -> PropFormula {
        match child {
            PropFormula::True => PropFormula::False,
            PropFormula::False => PropFormula::True,
            PropFormula::Not(inner) => *inner,
            other => PropFormula::Not(Box::new(other)),
        }
    }

    /// Truth value under the given interpretations of variables and atoms.
    pub fn evaluate<B, A>(&self, bools: &B, atoms: &A) -> bool
    where
        B: Fn(BoolVar) -> bool,
        A: Fn(&LinearAtom) -> bool,
    {
        match self {
            PropFormula::True => true,
            PropFormula::False => false,
            PropFormula::Atom(a) => atoms(a),
            PropFormula::Var(v) => bools(*v),
            PropFormula::Not(f) => !f.evaluate(bools, atoms),
            PropFormula::And(fs) => fs.iter().all(|f| f.evaluate(bools, atoms)),
            PropFormula::Or(fs) => fs.iter().any(|f| f.evaluate(bools, atoms)),
            PropFormula::Xor(fs) => fs.iter().filter(|f| f.evaluate(bools, atoms)).count() % 2 == 1,
        }
    }

    /// Every linear atom occurring in the formula, in traversal order.
    pub fn atoms(&self) -> Vec<&LinearAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a LinearAtom>) {
        match self {
            PropFormula::Atom(a) => out.push(a),
            PropFormula::Not(f) => f.collect_atoms(out),
            PropFormula::And(fs) | PropFormula::Or(fs) | PropFormula::Xor(fs) => {
                fs.iter().for_each(|f| f.collect_atoms(out))
            }
            PropFormula::True | PropFormula::False | PropFormula::Var(_) => {}
        }
    }

    fn max_bool_var(&self) -> Option<BoolVar> {
        match self {
            PropFormula::Var(v) => Some(*v),
            PropFormula::Not(f) => f.max_bool_var(),
            PropFormula::And(fs) | PropFormula::Or(fs) | PropFormula::Xor(fs) => {
                fs.iter().filter_map(PropFormula::max_bool_var).max()
            }
            _ => None,
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, op: &str, fs: &[PropFormula]| -> fmt::Result {
            write!(f, "(")?;
            for (i, child) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{child}")?;
            }
            write!(f, ")")
        };
        match self {
            PropFormula::True => write!(f, "true"),
            PropFormula::False => write!(f, "false"),
            PropFormula::Atom(a) => write!(f, "[{a}]"),
            PropFormula::Var(v) => write!(f, "b{}", v.0),
            PropFormula::Not(inner) => write!(f, "¬{inner}"),
            PropFormula::And(fs) => join(f, "∧", fs),
            PropFormula::Or(fs) => join(f, "∨", fs),
            PropFormula::Xor(fs) => join(f, "⊕", fs),
        }
    }
}

/// Unknown ids of the direction `n` and the per-constraint offsets `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknowns {
    pub n: Vec<Unknown>,
    pub c: Vec<Unknown>,
}

impl Unknowns {
    /// `n_j = u_j` for `j < d`, then `c_i = u_{d+i}`.
    pub fn allocate(dimension: usize, constraints: usize) -> Self {
        Unknowns {
            n: (0..dimension).map(Unknown).collect(),
            c: (dimension..dimension + constraints).map(Unknown).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n.len() + self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Boolean variables `b_1 … b_d` encoding a sign variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVars {
    pub b: Vec<BoolVar>,
}

impl SignVars {
    pub fn allocate(dimension: usize) -> Self {
        SignVars {
            b: (0..dimension as u32).map(BoolVar).collect(),
        }
    }
}

/// The atom `n^T p + c_i ⋈ 0`.
pub fn support_atom(p: &ExponentVector, u: &Unknowns, which_c: usize, relation: Relation) -> LinearAtom {
    let terms = p
        .exponents()
        .iter()
        .zip(&u.n)
        .filter(|(&e, _)| e != 0)
        .map(|(&e, &n)| (n, int(i64::from(e))))
        .chain(std::iter::once((u.c[which_c], Rational::one())));
    LinearAtom::new(terms, Rational::zero(), relation)
}

/// Strict separation of `p` from `S \ {p}` by a hyperplane with normal `n`
/// pointing towards `p`.
pub fn encode_vertex_separation<'a, I>(p: &ExponentVector, others: I, u: &Unknowns, which_c: usize) -> PropFormula
where
    I: IntoIterator<Item = &'a ExponentVector>,
{
    let above = PropFormula::Atom(support_atom(p, u, which_c, Relation::Gt));
    let below = others
        .into_iter()
        .filter(|q| *q != p)
        .map(|q| PropFormula::Atom(support_atom(q, u, which_c, Relation::Lt)));
    PropFormula::and(std::iter::once(above).chain(below))
}

/// Some positive-frame point lies strictly above a hyperplane that has the
/// whole negative frame strictly below it.
pub fn encode_positive_vertex(frame: &SignedFrame, u: &Unknowns, which_c: usize) -> PropFormula {
    let any_above = PropFormula::or(
        frame
            .positive
            .iter()
            .map(|p| PropFormula::Atom(support_atom(p, u, which_c, Relation::Gt))),
    );
    let all_below = frame
        .negative
        .iter()
        .map(|q| PropFormula::Atom(support_atom(q, u, which_c, Relation::Lt)));
    PropFormula::and(std::iter::once(any_above).chain(all_below))
}

/// True iff the sign variant negates the monomial `x^p`: the parity of the
/// flipped variables that carry an odd exponent.
pub fn encode_flip_parity(p: &ExponentVector, sv: &SignVars) -> PropFormula {
    PropFormula::xor(
        p.exponents()
            .iter()
            .zip(&sv.b)
            .filter(|(&e, _)| e % 2 == 1)
            .map(|(_, &b)| PropFormula::Var(b)),
    )
}

/// True iff `p` belongs to the positive frame of `τ(f)`. The sign of `f_p`
/// is known here, so only one of the two cases survives.
pub fn encode_positive_membership(p: &ExponentVector, f: &Polynomial, sv: &SignVars) -> Result<PropFormula> {
    let coefficient = f.coefficient(p).ok_or_else(|| Error::NotInFrame(p.to_string()))?;
    let parity = encode_flip_parity(p, sv);
    Ok(if coefficient > &Rational::zero() {
        PropFormula::not(parity)
    } else {
        parity
    })
}

/// Existence of a variant positive vertex cluster: for each `f_i`, some
/// point of the positive frame of `τ(f_i)` lies above the hyperplane
/// `n^T x + c_i = 0` and every point of the negative frame lies below it.
pub fn encode_variant_cluster(fs: &[Polynomial], u: &Unknowns, sv: &SignVars) -> Result<PropFormula> {
    let mut conjuncts = Vec::with_capacity(fs.len());
    for (i, f) in fs.iter().enumerate() {
        let mut any_above = Vec::with_capacity(f.len());
        let mut all_below = Vec::with_capacity(f.len());
        for (p, _) in f.terms() {
            let member = encode_positive_membership(p, f, sv)?;
            any_above.push(PropFormula::and([
                member.clone(),
                PropFormula::Atom(support_atom(p, u, i, Relation::Gt)),
            ]));
            all_below.push(PropFormula::or([
                member,
                PropFormula::Atom(support_atom(p, u, i, Relation::Lt)),
            ]));
        }
        conjuncts.push(PropFormula::or(any_above));
        conjuncts.extend(all_below);
    }
    Ok(PropFormula::and(conjuncts))
}

/// A literal: a clause-set variable with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Lit {
        Lit((var as u32) << 1 | u32::from(!positive))
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "v{}", self.var())
        } else {
            write!(f, "¬v{}", self.var())
        }
    }
}

/// What a clause-set variable stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    /// A propositional variable of the source formula.
    Bool(BoolVar),
    /// A linear atom; the variable is true iff the atom holds.
    Atom(LinearAtom),
    /// A Tseitin definition variable.
    Aux,
}

/// CNF with a side table mapping variables back to atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub clauses: Vec<Vec<Lit>>,
    kinds: Vec<VarKind>,
    num_unknowns: usize,
}

impl ClauseSet {
    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, var: usize) -> &VarKind {
        &self.kinds[var]
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    /// Size of the unknown-id space used by the atoms.
    pub fn num_unknowns(&self) -> usize {
        self.num_unknowns
    }

    /// Widens the unknown-id space, e.g. to cover unknowns absent from atoms.
    pub fn with_unknowns(mut self, count: usize) -> Self {
        self.num_unknowns = self.num_unknowns.max(count);
        self
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    /// Whether every clause has a true literal under `assignment`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| assignment[l.var()] == l.is_positive()))
    }

    fn fresh(&mut self, kind: VarKind) -> usize {
        self.kinds.push(kind);
        self.kinds.len() - 1
    }
}

enum Encoded {
    Const(bool),
    Lit(Lit),
}

struct Tseitin {
    out: ClauseSet,
    atom_vars: BTreeMap<LinearAtom, usize>,
}

impl Tseitin {
    fn encode(&mut self, f: &PropFormula) -> Encoded {
        match f {
            PropFormula::True => Encoded::Const(true),
            PropFormula::False => Encoded::Const(false),
            PropFormula::Var(v) => Encoded::Lit(Lit::new(v.0 as usize, true)),
            PropFormula::Atom(a) => {
                if let Some(truth) = a.constant_truth() {
                    return Encoded::Const(truth);
                }
                let var = match self.atom_vars.get(a) {
                    Some(&var) => var,
                    None => {
                        let var = self.out.fresh(VarKind::Atom(a.clone()));
                        self.atom_vars.insert(a.clone(), var);
                        var
                    }
                };
                Encoded::Lit(Lit::new(var, true))
            }
            PropFormula::Not(inner) => match self.encode(inner) {
                Encoded::Const(b) => Encoded::Const(!b),
                Encoded::Lit(l) => Encoded::Lit(l.negate()),
            },
            PropFormula::And(fs) => self.gate(fs, true),
            PropFormula::Or(fs) => self.gate(fs, false),
            PropFormula::Xor(fs) => {
                let mut parity = false;
                let mut acc: Option<Lit> = None;
                for child in fs {
                    match self.encode(child) {
                        Encoded::Const(b) => parity ^= b,
                        Encoded::Lit(l) => {
                            acc = Some(match acc {
                                None => l,
                                Some(prev) => self.xor_gate(prev, l),
                            })
                        }
                    }
                }
                match acc {
                    None => Encoded::Const(parity),
                    Some(l) if parity => Encoded::Lit(l.negate()),
                    Some(l) => Encoded::Lit(l),
                }
            }
        }
    }

    /// `g ↔ ⋀ l_i` (conjunction) or `g ↔ ⋁ l_i` (disjunction).
    fn gate(&mut self, fs: &[PropFormula], conjunction: bool) -> Encoded {
        let absorbing = !conjunction;
        let mut lits = Vec::with_capacity(fs.len());
        for child in fs {
            match self.encode(child) {
                Encoded::Const(b) if b == absorbing => return Encoded::Const(absorbing),
                Encoded::Const(_) => {}
                Encoded::Lit(l) => lits.push(l),
            }
        }
        match lits.len() {
            0 => return Encoded::Const(!absorbing),
            1 => return Encoded::Lit(lits[0]),
            _ => {}
        }
        let g = Lit::new(self.out.fresh(VarKind::Aux), true);
        // For a disjunction, apply the conjunction pattern to negated inputs and output.
        let (g, lits): (Lit, Vec<Lit>) = if conjunction {
            (g, lits)
        } else {
            (g.negate(), lits.iter().map(|l| l.negate()).collect())
        };
        for &l in &lits {
            self.out.clauses.push(vec![g.negate(), l]);
        }
        let mut long: Vec<Lit> = lits.iter().map(|l| l.negate()).collect();
        long.push(g);
        self.out.clauses.push(long);
        Encoded::Lit(if conjunction { g } else { g.negate() })
    }

    fn xor_gate(&mut self, a: Lit, b: Lit) -> Lit {
        let g = Lit::new(self.out.fresh(VarKind::Aux), true);
        self.out.clauses.push(vec![g.negate(), a, b]);
        self.out.clauses.push(vec![g.negate(), a.negate(), b.negate()]);
        self.out.clauses.push(vec![g, a.negate(), b]);
        self.out.clauses.push(vec![g, a, b.negate()]);
        g
    }

    /// Emits clauses for a top-level conjunct.
    fn assert_top(&mut self, f: &PropFormula) {
        if let PropFormula::Or(fs) = f {
            let mut clause = Vec::with_capacity(fs.len());
            for child in fs {
                match self.encode(child) {
                    Encoded::Const(true) => return,
                    Encoded::Const(false) => {}
                    Encoded::Lit(l) => clause.push(l),
                }
            }
            self.out.clauses.push(clause);
            return;
        }
        match self.encode(f) {
            Encoded::Const(true) => {}
            Encoded::Const(false) => self.out.clauses.push(Vec::new()),
            Encoded::Lit(l) => self.out.clauses.push(vec![l]),
        }
    }
}

/// Tseitin transformation. Propositional variable `b_k` becomes clause-set
/// variable `k`; atoms and gates get fresh variables in creation order, and
/// syntactically equal atoms share a variable.
pub fn clausify(f: &PropFormula) -> ClauseSet {
    let mut tseitin = Tseitin {
        out: ClauseSet::default(),
        atom_vars: BTreeMap::new(),
    };
    if let Some(max) = f.max_bool_var() {
        for k in 0..=max.0 {
            tseitin.out.fresh(VarKind::Bool(BoolVar(k)));
        }
    }
    match f {
        PropFormula::And(fs) => fs.iter().for_each(|child| tseitin.assert_top(child)),
        other => tseitin.assert_top(other),
    }
    let num_unknowns = f
        .atoms()
        .iter()
        .filter_map(|a| a.max_unknown())
        .map(|u| u.0 + 1)
        .max()
        .unwrap_or(0);
    tseitin.out.num_unknowns = num_unknowns;
    tseitin.out
}

//! The subtropical heuristic end to end.
//!
//! [`solve`] encodes the existence of a variant positive vertex cluster,
//! decides it with the DPLL(T) engine, turns the rational model into an
//! integer direction `n` with a sign variant `τ`, and then walks the moment
//! curve `τ(a)^n` over `a = 2, 4, 16, 256, …` until every constraint is
//! exactly positive. The point found there is the witness.

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::encoder::{clausify, encode_variant_cluster, ClauseSet, PropFormula, SignVars, Unknowns};
use crate::engine::{solve_until, SolveResult};
use crate::poly::{int, pow_int, ExponentVector, Point, Polynomial, Rational, SignVariant, SignedFrame};
use crate::{Error, Result};

/// The conjunction `f_1 > 0 ∧ … ∧ f_m > 0` over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    variables: Vec<String>,
    constraints: Vec<Polynomial>,
}

impl Problem {
    pub fn new(variables: Vec<String>, constraints: Vec<Polynomial>) -> Result<Self> {
        for f in &constraints {
            if f.dimension() != variables.len() {
                return Err(Error::DimensionMismatch {
                    expected: variables.len(),
                    actual: f.dimension(),
                });
            }
            if f.is_zero() {
                return Err(Error::EmptyFrame);
            }
        }
        Ok(Problem { variables, constraints })
    }

    /// A problem over variables named `x1 … xd`.
    pub fn anonymous(dimension: usize, constraints: Vec<Polynomial>) -> Result<Self> {
        Self::new((1..=dimension).map(|i| format!("x{i}")).collect(), constraints)
    }

    pub fn dimension(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }
}

/// An integer direction with its sign variant, plus the certificate: the
/// vertex selected in each constraint and a separating offset for each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction {
    pub n: Vec<BigInt>,
    pub sign_variant: SignVariant,
    pub offsets: Vec<Rational>,
    pub vertices: Vec<ExponentVector>,
}

impl Direction {
    /// The point `τ(a)^n`.
    pub fn point(&self, base: &Rational) -> Point {
        Point::new(
            self.n
                .iter()
                .zip(self.sign_variant.flips())
                .map(|(e, &flip)| {
                    let v = pow_int(base, e);
                    if flip {
                        -v
                    } else {
                        v
                    }
                })
                .collect(),
        )
    }
}

/// A verified satisfying assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub assignment: Vec<(String, Rational)>,
    pub base: Rational,
    pub direction: Direction,
}

impl Witness {
    pub fn point(&self) -> Point {
        Point::new(self.assignment.iter().map(|(_, v)| v.clone()).collect())
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Number of squarings of the base `a` tried after `a = 2`.
    pub max_squarings: u32,
    pub deadline: Option<Instant>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_squarings: 32,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    /// No sign variant admits a positive vertex cluster.
    NoVertexCluster,
    BaseBudgetExhausted(u32),
    Timeout,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::NoVertexCluster => write!(f, "no positive vertex cluster"),
            UnknownReason::BaseBudgetExhausted(k) => {
                write!(f, "base search exhausted after {k} squarings")
            }
            UnknownReason::Timeout => write!(f, "timeout"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Witness),
    Unknown(UnknownReason),
}

/// Wall-clock time per pipeline phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimes {
    pub encode: Duration,
    pub solve: Duration,
    pub base_search: Duration,
}

/// The cluster formula for a problem together with its variable layout.
#[derive(Debug, Clone)]
pub struct ClusterEncoding {
    pub formula: PropFormula,
    pub clauses: ClauseSet,
    pub unknowns: Unknowns,
    pub sign_vars: SignVars,
}

pub fn encode_problem(problem: &Problem) -> ClusterEncoding {
    let unknowns = Unknowns::allocate(problem.dimension(), problem.constraints.len());
    let sign_vars = SignVars::allocate(problem.dimension());
    let formula = encode_variant_cluster(&problem.constraints, &unknowns, &sign_vars)
        .expect("frame points of each polynomial are in its frame");
    let clauses = clausify(&formula).with_unknowns(unknowns.len());
    ClusterEncoding {
        formula,
        clauses,
        unknowns,
        sign_vars,
    }
}

enum DirectionSearch {
    Found(Direction),
    NotFound,
    TimedOut,
}

/// Searches for a direction and sign variant under which every constraint
/// has a positive vertex. `None` when the cluster formula is unsatisfiable.
pub fn find_direction(problem: &Problem) -> Option<Direction> {
    let encoding = encode_problem(problem);
    match search_direction(problem, &encoding, None) {
        DirectionSearch::Found(direction) => Some(direction),
        _ => None,
    }
}

fn search_direction(problem: &Problem, encoding: &ClusterEncoding, deadline: Option<Instant>) -> DirectionSearch {
    let (bool_model, lra_model) = match solve_until(&encoding.clauses, deadline) {
        SolveResult::Sat {
            bool_model, lra_model, ..
        } => (bool_model, lra_model),
        SolveResult::Unsat => return DirectionSearch::NotFound,
        SolveResult::Interrupted => return DirectionSearch::TimedOut,
    };
    let flips = encoding
        .sign_vars
        .b
        .iter()
        .map(|b| bool_model.get(b).copied().unwrap_or(false))
        .collect();
    let sign_variant = SignVariant::new(flips);
    let n_rational: Vec<Rational> = encoding.unknowns.n.iter().map(|u| lra_model[u.0].clone()).collect();
    let flipped: Vec<Polynomial> = problem
        .constraints
        .iter()
        .map(|f| f.apply_sign_variant(&sign_variant).expect("dimensions agree"))
        .collect();
    let n = integral_direction(&flipped, &n_rational);
    let vertices: Vec<ExponentVector> = flipped
        .iter()
        .map(|f| unique_positive_argmax(f, &n).expect("direction selects a positive vertex"))
        .collect();
    let offsets = flipped
        .iter()
        .zip(&vertices)
        .map(|(f, p)| separating_offset(f, p, &n))
        .collect();
    DirectionSearch::Found(Direction {
        n,
        sign_variant,
        offsets,
        vertices,
    })
}

/// Scales a rational vector by the lcm of its denominators.
pub fn normalize_direction(n: &[Rational]) -> Vec<BigInt> {
    let k = n.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    n.iter()
        .map(|r| (r * Rational::from_integer(k.clone())).to_integer())
        .collect()
}

/// Chooses a small integer direction in the open cone around the model.
///
/// The cluster atoms are homogeneous and strict in `(n, c)`, so rounding a
/// large enough multiple of `n` stays inside the cone. Candidates are tried
/// from small to large scale, accepting the first one for which every
/// polynomial has a unique maximizing frame point with positive coefficient.
/// If only ties remain, they are broken lexicographically.
fn integral_direction(polys: &[Polynomial], n: &[Rational]) -> Vec<BigInt> {
    const PLAIN_SCALES: u32 = 12;
    const MAX_SCALES: u32 = 64;

    let d = n.len();
    let magnitude = n.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero);
    let unit: Vec<Rational> = if magnitude.is_zero() {
        n.to_vec()
    } else {
        n.iter().map(|r| r / &magnitude).collect()
    };
    let accepts = |v: &[BigInt]| polys.iter().all(|f| unique_positive_argmax(f, v).is_some());
    let separates = |v: &[BigInt]| polys.iter().all(|f| argmax_all_positive(f, v));

    let mut separating: Option<Vec<BigInt>> = None;
    for j in 0..=MAX_SCALES {
        let k = Rational::from_integer(BigInt::one() << j);
        let v: Vec<BigInt> = unit.iter().map(|r| (r * &k).round().to_integer()).collect();
        if j <= PLAIN_SCALES {
            if accepts(&v) {
                return v;
            }
            for i in 0..d {
                for step in [1, -1] {
                    let mut w = v.clone();
                    w[i] += step;
                    if accepts(&w) {
                        return w;
                    }
                }
            }
        }
        if separating.is_none() && separates(&v) {
            separating = Some(v);
        }
        if j >= PLAIN_SCALES && separating.is_some() {
            break;
        }
    }
    let base = separating.unwrap_or_else(|| normalize_direction(n));
    lexicographic_tie_break(polys, base)
}

/// `M·v + w` where `w` orders frame points lexicographically and `M`
/// exceeds every difference of `w` over the frames, so `v`'s order is kept
/// and its ties are broken.
fn lexicographic_tie_break(polys: &[Polynomial], v: Vec<BigInt>) -> Vec<BigInt> {
    let d = v.len();
    let radix = polys
        .iter()
        .flat_map(|f| f.frame())
        .flat_map(|p| p.exponents().iter().copied())
        .max()
        .map_or(1, |e| u64::from(e) + 1);
    let radix = BigInt::from(radix);
    let mut w = vec![BigInt::one(); d];
    for i in (0..d.saturating_sub(1)).rev() {
        w[i] = &w[i + 1] * &radix;
    }
    let spread = polys
        .iter()
        .flat_map(|f| f.frame())
        .map(|p| p.dot(&w))
        .max()
        .unwrap_or_else(BigInt::zero);
    let m = spread * 2 + 1;
    v.iter().zip(&w).map(|(vi, wi)| vi * &m + wi).collect()
}

/// The frame point maximizing `n^T p`, if unique and with positive coefficient.
fn unique_positive_argmax(f: &Polynomial, n: &[BigInt]) -> Option<ExponentVector> {
    let mut best: Option<(BigInt, &ExponentVector, bool)> = None;
    let mut tied = false;
    for (p, c) in f.terms() {
        let value = p.dot(n);
        match best.as_ref().map(|(b, _, _)| value.cmp(b)) {
            None | Some(Ordering::Greater) => {
                best = Some((value, p, c.is_positive()));
                tied = false;
            }
            Some(Ordering::Equal) => tied = true,
            Some(Ordering::Less) => {}
        }
    }
    match best {
        Some((_, p, true)) if !tied => Some(p.clone()),
        _ => None,
    }
}

fn argmax_all_positive(f: &Polynomial, n: &[BigInt]) -> bool {
    let Some(top) = f.frame().map(|p| p.dot(n)).max() else {
        return false;
    };
    f.terms().filter(|(p, _)| p.dot(n) == top).all(|(_, c)| c.is_positive())
}

/// `c` halfway between `n^T p` and the next highest frame value.
fn separating_offset(f: &Polynomial, vertex: &ExponentVector, n: &[BigInt]) -> Rational {
    let top = vertex.dot(n);
    let second = f
        .frame()
        .filter(|q| *q != vertex)
        .map(|q| q.dot(n))
        .max()
        .unwrap_or_else(|| &top - 1);
    -Rational::new(top + second, BigInt::from(2))
}

enum BaseSearch {
    Found(Rational),
    Exhausted,
    TimedOut,
}

/// The first `a` in `2, 4, 16, 256, …` (at most `max_squarings` squarings
/// past 2) with every constraint exactly positive at `τ(a)^n`.
pub fn find_base(problem: &Problem, direction: &Direction, max_squarings: u32) -> Result<Rational> {
    match search_base(problem, direction, max_squarings, None) {
        BaseSearch::Found(a) => Ok(a),
        _ => Err(Error::BaseBudgetExhausted(max_squarings)),
    }
}

fn search_base(problem: &Problem, direction: &Direction, max_squarings: u32, deadline: Option<Instant>) -> BaseSearch {
    let mut base = int(2);
    for j in 0..=max_squarings {
        if j > 0 {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return BaseSearch::TimedOut;
            }
            base = &base * &base;
        }
        let point = direction.point(&base);
        let positive = problem
            .constraints
            .iter()
            .all(|f| f.evaluate(&point).expect("dimensions agree").is_positive());
        if positive {
            return BaseSearch::Found(base);
        }
    }
    BaseSearch::Exhausted
}

/// Whether the vertex term strictly outweighs all other terms at `x`.
pub fn dominates(f: &Polynomial, vertex: &ExponentVector, x: &Point) -> Result<bool> {
    let coefficient = f
        .coefficient(vertex)
        .ok_or_else(|| Error::NotInFrame(vertex.to_string()))?;
    let single = Polynomial::from_terms(f.dimension(), [(vertex.clone(), coefficient.clone())])?;
    let lead = single.evaluate(x)?;
    let rest = f.evaluate(x)? - &lead;
    Ok(lead.abs() > rest.abs())
}

pub fn solve(problem: &Problem, cfg: &SolveConfig) -> Outcome {
    solve_timed(problem, cfg).0
}

/// [`solve`] with per-phase timings.
pub fn solve_timed(problem: &Problem, cfg: &SolveConfig) -> (Outcome, PhaseTimes) {
    let mut times = PhaseTimes::default();
    let expired = || cfg.deadline.is_some_and(|d| Instant::now() >= d);

    let start = Instant::now();
    let encoding = encode_problem(problem);
    times.encode = start.elapsed();
    if expired() {
        return (Outcome::Unknown(UnknownReason::Timeout), times);
    }

    let start = Instant::now();
    let search = search_direction(problem, &encoding, cfg.deadline);
    times.solve = start.elapsed();
    let direction = match search {
        DirectionSearch::Found(direction) => direction,
        DirectionSearch::NotFound => return (Outcome::Unknown(UnknownReason::NoVertexCluster), times),
        DirectionSearch::TimedOut => return (Outcome::Unknown(UnknownReason::Timeout), times),
    };

    let start = Instant::now();
    let search = search_base(problem, &direction, cfg.max_squarings, cfg.deadline);
    times.base_search = start.elapsed();
    let base = match search {
        BaseSearch::Found(base) => base,
        BaseSearch::Exhausted => {
            return (
                Outcome::Unknown(UnknownReason::BaseBudgetExhausted(cfg.max_squarings)),
                times,
            )
        }
        BaseSearch::TimedOut => return (Outcome::Unknown(UnknownReason::Timeout), times),
    };

    let point = direction.point(&base);
    for f in &problem.constraints {
        assert!(
            f.evaluate(&point).expect("dimensions agree").is_positive(),
            "witness fails constraint {f}"
        );
    }
    let assignment = problem
        .variables
        .iter()
        .cloned()
        .zip(point.into_coordinates())
        .collect();
    let witness = Witness {
        assignment,
        base,
        direction,
    };
    (Outcome::Sat(witness), times)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// The lexicographic minimum or maximum of the frame, comparing coordinates
/// in the given order. Such a point is always a vertex of the Newton polytope.
pub fn lex_vertex(frame: &SignedFrame, order: &[usize], extremum: Extremum) -> Result<ExponentVector> {
    let points = frame.points();
    let d = points.iter().next().ok_or(Error::EmptyFrame)?.dimension();
    let mut seen = vec![false; d];
    if order.len() != d || order.iter().any(|&i| i >= d || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidArgument(format!(
            "{order:?} is not a permutation of {d} coordinates"
        )));
    }
    let key = |p: &ExponentVector| -> Vec<u32> { order.iter().map(|&i| p.exponents()[i]).collect() };
    let chosen = match extremum {
        Extremum::Min => points.iter().min_by_key(|p| key(p)),
        Extremum::Max => points.iter().max_by_key(|p| key(p)),
    };
    Ok(chosen.expect("frame is nonempty").clone())
}

/// Interval on the segment from `(1, …, 1)` to a point of opposite sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootBracket {
    pub low: Point,
    pub high: Point,
    /// Largest coordinate distance between `low` and `high`.
    pub width: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootOutcome {
    RootAtOne,
    /// Bisection hit an exact zero.
    ExactRoot(Point),
    Bracket(RootBracket),
    Unknown,
}

/// Brackets a real root of `f` on a segment starting at `(1, …, 1)`.
pub fn find_root(f: &Polynomial, width: &Rational) -> RootOutcome {
    let d = f.dimension();
    let ones = Point::ones(d);
    let at_one = f.evaluate(&ones).expect("dimensions agree");
    if at_one.is_zero() {
        return RootOutcome::RootAtOne;
    }
    let g = if at_one.is_positive() { f.negate() } else { f.clone() };
    let Ok(problem) = Problem::anonymous(d, vec![g.clone()]) else {
        return RootOutcome::Unknown;
    };
    let target = match solve(&problem, &SolveConfig::default()) {
        Outcome::Sat(witness) => witness.point(),
        Outcome::Unknown(_) => return RootOutcome::Unknown,
    };

    let along = |lambda: &Rational| -> Point {
        Point::new(
            target
                .coordinates()
                .iter()
                .map(|t| Rational::one() + lambda * (t - Rational::one()))
                .collect(),
        )
    };
    let spread = target
        .coordinates()
        .iter()
        .map(|t| (t - Rational::one()).abs())
        .max()
        .expect("nonconstant segment");
    let (mut low, mut high) = (Rational::zero(), Rational::one());
    while (&high - &low) * &spread > *width {
        let mid = (&low + &high) / int(2);
        let point = along(&mid);
        let value = g.evaluate(&point).expect("dimensions agree");
        if value.is_zero() {
            return RootOutcome::ExactRoot(point);
        }
        if value.is_negative() {
            low = mid;
        } else {
            high = mid;
        }
    }
    RootOutcome::Bracket(RootBracket {
        low: along(&low),
        high: along(&high),
        width: (&high - &low) * &spread,
    })
}

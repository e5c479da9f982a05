//! Slow reference procedures used only by tests.
//!
//! Feasibility of linear systems is decided by Fourier–Motzkin elimination.
//! Vertex questions about finite point sets reduce to convex-hull membership.
//! Polynomials are plain `(exponents, coefficient)` lists so that nothing here
//! depends on the solver's own types.

pub mod random;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `coefficients · x + constant > 0` when `strict`, `≥ 0` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Inequality {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
    pub strict: bool,
}

impl Inequality {
    pub fn new(coefficients: Vec<Rational>, constant: Rational, strict: bool) -> Self {
        Inequality {
            coefficients,
            constant,
            strict,
        }
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let value: Rational = self
            .coefficients
            .iter()
            .zip(x)
            .map(|(a, v)| a * v)
            .fold(self.constant.clone(), |acc, t| acc + t);
        if self.strict {
            value.is_positive()
        } else {
            !value.is_negative()
        }
    }

    /// Scaled so the first nonzero coefficient (or the constant) has
    /// absolute value one.
    fn normalized(mut self) -> Self {
        let pivot = self
            .coefficients
            .iter()
            .find(|a| !a.is_zero())
            .unwrap_or(&self.constant)
            .abs();
        if !pivot.is_zero() && !pivot.is_one() {
            for a in &mut self.coefficients {
                *a = &*a / &pivot;
            }
            self.constant = &self.constant / &pivot;
        }
        self
    }
}

/// Whether some rational point satisfies every inequality.
pub fn feasible(dimension: usize, system: &[Inequality]) -> bool {
    let mut current: BTreeSet<Inequality> = system.iter().cloned().map(Inequality::normalized).collect();
    for k in 0..dimension {
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for ineq in current {
            let a = &ineq.coefficients[k];
            if a.is_positive() {
                lower.push(ineq);
            } else if a.is_negative() {
                upper.push(ineq);
            } else {
                rest.insert(ineq);
            }
        }
        for lo in &lower {
            for up in &upper {
                let s = lo.coefficients[k].clone();
                let t = -up.coefficients[k].clone();
                let coefficients = lo
                    .coefficients
                    .iter()
                    .zip(&up.coefficients)
                    .map(|(a, b)| a * &t + b * &s)
                    .collect();
                let combined = Inequality::new(
                    coefficients,
                    &lo.constant * &t + &up.constant * &s,
                    lo.strict || up.strict,
                );
                rest.insert(combined.normalized());
            }
        }
        current = rest;
    }
    current
        .iter()
        .all(|ineq| ineq.holds(&vec![Rational::zero(); dimension]))
}

/// Like [`feasible`], with additional equalities `coefficients · x + constant = 0`
/// that are eliminated by substitution before Fourier–Motzkin runs.
pub fn feasible_with_equalities(
    dimension: usize,
    equalities: &[(Vec<Rational>, Rational)],
    system: &[Inequality],
) -> bool {
    let mut equalities: Vec<(Vec<Rational>, Rational)> = equalities.to_vec();
    let mut system: Vec<Inequality> = system.to_vec();
    while let Some((row, constant)) = equalities.pop() {
        let Some(k) = row.iter().position(|a| !a.is_zero()) else {
            if constant.is_zero() {
                continue;
            }
            return false;
        };
        let eliminate = |coefficients: &mut Vec<Rational>, c: &mut Rational| {
            let factor = &coefficients[k] / &row[k];
            if factor.is_zero() {
                return;
            }
            for (a, e) in coefficients.iter_mut().zip(&row) {
                *a -= &factor * e;
            }
            *c -= &factor * &constant;
        };
        for (coefficients, c) in &mut equalities {
            eliminate(coefficients, c);
        }
        for ineq in &mut system {
            eliminate(&mut ineq.coefficients, &mut ineq.constant);
        }
    }
    feasible(dimension, &system)
}

fn to_rational(p: &[u32]) -> Vec<Rational> {
    p.iter().map(|&e| Rational::from_integer(BigInt::from(e))).collect()
}

/// Whether `p` lies in the convex hull of `points` (false for an empty set).
pub fn in_convex_hull(p: &[u32], points: &[Vec<u32>]) -> bool {
    if points.is_empty() {
        return false;
    }
    // Unknowns are the convex weights λ_j.
    let m = points.len();
    let unit = |j: usize| {
        let mut row = vec![Rational::zero(); m];
        row[j] = Rational::one();
        row
    };
    let system: Vec<Inequality> = (0..m)
        .map(|j| Inequality::new(unit(j), Rational::zero(), false))
        .collect();
    let mut equalities = vec![(vec![Rational::one(); m], -Rational::one())];
    let target = to_rational(p);
    for (i, coordinate) in target.iter().enumerate() {
        let row = points
            .iter()
            .map(|q| Rational::from_integer(BigInt::from(q[i])))
            .collect();
        equalities.push((row, -coordinate.clone()));
    }
    feasible_with_equalities(m, &equalities, &system)
}

/// Whether `p` is a vertex of the convex hull of `points ∪ {p}`.
pub fn is_vertex(p: &[u32], points: &[Vec<u32>]) -> bool {
    let others: Vec<Vec<u32>> = points.iter().filter(|q| q.as_slice() != p).cloned().collect();
    !in_convex_hull(p, &others)
}

/// Whether some point of `positive` can be strictly separated from the
/// convex hull of `negative` by a hyperplane.
pub fn positive_vertex_exists(positive: &[Vec<u32>], negative: &[Vec<u32>]) -> bool {
    positive.iter().any(|p| !in_convex_hull(p, negative))
}

/// Whether some point of `positive` is a vertex of the whole frame.
pub fn positive_frame_vertex_exists(positive: &[Vec<u32>], negative: &[Vec<u32>]) -> bool {
    let all: Vec<Vec<u32>> = positive.iter().chain(negative).cloned().collect();
    positive.iter().any(|p| is_vertex(p, &all))
}

/// A sparse polynomial as `(exponents, coefficient)` pairs.
pub type Terms = Vec<(Vec<u32>, i64)>;

/// Term-by-term evaluation with repeated multiplication.
pub fn evaluate(terms: &[(Vec<u32>, i64)], x: &[Rational]) -> Rational {
    let mut sum = Rational::zero();
    for (exponents, c) in terms {
        let mut t = Rational::from_integer(BigInt::from(*c));
        for (v, &e) in x.iter().zip(exponents) {
            for _ in 0..e {
                t *= v;
            }
        }
        sum += t;
    }
    sum
}

/// Positive and negative frame after negating the variables in `flips`.
pub fn signed_frame(terms: &[(Vec<u32>, i64)], flips: &[bool]) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (exponents, c) in terms {
        let odd_flips = exponents.iter().zip(flips).filter(|(e, &f)| f && *e % 2 == 1).count();
        if (*c > 0) == (odd_flips % 2 == 0) {
            positive.push(exponents.clone());
        } else {
            negative.push(exponents.clone());
        }
    }
    (positive, negative)
}

/// Whether one direction `n` with offsets `c_i` puts the chosen point of
/// each polynomial strictly above its hyperplane and every negative point
/// strictly below it.
fn selection_feasible(dimension: usize, chosen: &[&Vec<u32>], negatives: &[Vec<Vec<u32>>]) -> bool {
    // Offsets come first so elimination starts with them.
    let m = chosen.len();
    let width = m + dimension;
    let row = |i: usize, p: &[u32], sign: i64| {
        let mut coefficients = vec![Rational::zero(); width];
        coefficients[i] = Rational::from_integer(BigInt::from(sign));
        for (k, &e) in p.iter().enumerate() {
            coefficients[m + k] = Rational::from_integer(BigInt::from(sign * i64::from(e)));
        }
        Inequality::new(coefficients, Rational::zero(), true)
    };
    let mut system = Vec::new();
    for i in 0..m {
        system.push(row(i, chosen[i], 1));
        system.extend(negatives[i].iter().map(|q| row(i, q, -1)));
    }
    feasible(width, &system)
}

/// Brute force over all `2^d` sign variants and all choices of one
/// positive point per polynomial.
pub fn cluster_exists(dimension: usize, polynomials: &[Terms]) -> bool {
    (0..1u32 << dimension).any(|mask| {
        let flips: Vec<bool> = (0..dimension).map(|k| mask >> k & 1 == 1).collect();
        let frames: Vec<_> = polynomials.iter().map(|f| signed_frame(f, &flips)).collect();
        if frames.iter().any(|(positive, _)| positive.is_empty()) {
            return false;
        }
        let negatives: Vec<Vec<Vec<u32>>> = frames.iter().map(|(_, n)| n.clone()).collect();
        let mut choice = vec![0usize; frames.len()];
        loop {
            let chosen: Vec<&Vec<u32>> = frames.iter().zip(&choice).map(|((p, _), &j)| &p[j]).collect();
            if selection_feasible(dimension, &chosen, &negatives) {
                return true;
            }
            // Odometer increment over the selections.
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return false;
                }
                choice[k] += 1;
                if choice[k] < frames[k].0.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    })
}

//! Exact sparse multivariate polynomials over the rationals.
//!
//! A polynomial is a map from exponent vectors to nonzero rational
//! coefficients. Its key set is the *frame*, which splits into a positive and
//! a negative part by coefficient sign. Sign variants substitute `-x_i` for a
//! chosen subset of variables; they keep the frame and only flip signs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds a rational from an integer.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Builds `num / den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A vector of natural-number exponents, one per problem variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exponents: Vec<u32>) -> Self {
        ExponentVector(exponents)
    }

    pub fn zero(dimension: usize) -> Self {
        ExponentVector(vec![0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Sum of the exponents.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    /// Inner product `n^T p` with an integer direction.
    pub fn dot(&self, direction: &[BigInt]) -> BigInt {
        debug_assert_eq!(direction.len(), self.0.len());
        self.0
            .iter()
            .zip(direction)
            .filter(|(&e, _)| e != 0)
            .map(|(&e, n)| n * BigInt::from(e))
            .sum()
    }

    /// Inner product `n^T p` with a rational direction.
    pub fn dot_rational(&self, direction: &[Rational]) -> Rational {
        debug_assert_eq!(direction.len(), self.0.len());
        self.0
            .iter()
            .zip(direction)
            .filter(|(&e, _)| e != 0)
            .fold(Rational::zero(), |acc, (&e, n)| acc + n * int(i64::from(e)))
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(exponents: Vec<u32>) -> Self {
        ExponentVector(exponents)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A point of `ℚ^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point(Vec<Rational>);

impl Point {
    pub fn new(coordinates: Vec<Rational>) -> Self {
        Point(coordinates)
    }

    /// The all-ones point `(1, …, 1)`.
    pub fn ones(dimension: usize) -> Self {
        Point(vec![Rational::one(); dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn coordinates(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coordinates(self) -> Vec<Rational> {
        self.0
    }
}

impl From<Vec<Rational>> for Point {
    fn from(coordinates: Vec<Rational>) -> Self {
        Point(coordinates)
    }
}

/// Per-variable choice between `x_i` and `-x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVariant {
    flips: Vec<bool>,
}

impl SignVariant {
    pub fn new(flips: Vec<bool>) -> Self {
        SignVariant { flips }
    }

    /// The variant that flips nothing.
    pub fn identity(dimension: usize) -> Self {
        SignVariant {
            flips: vec![false; dimension],
        }
    }

    /// All `2^d` sign variants, identity first.
    pub fn all(dimension: usize) -> impl Iterator<Item = SignVariant> {
        assert!(dimension < 32, "too many variables to enumerate sign variants");
        (0u32..(1u32 << dimension)).map(move |mask| SignVariant {
            flips: (0..dimension).map(|i| mask & (1 << i) != 0).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.flips.len()
    }

    pub fn flips(&self) -> &[bool] {
        &self.flips
    }

    pub fn is_identity(&self) -> bool {
        self.flips.iter().all(|&b| !b)
    }

    /// Whether substituting this variant negates the monomial `x^p`.
    pub fn flips_monomial(&self, p: &ExponentVector) -> bool {
        self.flips
            .iter()
            .zip(p.exponents())
            .filter(|(&flip, &e)| flip && e % 2 == 1)
            .count()
            % 2
            == 1
    }

    /// Negates the flipped coordinates of `x`.
    pub fn apply_to_point(&self, x: &Point) -> Result<Point> {
        check_dimension(self.flips.len(), x.dimension())?;
        Ok(Point(
            x.0.iter()
                .zip(&self.flips)
                .map(|(v, &flip)| if flip { -v } else { v.clone() })
                .collect(),
        ))
    }
}

/// Partition of a frame by coefficient sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedFrame {
    pub positive: BTreeSet<ExponentVector>,
    pub negative: BTreeSet<ExponentVector>,
}

impl SignedFrame {
    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    /// The whole frame, in exponent-vector order.
    pub fn points(&self) -> BTreeSet<ExponentVector> {
        self.positive.union(&self.negative).cloned().collect()
    }

    pub fn contains(&self, p: &ExponentVector) -> bool {
        self.positive.contains(p) || self.negative.contains(p)
    }
}

/// Sparse polynomial `Σ f_p x^p` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    dimension: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl Polynomial {
    /// The zero polynomial in `dimension` variables.
    pub fn zero(dimension: usize) -> Self {
        Polynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial `value`.
    pub fn constant(dimension: usize, value: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(ExponentVector::zero(dimension), value);
        }
        Polynomial { dimension, terms }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// exponent vectors are summed and zero coefficients dropped.
    pub fn from_terms<I, E>(dimension: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, Rational)>,
        E: Into<ExponentVector>,
    {
        let mut poly = Polynomial::zero(dimension);
        for (exponents, coefficient) in terms {
            poly.add_term(exponents.into(), coefficient)?;
        }
        Ok(poly)
    }

    /// Like [`Polynomial::from_terms`] with integer coefficients.
    pub fn from_int_terms<I, E>(dimension: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, i64)>,
        E: Into<ExponentVector>,
    {
        Self::from_terms(dimension, terms.into_iter().map(|(e, c)| (e, int(c))))
    }

    /// Adds `coefficient · x^p`, removing the term if it cancels.
    pub fn add_term(&mut self, p: ExponentVector, coefficient: Rational) -> Result<()> {
        check_dimension(self.dimension, p.dimension())?;
        if coefficient.is_zero() {
            return Ok(());
        }
        let slot = self.terms.entry(p).or_insert_with(Rational::zero);
        *slot += coefficient;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(ExponentVector::is_zero)
    }

    /// The constant term (zero when absent).
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&ExponentVector::zero(self.dimension))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Number of monomials, i.e. the size of the frame.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &ExponentVector) -> Option<&Rational> {
        self.terms.get(p)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    /// The frame, in exponent-vector order.
    pub fn frame(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    pub fn max_degree(&self) -> u64 {
        self.terms.keys().map(ExponentVector::degree).max().unwrap_or(0)
    }

    /// Exact value of the polynomial at `x`.
    pub fn evaluate(&self, x: &Point) -> Result<Rational> {
        check_dimension(self.dimension, x.dimension())?;
        let mut sum = Rational::zero();
        for (p, coefficient) in &self.terms {
            let mut term = coefficient.clone();
            for (&e, value) in p.exponents().iter().zip(x.coordinates()) {
                if e == 0 {
                    continue;
                }
                if value.is_zero() {
                    term.set_zero();
                    break;
                }
                term *= pow(value, e);
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Splits the frame by coefficient sign.
    pub fn signed_frame(&self) -> Result<SignedFrame> {
        if self.is_zero() {
            return Err(Error::EmptyFrame);
        }
        let mut frame = SignedFrame {
            positive: BTreeSet::new(),
            negative: BTreeSet::new(),
        };
        for (p, c) in &self.terms {
            if c.is_positive() {
                frame.positive.insert(p.clone());
            } else {
                frame.negative.insert(p.clone());
            }
        }
        Ok(frame)
    }

    /// The substitution `f(τ(x_1), …, τ(x_d))`.
    pub fn apply_sign_variant(&self, tau: &SignVariant) -> Result<Polynomial> {
        check_dimension(self.dimension, tau.dimension())?;
        let terms = self
            .terms
            .iter()
            .map(|(p, c)| {
                let c = if tau.flips_monomial(p) { -c } else { c.clone() };
                (p.clone(), c)
            })
            .collect();
        Ok(Polynomial {
            dimension: self.dimension,
            terms,
        })
    }

    /// Every coefficient negated.
    pub fn negate(&self) -> Polynomial {
        Polynomial {
            dimension: self.dimension,
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(mut self) -> Polynomial {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.negate()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*x^{p}")?;
        }
        Ok(())
    }
}

/// `base^exponent` for a natural exponent.
pub fn pow(base: &Rational, exponent: u32) -> Rational {
    Rational::new_raw(base.numer().pow(exponent), base.denom().pow(exponent))
}

/// `base^exponent` for an integer exponent; `base` must be nonzero when the
/// exponent is negative.
pub fn pow_int(base: &Rational, exponent: &BigInt) -> Rational {
    let magnitude = u32::try_from(exponent.abs()).expect("exponent exceeds u32 range");
    let value = pow(base, magnitude);
    if exponent.is_negative() {
        value.recip()
    } else {
        value
    }
}

fn check_dimension(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    /// y + 2xy³ − 3x²y² − x³ − 4x⁴y⁴
    fn example_one() -> Polynomial {
        Polynomial::from_int_terms(
            2,
            [
                (vec![0, 1], 1),
                (vec![1, 3], 2),
                (vec![2, 2], -3),
                (vec![3, 0], -1),
                (vec![4, 4], -4),
            ],
        )
        .unwrap()
    }

    fn ev(v: Vec<u32>) -> ExponentVector {
        ExponentVector::new(v)
    }

    #[test]
    fn evaluates_example_one_on_moment_curve() {
        let x = Point::new(vec![ratio(1, 4), int(8)]);
        // 8 + 256 - 12 - 1/64 - 64
        assert_eq!(example_one().evaluate(&x).unwrap(), ratio(12031, 64));
    }

    #[test]
    fn evaluates_at_ones_to_coefficient_sum() {
        assert_eq!(example_one().evaluate(&Point::ones(2)).unwrap(), int(-5));
    }

    #[test]
    fn evaluates_three_variable_example_at_one_half() {
        let f = Polynomial::from_int_terms(3, [(vec![0, 0, 0], 2), (vec![1, 2, 1], -1), (vec![2, 1, 3], 1)]).unwrap();
        let half = ratio(1, 2);
        let x = Point::new(vec![half.clone(), half.clone(), half]);
        // 2 - 1/16 + 1/64
        assert_eq!(f.evaluate(&x).unwrap(), ratio(125, 64));
    }

    #[test]
    fn evaluation_checks_dimension() {
        let err = example_one().evaluate(&Point::ones(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, actual: 3 });
    }

    #[test]
    fn evaluates_at_zero_and_negative_points() {
        let f = Polynomial::from_int_terms(1, [(vec![0], 3), (vec![3], 1)]).unwrap();
        assert_eq!(f.evaluate(&Point::new(vec![int(0)])).unwrap(), int(3));
        assert_eq!(f.evaluate(&Point::new(vec![int(-2)])).unwrap(), int(-5));
    }

    #[test]
    fn signed_frame_of_example_one() {
        let frame = example_one().signed_frame().unwrap();
        let positive: Vec<_> = frame.positive.iter().cloned().collect();
        let negative: Vec<_> = frame.negative.iter().cloned().collect();
        assert_eq!(positive, vec![ev(vec![0, 1]), ev(vec![1, 3])]);
        assert_eq!(negative, vec![ev(vec![2, 2]), ev(vec![3, 0]), ev(vec![4, 4])]);
    }

    #[test]
    fn signed_frame_of_single_terms() {
        let x = Polynomial::from_int_terms(1, [(vec![1], 1)]).unwrap();
        let frame = x.signed_frame().unwrap();
        assert_eq!(frame.positive.len(), 1);
        assert!(frame.negative.is_empty());

        let minus_five = Polynomial::constant(1, int(-5));
        let frame = minus_five.signed_frame().unwrap();
        assert!(frame.positive.is_empty());
        assert!(frame.negative.contains(&ev(vec![0])));
    }

    #[test]
    fn zero_polynomial_has_no_signed_frame() {
        assert_eq!(Polynomial::zero(2).signed_frame(), Err(Error::EmptyFrame));
    }

    #[test]
    fn sign_variant_flips_odd_monomials() {
        let f = Polynomial::from_int_terms(2, [(vec![1, 0], 1), (vec![0, 1], -1)]).unwrap();
        let g = f.apply_sign_variant(&SignVariant::new(vec![false, true])).unwrap();
        let expected = Polynomial::from_int_terms(2, [(vec![1, 0], 1), (vec![0, 1], 1)]).unwrap();
        assert_eq!(g, expected);

        let h = Polynomial::from_int_terms(2, [(vec![2, 1], 1)]).unwrap();
        assert_eq!(h.apply_sign_variant(&SignVariant::new(vec![true, false])).unwrap(), h);
    }

    #[test]
    fn sign_variant_on_example_one_flipping_x() {
        let g = example_one()
            .apply_sign_variant(&SignVariant::new(vec![true, false]))
            .unwrap();
        let signs: Vec<_> = g.terms().map(|(p, c)| (p.clone(), c.clone())).collect();
        assert_eq!(
            signs,
            vec![
                (ev(vec![0, 1]), int(1)),
                (ev(vec![1, 3]), int(-2)),
                (ev(vec![2, 2]), int(-3)),
                (ev(vec![3, 0]), int(1)),
                (ev(vec![4, 4]), int(-4)),
            ]
        );
    }

    #[test]
    fn negation() {
        let f = Polynomial::from_int_terms(1, [(vec![1], 1), (vec![0], -1)]).unwrap();
        let expected = Polynomial::from_int_terms(1, [(vec![1], -1), (vec![0], 1)]).unwrap();
        assert_eq!(f.negate(), expected);
        assert_eq!(-f, expected);
        assert!(Polynomial::zero(3).negate().is_zero());

        let g = example_one().negate();
        for (p, c) in example_one().terms() {
            assert_eq!(g.coefficient(p).unwrap(), &-c);
        }
    }

    #[test]
    fn cancelling_terms_are_removed() {
        let f = Polynomial::from_int_terms(1, [(vec![1], 2), (vec![1], -2), (vec![0], 1)]).unwrap();
        assert_eq!(f.len(), 1);
        assert!(f.is_constant());
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow_int(&int(2), &BigInt::from(-3)), ratio(1, 8));
        assert_eq!(pow_int(&ratio(-2, 3), &BigInt::from(3)), ratio(-8, 27));
        assert_eq!(pow(&int(0), 0), int(1));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
    }

    fn polynomial(dimension: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..5, dimension), small_rational()), 0..7)
            .prop_map(move |terms| Polynomial::from_terms(dimension, terms).unwrap())
    }

    fn lowest_terms(r: &Rational) -> bool {
        r.denom().is_positive() && r.numer().gcd(r.denom()) == BigInt::one()
    }

    proptest! {
        #[test]
        fn value_at_ones_is_coefficient_sum(f in polynomial(3)) {
            let sum = f.terms().fold(Rational::zero(), |acc, (_, c)| acc + c);
            prop_assert_eq!(f.evaluate(&Point::ones(3)).unwrap(), sum);
        }

        #[test]
        fn sign_variant_is_substitution(
            f in polynomial(3),
            flips in prop::collection::vec(any::<bool>(), 3),
            x in prop::collection::vec(small_rational(), 3),
        ) {
            let tau = SignVariant::new(flips);
            let x = Point::new(x);
            let lhs = f.apply_sign_variant(&tau).unwrap().evaluate(&x).unwrap();
            let rhs = f.evaluate(&tau.apply_to_point(&x).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn signed_frame_partitions(f in polynomial(2)) {
            prop_assume!(!f.is_zero());
            let frame = f.signed_frame().unwrap();
            prop_assert!(frame.positive.is_disjoint(&frame.negative));
            let all: BTreeSet<_> = f.frame().cloned().collect();
            prop_assert_eq!(frame.points(), all);
            for p in &frame.positive {
                prop_assert!(f.coefficient(p).unwrap().is_positive());
            }
        }

        #[test]
        fn results_stay_in_lowest_terms(
            f in polynomial(2),
            x in prop::collection::vec(small_rational(), 2),
        ) {
            let value = f.evaluate(&Point::new(x)).unwrap();
            prop_assert!(lowest_terms(&value));
            for (_, c) in f.negate().terms() {
                prop_assert!(lowest_terms(c));
            }
        }
    }
}

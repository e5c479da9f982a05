//! Seeded generators for property tests.

use rand::Rng;

use crate::Terms;

/// A polynomial with `1..=max_points` distinct monomials, exponents in
/// `0..=max_exponent` and coefficients in `[-9, 9] \ {0}`.
pub fn polynomial<R: Rng>(rng: &mut R, dimension: usize, max_points: usize, max_exponent: u32) -> Terms {
    let count = rng.gen_range(1..=max_points);
    let mut terms: Terms = Vec::with_capacity(count);
    let mut attempts = 0;
    while terms.len() < count && attempts < 100 {
        attempts += 1;
        let exponents: Vec<u32> = (0..dimension).map(|_| rng.gen_range(0..=max_exponent)).collect();
        if terms.iter().any(|(e, _)| *e == exponents) {
            continue;
        }
        terms.push((exponents, coefficient(rng)));
    }
    terms
}

pub fn coefficient<R: Rng>(rng: &mut R) -> i64 {
    let magnitude = rng.gen_range(1..=9);
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// `1..=max_polynomials` polynomials over a shared dimension in `1..=max_dimension`.
pub fn problem<R: Rng>(
    rng: &mut R,
    max_dimension: usize,
    max_polynomials: usize,
    max_points: usize,
    max_exponent: u32,
) -> (usize, Vec<Terms>) {
    let dimension = rng.gen_range(1..=max_dimension);
    let count = rng.gen_range(1..=max_polynomials);
    let polynomials = (0..count)
        .map(|_| polynomial(rng, dimension, max_points, max_exponent))
        .collect();
    (dimension, polynomials)
}

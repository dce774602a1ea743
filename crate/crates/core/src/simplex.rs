//! Probability-simplex helpers shared by mixed strategies and behaviour
//! policies.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Checks that `v` is a probability vector: non-negative entries summing to
/// one within [`Scalar::simplex_tol`].
pub fn validate<S: Scalar>(v: &[S]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Shape("empty probability vector".into()));
    }
    for (i, &p) in v.iter().enumerate() {
        if !(p >= S::zero()) {
            return Err(Error::Shape(format!(
                "probability vector has negative or non-finite entry {p} at index {i}"
            )));
        }
    }
    let sum: S = v.iter().copied().sum();
    if (sum - S::one()).abs() > S::simplex_tol() {
        return Err(Error::Shape(format!(
            "probability vector sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Uniform distribution over `n` outcomes.
pub fn uniform<S: Scalar>(n: usize) -> Vec<S> {
    vec![S::one() / S::cast(n); n]
}

/// Random interior point of the simplex: normalized Exp(1) draws, then a
/// floor to keep every coordinate at least `min_mass`.
pub fn random_interior<S: Scalar, R: Rng>(n: usize, min_mass: S, rng: &mut R) -> Vec<S> {
    let mut v: Vec<S> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(1e-12..1.0);
            S::cast(-u.ln())
        })
        .collect();
    let sum: S = v.iter().copied().sum();
    for p in v.iter_mut() {
        *p /= sum;
    }
    floor_and_renormalize(&mut v, min_mass);
    v
}

/// Applies `max(p, floor)` per coordinate and renormalizes to unit sum.
/// Returns `true` when the floor actually engaged.
pub fn floor_and_renormalize<S: Scalar>(v: &mut [S], floor: S) -> bool {
    let mut floored = false;
    for p in v.iter_mut() {
        if *p < floor {
            *p = floor;
            floored = true;
        }
    }
    let sum: S = v.iter().copied().sum();
    for p in v.iter_mut() {
        *p /= sum;
    }
    floored
}

/// Smallest coordinate.
pub fn min_mass<S: Scalar>(v: &[S]) -> S {
    v.iter().copied().fold(S::infinity(), S::min)
}

/// Dot product of a probability vector with a value vector.
pub fn weighted_mean<S: Scalar>(probs: &[S], values: &[S]) -> S {
    probs
        .iter()
        .zip(values.iter())
        .map(|(&p, &v)| p * v)
        .sum()
}

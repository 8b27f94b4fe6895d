//! Seeded random inputs for the verification suites.
//!
//! Coefficients are small integers (uniform in `[-5, 5]` by default) so that
//! exact arithmetic stays cheap through degree-`d` polynomial evaluation.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artin::{ArtinElement, ArtinRing};
use crate::lie::{LieAlgebra, LieElement};
use crate::rational::Rational;

pub type SuiteRng = ChaCha8Rng;

/// Name recorded in reports so that sample sets can be regenerated.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64";

pub const DEFAULT_BOUND: i64 = 5;

/// Independent stream for trial `index` of a suite run with `seed`.
pub fn trial_rng(seed: u64, stream: &str, index: u64) -> SuiteRng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mixed = seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h)
        .rotate_left(17)
        ^ index.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    ChaCha8Rng::seed_from_u64(mixed)
}

pub fn small_int<R: Rng>(rng: &mut R) -> i64 {
    rng.gen_range(-DEFAULT_BOUND..=DEFAULT_BOUND)
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::from_int(small_int(rng))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let x = small_int(rng);
        if x != 0 {
            return Rational::from_int(x);
        }
    }
}

/// Random integer-coefficient element of `g`.
pub fn lie_element<R: Rng>(rng: &mut R, alg: &Arc<LieAlgebra>) -> LieElement {
    let c: Vec<Rational> = (0..alg.dim()).map(|_| small_rational(rng)).collect();
    LieElement::from_rationals(alg, &c)
}

/// Random element of the ring; with `in_ideal` the constant term is zero.
pub fn artin_element<R: Rng>(rng: &mut R, ring: &Arc<ArtinRing>, in_ideal: bool) -> ArtinElement {
    let mut x = ArtinElement::zero(ring);
    for m in ring.monomials() {
        if in_ideal && m.degree() == 0 {
            continue;
        }
        x.add_term(m, &small_rational(rng));
    }
    x
}

/// Random element of `g (x) A` (or of `g (x) m_A` with `in_ideal`).
pub fn lie_element_over<R: Rng>(rng: &mut R, alg: &Arc<LieAlgebra>, ring: &Arc<ArtinRing>, in_ideal: bool) -> LieElement {
    let coeffs = (0..alg.dim()).map(|_| artin_element(rng, ring, in_ideal)).collect();
    LieElement::from_coeffs(alg, ring, coeffs).expect("consistent ring")
}

pub fn permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

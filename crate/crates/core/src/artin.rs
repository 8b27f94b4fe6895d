//! Truncated polynomial rings with rational coefficients.
//!
//! An [`ArtinRing`] is a tensor product of blocks `Q[t_1..t_r]/(deg >= m)`.
//! The usual coefficient rings of formal deformation theory are single
//! blocks; extra blocks are appended when a computation needs auxiliary
//! nilpotent directions (square-zero variables for multilinear coefficient
//! extraction, or a degree-bounded block of commuting form variables).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Hard bound on the number of variables of any ring built by the crate.
pub const MAX_VARS: usize = 16;

/// Exponent vector, ordered graded-lexicographically with `t1 > t2 > ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u16,
    exps: [u8; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { degree: 0, exps: [0; MAX_VARS] }
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut m = Monomial::one();
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = e;
            m.degree += u16::from(e);
        }
        m
    }

    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index out of range");
        let mut m = Monomial::one();
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        u32::from(self.degree)
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn exponents(&self, nvars: usize) -> &[u8] {
        &self.exps[..nvars]
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut exps = [0u8; MAX_VARS];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exps[i] + other.exps[i];
        }
        Monomial { degree: self.degree + other.degree, exps }
    }

    /// Degree restricted to the variables `start..start + len`.
    fn block_degree(&self, start: usize, len: usize) -> u32 {
        self.exps[start..start + len].iter().map(|&e| u32::from(e)).sum()
    }

    /// Splits into the first `head` variables and the rest (renumbered from 0).
    pub fn split_at(&self, head: usize) -> (Monomial, Monomial) {
        let mut a = Monomial::one();
        let mut b = Monomial::one();
        for i in 0..MAX_VARS {
            if i < head {
                a.exps[i] = self.exps[i];
                a.degree += u16::from(self.exps[i]);
            } else {
                b.exps[i - head] = self.exps[i];
                b.degree += u16::from(self.exps[i]);
            }
        }
        (a, b)
    }

    /// Concatenates `self` (first `head` variables) with `tail`.
    pub fn join(&self, head: usize, tail: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_VARS - head {
            if tail.exps[i] != 0 {
                m.exps[head + i] = tail.exps[i];
            }
        }
        m.degree = self.degree + tail.degree;
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exps[..])
    }
}

/// One tensor factor `Q[t_1..t_vars]/(deg >= order)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub vars: usize,
    pub order: u32,
}

/// Local Artin Q-algebra given as a tensor product of truncated polynomial blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArtinRing {
    blocks: Vec<Block>,
}

impl ArtinRing {
    /// The residue field Q itself.
    pub fn rationals() -> Arc<ArtinRing> {
        Arc::new(ArtinRing { blocks: Vec::new() })
    }

    /// `Q[t_1..t_r]/(deg >= m)`.
    pub fn truncated(num_vars: usize, order: u32) -> Result<Arc<ArtinRing>> {
        if order == 0 {
            return Err(Error::InvalidArgument("truncation order must be >= 1".into()));
        }
        if num_vars > MAX_VARS {
            return Err(Error::InvalidArgument(format!("at most {MAX_VARS} variables supported")));
        }
        let blocks = if num_vars == 0 {
            Vec::new()
        } else {
            vec![Block { vars: num_vars, order }]
        };
        Ok(Arc::new(ArtinRing { blocks }))
    }

    /// Appends a block of `vars` fresh variables truncated at total degree `order`.
    pub fn extended(&self, vars: usize, order: u32) -> Arc<ArtinRing> {
        assert!(order >= 1);
        assert!(self.num_vars() + vars <= MAX_VARS, "too many variables");
        let mut blocks = self.blocks.clone();
        if vars > 0 {
            blocks.push(Block { vars, order });
        }
        Arc::new(ArtinRing { blocks })
    }

    /// Appends `k` square-zero variables `s_1..s_k` (`s_i^2 = 0`).
    pub fn with_square_zero(&self, k: usize) -> Arc<ArtinRing> {
        assert!(self.num_vars() + k <= MAX_VARS, "too many variables");
        let mut blocks = self.blocks.clone();
        blocks.extend((0..k).map(|_| Block { vars: 1, order: 2 }));
        Arc::new(ArtinRing { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_vars(&self) -> usize {
        self.blocks.iter().map(|b| b.vars).sum()
    }

    /// The truncation order `m` of a single-block ring (`1` for Q).
    pub fn truncation_order(&self) -> Option<u32> {
        match self.blocks.as_slice() {
            [] => Some(1),
            [b] => Some(b.order),
            _ => None,
        }
    }

    /// Smallest `n` with `m_A^n = 0`.
    pub fn nilpotency_index(&self) -> u32 {
        1 + self.blocks.iter().map(|b| b.order - 1).sum::<u32>()
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        let mut start = 0;
        for b in &self.blocks {
            if m.block_degree(start, b.vars) >= b.order {
                return false;
            }
            start += b.vars;
        }
        // variables past the last block do not exist
        m.degree() == m.block_degree(0, start)
    }

    /// True when `self`'s blocks are a prefix of `other`'s.
    pub fn is_prefix_of(&self, other: &ArtinRing) -> bool {
        other.blocks.len() >= self.blocks.len() && other.blocks[..self.blocks.len()] == self.blocks[..]
    }

    /// All monomials that survive truncation, in graded-lex order.
    pub fn monomials(&self) -> Vec<Monomial> {
        let n = self.num_vars();
        let mut out = vec![Monomial::one()];
        for var in 0..n {
            let mut next = Vec::new();
            for m in &out {
                let mut e = *m;
                loop {
                    next.push(e);
                    let bumped = e.times(&Monomial::var(var));
                    if !self.admits(&bumped) {
                        break;
                    }
                    e = bumped;
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    pub fn describe(&self) -> String {
        if self.blocks.is_empty() {
            return "Q".into();
        }
        let mut start = 0;
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let vars: Vec<String> = (start..start + b.vars).map(|i| format!("t{}", i + 1)).collect();
                start += b.vars;
                format!("Q[{}]/(deg>={})", vars.join(","), b.order)
            })
            .collect();
        parts.join(" (x) ")
    }
}

fn same_ring(a: &Arc<ArtinRing>, b: &Arc<ArtinRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Element of an [`ArtinRing`]; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq)]
pub struct ArtinElement {
    ring: Arc<ArtinRing>,
    terms: BTreeMap<Monomial, Rational>,
}

impl ArtinElement {
    pub fn zero(ring: &Arc<ArtinRing>) -> Self {
        ArtinElement { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<ArtinRing>) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Arc<ArtinRing>, q: Rational) -> Self {
        Self::monomial(ring, Monomial::one(), q)
    }

    pub fn from_int(ring: &Arc<ArtinRing>, n: i64) -> Self {
        Self::constant(ring, Rational::from_int(n))
    }

    /// The generator `t_{i+1}`.
    pub fn var(ring: &Arc<ArtinRing>, i: usize) -> Self {
        assert!(i < ring.num_vars(), "variable index out of range");
        Self::monomial(ring, Monomial::var(i), Rational::one())
    }

    pub fn monomial(ring: &Arc<ArtinRing>, m: Monomial, q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() && ring.admits(&m) {
            terms.insert(m, q);
        }
        ArtinElement { ring: ring.clone(), terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(ring: &Arc<ArtinRing>, terms: I) -> Self {
        let mut out = ArtinElement::zero(ring);
        for (m, q) in terms {
            out.add_term(m, &q);
        }
        out
    }

    pub fn ring(&self) -> &Arc<ArtinRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// True iff the constant coefficient vanishes.
    pub fn in_maximal_ideal(&self) -> bool {
        !self.terms.contains_key(&Monomial::one())
    }

    /// Lowest total degree of a nonzero term (`None` for zero).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    /// Part of total degree exactly `deg`.
    pub fn homogeneous_part(&self, deg: u32) -> ArtinElement {
        ArtinElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == deg)
                .map(|(m, q)| (*m, q.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, q: &Rational) {
        if q.is_zero() || !self.ring.admits(&m) {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_assign(&mut self, other: &ArtinElement) {
        self.check_ring(other).expect("ring mismatch in addition");
        for (m, q) in &other.terms {
            self.add_term(*m, q);
        }
    }

    pub fn sub_assign(&mut self, other: &ArtinElement) {
        self.check_ring(other).expect("ring mismatch in subtraction");
        for (m, q) in &other.terms {
            self.add_term(*m, &-q);
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Rational, other: &ArtinElement) {
        if c.is_zero() {
            return;
        }
        self.check_ring(other).expect("ring mismatch in addition");
        for (m, q) in &other.terms {
            self.add_term(*m, &(c * q));
        }
    }

    /// `self += a * b`, truncated.
    pub fn add_product(&mut self, a: &ArtinElement, b: &ArtinElement) {
        a.check_ring(b).expect("ring mismatch in multiplication");
        for (ma, qa) in &a.terms {
            for (mb, qb) in &b.terms {
                let m = ma.times(mb);
                if self.ring.admits(&m) {
                    self.add_term(m, &(qa * qb));
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> ArtinElement {
        if c.is_zero() {
            return ArtinElement::zero(&self.ring);
        }
        ArtinElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, q)| (*m, q * c)).collect(),
        }
    }

    fn check_ring(&self, other: &ArtinElement) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.ring.describe(), other.ring.describe()))
        }
    }

    /// Truncated product; fails when the rings differ.
    pub fn try_mul(&self, other: &ArtinElement) -> Result<ArtinElement> {
        self.check_ring(other)?;
        let mut out = ArtinElement::zero(&self.ring);
        out.add_product(self, other);
        Ok(out)
    }

    pub fn try_add(&self, other: &ArtinElement) -> Result<ArtinElement> {
        self.check_ring(other)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> ArtinElement {
        let mut acc = ArtinElement::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Image under the inclusion into a ring whose blocks extend this ring's blocks.
    pub fn embed(&self, target: &Arc<ArtinRing>) -> ArtinElement {
        assert!(self.ring.is_prefix_of(target), "cannot embed {} into {}", self.ring.describe(), target.describe());
        ArtinElement { ring: target.clone(), terms: self.terms.clone() }
    }

    /// Re-reads the coefficients in another ring with the same variables, dropping
    /// monomials that vanish there (e.g. the projection `Q[t]/t^(r+1) -> Q[t]/t^r`).
    pub fn reduce_into(&self, target: &Arc<ArtinRing>) -> ArtinElement {
        let mut out = ArtinElement::zero(target);
        for (m, q) in &self.terms {
            out.add_term(*m, q);
        }
        out
    }

    /// Groups the terms by the monomial in the variables past `head`:
    /// returns `tail monomial -> coefficient in base` (the first `head` variables).
    pub fn split_tail(&self, base: &Arc<ArtinRing>) -> BTreeMap<Monomial, ArtinElement> {
        let head = base.num_vars();
        let mut out: BTreeMap<Monomial, ArtinElement> = BTreeMap::new();
        for (m, q) in &self.terms {
            let (a, b) = m.split_at(head);
            out.entry(b).or_insert_with(|| ArtinElement::zero(base)).add_term(a, q);
        }
        out
    }

    /// Coefficient (in `base`) of the given monomial in the variables past `base`'s.
    pub fn tail_coefficient(&self, base: &Arc<ArtinRing>, tail: &Monomial) -> ArtinElement {
        let head = base.num_vars();
        let mut out = ArtinElement::zero(base);
        for (m, q) in &self.terms {
            let (a, b) = m.split_at(head);
            if &b == tail {
                out.add_term(a, q);
            }
        }
        out
    }
}

impl fmt::Display for ArtinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.ring.num_vars();
        let mut first = true;
        for (m, q) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{q}")?;
            for (i, &e) in m.exponents(n).iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*t{}", i + 1)?,
                    _ => write!(f, "*t{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ArtinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &ArtinElement {
    type Output = ArtinElement;
    fn add(self, rhs: &ArtinElement) -> ArtinElement {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &ArtinElement {
    type Output = ArtinElement;
    fn sub(self, rhs: &ArtinElement) -> ArtinElement {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Mul for &ArtinElement {
    type Output = ArtinElement;
    fn mul(self, rhs: &ArtinElement) -> ArtinElement {
        self.try_mul(rhs).expect("ring mismatch in multiplication")
    }
}

impl Neg for &ArtinElement {
    type Output = ArtinElement;
    fn neg(self) -> ArtinElement {
        self.scale(&-Rational::one())
    }
}

/// Pair `A1 = Q[t]/t^(r+1) -> A2 = Q[t]/t^r` with principal kernel `(t^r)`.
#[derive(Clone, Debug)]
pub struct SmallExtension {
    pub total: Arc<ArtinRing>,
    pub quotient: Arc<ArtinRing>,
}

impl SmallExtension {
    pub fn project(&self, a: &ArtinElement) -> ArtinElement {
        a.reduce_into(&self.quotient)
    }

    /// Representative in `A1` of an element of `A2` (same coefficients).
    pub fn lift(&self, a: &ArtinElement) -> ArtinElement {
        a.reduce_into(&self.total)
    }

    /// Generator `t^r` of the kernel.
    pub fn kernel_generator(&self) -> ArtinElement {
        let r = self.quotient.truncation_order().expect("single block") as u8;
        ArtinElement::monomial(&self.total, Monomial::from_exponents(&[r]), Rational::one())
    }
}

pub fn small_extension_pair(r: u32) -> Result<SmallExtension> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("small extension needs r >= 2, got {r}")));
    }
    Ok(SmallExtension {
        total: ArtinRing::truncated(1, r + 1)?,
        quotient: ArtinRing::truncated(1, r)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(ring: &Arc<ArtinRing>, i: usize) -> ArtinElement {
        ArtinElement::var(ring, i)
    }

    #[test]
    fn truncated_products() {
        let a = ArtinRing::truncated(1, 3).unwrap();
        assert_eq!((&t(&a, 0) * &t(&a, 0)).to_string(), "1*t1^2");
        assert!((&t(&a, 0).pow(2) * &t(&a, 0)).is_zero());
    }

    #[test]
    fn two_variable_product() {
        let a = ArtinRing::truncated(2, 3).unwrap();
        let one = ArtinElement::one(&a);
        let x = &one + &t(&a, 0);
        let y = &one + &t(&a, 1);
        let expected = {
            let mut e = &(&one + &t(&a, 0)) + &t(&a, 1);
            e.add_assign(&(&t(&a, 0) * &t(&a, 1)));
            e
        };
        assert_eq!(&x * &y, expected);
        assert_eq!((&x * &y).to_string(), "1 + 1*t1 + 1*t2 + 1*t1*t2");
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = ArtinRing::truncated(1, 3).unwrap();
        let b = ArtinRing::truncated(1, 2).unwrap();
        assert!(matches!(t(&a, 0).try_mul(&t(&b, 0)), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn maximal_ideal_membership() {
        let a = ArtinRing::truncated(1, 2).unwrap();
        assert!(t(&a, 0).in_maximal_ideal());
        assert!(!(&ArtinElement::one(&a) + &t(&a, 0)).in_maximal_ideal());
        assert!(ArtinElement::zero(&a).in_maximal_ideal());
    }

    #[test]
    fn small_extension() {
        assert!(small_extension_pair(1).is_err());
        let ext = small_extension_pair(2).unwrap();
        let a1 = &ext.total;
        let x = &(&ArtinElement::one(a1) + &t(a1, 0)) + &t(a1, 0).pow(2);
        assert_eq!(ext.project(&x).to_string(), "1 + 1*t1");
        assert!((&ext.kernel_generator() * &t(a1, 0)).is_zero());
        let y = ext.project(&x);
        assert_eq!(ext.project(&ext.lift(&y)), y);
    }

    #[test]
    fn square_zero_blocks() {
        let base = ArtinRing::truncated(1, 3).unwrap();
        let big = base.with_square_zero(2);
        assert_eq!(big.num_vars(), 3);
        let s1 = t(&big, 1);
        assert!((&s1 * &s1).is_zero());
        let prod = &(&t(&big, 0) * &s1) * &t(&big, 2);
        let tail = Monomial::from_exponents(&[1, 1]);
        assert_eq!(prod.tail_coefficient(&base, &tail), t(&base, 0));
        assert_eq!(big.nilpotency_index(), 5);
    }

    #[test]
    fn monomial_enumeration() {
        let a = ArtinRing::truncated(2, 3).unwrap();
        assert_eq!(a.monomials().len(), 6);
        assert_eq!(ArtinRing::rationals().monomials().len(), 1);
        assert_eq!(ArtinRing::rationals().with_square_zero(3).monomials().len(), 8);
    }

    #[test]
    fn grlex_order() {
        let a = ArtinRing::truncated(2, 4).unwrap();
        let x = &(&t(&a, 1) + &t(&a, 0)) + &(&t(&a, 1) * &t(&a, 1));
        let x = &x + &ArtinElement::from_int(&a, 3);
        assert_eq!(x.to_string(), "3 + 1*t1 + 1*t2 + 1*t2^2");
    }
}

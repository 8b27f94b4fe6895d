//! Sparse multivariate polynomials over Q, used for invariant polynomials
//! written in the coordinates of a Lie algebra basis.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::artin::{ArtinElement, ArtinRing};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, q: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(vec![0; nvars], q);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Polynomial::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u8>, q: Rational) {
        assert_eq!(exps.len(), self.nvars);
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps.clone()).or_insert_with(Rational::zero);
        *slot += &q;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    /// Total degree when every term has the same degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().map(|&x| u32::from(x)).sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, q) in &other.terms {
            out.add_term(e.clone(), q.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (e, q) in &self.terms {
            out.add_term(e.clone(), q * c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (ea, qa) in &self.terms {
            for (eb, qb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, qa * qb);
            }
        }
        out
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, q) in &self.terms {
            let mut term = q.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term = &term * &x.pow(u32::from(k));
                }
            }
            acc += &term;
        }
        acc
    }

    /// Evaluation at a point with coordinates in an Artin ring.
    pub fn eval(&self, ring: &Arc<ArtinRing>, point: &[ArtinElement]) -> ArtinElement {
        assert_eq!(point.len(), self.nvars);
        let max_exp: Vec<u8> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<ArtinElement>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &m)| {
                let mut ps = vec![ArtinElement::one(ring)];
                for k in 1..=m as usize {
                    let next = &ps[k - 1] * x;
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc = ArtinElement::zero(ring);
        'terms: for (e, q) in &self.terms {
            let mut term = ArtinElement::constant(ring, q.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                    if term.is_zero() {
                        continue 'terms;
                    }
                }
            }
            acc.add_assign(&term);
        }
        acc
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, q)| {
                let mut s = q.to_string();
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => s.push_str(&format!("*{}", names[i])),
                        _ => s.push_str(&format!("*{}^{}", names[i], k)),
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }

    /// Parses `c*x^2*y - 1/2*z + ...` over the given variable names.
    pub fn parse(src: &str, names: &[String]) -> Result<Polynomial> {
        let err = |msg: String| Error::Parse { location: format!("polynomial `{src}`"), message: msg };
        let mut out = Polynomial::zero(names.len());
        let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err("empty expression".into()));
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !current.ends_with('^') {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        terms.push((negative, current));
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(err("dangling sign".into()));
            }
            let mut coeff = Rational::one();
            let mut exps = vec![0u8; names.len()];
            for factor in term.split('*') {
                let (base, power) = match factor.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u8>().map_err(|_| err(format!("bad exponent in `{factor}`")))?),
                    None => (factor, 1),
                };
                if let Some(i) = names.iter().position(|n| n == base) {
                    exps[i] += power;
                } else {
                    let q: Rational = base.parse().map_err(|_| err(format!("unknown symbol `{base}`")))?;
                    coeff = &coeff * &q.pow(u32::from(power));
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(exps, coeff);
        }
        Ok(out)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.to_string_with(&names))
    }
}

/// Square matrix with polynomial entries, used to build characteristic-polynomial
/// coefficients and trace powers symbolically.
#[derive(Clone, Debug)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zero(n: usize, nvars: usize) -> Self {
        PolyMatrix { n, entries: vec![Polynomial::zero(nvars); n * n] }
    }

    pub fn from_entries(n: usize, entries: Vec<Polynomial>) -> Self {
        assert_eq!(entries.len(), n * n);
        PolyMatrix { n, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        let n = self.n;
        let nvars = self.entries[0].nvars();
        let mut out = PolyMatrix::zero(n, nvars);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Polynomial::zero(nvars);
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.entries[i * n + j] = acc;
            }
        }
        out
    }

    pub fn add_scalar_identity(&self, c: &Polynomial) -> PolyMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] = out.entries[i * self.n + i].add(c);
        }
        out
    }

    pub fn trace(&self) -> Polynomial {
        let nvars = self.entries[0].nvars();
        (0..self.n).fold(Polynomial::zero(nvars), |acc, i| acc.add(self.get(i, i)))
    }

    /// Elementary symmetric functions `e_1..e_n` of the eigenvalues, i.e.
    /// `det(x - A) = sum_k (-1)^k e_k x^(n-k)`, via the Faddeev-LeVerrier recursion.
    pub fn char_poly_coefficients(&self) -> Vec<Polynomial> {
        let n = self.n;
        let nvars = self.entries[0].nvars();
        // c[n-k] coefficient of x^(n-k) in det(x - A)
        let mut coeffs = vec![Polynomial::constant(nvars, Rational::one())];
        let mut m = PolyMatrix::zero(n, nvars);
        for k in 1..=n {
            m = self.mul(&m).add_scalar_identity(coeffs.last().unwrap());
            let c = self.mul(&m).trace().scale(&Rational::new(-1, k as i64));
            coeffs.push(c);
        }
        (1..=n)
            .map(|k| if k % 2 == 0 { coeffs[k].clone() } else { coeffs[k].scale(&-Rational::one()) })
            .collect()
    }

    pub fn trace_power(&self, d: u32) -> Polynomial {
        assert!(d >= 1);
        let mut p = self.clone();
        for _ in 1..d {
            p = p.mul(self);
        }
        p.trace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn parse_and_evaluate() {
        let p = Polynomial::parse("x0*x1 - 1/2*x2^2 + 3", &names(3)).unwrap();
        let v = [Rational::from_int(2), Rational::from_int(5), Rational::from_int(2)];
        assert_eq!(p.eval_rational(&v), Rational::from_int(11));
        assert!(Polynomial::parse("x0 + y", &names(1)).is_err());
    }

    #[test]
    fn two_by_two_char_poly() {
        let vars = 4;
        let m = PolyMatrix::from_entries(2, (0..4).map(|i| Polynomial::var(vars, i)).collect());
        let c = m.char_poly_coefficients();
        assert_eq!(c[0], Polynomial::parse("x0 + x3", &names(4)).unwrap());
        assert_eq!(c[1], Polynomial::parse("x0*x3 - x1*x2", &names(4)).unwrap());
        assert_eq!(m.trace_power(2), Polynomial::parse("x0^2 + 2*x1*x2 + x3^2", &names(4)).unwrap());
    }

    #[test]
    fn homogeneity() {
        let p = Polynomial::parse("x0*x1 + x1^2", &names(2)).unwrap();
        assert_eq!(p.homogeneous_degree(), Some(2));
        let q = Polynomial::parse("x0*x1 + x1", &names(2)).unwrap();
        assert_eq!(q.homogeneous_degree(), None);
    }
}

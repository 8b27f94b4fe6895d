//! Finite-dimensional Lie algebras given by structure constants.
//!
//! Elements carry coefficients in an [`ArtinRing`]; plain rational elements
//! live over [`ArtinRing::rationals`]. The built-in `gl(n)` and `sl(n)` come
//! with their matrix realization and the degrees of the basic invariants.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::artin::{ArtinElement, ArtinRing};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Rational;

pub struct LieAlgebra {
    name: String,
    labels: Vec<String>,
    /// `brackets[i * dim + j]` lists the nonzero `(k, c_ij^k)`.
    brackets: Vec<Vec<(usize, Rational)>>,
    realization: Option<Vec<Matrix>>,
    /// Flattened realization matrices as columns, for reading off coordinates.
    coordinate_system: Option<Matrix>,
    degrees: Vec<u32>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra({}, dim {})", self.name, self.dim())
    }
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.labels == other.labels && self.brackets == other.brackets
    }
}

fn same_algebra(a: &Arc<LieAlgebra>, b: &Arc<LieAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl LieAlgebra {
    /// Builds an algebra from structure constants `[e_i, e_j] = sum_k c e_k`.
    ///
    /// Triples may be given for `i < j` only (the antisymmetric partner is
    /// filled in) or for both orders, in which case they must agree. Jacobi is
    /// checked exactly, as is the optional matrix realization.
    pub fn new(
        name: &str,
        labels: Vec<String>,
        triples: &[(usize, usize, usize, Rational)],
        realization: Option<Vec<Matrix>>,
        degrees: Vec<u32>,
    ) -> Result<Arc<LieAlgebra>> {
        let n = labels.len();
        let mut table = vec![vec![Rational::zero(); n]; n * n];
        let mut given = vec![false; n * n];
        for (i, j, k, c) in triples {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(Error::Validation(format!("structure constant index ({i},{j},{k}) out of range")));
            }
            if i == j && !c.is_zero() {
                return Err(Error::Validation(format!("[e{i}, e{i}] must vanish")));
            }
            table[i * n + j][k] += c;
            given[i * n + j] = true;
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (i * n + j, j * n + i);
                match (given[a], given[b]) {
                    (true, false) => {
                        let neg: Vec<Rational> = table[a].iter().map(|c| -c).collect();
                        table[b] = neg;
                        given[b] = true;
                    }
                    (true, true) if i < j => {
                        if table[a].iter().zip(&table[b]).any(|(x, y)| !(x + y).is_zero()) {
                            return Err(Error::Validation(format!(
                                "structure constants not antisymmetric in ({i},{j})"
                            )));
                        }
                    }
                    _ => {}
                }
            }
        }
        let brackets = table
            .into_iter()
            .map(|row| row.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
            .collect();
        let coordinate_system = match &realization {
            Some(ms) => {
                if ms.len() != n {
                    return Err(Error::Validation(format!("realization has {} matrices, expected {n}", ms.len())));
                }
                let s = ms[0].rows();
                if ms.iter().any(|m| m.rows() != s || m.cols() != s) {
                    return Err(Error::Validation("realization matrices must be square of equal size".into()));
                }
                let cols: Vec<Vec<Rational>> = ms
                    .iter()
                    .map(|m| (0..s * s).map(|x| m.get(x / s, x % s).clone()).collect())
                    .collect();
                let sys = Matrix::from_columns(s * s, &cols);
                if sys.rank() != n {
                    return Err(Error::Validation("realization matrices are linearly dependent".into()));
                }
                Some(sys)
            }
            None => None,
        };
        let alg = LieAlgebra { name: name.to_string(), labels, brackets, realization, coordinate_system, degrees };
        alg.validate()?;
        Ok(Arc::new(alg))
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        // Jacobi on all basis triples
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = vec![Rational::zero(); n];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (m, x) in self.bracket_basis(a, b) {
                            for (l, y) in self.bracket_basis(*m, c) {
                                acc[*l] += &(x * y);
                            }
                        }
                    }
                    if acc.iter().any(|x| !x.is_zero()) {
                        return Err(Error::Validation(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        if let Some(ms) = &self.realization {
            for i in 0..n {
                for j in 0..n {
                    let comm = ms[i].mul(&ms[j]).sub(&ms[j].mul(&ms[i]));
                    let mut expected = Matrix::zeros(comm.rows(), comm.cols());
                    for (k, c) in self.bracket_basis(i, j) {
                        for r in 0..comm.rows() {
                            for s in 0..comm.cols() {
                                let v = expected.get(r, s) + &(c * ms[*k].get(r, s));
                                expected.set(r, s, v);
                            }
                        }
                    }
                    if comm != expected {
                        return Err(Error::Validation(format!(
                            "realization commutator [{}, {}] disagrees with the structure constants",
                            self.labels[i], self.labels[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds the structure constants from a faithful matrix realization.
    pub fn from_matrices(name: &str, labels: Vec<String>, matrices: Vec<Matrix>, degrees: Vec<u32>) -> Result<Arc<LieAlgebra>> {
        let n = matrices.len();
        let s = matrices[0].rows();
        let cols: Vec<Vec<Rational>> = matrices
            .iter()
            .map(|m| (0..s * s).map(|x| m.get(x / s, x % s).clone()).collect())
            .collect();
        let sys = Matrix::from_columns(s * s, &cols);
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let comm = matrices[i].mul(&matrices[j]).sub(&matrices[j].mul(&matrices[i]));
                let flat: Vec<Rational> = (0..s * s).map(|x| comm.get(x / s, x % s).clone()).collect();
                let coords = sys
                    .solve(&flat)
                    .ok_or_else(|| Error::Validation("matrix span is not closed under commutators".into()))?;
                for (k, c) in coords.into_iter().enumerate() {
                    if !c.is_zero() {
                        triples.push((i, j, k, c));
                    }
                }
            }
        }
        LieAlgebra::new(name, labels, &triples, Some(matrices), degrees)
    }

    /// `gl(n)`: basis `E_ij` in row-major order, invariant degrees `1..n`.
    pub fn gl(n: usize) -> Result<Arc<LieAlgebra>> {
        if n < 1 {
            return Err(Error::InvalidArgument("gl(n) needs n >= 1".into()));
        }
        let mut labels = Vec::new();
        let mut mats = Vec::new();
        for i in 0..n {
            for j in 0..n {
                labels.push(format!("E{}{}", i + 1, j + 1));
                let mut m = Matrix::zeros(n, n);
                m.set(i, j, Rational::one());
                mats.push(m);
            }
        }
        LieAlgebra::from_matrices(&format!("gl{n}"), labels, mats, (1..=n as u32).collect())
    }

    /// `sl(n)`: off-diagonal `E_ij` (row-major) followed by `H_i = E_ii - E_(i+1)(i+1)`;
    /// for `n = 2` the basis is `(e, f, h)`. Invariant degrees `2..n`.
    pub fn sl(n: usize) -> Result<Arc<LieAlgebra>> {
        if n < 2 {
            return Err(Error::InvalidArgument("sl(n) needs n >= 2".into()));
        }
        let mut labels = Vec::new();
        let mut mats = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    labels.push(format!("E{}{}", i + 1, j + 1));
                    let mut m = Matrix::zeros(n, n);
                    m.set(i, j, Rational::one());
                    mats.push(m);
                }
            }
        }
        for i in 0..n - 1 {
            labels.push(format!("H{}", i + 1));
            let mut m = Matrix::zeros(n, n);
            m.set(i, i, Rational::one());
            m.set(i + 1, i + 1, -Rational::one());
            mats.push(m);
        }
        if n == 2 {
            labels = vec!["e".into(), "f".into(), "h".into()];
        }
        LieAlgebra::from_matrices(&format!("sl{n}"), labels, mats, (2..=n as u32).collect())
    }

    /// Resolves `gl2`, `sl3`, `gl(2)`, `sl(3)` style names.
    pub fn builtin(name: &str) -> Result<Arc<LieAlgebra>> {
        let cleaned: String = name.chars().filter(|c| !matches!(c, '(' | ')' | ' ')).collect();
        let bad = || Error::InvalidArgument(format!("unsupported algebra `{name}` (expected gl<n> or sl<n>)"));
        if cleaned.len() < 3 {
            return Err(bad());
        }
        let (family, n) = cleaned.split_at(2);
        let n: usize = n.parse().map_err(|_| bad())?;
        match family {
            "gl" => LieAlgebra::gl(n),
            "sl" => LieAlgebra::sl(n),
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Degrees `d_i` of the basic invariants, ascending (empty when unknown).
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn realization(&self) -> Option<&[Matrix]> {
        self.realization.as_deref()
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.brackets[i * self.dim() + j]
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.bracket_basis(i, j)
            .iter()
            .find(|(m, _)| *m == k)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.iter().all(Vec::is_empty)
    }

    /// Coordinates of a matrix in the realization basis.
    pub fn coordinates_of(&self, m: &Matrix) -> Result<Vec<Rational>> {
        let sys = self
            .coordinate_system
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("{} has no matrix realization", self.name)))?;
        let s = m.rows();
        let flat: Vec<Rational> = (0..s * m.cols()).map(|x| m.get(x / s, x % s).clone()).collect();
        if flat.len() != sys.rows() {
            return Err(Error::InvalidArgument("matrix size does not match the realization".into()));
        }
        sys.solve(&flat)
            .ok_or_else(|| Error::InvalidArgument(format!("matrix is not in the span of {}", self.name)))
    }

    /// Matrix of `ad x` for a rational element (column `j` is `[x, e_j]`).
    pub fn ad_matrix(&self, x: &[Rational]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, c) in self.bracket_basis(i, j) {
                    let v = m.get(*k, j) + &(xi * c);
                    m.set(*k, j, v);
                }
            }
        }
        m
    }

    /// Loads an algebra (and any declared invariant polynomials) from a TOML spec file.
    pub fn load_spec(path: &Path) -> Result<(Arc<LieAlgebra>, Vec<InvariantSpec>)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            location: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_spec(&text, &path.display().to_string())
    }

    pub fn parse_spec(text: &str, origin: &str) -> Result<(Arc<LieAlgebra>, Vec<InvariantSpec>)> {
        let spec: AlgebraSpec = toml::from_str(text).map_err(|e| Error::Parse {
            location: origin.to_string(),
            message: e.to_string().trim().to_string(),
        })?;
        let at = |msg: String| Error::Parse { location: origin.to_string(), message: msg };
        if spec.basis.len() != spec.dim {
            return Err(at(format!("`basis` has {} labels but dim = {}", spec.basis.len(), spec.dim)));
        }
        let mut triples = Vec::new();
        for (n, t) in spec.brackets.iter().enumerate() {
            let c = t.value.to_rational().map_err(|e| at(format!("brackets[{n}]: {e}")))?;
            triples.push((t.i, t.j, t.k, c));
        }
        let realization = match &spec.realization {
            Some(ms) => {
                let mut out = Vec::new();
                for (n, m) in ms.iter().enumerate() {
                    let mut rows = Vec::new();
                    for row in m {
                        let r: std::result::Result<Vec<Rational>, Error> = row.iter().map(SpecNumber::to_rational).collect();
                        rows.push(r.map_err(|e| at(format!("realization[{n}]: {e}")))?);
                    }
                    out.push(Matrix::from_rows(rows));
                }
                Some(out)
            }
            None => None,
        };
        let mut degrees = spec.degrees.clone().unwrap_or_default();
        degrees.sort_unstable();
        let alg = LieAlgebra::new(&spec.name, spec.basis.clone(), &triples, realization, degrees)
            .map_err(|e| at(e.to_string()))?;
        Ok((alg, spec.invariants))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SpecNumber {
    Int(i64),
    Text(String),
}

impl SpecNumber {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            SpecNumber::Int(n) => Ok(Rational::from_int(*n)),
            SpecNumber::Text(s) => s.parse(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct BracketTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: SpecNumber,
}

#[derive(Debug, Clone, Deserialize)]
pub struct InvariantSpec {
    pub label: String,
    pub degree: u32,
    pub expr: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraSpec {
    name: String,
    dim: usize,
    basis: Vec<String>,
    #[serde(default)]
    brackets: Vec<BracketTriple>,
    realization: Option<Vec<Vec<Vec<SpecNumber>>>>,
    degrees: Option<Vec<u32>>,
    #[serde(default)]
    invariants: Vec<InvariantSpec>,
}

/// Element of `g (x) A`.
#[derive(Clone, PartialEq)]
pub struct LieElement {
    algebra: Arc<LieAlgebra>,
    ring: Arc<ArtinRing>,
    coeffs: Vec<ArtinElement>,
}

impl LieElement {
    pub fn zero(algebra: &Arc<LieAlgebra>, ring: &Arc<ArtinRing>) -> Self {
        LieElement {
            algebra: algebra.clone(),
            ring: ring.clone(),
            coeffs: vec![ArtinElement::zero(ring); algebra.dim()],
        }
    }

    pub fn basis(algebra: &Arc<LieAlgebra>, ring: &Arc<ArtinRing>, i: usize) -> Self {
        let mut x = LieElement::zero(algebra, ring);
        x.coeffs[i] = ArtinElement::one(ring);
        x
    }

    pub fn from_coeffs(algebra: &Arc<LieAlgebra>, ring: &Arc<ArtinRing>, coeffs: Vec<ArtinElement>) -> Result<Self> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                algebra.dim(),
                coeffs.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| c.ring() != ring) {
            return Err(Error::RingMismatch(ring.describe(), bad.ring().describe()));
        }
        Ok(LieElement { algebra: algebra.clone(), ring: ring.clone(), coeffs })
    }

    /// Rational element (over the ring Q).
    pub fn from_rationals(algebra: &Arc<LieAlgebra>, coeffs: &[Rational]) -> Self {
        assert_eq!(coeffs.len(), algebra.dim());
        let q = ArtinRing::rationals();
        LieElement {
            algebra: algebra.clone(),
            ring: q.clone(),
            coeffs: coeffs.iter().map(|c| ArtinElement::constant(&q, c.clone())).collect(),
        }
    }

    pub fn from_ints(algebra: &Arc<LieAlgebra>, coeffs: &[i64]) -> Self {
        let qs: Vec<Rational> = coeffs.iter().map(|&c| Rational::from_int(c)).collect();
        LieElement::from_rationals(algebra, &qs)
    }

    /// Rational element with the given matrix in the realization.
    pub fn from_matrix(algebra: &Arc<LieAlgebra>, m: &Matrix) -> Result<Self> {
        let c = algebra.coordinates_of(m)?;
        Ok(LieElement::from_rationals(algebra, &c))
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn ring(&self) -> &Arc<ArtinRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[ArtinElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &ArtinElement {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ArtinElement::is_zero)
    }

    pub fn in_maximal_ideal(&self) -> bool {
        self.coeffs.iter().all(ArtinElement::in_maximal_ideal)
    }

    /// Constant coefficients (the image in `g` modulo `m_A`).
    pub fn residue(&self) -> Vec<Rational> {
        self.coeffs.iter().map(ArtinElement::constant_term).collect()
    }

    fn check_compatible(&self, other: &LieElement) -> Result<()> {
        if !same_algebra(&self.algebra, &other.algebra) {
            return Err(Error::AlgebraMismatch(self.algebra.name.clone(), other.algebra.name.clone()));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.describe(), other.ring.describe()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &LieElement) -> Result<LieElement> {
        self.check_compatible(other)?;
        Ok(self.add(other))
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        LieElement { algebra: self.algebra.clone(), ring: self.ring.clone(), coeffs }
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        LieElement { algebra: self.algebra.clone(), ring: self.ring.clone(), coeffs }
    }

    pub fn neg(&self) -> LieElement {
        self.scale_rational(&-Rational::one())
    }

    pub fn scale_rational(&self, c: &Rational) -> LieElement {
        let coeffs = self.coeffs.iter().map(|a| a.scale(c)).collect();
        LieElement { algebra: self.algebra.clone(), ring: self.ring.clone(), coeffs }
    }

    pub fn scale(&self, c: &ArtinElement) -> LieElement {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        LieElement { algebra: self.algebra.clone(), ring: self.ring.clone(), coeffs }
    }

    /// Same coefficients read in a ring extending this one.
    pub fn embed(&self, ring: &Arc<ArtinRing>) -> LieElement {
        LieElement {
            algebra: self.algebra.clone(),
            ring: ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c.embed(ring)).collect(),
        }
    }

    /// Coefficients re-read (and truncated) in a ring with the same variables.
    pub fn reduce_into(&self, ring: &Arc<ArtinRing>) -> LieElement {
        LieElement {
            algebra: self.algebra.clone(),
            ring: ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c.reduce_into(ring)).collect(),
        }
    }

    pub fn try_bracket(&self, other: &LieElement) -> Result<LieElement> {
        self.check_compatible(other)?;
        Ok(self.bracket(other))
    }

    /// Bilinear extension of the structure constants; panics on mismatched inputs.
    pub fn bracket(&self, other: &LieElement) -> LieElement {
        debug_assert!(self.check_compatible(other).is_ok());
        let n = self.algebra.dim();
        let mut out = vec![ArtinElement::zero(&self.ring); n];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let table = self.algebra.bracket_basis(i, j);
                if table.is_empty() {
                    continue;
                }
                let xy = x * y;
                if xy.is_zero() {
                    continue;
                }
                for (k, c) in table {
                    out[*k].add_scaled(c, &xy);
                }
            }
        }
        LieElement { algebra: self.algebra.clone(), ring: self.ring.clone(), coeffs: out }
    }

    /// `e^{ad lambda}(x) = sum_j (ad lambda)^j (x) / j!` for `lambda` in `g (x) m_A`.
    pub fn exp_ad(lambda: &LieElement, x: &LieElement) -> Result<LieElement> {
        lambda.check_compatible(x)?;
        if !lambda.in_maximal_ideal() {
            return Err(Error::NotInMaximalIdeal(lambda.to_string()));
        }
        let mut acc = x.clone();
        let mut term = x.clone();
        for j in 1..lambda.ring.nilpotency_index() {
            term = lambda.bracket(&term).scale_rational(&Rational::new(1, i64::from(j)));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Entries of the realization matrix, over the coefficient ring.
    pub fn matrix_entries(&self) -> Result<Vec<Vec<ArtinElement>>> {
        let ms = self
            .algebra
            .realization()
            .ok_or_else(|| Error::InvalidArgument(format!("{} has no matrix realization", self.algebra.name)))?;
        let s = ms[0].rows();
        let mut out = vec![vec![ArtinElement::zero(&self.ring); s]; s];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (r, row) in out.iter_mut().enumerate() {
                for (t, entry) in row.iter_mut().enumerate() {
                    let m = ms[k].get(r, t);
                    if !m.is_zero() {
                        entry.add_scaled(m, c);
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .zip(self.algebra.labels())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, l)| format!("({c})*{l}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_bracket_matches_commutator() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let q = ArtinRing::rationals();
        let e = LieElement::basis(&sl2, &q, 0);
        let f = LieElement::basis(&sl2, &q, 1);
        let h = LieElement::basis(&sl2, &q, 2);
        assert_eq!(e.bracket(&f), h);
        assert!(e.bracket(&e).is_zero());
        assert_eq!(h.bracket(&e), e.scale_rational(&Rational::from_int(2)));
    }

    #[test]
    fn gl2_bracket_with_artin_coefficients() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let a = ArtinRing::truncated(1, 3).unwrap();
        let t = ArtinElement::var(&a, 0);
        let e11 = LieElement::basis(&gl2, &a, 0).scale(&t);
        let e12 = LieElement::basis(&gl2, &a, 1).scale(&t);
        let expected = LieElement::basis(&gl2, &a, 1).scale(&t.pow(2));
        assert_eq!(e11.bracket(&e12), expected);
    }

    #[test]
    fn exp_ad_examples() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let a2 = ArtinRing::truncated(1, 2).unwrap();
        let t = ArtinElement::var(&a2, 0);
        let lam = LieElement::basis(&sl2, &a2, 0).scale(&t);
        let h = LieElement::basis(&sl2, &a2, 2);
        let expected = h.sub(&LieElement::basis(&sl2, &a2, 0).scale(&t.scale(&Rational::from_int(2))));
        assert_eq!(LieElement::exp_ad(&lam, &h).unwrap(), expected);

        let a3 = ArtinRing::truncated(1, 3).unwrap();
        let t = ArtinElement::var(&a3, 0);
        let lam = LieElement::basis(&sl2, &a3, 0).scale(&t);
        let f = LieElement::basis(&sl2, &a3, 1);
        let expected = f
            .add(&LieElement::basis(&sl2, &a3, 2).scale(&t))
            .sub(&LieElement::basis(&sl2, &a3, 0).scale(&t.pow(2)));
        assert_eq!(LieElement::exp_ad(&lam, &f).unwrap(), expected);

        let zero = LieElement::zero(&sl2, &a3);
        assert_eq!(LieElement::exp_ad(&zero, &f).unwrap(), f);
    }

    #[test]
    fn exp_ad_rejects_units() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let a = ArtinRing::truncated(1, 2).unwrap();
        let lam = LieElement::basis(&sl2, &a, 0);
        let x = LieElement::basis(&sl2, &a, 1);
        assert!(matches!(LieElement::exp_ad(&lam, &x), Err(Error::NotInMaximalIdeal(_))));
    }

    #[test]
    fn builtin_metadata() {
        let sl2 = LieAlgebra::builtin("sl(2)").unwrap();
        assert_eq!((sl2.dim(), sl2.rank(), sl2.degrees()), (3, 1, &[2u32][..]));
        let gl2 = LieAlgebra::builtin("gl2").unwrap();
        assert_eq!((gl2.dim(), gl2.rank(), gl2.degrees()), (4, 2, &[1u32, 2][..]));
        let gl1 = LieAlgebra::gl(1).unwrap();
        assert!(gl1.is_abelian());
        assert_eq!(gl1.degrees(), &[1]);
        assert!(LieAlgebra::builtin("so3").is_err());
        assert!(LieAlgebra::sl(1).is_err());
    }

    #[test]
    fn spec_file_round_trip() {
        let text = r#"
name = "so3"
dim = 3
basis = ["x", "y", "z"]
brackets = [
  { i = 0, j = 1, k = 2, value = 1 },
  { i = 1, j = 2, k = 0, value = 1 },
  { i = 2, j = 0, k = 1, value = "1" },
]
degrees = [2]

[[invariants]]
label = "casimir"
degree = 2
expr = "x^2 + y^2 + z^2"
"#;
        let (alg, inv) = LieAlgebra::parse_spec(text, "inline").unwrap();
        assert_eq!(alg.dim(), 3);
        assert_eq!(alg.structure_constant(1, 0, 2), Rational::from_int(-1));
        assert_eq!(inv.len(), 1);
    }

    #[test]
    fn spec_file_rejects_jacobi_violation() {
        let text = r#"
name = "bad"
dim = 3
basis = ["x", "y", "z"]
brackets = [
  { i = 0, j = 1, k = 2, value = 1 },
  { i = 1, j = 2, k = 0, value = 1 },
  { i = 2, j = 0, k = 1, value = 2 },
  { i = 0, j = 2, k = 0, value = 1 },
]
"#;
        let err = LieAlgebra::parse_spec(text, "bad.toml").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }
}

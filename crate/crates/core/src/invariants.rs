//! Invariant polynomials on a Lie algebra, their polarisations, and exact
//! checkers for the identities those polarisations satisfy.
//!
//! The polarisation `P_{d,k}(p)(X_1..X_k; v)` is defined as the coefficient of
//! `s_1 * ... * s_k` in `p(v + sum s_i X_i)`; it is computed by evaluating `p`
//! over the coefficient ring extended by `k` square-zero variables, so the same
//! code serves rational and Artin-coefficient inputs.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::artin::{ArtinElement, ArtinRing, Monomial};
use crate::error::{Error, Result};
use crate::lie::{InvariantSpec, LieAlgebra, LieElement};
use crate::linalg::Matrix;
use crate::polynomial::{PolyMatrix, Polynomial};
use crate::rational::Rational;
use crate::sampling;

/// Number of random samples used by the construction-time validation gates.
const VALIDATION_SAMPLES: usize = 12;

#[derive(Clone)]
pub struct InvariantPolynomial {
    algebra: Arc<LieAlgebra>,
    degree: u32,
    poly: Polynomial,
    label: String,
}

impl fmt::Debug for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (degree {} on {})", self.label, self.degree, self.algebra.name())
    }
}

impl InvariantPolynomial {
    /// Validates homogeneity and infinitesimal invariance before accepting `poly`.
    pub fn new(algebra: &Arc<LieAlgebra>, label: &str, poly: Polynomial) -> Result<Self> {
        let p = Self::new_unchecked(algebra, label, poly)?;
        p.validate()?;
        Ok(p)
    }

    /// Skips the invariance gate; only the shape of `poly` is checked.
    pub fn new_unchecked(algebra: &Arc<LieAlgebra>, label: &str, poly: Polynomial) -> Result<Self> {
        if poly.nvars() != algebra.dim() {
            return Err(Error::Validation(format!(
                "{label}: polynomial has {} variables, algebra has dimension {}",
                poly.nvars(),
                algebra.dim()
            )));
        }
        let degree = poly
            .homogeneous_degree()
            .ok_or_else(|| Error::Validation(format!("{label}: polynomial is zero or not homogeneous")))?;
        Ok(InvariantPolynomial { algebra: algebra.clone(), degree, poly, label: label.to_string() })
    }

    pub fn from_spec(algebra: &Arc<LieAlgebra>, spec: &InvariantSpec) -> Result<Self> {
        let poly = Polynomial::parse(&spec.expr, algebra.labels())?;
        let p = Self::new(algebra, &spec.label, poly)?;
        if p.degree != spec.degree {
            return Err(Error::Validation(format!(
                "{}: declared degree {} but expression has degree {}",
                spec.label, spec.degree, p.degree
            )));
        }
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a2b_3c4d);
        for _ in 0..VALIDATION_SAMPLES {
            let x = sampling::lie_element(&mut rng, &self.algebra);
            let c = sampling::nonzero_rational(&mut rng);
            let lhs = self.eval(&x.scale_rational(&c));
            let rhs = self.eval(&x).scale(&c.pow(self.degree));
            if lhs != rhs {
                return Err(Error::Validation(format!("{}: not homogeneous of degree {}", self.label, self.degree)));
            }
            let v = sampling::lie_element(&mut rng, &self.algebra);
            if !check_lemma_invariance(self, &v, &x)? {
                return Err(Error::Validation(format!(
                    "{}: not infinitesimally invariant (P_(d,1)([X,v]; v) != 0 at X = {x}, v = {v})",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    /// `p(v)`, in `v`'s coefficient ring.
    pub fn eval(&self, v: &LieElement) -> ArtinElement {
        self.poly.eval(v.ring(), v.coeffs())
    }

    /// Characteristic-polynomial coefficients `e_1..e_s` of the realization,
    /// dropping those that vanish identically (e.g. the trace on `sl(n)`).
    pub fn char_poly_coefficients(algebra: &Arc<LieAlgebra>) -> Result<Vec<InvariantPolynomial>> {
        let m = symbolic_matrix(algebra)?;
        m.char_poly_coefficients()
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(k, p)| {
                let label = match k + 1 {
                    1 => "tr".to_string(),
                    d if d == m_size(algebra) => "det".to_string(),
                    d => format!("e{d}"),
                };
                InvariantPolynomial::new(algebra, &label, p)
            })
            .collect()
    }

    /// Trace powers `tr(A^d)` for `d = 1..=max_degree`, skipping identically zero ones.
    pub fn trace_powers(algebra: &Arc<LieAlgebra>, max_degree: u32) -> Result<Vec<InvariantPolynomial>> {
        let m = symbolic_matrix(algebra)?;
        (1..=max_degree)
            .map(|d| (d, m.trace_power(d)))
            .filter(|(_, p)| !p.is_zero())
            .map(|(d, p)| InvariantPolynomial::new(algebra, &format!("tr^{d}"), p))
            .collect()
    }
}

fn m_size(algebra: &LieAlgebra) -> usize {
    algebra.realization().map_or(0, |ms| ms[0].rows())
}

/// The realization matrix with entries linear in the basis coordinates.
fn symbolic_matrix(algebra: &Arc<LieAlgebra>) -> Result<PolyMatrix> {
    let ms = algebra
        .realization()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no matrix realization", algebra.name())))?;
    let s = ms[0].rows();
    let n = algebra.dim();
    let entries = (0..s * s)
        .map(|x| {
            let (r, c) = (x / s, x % s);
            let mut p = Polynomial::zero(n);
            for (k, m) in ms.iter().enumerate() {
                let mut e = vec![0u8; n];
                e[k] = 1;
                p.add_term(e, m.get(r, c).clone());
            }
            p
        })
        .collect();
    Ok(PolyMatrix::from_entries(s, entries))
}

/// The adjoint quotient `chi = (p_1, .., p_N)`, ordered by ascending degree.
#[derive(Clone, Debug)]
pub struct AdjointQuotient {
    components: Vec<InvariantPolynomial>,
}

impl AdjointQuotient {
    pub fn new(mut components: Vec<InvariantPolynomial>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::Validation("adjoint quotient needs at least one component".into()));
        };
        let alg = first.algebra.clone();
        if components.iter().any(|p| !Arc::ptr_eq(&p.algebra, &alg) && *p.algebra != *alg) {
            return Err(Error::Validation("components live on different algebras".into()));
        }
        components.sort_by_key(|p| p.degree);
        let degrees: Vec<u32> = components.iter().map(|p| p.degree).collect();
        if !alg.degrees().is_empty() && degrees != alg.degrees() {
            return Err(Error::Validation(format!(
                "component degrees {degrees:?} do not match the stored degrees {:?} of {}",
                alg.degrees(),
                alg.name()
            )));
        }
        Ok(AdjointQuotient { components })
    }

    /// Characteristic-polynomial coefficients, the default generators.
    pub fn char_poly(algebra: &Arc<LieAlgebra>) -> Result<Self> {
        AdjointQuotient::new(InvariantPolynomial::char_poly_coefficients(algebra)?)
    }

    /// Trace powers `tr(A^d)` for the algebra's stored degrees.
    pub fn trace_powers(algebra: &Arc<LieAlgebra>) -> Result<Self> {
        let max = algebra.degrees().iter().copied().max().unwrap_or(0);
        let ps = InvariantPolynomial::trace_powers(algebra, max)?;
        let keep: Vec<_> = ps.into_iter().filter(|p| algebra.degrees().contains(&p.degree)).collect();
        AdjointQuotient::new(keep)
    }

    pub fn components(&self) -> &[InvariantPolynomial] {
        &self.components
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.components[0].algebra
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.components.iter().map(|p| p.degree).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.components.iter().map(|p| p.degree).collect()
    }
}

/// `chi(v) = (p_1(v), .., p_N(v))` in `v`'s coefficient ring.
pub fn chi(q: &AdjointQuotient, v: &LieElement) -> Vec<ArtinElement> {
    q.components.iter().map(|p| p.eval(v)).collect()
}

fn check_inputs(p: &InvariantPolynomial, args: &[LieElement], v: &LieElement) -> Result<()> {
    for x in args.iter().chain(std::iter::once(v)) {
        if !Arc::ptr_eq(x.algebra(), &p.algebra) && **x.algebra() != *p.algebra {
            return Err(Error::AlgebraMismatch(p.algebra.name().into(), x.algebra().name().into()));
        }
        if x.ring() != v.ring() {
            return Err(Error::RingMismatch(v.ring().describe(), x.ring().describe()));
        }
    }
    Ok(())
}

/// `P_{d,k}(p)(X_1..X_k; v)`: coefficient of `s_1...s_k` in `p(v + sum s_i X_i)`.
pub fn polarize(p: &InvariantPolynomial, args: &[LieElement], v: &LieElement) -> Result<ArtinElement> {
    check_inputs(p, args, v)?;
    Ok(polarize_unchecked(p, args, v))
}

pub(crate) fn polarize_unchecked(p: &InvariantPolynomial, args: &[LieElement], v: &LieElement) -> ArtinElement {
    let base = v.ring();
    let k = args.len();
    if k as u32 > p.degree {
        return ArtinElement::zero(base);
    }
    if k == 0 {
        return p.eval(v);
    }
    let ring = base.with_square_zero(k);
    let nb = base.num_vars();
    let s: Vec<ArtinElement> = (0..k).map(|i| ArtinElement::var(&ring, nb + i)).collect();
    let point: Vec<ArtinElement> = (0..p.algebra.dim())
        .map(|c| {
            let mut x = v.coeff(c).embed(&ring);
            for (i, a) in args.iter().enumerate() {
                let ai = a.coeff(c);
                if !ai.is_zero() {
                    x.add_assign(&(&ai.embed(&ring) * &s[i]));
                }
            }
            x
        })
        .collect();
    let value = p.poly.eval(&ring, &point);
    value.tail_coefficient(base, &Monomial::from_exponents(&vec![1u8; k]))
}

/// Computes `P_{d,k}(p)(X; v)` both by direct coefficient extraction and as
/// `P_{d,d}(p)(v,..,v,X_1..X_k) / (d-k)!`, and fails if they differ.
pub fn polarize_full(p: &InvariantPolynomial, args: &[LieElement], v: &LieElement) -> Result<ArtinElement> {
    check_inputs(p, args, v)?;
    let d = p.degree as usize;
    let k = args.len();
    if k > d {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the degree {d}")));
    }
    let direct = polarize_unchecked(p, args, v);
    let mut full_args: Vec<LieElement> = vec![v.clone(); d - k];
    full_args.extend(args.iter().cloned());
    let zero = LieElement::zero(v.algebra(), v.ring());
    let via_full = polarize_unchecked(p, &full_args, &zero).scale(&Rational::inv_factorial((d - k) as u32));
    if direct != via_full {
        return Err(Error::Internal(format!(
            "polarisation routes disagree for {}: {direct} vs {via_full}",
            p.label
        )));
    }
    Ok(direct)
}

/// `p(v + X) - p(v) == sum_k P_{d,k}(p)(X,..,X; v) / k!`
pub fn check_taylor(p: &InvariantPolynomial, v: &LieElement, x: &LieElement) -> Result<bool> {
    Ok(taylor_sides(p, v, x, true)?.0)
}

/// Both sides of the Taylor identity; `with_factorials = false` drops the `1/k!` (sabotage).
pub fn taylor_sides(
    p: &InvariantPolynomial,
    v: &LieElement,
    x: &LieElement,
    with_factorials: bool,
) -> Result<(bool, ArtinElement, ArtinElement)> {
    check_inputs(p, &[x.clone()], v)?;
    let lhs = &p.eval(&v.add(x)) - &p.eval(v);
    let mut rhs = ArtinElement::zero(v.ring());
    for k in 1..=p.degree {
        let term = polarize_unchecked(p, &vec![x.clone(); k as usize], v);
        let c = if with_factorials { Rational::inv_factorial(k) } else { Rational::one() };
        rhs.add_scaled(&c, &term);
    }
    Ok((lhs == rhs, lhs, rhs))
}

/// `P_{d,1}(p)([X, v]; v) == 0`
pub fn check_lemma_invariance(p: &InvariantPolynomial, v: &LieElement, x: &LieElement) -> Result<bool> {
    check_inputs(p, &[x.clone()], v)?;
    Ok(polarize_unchecked(p, &[x.bracket(v)], v).is_zero())
}

/// Value of `P_{d,k}(p)([Y,v], X_1..X_{k-1}; v) + sum_i P_{d,k-1}(p)([Y,X_i], X_others; v)`.
pub fn funny_sum(
    p: &InvariantPolynomial,
    k: usize,
    y: &LieElement,
    xs: &[LieElement],
    v: &LieElement,
    second_sign: &Rational,
) -> Result<ArtinElement> {
    let d = p.degree as usize;
    if k < 2 || k > d {
        return Err(Error::InvalidArgument(format!("need 2 <= k <= d = {d}, got k = {k}")));
    }
    if xs.len() != k - 1 {
        return Err(Error::InvalidArgument(format!("expected {} arguments X_i, got {}", k - 1, xs.len())));
    }
    let mut all = xs.to_vec();
    all.push(y.clone());
    check_inputs(p, &all, v)?;
    let mut first_args = vec![y.bracket(v)];
    first_args.extend(xs.iter().cloned());
    let mut total = polarize_unchecked(p, &first_args, v);
    // the (1, k-2) unshuffles pick which X_i is bracketed with Y
    for i in 0..xs.len() {
        let mut args = vec![y.bracket(&xs[i])];
        args.extend(xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()));
        total.add_scaled(second_sign, &polarize_unchecked(p, &args, v));
    }
    Ok(total)
}

pub fn check_funny_identity(
    p: &InvariantPolynomial,
    k: usize,
    y: &LieElement,
    xs: &[LieElement],
    v: &LieElement,
) -> Result<bool> {
    Ok(funny_sum(p, k, y, xs, v, &Rational::one())?.is_zero())
}

type FormFn = dyn Fn(&[LieElement]) -> ArtinElement + Send + Sync;

/// A symmetric `d`-linear form on `g`, represented by an evaluation handle.
pub struct SymmetricForm {
    algebra: Arc<LieAlgebra>,
    degree: usize,
    eval: Box<FormFn>,
}

impl SymmetricForm {
    /// Wraps `eval`, rejecting it if random argument permutations change its value.
    pub fn new(algebra: &Arc<LieAlgebra>, degree: usize, eval: Box<FormFn>) -> Result<Self> {
        let form = SymmetricForm { algebra: algebra.clone(), degree, eval };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f0f0);
        for _ in 0..VALIDATION_SAMPLES {
            let args: Vec<LieElement> = (0..degree).map(|_| sampling::lie_element(&mut rng, algebra)).collect();
            let perm = sampling::permutation(&mut rng, degree);
            let permuted: Vec<LieElement> = perm.iter().map(|&i| args[i].clone()).collect();
            if form.eval(&args) != form.eval(&permuted) {
                return Err(Error::Validation("form is not symmetric under argument permutation".into()));
            }
        }
        Ok(form)
    }

    /// `P_{d,d}(p)`, the full polarisation of `p`.
    pub fn full_polarisation(p: &InvariantPolynomial) -> Result<Self> {
        let q = p.clone();
        SymmetricForm::new(
            &p.algebra,
            p.degree as usize,
            Box::new(move |args: &[LieElement]| {
                let zero = LieElement::zero(q.algebra(), args[0].ring());
                polarize_unchecked(&q, args, &zero)
            }),
        )
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, args: &[LieElement]) -> ArtinElement {
        assert_eq!(args.len(), self.degree);
        (self.eval)(args)
    }
}

/// Linear endomorphism of `g` used in the factorisation check.
#[derive(Clone, Debug)]
pub enum LinearMap {
    Identity,
    Zero,
    Ad(LieElement),
    Matrix(Matrix),
}

impl LinearMap {
    pub fn apply(&self, x: &LieElement) -> LieElement {
        match self {
            LinearMap::Identity => x.clone(),
            LinearMap::Zero => LieElement::zero(x.algebra(), x.ring()),
            LinearMap::Ad(y) => y.embed(x.ring()).bracket(x),
            LinearMap::Matrix(m) => {
                let n = x.algebra().dim();
                let coeffs = (0..n)
                    .map(|i| {
                        let mut acc = ArtinElement::zero(x.ring());
                        for j in 0..n {
                            acc.add_scaled(m.get(i, j), x.coeff(j));
                        }
                        acc
                    })
                    .collect();
                LieElement::from_coeffs(x.algebra(), x.ring(), coeffs).expect("consistent ring")
            }
        }
    }
}

/// How `F o (L (x) 1^(d-1))` acts on the diagonal before projecting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorReading {
    /// `L` acts as a derivation of `S^d`: one copy of `L` in each slot, summed.
    Derivation,
    /// `L` acts on the first slot only.
    SingleSlot,
}

#[derive(Clone, Debug)]
pub struct FactorCheck {
    pub oracle: ArtinElement,
    pub formula: ArtinElement,
}

impl FactorCheck {
    pub fn holds(&self) -> bool {
        self.oracle == self.formula
    }
}

/// Compares the `(d-k+1, 1, .., 1)` component of `F o L` at `v (x) X_1 (x) .. (x) X_(k-1)`,
/// extracted by brute-force coefficient counting, with the closed two-term formula.
pub fn check_factor_lemma(
    form: &SymmetricForm,
    map: &LinearMap,
    v: &LieElement,
    xs: &[LieElement],
    reading: FactorReading,
) -> Result<FactorCheck> {
    let d = form.degree;
    let k = xs.len() + 1;
    if k > d {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the degree {d}")));
    }
    if v.algebra().name() != form.algebra.name() {
        return Err(Error::AlgebraMismatch(form.algebra.name().into(), v.algebra().name().into()));
    }
    let base = v.ring();
    // oracle: expand F(.., L(w), ..) with w = v + sum s_i X_i and read off s_1..s_(k-1)
    let ring = base.with_square_zero(k - 1);
    let nb = base.num_vars();
    let mut w = v.embed(&ring);
    for (i, x) in xs.iter().enumerate() {
        w = w.add(&x.embed(&ring).scale(&ArtinElement::var(&ring, nb + i)));
    }
    let lw = map.apply(&w);
    let slots = match reading {
        FactorReading::Derivation => d,
        FactorReading::SingleSlot => 1,
    };
    let mut expanded = ArtinElement::zero(&ring);
    for slot in 0..slots {
        let mut args = vec![w.clone(); d];
        args[slot] = lw.clone();
        expanded.add_assign(&form.eval(&args));
    }
    let oracle = expanded.tail_coefficient(base, &Monomial::from_exponents(&vec![1u8; k - 1]));

    let fact = |n: usize| Rational::factorial(n as u32);
    let mut formula = ArtinElement::zero(base);
    let mut args = vec![map.apply(v)];
    args.extend(xs.iter().cloned());
    args.extend(std::iter::repeat(v.clone()).take(d - k));
    formula.add_scaled(&(fact(d) / fact(d - k)), &form.eval(&args));
    for i in 0..xs.len() {
        let mut args = vec![map.apply(&xs[i])];
        args.extend(xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()));
        args.extend(std::iter::repeat(v.clone()).take(d - k + 1));
        formula.add_scaled(&(fact(d) / fact(d - k + 1)), &form.eval(&args));
    }
    Ok(FactorCheck { oracle, formula })
}

/// The closed form `d!/(d-k)! tr(X_1 .. X_k v^(d-k))` for `p = tr(A^d)`, with the
/// `X_i` in the given order (`symmetrize = false`) or averaged over all orderings.
pub fn trace_power_closed_form(
    d: u32,
    xs: &[LieElement],
    v: &LieElement,
    symmetrize: bool,
) -> Result<Rational> {
    let to_mat = |x: &LieElement| -> Result<Matrix> {
        let entries = x.matrix_entries()?;
        Ok(Matrix::from_rows(
            entries.iter().map(|row| row.iter().map(ArtinElement::constant_term).collect()).collect(),
        ))
    };
    let k = xs.len();
    let mats: Vec<Matrix> = xs.iter().map(to_mat).collect::<Result<_>>()?;
    let vm = to_mat(v)?;
    let s = vm.rows();
    let mut vpow = Matrix::identity(s);
    for _ in 0..(d as usize - k) {
        vpow = vpow.mul(&vm);
    }
    let orders: Vec<Vec<usize>> = if symmetrize { permutations(k) } else { vec![(0..k).collect()] };
    let mut acc = Rational::zero();
    for ord in &orders {
        let mut prod = Matrix::identity(s);
        for &i in ord {
            prod = prod.mul(&mats[i]);
        }
        acc += &prod.mul(&vpow).trace();
    }
    let scale = Rational::factorial(d) / Rational::factorial(d - k as u32) / Rational::from_int(orders.len() as i64);
    Ok(acc * scale)
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// A random nonzero homogeneous polynomial that is not invariant (for negative controls).
pub fn coordinate_power(algebra: &Arc<LieAlgebra>, coord: usize, degree: u32) -> Result<InvariantPolynomial> {
    let mut e = vec![0u8; algebra.dim()];
    e[coord] = degree as u8;
    let mut poly = Polynomial::zero(algebra.dim());
    poly.add_term(e, Rational::one());
    InvariantPolynomial::new_unchecked(algebra, &format!("{}^{degree}", algebra.labels()[coord]), poly)
}

/// Random integer Lie element with a fixed RNG; convenience for callers that only
/// need one sample.
pub fn sample_element<R: Rng>(rng: &mut R, algebra: &Arc<LieAlgebra>, ring: &Arc<ArtinRing>) -> LieElement {
    sampling::lie_element(rng, algebra).embed(ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(alg: &Arc<LieAlgebra>, entries: &[i64]) -> LieElement {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, Rational::from_int(x));
        }
        LieElement::from_matrix(alg, &m).unwrap()
    }

    fn q(n: i64) -> ArtinElement {
        ArtinElement::from_int(&ArtinRing::rationals(), n)
    }

    fn det(alg: &Arc<LieAlgebra>) -> InvariantPolynomial {
        InvariantPolynomial::char_poly_coefficients(alg).unwrap().pop().unwrap()
    }

    #[test]
    fn trace_square_first_polarisation() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let tr2 = InvariantPolynomial::trace_powers(&gl2, 2).unwrap().pop().unwrap();
        let x = diag(&gl2, &[2, 3]);
        let v = diag(&gl2, &[1, 0]);
        assert_eq!(polarize(&tr2, &[x], &v).unwrap(), q(4));
    }

    #[test]
    fn zero_arguments_give_zero() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let p = det(&gl2);
        let v = diag(&gl2, &[1, 2]);
        let z = LieElement::zero(&gl2, &ArtinRing::rationals());
        assert!(polarize(&p, &[z.clone(), z], &v).unwrap().is_zero());
    }

    #[test]
    fn det_second_polarisation() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let p = det(&gl2);
        let x = diag(&gl2, &[1, -1]);
        assert_eq!(polarize(&p, &[x.clone(), x.clone()], &x).unwrap(), q(-2));
        assert!(polarize(&p, &[x.clone(), x.clone(), x.clone()], &x).unwrap().is_zero());
    }

    #[test]
    fn full_polarisation_route() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let p = det(&gl2);
        let id = diag(&gl2, &[1, 1]);
        let v = diag(&gl2, &[1, 2]);
        assert_eq!(polarize_full(&p, &[id], &v).unwrap(), q(3));
        assert_eq!(polarize_full(&p, &[], &v).unwrap(), p.eval(&v));
        // p(X) = P_dd(p)(X, .., X) / d!
        let x = diag(&gl2, &[3, -2]);
        let zero = LieElement::zero(&gl2, &ArtinRing::rationals());
        let full = polarize(&p, &[x.clone(), x.clone()], &zero).unwrap();
        assert_eq!(full.scale(&Rational::new(1, 2)), p.eval(&x));
    }

    #[test]
    fn chi_examples() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let chi_sl2 = AdjointQuotient::char_poly(&sl2).unwrap();
        assert_eq!(chi(&chi_sl2, &diag(&sl2, &[1, -1])), vec![q(-1)]);

        let gl2 = LieAlgebra::gl(2).unwrap();
        let chi_gl2 = AdjointQuotient::char_poly(&gl2).unwrap();
        let zero = LieElement::zero(&gl2, &ArtinRing::rationals());
        assert_eq!(chi(&chi_gl2, &zero), vec![q(0), q(0)]);

        let a = ArtinRing::truncated(1, 2).unwrap();
        let t = ArtinElement::var(&a, 0);
        let v = diag(&sl2, &[1, -1]).embed(&a).add(&LieElement::basis(&sl2, &a, 0).scale(&t));
        assert_eq!(chi(&chi_sl2, &v), vec![ArtinElement::from_int(&a, -1)]);
    }

    #[test]
    fn taylor_with_artin_increment() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let p = det(&gl2);
        let a = ArtinRing::truncated(1, 3).unwrap();
        let t = ArtinElement::var(&a, 0);
        let v = diag(&gl2, &[1, 1]).embed(&a);
        let x = diag(&gl2, &[1, 1]).embed(&a).scale(&t);
        let (ok, lhs, _) = taylor_sides(&p, &v, &x, true).unwrap();
        assert!(ok);
        let expected = &t.scale(&Rational::from_int(2)) + &t.pow(2);
        assert_eq!(lhs, expected);
        let zero = LieElement::zero(&gl2, &a);
        assert!(check_taylor(&p, &v, &zero).unwrap());
    }

    #[test]
    fn lemma_trivial_case() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let p = det(&sl2);
        let v = LieElement::from_ints(&sl2, &[1, 2, 3]);
        assert!(check_lemma_invariance(&p, &v, &v).unwrap());
    }

    #[test]
    fn non_invariant_polynomials_are_rejected() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let p = coordinate_power(&sl2, 0, 2).unwrap();
        let err = InvariantPolynomial::new(&sl2, "e^2", p.polynomial().clone()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn funny_rejects_bad_k() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let p = det(&sl2);
        let v = LieElement::from_ints(&sl2, &[1, 0, 1]);
        assert!(check_funny_identity(&p, 3, &v, &[v.clone(), v.clone()], &v).is_err());
        assert!(check_funny_identity(&p, 1, &v, &[], &v).is_err());
        let z = LieElement::zero(&sl2, &ArtinRing::rationals());
        assert!(check_funny_identity(&p, 2, &z, &[z.clone()], &z).unwrap());
    }

    #[test]
    fn factor_lemma_small_cases() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let p = det(&gl2);
        let form = SymmetricForm::full_polarisation(&p).unwrap();
        let v = LieElement::from_ints(&gl2, &[1, 2, -1, 3]);
        let x = LieElement::from_ints(&gl2, &[0, 1, 4, -2]);
        let zero_check = check_factor_lemma(&form, &LinearMap::Zero, &v, &[x.clone()], FactorReading::Derivation).unwrap();
        assert!(zero_check.holds() && zero_check.oracle.is_zero());
        let id = check_factor_lemma(&form, &LinearMap::Identity, &v, &[x.clone()], FactorReading::Derivation).unwrap();
        assert!(id.holds(), "{id:?}");
        assert!(!id.oracle.is_zero());
        let single = check_factor_lemma(&form, &LinearMap::Identity, &v, &[x], FactorReading::SingleSlot).unwrap();
        assert!(!single.holds());
    }

    #[test]
    fn non_symmetric_forms_are_rejected() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let err = SymmetricForm::new(
            &gl2,
            2,
            Box::new(|args: &[LieElement]| &args[0].coeff(0).clone() * args[1].coeff(1)),
        );
        assert!(err.is_err());
    }

    #[test]
    fn closed_form_readings() {
        let gl2 = LieAlgebra::gl(2).unwrap();
        let tr3 = InvariantPolynomial::trace_powers(&gl2, 3).unwrap().pop().unwrap();
        let x1 = LieElement::from_ints(&gl2, &[1, 2, 0, -1]);
        let x2 = LieElement::from_ints(&gl2, &[0, 1, 3, 2]);
        let v = LieElement::from_ints(&gl2, &[2, -1, 1, 1]);
        let exact = polarize(&tr3, &[x1.clone(), x2.clone()], &v).unwrap().constant_term();
        let sym = trace_power_closed_form(3, &[x1.clone(), x2.clone()], &v, true).unwrap();
        let ordered = trace_power_closed_form(3, &[x1.clone(), x2.clone()], &v, false).unwrap();
        assert_eq!(exact, sym);
        assert_ne!(exact, ordered);
        let k1 = trace_power_closed_form(3, &[x1.clone()], &v, false).unwrap();
        assert_eq!(polarize(&tr3, &[x1], &v).unwrap().constant_term(), k1);
    }
}

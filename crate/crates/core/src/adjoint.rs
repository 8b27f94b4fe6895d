//! The adjoint quotient as an L-infinity morphism.
//!
//! The source is `C = g (x) Q[e]/e^2 = g + g[-1]` with `d(a) = e [v, a]`, the
//! target the abelian dgla `Q^N[-1]`, and `h_k` sends `(a_1, b_1) ... (a_k, b_k)`
//! to `(P_{d_i,k}(p_i)(b_1, .., b_k; v))_i`.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::artin::{ArtinElement, ArtinRing};
use crate::error::{Error, Result};
use crate::graded::{self, Dgla, GradedElement, GradedSpace, LinftyMorphism, TableDgla};
use crate::invariants::{chi, polarize_unchecked, AdjointQuotient, InvariantPolynomial};
use crate::lie::{InvariantSpec, LieAlgebra, LieElement};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::report::SuiteEntry;
use crate::sampling;

/// An algebra named on the command line or in a model file: a built-in
/// (`sl2`, `gl3`, ..) or `spec:<path>`, resolved against `base_dir`.
pub fn load_algebra(reference: &str, base_dir: Option<&Path>) -> Result<(Arc<LieAlgebra>, Vec<InvariantSpec>)> {
    match reference.strip_prefix("spec:") {
        Some(path) => {
            let p = Path::new(path);
            let full = match base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p.to_path_buf(),
            };
            LieAlgebra::load_spec(&full)
        }
        None => LieAlgebra::builtin(reference)
            .map(|a| (a, Vec::new()))
            .map_err(|e| Error::Parse { location: format!("algebra `{reference}`"), message: e.to_string() }),
    }
}

/// Which generators of the invariant ring to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generators {
    CharPoly,
    TracePowers,
    /// The `[[invariants]]` of a spec file (char-poly coefficients if there are none).
    Declared,
}

impl FromStr for Generators {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "char-poly" => Ok(Generators::CharPoly),
            "trace-powers" => Ok(Generators::TracePowers),
            "declared" => Ok(Generators::Declared),
            _ => Err(Error::Parse {
                location: format!("invariants `{s}`"),
                message: "expected char-poly, trace-powers or declared".into(),
            }),
        }
    }
}

pub fn adjoint_quotient(algebra: &Arc<LieAlgebra>, declared: &[InvariantSpec], kind: Generators) -> Result<AdjointQuotient> {
    match kind {
        Generators::CharPoly => AdjointQuotient::char_poly(algebra),
        Generators::TracePowers => AdjointQuotient::trace_powers(algebra),
        Generators::Declared if declared.is_empty() => AdjointQuotient::char_poly(algebra),
        Generators::Declared => AdjointQuotient::new(
            declared.iter().map(|s| InvariantPolynomial::from_spec(algebra, s)).collect::<Result<Vec<_>>>()?,
        ),
    }
}

/// Choice of the base point `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasePoint {
    RegularSemisimple,
    RegularNilpotent,
    Zero,
    Coefficients(Vec<Rational>),
}

impl FromStr for BasePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular-ss" => Ok(BasePoint::RegularSemisimple),
            "regular-nilpotent" => Ok(BasePoint::RegularNilpotent),
            "zero" => Ok(BasePoint::Zero),
            _ => {
                let body = s.strip_prefix("coeffs:").ok_or_else(|| Error::Parse {
                    location: format!("--v {s}"),
                    message: "expected regular-ss, regular-nilpotent, zero or coeffs:<c1,c2,..>".into(),
                })?;
                let cs = body
                    .split(',')
                    .map(|c| {
                        c.trim().parse::<Rational>().map_err(|_| Error::Parse {
                            location: format!("--v {s}"),
                            message: format!("`{c}` is not a rational number"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(BasePoint::Coefficients(cs))
            }
        }
    }
}

impl BasePoint {
    pub fn name(&self) -> String {
        match self {
            BasePoint::RegularSemisimple => "regular-ss".into(),
            BasePoint::RegularNilpotent => "regular-nilpotent".into(),
            BasePoint::Zero => "zero".into(),
            BasePoint::Coefficients(cs) => {
                format!("coeffs:{}", cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            }
        }
    }

    /// The rational element of `g` this names. Regular semisimple is
    /// `diag(1, 2, .., n)` on `gl(n)` and a traceless diagonal with distinct
    /// entries on `sl(n)`; regular nilpotent is the principal Jordan block.
    pub fn resolve(&self, algebra: &Arc<LieAlgebra>) -> Result<LieElement> {
        let size = || {
            algebra
                .realization()
                .map(|ms| ms[0].rows())
                .ok_or_else(|| Error::InvalidArgument(format!("{} has no matrix realization; use --v coeffs:..", algebra.name())))
        };
        match self {
            BasePoint::Zero => Ok(LieElement::zero(algebra, &ArtinRing::rationals())),
            BasePoint::Coefficients(cs) => {
                if cs.len() != algebra.dim() {
                    return Err(Error::InvalidArgument(format!(
                        "--v needs {} coefficients for {}, got {}",
                        algebra.dim(),
                        algebra.name(),
                        cs.len()
                    )));
                }
                Ok(LieElement::from_rationals(algebra, cs))
            }
            BasePoint::RegularSemisimple => {
                let n = size()?;
                let mut m = Matrix::zeros(n, n);
                let traceless = algebra.realization().unwrap().iter().all(|x| x.trace().is_zero());
                for i in 0..n {
                    let entry = if !traceless {
                        (i + 1) as i64
                    } else if n % 2 == 1 {
                        (n as i64 - 1) / 2 - i as i64
                    } else {
                        n as i64 - 1 - 2 * i as i64
                    };
                    m.set(i, i, Rational::from_int(entry));
                }
                LieElement::from_matrix(algebra, &m)
            }
            BasePoint::RegularNilpotent => {
                let n = size()?;
                let mut m = Matrix::zeros(n, n);
                for i in 0..n.saturating_sub(1) {
                    m.set(i, i + 1, Rational::one());
                }
                LieElement::from_matrix(algebra, &m)
            }
        }
    }

    pub fn fixtures() -> [BasePoint; 3] {
        [BasePoint::RegularSemisimple, BasePoint::RegularNilpotent, BasePoint::Zero]
    }
}

/// `g (x) Q[e]/e^2` with differential `e ad v`: `C^0 = g`, `C^1 = e g`.
pub struct ToyHiggsDgla {
    algebra: Arc<LieAlgebra>,
    v: LieElement,
    inner: TableDgla,
}

impl ToyHiggsDgla {
    pub fn new(v: &LieElement) -> Result<Self> {
        if v.ring().num_vars() != 0 {
            return Err(Error::InvalidArgument("the base point must have rational coefficients".into()));
        }
        let algebra = v.algebra().clone();
        let n = algebra.dim();
        let labels: Vec<String> = (0..2 * n)
            .map(|i| if i < n { algebra.labels()[i].clone() } else { format!("e*{}", algebra.labels()[i - n]) })
            .collect();
        let degrees = (0..2 * n).map(|i| if i < n { 0 } else { 1 }).collect();
        let strata = (0..2 * n).map(|i| usize::from(i >= n)).collect();
        let id = format!("toy[{}; v={}]", algebra.name(), v.residue().iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
        let space = GradedSpace::new(&id, labels, degrees, vec!["C0".into(), "C1".into()], strata)?;
        let ad = algebra.ad_matrix(&v.residue());
        let diff = (0..2 * n)
            .map(|j| {
                if j < n {
                    (0..n).filter(|&k| !ad.get(k, j).is_zero()).map(|k| (n + k, ad.get(k, j).clone())).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in algebra.bracket_basis(i, j) {
                    triples.push((i, j, *k, c.clone()));
                    triples.push((i, n + j, n + *k, c.clone()));
                }
            }
        }
        let inner = TableDgla::new(&space, diff, &triples)?;
        Ok(ToyHiggsDgla { algebra, v: v.clone(), inner })
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn base_point(&self) -> &LieElement {
        &self.v
    }

    fn place(&self, x: &LieElement, offset: usize) -> GradedElement {
        let mut out = GradedElement::zero(self.space(), x.ring());
        for (i, c) in x.coeffs().iter().enumerate() {
            out.add_term(offset + i, c);
        }
        out
    }

    /// `(x, 0)` in degree 0.
    pub fn degree0(&self, x: &LieElement) -> GradedElement {
        self.place(x, 0)
    }

    /// `(0, x)` in degree 1.
    pub fn degree1(&self, x: &LieElement) -> GradedElement {
        self.place(x, self.algebra.dim())
    }

    fn part(&self, x: &GradedElement, offset: usize) -> LieElement {
        let n = self.algebra.dim();
        let coeffs = (0..n).map(|i| x.coeff(offset + i)).collect();
        LieElement::from_coeffs(&self.algebra, x.ring(), coeffs).expect("consistent ring")
    }

    pub fn degree0_part(&self, x: &GradedElement) -> LieElement {
        self.part(x, 0)
    }

    pub fn degree1_part(&self, x: &GradedElement) -> LieElement {
        self.part(x, self.algebra.dim())
    }
}

impl Dgla for ToyHiggsDgla {
    fn space(&self) -> &Arc<GradedSpace> {
        self.inner.space()
    }

    fn differential_basis(&self, i: usize) -> Vec<(usize, Rational)> {
        self.inner.differential_basis(i)
    }

    fn bracket_basis(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        self.inner.bracket_basis(i, j)
    }
}

/// `Q^N` in degree 1, zero differential and bracket.
pub struct ToyBaseDgla {
    inner: TableDgla,
}

impl ToyBaseDgla {
    pub fn new(q: &AdjointQuotient) -> Result<Self> {
        let labels: Vec<String> = q.components().iter().map(|p| format!("chi:{}", p.label())).collect();
        let n = labels.len();
        let space = GradedSpace::new(
            &format!("base[{}]", q.algebra().name()),
            labels,
            vec![1; n],
            vec!["B1".into()],
            vec![0; n],
        )?;
        Ok(ToyBaseDgla { inner: TableDgla::abelian(&space) })
    }

    pub fn rank(&self) -> usize {
        self.inner.space().dim()
    }

    pub fn vector(&self, values: &[ArtinElement], ring: &Arc<ArtinRing>) -> GradedElement {
        let mut out = GradedElement::zero(self.space(), ring);
        for (i, c) in values.iter().enumerate() {
            out.add_term(i, c);
        }
        out
    }
}

impl Dgla for ToyBaseDgla {
    fn space(&self) -> &Arc<GradedSpace> {
        self.inner.space()
    }

    fn differential_basis(&self, i: usize) -> Vec<(usize, Rational)> {
        self.inner.differential_basis(i)
    }

    fn bracket_basis(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        self.inner.bracket_basis(i, j)
    }
}

pub struct AdjointMorphism {
    source: ToyHiggsDgla,
    target: ToyBaseDgla,
    quotient: AdjointQuotient,
}

/// The morphism `h` for the given generators and base point.
pub fn build_adjoint_morphism(q: &AdjointQuotient, v: &LieElement) -> Result<AdjointMorphism> {
    if **v.algebra() != **q.algebra() {
        return Err(Error::AlgebraMismatch(q.algebra().name().into(), v.algebra().name().into()));
    }
    Ok(AdjointMorphism { source: ToyHiggsDgla::new(v)?, target: ToyBaseDgla::new(q)?, quotient: q.clone() })
}

impl AdjointMorphism {
    pub fn toy(&self) -> &ToyHiggsDgla {
        &self.source
    }

    pub fn base(&self) -> &ToyBaseDgla {
        &self.target
    }

    pub fn quotient(&self) -> &AdjointQuotient {
        &self.quotient
    }
}

impl LinftyMorphism for AdjointMorphism {
    fn source(&self) -> &dyn Dgla {
        &self.source
    }

    fn target(&self) -> &dyn Dgla {
        &self.target
    }

    fn max_arity(&self) -> usize {
        self.quotient.max_degree() as usize
    }

    fn taylor(&self, word: &[GradedElement]) -> GradedElement {
        let ring = word[0].ring().clone();
        let mut out = GradedElement::zero(self.target.space(), &ring);
        let bs: Vec<LieElement> = word.iter().map(|w| self.source.degree1_part(w)).collect();
        if bs.iter().any(LieElement::is_zero) {
            return out;
        }
        let v = self.source.v.embed(&ring);
        for (i, p) in self.quotient.components().iter().enumerate() {
            if word.len() as u32 <= p.degree() {
                out.add_term(i, &polarize_unchecked(p, &bs, &v));
            }
        }
        out
    }
}

/// Per-trial outcome of the `Def(h) = chi` check.
fn def_chi_trial(
    h: &AdjointMorphism,
    ring: &Arc<ArtinRing>,
    factorials: bool,
    rng: &mut sampling::SuiteRng,
) -> Result<[Option<String>; 4]> {
    let toy = h.toy();
    let alg = toy.algebra();
    let b = sampling::lie_element_over(rng, alg, ring, true);
    let x = toy.degree1(&b);
    let mc = graded::mc_set_check(toy, &x)?;
    let mc_out = (!mc).then(|| format!("b = {b} is not Maurer-Cartan"));

    let push = if factorials {
        graded::mc_pushforward(h, &x)?
    } else {
        let mut acc = GradedElement::zero(h.target.space(), ring);
        for k in 1..=h.max_arity() {
            acc.add_assign(&h.taylor(&vec![x.clone(); k]));
        }
        acc
    };
    let v = toy.base_point().embed(ring);
    let moved: Vec<ArtinElement> = chi(&h.quotient, &v.add(&b));
    let fixed: Vec<ArtinElement> = chi(&h.quotient, &v);
    let diff: Vec<ArtinElement> = moved.iter().zip(&fixed).map(|(a, c)| a - c).collect();
    let expected = h.base().vector(&diff, ring);
    let def_out = (push != expected).then(|| format!("b = {b}: pushforward {push} != chi(v+b) - chi(v) = {expected}"));

    let lambda = sampling::lie_element_over(rng, alg, ring, true);
    let gauged = graded::gauge_act(toy, &toy.degree0(&lambda), &x)?;
    let formula = LieElement::exp_ad(&lambda, &v.add(&b))?.sub(&v);
    let formula_out = (gauged != toy.degree1(&formula))
        .then(|| format!("lambda = {lambda}, b = {b}: gauge action {gauged} != e^(ad lambda)(v+b) - v = {formula}"));
    let push_gauged = graded::mc_pushforward(h, &gauged)?;
    let descent_out = (push_gauged != graded::mc_pushforward(h, &x)?)
        .then(|| format!("lambda = {lambda}, b = {b}: pushforward changes under the gauge action"));
    Ok([mc_out, def_out, formula_out, descent_out])
}

/// Samples `b` in `g (x) m_A` and checks that `(0, b)` is Maurer-Cartan, that its
/// pushforward is `chi(v+b) - chi(v)`, that the gauge action on it is
/// `e^(ad l)(v+b) - v`, and that the pushforward is gauge invariant.
/// `factorials = false` drops the `1/k!` from the pushforward.
pub fn verify_def_equals_chi(
    h: &AdjointMorphism,
    ring: &Arc<ArtinRing>,
    suite: &str,
    trials: usize,
    seed: u64,
    factorials: bool,
) -> Result<Vec<SuiteEntry>> {
    let id = h.toy().id().to_string();
    let stream = format!("{suite}/{id}/{}", ring.describe());
    let outcomes: Vec<[Option<String>; 4]> = (0..trials as u64)
        .into_par_iter()
        .map(|t| def_chi_trial(h, ring, factorials, &mut sampling::trial_rng(seed, &stream, t)))
        .collect::<Result<_>>()?;
    let names = ["mc", "def=chi", "gauge-formula", "gauge-descent"];
    Ok(names
        .iter()
        .enumerate()
        .map(|(n, name)| {
            SuiteEntry::new(suite, &id, name)
                .with_profile(ring.describe())
                .absorb(outcomes.iter().map(|o| o[n].clone()))
        })
        .collect())
}

/// `dim ker(ad v)`, computed directly on `g`.
pub fn centraliser_dimension(v: &LieElement) -> usize {
    let alg = v.algebra();
    alg.dim() - alg.ad_matrix(&v.residue()).rank()
}

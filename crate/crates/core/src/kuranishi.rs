//! Linear complements to `Im(ad v)` and order-by-order gauge normalisation
//! into them.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::artin::{ArtinElement, ArtinRing};
use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, LieElement};
use crate::linalg::{self, Matrix};
use crate::rational::Rational;
use crate::report::SuiteEntry;
use crate::sampling;

/// `g = Im(ad v) + K` with both bases in the algebra's coordinates.
#[derive(Clone, Debug)]
pub struct HullData {
    v: LieElement,
    ad: Matrix,
    image_basis: Vec<Vec<Rational>>,
    complement_basis: Vec<Vec<Rational>>,
    /// Columns: image basis, then complement basis.
    adapted: Matrix,
}

/// The image is spanned by the pivot columns of `ad v`; the complement is the
/// greedy extension by standard basis vectors in basis order.
pub fn compute_hull(v: &LieElement) -> Result<HullData> {
    if v.ring().num_vars() != 0 {
        return Err(Error::InvalidArgument("the base point must have rational coefficients".into()));
    }
    let alg = v.algebra();
    let n = alg.dim();
    let ad = alg.ad_matrix(&v.residue());
    let image_basis: Vec<Vec<Rational>> = ad.pivot_columns().into_iter().map(|j| ad.column(j)).collect();
    let units: Vec<Vec<Rational>> = (0..n).map(|i| linalg::unit(n, i)).collect();
    let complement_basis = linalg::extend_basis(n, &image_basis, &units);
    let mut cols = image_basis.clone();
    cols.extend(complement_basis.iter().cloned());
    let adapted = Matrix::from_columns(n, &cols);
    if adapted.determinant().is_zero() {
        return Err(Error::Internal("image and complement do not span g".into()));
    }
    Ok(HullData { v: v.clone(), ad, image_basis, complement_basis, adapted })
}

impl HullData {
    pub fn base_point(&self) -> &LieElement {
        &self.v
    }

    pub fn image_basis(&self) -> &[Vec<Rational>] {
        &self.image_basis
    }

    pub fn complement_basis(&self) -> &[Vec<Rational>] {
        &self.complement_basis
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        self.v.algebra()
    }

    /// `rank [image | K] == dim g` and `dim K == dim g - rank(ad v)`.
    pub fn is_direct_sum(&self) -> bool {
        let n = self.algebra().dim();
        self.adapted.rank() == n && self.complement_basis.len() == n - self.ad.rank()
    }

    /// The composite `K -> g -> g / Im(ad v)` is an isomorphism.
    pub fn tangent_map_is_bijective(&self) -> bool {
        let n = self.algebra().dim();
        let quotient_dim = n - self.ad.rank();
        let mut span = self.image_basis.clone();
        span.extend(self.complement_basis.iter().cloned());
        self.complement_basis.len() == quotient_dim && linalg::rank_of(n, &span) == n
    }

    /// Splits `c` into its image part and its `K` part.
    fn split(&self, c: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let coords = self.adapted.solve(c).expect("adapted basis is invertible");
        let r = self.image_basis.len();
        let n = c.len();
        let mut im = vec![Rational::zero(); n];
        let mut k = vec![Rational::zero(); n];
        for (j, x) in coords.iter().enumerate() {
            let col = if j < r { &self.image_basis[j] } else { &self.complement_basis[j - r] };
            let target = if j < r { &mut im } else { &mut k };
            for i in 0..n {
                target[i] += &(x * &col[i]);
            }
        }
        (im, k)
    }

    /// Whether every coefficient vector of `x` lies in `K`.
    pub fn in_complement(&self, x: &LieElement) -> bool {
        x.ring().monomials().iter().all(|m| {
            let c: Vec<Rational> = x.coeffs().iter().map(|a| a.coefficient(m)).collect();
            self.split(&c).0.iter().all(Rational::is_zero)
        })
    }
}

/// `log(e^x e^y)` through brackets of length four.
pub fn lie_bch(x: &LieElement, y: &LieElement) -> Result<LieElement> {
    if x.ring().nilpotency_index() > 5 {
        return Err(Error::InvalidArgument("BCH is truncated after degree four".into()));
    }
    let xy = x.bracket(y);
    Ok(x.add(y)
        .add(&xy.scale_rational(&Rational::new(1, 2)))
        .add(&x.bracket(&xy).scale_rational(&Rational::new(1, 12)))
        .sub(&y.bracket(&xy).scale_rational(&Rational::new(1, 12)))
        .sub(&y.bracket(&x.bracket(&xy)).scale_rational(&Rational::new(1, 24))))
}

/// Result of normalising one element.
#[derive(Clone, Debug)]
pub struct Normalisation {
    pub lambda: LieElement,
    pub normal_form: LieElement,
}

/// Finds `l` in `g (x) m_A` with `e^(ad l)(v + a) - v` in `K (x) m_A`, one
/// `t`-degree at a time: the image part `c` of the current degree-`j`
/// coefficient is removed by `l_j` solving `[v, l_j] = c` (free variables zero).
/// `correct = false` skips the solve.
pub fn normalise(hull: &HullData, a: &LieElement, correct: bool) -> Result<Normalisation> {
    if !a.in_maximal_ideal() {
        return Err(Error::NotInMaximalIdeal(a.to_string()));
    }
    let ring = a.ring().clone();
    let alg = hull.algebra().clone();
    let v = hull.v.embed(&ring);
    let monomials = ring.monomials();
    let top = monomials.iter().map(|m| m.degree()).max().unwrap_or(0);
    let mut lambda = LieElement::zero(&alg, &ring);
    let mut current = a.clone();
    for j in 1..=top {
        if !correct {
            break;
        }
        let mut step = LieElement::zero(&alg, &ring);
        for m in monomials.iter().filter(|m| m.degree() == j) {
            let c: Vec<Rational> = current.coeffs().iter().map(|x| x.coefficient(m)).collect();
            let (im, _) = hull.split(&c);
            if im.iter().all(Rational::is_zero) {
                continue;
            }
            let y = hull
                .ad
                .solve(&im)
                .ok_or_else(|| Error::Internal(format!("image component {im:?} is not in Im(ad v)")))?;
            let mono = ArtinElement::monomial(&ring, *m, Rational::one());
            step = step.add(&LieElement::from_rationals(&alg, &y).embed(&ring).scale(&mono));
        }
        if step.is_zero() {
            continue;
        }
        current = LieElement::exp_ad(&step, &v.add(&current))?.sub(&v);
        lambda = lie_bch(&step, &lambda)?;
    }
    Ok(Normalisation { lambda, normal_form: current })
}

/// One sampled normalisation, as reported by the `hull` subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct HullTrial {
    pub input: String,
    pub lambda: String,
    pub normal_form: String,
}

/// Checks the splitting, tangent bijectivity, and for random `a` that the
/// normal form lies in `K (x) m_A` and equals `e^(ad l)(v+a) - v` for the
/// accumulated `l`.
pub fn verify_hull_surjectivity(
    hull: &HullData,
    ring: &Arc<ArtinRing>,
    suite: &str,
    trials: usize,
    seed: u64,
    correct: bool,
) -> Result<(Vec<SuiteEntry>, Vec<HullTrial>)> {
    let alg = hull.algebra();
    let id = format!(
        "hull[{}; v={}]",
        alg.name(),
        hull.v.residue().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    let mut entries = Vec::new();
    let mut direct = SuiteEntry::new(suite, &id, "g=Im(ad v)+K");
    direct.record((!hull.is_direct_sum()).then(|| "image and complement do not split g".to_string()));
    entries.push(direct);
    let mut tangent = SuiteEntry::new(suite, &id, "tangent-bijection");
    tangent.record((!hull.tangent_map_is_bijective()).then(|| "K -> g/Im(ad v) is not bijective".to_string()));
    entries.push(tangent);

    let stream = format!("{suite}/{id}/{}", ring.describe());
    let results: Vec<(Option<String>, Option<String>, HullTrial)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = sampling::trial_rng(seed, &stream, t);
            let a = sampling::lie_element_over(&mut rng, alg, ring, true);
            let n = normalise(hull, &a, correct)?;
            let in_k = (!hull.in_complement(&n.normal_form))
                .then(|| format!("a = {a}: normal form {} leaves K", n.normal_form));
            let v = hull.v.embed(ring);
            let replay = LieElement::exp_ad(&n.lambda, &v.add(&a))?.sub(&v);
            let consistent = (replay != n.normal_form)
                .then(|| format!("a = {a}: e^(ad l)(v+a) - v = {replay} differs from {}", n.normal_form));
            let trial = HullTrial { input: a.to_string(), lambda: n.lambda.to_string(), normal_form: n.normal_form.to_string() };
            Ok((in_k, consistent, trial))
        })
        .collect::<Result<_>>()?;
    entries.push(
        SuiteEntry::new(suite, &id, "normal-form-in-K")
            .with_profile(ring.describe())
            .absorb(results.iter().map(|r| r.0.clone())),
    );
    entries.push(
        SuiteEntry::new(suite, &id, "gauge-replay")
            .with_profile(ring.describe())
            .absorb(results.iter().map(|r| r.1.clone())),
    );
    Ok((entries, results.into_iter().map(|r| r.2).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2_diag() -> LieElement {
        let sl2 = LieAlgebra::sl(2).unwrap();
        LieElement::from_ints(&sl2, &[0, 0, 1])
    }

    #[test]
    fn complements() {
        let sl2 = LieAlgebra::sl(2).unwrap();
        let hull = compute_hull(&LieElement::zero(&sl2, &ArtinRing::rationals())).unwrap();
        assert!(hull.image_basis().is_empty());
        assert_eq!(hull.complement_basis().len(), 3);

        let hull = compute_hull(&sl2_diag()).unwrap();
        assert_eq!(hull.complement_basis(), &[linalg::unit(3, 2)]);
        assert!(hull.is_direct_sum() && hull.tangent_map_is_bijective());

        let hull = compute_hull(&LieElement::from_ints(&sl2, &[1, 0, 0])).unwrap();
        assert_eq!(hull.complement_basis().len(), 1);
    }

    #[test]
    fn coboundary_direction_normalises_to_zero() {
        let hull = compute_hull(&sl2_diag()).unwrap();
        let a_ring = ArtinRing::truncated(1, 2).unwrap();
        let t = ArtinElement::var(&a_ring, 0);
        let sl2 = hull.algebra().clone();
        let a = LieElement::basis(&sl2, &a_ring, 0).scale(&t);
        assert!(normalise(&hull, &a, true).unwrap().normal_form.is_zero());
    }

    #[test]
    fn mixed_direction_keeps_h() {
        let hull = compute_hull(&sl2_diag()).unwrap();
        let ring = ArtinRing::truncated(1, 3).unwrap();
        let t = ArtinElement::var(&ring, 0);
        let sl2 = hull.algebra().clone();
        let a = LieElement::from_ints(&sl2, &[1, 0, 1]).embed(&ring).scale(&t);
        let n = normalise(&hull, &a, true).unwrap();
        assert!(hull.in_complement(&n.normal_form));
        assert_eq!(n.normal_form.coeff(2).homogeneous_part(1), t);
        let raw = normalise(&hull, &a, false).unwrap();
        assert!(!hull.in_complement(&raw.normal_form));
    }

    #[test]
    fn already_normal_input_is_untouched() {
        let hull = compute_hull(&sl2_diag()).unwrap();
        let ring = ArtinRing::truncated(2, 3).unwrap();
        let sl2 = hull.algebra().clone();
        let a = LieElement::basis(&sl2, &ring, 2).scale(&ArtinElement::var(&ring, 1));
        let n = normalise(&hull, &a, true).unwrap();
        assert!(n.lambda.is_zero());
        assert_eq!(n.normal_form, a);
    }

    #[test]
    fn sampled_surjectivity_on_sl3() {
        let sl3 = LieAlgebra::sl(3).unwrap();
        let mut m = Matrix::zeros(3, 3);
        m.set(0, 1, Rational::one());
        m.set(1, 2, Rational::one());
        let v = LieElement::from_matrix(&sl3, &m).unwrap();
        let hull = compute_hull(&v).unwrap();
        let ring = ArtinRing::truncated(1, 3).unwrap();
        let (entries, trials) = verify_hull_surjectivity(&hull, &ring, "t", 6, 4, true).unwrap();
        assert!(entries.iter().all(SuiteEntry::passed), "{entries:?}");
        assert_eq!(trials.len(), 6);
        let (bad, _) = verify_hull_surjectivity(&hull, &ring, "t", 6, 4, false).unwrap();
        assert!(!bad[2].passed());
    }
}

//! The covering group layer: SL(2,C) → SO⁺(1,3), the canonical boost `L(n)`,
//! and the little-group element `D(Λ,n) = L(n)⁻¹ Λ L(Λ⁻¹n)`.
//!
//! A four-vector is identified with the Hermitian matrix `X = x^μ σ_μ`, with
//! `σ_0 = 1` and the Pauli matrices; `det X = -x·x`. An element `A` acts as
//! `X ↦ A X A†`.

use nalgebra::{Matrix2, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::minkowski::{
    FourVector, LorentzTransform, Sampler, TimelikeUnitVector, CONSTRUCTION_TOL,
};

pub type Mat2 = Matrix2<Complex64>;
pub type CMat4 = Matrix4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `σ_μ` for `μ = 0..3`, with `σ_0` the identity.
pub fn sigma(mu: usize) -> Mat2 {
    match mu {
        0 => Mat2::new(ONE, ZERO, ZERO, ONE),
        1 => Mat2::new(ZERO, ONE, ONE, ZERO),
        2 => Mat2::new(ZERO, -I, I, ZERO),
        3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("sigma index {mu} out of range"),
    }
}

/// `x^μ σ_μ`.
pub fn vector_to_hermitian(x: &FourVector) -> Mat2 {
    (0..4).fold(Mat2::zeros(), |acc, mu| acc + sigma(mu) * Complex64::from(x[mu]))
}

/// Inverse of [`vector_to_hermitian`]: `x^μ = ½ tr(X σ_μ)`.
pub fn hermitian_to_vector(x: &Mat2) -> FourVector {
    FourVector(std::array::from_fn(|mu| 0.5 * (x * sigma(mu)).trace().re))
}

/// `‖A A† − 1‖∞`.
pub fn unitarity_residual(a: &Mat2) -> f64 {
    max_abs(&(a * a.adjoint() - Mat2::identity()))
}

pub(crate) fn max_abs<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<Complex64, R, C>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Inverse of a unimodular 2×2 matrix (its adjugate).
fn unimodular_inverse(a: &Mat2) -> Mat2 {
    Mat2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)])
}

/// An element of SL(2,C).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SL2CElement(Mat2);

impl SL2CElement {
    /// Accepts `m` when `|det m − 1| < 1e-10`.
    pub fn new(m: Mat2) -> Result<Self> {
        let det = m.determinant();
        if m.iter().any(|z| !z.is_finite()) || (det - ONE).norm() >= CONSTRUCTION_TOL {
            return Err(Error::NotUnimodular {
                det_re: det.re,
                det_im: det.im,
            });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Mat2) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    /// `exp(-i θ/2 a·σ)`, the spinor image of a rotation by `θ` about `a`.
    pub fn rotation(axis: &Vector3<f64>, angle: f64) -> Self {
        let a = axis.normalize();
        let (c, s) = ((0.5 * angle).cos(), (0.5 * angle).sin());
        let a_sigma = (1..4).fold(Mat2::zeros(), |acc, k| acc + sigma(k) * Complex64::from(a[k - 1]));
        Self(Mat2::identity() * Complex64::from(c) - a_sigma * (I * s))
    }

    /// `exp(ξ/2 d·σ)`, the spinor image of a boost with rapidity `ξ` along `d`.
    pub fn boost(direction: &Vector3<f64>, xi: f64) -> Self {
        let d = direction.normalize();
        let (c, s) = ((0.5 * xi).cosh(), (0.5 * xi).sinh());
        let d_sigma = (1..4).fold(Mat2::zeros(), |acc, k| acc + sigma(k) * Complex64::from(d[k - 1]));
        Self(Mat2::identity() * Complex64::from(c) + d_sigma * Complex64::from(s))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(unimodular_inverse(&self.0))
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn neg(&self) -> Self {
        Self(-self.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        unitarity_residual(&self.0) < tol
    }
}

/// An element of SU(2): unitary with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SU2Element(Mat2);

impl SU2Element {
    pub fn new(m: Mat2) -> Result<Self> {
        let el = SL2CElement::new(m)?;
        let residual = unitarity_residual(el.matrix());
        if residual >= CONSTRUCTION_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (residual {residual:e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Maximum of the unitarity and determinant residuals.
    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.0).max((self.0.determinant() - ONE).norm())
    }
}

impl From<SU2Element> for SL2CElement {
    fn from(u: SU2Element) -> Self {
        SL2CElement(u.0)
    }
}

/// `Λ(A)^μ_ν = ½ tr(σ_μ A σ_ν A†)`, so that `A (x·σ) A† = (Λx)·σ`.
pub fn spinor_to_lorentz(a: &SL2CElement) -> LorentzTransform {
    let m = a.matrix();
    let images: [Mat2; 4] = std::array::from_fn(|nu| m * sigma(nu) * m.adjoint());
    let lambda = Matrix4::from_fn(|mu, nu| 0.5 * (sigma(mu) * images[nu]).trace().re);
    LorentzTransform::from_matrix_unchecked(lambda)
}

/// Positive square root of a Hermitian positive-definite 2×2 matrix, from
/// `√M = (M + √det M) / √(tr M + 2√det M)`.
pub fn hermitian_sqrt(m: &Mat2) -> Result<Mat2> {
    let herm = max_abs(&(m - m.adjoint()));
    let tr = m.trace().re;
    let det = m.determinant().re;
    if herm > CONSTRUCTION_TOL * (1.0 + tr.abs()) || tr <= 0.0 || det <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let s = det.sqrt();
    let t = (tr + 2.0 * s).sqrt();
    Ok((m + Mat2::identity() * Complex64::from(s)) / Complex64::from(t))
}

/// The canonical (pure) boost `L(n)` carrying `n₀ = (1,0,0,0)` to `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalBoost {
    pub l: SL2CElement,
    pub n: TimelikeUnitVector,
}

impl CanonicalBoost {
    pub fn inverse(&self) -> SL2CElement {
        self.l.inverse()
    }
}

/// `L(n) = √N` with `N = n⁰ + nⁱσᵢ`, the unique Hermitian positive root.
pub fn boost_of(n: &TimelikeUnitVector) -> Result<CanonicalBoost> {
    let big_n = vector_to_hermitian(n.vector());
    let root = hermitian_sqrt(&big_n)?;
    Ok(CanonicalBoost {
        l: SL2CElement::from_matrix_unchecked(root),
        n: *n,
    })
}

/// `D(Λ,n) = L(n)⁻¹ A L(Λ(A)⁻¹ n)`.
pub fn wigner_little_group(a: &SL2CElement, n: &TimelikeUnitVector) -> Result<SU2Element> {
    let lambda_inv = spinor_to_lorentz(a).inverse();
    let n_back = n.transform(&lambda_inv);
    let l_n = boost_of(n)?;
    let l_back = boost_of(&n_back)?;
    let d = l_n.inverse().matrix() * a.matrix() * l_back.l.matrix();
    Ok(SU2Element(d))
}

/// Dirac (chiral basis) representation `S(Λ) = A ⊕ (A†)⁻¹`.
pub fn dirac_rep(a: &SL2CElement) -> CMat4 {
    let right = unimodular_inverse(&a.matrix().adjoint());
    block_diag(a.matrix(), &right)
}

pub(crate) fn block_diag(top: &Mat2, bottom: &Mat2) -> CMat4 {
    let mut s = CMat4::zeros();
    s.fixed_view_mut::<2, 2>(0, 0).copy_from(top);
    s.fixed_view_mut::<2, 2>(2, 2).copy_from(bottom);
    s
}

impl Sampler {
    /// Spinor counterpart of [`Sampler::lorentz`]: same draws, same law.
    pub fn sl2c(&mut self) -> SL2CElement {
        let axis = self.unit_vector3();
        let angle = self.angle();
        let dir = self.unit_vector3();
        let xi = self.rapidity();
        SL2CElement::rotation(&axis, angle).compose(&SL2CElement::boost(&dir, xi))
    }

    pub fn su2(&mut self) -> SL2CElement {
        let axis = self.unit_vector3();
        let angle = self.angle();
        SL2CElement::rotation(&axis, angle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::is_lorentz;
    use nalgebra::Vector4;

    fn c(re: f64) -> Complex64 {
        Complex64::from(re)
    }

    #[test]
    fn identity_maps_to_identity() {
        let l = spinor_to_lorentz(&SL2CElement::identity());
        assert_eq!(l.matrix(), &Matrix4::identity());
    }

    #[test]
    fn rotation_about_axis_three() {
        let theta = std::f64::consts::FRAC_PI_2;
        // exp(-iθσ₃/2) = diag(e^{-iθ/2}, e^{iθ/2})
        let a = SL2CElement::new(Mat2::new(
            Complex64::from_polar(1.0, -theta / 2.0),
            ZERO,
            ZERO,
            Complex64::from_polar(1.0, theta / 2.0),
        ))
        .unwrap();
        let l = spinor_to_lorentz(&a);
        // conjugating σ₁ gives cosθ σ₁ + sinθ σ₂: x̂ ↦ ŷ for θ = π/2
        let expected = Matrix4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, -1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        );
        assert!((l.matrix() - expected).abs().max() < 1e-15);
        assert_eq!(a, SL2CElement::rotation(&Vector3::z(), theta));
    }

    #[test]
    fn diagonal_boost_along_axis_three() {
        let xi: f64 = 0.9;
        let a = SL2CElement::new(Mat2::new(c((xi / 2.0).exp()), ZERO, ZERO, c((-xi / 2.0).exp()))).unwrap();
        let l = spinor_to_lorentz(&a);
        let mut expected = Matrix4::identity();
        expected[(0, 0)] = xi.cosh();
        expected[(3, 3)] = xi.cosh();
        expected[(0, 3)] = xi.sinh();
        expected[(3, 0)] = xi.sinh();
        assert!((l.matrix() - expected).abs().max() < 1e-14);
        assert!((l.matrix() - LorentzTransform::boost(&Vector3::z(), xi).matrix()).abs().max() < 1e-14);
    }

    #[test]
    fn rejects_non_unimodular() {
        let m = Mat2::identity() * c(2.0);
        assert!(matches!(SL2CElement::new(m), Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn covering_is_two_to_one_and_conjugation_holds() {
        let mut s = Sampler::new(3);
        for _ in 0..100 {
            let a = s.sl2c();
            let l = spinor_to_lorentz(&a);
            assert!(is_lorentz(l.matrix(), 1e-10));
            assert!((l.matrix() - spinor_to_lorentz(&a.neg()).matrix()).abs().max() < 1e-14);
            let x = s.four_vector(3.0);
            let lhs = a.matrix() * vector_to_hermitian(&x) * a.matrix().adjoint();
            let rhs = vector_to_hermitian(&l.apply(&x));
            assert!(max_abs(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn sampler_spinor_and_vector_draws_agree() {
        let mut a = Sampler::new(99);
        let mut b = Sampler::new(99);
        for _ in 0..20 {
            let l = spinor_to_lorentz(&a.sl2c());
            assert!((l.matrix() - b.lorentz().matrix()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn boost_of_rest_is_identity() {
        let b = boost_of(&TimelikeUnitVector::rest()).unwrap();
        assert!(max_abs(&(b.l.matrix() - Mat2::identity())) < 1e-15);
    }

    #[test]
    fn boost_of_axis_three_matches_eigendecomposition() {
        let xi: f64 = 1.3;
        let n = TimelikeUnitVector::from_rapidity(&Vector3::z(), xi);
        let b = boost_of(&n).unwrap();
        // N = diag(e^ξ, e^-ξ) is already diagonal; its positive root is diag(e^{ξ/2}, e^{-ξ/2}).
        let expected = Mat2::new(c((xi / 2.0).exp()), ZERO, ZERO, c((-xi / 2.0).exp()));
        assert!(max_abs(&(b.l.matrix() - expected)) < 1e-13);
    }

    #[test]
    fn boost_of_random_n_is_hermitian_unimodular_and_lands_on_n() {
        let mut s = Sampler::new(5);
        for _ in 0..200 {
            let n = s.timelike_unit();
            let b = boost_of(&n).unwrap();
            let l = b.l.matrix();
            assert!(max_abs(&(l - l.adjoint())) < 1e-14);
            assert!((l.determinant() - ONE).norm() < 1e-12);
            assert!(l[(0, 0)].re > 0.0 && l[(1, 1)].re > 0.0);
            let image = spinor_to_lorentz(&b.l).apply(&FourVector::time_axis());
            assert!(image.max_abs_diff(n.vector()) < 1e-10);
        }
    }

    #[test]
    fn little_group_examples() {
        let mut s = Sampler::new(8);
        let n = s.timelike_unit();
        let d = wigner_little_group(&SL2CElement::identity(), &n).unwrap();
        assert!(max_abs(&(d.matrix() - Mat2::identity())) < 1e-12);

        let r = s.su2();
        let d = wigner_little_group(&r, &TimelikeUnitVector::rest()).unwrap();
        assert!(max_abs(&(d.matrix() - r.matrix())) < 1e-14);

        for xi in [0.2, 1.0, 1.9] {
            let a = SL2CElement::boost(&Vector3::x(), 0.7);
            let n = TimelikeUnitVector::from_rapidity(&Vector3::x(), xi);
            let d = wigner_little_group(&a, &n).unwrap();
            assert!(max_abs(&(d.matrix() - Mat2::identity())) < 1e-12);
        }
    }

    #[test]
    fn little_group_is_su2_and_cocycle_holds() {
        let mut s = Sampler::new(13);
        for _ in 0..300 {
            let (a1, a2, n) = (s.sl2c(), s.sl2c(), s.timelike_unit());
            let d = wigner_little_group(&a1, &n).unwrap();
            assert!(d.residual() < 1e-10);
            let lhs = wigner_little_group(&a1.compose(&a2), &n).unwrap();
            let n_back = n.transform(&spinor_to_lorentz(&a1).inverse());
            let rhs = d.matrix() * wigner_little_group(&a2, &n_back).unwrap().matrix();
            assert!(max_abs(&(lhs.matrix() - rhs)) < 1e-10);
        }
    }

    #[test]
    fn homomorphism() {
        let mut s = Sampler::new(21);
        for _ in 0..200 {
            let (a, b) = (s.sl2c(), s.sl2c());
            let lhs = spinor_to_lorentz(&a.compose(&b));
            let rhs = spinor_to_lorentz(&a).compose(&spinor_to_lorentz(&b));
            assert!((lhs.matrix() - rhs.matrix()).abs().max() < 1e-10);
        }
    }

    #[test]
    fn dirac_rep_examples() {
        assert_eq!(dirac_rep(&SL2CElement::identity()), CMat4::identity());
        let mut s = Sampler::new(4);
        let r = s.su2();
        let sr = dirac_rep(&r);
        assert!(max_abs(&(sr * sr.adjoint() - CMat4::identity())) < 1e-14);

        let xi: f64 = 1.1;
        let b = SL2CElement::boost(&Vector3::z(), xi);
        let sb = dirac_rep(&b);
        assert!(max_abs(&(sb * sb.adjoint() - CMat4::identity())) > 0.1);
        // operator 2-norm of a diagonal matrix is its largest modulus
        let norm = sb.singular_values().max();
        assert!((norm - (xi / 2.0).exp()).abs() < 1e-12);
        let expected = Vector4::new((xi / 2.0).exp(), (-xi / 2.0).exp(), (-xi / 2.0).exp(), (xi / 2.0).exp());
        assert!((sb.diagonal().map(|z| z.re) - expected).abs().max() < 1e-14);
    }

    #[test]
    fn dirac_rep_is_a_homomorphism() {
        let mut s = Sampler::new(17);
        for _ in 0..100 {
            let (a, b) = (s.sl2c(), s.sl2c());
            let lhs = dirac_rep(&a.compose(&b));
            let rhs = dirac_rep(&a) * dirac_rep(&b);
            assert!(max_abs(&(lhs - rhs)) < 1e-10);
        }
    }
}

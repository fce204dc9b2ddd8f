//! Minkowski-space kernel: metric, four-vectors, Lorentz matrices, timelike
//! unit vectors and the projector onto the surface orthogonal to `n`.
//!
//! The metric is `g = diag(-1, +1, +1, +1)`, so a future timelike unit vector
//! satisfies `n·n = -1`, `n⁰ > 0`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal of the metric tensor.
pub const METRIC_DIAG: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Tolerance used when validating values at construction time.
pub const CONSTRUCTION_TOL: f64 = 1e-10;

/// Default maximal rapidity used by the random samplers.
pub const DEFAULT_MAX_RAPIDITY: f64 = 2.0;

/// The metric as a matrix. `g` is its own inverse.
pub fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::from(METRIC_DIAG))
}

/// A real four-vector with upper-index components `x^μ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self([t, x, y, z])
    }

    pub const fn zero() -> Self {
        Self([0.0; 4])
    }

    /// `(1, 0, 0, 0)`, the rest-frame timelike unit vector.
    pub const fn time_axis() -> Self {
        Self([1.0, 0.0, 0.0, 0.0])
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    pub fn from_parts(time: f64, spatial: &Vector3<f64>) -> Self {
        Self([time, spatial.x, spatial.y, spatial.z])
    }

    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self([v[0], v[1], v[2], v[3]])
    }

    /// Components with the index lowered, `x_μ = g_{μν} x^ν`.
    pub fn lower(&self) -> [f64; 4] {
        let mut out = self.0;
        out[0] = -out[0];
        out
    }

    /// Minkowski square `x·x`.
    pub fn square(&self) -> f64 {
        minkowski_dot(self, self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, mu: usize) -> &f64 {
        &self.0[mu]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, mu: usize) -> &mut f64 {
        &mut self.0[mu]
    }
}

impl Add for FourVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for FourVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for FourVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl Mul<f64> for FourVector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|c| c * rhs))
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [t, x, y, z] = self.0;
        write!(f, "({t}, {x}, {y}, {z})")
    }
}

/// `u^μ g_{μν} v^ν = -u⁰v⁰ + u·v`.
pub fn minkowski_dot(u: &FourVector, v: &FourVector) -> f64 {
    (0..4).map(|mu| METRIC_DIAG[mu] * u[mu] * v[mu]).sum()
}

/// A proper orthochronous Lorentz transformation `Λ^μ_ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzTransform {
    matrix: Matrix4<f64>,
}

impl LorentzTransform {
    /// Validates `m` at [`CONSTRUCTION_TOL`].
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        Self::with_tolerance(m, CONSTRUCTION_TOL)
    }

    pub fn with_tolerance(m: Matrix4<f64>, tol: f64) -> Result<Self> {
        if is_lorentz(&m, tol) {
            Ok(Self { matrix: m })
        } else {
            Err(Error::NotLorentz {
                residual: lorentz_residual(&m),
            })
        }
    }

    /// Wraps a matrix known to be Lorentz by construction.
    pub(crate) fn from_matrix_unchecked(m: Matrix4<f64>) -> Self {
        Self { matrix: m }
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    /// Pure boost along the unit 3-vector `direction` with rapidity `xi`.
    pub fn boost(direction: &Vector3<f64>, xi: f64) -> Self {
        let d = direction.normalize();
        let (ch, sh) = (xi.cosh(), xi.sinh());
        let mut m = Matrix4::identity();
        m[(0, 0)] = ch;
        for i in 0..3 {
            m[(0, i + 1)] = sh * d[i];
            m[(i + 1, 0)] = sh * d[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] += (ch - 1.0) * d[i] * d[j];
            }
        }
        Self { matrix: m }
    }

    /// Active spatial rotation by `angle` about the unit 3-vector `axis`.
    pub fn rotation(axis: &Vector3<f64>, angle: f64) -> Self {
        let r = rotation_matrix3(axis, angle);
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&r);
        Self { matrix: m }
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        FourVector::from_vector(&(self.matrix * v.as_vector()))
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix * other.matrix,
        }
    }

    /// `Λ⁻¹ = g Λᵀ g`.
    pub fn inverse(&self) -> Self {
        let g = metric();
        Self {
            matrix: g * self.matrix.transpose() * g,
        }
    }

    /// Mixed components `Λ_μ^ν = g_{μα} Λ^α_β g^{βν}`, i.e. `(Λ⁻¹)^ν_μ`.
    pub fn lowered_upper(&self) -> Matrix4<f64> {
        let g = metric();
        g * self.matrix * g
    }
}

/// Rodrigues rotation matrix.
pub fn rotation_matrix3(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

fn lorentz_residual(m: &Matrix4<f64>) -> f64 {
    let g = metric();
    (m.transpose() * g * m - g).abs().max()
}

/// True iff `‖MᵀgM − g‖∞ < tol`, `det M > 0` and `M⁰₀ ≥ 1` (up to `tol`).
pub fn is_lorentz(m: &Matrix4<f64>, tol: f64) -> bool {
    m.iter().all(|x| x.is_finite())
        && lorentz_residual(m) < tol
        && m.determinant() > 0.0
        && m[(0, 0)] >= 1.0 - tol
}

/// A future-pointing timelike unit vector, `n·n = -1`, `n⁰ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FourVector", into = "FourVector")]
pub struct TimelikeUnitVector(FourVector);

impl TimelikeUnitVector {
    /// Accepts `v` when `|v·v + 1| < 1e-10` and `v⁰ > 0`; the stored vector is
    /// renormalized so the invariant holds to rounding.
    pub fn new(v: FourVector) -> Result<Self> {
        let norm = v.square();
        if !v.is_finite() || (norm + 1.0).abs() >= CONSTRUCTION_TOL || v.time() <= 0.0 {
            return Err(Error::NotTimelikeUnit {
                norm,
                time: v.time(),
            });
        }
        Ok(Self(v * (1.0 / (-norm).sqrt())))
    }

    /// Normalizes any future timelike vector onto the unit hyperboloid.
    pub fn normalize(v: &FourVector) -> Result<Self> {
        let norm = v.square();
        if !v.is_finite() || norm >= 0.0 || v.time() <= 0.0 {
            return Err(Error::NotTimelikeUnit {
                norm,
                time: v.time(),
            });
        }
        Ok(Self(*v * (1.0 / (-norm).sqrt())))
    }

    pub fn rest() -> Self {
        Self(FourVector::time_axis())
    }

    /// `Λ n₀` for the boost with the given direction and rapidity.
    pub fn from_rapidity(direction: &Vector3<f64>, xi: f64) -> Self {
        if xi == 0.0 {
            return Self::rest();
        }
        let d = direction.normalize();
        Self(FourVector::from_parts(xi.cosh(), &(d * xi.sinh())))
    }

    pub fn vector(&self) -> &FourVector {
        &self.0
    }

    pub fn get(&self, mu: usize) -> f64 {
        self.0[mu]
    }

    pub fn lower(&self) -> [f64; 4] {
        self.0.lower()
    }

    /// Image under `Λ`, renormalized against rounding drift.
    pub fn transform(&self, lambda: &LorentzTransform) -> Self {
        let v = lambda.apply(&self.0);
        Self(v * (1.0 / (-v.square()).sqrt()))
    }

    /// Distance used to decide whether two vectors lie on the same leaf.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

impl TryFrom<FourVector> for TimelikeUnitVector {
    type Error = Error;
    fn try_from(v: FourVector) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TimelikeUnitVector> for FourVector {
    fn from(n: TimelikeUnitVector) -> Self {
        n.0
    }
}

/// Index placement of a [`Tensor2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexPlacement {
    /// `T^{μν}`
    Contravariant,
    /// `T^μ_ν`
    Mixed,
}

/// A rank-two tensor with its index placement recorded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor2 {
    pub matrix: Matrix4<f64>,
    pub placement: IndexPlacement,
}

impl Tensor2 {
    /// Lowers the second index of a contravariant tensor.
    pub fn to_mixed(&self) -> Tensor2 {
        match self.placement {
            IndexPlacement::Mixed => *self,
            IndexPlacement::Contravariant => Tensor2 {
                matrix: self.matrix * metric(),
                placement: IndexPlacement::Mixed,
            },
        }
    }
}

/// `π^{λμ} = g^{λμ} + n^λ n^μ`, the projector onto the surface orthogonal to `n`.
pub fn projector(n: &TimelikeUnitVector) -> Tensor2 {
    let v = n.vector().as_vector();
    Tensor2 {
        matrix: metric() + v * v.transpose(),
        placement: IndexPlacement::Contravariant,
    }
}

/// Samples of the rotation/boost parameter space. Rotation axes are uniform on
/// the sphere, angles uniform in `[0, 2π)` and rapidities uniform in
/// `[0, max_rapidity]`.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    max_rapidity: f64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self::with_max_rapidity(seed, DEFAULT_MAX_RAPIDITY)
    }

    pub fn with_max_rapidity(seed: u64, max_rapidity: f64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_rapidity,
        }
    }

    pub fn max_rapidity(&self) -> f64 {
        self.max_rapidity
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Standard normal deviate (Box-Muller).
    pub fn normal(&mut self) -> f64 {
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn unit_vector3(&mut self) -> Vector3<f64> {
        let z: f64 = self.rng.gen_range(-1.0..=1.0);
        let phi: f64 = self.rng.gen_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).max(0.0).sqrt();
        Vector3::new(r * phi.cos(), r * phi.sin(), z)
    }

    pub fn angle(&mut self) -> f64 {
        self.rng.gen_range(0.0..2.0 * PI)
    }

    pub fn rapidity(&mut self) -> f64 {
        if self.max_rapidity <= 0.0 {
            0.0
        } else {
            self.rng.gen_range(0.0..=self.max_rapidity)
        }
    }

    pub fn timelike_unit(&mut self) -> TimelikeUnitVector {
        let d = self.unit_vector3();
        let xi = self.rapidity();
        TimelikeUnitVector::from_rapidity(&d, xi)
    }

    /// Rotation composed with a boost, `R · B`.
    pub fn lorentz(&mut self) -> LorentzTransform {
        let axis = self.unit_vector3();
        let angle = self.angle();
        let dir = self.unit_vector3();
        let xi = self.rapidity();
        LorentzTransform::rotation(&axis, angle).compose(&LorentzTransform::boost(&dir, xi))
    }

    pub fn four_vector(&mut self, scale: f64) -> FourVector {
        FourVector(std::array::from_fn(|_| self.uniform(-scale, scale)))
    }
}

/// Deterministic random point on the unit hyperboloid.
pub fn random_timelike_unit(seed: u64) -> TimelikeUnitVector {
    Sampler::new(seed).timelike_unit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_examples() {
        let t = FourVector::time_axis();
        assert_eq!(minkowski_dot(&t, &t), -1.0);
        let l = FourVector::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(&l, &l), 0.0);
        let xi: f64 = 0.3;
        let b = FourVector::new(xi.cosh(), xi.sinh(), 0.0, 0.0);
        assert!((minkowski_dot(&b, &b) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_timelike_is_normalized_and_seeded() {
        for seed in 0..50 {
            let n = random_timelike_unit(seed);
            assert!((n.vector().square() + 1.0).abs() < 1e-12);
            assert!(n.get(0) > 0.0);
            assert_eq!(n, random_timelike_unit(seed));
        }
        assert_ne!(random_timelike_unit(1), random_timelike_unit(2));
        let d = Vector3::new(0.3, -0.2, 0.9);
        assert_eq!(TimelikeUnitVector::from_rapidity(&d, 0.0).vector(), &FourVector::time_axis());
    }

    #[test]
    fn rejects_non_timelike() {
        assert!(TimelikeUnitVector::new(FourVector::new(1.0, 1.0, 0.0, 0.0)).is_err());
        assert!(TimelikeUnitVector::new(FourVector::new(-1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(TimelikeUnitVector::new(FourVector::new(2.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn projector_at_rest_frame() {
        let p = projector(&TimelikeUnitVector::rest());
        assert_eq!(p.matrix, Matrix4::from_diagonal(&Vector4::new(0.0, 1.0, 1.0, 1.0)));
    }

    #[test]
    fn projector_annihilates_n_and_is_idempotent() {
        let mut s = Sampler::new(7);
        for _ in 0..100 {
            let n = s.timelike_unit();
            let pi = projector(&n);
            let nl = Vector4::from(n.lower());
            assert!((pi.matrix * nl).abs().max() < 1e-12);
            let m = pi.to_mixed().matrix;
            assert!((m * m - m).abs().max() < 1e-12 * m.abs().max().max(1.0));
        }
    }

    #[test]
    fn is_lorentz_examples() {
        assert!(is_lorentz(&Matrix4::identity(), 1e-12));
        let parity_z = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
        assert!(!is_lorentz(&parity_z, 1e-12));
        let xi: f64 = 0.7;
        let mut b = Matrix4::identity();
        b[(0, 0)] = xi.cosh();
        b[(1, 1)] = xi.cosh();
        b[(0, 1)] = xi.sinh();
        b[(1, 0)] = xi.sinh();
        assert!(is_lorentz(&b, 1e-12));
        assert_eq!(LorentzTransform::boost(&Vector3::x(), xi).matrix(), &b);
        let time_reversal = Matrix4::from_diagonal(&Vector4::new(-1.0, -1.0, 1.0, 1.0));
        assert!(!is_lorentz(&time_reversal, 1e-12));
    }

    #[test]
    fn sampled_transforms_preserve_metric_and_dot() {
        let mut s = Sampler::new(11);
        for _ in 0..200 {
            let l = s.lorentz();
            assert!(is_lorentz(l.matrix(), 1e-12), "{}", lorentz_residual(l.matrix()));
            let (u, v) = (s.four_vector(2.0), s.four_vector(2.0));
            let d0 = minkowski_dot(&u, &v);
            let d1 = minkowski_dot(&l.apply(&u), &l.apply(&v));
            assert!((d0 - d1).abs() < 1e-12, "{}", (d0 - d1).abs());
            let id = l.compose(&l.inverse());
            assert!((id.matrix() - Matrix4::identity()).abs().max() < 1e-10);
        }
    }
}

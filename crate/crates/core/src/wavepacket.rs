//! One-particle wavefunctions `ψ_{n,σ}(x)` labelled by a timelike `n`.
//!
//! Gaussian packets are transported analytically: the family is closed under
//! `ψ'(x) = D(Λ, n') ψ(Λ⁻¹x)` with `n' = Λn`, and since `D` does not depend
//! on momentum, position expectation values transform as four-vectors. The
//! momentum-grid packet implements the momentum-induced law instead, where
//! `D(Λ, p)` varies across the packet and the covariance of `⟨x⟩` is lost.

use nalgebra::{Cholesky, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::many_body::spin::foliated_generator;
use crate::minkowski::{minkowski_dot, FourVector, LorentzTransform, Sampler, TimelikeUnitVector, METRIC_DIAG};
use crate::sl2c::{spinor_to_lorentz, wigner_little_group, SL2CElement};

pub type Spinor = Vector2<Complex64>;

/// Default quadrature points per axis for [`GaussianPacket::expectation_x_quadrature`].
pub const DEFAULT_QUADRATURE_POINTS: usize = 21;
/// Half-width of quadrature and momentum grids in standard deviations.
pub const GRID_EXTENT_SIGMAS: f64 = 6.0;
/// Agreement expected between quadrature and closed-form results.
pub const QUADRATURE_TOL: f64 = 1e-6;

/// `|ψ|²` is a normal density with mean `center` and covariance `width`;
/// `ψ_σ(x) = χ_σ N exp(−¼ (x−c)ᵀ W⁻¹ (x−c) + i p·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPacket {
    n: TimelikeUnitVector,
    spin: Spinor,
    center: FourVector,
    width: Matrix4<f64>,
    width_inv: Matrix4<f64>,
    momentum: FourVector,
    amplitude: f64,
}

/// Serializable packet parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketParams {
    pub n: FourVector,
    pub center: FourVector,
    pub width: [[f64; 4]; 4],
    pub momentum: FourVector,
    /// `[[re, im], [re, im]]` for `σ = +½, −½`.
    pub spin: [[f64; 2]; 2],
}

fn spd_factor(width: &Matrix4<f64>) -> Result<Cholesky<f64, nalgebra::U4>> {
    let asym = (width - width.transpose()).abs().max();
    if !width.iter().all(|x| x.is_finite()) || asym > 1e-12 * (1.0 + width.abs().max()) {
        return Err(Error::NotPositiveDefinite);
    }
    Cholesky::new(*width).ok_or(Error::NotPositiveDefinite)
}

pub fn make_gaussian(
    n: TimelikeUnitVector,
    center: FourVector,
    width: Matrix4<f64>,
    momentum: FourVector,
    spin: Spinor,
) -> Result<GaussianPacket> {
    let chol = spd_factor(&width)?;
    let s = spin.norm();
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidArgument("spin amplitudes must be finite and not both zero".into()));
    }
    if !center.is_finite() || !momentum.is_finite() {
        return Err(Error::InvalidArgument("non-finite packet parameter".into()));
    }
    let det = chol.determinant();
    Ok(GaussianPacket {
        n,
        spin: spin / Complex64::from(s),
        center,
        width,
        width_inv: chol.inverse(),
        momentum,
        amplitude: (4.0 * std::f64::consts::PI.powi(2) * det.sqrt()).recip().sqrt(),
    })
}

impl GaussianPacket {
    pub fn from_params(p: &PacketParams) -> Result<Self> {
        let c = |z: [f64; 2]| Complex64::new(z[0], z[1]);
        make_gaussian(
            TimelikeUnitVector::new(p.n)?,
            p.center,
            Matrix4::from_fn(|i, j| p.width[i][j]),
            p.momentum,
            Spinor::new(c(p.spin[0]), c(p.spin[1])),
        )
    }

    pub fn params(&self) -> PacketParams {
        PacketParams {
            n: *self.n.vector(),
            center: self.center,
            width: std::array::from_fn(|i| std::array::from_fn(|j| self.width[(i, j)])),
            momentum: self.momentum,
            spin: std::array::from_fn(|k| [self.spin[k].re, self.spin[k].im]),
        }
    }

    pub fn n(&self) -> &TimelikeUnitVector {
        &self.n
    }

    pub fn spin(&self) -> &Spinor {
        &self.spin
    }

    pub fn center(&self) -> &FourVector {
        &self.center
    }

    pub fn width(&self) -> &Matrix4<f64> {
        &self.width
    }

    pub fn momentum(&self) -> &FourVector {
        &self.momentum
    }

    /// `|ψ(x)|²` summed over spin.
    pub fn density(&self, x: &FourVector) -> f64 {
        let d = x.as_vector() - self.center.as_vector();
        self.amplitude.powi(2) * (-0.5 * d.dot(&(self.width_inv * d))).exp()
    }

    pub fn wavefunction(&self, x: &FourVector) -> Spinor {
        let d = x.as_vector() - self.center.as_vector();
        let envelope = self.amplitude * (-0.25 * d.dot(&(self.width_inv * d))).exp();
        let phase = Complex64::from_polar(envelope, minkowski_dot(&self.momentum, x));
        self.spin * phase
    }

    /// `⟨x^μ⟩`, exact for the Gaussian family.
    pub fn expectation_x(&self) -> FourVector {
        self.center
    }

    /// `⟨x^μ⟩` and the norm by trapezoidal quadrature over `±6σ` along the
    /// principal axes of the width, with `points` nodes per axis.
    pub fn expectation_x_quadrature(&self, points: usize) -> (FourVector, f64) {
        let chol = spd_factor(&self.width).expect("validated at construction");
        let l = chol.l();
        let points = points.max(3);
        let h = 2.0 * GRID_EXTENT_SIGMAS / (points - 1) as f64;
        let node = |k: usize| -GRID_EXTENT_SIGMAS + h * k as f64;
        let weight = |k: usize| if k == 0 || k == points - 1 { 0.5 } else { 1.0 };
        let jac = l.determinant().abs() * h.powi(4);
        let mut mass = 0.0;
        let mut first = Vector4::zeros();
        for a in 0..points {
            for b in 0..points {
                for c in 0..points {
                    for d in 0..points {
                        let z = Vector4::new(node(a), node(b), node(c), node(d));
                        let x = self.center.as_vector() + l * z;
                        let w = weight(a) * weight(b) * weight(c) * weight(d) * self.density(&FourVector::from_vector(&x));
                        mass += w;
                        first += x * w;
                    }
                }
            }
        }
        (FourVector::from_vector(&(first / mass)), mass * jac)
    }

    /// `⟨χ| G_n(a) |χ⟩`, the spin component about `a ⊥ n`.
    pub fn spin_expectation(&self, a: &FourVector) -> Result<f64> {
        let g = foliated_generator(&self.n, a)?;
        Ok((self.spin.adjoint() * g * self.spin)[(0, 0)].re)
    }

    /// `L²` inner product over spacetime (closed form for two Gaussians).
    pub fn inner(&self, other: &Self) -> Complex64 {
        let spin = self.spin.dotc(&other.spin);
        if spin == Complex64::new(0.0, 0.0) {
            return spin;
        }
        // ∫ exp(−¼ dᵀA d − ¼ eᵀB e + i q·x) with Gaussian completion
        let a = self.width_inv;
        let b = other.width_inv;
        let m = (a + b) * 0.5;
        let Some(m_chol) = Cholesky::new(m) else {
            return Complex64::new(0.0, 0.0);
        };
        let m_inv = m_chol.inverse();
        let c1 = self.center.as_vector();
        let c2 = other.center.as_vector();
        let g = Vector4::from(METRIC_DIAG);
        let q = (other.momentum.as_vector() - self.momentum.as_vector()).component_mul(&g);
        // linear term: ½(A c1 + B c2) + i q
        let lin_re = (a * c1 + b * c2) * 0.5;
        let konst = -0.25 * (c1.dot(&(a * c1)) + c2.dot(&(b * c2)));
        let lin = lin_re.map(Complex64::from) + q.map(|v| Complex64::new(0.0, v));
        let m_inv_c = m_inv.map(Complex64::from);
        let quad = (lin.transpose() * m_inv_c * lin)[(0, 0)] * 0.5;
        let vol = 4.0 * std::f64::consts::PI.powi(2) / m_chol.determinant().sqrt();
        spin * self.amplitude * other.amplitude * vol * (quad + konst).exp()
    }
}

/// `ψ'(x) = D(Λ, Λn) ψ(Λ⁻¹x)` on the Gaussian family.
pub fn lorentz_act(a: &SL2CElement, packet: &GaussianPacket) -> Result<GaussianPacket> {
    let lambda = spinor_to_lorentz(a);
    let n_new = packet.n.transform(&lambda);
    let d = wigner_little_group(a, &n_new)?;
    let m = lambda.matrix();
    Ok(GaussianPacket {
        n: n_new,
        spin: d.matrix() * packet.spin,
        center: lambda.apply(&packet.center),
        width: m * packet.width * m.transpose(),
        width_inv: lambda.inverse().matrix().transpose() * packet.width_inv * lambda.inverse().matrix(),
        momentum: lambda.apply(&packet.momentum),
        amplitude: packet.amplitude,
    })
}

/// Finite superposition of Gaussian packets on one leaf.
#[derive(Clone, Debug)]
pub struct Superposition {
    terms: Vec<(Complex64, GaussianPacket)>,
}

impl Superposition {
    pub fn new(terms: Vec<(Complex64, GaussianPacket)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty superposition".into()))?;
        for (_, p) in &terms[1..] {
            let d = first.1.n.distance(&p.n);
            if d > crate::many_body::state::FOLIATION_TOL {
                return Err(Error::FoliationMismatch { distance: d });
            }
        }
        Ok(Self { terms })
    }

    pub fn wavefunction(&self, x: &FourVector) -> Spinor {
        self.terms
            .iter()
            .fold(Spinor::zeros(), |acc, (c, p)| acc + p.wavefunction(x) * *c)
    }

    pub fn lorentz_act(&self, a: &SL2CElement) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(c, p)| Ok((*c, lorentz_act(a, p)?)))
            .collect::<Result<_>>()?;
        Ok(Self { terms })
    }
}

impl Sampler {
    /// A packet with random `n`, center, width, mass-shell momentum and spin.
    pub fn gaussian_packet(&mut self) -> GaussianPacket {
        let n = self.timelike_unit();
        let center = self.four_vector(3.0);
        let a = Matrix4::from_fn(|_, _| self.normal());
        let width = a * a.transpose() * 0.5 + Matrix4::identity() * 0.5;
        let mass = self.uniform(0.5, 2.0);
        let momentum = *self.timelike_unit().vector() * mass;
        let spin = Spinor::new(
            Complex64::new(self.normal(), self.normal()),
            Complex64::new(self.normal(), self.normal()),
        );
        make_gaussian(n, center, width, momentum, spin).expect("sampled width is positive definite")
    }
}

/// Affine lattice `p = origin + E·i`, `i ∈ [0, counts)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumGrid {
    pub origin: Vector4<f64>,
    pub basis: Matrix4<f64>,
    pub counts: [usize; 4],
}

impl MomentumGrid {
    /// Axis-aligned box of `counts` points per axis spanning `center ± half_width`.
    pub fn cube(center: &FourVector, half_width: f64, counts: usize) -> Result<Self> {
        if counts < 3 || !(half_width > 0.0) {
            return Err(Error::InvalidArgument("grid needs ≥ 3 points and positive extent".into()));
        }
        let h = 2.0 * half_width / (counts - 1) as f64;
        Ok(Self {
            origin: center.as_vector() - Vector4::repeat(half_width),
            basis: Matrix4::identity() * h,
            counts: [counts; 4],
        })
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn unflatten(&self, mut k: usize) -> [usize; 4] {
        let mut idx = [0; 4];
        for ax in (0..4).rev() {
            idx[ax] = k % self.counts[ax];
            k /= self.counts[ax];
        }
        idx
    }

    fn flatten(&self, idx: [usize; 4]) -> usize {
        idx.iter().zip(self.counts).fold(0, |acc, (&i, c)| acc * c + i)
    }

    pub fn site(&self, k: usize) -> FourVector {
        let idx = self.unflatten(k);
        let i = Vector4::from_fn(|r, _| idx[r] as f64);
        FourVector::from_vector(&(self.origin + self.basis * i))
    }

    pub fn cell_volume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    fn transformed(&self, lambda: &LorentzTransform) -> Self {
        Self {
            origin: lambda.matrix() * self.origin,
            basis: lambda.matrix() * self.basis,
            counts: self.counts,
        }
    }
}

/// Samples `ψ(p, σ)` on a momentum lattice.
#[derive(Clone, Debug)]
pub struct MomentumGridPacket {
    pub grid: MomentumGrid,
    pub samples: Vec<Spinor>,
}

/// Spin-polarized Gaussian in momentum space, `ψ(p) = χ exp(−|p − k|²/4σ²)`
/// (Euclidean distance in components), on a cube of `±6σ`.
pub fn momentum_gaussian(k: &FourVector, sigma_p: f64, points: usize, spin: Spinor) -> Result<MomentumGridPacket> {
    let grid = MomentumGrid::cube(k, GRID_EXTENT_SIGMAS * sigma_p, points)?;
    let chi = spin / Complex64::from(spin.norm());
    let samples = (0..grid.len())
        .map(|s| {
            let d = grid.site(s).as_vector() - k.as_vector();
            chi * Complex64::from((-d.norm_squared() / (4.0 * sigma_p * sigma_p)).exp())
        })
        .collect();
    let packet = MomentumGridPacket { grid, samples };
    packet.check_support()?;
    Ok(packet)
}

const SUPPORT_REL: f64 = 1e-12;

impl MomentumGridPacket {
    fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_squared()).fold(0.0, f64::max)
    }

    /// Every site carrying weight is forward timelike.
    pub fn check_support(&self) -> Result<()> {
        let cut = SUPPORT_REL * self.peak();
        for (k, s) in self.samples.iter().enumerate() {
            if s.norm_squared() > cut {
                let p = self.grid.site(k);
                if !(p.time() > 0.0 && p.square() < 0.0) {
                    return Err(Error::NotForwardTimelike(format!("p = {p}")));
                }
            }
        }
        Ok(())
    }

    /// Largest `|ψ|²` on the lattice boundary relative to the peak.
    pub fn edge_weight(&self) -> f64 {
        let peak = self.peak();
        let mut worst: f64 = 0.0;
        for (k, s) in self.samples.iter().enumerate() {
            let idx = self.grid.unflatten(k);
            if idx.iter().zip(self.grid.counts).any(|(&i, c)| i == 0 || i + 1 == c) {
                worst = worst.max(s.norm_squared() / peak);
            }
        }
        worst
    }

    pub fn norm_squared(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_squared()).sum::<f64>() * self.grid.cell_volume()
    }

    /// `⟨x^μ⟩ = Re ∫ ψ† i ∂ψ/∂p_μ d⁴p / ∫ |ψ|²`, central differences along the
    /// lattice directions.
    pub fn expectation_x(&self) -> FourVector {
        let e_inv = self
            .grid
            .basis
            .try_inverse()
            .expect("lattice basis is non-singular");
        let mut acc = Vector4::<f64>::zeros();
        let mut mass = 0.0;
        for k in 0..self.samples.len() {
            let psi = &self.samples[k];
            let w = psi.norm_squared();
            if w == 0.0 {
                continue;
            }
            mass += w;
            let idx = self.grid.unflatten(k);
            // ∂ψ/∂i_a
            let mut di = [Spinor::zeros(); 4];
            for (a, slot) in di.iter_mut().enumerate() {
                let fetch = |shift: isize| -> Spinor {
                    let mut j = idx;
                    let v = j[a] as isize + shift;
                    if v < 0 || v >= self.grid.counts[a] as isize {
                        return Spinor::zeros();
                    }
                    j[a] = v as usize;
                    self.samples[self.grid.flatten(j)]
                };
                *slot = (fetch(1) - fetch(-1)) * Complex64::from(0.5);
            }
            for nu in 0..4 {
                // ∂/∂p^ν = Σ_a (E⁻¹)_{aν} ∂/∂i_a
                let dpsi = (0..4).fold(Spinor::zeros(), |s, a| s + di[a] * Complex64::from(e_inv[(a, nu)]));
                let val = (psi.adjoint() * dpsi)[(0, 0)] * Complex64::i();
                // lower → upper: ∂/∂p_μ = g^{μν} ∂/∂p^ν
                acc[nu] += METRIC_DIAG[nu] * val.re;
            }
        }
        FourVector::from_vector(&(acc / mass))
    }

    /// Multilinear resampling onto `target`; fails if weight is lost.
    pub fn resample_onto(&self, target: &MomentumGrid) -> Result<Self> {
        let e_inv = self
            .grid
            .basis
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("singular lattice".into()))?;
        let samples: Vec<Spinor> = (0..target.len())
            .map(|s| {
                let p = target.site(s).as_vector();
                let u = e_inv * (p - self.grid.origin);
                let mut base = [0usize; 4];
                let mut frac = [0.0; 4];
                for a in 0..4 {
                    let f = u[a].floor();
                    if f < 0.0 || f as usize + 1 >= self.grid.counts[a] {
                        return Spinor::zeros();
                    }
                    base[a] = f as usize;
                    frac[a] = u[a] - f;
                }
                let mut out = Spinor::zeros();
                for corner in 0..16usize {
                    let mut idx = base;
                    let mut w = 1.0;
                    for a in 0..4 {
                        if corner >> a & 1 == 1 {
                            idx[a] += 1;
                            w *= frac[a];
                        } else {
                            w *= 1.0 - frac[a];
                        }
                    }
                    out += self.samples[self.grid.flatten(idx)] * Complex64::from(w);
                }
                out
            })
            .collect();
        let out = Self {
            grid: target.clone(),
            samples,
        };
        let before = self.norm_squared();
        let after = out.norm_squared();
        if (after - before).abs() > 1e-2 * before {
            return Err(Error::SupportLeftGrid(format!(
                "resampled weight {after:.6e} vs original {before:.6e}"
            )));
        }
        Ok(out)
    }
}

/// `ψ'(p) = D(Λ, p̂) ψ(Λ⁻¹p)` with `p̂ = p/√(−p·p)`. The lattice is carried
/// along by `Λ`, so every transformed sample lands on a lattice site.
pub fn wigner_act(a: &SL2CElement, packet: &MomentumGridPacket) -> Result<MomentumGridPacket> {
    packet.check_support()?;
    let lambda = spinor_to_lorentz(a);
    let grid = packet.grid.transformed(&lambda);
    let samples = packet
        .samples
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            // sites outside the cone carry negligible weight (checked above)
            let Ok(p_hat) = TimelikeUnitVector::normalize(&grid.site(k)) else {
                return Ok(Spinor::zeros());
            };
            Ok(wigner_little_group(a, &p_hat)?.matrix() * psi)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentumGridPacket { grid, samples })
}

/// Settings for the momentum-induced non-covariance demonstration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoConfig {
    pub mass: f64,
    pub sigma_p: f64,
    pub points: usize,
    pub rapidity: f64,
    pub boost_direction: [f64; 3],
    /// `[[re, im], [re, im]]`
    pub spin: [[f64; 2]; 2],
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            mass: 6.0,
            sigma_p: 0.3,
            points: 24,
            rapidity: 1.0,
            boost_direction: [1.0, 0.0, 0.0],
            spin: [[1.0, 0.0], [0.0, 0.0]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoncovarianceReport {
    pub before: FourVector,
    pub expected: FourVector,
    pub observed: FourVector,
    /// `max_μ |⟨x^μ⟩' − Λ⟨x⟩^μ|` for the boost.
    pub deviation: f64,
    /// Same quantity for a rotation about the boost axis, where the
    /// momentum-induced law is covariant.
    pub rotation_deviation: f64,
    pub quadrature_tolerance: f64,
}

impl NoncovarianceReport {
    pub fn ratio(&self) -> f64 {
        self.deviation / self.quadrature_tolerance
    }
}

pub fn noncovariance_demo(cfg: &DemoConfig) -> Result<NoncovarianceReport> {
    if !(cfg.mass > 0.0) {
        return Err(Error::NonPositiveMass(cfg.mass));
    }
    let dir = nalgebra::Vector3::from(cfg.boost_direction);
    if !(dir.norm() > 0.0) {
        return Err(Error::InvalidArgument("boost direction must be non-zero".into()));
    }
    let dir = dir.normalize();
    let c = |z: [f64; 2]| Complex64::new(z[0], z[1]);
    let spin = Spinor::new(c(cfg.spin[0]), c(cfg.spin[1]));
    if !(spin.norm() > 0.0) {
        return Err(Error::InvalidArgument("spin amplitudes must not both vanish".into()));
    }
    let k = FourVector::new(cfg.mass, 0.0, 0.0, 0.0);
    let packet = momentum_gaussian(&k, cfg.sigma_p, cfg.points, spin)?;
    let before = packet.expectation_x();

    let measure = |a: &SL2CElement| -> Result<(FourVector, FourVector, f64)> {
        let moved = wigner_act(a, &packet)?;
        let observed = moved.expectation_x();
        let expected = spinor_to_lorentz(a).apply(&before);
        Ok((expected, observed, expected.max_abs_diff(&observed)))
    };
    let (_, _, rotation_deviation) = measure(&SL2CElement::rotation(&dir, 0.9))?;
    let (expected, observed, deviation) = measure(&SL2CElement::boost(&dir, cfg.rapidity))?;
    Ok(NoncovarianceReport {
        before,
        expected,
        observed,
        deviation,
        rotation_deviation,
        quadrature_tolerance: QUADRATURE_TOL,
    })
}

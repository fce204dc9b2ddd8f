//! N-body tensor products over a one-particle basis `site ⊗ spin` at a
//! common `n`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::half::HalfInt;
use super::spin::{foliated_generator, foliated_rotation_matrix, spin_half_rotation, validate_axis};
use crate::error::{Error, Result};
use crate::minkowski::{minkowski_dot, FourVector, TimelikeUnitVector};
use crate::sl2c::{boost_of, spinor_to_lorentz, SL2CElement};

/// Same-`n` tolerance used when comparing foliation labels.
pub const FOLIATION_TOL: f64 = 1e-12;
const GEOMETRY_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// The statistics matching a spin: fermions for half-integer spin.
    pub fn for_spin(spin: HalfInt) -> Self {
        if spin.is_integer() {
            Statistics::Boson
        } else {
            Statistics::Fermion
        }
    }
}

/// Orthonormal one-particle basis: localized site labels (positions in the
/// surface orthogonal to `n`) times the `2j + 1` spin labels.
#[derive(Clone, Debug, PartialEq)]
pub struct OneBodyBasis {
    n: TimelikeUnitVector,
    sites: Vec<FourVector>,
    spin: HalfInt,
}

impl OneBodyBasis {
    pub fn new(n: TimelikeUnitVector, sites: Vec<FourVector>, spin: HalfInt) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument("basis needs at least one site".into()));
        }
        if spin.0 < 0 {
            return Err(Error::NotHalfInteger { value: spin.value() });
        }
        for x in &sites {
            let dot = minkowski_dot(n.vector(), x);
            if !x.is_finite() || dot.abs() > GEOMETRY_TOL {
                return Err(Error::Geometry(format!("site {x} is not orthogonal to n (x·n = {dot:e})")));
            }
        }
        Ok(Self { n, sites, spin })
    }

    /// `count` unlabeled sites at the origin, for abstract mode bases.
    pub fn abstract_sites(n: TimelikeUnitVector, count: usize, spin: HalfInt) -> Result<Self> {
        Self::new(n, vec![FourVector::zero(); count], spin)
    }

    pub fn n(&self) -> &TimelikeUnitVector {
        &self.n
    }

    pub fn sites(&self) -> &[FourVector] {
        &self.sites
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.sites.len() * self.spin.multiplicity()
    }

    /// Index of `(site, m)`; spin label varies fastest.
    pub fn index(&self, site: usize, m: HalfInt) -> Option<usize> {
        let k = self.spin.projection_index(m)?;
        (site < self.sites.len()).then(|| site * self.spin.multiplicity() + k)
    }

    fn check_same_leaf(&self, other: &Self) -> Result<()> {
        let d = self.n.distance(&other.n);
        if d > FOLIATION_TOL {
            return Err(Error::FoliationMismatch { distance: d });
        }
        if self.sites.len() != other.sites.len() || self.spin != other.spin {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneParticleState {
    pub basis: OneBodyBasis,
    pub coeffs: DVector<Complex64>,
}

impl OneParticleState {
    pub fn new(basis: OneBodyBasis, coeffs: DVector<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    /// Site `site` times the spin amplitudes `spin`.
    pub fn localized(basis: &OneBodyBasis, site: usize, spin: &DVector<Complex64>) -> Result<Self> {
        let mult = basis.spin.multiplicity();
        if site >= basis.sites.len() || spin.len() != mult {
            return Err(Error::DimensionMismatch {
                expected: mult,
                found: spin.len(),
            });
        }
        let mut coeffs = DVector::zeros(basis.dim());
        coeffs.rows_mut(site * mult, mult).copy_from(spin);
        Ok(Self { basis: basis.clone(), coeffs })
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.basis.check_same_leaf(&other.basis)?;
        Ok(self.coeffs.dotc(&other.coeffs))
    }
}

/// How [`symmetrize`] normalizes its output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Unit norm (occupation-number normalization for bosons).
    #[default]
    Unit,
    /// The bare `1/N!` prefactor of the permutation sum.
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NBodyState {
    basis: OneBodyBasis,
    particles: usize,
    statistics: Option<Statistics>,
    /// Coefficients over `basis^{⊗N}`, slot 0 most significant.
    coeffs: DVector<Complex64>,
    zero: bool,
}

impl NBodyState {
    pub fn basis(&self) -> &OneBodyBasis {
        &self.basis
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn statistics(&self) -> Option<Statistics> {
        self.statistics
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    /// Set when (anti)symmetrization annihilated the product.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            coeffs: &self.coeffs * c,
            ..self.clone()
        }
    }

    /// Exchange of tensor slots `i` and `j`.
    pub fn swap(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.particles || j >= self.particles {
            return Err(Error::InvalidArgument(format!("slot out of range for {} particles", self.particles)));
        }
        let mut perm: Vec<usize> = (0..self.particles).collect();
        perm.swap(i, j);
        Ok(Self {
            coeffs: permute_slots(&self.coeffs, self.basis.dim(), &perm),
            ..self.clone()
        })
    }

    /// Largest deviation from exact (anti)symmetry over all transpositions.
    pub fn symmetry_residual(&self) -> f64 {
        let Some(stats) = self.statistics else {
            return 0.0;
        };
        let sign = match stats {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        };
        let mut worst: f64 = 0.0;
        for i in 0..self.particles {
            for j in i + 1..self.particles {
                let swapped = self.swap(i, j).expect("valid slots");
                worst = worst.max((&swapped.coeffs - &self.coeffs * Complex64::from(sign)).camax());
            }
        }
        worst
    }
}

/// Relabels slot `k` of a rank-N tensor as slot `perm[k]`.
fn permute_slots(coeffs: &DVector<Complex64>, dim: usize, perm: &[usize]) -> DVector<Complex64> {
    let n = perm.len();
    let mut out = DVector::zeros(coeffs.len());
    let mut digits = vec![0usize; n];
    for (idx, c) in coeffs.iter().enumerate() {
        let mut rem = idx;
        for k in (0..n).rev() {
            digits[k] = rem % dim;
            rem /= dim;
        }
        let mut target = 0;
        for k in 0..n {
            // slot perm^{-1}(k) moves to k
            let src = perm.iter().position(|&p| p == k).expect("permutation");
            target = target * dim + digits[src];
        }
        out[target] = *c;
    }
    out
}

fn kron_all(vectors: &[&DVector<Complex64>]) -> DVector<Complex64> {
    let mut out = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for v in vectors {
        out = out.kronecker(*v);
    }
    out
}

fn common_basis(factors: &[OneParticleState]) -> Result<OneBodyBasis> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("no factors".into()))?;
    for f in &factors[1..] {
        first.basis.check_same_leaf(&f.basis)?;
    }
    Ok(first.basis.clone())
}

/// `ψ₁ ⊗ … ⊗ ψ_N` in slot order, all factors on one leaf.
pub fn product(factors: &[OneParticleState]) -> Result<NBodyState> {
    let basis = common_basis(factors)?;
    let refs: Vec<&DVector<Complex64>> = factors.iter().map(|f| &f.coeffs).collect();
    Ok(NBodyState {
        basis,
        particles: factors.len(),
        statistics: None,
        coeffs: kron_all(&refs),
        zero: false,
    })
}

/// All permutations of `0..n` with their parity, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], odd: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            out.push((prefix.clone(), odd));
            return;
        }
        for k in 0..n {
            if used[k] {
                continue;
            }
            // inversions contributed by placing k now
            let inv = (0..k).filter(|&i| !used[i]).count();
            used[k] = true;
            prefix.push(k);
            go(prefix, used, odd ^ (inv % 2 == 1), out);
            prefix.pop();
            used[k] = false;
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], false, &mut out);
    out
}

/// `(1/N!) Σ_P (±)^P ψ_{P(1)} ⊗ … ⊗ ψ_{P(N)}`, renormalized under
/// [`Normalization::Unit`].
pub fn symmetrize(factors: &[OneParticleState], statistics: Statistics, normalization: Normalization) -> Result<NBodyState> {
    let basis = common_basis(factors)?;
    let n = factors.len();
    if n > 8 {
        return Err(Error::InvalidArgument(format!("{n} factors exceed the supported 8")));
    }
    let mut coeffs = DVector::zeros(basis.dim().pow(n as u32));
    let mut nfact = 1.0;
    for (perm, odd) in permutations(n) {
        let refs: Vec<&DVector<Complex64>> = perm.iter().map(|&k| &factors[k].coeffs).collect();
        let sign = if odd && statistics == Statistics::Fermion { -1.0 } else { 1.0 };
        coeffs += kron_all(&refs) * Complex64::from(sign);
    }
    for k in 2..=n {
        nfact *= k as f64;
    }
    coeffs /= Complex64::from(nfact);
    let scale: f64 = factors.iter().map(|f| f.coeffs.norm()).product();
    let norm = coeffs.norm();
    let zero = norm <= ZERO_TOL * scale.max(f64::MIN_POSITIVE);
    if zero {
        coeffs.fill(Complex64::new(0.0, 0.0));
    } else if normalization == Normalization::Unit {
        coeffs /= Complex64::from(norm);
    }
    Ok(NBodyState {
        basis,
        particles: n,
        statistics: Some(statistics),
        coeffs,
        zero,
    })
}

/// `Π_i n_i!` for the occupation pattern of `factors` (identical factors
/// counted together); the norm² of the unnormalized boson sum is
/// `Π n_i! / N!` times this convention's `1/N!` prefactor squared.
pub fn occupation_factor(factors: &[OneParticleState], tol: f64) -> f64 {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|(rep, _)| (&factors[*rep].coeffs - &f.coeffs).camax() <= tol)
        {
            Some(g) => g.1 += 1,
            None => groups.push((i, 1)),
        }
    }
    groups
        .iter()
        .map(|&(_, c)| (1..=c).fold(1.0, |a, k| a * k as f64))
        .product()
}

/// Slot-by-slot contraction `⟨Φ|Ψ⟩`.
pub fn inner_product(phi: &NBodyState, psi: &NBodyState) -> Result<Complex64> {
    phi.basis.check_same_leaf(&psi.basis)?;
    if phi.particles != psi.particles {
        return Err(Error::DimensionMismatch {
            expected: phi.particles,
            found: psi.particles,
        });
    }
    Ok(phi.coeffs.dotc(&psi.coeffs))
}

/// `exp(−iθ J_a)` on each factor: spin labels by the foliated rotation and
/// site labels by the corresponding rotation of positions about the origin.
pub fn foliated_rotation(state: &NBodyState, a: &FourVector, theta: f64) -> Result<NBodyState> {
    let basis = &state.basis;
    let n = basis.n;
    validate_axis(&n, a)?;
    let perm = site_permutation(basis, a, theta)?;
    let d = foliated_rotation_matrix(&n, a, theta, basis.spin)?;
    let mult = basis.spin.multiplicity();
    let dim = basis.dim();
    let mut one = nalgebra::DMatrix::zeros(dim, dim);
    for (from, &to) in perm.iter().enumerate() {
        one.view_mut((to * mult, from * mult), (mult, mult)).copy_from(&d);
    }
    let mut full = nalgebra::DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for _ in 0..state.particles {
        full = full.kronecker(&one);
    }
    Ok(NBodyState {
        coeffs: full * &state.coeffs,
        ..state.clone()
    })
}

/// Where each site goes under the spacetime rotation about `a` by `θ`;
/// errors unless the site set is mapped onto itself.
pub fn site_permutation(basis: &OneBodyBasis, a: &FourVector, theta: f64) -> Result<Vec<usize>> {
    let n = basis.n;
    let l = boost_of(&n)?;
    let g = foliated_generator(&n, a)?;
    let u = spin_half_rotation(&g, theta);
    let spacetime = l.l.compose(&SL2CElement::from_matrix_unchecked(u)).compose(&l.inverse());
    let lambda = spinor_to_lorentz(&spacetime);
    basis
        .sites
        .iter()
        .map(|x| {
            let y = lambda.apply(x);
            basis
                .sites
                .iter()
                .position(|s| s.max_abs_diff(&y) < GEOMETRY_TOL)
                .ok_or_else(|| Error::Geometry(format!("rotated site {y} is not a lattice site")))
        })
        .collect()
}

/// Two-particle state for the rotation/exchange comparison.
#[derive(Clone, Debug)]
pub struct ExchangePair {
    pub state: NBodyState,
    pub axis: FourVector,
    pub spin: HalfInt,
}

/// Two identical particles at `±d·e` in the surface orthogonal to `n`, with
/// common spin state `|s, s⟩` along the rotation axis `a ⊥ e`.
pub fn exchange_pair(
    n: TimelikeUnitVector,
    e: &FourVector,
    a: &FourVector,
    d: f64,
    spin: HalfInt,
    statistics: Statistics,
) -> Result<ExchangePair> {
    validate_axis(&n, a)?;
    validate_axis(&n, e).map_err(|_| Error::Geometry("separation direction must be a unit vector orthogonal to n".into()))?;
    if minkowski_dot(a, e).abs() > GEOMETRY_TOL {
        return Err(Error::Geometry("rotation axis must be orthogonal to the separation".into()));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Geometry(format!("separation {d} must be positive")));
    }
    let basis = OneBodyBasis::new(n, vec![*e * d, *e * (-d)], spin)?;
    // J_a eigenstate with m = s: rotate |s s⟩ from the rest-frame z axis.
    let chi = aligned_top_state(&n, a, spin)?;
    let f1 = OneParticleState::localized(&basis, 0, &chi)?;
    let f2 = OneParticleState::localized(&basis, 1, &chi)?;
    Ok(ExchangePair {
        state: symmetrize(&[f1, f2], statistics, Normalization::Unit)?,
        axis: *a,
        spin,
    })
}

/// Highest-weight state of `J_a` in the spin-`s` representation.
pub fn aligned_top_state(n: &TimelikeUnitVector, a: &FourVector, spin: HalfInt) -> Result<DVector<Complex64>> {
    let g = foliated_generator(n, a)?;
    // eigenvector of G with eigenvalue +½, then its symmetric power
    let (x, y) = (g[(0, 1)], g[(0, 0)] + Complex64::from(0.5));
    let up = if x.norm() > 1e-12 {
        let v = nalgebra::Vector2::new(x, Complex64::from(0.5) - g[(0, 0)]);
        v / Complex64::from(v.norm())
    } else if (g[(0, 0)] - Complex64::from(0.5)).norm() < 1e-9 {
        nalgebra::Vector2::new(Complex64::from(1.0), Complex64::from(0.0))
    } else {
        let _ = y;
        nalgebra::Vector2::new(Complex64::from(0.0), Complex64::from(1.0))
    };
    let mut out = DVector::zeros(spin.multiplicity());
    // |s,s⟩_a = ⊗ up, projected on descending-m basis with binomial weights
    let two_j = spin.0 as u32;
    for k in 0..=two_j {
        let binom = (0..k).fold(1.0, |acc, i| acc * f64::from(two_j - i) / f64::from(i + 1));
        out[k as usize] = up[0].powu(two_j - k) * up[1].powu(k) * binom.sqrt();
    }
    Ok(out)
}

/// Result of comparing a π rotation with exchange of the two particles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExchangeCheck {
    /// `⟨P₁₂Ψ, U(π)Ψ⟩ / ⟨P₁₂Ψ, P₁₂Ψ⟩`, equal to `(−1)^{2s}`.
    pub rotation_phase: Complex64,
    /// `⟨Ψ, P₁₂Ψ⟩`, `+1` for bosons and `−1` for fermions.
    pub exchange_sign: Complex64,
    /// `‖U(π)Ψ − phase·P₁₂Ψ‖`; zero when the rotation is an exchange.
    pub collinearity_residual: f64,
}

impl ExchangeCheck {
    /// Rotation phase agrees with the exchange sign and with `(−1)^{2s}`.
    pub fn consistent(&self, spin: HalfInt, tol: f64) -> bool {
        let expected = if spin.is_integer() { 1.0 } else { -1.0 };
        (self.rotation_phase - Complex64::from(expected)).norm() < tol
            && (self.exchange_sign - self.rotation_phase).norm() < tol
            && self.collinearity_residual < tol
    }
}

pub fn exchange_phase_check(pair: &ExchangePair) -> Result<ExchangeCheck> {
    let psi = &pair.state;
    if psi.particles != 2 || psi.zero {
        return Err(Error::Geometry("exchange check needs a non-zero two-particle state".into()));
    }
    let perm = site_permutation(&psi.basis, &pair.axis, std::f64::consts::PI)?;
    if perm.len() != 2 || perm[0] != 1 {
        return Err(Error::Geometry("π rotation must interchange the two sites".into()));
    }
    let rotated = foliated_rotation(psi, &pair.axis, std::f64::consts::PI)?;
    let swapped = psi.swap(0, 1)?;
    let phase = swapped.coeffs.dotc(&rotated.coeffs) / swapped.coeffs.norm_squared();
    let residual = (&rotated.coeffs - &swapped.coeffs * phase).norm();
    Ok(ExchangeCheck {
        rotation_phase: phase,
        exchange_sign: psi.coeffs.dotc(&swapped.coeffs) / psi.coeffs.norm_squared(),
        collinearity_residual: residual,
    })
}

//! Field operators on a periodic spatial lattice.
//!
//! Plane-wave modes `p = 2πk/(La)` carry a spinor label. The field is
//! `φ_s(x) = (La)^{−d/2} Σ_p e^{ip·x} a_{p,s}`, so that
//! `[φ_s(x), φ_{s'}(y)†]∓ = δ_{xy} δ_{ss'} / a^d`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::space::{FockOperator, FockSpace, ModeBasis, ModeFunction, ModeLabel};
use crate::error::{Error, Result};
use crate::minkowski::TimelikeUnitVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    /// Sites per dimension.
    pub size: usize,
    pub dims: usize,
    pub spacing: f64,
    pub spin_components: usize,
}

impl Lattice {
    pub fn new(size: usize, dims: usize, spacing: f64, spin_components: usize) -> Result<Self> {
        if size == 0 || dims == 0 || dims > 4 || spin_components == 0 || !(spacing > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "invalid lattice: size {size}, dims {dims}, spacing {spacing}, spin {spin_components}"
            )));
        }
        Ok(Self {
            size,
            dims,
            spacing,
            spin_components,
        })
    }

    pub fn sites(&self) -> usize {
        self.size.pow(self.dims as u32)
    }

    pub fn modes(&self) -> usize {
        self.sites() * self.spin_components
    }

    /// `1 / a^d`, the value of the equal-point bracket.
    pub fn delta_normalization(&self) -> f64 {
        self.spacing.powi(self.dims as i32).recip()
    }

    /// Integer coordinates of flat site (or momentum) index `k`.
    pub fn coordinates(&self, mut k: usize) -> Vec<i64> {
        let mut c = vec![0; self.dims];
        for d in (0..self.dims).rev() {
            c[d] = (k % self.size) as i64;
            k /= self.size;
        }
        c
    }

    fn flat(&self, coords: &[i64]) -> Result<usize> {
        if coords.len() != self.dims || coords.iter().any(|&c| c < 0 || c as usize >= self.size) {
            return Err(Error::OffLattice(coords.to_vec()));
        }
        Ok(coords.iter().fold(0, |acc, &c| acc * self.size + c as usize))
    }

    pub fn mode_index(&self, momentum: &[i64], spin: usize) -> Result<usize> {
        if spin >= self.spin_components {
            return Err(Error::InvalidArgument(format!("spin label {spin} out of range")));
        }
        Ok(self.flat(momentum)? * self.spin_components + spin)
    }

    pub fn plane_wave_basis(&self, n: TimelikeUnitVector) -> Result<ModeBasis> {
        let labels = (0..self.sites())
            .flat_map(|k| {
                let p = self.coordinates(k);
                (0..self.spin_components).map(move |s| ModeLabel {
                    momentum: Some(p.clone()),
                    spin: Some(s),
                })
            })
            .collect();
        ModeBasis::with_labels(n, labels)
    }

    fn check_basis(&self, basis: &ModeBasis) -> Result<()> {
        if basis.len() != self.modes() {
            return Err(Error::DimensionMismatch {
                expected: self.modes(),
                found: basis.len(),
            });
        }
        Ok(())
    }

    /// `e^{2πi k·j / L}` phases, one table per dimension is enough since
    /// the exponent separates.
    fn phase(&self, k: &[i64], j: &[i64], sign: f64) -> Complex64 {
        let dot: i64 = k.iter().zip(j).map(|(a, b)| a * b).sum();
        let reduced = dot.rem_euclid(self.size as i64) as f64;
        Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * reduced / self.size as f64)
    }

    /// Mode function `g` with `φ_s(x) = a(g)`.
    pub fn field_mode(&self, basis: &ModeBasis, x: &[i64], spin: usize) -> Result<ModeFunction> {
        self.check_basis(basis)?;
        self.flat(x)?;
        let mut g = DVector::zeros(self.modes());
        let norm = (self.size as f64 * self.spacing).powf(-(self.dims as f64) / 2.0);
        for k in 0..self.sites() {
            let p = self.coordinates(k);
            // a(g) = Σ ḡ_k a_k, so g carries the conjugate phase
            g[self.mode_index(&p, spin)?] = self.phase(&p, x, -1.0) * norm;
        }
        basis.mode(g)
    }

    /// Mode function of `φ̃_s(q) = a^d (La)^{−d/2} Σ_x e^{−iq·x} φ_s(x)`,
    /// evaluated by summing the field modes one dimension at a time.
    pub fn momentum_field_mode(&self, basis: &ModeBasis, q: &[i64], spin: usize) -> Result<ModeFunction> {
        self.check_basis(basis)?;
        self.flat(q)?;
        let l = self.size;
        let norm = (l as f64 * self.spacing).powf(-(self.dims as f64) / 2.0);
        let pref = self.spacing.powi(self.dims as i32) * norm * norm;
        // t[d][k] = Σ_x e^{2πi (q_d − k) x / L}
        let tables: Vec<Vec<Complex64>> = (0..self.dims)
            .map(|d| {
                (0..l as i64)
                    .map(|k| (0..l as i64).map(|x| self.phase(&[q[d] - k], &[x], 1.0)).sum())
                    .collect()
            })
            .collect();
        let mut g = DVector::zeros(self.modes());
        for k in 0..self.sites() {
            let p = self.coordinates(k);
            let v: Complex64 = p.iter().enumerate().map(|(d, &pd)| tables[d][pd as usize]).product();
            g[self.mode_index(&p, spin)?] = v * pref;
        }
        basis.mode(g)
    }
}

/// `φ_s(x)` as an operator on `space`.
pub fn lattice_field(space: &FockSpace, lattice: &Lattice, x: &[i64], spin: usize) -> Result<FockOperator> {
    let g = lattice.field_mode(space.basis(), x, spin)?;
    space.annihilate(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::space::fock_space;
    use crate::many_body::Statistics;

    #[test]
    fn small_lattice_brackets() {
        let lat = Lattice::new(3, 2, 0.5, 2).unwrap();
        let basis = lat.plane_wave_basis(TimelikeUnitVector::rest()).unwrap();
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let space = fock_space(basis.clone(), stats, 2).unwrap();
            let x = [1, 2];
            let gx = lat.field_mode(&basis, &x, 0).unwrap();
            for site in 0..lat.sites() {
                let y = lat.coordinates(site);
                for s in 0..2 {
                    let gy = lat.field_mode(&basis, &y, s).unwrap();
                    let c = space.bracket(&gx, &gy).unwrap();
                    let expected = if y == x && s == 0 { lat.delta_normalization() } else { 0.0 };
                    assert!((c - expected).norm() < 1e-12, "{y:?} {s}: {c}");
                }
            }
        }
    }

    #[test]
    fn momentum_modes_are_plane_waves() {
        let lat = Lattice::new(4, 2, 0.7, 1).unwrap();
        let basis = lat.plane_wave_basis(TimelikeUnitVector::rest()).unwrap();
        let g = lat.momentum_field_mode(&basis, &[1, 3], 0).unwrap();
        let idx = lat.mode_index(&[1, 3], 0).unwrap();
        for (k, z) in g.coeffs.iter().enumerate() {
            let e = if k == idx { 1.0 } else { 0.0 };
            assert!((z - e).norm() < 1e-12);
        }
    }

    #[test]
    fn operator_form_matches() {
        let lat = Lattice::new(2, 1, 1.0, 1).unwrap();
        let basis = lat.plane_wave_basis(TimelikeUnitVector::rest()).unwrap();
        let space = fock_space(basis, Statistics::Fermion, 2).unwrap();
        let a = lattice_field(&space, &lat, &[0], 0).unwrap();
        let b = lattice_field(&space, &lat, &[1], 0).unwrap();
        let same = a.bracket(&a.adjoint()).unwrap();
        assert!(same.max_abs_diff(&same.identity_like()).unwrap() < 1e-15);
        assert!(a.bracket(&b.adjoint()).unwrap().entries().all(|e| e.2.norm() < 1e-15));
    }

    #[test]
    fn off_lattice_rejected() {
        let lat = Lattice::new(3, 3, 1.0, 2).unwrap();
        let basis = lat.plane_wave_basis(TimelikeUnitVector::rest()).unwrap();
        assert_eq!(lat.field_mode(&basis, &[0, 3, 0], 0), Err(Error::OffLattice(vec![0, 3, 0])));
        assert!(lat.field_mode(&basis, &[0, 0], 0).is_err());
    }
}

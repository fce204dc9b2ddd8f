//! Rotation generators in the spacelike surface orthogonal to `n`, and their
//! spin-`j` representations.
//!
//! The spin-½ generator about a unit axis `a ⊥ n` is extracted from the Dirac
//! matrices `Σₙ^{μν}` and pulled back to the little-group labels with the
//! canonical boost, `L(n)⁻¹ J(a) L(n)`. Higher spins are symmetrized tensor
//! powers of spin ½, so every spin shares the same section convention.

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use super::half::HalfInt;
use crate::error::{Error, Result};
use crate::minkowski::{minkowski_dot, FourVector, TimelikeUnitVector};
use crate::sl2c::{boost_of, spinor_to_lorentz, CMat4, Mat2};
use crate::spin_algebra::{spin_matrix_set, SpinMatrixSet};

pub type CMat = DMatrix<Complex64>;

const AXIS_TOL: f64 = 1e-10;

/// Sign of the permutation `(a, b, c, d)` of `(0, 1, 2, 3)`, zero on repeats.
pub fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Checks that `a` is a spacelike unit vector orthogonal to `n`.
pub fn validate_axis(n: &TimelikeUnitVector, a: &FourVector) -> Result<()> {
    let dot = minkowski_dot(n.vector(), a);
    if !a.is_finite() || dot.abs() > AXIS_TOL {
        return Err(Error::InvalidAxis {
            reason: format!("a·n = {dot:e}"),
        });
    }
    let sq = a.square();
    if (sq - 1.0).abs() > AXIS_TOL {
        return Err(Error::InvalidAxis {
            reason: format!("a·a = {sq}"),
        });
    }
    Ok(())
}

/// `J(a) = ½ ε_{μνλρ} n^μ a^ν Σₙ^{λρ}` with `ε_{0123} = 1`; at `n₀` and
/// `a = ê₃` this is `Σ^{12}`.
pub fn rotation_generator_dirac(set: &SpinMatrixSet, a: &FourVector) -> CMat4 {
    let n_up = set.n.vector().0;
    let au = a.0;
    let mut out = CMat4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let w = n_up[mu] * au[nu];
            if w == 0.0 {
                continue;
            }
            for l in 0..4 {
                for r in 0..4 {
                    let eps = levi_civita([mu, nu, l, r]);
                    if eps != 0.0 {
                        out += set.sigma_n[l][r] * Complex64::from(0.5 * eps * w);
                    }
                }
            }
        }
    }
    out
}

/// Spin-½ generator on the little-group labels for rotations about `a`.
pub fn foliated_generator(n: &TimelikeUnitVector, a: &FourVector) -> Result<Mat2> {
    validate_axis(n, a)?;
    let set = spin_matrix_set(n);
    let j = rotation_generator_dirac(&set, a);
    let top: Mat2 = j.fixed_view::<2, 2>(0, 0).into_owned();
    let l = boost_of(n)?;
    Ok(l.inverse().matrix() * top * l.l.matrix())
}

/// `Λ(L(n))⁻¹ a`, the axis as seen in the rest frame of `n` (purely spatial).
pub fn rest_frame_axis(n: &TimelikeUnitVector, a: &FourVector) -> Result<Vector3<f64>> {
    validate_axis(n, a)?;
    let l = spinor_to_lorentz(&boost_of(n)?.l);
    Ok(l.inverse().apply(a).spatial())
}

/// Image of the rest-frame axes under the canonical boost; an orthonormal
/// spacelike triad orthogonal to `n`.
pub fn foliated_triad(n: &TimelikeUnitVector) -> Result<[FourVector; 3]> {
    let l = spinor_to_lorentz(&boost_of(n)?.l);
    Ok(std::array::from_fn(|k| {
        let mut e = FourVector::zero();
        e[k + 1] = 1.0;
        l.apply(&e)
    }))
}

/// `exp(-iθG)` for a spin-½ generator with `(2G)² = 1`.
pub fn spin_half_rotation(generator: &Mat2, theta: f64) -> Mat2 {
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    Mat2::identity() * Complex64::from(c) - generator * Complex64::new(0.0, 2.0 * s)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Product-basis states of `2j` spin-½ factors grouped by the number of
/// down spins; group `i` spans the symmetric state with `m = j − i`.
fn symmetric_groups(two_j: u32) -> Vec<Vec<u32>> {
    let mut groups = vec![Vec::new(); two_j as usize + 1];
    for bits in 0..(1u32 << two_j) {
        groups[bits.count_ones() as usize].push(bits);
    }
    groups
}

const MAX_TWO_J: u32 = 12;

fn check_two_j(two_j: u32) -> Result<()> {
    if two_j > MAX_TWO_J {
        return Err(Error::InvalidArgument(format!(
            "spin {} exceeds the supported maximum {}",
            HalfInt(two_j as i32),
            HalfInt(MAX_TWO_J as i32)
        )));
    }
    Ok(())
}

/// `⟨j m'| U⊗…⊗U |j m⟩` on the symmetric subspace of `2j` spin-½ copies.
pub fn symmetric_power_group(u: &Mat2, two_j: u32) -> Result<CMat> {
    check_two_j(two_j)?;
    let groups = symmetric_groups(two_j);
    let dim = two_j as usize + 1;
    let mut out = CMat::zeros(dim, dim);
    let bit = |b: u32, k: u32| ((b >> k) & 1) as usize;
    for (col, from) in groups.iter().enumerate() {
        let nf = binomial(two_j, col as u32).sqrt();
        for (row, to) in groups.iter().enumerate() {
            let nt = binomial(two_j, row as u32).sqrt();
            let mut acc = Complex64::new(0.0, 0.0);
            for &b in from {
                for &bp in to {
                    let mut amp = Complex64::new(1.0, 0.0);
                    for k in 0..two_j {
                        amp *= u[(bit(bp, k), bit(b, k))];
                    }
                    acc += amp;
                }
            }
            out[(row, col)] = acc / (nf * nt);
        }
    }
    Ok(out)
}

/// `Σ_k 1⊗…⊗G⊗…⊗1` restricted to the symmetric subspace.
pub fn symmetric_power_algebra(g: &Mat2, two_j: u32) -> Result<CMat> {
    check_two_j(two_j)?;
    let groups = symmetric_groups(two_j);
    let dim = two_j as usize + 1;
    let mut out = CMat::zeros(dim, dim);
    for (col, from) in groups.iter().enumerate() {
        let nf = binomial(two_j, col as u32).sqrt();
        for (row, to) in groups.iter().enumerate() {
            if row.abs_diff(col) > 1 {
                continue;
            }
            let nt = binomial(two_j, row as u32).sqrt();
            let mut acc = Complex64::new(0.0, 0.0);
            for &b in from {
                for &bp in to {
                    let diff = b ^ bp;
                    if diff.count_ones() > 1 {
                        continue;
                    }
                    for k in 0..two_j {
                        let mask = 1u32 << k;
                        if diff & !mask != 0 {
                            continue;
                        }
                        let (i, ip) = (((b >> k) & 1) as usize, ((bp >> k) & 1) as usize);
                        acc += g[(ip, i)];
                    }
                }
            }
            out[(row, col)] = acc / (nf * nt);
        }
    }
    Ok(out)
}

/// Spin-`j` generators along the triad of [`foliated_triad`], built from the
/// foliated spin-½ generators.
pub fn spin_generators(n: &TimelikeUnitVector, spin: HalfInt) -> Result<[CMat; 3]> {
    let triad = foliated_triad(n)?;
    let mut out: [CMat; 3] = std::array::from_fn(|_| CMat::zeros(0, 0));
    for (k, axis) in triad.iter().enumerate() {
        let g = foliated_generator(n, axis)?;
        out[k] = symmetric_power_algebra(&g, spin.0 as u32)?;
    }
    Ok(out)
}

/// `exp(-iθ J_a)` in the spin-`j` representation.
pub fn foliated_rotation_matrix(n: &TimelikeUnitVector, a: &FourVector, theta: f64, spin: HalfInt) -> Result<CMat> {
    let g = foliated_generator(n, a)?;
    symmetric_power_group(&spin_half_rotation(&g, theta), spin.0 as u32)
}

/// Standard rest-frame spin matrices `(J_x, J_y, J_z)` from the ladder
/// operators, Condon-Shortley phases, `m` descending.
pub fn standard_spin_matrices(spin: HalfInt) -> [CMat; 3] {
    let dim = spin.multiplicity();
    let j = spin.value();
    let ms: Vec<f64> = spin.projections().map(|m| m.value()).collect();
    let mut jp = CMat::zeros(dim, dim);
    for col in 1..dim {
        let m = ms[col];
        jp[(col - 1, col)] = Complex64::from((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * Complex64::from(0.5);
    let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
    let jz = CMat::from_diagonal(&nalgebra::DVector::from_iterator(dim, ms.iter().map(|m| Complex64::from(*m))));
    [jx, jy, jz]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::Sampler;
    use crate::sl2c::{max_abs, sigma};

    fn dmax(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita([0, 1, 2, 3]), 1.0);
        assert_eq!(levi_civita([1, 0, 2, 3]), -1.0);
        assert_eq!(levi_civita([0, 3, 1, 2]), 1.0);
        assert_eq!(levi_civita([0, 0, 1, 2]), 0.0);
    }

    #[test]
    fn rest_frame_generators_are_half_pauli() {
        let n0 = TimelikeUnitVector::rest();
        let triad = foliated_triad(&n0).unwrap();
        for k in 0..3 {
            let g = foliated_generator(&n0, &triad[k]).unwrap();
            assert!(max_abs(&(g - sigma(k + 1) * Complex64::from(0.5))) < 1e-15);
        }
    }

    #[test]
    fn boosted_generators_pull_back_to_rest_axis() {
        let mut s = Sampler::new(12);
        for _ in 0..50 {
            let n = s.timelike_unit();
            let triad = foliated_triad(&n).unwrap();
            let w = s.unit_vector3();
            let a = triad
                .iter()
                .enumerate()
                .fold(FourVector::zero(), |acc, (k, e)| acc + *e * w[k]);
            let g = foliated_generator(&n, &a).unwrap();
            let a0 = rest_frame_axis(&n, &a).unwrap();
            assert!((a0 - w).norm() < 1e-12);
            let expected = (1..4).fold(Mat2::zeros(), |acc, k| acc + sigma(k) * Complex64::from(0.5 * w[k - 1]));
            assert!(max_abs(&(g - expected)) < 1e-12);
        }
    }

    #[test]
    fn axis_validation() {
        let n0 = TimelikeUnitVector::rest();
        assert!(foliated_generator(&n0, &FourVector::new(1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(foliated_generator(&n0, &FourVector::new(0.0, 2.0, 0.0, 0.0)).is_err());
        let n = TimelikeUnitVector::from_rapidity(&Vector3::x(), 0.5);
        assert!(foliated_generator(&n, &FourVector::new(0.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn symmetric_powers_match_standard_matrices() {
        let n0 = TimelikeUnitVector::rest();
        for tj in 0..7 {
            let spin = HalfInt(tj);
            let gens = spin_generators(&n0, spin).unwrap();
            let std = standard_spin_matrices(spin);
            for k in 0..3 {
                assert!(dmax(&(&gens[k] - &std[k])) < 1e-13, "j = {spin}, k = {k}");
            }
        }
    }

    #[test]
    fn two_pi_rotation_sign() {
        let n0 = TimelikeUnitVector::rest();
        let a = FourVector::new(0.0, 0.0, 0.6, 0.8);
        for tj in 0..6u32 {
            let r = foliated_rotation_matrix(&n0, &a, 2.0 * std::f64::consts::PI, HalfInt(tj as i32)).unwrap();
            let sign = if tj % 2 == 0 { 1.0 } else { -1.0 };
            let target = CMat::identity(tj as usize + 1, tj as usize + 1) * Complex64::from(sign);
            assert!(dmax(&(r - target)) < 1e-14);
        }
    }

    #[test]
    fn group_power_is_unitary_representation() {
        let mut s = Sampler::new(3);
        let n = s.timelike_unit();
        let triad = foliated_triad(&n).unwrap();
        for tj in 1..5 {
            let r1 = foliated_rotation_matrix(&n, &triad[0], 0.7, HalfInt(tj)).unwrap();
            let r2 = foliated_rotation_matrix(&n, &triad[2], -1.3, HalfInt(tj)).unwrap();
            let id = CMat::identity(tj as usize + 1, tj as usize + 1);
            assert!(dmax(&(&r1 * r1.adjoint() - &id)) < 1e-13);
            // composition about one axis adds angles
            let r3 = foliated_rotation_matrix(&n, &triad[0], 1.4, HalfInt(tj)).unwrap();
            assert!(dmax(&(&r1 * &r1 - r3)) < 1e-13);
            let _ = r2;
        }
    }
}

//! Left-nested coupling `((j₁ j₂) j₁₂ j₃) …` of several spins to a total `(J, M)`.

use nalgebra::DVector;
use num_complex::Complex64;

use super::cg::{cg_half, coupled_values};
use super::half::HalfInt;
use super::spin::{spin_generators, CMat};
use crate::error::{Error, Result};
use crate::minkowski::TimelikeUnitVector;

/// Amplitudes `2j + 1`, ordered `m = j, j − 1, …, −j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    pub spin: HalfInt,
    pub amplitudes: DVector<Complex64>,
}

impl SpinState {
    pub fn new(spin: HalfInt, amplitudes: DVector<Complex64>) -> Result<Self> {
        if spin.0 < 0 {
            return Err(Error::NotHalfInteger { value: spin.value() });
        }
        if amplitudes.len() != spin.multiplicity() {
            return Err(Error::DimensionMismatch {
                expected: spin.multiplicity(),
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite spin amplitude".into()));
        }
        Ok(Self { spin, amplitudes })
    }

    /// The basis state `|j m⟩`.
    pub fn basis(spin: HalfInt, m: HalfInt) -> Result<Self> {
        let idx = spin.projection_index(m).ok_or(Error::InvalidProjection {
            j: spin.value(),
            m: m.value(),
        })?;
        let mut amplitudes = DVector::zeros(spin.multiplicity());
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { spin, amplitudes })
    }
}

/// Intermediate totals `j₁₂, j₁₂₃, …`; `Default` picks the largest path that
/// still reaches the requested `J`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum CouplingScheme {
    #[default]
    Default,
    Intermediates(Vec<HalfInt>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledState {
    pub spins: Vec<HalfInt>,
    /// Intermediate totals after each step (length `N − 1`, last one is `J`).
    pub path: Vec<HalfInt>,
    pub j: HalfInt,
    pub m: HalfInt,
    /// Product-basis amplitudes, first factor most significant.
    pub amplitudes: DVector<Complex64>,
}

/// All totals reachable by left-nested coupling.
pub fn reachable_totals(spins: &[HalfInt]) -> Vec<HalfInt> {
    let Some((&first, rest)) = spins.split_first() else {
        return Vec::new();
    };
    let mut current = vec![first];
    for &s in rest {
        let mut next: Vec<HalfInt> = current.iter().flat_map(|&c| coupled_values(c, s)).collect();
        next.sort();
        next.dedup();
        current = next;
    }
    current
}

fn default_path(spins: &[HalfInt], target: HalfInt) -> Option<Vec<HalfInt>> {
    // depth-first, largest intermediate first
    fn go(acc: HalfInt, rest: &[HalfInt], target: HalfInt, path: &mut Vec<HalfInt>) -> bool {
        let Some((&s, tail)) = rest.split_first() else {
            return acc == target;
        };
        let mut options: Vec<HalfInt> = coupled_values(acc, s).collect();
        options.reverse();
        for c in options {
            path.push(c);
            if go(c, tail, target, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    go(spins[0], &spins[1..], target, &mut path).then_some(path)
}

/// Product-basis amplitudes of `|J M⟩` coupled along the left-nested scheme.
pub fn couple_spins(spins: &[HalfInt], scheme: &CouplingScheme, j: HalfInt, m: HalfInt) -> Result<CoupledState> {
    if spins.is_empty() {
        return Err(Error::InvalidArgument("no spins to couple".into()));
    }
    if let Some(bad) = spins.iter().find(|s| s.0 < 0) {
        return Err(Error::NotHalfInteger { value: bad.value() });
    }
    let unreachable = || Error::UnreachableSpin {
        requested: j.value(),
        reachable: reachable_totals(spins).iter().map(|h| h.value()).collect(),
    };
    let path = match scheme {
        CouplingScheme::Default if spins.len() == 1 => Vec::new(),
        CouplingScheme::Default => default_path(spins, j).ok_or_else(unreachable)?,
        CouplingScheme::Intermediates(p) => {
            if p.len() + 1 != spins.len() || (!p.is_empty() && p[p.len() - 1] != j) {
                return Err(Error::InvalidArgument(format!(
                    "coupling path needs {} intermediates ending at J = {j}",
                    spins.len() - 1
                )));
            }
            p.clone()
        }
    };
    if spins.len() == 1 && spins[0] != j {
        return Err(unreachable());
    }
    let total_j = j;
    if total_j.projection_index(m).is_none() {
        return Err(Error::InvalidProjection { j: j.value(), m: m.value() });
    }

    // Columns of `multiplet` are |J_k M⟩ for M descending, in the product
    // basis of the first k + 1 spins.
    let mut acc_j = spins[0];
    let mut multiplet = CMat::identity(spins[0].multiplicity(), spins[0].multiplicity());
    for (step, &s) in spins[1..].iter().enumerate() {
        let next_j = path[step];
        if !super::cg::triangle(acc_j, s, next_j) {
            return Err(unreachable());
        }
        let rows = multiplet.nrows() * s.multiplicity();
        let mut next = CMat::zeros(rows, next_j.multiplicity());
        for (col, big_m) in next_j.projections().enumerate() {
            for (ia, ma) in acc_j.projections().enumerate() {
                for (ib, mb) in s.projections().enumerate() {
                    let c = cg_half(acc_j, ma, s, mb, next_j, big_m);
                    if c == 0.0 {
                        continue;
                    }
                    for r in 0..multiplet.nrows() {
                        next[(r * s.multiplicity() + ib, col)] += multiplet[(r, ia)] * c;
                    }
                }
            }
        }
        multiplet = next;
        acc_j = next_j;
    }
    let col = total_j.projection_index(m).expect("checked above");
    Ok(CoupledState {
        spins: spins.to_vec(),
        path,
        j: total_j,
        m,
        amplitudes: multiplet.column(col).into_owned(),
    })
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` in slot `slot`.
pub fn embed(op: &CMat, dims: &[usize], slot: usize) -> CMat {
    let left: usize = dims[..slot].iter().product();
    let right: usize = dims[slot + 1..].iter().product();
    let id_l = CMat::identity(left, left);
    let id_r = CMat::identity(right, right);
    id_l.kronecker(op).kronecker(&id_r)
}

/// Total spin generators `Σ_k J^{(k)}` along the foliated triad of `n`.
pub fn total_generators(n: &TimelikeUnitVector, spins: &[HalfInt]) -> Result<[CMat; 3]> {
    let dims: Vec<usize> = spins.iter().map(|s| s.multiplicity()).collect();
    let dim: usize = dims.iter().product();
    let mut total: [CMat; 3] = std::array::from_fn(|_| CMat::zeros(dim, dim));
    for (slot, &s) in spins.iter().enumerate() {
        let gens = spin_generators(n, s)?;
        for k in 0..3 {
            total[k] += embed(&gens[k], &dims, slot);
        }
    }
    Ok(total)
}

impl CoupledState {
    /// `max(‖J²ψ − J(J+1)ψ‖, ‖J₃ψ − Mψ‖)` with generators built at `n`.
    pub fn eigen_residual(&self, n: &TimelikeUnitVector) -> Result<f64> {
        let gens = total_generators(n, &self.spins)?;
        let psi = &self.amplitudes;
        let j2 = gens.iter().fold(CMat::zeros(psi.len(), psi.len()), |acc, g| acc + g * g);
        let jv = self.j.value();
        let r1 = (&j2 * psi - psi * Complex64::from(jv * (jv + 1.0))).norm();
        let r2 = (&gens[2] * psi - psi * Complex64::from(self.m.value())).norm();
        Ok(r1.max(r2))
    }
}

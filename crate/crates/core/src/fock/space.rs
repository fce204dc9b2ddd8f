//! Truncated Fock space over a finite orthonormal mode basis.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::many_body::state::{permutations, FOLIATION_TOL};
use crate::many_body::Statistics;
use crate::minkowski::{LorentzTransform, TimelikeUnitVector};

/// Largest Fock dimension we are willing to enumerate.
pub const MAX_DIMENSION: usize = 1 << 21;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeLabel {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin: Option<usize>,
}

/// `M` orthonormal modes on the leaf of one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBasis {
    n: TimelikeUnitVector,
    labels: Vec<ModeLabel>,
}

impl ModeBasis {
    pub fn new(n: TimelikeUnitVector, modes: usize) -> Result<Self> {
        Self::with_labels(n, vec![ModeLabel::default(); modes])
    }

    pub fn with_labels(n: TimelikeUnitVector, labels: Vec<ModeLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("mode basis needs at least one mode".into()));
        }
        Ok(Self { n, labels })
    }

    pub fn n(&self) -> &TimelikeUnitVector {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    /// The same modes on the leaf of `Λn`.
    pub fn transformed(&self, lambda: &LorentzTransform) -> Self {
        Self {
            n: self.n.transform(lambda),
            labels: self.labels.clone(),
        }
    }

    pub fn mode(&self, coeffs: DVector<Complex64>) -> Result<ModeFunction> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        Ok(ModeFunction { n: self.n, coeffs })
    }

    pub fn unit(&self, k: usize) -> Result<ModeFunction> {
        let mut v = DVector::zeros(self.len());
        *v.get_mut(k).ok_or(Error::DimensionMismatch {
            expected: self.len(),
            found: k + 1,
        })? = Complex64::new(1.0, 0.0);
        self.mode(v)
    }
}

/// A one-particle function expanded in a [`ModeBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct ModeFunction {
    pub n: TimelikeUnitVector,
    pub coeffs: DVector<Complex64>,
}

impl ModeFunction {
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_leaf(&self.n, &other.n)?;
        Ok(self.coeffs.dotc(&other.coeffs))
    }
}

fn check_leaf(a: &TimelikeUnitVector, b: &TimelikeUnitVector) -> Result<()> {
    let d = a.distance(b);
    if d > FOLIATION_TOL {
        Err(Error::FoliationMismatch { distance: d })
    } else {
        Ok(())
    }
}

/// Occupations as sorted `(mode, count)` pairs with non-zero counts.
pub type Config = Vec<(u32, u32)>;

#[derive(Clone, Debug)]
pub struct FockSpace {
    basis: ModeBasis,
    statistics: Statistics,
    n_max: usize,
    configs: Vec<Config>,
    index: HashMap<Config, usize>,
    sector_start: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Configurations with `k` particles, earlier modes taking the larger
/// counts first (`20, 11, 02` for two bosons in two modes).
fn sector_configs(modes: usize, k: usize, max_per_mode: usize, out: &mut Vec<Config>) {
    fn go(mode: usize, modes: usize, left: usize, cap: usize, cur: &mut Config, out: &mut Vec<Config>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if mode == modes {
            return;
        }
        // skip modes that cannot absorb the remainder
        if (modes - mode) * cap < left {
            return;
        }
        for c in (0..=left.min(cap)).rev() {
            if c > 0 {
                cur.push((mode as u32, c as u32));
            }
            go(mode + 1, modes, left - c, cap, cur, out);
            if c > 0 {
                cur.pop();
            }
        }
    }
    go(0, modes, k, max_per_mode, &mut Vec::new(), out);
}

/// `Σ_{k ≤ N_max} C(M, k)` for fermions, `Σ_{k ≤ N_max} C(M + k − 1, k)` for bosons.
pub fn fock_dimension(modes: usize, statistics: Statistics, n_max: usize) -> Option<usize> {
    let top = match statistics {
        Statistics::Fermion => n_max.min(modes),
        Statistics::Boson => n_max,
    };
    (0..=top).try_fold(0usize, |acc, k| {
        let c = match statistics {
            Statistics::Fermion => binomial(modes, k)?,
            Statistics::Boson => binomial(modes + k - 1, k)?,
        };
        acc.checked_add(c)
    })
}

pub fn fock_space(basis: ModeBasis, statistics: Statistics, n_max: usize) -> Result<FockSpace> {
    let m = basis.len();
    let dim = fock_dimension(m, statistics, n_max).filter(|&d| d <= MAX_DIMENSION);
    if dim.is_none() {
        return Err(Error::InvalidArgument(format!(
            "Fock dimension for M = {m}, N_max = {n_max} exceeds {MAX_DIMENSION}"
        )));
    }
    let cap = match statistics {
        Statistics::Fermion => 1,
        Statistics::Boson => n_max.max(1),
    };
    let top = match statistics {
        Statistics::Fermion => n_max.min(m),
        Statistics::Boson => n_max,
    };
    let mut configs = Vec::new();
    let mut sector_start = Vec::new();
    for k in 0..=top {
        sector_start.push(configs.len());
        sector_configs(m, k, cap, &mut configs);
    }
    sector_start.push(configs.len());
    let index = configs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    Ok(FockSpace {
        basis,
        statistics,
        n_max,
        configs,
        index,
        sector_start,
    })
}

impl FockSpace {
    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn n(&self) -> &TimelikeUnitVector {
        &self.basis.n
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn config(&self, i: usize) -> &Config {
        &self.configs[i]
    }

    /// Dense occupation numbers of basis state `i`.
    pub fn occupations(&self, i: usize) -> Vec<u32> {
        let mut occ = vec![0; self.basis.len()];
        for &(mode, c) in &self.configs[i] {
            occ[mode as usize] = c;
        }
        occ
    }

    pub fn particle_number(&self, i: usize) -> usize {
        self.configs[i].iter().map(|&(_, c)| c as usize).sum()
    }

    pub fn sector_range(&self, k: usize) -> std::ops::Range<usize> {
        if k + 1 >= self.sector_start.len() {
            return self.dim()..self.dim();
        }
        self.sector_start[k]..self.sector_start[k + 1]
    }

    /// The no-particle state, basis index 0 in every space.
    pub fn vacuum(&self) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dim());
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    /// Same occupation basis on the leaf of `Λn`; the vacuum keeps index 0.
    pub fn relabeled(&self, lambda: &LorentzTransform) -> FockSpace {
        FockSpace {
            basis: self.basis.transformed(lambda),
            ..self.clone()
        }
    }

    /// Whether (anti)commutators are unaffected by truncation on sector `k`.
    pub fn sector_is_exact(&self, k: usize) -> bool {
        k < self.n_max || (self.statistics == Statistics::Fermion && self.n_max >= self.basis.len() && k <= self.n_max)
    }

    fn check_mode(&self, f: &ModeFunction) -> Result<()> {
        check_leaf(&self.basis.n, &f.n)?;
        if f.coeffs.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                found: f.coeffs.len(),
            });
        }
        Ok(())
    }

    /// `a†_k` on one configuration: target index and matrix element.
    fn raise(&self, cfg: &Config, k: u32) -> Option<(usize, f64)> {
        let pos = cfg.partition_point(|&(m, _)| m < k);
        let present = cfg.get(pos).filter(|&&(m, _)| m == k).map(|&(_, c)| c).unwrap_or(0);
        let mut next = cfg.clone();
        let amp = match self.statistics {
            Statistics::Fermion => {
                if present == 1 {
                    return None;
                }
                let before: u32 = cfg[..pos].iter().map(|&(_, c)| c).sum();
                if before.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
            Statistics::Boson => f64::from(present + 1).sqrt(),
        };
        if present == 0 {
            next.insert(pos, (k, 1));
        } else {
            next[pos].1 += 1;
        }
        // states above the truncation are dropped
        self.index.get(&next).map(|&i| (i, amp))
    }

    /// `a†(ψ) v` with `a†(ψ) = Σ ψ_k a†_k`.
    pub fn apply_create(&self, psi: &ModeFunction, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        self.check_mode(psi)?;
        self.check_vec(v)?;
        let mut out = DVector::zeros(self.dim());
        for (j, &c) in v.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            for (k, &w) in psi.coeffs.iter().enumerate() {
                if w == ZERO {
                    continue;
                }
                if let Some((i, amp)) = self.raise(&self.configs[j], k as u32) {
                    out[i] += c * w * amp;
                }
            }
        }
        Ok(out)
    }

    /// `a(ψ) v` with `a(ψ) = Σ ψ̄_k a_k`, the adjoint of [`Self::apply_create`].
    pub fn apply_annihilate(&self, psi: &ModeFunction, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        self.check_mode(psi)?;
        self.check_vec(v)?;
        let mut out = DVector::zeros(self.dim());
        for (j, &c) in v.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let cfg = &self.configs[j];
            for (pos, &(k, _)) in cfg.iter().enumerate() {
                let w = psi.coeffs[k as usize].conj();
                if w == ZERO {
                    continue;
                }
                let mut lower = cfg.clone();
                let amp = match self.statistics {
                    Statistics::Fermion => {
                        let before: u32 = cfg[..pos].iter().map(|&(_, c)| c).sum();
                        if before.is_multiple_of(2) {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    Statistics::Boson => f64::from(cfg[pos].1).sqrt(),
                };
                if lower[pos].1 == 1 {
                    lower.remove(pos);
                } else {
                    lower[pos].1 -= 1;
                }
                let i = self.index[&lower];
                out[i] += c * w * amp;
            }
        }
        Ok(out)
    }

    fn check_vec(&self, v: &DVector<Complex64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    fn operator_from_columns(&self, f: impl Fn(&DVector<Complex64>) -> Result<DVector<Complex64>>) -> Result<FockOperator> {
        let dim = self.dim();
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        let mut e = DVector::zeros(dim);
        for j in 0..dim {
            e[j] = Complex64::new(1.0, 0.0);
            let col = f(&e)?;
            e[j] = ZERO;
            for (i, &c) in col.iter().enumerate() {
                if c != ZERO {
                    rows[i].push((j, c));
                }
            }
        }
        Ok(FockOperator {
            n: self.basis.n,
            statistics: self.statistics,
            dim,
            rows,
        })
    }

    pub fn create(&self, psi: &ModeFunction) -> Result<FockOperator> {
        self.check_mode(psi)?;
        self.operator_from_columns(|e| self.apply_create(psi, e))
    }

    pub fn annihilate(&self, psi: &ModeFunction) -> Result<FockOperator> {
        self.check_mode(psi)?;
        self.operator_from_columns(|e| self.apply_annihilate(psi, e))
    }

    pub fn create_mode(&self, k: usize) -> Result<FockOperator> {
        self.create(&self.basis.unit(k)?)
    }

    pub fn annihilate_mode(&self, k: usize) -> Result<FockOperator> {
        self.annihilate(&self.basis.unit(k)?)
    }

    /// `Σ_k a†_k a_k`.
    pub fn number_operator(&self) -> FockOperator {
        let rows = (0..self.dim())
            .map(|i| match self.particle_number(i) {
                0 => vec![],
                k => vec![(i, Complex64::from(k as f64))],
            })
            .collect();
        FockOperator {
            n: self.basis.n,
            statistics: self.statistics,
            dim: self.dim(),
            rows,
        }
    }

    /// `a†(φ_N) ⋯ a†(φ_1)|0⟩` for `factors = [φ_N, …, φ_1]`.
    pub fn create_state(&self, factors: &[ModeFunction]) -> Result<DVector<Complex64>> {
        let mut v = self.vacuum();
        for f in factors.iter().rev() {
            v = self.apply_create(f, &v)?;
        }
        Ok(v)
    }

    /// `[a(φ), a†(ψ)]∓ v`, `−` for bosons and `+` for fermions.
    pub fn apply_bracket(&self, phi: &ModeFunction, psi: &ModeFunction, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        let ab = self.apply_annihilate(phi, &self.apply_create(psi, v)?)?;
        let ba = self.apply_create(psi, &self.apply_annihilate(phi, v)?)?;
        Ok(match self.statistics {
            Statistics::Boson => ab - ba,
            Statistics::Fermion => ab + ba,
        })
    }

    /// The scalar `c` with `[a(φ), a†(ψ)]∓ = c·1` on every sector unaffected
    /// by truncation; it equals `(φ, ψ)`.
    pub fn bracket(&self, phi: &ModeFunction, psi: &ModeFunction) -> Result<Complex64> {
        let sectors: Vec<usize> = (0..self.sector_start.len() - 1)
            .filter(|&k| self.sector_is_exact(k))
            .collect();
        if sectors.is_empty() {
            return Err(Error::TruncatedSector {
                sector: 0,
                n_max: self.n_max,
            });
        }
        self.bracket_on_sectors(phi, psi, &sectors)
    }

    pub fn bracket_on_sectors(&self, phi: &ModeFunction, psi: &ModeFunction, sectors: &[usize]) -> Result<Complex64> {
        let mut value: Option<Complex64> = None;
        let mut residual: f64 = 0.0;
        let scale = phi.coeffs.norm() * psi.coeffs.norm();
        for &k in sectors {
            if !self.sector_is_exact(k) {
                return Err(Error::TruncatedSector { sector: k, n_max: self.n_max });
            }
            for j in self.sector_range(k) {
                let mut e = DVector::zeros(self.dim());
                e[j] = Complex64::new(1.0, 0.0);
                let mut col = self.apply_bracket(phi, psi, &e)?;
                let diag = col[j];
                let c = *value.get_or_insert(diag);
                col[j] -= c;
                residual = residual.max(col.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        if residual > 1e-12 * scale.max(1.0) {
            return Err(Error::NotScalar { residual });
        }
        value.ok_or(Error::TruncatedSector { sector: 0, n_max: self.n_max })
    }

    /// Tensor image of the `k`-particle part of `v` over `modes^{⊗k}`;
    /// occupation states map to unit-norm (anti)symmetrized products.
    pub fn to_tensor(&self, v: &DVector<Complex64>, k: usize) -> Result<DVector<Complex64>> {
        self.check_vec(v)?;
        let m = self.basis.len();
        let mut out = DVector::zeros(m.pow(k as u32));
        let perms = permutations(k);
        let kfact: f64 = (1..=k).map(|x| x as f64).product();
        for j in self.sector_range(k) {
            let c = v[j];
            if c == ZERO {
                continue;
            }
            let cfg = &self.configs[j];
            let modes: Vec<usize> = cfg
                .iter()
                .flat_map(|&(mode, cnt)| std::iter::repeat_n(mode as usize, cnt as usize))
                .collect();
            let occ_fact: f64 = cfg
                .iter()
                .map(|&(_, cnt)| (1..=cnt).map(f64::from).product::<f64>())
                .product();
            let weight = c / (kfact * occ_fact).sqrt();
            for (perm, odd) in &perms {
                let idx = perm.iter().fold(0, |acc, &p| acc * m + modes[p]);
                let sign = if *odd && self.statistics == Statistics::Fermion { -1.0 } else { 1.0 };
                out[idx] += weight * sign;
            }
        }
        Ok(out)
    }

    /// JSON description of the occupation basis.
    pub fn dump_json(&self) -> serde_json::Value {
        serde_json::json!({
            "statistics": self.statistics,
            "modes": self.basis.len(),
            "n_max": self.n_max,
            "dimension": self.dim(),
            "n": self.basis.n.vector(),
            "labels": self.basis.labels,
            "basis": (0..self.dim()).map(|i| self.occupations(i)).collect::<Vec<_>>(),
        })
    }

    /// One line per basis state: `index,particles,occupations…`.
    pub fn dump_csv(&self) -> String {
        let m = self.basis.len();
        let mut s = String::from("index,particles");
        for k in 0..m {
            s.push_str(&format!(",n{k}"));
        }
        s.push('\n');
        for i in 0..self.dim() {
            s.push_str(&format!("{i},{}", self.particle_number(i)));
            for o in self.occupations(i) {
                s.push_str(&format!(",{o}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Sparse operator on a [`FockSpace`], stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    n: TimelikeUnitVector,
    statistics: Statistics,
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl FockOperator {
    pub fn n(&self) -> &TimelikeUnitVector {
        &self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn identity_like(&self) -> Self {
        Self {
            rows: (0..self.dim).map(|i| vec![(i, Complex64::new(1.0, 0.0))]).collect(),
            ..self.clone()
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        check_leaf(&self.n, &other.n)?;
        if self.dim != other.dim || self.statistics != other.statistics {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                rows[j].push((i, c.conj()));
            }
        }
        for r in &mut rows {
            r.sort_by_key(|e| e.0);
        }
        Self { rows, ..self.clone() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, Complex64> = HashMap::new();
                for &(k, a) in row {
                    for &(j, b) in &other.rows[k] {
                        *acc.entry(j).or_insert(ZERO) += a * b;
                    }
                }
                let mut r: Vec<(usize, Complex64)> = acc.into_iter().filter(|e| e.1 != ZERO).collect();
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        Ok(Self { rows, ..self.clone() })
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        self.compatible(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut acc: HashMap<usize, Complex64> = a.iter().copied().collect();
                for &(j, c) in b {
                    *acc.entry(j).or_insert(ZERO) += c * s;
                }
                let mut r: Vec<(usize, Complex64)> = acc.into_iter().filter(|e| e.1 != ZERO).collect();
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        Ok(Self { rows, ..self.clone() })
    }

    /// `AB − BA` for bosons, `AB + BA` for fermions.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        let sign = match self.statistics {
            Statistics::Boson => -1.0,
            Statistics::Fermion => 1.0,
        };
        ab.add_scaled(&ba, sign)
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(
            self.dim,
            self.rows.iter().map(|row| row.iter().map(|&(j, c)| c * v[j]).sum()),
        )
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                m[(i, j)] = c;
            }
        }
        m
    }

    /// Largest entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.add_scaled(other, -1.0)?;
        Ok(d.rows.iter().flatten().map(|e| e.1.norm()).fold(0.0, f64::max))
    }

    /// Block on the given basis indices (rows and columns).
    pub fn restricted(&self, indices: &[usize]) -> DMatrix<Complex64> {
        let pos: HashMap<usize, usize> = indices.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let mut m = DMatrix::zeros(indices.len(), indices.len());
        for (a, &i) in indices.iter().enumerate() {
            for &(j, c) in &self.rows[i] {
                if let Some(&b) = pos.get(&j) {
                    m[(a, b)] = c;
                }
            }
        }
        m
    }

    /// Non-zero entries `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, c)| (i, j, c)))
    }

    pub fn dump_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dimension": self.dim,
            "statistics": self.statistics,
            "entries": self.entries().map(|(i, j, c)| serde_json::json!([i, j, c.re, c.im])).collect::<Vec<_>>(),
        })
    }

    pub fn dump_csv(&self) -> String {
        let mut s = String::from("row,col,re,im\n");
        for (i, j, c) in self.entries() {
            s.push_str(&format!("{i},{j},{:.15e},{:.15e}\n", c.re, c.im));
        }
        s
    }
}

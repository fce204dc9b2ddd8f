//! Covariant spin matrices attached to a timelike unit vector `n`.
//!
//! Gamma matrices are in the chiral basis and obey `{γ^μ, γ^ν} = -2 g^{μν}`
//! with `g = diag(-1,1,1,1)`, i.e. `(γ⁰)² = 1`, `(γⁱ)² = -1`. With
//! `Σ^{μν} = (i/4)[γ^μ, γ^ν]` this makes `Σ^{ij}` equal `½σ^k ⊕ ½σ^k`
//! for cyclic `(i,j,k)` and the spinor action `S = A ⊕ (A†)⁻¹` intertwine the
//! gammas with the covering map.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minkowski::{metric, projector, FourVector, TimelikeUnitVector, METRIC_DIAG};
use crate::sl2c::{block_diag, dirac_rep, max_abs, sigma, spinor_to_lorentz, CMat4, Mat2, SL2CElement};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::from(x)
}

fn commutator(a: &CMat4, b: &CMat4) -> CMat4 {
    a * b - b * a
}

fn anticommutator(a: &CMat4, b: &CMat4) -> CMat4 {
    a * b + b * a
}

/// An array of 4×4 matrices indexed by two Lorentz indices.
pub type Bivector = [[CMat4; 4]; 4];

/// `γ^μ` and `γ⁵ = iγ⁰γ¹γ²γ³`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    pub gamma: [CMat4; 4],
    pub gamma5: CMat4,
}

impl GammaSet {
    /// `γ_μ = g_{μν} γ^ν`.
    pub fn lowered(&self, mu: usize) -> CMat4 {
        self.gamma[mu] * re(METRIC_DIAG[mu])
    }

    /// Largest deviation from `{γ^μ, γ^ν} = -2 g^{μν}`.
    pub fn clifford_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let target = if mu == nu { -2.0 * METRIC_DIAG[mu] } else { 0.0 };
                let r = anticommutator(&self.gamma[mu], &self.gamma[nu]) - CMat4::identity() * re(target);
                worst = worst.max(max_abs(&r));
            }
        }
        worst
    }
}

/// Chiral-basis gammas: `γ⁰ = [[0,1],[1,0]]`, `γⁱ = [[0,-σᵢ],[σᵢ,0]]`.
pub fn gamma_matrices() -> GammaSet {
    let off_diag = |upper: Mat2, lower: Mat2| {
        let mut g = CMat4::zeros();
        g.fixed_view_mut::<2, 2>(0, 2).copy_from(&upper);
        g.fixed_view_mut::<2, 2>(2, 0).copy_from(&lower);
        g
    };
    let gamma: [CMat4; 4] = std::array::from_fn(|mu| match mu {
        0 => off_diag(sigma(0), sigma(0)),
        k => off_diag(-sigma(k), sigma(k)),
    });
    let gamma5 = gamma[0] * gamma[1] * gamma[2] * gamma[3] * I;
    GammaSet { gamma, gamma5 }
}

/// `Σ^{μν} = (i/4)[γ^μ, γ^ν]`.
pub fn sigma_tensor(gammas: &GammaSet) -> Bivector {
    std::array::from_fn(|mu| {
        std::array::from_fn(|nu| commutator(&gammas.gamma[mu], &gammas.gamma[nu]) * (I * 0.25))
    })
}

/// The spin matrices attached to `n`.
#[derive(Clone, Debug)]
pub struct SpinMatrixSet {
    pub n: TimelikeUnitVector,
    /// `Σ^{μν}`
    pub sigma: Bivector,
    /// `K^μ = Σ^{μν} n_ν`
    pub k: [CMat4; 4],
    /// `Σₙ^{μν} = Σ^{μν} + K^μ n^ν − K^ν n^μ`
    pub sigma_n: Bivector,
    /// `γₙ^μ = γ_λ π^{λμ}`
    pub gamma_n: [CMat4; 4],
}

pub fn spin_matrix_set(n: &TimelikeUnitVector) -> SpinMatrixSet {
    let gammas = gamma_matrices();
    let sigma = sigma_tensor(&gammas);
    let nl = n.lower();
    let k: [CMat4; 4] = std::array::from_fn(|mu| {
        (0..4).fold(CMat4::zeros(), |acc, nu| acc + sigma[mu][nu] * re(nl[nu]))
    });
    let sigma_n: Bivector = std::array::from_fn(|mu| {
        std::array::from_fn(|nu| sigma[mu][nu] + k[mu] * re(n.get(nu)) - k[nu] * re(n.get(mu)))
    });
    let pi = projector(n).matrix;
    let gamma_n: [CMat4; 4] = std::array::from_fn(|mu| {
        (0..4).fold(CMat4::zeros(), |acc, lambda| acc + gammas.lowered(lambda) * re(pi[(lambda, mu)]))
    });
    SpinMatrixSet {
        n: *n,
        sigma,
        k,
        sigma_n,
        gamma_n,
    }
}

impl SpinMatrixSet {
    /// `Σₙ^{μν} X_{μν}` for a tensor with lower indices.
    pub fn contract_sigma_n(&self, x_lower: &Matrix4<f64>) -> CMat4 {
        let mut out = CMat4::zeros();
        for mu in 0..4 {
            for nu in 0..4 {
                out += self.sigma_n[mu][nu] * re(x_lower[(mu, nu)]);
            }
        }
        out
    }

    /// `‖K^μ n_μ‖`.
    pub fn k_dot_n_residual(&self) -> f64 {
        let nl = self.n.lower();
        max_abs(&(0..4).fold(CMat4::zeros(), |acc, mu| acc + self.k[mu] * re(nl[mu])))
    }

    /// `max_ν ‖n_μ Σₙ^{μν}‖` and `max_μ ‖Σₙ^{μν} n_ν‖`.
    pub fn transversality_residual(&self) -> f64 {
        let nl = self.n.lower();
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            let left = (0..4).fold(CMat4::zeros(), |acc, mu| acc + self.sigma_n[mu][a] * re(nl[mu]));
            let right = (0..4).fold(CMat4::zeros(), |acc, nu| acc + self.sigma_n[a][nu] * re(nl[nu]));
            worst = worst.max(max_abs(&left)).max(max_abs(&right));
        }
        worst
    }

    /// `max ‖Σₙ^{μν} + Σₙ^{νμ}‖`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                worst = worst.max(max_abs(&(self.sigma_n[mu][nu] + self.sigma_n[nu][mu])));
            }
        }
        worst
    }

    /// `max ‖Σₙ^{μν} − π^μ_λ π^ν_ρ Σₙ^{λρ}‖`.
    pub fn projection_residual(&self) -> f64 {
        let pm = projector(&self.n).to_mixed().matrix;
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let mut proj = CMat4::zeros();
                for l in 0..4 {
                    for r in 0..4 {
                        let w = pm[(mu, l)] * pm[(nu, r)];
                        if w != 0.0 {
                            proj += self.sigma_n[l][r] * re(w);
                        }
                    }
                }
                worst = worst.max(max_abs(&(proj - self.sigma_n[mu][nu])));
            }
        }
        worst
    }

    /// `max_μ ‖γₙ^μ n_μ‖`.
    pub fn gamma_n_residual(&self) -> f64 {
        let nl = self.n.lower();
        max_abs(&(0..4).fold(CMat4::zeros(), |acc, mu| acc + self.gamma_n[mu] * re(nl[mu])))
    }

    /// Dimension of the complex span of `{K^μ}`.
    pub fn k_span_dimension(&self) -> usize {
        span_dimension(self.k.iter(), 1e-9)
    }

    /// Dimension of the complex span of `{Σₙ^{μν}}`.
    pub fn sigma_n_span_dimension(&self) -> usize {
        span_dimension(self.sigma_n.iter().flatten(), 1e-9)
    }
}

/// Rank of a family of matrices viewed as vectors in `C¹⁶`.
pub fn span_dimension<'a>(mats: impl Iterator<Item = &'a CMat4>, tol: f64) -> usize {
    let cols: Vec<&CMat4> = mats.collect();
    if cols.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(16, cols.len(), |r, c| cols[c][(r % 4, r / 4)]);
    m.singular_values().iter().filter(|s| **s > tol).count()
}

/// Candidate index arrangements for the last term of the `[Σₙ, Σₙ]` bracket.
/// The bracket is fit against
/// `-i[π^{νλ}Σₙ^{μσ} − π^{σμ}Σₙ^{λν} − π^{μλ}Σₙ^{νσ} + π^{σν}X]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LastTerm {
    /// `X = Σₙ^{λν}`; fails to close, kept as a negative control.
    LambdaNu,
    /// `X = Σₙ^{λμ}`
    LambdaMu,
    /// `X = Σₙ^{μλ}`
    MuLambda,
    /// `X = Σₙ^{νλ}`
    NuLambda,
}

impl LastTerm {
    pub const ALL: [LastTerm; 4] = [Self::LambdaNu, Self::LambdaMu, Self::MuLambda, Self::NuLambda];

    fn pick(self, mu: usize, nu: usize, lambda: usize) -> (usize, usize) {
        match self {
            Self::LambdaNu => (lambda, nu),
            Self::LambdaMu => (lambda, mu),
            Self::MuLambda => (mu, lambda),
            Self::NuLambda => (nu, lambda),
        }
    }
}

/// Max-norm residuals of the three bracket families.
#[derive(Clone, Debug, Serialize)]
pub struct LieAlgebraReport {
    /// `[K^μ,K^ν] + iΣₙ^{μν}`
    pub k_k: f64,
    /// `[Σₙ^{μν},K^λ] + i[π^{νλ}K^μ − π^{μλ}K^ν]`
    pub sigma_k: f64,
    /// `[Σₙ,Σₙ]` residual for each candidate last term.
    pub sigma_sigma_candidates: Vec<(LastTerm, f64)>,
    /// Candidate with the smallest residual.
    pub closing_arrangement: LastTerm,
    pub sigma_sigma: f64,
    pub tolerance: f64,
}

impl LieAlgebraReport {
    pub fn max_residual(&self) -> f64 {
        self.k_k.max(self.sigma_k).max(self.sigma_sigma)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < self.tolerance
    }
}

pub fn verify_lie_algebra(n: &TimelikeUnitVector, tol: f64) -> LieAlgebraReport {
    let set = spin_matrix_set(n);
    let pi = projector(n).matrix;
    let (k, sn) = (&set.k, &set.sigma_n);

    let mut k_k: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            let r = commutator(&k[mu], &k[nu]) + sn[mu][nu] * I;
            k_k = k_k.max(max_abs(&r));
        }
    }

    let mut sigma_k: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            for l in 0..4 {
                let rhs = k[mu] * re(pi[(nu, l)]) - k[nu] * re(pi[(mu, l)]);
                let r = commutator(&sn[mu][nu], &k[l]) + rhs * I;
                sigma_k = sigma_k.max(max_abs(&r));
            }
        }
    }

    let mut candidates: Vec<(LastTerm, f64)> = LastTerm::ALL.iter().map(|t| (*t, 0.0)).collect();
    for mu in 0..4 {
        for nu in 0..4 {
            for l in 0..4 {
                for s in 0..4 {
                    let bracket = commutator(&sn[mu][nu], &sn[l][s]);
                    let common = sn[mu][s] * re(pi[(nu, l)])
                        - sn[l][nu] * re(pi[(s, mu)])
                        - sn[nu][s] * re(pi[(mu, l)]);
                    for (term, worst) in candidates.iter_mut() {
                        let (a, b) = term.pick(mu, nu, l);
                        let rhs = common + sn[a][b] * re(pi[(s, nu)]);
                        *worst = worst.max(max_abs(&(bracket + rhs * I)));
                    }
                }
            }
        }
    }
    let (closing_arrangement, sigma_sigma) = candidates
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty candidate list");

    LieAlgebraReport {
        k_k,
        sigma_k,
        sigma_sigma_candidates: candidates,
        closing_arrangement,
        sigma_sigma,
        tolerance: tol,
    }
}

/// `max_{λσ} ‖S⁻¹ Σ_{Λn}^{μν} S Λ_μ^λ Λ_ν^σ − Σₙ^{λσ}‖` with `S = dirac_rep(A)`
/// and `Λ = Λ(A)`.
pub fn verify_covariance(a: &SL2CElement, n: &TimelikeUnitVector) -> f64 {
    let s = dirac_rep(a);
    let s_inv = dirac_rep(&a.inverse());
    let lambda = spinor_to_lorentz(a);
    let lo = lambda.lowered_upper();
    let here = spin_matrix_set(n);
    let there = spin_matrix_set(&n.transform(&lambda));
    let conj: Bivector = std::array::from_fn(|mu| std::array::from_fn(|nu| s_inv * there.sigma_n[mu][nu] * s));
    let mut worst: f64 = 0.0;
    for l in 0..4 {
        for sg in 0..4 {
            let mut acc = CMat4::zeros();
            for mu in 0..4 {
                for nu in 0..4 {
                    let w = lo[(mu, l)] * lo[(nu, sg)];
                    if w != 0.0 {
                        acc += conj[mu][nu] * re(w);
                    }
                }
            }
            worst = worst.max(max_abs(&(acc - here.sigma_n[l][sg])));
        }
    }
    worst
}

/// `max_ν ‖S⁻¹ γ^μ S Λ_μ^ν − γ^ν‖`.
pub fn dirac_intertwining_residual(a: &SL2CElement) -> f64 {
    let g = gamma_matrices();
    let s = dirac_rep(a);
    let s_inv = dirac_rep(&a.inverse());
    let lo = spinor_to_lorentz(a).lowered_upper();
    (0..4)
        .map(|nu| {
            let acc = (0..4).fold(CMat4::zeros(), |acc, mu| acc + s_inv * g.gamma[mu] * s * re(lo[(mu, nu)]));
            max_abs(&(acc - g.gamma[nu]))
        })
        .fold(0.0, f64::max)
}

/// The covariant inner-product metric `G_n = -γ⁰ (γ^μ n_μ)`; in the chiral
/// basis it is `(n·σ̄) ⊕ (n·σ)` and reduces to the identity at `n₀`. The spin
/// coupling is self-adjoint with respect to it.
pub fn covariant_metric(n: &TimelikeUnitVector) -> CMat4 {
    let g = gamma_matrices();
    let nl = n.lower();
    let slash = (0..4).fold(CMat4::zeros(), |acc, mu| acc + g.gamma[mu] * re(nl[mu]));
    -(g.gamma[0] * slash)
}

/// `‖G X − (G X)†‖`, zero iff `X` is self-adjoint under [`covariant_metric`].
pub fn self_adjointness_residual(n: &TimelikeUnitVector, x: &CMat4) -> f64 {
    let gx = covariant_metric(n) * x;
    max_abs(&(gx - gx.adjoint()))
}

/// Field strength with lower indices from electric and magnetic 3-vectors:
/// `F_{i0} = Eᵢ`, `F_{ij} = ε_{ijk} Bₖ`.
pub fn field_tensor(electric: [f64; 3], magnetic: [f64; 3]) -> Matrix4<f64> {
    let mut f = Matrix4::zeros();
    for i in 0..3 {
        f[(i + 1, 0)] = electric[i];
        f[(0, i + 1)] = -electric[i];
    }
    let [bx, by, bz] = magnetic;
    f[(1, 2)] = bz;
    f[(2, 1)] = -bz;
    f[(2, 3)] = bx;
    f[(3, 2)] = -bx;
    f[(3, 1)] = by;
    f[(1, 3)] = -by;
    f
}

/// `F` with both indices projected onto the surface orthogonal to `n`.
pub fn project_field(n: &TimelikeUnitVector, f_lower: &Matrix4<f64>) -> Matrix4<f64> {
    // (F_n)_{μν} = π_μ^α π_ν^β F_{αβ}, π_μ^α = g_{μλ} π^{λα}
    let p = metric() * projector(n).matrix;
    p * f_lower * p.transpose()
}

fn check_antisymmetric(f: &Matrix4<f64>) -> Result<()> {
    let residual = (f + f.transpose()).abs().max();
    if residual > 1e-12 * (1.0 + f.abs().max()) || f.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotAntisymmetric { residual });
    }
    Ok(())
}

/// Parameters of the sharp-momentum covariant Hamiltonian.
#[derive(Clone, Debug)]
pub struct HamiltonianParams {
    pub p: FourVector,
    pub potential: FourVector,
    /// `F_{μν}` (lower indices), constant.
    pub field: Matrix4<f64>,
    pub a5: f64,
    pub mass: f64,
    pub charge: f64,
    pub n: TimelikeUnitVector,
}

/// `(p − eA)²/2M + (e/2M) Σₙ^{μν} F_{μν} − e A₅` at fixed `p`.
pub fn covariant_hamiltonian(params: &HamiltonianParams) -> Result<CMat4> {
    if !(params.mass > 0.0) {
        return Err(Error::NonPositiveMass(params.mass));
    }
    check_antisymmetric(&params.field)?;
    let kinetic = params.p - params.potential * params.charge;
    let scalar = kinetic.square() / (2.0 * params.mass) - params.charge * params.a5;
    let spin = spin_coupling(&params.n, &params.field)? * re(params.charge / (2.0 * params.mass));
    Ok(CMat4::identity() * re(scalar) + spin)
}

/// `Σₙ^{μν} F_{μν}`.
pub fn spin_coupling(n: &TimelikeUnitVector, f_lower: &Matrix4<f64>) -> Result<CMat4> {
    check_antisymmetric(f_lower)?;
    Ok(spin_matrix_set(n).contract_sigma_n(f_lower))
}

/// `-ie γ⁵ (K^μ n^ν − K^ν n^μ) F_{μν}`.
pub fn electric_coupling(n: &TimelikeUnitVector, f_lower: &Matrix4<f64>, charge: f64) -> Result<CMat4> {
    check_antisymmetric(f_lower)?;
    let set = spin_matrix_set(n);
    let g5 = gamma_matrices().gamma5;
    let mut acc = CMat4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let f = f_lower[(mu, nu)];
            if f != 0.0 {
                acc += (set.k[mu] * re(n.get(nu)) - set.k[nu] * re(n.get(mu))) * re(f);
            }
        }
    }
    Ok(g5 * acc * (-I * charge))
}

/// `½σ^k ⊕ ½σ^k`, the rest-frame value of `Σₙ^{ij}` for cyclic `(i,j,k)`.
pub fn rest_frame_spin(k: usize) -> CMat4 {
    let half = sigma(k) * re(0.5);
    block_diag(&half, &half)
}

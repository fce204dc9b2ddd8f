use induced_spin::many_body::spin::{foliated_triad, spin_generators};
use induced_spin::many_body::{
    couple_spins, exchange_pair, exchange_phase_check, inner_product, product, symmetrize, CouplingScheme, HalfInt,
    Normalization, OneBodyBasis, OneParticleState, Statistics,
};
use induced_spin::minkowski::{Sampler, TimelikeUnitVector};
use induced_spin::Error;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

/// Leibniz sum over all permutations, generated here by insertion.
fn leibniz(g: &DMatrix<Complex64>, signed: bool) -> Complex64 {
    let n = g.nrows();
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for k in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    perms
        .iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if signed && inversions % 2 == 1 { -1.0 } else { 1.0 };
            (0..n).map(|i| g[(i, p[i])]).product::<Complex64>() * sign
        })
        .sum()
}

fn random_factors(s: &mut Sampler, basis: &OneBodyBasis, count: usize) -> Vec<OneParticleState> {
    (0..count)
        .map(|_| {
            let v = DVector::from_fn(basis.dim(), |_, _| Complex64::new(s.normal(), s.normal()));
            OneParticleState::new(basis.clone(), v).unwrap()
        })
        .collect()
}

#[test]
fn overlaps_are_determinants_and_permanents() {
    let mut s = Sampler::new(11);
    for count in 1..=4 {
        let basis = OneBodyBasis::abstract_sites(s.timelike_unit(), 2, HalfInt::HALF).unwrap();
        let phi = random_factors(&mut s, &basis, count);
        let psi = random_factors(&mut s, &basis, count);
        let gram = DMatrix::from_fn(count, count, |i, j| phi[i].inner(&psi[j]).unwrap());
        let nfact: f64 = (1..=count).map(|k| k as f64).product();
        for (stats, signed) in [(Statistics::Fermion, true), (Statistics::Boson, false)] {
            let a = symmetrize(&phi, stats, Normalization::Raw).unwrap();
            let b = symmetrize(&psi, stats, Normalization::Raw).unwrap();
            let got = inner_product(&a, &b).unwrap();
            let expected = leibniz(&gram, signed) / nfact;
            assert!((got - expected).norm() < 1e-12 * (1.0 + expected.norm()), "N={count}: {got} vs {expected}");
        }
    }
}

#[test]
fn pauli_exclusion() {
    let mut s = Sampler::new(2);
    let basis = OneBodyBasis::abstract_sites(s.timelike_unit(), 2, HalfInt::HALF).unwrap();
    let f = random_factors(&mut s, &basis, 2);
    let twice = vec![f[0].clone(), f[1].clone(), f[0].clone()];
    let st = symmetrize(&twice, Statistics::Fermion, Normalization::Unit).unwrap();
    assert!(st.is_zero());
    assert_eq!(st.norm(), 0.0);
}

#[test]
fn fermion_pair_sign_flip() {
    let basis = OneBodyBasis::abstract_sites(TimelikeUnitVector::rest(), 2, HalfInt::HALF).unwrap();
    let e = |k: usize| {
        let mut v = DVector::zeros(4);
        v[k] = Complex64::new(1.0, 0.0);
        OneParticleState::new(basis.clone(), v).unwrap()
    };
    let ab = symmetrize(&[e(0), e(3)], Statistics::Fermion, Normalization::Unit).unwrap();
    let ba = symmetrize(&[e(3), e(0)], Statistics::Fermion, Normalization::Unit).unwrap();
    assert!((ab.coeffs() + ba.coeffs()).camax() < 1e-15);
    let plain = product(&[e(0), e(3)]).unwrap();
    let overlap = inner_product(&plain, &ab).unwrap();
    assert!((overlap - Complex64::from(0.5f64.sqrt())).norm() < 1e-15);
}

#[test]
fn mixed_leaves_rejected() {
    let mut s = Sampler::new(5);
    for _ in 0..20 {
        let b1 = OneBodyBasis::abstract_sites(s.timelike_unit(), 1, HalfInt::HALF).unwrap();
        let b2 = OneBodyBasis::abstract_sites(s.timelike_unit(), 1, HalfInt::HALF).unwrap();
        let f1 = random_factors(&mut s, &b1, 1).remove(0);
        let f2 = random_factors(&mut s, &b2, 1).remove(0);
        assert!(matches!(
            symmetrize(&[f1.clone(), f2.clone()], Statistics::Fermion, Normalization::Unit),
            Err(Error::FoliationMismatch { .. })
        ));
        assert!(matches!(product(&[f1, f2]), Err(Error::FoliationMismatch { .. })));
    }
}

#[test]
fn exchange_matches_spin_statistics() {
    let mut s = Sampler::new(9);
    for _ in 0..5 {
        let n = s.timelike_unit();
        let t = foliated_triad(&n).unwrap();
        for tj in 0..=4 {
            let spin = HalfInt(tj);
            let pair = exchange_pair(n, &t[1], &t[0], 2.0, spin, Statistics::for_spin(spin)).unwrap();
            let chk = exchange_phase_check(&pair).unwrap();
            let expected = if spin.is_integer() { 1.0 } else { -1.0 };
            assert!((chk.rotation_phase - expected).norm() < 1e-10, "{spin}: {:?}", chk.rotation_phase);
            assert!(chk.consistent(spin, 1e-10));
        }
    }
}

#[test]
fn wrong_statistics_is_inconsistent() {
    let n = TimelikeUnitVector::rest();
    let t = foliated_triad(&n).unwrap();
    let pair = exchange_pair(n, &t[0], &t[2], 1.0, HalfInt::HALF, Statistics::Boson).unwrap();
    let chk = exchange_phase_check(&pair).unwrap();
    assert!(!chk.consistent(HalfInt::HALF, 1e-10));
}

#[test]
fn unreachable_total_lists_options() {
    let err = couple_spins(&[HalfInt::HALF, HalfInt::HALF], &CouplingScheme::Default, HalfInt(4), HalfInt(0)).unwrap_err();
    match err {
        Error::UnreachableSpin { requested, reachable } => {
            assert_eq!(requested, 2.0);
            assert_eq!(reachable, vec![0.0, 1.0]);
        }
        e => panic!("unexpected {e}"),
    }
}

fn arb_spin() -> impl Strategy<Value = HalfInt> {
    (1..=4i32).prop_map(HalfInt)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetrized_states_have_definite_symmetry(seed in any::<u64>(), count in 2usize..=4, fermion in any::<bool>()) {
        let mut s = Sampler::new(seed);
        let basis = OneBodyBasis::abstract_sites(s.timelike_unit(), 2, HalfInt::HALF).unwrap();
        let f = random_factors(&mut s, &basis, count);
        let stats = if fermion { Statistics::Fermion } else { Statistics::Boson };
        let st = symmetrize(&f, stats, Normalization::Unit).unwrap();
        prop_assert!(st.symmetry_residual() < 1e-12);
        prop_assert!((st.norm() - 1.0).abs() < 1e-12);
        // projection is idempotent on its image
        let again = symmetrize(&f, stats, Normalization::Raw).unwrap();
        let overlap = inner_product(&st, &again).unwrap().norm() / again.norm();
        prop_assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coupled_states_are_joint_eigenstates(seed in any::<u64>(), a in arb_spin(), b in arb_spin(), pick in 0usize..16, mpick in 0usize..16) {
        let mut s = Sampler::new(seed);
        let n = s.timelike_unit();
        let totals = induced_spin::many_body::reachable_totals(&[a, b]);
        let j = totals[pick % totals.len()];
        let ms: Vec<HalfInt> = j.projections().collect();
        let m = ms[mpick % ms.len()];
        let st = couple_spins(&[a, b], &CouplingScheme::Default, j, m).unwrap();
        prop_assert!(st.eigen_residual(&n).unwrap() < 1e-10);
        prop_assert!((st.amplitudes.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin_generators_close(seed in any::<u64>(), tj in 1i32..=6) {
        let mut s = Sampler::new(seed);
        let n = s.timelike_unit();
        let g = spin_generators(&n, HalfInt(tj)).unwrap();
        let i = Complex64::new(0.0, 1.0);
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let comm = &g[a] * &g[b] - &g[b] * &g[a] - &g[c] * i;
            prop_assert!(comm.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
        }
        let j = HalfInt(tj).value();
        let casimir = &g[0] * &g[0] + &g[1] * &g[1] + &g[2] * &g[2];
        let dim = HalfInt(tj).multiplicity();
        let target = DMatrix::<Complex64>::identity(dim, dim) * Complex64::from(j * (j + 1.0));
        prop_assert!((casimir - target).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
    }
}

use induced_spin::cli::derivation_residual;
use induced_spin::fock::{
    band_measure, convergence_order, fock_dimension, fock_space, lattice_field, on_shell_reduce, Lattice, ModeBasis,
    ModeFunction,
};
use induced_spin::many_body::Statistics;
use induced_spin::minkowski::{LorentzTransform, Sampler, TimelikeUnitVector};
use induced_spin::Error;
use nalgebra::{DVector, Vector3};
use num_complex::Complex;
use num_complex::Complex64;
use proptest::prelude::*;

type CInt = Complex<i64>;

fn int_mode(s: &mut Sampler, m: usize) -> Vec<CInt> {
    (0..m)
        .map(|_| CInt::new(s.uniform(-4.0, 5.0).floor() as i64, s.uniform(-4.0, 5.0).floor() as i64))
        .collect()
}

fn as_mode(basis: &ModeBasis, v: &[CInt]) -> ModeFunction {
    basis
        .mode(DVector::from_iterator(v.len(), v.iter().map(|z| Complex64::new(z.re as f64, z.im as f64))))
        .unwrap()
}

#[test]
fn three_body_expansion_is_exact() {
    let mut s = Sampler::new(31);
    for m in [3, 4, 5] {
        let basis = ModeBasis::new(s.timelike_unit(), m).unwrap();
        let space = fock_space(basis.clone(), Statistics::Fermion, m).unwrap();
        for _ in 0..20 {
            let [psi, p3, p2, p1] = [0, 1, 2, 3].map(|_| as_mode(&basis, &int_mode(&mut s, m)));
            assert_eq!(derivation_residual(&space, &psi, [&p3, &p2, &p1]).unwrap(), 0.0);
        }
    }
}

/// `Σ_σ sgn(σ) v_{σ(1)} ⊗ … ⊗ v_{σ(N)}` in Gaussian integers.
fn wedge(vs: &[Vec<CInt>]) -> Vec<CInt> {
    let n = vs.len();
    let m = vs[0].len();
    let mut out = vec![CInt::new(0, 0); m.pow(n as u32)];
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for k in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |i| {
                    let mut q = p.clone();
                    q.insert(i, k);
                    q
                })
            })
            .collect();
    }
    for p in perms {
        let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let sign = if inv % 2 == 1 { -1 } else { 1 };
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut rem = idx;
            let mut term = CInt::new(sign, 0);
            for k in (0..n).rev() {
                term *= vs[p[k]][rem % m];
                rem /= m;
            }
            *slot += term;
        }
    }
    out
}

#[test]
fn fermion_states_are_wedge_products() {
    let mut s = Sampler::new(4);
    let m = 4;
    let basis = ModeBasis::new(TimelikeUnitVector::rest(), m).unwrap();
    let space = fock_space(basis.clone(), Statistics::Fermion, m).unwrap();
    for count in 1..=3 {
        let ints: Vec<Vec<CInt>> = (0..count).map(|_| int_mode(&mut s, m)).collect();
        let modes: Vec<ModeFunction> = ints.iter().map(|v| as_mode(&basis, v)).collect();
        let tensor = space.to_tensor(&space.create_state(&modes).unwrap(), count).unwrap();
        let exact: Vec<Complex64> = wedge(&ints).iter().map(|z| Complex64::new(z.re as f64, z.im as f64)).collect();
        let exact = DVector::from_vec(exact);
        let denom = exact.norm_squared();
        if denom == 0.0 {
            assert!(tensor.norm() < 1e-12);
            continue;
        }
        let c = exact.dotc(&tensor) / denom;
        let resid = (&tensor - &exact * c).norm() / tensor.norm();
        assert!(resid < 1e-13, "N={count}: {resid}");
    }
}

#[test]
fn vacuum_survives_relabeling() {
    let mut s = Sampler::new(6);
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let space = fock_space(ModeBasis::new(s.timelike_unit(), 3).unwrap(), stats, 2).unwrap();
        let lambda = s.lorentz();
        let moved = space.relabeled(&lambda);
        assert_eq!(moved.vacuum(), space.vacuum());
        assert_eq!(moved.dim(), space.dim());
        let expected = space.n().transform(&lambda);
        assert!(moved.n().distance(&expected) < 1e-12);
        // every a_k annihilates the vacuum on either leaf
        for k in 0..3 {
            assert!(moved.annihilate_mode(k).unwrap().apply(&moved.vacuum()).norm() == 0.0);
        }
    }
}

#[test]
fn dimensions() {
    assert_eq!(fock_dimension(4, Statistics::Fermion, 4), Some(16));
    assert_eq!(fock_dimension(4, Statistics::Fermion, 2), Some(11));
    assert_eq!(fock_dimension(6, Statistics::Boson, 4), Some(210));
    assert_eq!(fock_dimension(2, Statistics::Boson, 3), Some(10));
}

#[test]
fn truncated_top_sector_is_refused() {
    let space = fock_space(ModeBasis::new(TimelikeUnitVector::rest(), 2).unwrap(), Statistics::Boson, 1).unwrap();
    let e = space.basis().unit(0).unwrap();
    assert!(space.bracket(&e, &e).is_ok());
    let op = space.annihilate_mode(0).unwrap().bracket(&space.create_mode(0).unwrap()).unwrap();
    let top = space.sector_range(1);
    let block = op.restricted(&top.collect::<Vec<_>>());
    assert!((block[(0, 0)] - Complex64::new(1.0, 0.0)).norm() > 0.5);
}

#[test]
fn mixed_leaf_operators_rejected() {
    let a = fock_space(ModeBasis::new(TimelikeUnitVector::rest(), 2).unwrap(), Statistics::Fermion, 2).unwrap();
    let n = TimelikeUnitVector::from_rapidity(&Vector3::x(), 0.4);
    let b = fock_space(ModeBasis::new(n, 2).unwrap(), Statistics::Fermion, 2).unwrap();
    let err = a.create_mode(0).unwrap().matmul(&b.annihilate_mode(1).unwrap());
    assert!(matches!(err, Err(Error::FoliationMismatch { .. })));
    assert!(matches!(a.create(&b.basis().unit(0).unwrap()), Err(Error::FoliationMismatch { .. })));
}

#[test]
fn lattice_field_equal_point() {
    // small enough for the untruncated fermion space
    let lat = Lattice::new(3, 1, 0.5, 2).unwrap();
    let basis = lat.plane_wave_basis(TimelikeUnitVector::rest()).unwrap();
    let space = fock_space(basis, Statistics::Fermion, lat.modes()).unwrap();
    let phi = lattice_field(&space, &lat, &[2], 1).unwrap();
    let b = phi.bracket(&phi.adjoint()).unwrap();
    let expected = b.identity_like().add_scaled(&b.identity_like(), lat.delta_normalization() - 1.0).unwrap();
    assert!(b.max_abs_diff(&expected).unwrap() < 1e-12);
}

#[test]
fn on_shell_band_against_energy_difference() {
    for (m, d, q) in [(1.0, 1e-4, Vector3::<f64>::zeros()), (0.5, 0.2, Vector3::new(1.0, 2.0, -0.5))] {
        let e = |m2: f64| (q.norm_squared() + m2).sqrt();
        let exact = e(m * m + d) - e(m * m - d);
        assert!((band_measure(m, d, &q).unwrap() - exact).abs() < 1e-10 * exact);
        let c = on_shell_reduce(m, d, &q).unwrap();
        assert!((c - 2.0 * d / exact).abs() < 1e-9 * c);
    }
    let order = convergence_order(1.0, 0.2, &Vector3::new(0.0, 0.7, 0.0)).unwrap();
    assert!(order > 0.9, "{order}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn car_for_arbitrary_modes(seed in any::<u64>(), m in 1usize..=5) {
        let mut s = Sampler::new(seed);
        let basis = ModeBasis::new(s.timelike_unit(), m).unwrap();
        let space = fock_space(basis.clone(), Statistics::Fermion, m).unwrap();
        let rnd = |s: &mut Sampler| basis.mode(DVector::from_fn(m, |_, _| Complex64::new(s.normal(), s.normal()))).unwrap();
        let (phi, psi) = (rnd(&mut s), rnd(&mut s));
        let c = space.bracket(&phi, &psi).unwrap();
        prop_assert!((c - phi.inner(&psi).unwrap()).norm() < 1e-12 * (1.0 + c.norm()));
        let aa = space.annihilate(&phi).unwrap().bracket(&space.annihilate(&psi).unwrap()).unwrap();
        prop_assert!(aa.entries().all(|e| e.2.norm() < 1e-12));
    }

    #[test]
    fn ccr_below_truncation(seed in any::<u64>(), m in 1usize..=4, n_max in 1usize..=4) {
        let mut s = Sampler::new(seed);
        let basis = ModeBasis::new(s.timelike_unit(), m).unwrap();
        let space = fock_space(basis.clone(), Statistics::Boson, n_max).unwrap();
        let rnd = |s: &mut Sampler| basis.mode(DVector::from_fn(m, |_, _| Complex64::new(s.normal(), s.normal()))).unwrap();
        let (phi, psi) = (rnd(&mut s), rnd(&mut s));
        let c = space.bracket(&phi, &psi).unwrap();
        prop_assert!((c - phi.inner(&psi).unwrap()).norm() < 1e-12 * (1.0 + c.norm()));
    }

    #[test]
    fn relabeling_preserves_brackets(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let basis = ModeBasis::new(s.timelike_unit(), 3).unwrap();
        let space = fock_space(basis, Statistics::Fermion, 3).unwrap();
        let lambda: LorentzTransform = s.lorentz();
        let moved = space.relabeled(&lambda);
        for i in 0..3 {
            for j in 0..3 {
                let c = moved.bracket(&moved.basis().unit(i).unwrap(), &moved.basis().unit(j).unwrap()).unwrap();
                let delta = if i == j { 1.0 } else { 0.0 };
                prop_assert!((c - delta).norm() < 1e-14);
            }
        }
    }
}

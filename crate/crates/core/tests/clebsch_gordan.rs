//! Coefficients against an exact rational Racah sum and against direct
//! diagonalization of the total angular momentum.

mod common;

use common::racah_exact;
use induced_spin::many_body::{cg_half, clebsch_gordan, coupled_values, HalfInt};

#[test]
fn matches_exact_racah_sum() {
    let mut worst: f64 = 0.0;
    for tj1 in 0..=6 {
        for tj2 in 0..=6 {
            let (j1, j2) = (HalfInt(tj1), HalfInt(tj2));
            for j in coupled_values(j1, j2) {
                for m1 in j1.projections() {
                    for m2 in j2.projections() {
                        for m in j.projections() {
                            let exact = racah_exact(tj1, m1.0, tj2, m2.0, j.0, m.0);
                            worst = worst.max((cg_half(j1, m1, j2, m2, j, m) - exact).abs());
                        }
                    }
                }
            }
        }
    }
    assert!(worst < 1e-13, "max deviation {worst:e}");
}

#[test]
fn exact_oracle_at_large_spin() {
    for (tj1, tj2, tj) in [(20, 20, 0), (20, 13, 17), (17, 3, 14), (19, 19, 38)] {
        let (j1, j2, j) = (HalfInt(tj1), HalfInt(tj2), HalfInt(tj));
        for m1 in j1.projections() {
            for m2 in j2.projections() {
                let m = HalfInt(m1.0 + m2.0);
                if m.0.abs() > tj {
                    continue;
                }
                let exact = racah_exact(tj1, m1.0, tj2, m2.0, tj, m.0);
                assert!((cg_half(j1, m1, j2, m2, j, m) - exact).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn known_values() {
    let s = 0.5f64.sqrt();
    assert!((clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0.0, 0.0).unwrap() - s).abs() < 1e-15);
    assert!((clebsch_gordan(1.0, 1.0, 1.0, -1.0, 0.0, 0.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!((clebsch_gordan(1.0, 0.0, 1.0, 0.0, 1.0, 0.0).unwrap()).abs() < 1e-15);
    assert!((clebsch_gordan(1.0, 1.0, 0.5, -0.5, 1.5, 0.5).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!((clebsch_gordan(1.0, 0.0, 0.5, 0.5, 0.5, 0.5).unwrap() + (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

/// `J² v` with `J² = J₁² + J₂² + 2J₁zJ₂z + J₁₊J₂₋ + J₁₋J₂₊` on `|m1 m2⟩`.
fn total_j2(tj1: i32, tj2: i32, v: &dyn Fn(i32, i32) -> f64, tm1: i32, tm2: i32) -> f64 {
    let (j1, j2) = (tj1 as f64 / 2.0, tj2 as f64 / 2.0);
    let (m1, m2) = (tm1 as f64 / 2.0, tm2 as f64 / 2.0);
    let raise = |j: f64, m: f64| (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt();
    let lower = |j: f64, m: f64| (j * (j + 1.0) - m * (m - 1.0)).max(0.0).sqrt();
    let mut out = (j1 * (j1 + 1.0) + j2 * (j2 + 1.0) + 2.0 * m1 * m2) * v(tm1, tm2);
    // ⟨m1 m2| J₁₊J₂₋ |m1−1, m2+1⟩ = raise(j1, m1−1) lower(j2, m2+1)
    if tm1 - 2 >= -tj1 && tm2 + 2 <= tj2 {
        out += raise(j1, m1 - 1.0) * lower(j2, m2 + 1.0) * v(tm1 - 2, tm2 + 2);
    }
    if tm1 + 2 <= tj1 && tm2 - 2 >= -tj2 {
        out += lower(j1, m1 + 1.0) * raise(j2, m2 - 1.0) * v(tm1 + 2, tm2 - 2);
    }
    out
}

#[test]
fn coefficients_diagonalize_total_spin() {
    for tj1 in 0..=6 {
        for tj2 in 0..=6 {
            let (j1, j2) = (HalfInt(tj1), HalfInt(tj2));
            for j in coupled_values(j1, j2) {
                let eig = j.value() * (j.value() + 1.0);
                for m in j.projections() {
                    let v = |a: i32, b: i32| cg_half(j1, HalfInt(a), j2, HalfInt(b), j, m);
                    for m1 in j1.projections() {
                        for m2 in j2.projections() {
                            let lhs = total_j2(tj1, tj2, &v, m1.0, m2.0);
                            assert!((lhs - eig * v(m1.0, m2.0)).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn table_rows_are_unitary_columns() {
    for (j1, j2) in [(0.5, 0.5), (1.0, 1.5), (3.0, 2.0)] {
        let table = induced_spin::cli::emit_cg_table(j1, j2).unwrap();
        let mut sums = std::collections::BTreeMap::<(String, String), f64>::new();
        for line in table.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let v: f64 = f[6].parse().unwrap();
            *sums.entry((f[1].to_string(), f[3].to_string())).or_default() += v * v;
        }
        assert!(sums.values().all(|s| (s - 1.0).abs() < 1e-13));
    }
}

#[test]
fn zero_spin_partner_is_identity_coupling() {
    let table = induced_spin::cli::emit_cg_table(2.0, 0.0).unwrap();
    for line in table.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let expected = if f[0] == f[4] && f[1] == f[5] { 1.0 } else { 0.0 };
        assert_eq!(f[6], expected);
    }
}

//! Clebsch-Gordan coefficients in the Condon-Shortley convention.

use super::half::HalfInt;
use crate::error::{Error, Result};

/// `n!` in floating point; exact up to `22!`.
fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Triangle condition `|a − b| ≤ c ≤ a + b` with `a + b + c` integral.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    c.0 >= (a.0 - b.0).abs() && c.0 <= a.0 + b.0 && (a.0 + b.0 + c.0) % 2 == 0
}

fn valid_projection(j: HalfInt, m: HalfInt) -> bool {
    m.0.abs() <= j.0 && (j.0 - m.0) % 2 == 0
}

/// `⟨j1 m1; j2 m2 | J M⟩` on half-integer labels. Zero when a selection rule
/// fails.
pub fn cg_half(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    if j1.0 < 0 || j2.0 < 0 || j.0 < 0 {
        return 0.0;
    }
    if m1.0 + m2.0 != m.0 || !triangle(j1, j2, j) {
        return 0.0;
    }
    if !valid_projection(j1, m1) || !valid_projection(j2, m2) || !valid_projection(j, m) {
        return 0.0;
    }
    // Racah's closed form; all arguments below are integers.
    let (a, b, c) = (j1.0, j2.0, j.0);
    let half = |x: i32| x / 2;
    let delta = factorial(half(a + b - c)) * factorial(half(a - b + c)) * factorial(half(-a + b + c))
        / factorial(half(a + b + c) + 1);
    let pre = (f64::from(c + 1)
        * delta
        * factorial(half(a + m1.0))
        * factorial(half(a - m1.0))
        * factorial(half(b + m2.0))
        * factorial(half(b - m2.0))
        * factorial(half(c + m.0))
        * factorial(half(c - m.0)))
    .sqrt();
    let k_min = 0.max(half(b - c - m1.0)).max(half(a - c + m2.0));
    let k_max = half(a + b - c).min(half(a - m1.0)).min(half(b + m2.0));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(half(a + b - c) - k)
            * factorial(half(a - m1.0) - k)
            * factorial(half(b + m2.0) - k)
            * factorial(half(c - b + m1.0) + k)
            * factorial(half(c - a - m2.0) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    pre * sum
}

/// `⟨j1 m1; j2 m2 | J M⟩`; rejects labels that are not half-integers or
/// projections outside `[-j, j]`.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let (j1, j2, j) = (HalfInt::spin(j1)?, HalfInt::spin(j2)?, HalfInt::spin(j)?);
    let (m1, m2, m) = (HalfInt::from_f64(m1)?, HalfInt::from_f64(m2)?, HalfInt::from_f64(m)?);
    for (jj, mm) in [(j1, m1), (j2, m2), (j, m)] {
        if !valid_projection(jj, mm) {
            return Err(Error::InvalidProjection {
                j: jj.value(),
                m: mm.value(),
            });
        }
    }
    Ok(cg_half(j1, m1, j2, m2, j, m))
}

/// Allowed totals `|j1 − j2|, …, j1 + j2`.
pub fn coupled_values(j1: HalfInt, j2: HalfInt) -> impl Iterator<Item = HalfInt> {
    let lo = (j1.0 - j2.0).abs();
    let hi = j1.0 + j2.0;
    (lo..=hi).step_by(2).map(HalfInt)
}

/// One row of a coefficient table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgRow {
    pub j1: HalfInt,
    pub m1: HalfInt,
    pub j2: HalfInt,
    pub m2: HalfInt,
    pub j: HalfInt,
    pub m: HalfInt,
    pub value: f64,
}

/// Every `(m1, m2, J, M)` combination for fixed `j1, j2`, zeros included.
pub fn cg_table(j1: HalfInt, j2: HalfInt) -> Vec<CgRow> {
    let mut rows = Vec::new();
    for m1 in j1.projections() {
        for m2 in j2.projections() {
            for j in coupled_values(j1, j2) {
                for m in j.projections() {
                    rows.push(CgRow { j1, m1, j2, m2, j, m, value: cg_half(j1, m1, j2, m2, j, m) });
                }
            }
        }
    }
    rows
}

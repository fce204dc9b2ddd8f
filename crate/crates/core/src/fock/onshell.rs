//! Reduction of four-dimensional field brackets to the on-shell form by
//! integrating over a narrow mass band, using `dE = dm²/2E`.

use nalgebra::Vector3;

use crate::error::{Error, Result};

const SIMPSON_INTERVALS: usize = 256;

fn energy(q2: f64, mass_sq: f64) -> f64 {
    (q2 + mass_sq).sqrt()
}

/// `∫ dm² / 2E` over `[m² − δ, m² + δ]` at fixed `q`, composite Simpson.
pub fn band_measure(mass: f64, half_width: f64, q: &Vector3<f64>) -> Result<f64> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::NonPositiveMass(mass));
    }
    let m2 = mass * mass;
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidArgument(format!("band half-width must be positive, got {half_width}")));
    }
    if m2 - half_width <= 0.0 {
        return Err(Error::InvalidBand {
            mass_sq: m2,
            half_width,
        });
    }
    let q2 = q.norm_squared();
    let (lo, hi) = (m2 - half_width, m2 + half_width);
    let h = (hi - lo) / SIMPSON_INTERVALS as f64;
    let f = |s: f64| 0.5 / energy(q2, s);
    let mut acc = f(lo) + f(hi);
    for i in 1..SIMPSON_INTERVALS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * i as f64);
    }
    Ok(acc * h / 3.0)
}

/// Normalization constant `C = 2δ / ∫ dm²/2E`, which tends to `2E` as the
/// band closes.
pub fn on_shell_reduce(mass: f64, half_width: f64, q: &Vector3<f64>) -> Result<f64> {
    Ok(2.0 * half_width / band_measure(mass, half_width, q)?)
}

/// Relative deviation of [`on_shell_reduce`] from `2E`.
pub fn on_shell_error(mass: f64, half_width: f64, q: &Vector3<f64>) -> Result<f64> {
    let target = 2.0 * energy(q.norm_squared(), mass * mass);
    Ok((on_shell_reduce(mass, half_width, q)? - target).abs() / target)
}

/// `log₂(err(δ) / err(δ/2))`, the observed order of convergence in `δ`.
pub fn convergence_order(mass: f64, half_width: f64, q: &Vector3<f64>) -> Result<f64> {
    let e1 = on_shell_error(mass, half_width, q)?;
    let e2 = on_shell_error(mass, 0.5 * half_width, q)?;
    Ok((e1 / e2).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_particle() {
        let c = on_shell_reduce(1.0, 1e-4, &Vector3::zeros()).unwrap();
        assert!((c - 2.0).abs() / 2.0 < 1e-4);
    }

    #[test]
    fn moving_particle() {
        let c = on_shell_reduce(1.0, 1e-4, &Vector3::x()).unwrap();
        assert!((c - 2.0 * 2f64.sqrt()).abs() / (2.0 * 2f64.sqrt()) < 1e-4);
    }

    #[test]
    fn quadrature_matches_energy_difference() {
        // ∫ dm²/2E = E(m² + δ) − E(m² − δ)
        for (m, d, q) in [(1.0, 0.3, 0.0), (2.0, 0.5, 1.5), (0.7, 0.1, 3.0)] {
            let qv = Vector3::new(0.0, q, 0.0);
            let exact = energy(q * q, m * m + d) - energy(q * q, m * m - d);
            assert!((band_measure(m, d, &qv).unwrap() - exact).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn invalid_bands() {
        assert_eq!(on_shell_reduce(-1.0, 0.1, &Vector3::zeros()), Err(Error::NonPositiveMass(-1.0)));
        assert!(matches!(on_shell_reduce(1.0, 1.0, &Vector3::zeros()), Err(Error::InvalidBand { .. })));
        assert!(on_shell_reduce(1.0, 0.0, &Vector3::zeros()).is_err());
    }

    #[test]
    fn convergence_is_at_least_first_order() {
        let order = convergence_order(1.0, 0.1, &Vector3::new(0.3, 0.0, 0.4)).unwrap();
        assert!(order > 0.9, "observed order {order}");
    }
}

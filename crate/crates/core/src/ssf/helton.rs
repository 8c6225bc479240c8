//! Disk form of the trace formula.
//!
//! With `f̂^{(k)}(l) = (l+1) f̂^{(k−1)}(l+1)` the contour pairing becomes
//! `2πi Σ_l l f̂^{(k−1)}(l) η̂_k(−l)`, and Green's formula turns that sum into
//! an area integral of Poisson extensions over the disk.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{SpectralShiftData, TWO_PI_I};
use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::symbols::{poisson_eval, DiskPoint, LaurentPolynomial};

/// Measure constant in `dz ∧ dz̄ = −2i·HELTON_SCALE·dx dy`.
pub const HELTON_SCALE: f64 = 1.0;

pub fn helton_series(ssf: &SpectralShiftData, f: &LaurentPolynomial) -> Result<Complex64> {
    ssf.check_support(f)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, eta) in ssf.etas() {
        let g = f.derivative(k as u32 - 1);
        for (l, c) in g.iter() {
            acc += c * (l as f64) * eta.coeff(-l);
        }
    }
    Ok(acc * TWO_PI_I)
}

/// `Σ_k ∫_{|z|≤R} (∂_z η̃_k ∂_z̄ f̃^{(k−1)} − ∂_z f̃^{(k−1)} ∂_z̄ η̃_k) dz∧dz̄`
/// on a polar grid: `grid` Gauss–Legendre radii and `2·grid` angles.
pub fn helton_quadrature(
    ssf: &SpectralShiftData,
    f: &LaurentPolynomial,
    radius: f64,
    grid: usize,
) -> Result<Complex64> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidConfig {
            field: "radius",
            reason: format!("need 0 < R < 1, got {radius}"),
        });
    }
    if grid == 0 {
        return Err(Error::InvalidConfig {
            field: "grid",
            reason: "grid must be positive".into(),
        });
    }
    let radial = Rule::gauss_legendre(grid, 0.0, radius)?;
    let angles = 2 * grid;
    let dphi = 2.0 * PI / angles as f64;
    let pairs: Vec<(LaurentPolynomial, LaurentPolynomial)> = ssf
        .etas()
        .into_iter()
        .map(|(k, eta)| (f.derivative(k as u32 - 1), eta))
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, w) in radial.pairs() {
        for j in 0..angles {
            let z = Complex64::from_polar(r, j as f64 * dphi);
            let point = DiskPoint::new(z)?;
            let mut integrand = Complex64::new(0.0, 0.0);
            for (g, eta) in &pairs {
                let pg = poisson_eval(g, point);
                let pe = poisson_eval(eta, point);
                integrand += pe.d_dz * pg.d_dzbar - pg.d_dz * pe.d_dzbar;
            }
            acc += integrand * (w * r * dphi);
        }
    }
    Ok(acc * Complex64::new(0.0, -2.0 * HELTON_SCALE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::c64;
    use crate::paths::RemainderKind;
    use crate::ssf::Gauge;
    use std::collections::BTreeMap;

    fn calibration() -> SpectralShiftData {
        // η_1 = z^{−1}: probe of z must equal 2πi, everything else zero
        let mut probes: BTreeMap<i32, Complex64> = (-4..=4).map(|m| (m, c64(0.0, 0.0))).collect();
        probes.insert(1, TWO_PI_I);
        SpectralShiftData::from_probes(RemainderKind::MultContraction, 2, 4, probes, Gauge::Default)
            .unwrap()
    }

    #[test]
    fn series_calibration_value() {
        let ssf = calibration();
        let f = LaurentPolynomial::monomial(1, c64(1.0, 0.0));
        assert!((helton_series(&ssf, &f).unwrap() - TWO_PI_I).norm() < 1e-14);
        assert!((ssf.predict_trace(&f).unwrap() - TWO_PI_I).norm() < 1e-14);
        let c = LaurentPolynomial::constant(c64(3.0, 1.0));
        assert_eq!(helton_series(&ssf, &c).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn quadrature_calibration() {
        let ssf = calibration();
        let f = LaurentPolynomial::monomial(1, c64(1.0, 0.0));
        let q99 = helton_quadrature(&ssf, &f, 0.99, 16).unwrap();
        let q999 = helton_quadrature(&ssf, &f, 0.999, 16).unwrap();
        let e99 = (q99 - TWO_PI_I).norm() / TWO_PI_I.norm();
        let e999 = (q999 - TWO_PI_I).norm() / TWO_PI_I.norm();
        assert!(e99 < 0.02, "{e99}");
        assert!(e999 < e99);
    }

    #[test]
    fn analytic_pairs_vanish() {
        let mut probes: BTreeMap<i32, Complex64> = (-4..=4).map(|m| (m, c64(0.0, 0.0))).collect();
        // η_2 = z⁴ only, via the m = −3 probe
        probes.insert(-3, TWO_PI_I * crate::symbols::falling_factorial(-3, 2));
        let ssf =
            SpectralShiftData::from_probes(RemainderKind::Linear, 2, 4, probes, Gauge::Default)
                .unwrap();
        assert_eq!(ssf.eta_n(), LaurentPolynomial::monomial(4, c64(1.0, 0.0)));
        let f = LaurentPolynomial::monomial(3, c64(1.0, 0.0));
        assert!(helton_quadrature(&ssf, &f, 0.9, 8).unwrap().norm() < 1e-12);
    }
}

//! Surface material model and Fresnel reflection coefficients.
//!
//! The body is a single-layer lossy dielectric: complex relative permittivity
//! `eps' = eps_r - j sigma_c / (2 pi f eps_0)` under the e^{+j w t} convention.
//! Coefficients follow the convention where a perfect conductor gives
//! `gamma_perp = -1` and `gamma_par = +1`; at normal incidence the two differ
//! only by the sign flip of the parallel basis vector under reflection, so the
//! reflected field is basis-independent there.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;

/// Homogeneous surface dielectric.
#[derive(Debug, Clone, Copy)]
pub struct Material {
    pub relative_permittivity: f64,
    pub conductivity_s_per_m: f64,
    pub perfect_conductor: bool,
}

impl Material {
    pub fn dielectric(relative_permittivity: f64, conductivity_s_per_m: f64) -> Result<Self> {
        if relative_permittivity < 1.0 {
            return Err(Error::Parameter(
                "relative permittivity must be >= 1".into(),
            ));
        }
        if conductivity_s_per_m < 0.0 {
            return Err(Error::Parameter("conductivity must be >= 0".into()));
        }
        Ok(Material {
            relative_permittivity,
            conductivity_s_per_m,
            perfect_conductor: false,
        })
    }

    pub fn perfect_conductor() -> Self {
        Material {
            relative_permittivity: 1.0,
            conductivity_s_per_m: 0.0,
            perfect_conductor: true,
        }
    }

    /// Skin dielectric at 77 GHz.
    pub fn skin_77_ghz() -> Self {
        Material::dielectric(6.63, 38.1).expect("preset is valid")
    }

    /// Body dielectric at 24 GHz.
    pub fn body_24_ghz() -> Self {
        Material::dielectric(50.0, 1.0).expect("preset is valid")
    }

    /// Complex relative permittivity at the carrier.
    pub fn complex_permittivity(&self, carrier_hz: f64) -> Complex64 {
        Complex64::new(
            self.relative_permittivity,
            -self.conductivity_s_per_m
                / (2.0 * std::f64::consts::PI * carrier_hz * VACUUM_PERMITTIVITY),
        )
    }
}

/// Fresnel coefficients `(gamma_perp, gamma_par)` for air onto the material
/// at the given incidence angle (radians from the surface normal).
pub fn fresnel_coefficients(
    material: &Material,
    carrier_hz: f64,
    incidence_angle: f64,
) -> (Complex64, Complex64) {
    if material.perfect_conductor {
        return (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let eps = material.complex_permittivity(carrier_hz);
    let cos_i = incidence_angle.cos();
    let sin2_i = incidence_angle.sin().powi(2);
    let transmitted = (eps - Complex64::new(sin2_i, 0.0)).sqrt();
    let gamma_perp = (cos_i - transmitted) / (cos_i + transmitted);
    let gamma_par = (eps * cos_i - transmitted) / (eps * cos_i + transmitted);
    (gamma_perp, gamma_par)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent normal-incidence closed form: (1 - sqrt(eps)) / (1 + sqrt(eps)).
    fn normal_incidence_oracle(material: &Material, carrier_hz: f64) -> Complex64 {
        let root = material.complex_permittivity(carrier_hz).sqrt();
        (Complex64::new(1.0, 0.0) - root) / (Complex64::new(1.0, 0.0) + root)
    }

    #[test]
    fn perfect_conductor_reflects_fully_at_any_angle() {
        let pec = Material::perfect_conductor();
        for angle_deg in [0.0, 15.0, 45.0, 75.0, 89.0] {
            let (gp, gl) = fresnel_coefficients(&pec, 77e9, angle_deg * std::f64::consts::PI / 180.0);
            assert!((gp.norm() - 1.0).abs() < 1e-15);
            assert!((gl.norm() - 1.0).abs() < 1e-15);
            assert!((gp - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
            assert!((gl - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn skin_at_77_ghz_normal_incidence_matches_oracle() {
        let skin = Material::skin_77_ghz();
        let (gp, gl) = fresnel_coefficients(&skin, 77e9, 0.0);
        let oracle = normal_incidence_oracle(&skin, 77e9);
        assert!((gp - oracle).norm() < 1e-12, "perp {gp} vs oracle {oracle}");
        assert!((gl + oracle).norm() < 1e-12, "par must be -oracle at 0 deg");
        let power = gp.norm_sqr();
        assert!(power > 0.0 && power < 1.0, "|Gamma|^2 = {power} not in (0,1)");
        // Frozen from the oracle: |Gamma(0)| = 0.58327 for eps_r = 6.63,
        // sigma = 38.1 S/m at 77 GHz.
        assert!((gp.norm() - 0.58327).abs() < 5e-5, "|Gamma| = {}", gp.norm());
    }

    #[test]
    fn body_at_24_ghz_normal_incidence_matches_oracle() {
        let body = Material::body_24_ghz();
        let (gp, _) = fresnel_coefficients(&body, 24e9, 0.0);
        let oracle = normal_incidence_oracle(&body, 24e9);
        assert!((gp - oracle).norm() < 1e-12);
        // Frozen from the oracle: |Gamma(0)| = 0.75225 for eps_r = 50,
        // sigma = 1 S/m at 24 GHz.
        assert!((gp.norm() - 0.75225).abs() < 5e-5, "|Gamma| = {}", gp.norm());
    }

    #[test]
    fn grazing_incidence_approaches_total_reflection() {
        let skin = Material::skin_77_ghz();
        let (gp, gl) = fresnel_coefficients(&skin, 77e9, 89.9f64.to_radians());
        assert!(gp.norm() > 0.99);
        assert!(gl.norm() > 0.98);
    }
}

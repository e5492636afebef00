use super::field::ScalarField;
use crate::{Error, Result};

/// T(Ω) = ∫_Ω u.
pub fn torsional_rigidity(field: &ScalarField) -> f64 {
    field.integral()
}

/// (∫|φ|)² / (∫|∇φ|² + β∮φ²), bounded above by the torsional rigidity.
pub fn rayleigh_quotient(field: &ScalarField, beta: f64) -> Result<f64> {
    let denom = field.dirichlet_energy() + beta * field.boundary_integral_sq();
    if denom <= 0.0 || field.values().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidParameter {
            name: "field",
            reason: "Rayleigh quotient of the zero function".into(),
        });
    }
    let l1 = field.integral_abs();
    Ok(l1 * l1 / denom)
}

/// `(u_m, u_M)`: minimum and maximum of the field.
pub fn field_extrema(field: &ScalarField) -> (f64, f64) {
    field.extrema()
}

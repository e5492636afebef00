//! P1 finite elements for `-Δu = 1`, `∂u/∂ν + βu = 0`.

mod assemble;
pub mod element;
mod field;
mod functionals;
mod io;
mod solve;
pub mod sparse;

pub use assemble::{assemble_robin_system, load_vector, robin_matrix, stiffness_matrix, SparseSystem};
pub use field::ScalarField;
pub use functionals::{field_extrema, rayleigh_quotient, torsional_rigidity};
pub use io::{field_to_string, field_values_from_str, read_field, write_field, FieldManifest};
pub use solve::{solve, solve_torsion, SolveOptions};

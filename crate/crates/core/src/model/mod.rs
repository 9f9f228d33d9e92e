//! Problem data model: symmetric matrices, simplex points, the program
//! itself, and its JSON encoding.

mod io;
mod point;
mod program;
mod sym;

pub use io::{parse_matrix, parse_problem, serialize_matrix, serialize_problem};
pub use point::{SimplexPoint, DEFAULT_TOL_FEAS, DEFAULT_TOL_SUPPORT};
pub use program::{eval_constraint, ker_dimension, CopositiveProgram, DecisionPoint};
pub use sym::{quad_form, row_action, SymMatrix, SYMMETRY_TOL};

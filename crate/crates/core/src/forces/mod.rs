//! External forces: annulus-supported forces with prescribed moment structure,
//! Gaussian bumps, plane-wave pairs, and the lifted moment matrix.

mod annulus;
mod moments;

pub use annulus::{cube_rotations, make_annulus_force, make_force, ForceKind, ForceSpec};
pub use moments::{moment_matrix, scalar_deviation, MomentMatrix};

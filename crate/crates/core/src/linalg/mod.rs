//! Sparse SPD linear algebra used by the VI solver and the adjoint equations.

mod cg;
mod index_set;
mod laplacian;
mod mtx;
mod sparse;
mod spectral;

pub use cg::{cg_solve, pcg_masked, reduced_solve, reduced_solve_with, CgOutcome, DEFAULT_CG_TOL};
pub use index_set::IndexSet;
pub use laplacian::{assemble_laplacian_2d, grid_point};
pub use mtx::{parse_matrix_market, read_matrix_market};
pub use sparse::SparseSpdMatrix;
pub use spectral::{spectral_bounds, SpectralBounds, DEFAULT_SPECTRAL_TOL};

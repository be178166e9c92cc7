//! Dense kernels for small real matrices (orders up to a few dozen).

mod eigen;
mod expm;
mod matrix;
mod qr;
mod sp;

pub use eigen::{singular_values, spectral_norm, sym_eigen, sym_eigenvalues, SymmetricMatrix, SYMMETRY_TOL};
pub(crate) use eigen::jacobi;
pub use expm::exp_matrix;
pub use matrix::{Lu, Matrix};
pub use qr::qr_pos;
pub use sp::{
    is_hamiltonian, is_symplectic, sp_dim, symplectic_defect, symplectic_form, SpElement, SymplecticMatrix,
    SYMPLECTIC_TOL,
};

//! Polynomial dynamical systems as cubical tensors.
//!
//! A system `dx/dt = A_k x^(k-1) + ... + A_2 x` is stored as one dense
//! [`CubicalTensor`] per order. The crate decides whether such a system is
//! Hamiltonian with a polynomial Hamiltonian, converts between the system and
//! its Hamiltonian `H(x) = B_k x^k + ... + B_2 x^2`, classifies equilibria,
//! and integrates trajectories with a symplectic scheme.
//!
//! ```
//! use polyham_core::{parse_system, DEFAULT_TOL};
//!
//! let sys = parse_system("dx1 = x1^2 + 2*x2 ; dx2 = -2*x1*x2").unwrap();
//! assert!(sys.is_hamiltonian(DEFAULT_TOL).unwrap().is_hamiltonian);
//! let h = sys.extract_hamiltonian(DEFAULT_TOL).unwrap();
//! assert!((h.eval(&[1.0, 2.0]).unwrap() - 6.0).abs() < 1e-12);
//! ```

pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod hamiltonian;
pub mod harness;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod stability;
pub mod tensor;

#[cfg(test)]
mod testutil;

pub use dynamics::{energy_drift, midpoint_step, simulate, Trajectory};
pub use error::{Error, ParseError, Result, SourceSpan};
pub use hamiltonian::{
    decompose, is_hamiltonian_tensor, is_hamiltonian_tensor_def, symplectic_j, HamiltonianCheck,
    PolyHamiltonian, PolySystem, SymplecticMatrix, Witness,
};
pub use harness::{bench_hessian, fd_hessian, random_hamiltonian, BenchReport};
pub use parse::{
    emit_hamiltonian, emit_system, parse_hamiltonian, parse_hamiltonian_with_vars, parse_system,
    parse_system_with_vars,
};
pub use poly::Polynomial;
pub use stability::{
    classify_equilibrium, hamiltonian_definiteness, is_equilibrium, matrix_definiteness,
    newton_refine, tensor_definiteness, Classification, Definiteness, DefinitenessVerdict,
    HamiltonianDefiniteness, Rationale, StabilityVerdict,
};
pub use tensor::{CubicalTensor, Permutation, DEFAULT_TOL};

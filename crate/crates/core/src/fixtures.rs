//! Worked example systems, available as text (see `fixtures/`) and as
//! constructed values.

use crate::hamiltonian::{PolyHamiltonian, PolySystem};
use crate::parse::{parse_hamiltonian_with_vars, parse_system_with_vars};
use crate::poly::{hamiltonian_from_polynomial, system_from_polynomials, Polynomial};

pub const CUBIC_SYSTEM: &str = include_str!("../fixtures/cubic.sys");
pub const CUBIC_HAMILTONIAN: &str = include_str!("../fixtures/cubic.ham");
pub const ANHARMONIC_SYSTEM: &str = include_str!("../fixtures/anharmonic.sys");
pub const ANHARMONIC_HAMILTONIAN: &str = include_str!("../fixtures/anharmonic.ham");
pub const DOUBLE_WELL_SYSTEM: &str = include_str!("../fixtures/double_well.sys");
pub const DOUBLE_WELL_HAMILTONIAN: &str = include_str!("../fixtures/double_well.ham");
pub const HARMONIC_SYSTEM: &str = include_str!("../fixtures/harmonic.sys");
pub const HARMONIC_HAMILTONIAN: &str = include_str!("../fixtures/harmonic.ham");
pub const LOTKA_VOLTERRA_SYSTEM: &str = include_str!("../fixtures/lotka_volterra.sys");
pub const ODD_DIM_SYSTEM: &str = include_str!("../fixtures/odd_dim.sys");
pub const FPUT8_SYSTEM: &str = include_str!("../fixtures/fput8.sys");

fn sys(text: &str) -> PolySystem {
    parse_system_with_vars(text).expect("fixture parses").0
}

fn ham(text: &str) -> PolyHamiltonian {
    parse_hamiltonian_with_vars(text).expect("fixture parses").0
}

/// `dx1 = x1^2 + 2 x2`, `dx2 = -2 x1 x2`; Hamiltonian `x1^2 x2 + x2^2`.
pub fn cubic_system() -> PolySystem {
    sys(CUBIC_SYSTEM)
}

pub fn cubic_hamiltonian() -> PolyHamiltonian {
    ham(CUBIC_HAMILTONIAN)
}

fn two_vars() -> (Polynomial, Polynomial) {
    (Polynomial::var(2, 1), Polynomial::var(2, 2))
}

/// Anharmonic oscillator in `(x, p)`: `dx = p/m`, `dp = -k x - b x^3`.
pub fn anharmonic_system(m: f64, k: f64, b: f64) -> PolySystem {
    let (x, p) = two_vars();
    let x3 = &(&x * &x) * &x;
    let dp = &x.scale(-k) - &x3.scale(b);
    system_from_polynomials(&[p.scale(1.0 / m), dp]).expect("valid system")
}

/// `H = p^2 / (2m) + k x^2 / 2 + b x^4 / 4`.
pub fn anharmonic_hamiltonian(m: f64, k: f64, b: f64) -> PolyHamiltonian {
    let (x, p) = two_vars();
    let x2 = &x * &x;
    let h = &(&(&p * &p).scale(0.5 / m) + &x2.scale(0.5 * k)) + &(&x2 * &x2).scale(0.25 * b);
    hamiltonian_from_polynomial(&h).expect("valid Hamiltonian")
}

/// `dx = 4y - y^3`, `dy = x`.
pub fn double_well_system() -> PolySystem {
    sys(DOUBLE_WELL_SYSTEM)
}

/// `H = 2y^2 - y^4/4 - x^2/2`.
pub fn double_well_hamiltonian() -> PolyHamiltonian {
    ham(DOUBLE_WELL_HAMILTONIAN)
}

pub fn harmonic_system() -> PolySystem {
    sys(HARMONIC_SYSTEM)
}

pub fn harmonic_hamiltonian() -> PolyHamiltonian {
    ham(HARMONIC_HAMILTONIAN)
}

/// `dx_i = x_i (r_i + sum_j a_ij x_j)` with `r = (1, -1)`, `a12 = -1`,
/// `a21 = 1`. Conservative but not Hamiltonian with a polynomial `H`.
pub fn lotka_volterra_system() -> PolySystem {
    sys(LOTKA_VOLTERRA_SYSTEM)
}

pub fn odd_dim_system() -> PolySystem {
    sys(ODD_DIM_SYSTEM)
}

/// Variable names for an `n`-particle chain: `x1..xn, p1..pn`.
pub fn fput_var_names(n: usize) -> Vec<String> {
    (1..=n)
        .map(|j| format!("x{j}"))
        .chain((1..=n).map(|j| format!("p{j}")))
        .collect()
}

// displacement x_j of the chain, zero at the fixed ends j = 0 and j = n + 1
fn chain_coord(n: usize, j: usize) -> Polynomial {
    if j == 0 || j > n {
        Polynomial::zero(2 * n)
    } else {
        Polynomial::var(2 * n, j)
    }
}

/// Fermi–Pasta–Ulam–Tsingou alpha chain with `n` particles and fixed ends
/// `x_0 = x_{n+1} = 0`:
///
/// ```text
/// dx_j = p_j / m
/// dp_j = k (x_{j+1} + x_{j-1} - 2 x_j) [1 + alpha (x_{j+1} - x_{j-1})]
/// ```
///
/// State ordering is `(x_1..x_n, p_1..p_n)`.
pub fn fput_system(n: usize, k: f64, alpha: f64, m: f64) -> PolySystem {
    let dim = 2 * n;
    let mut rhs = Vec::with_capacity(dim);
    for j in 1..=n {
        rhs.push(Polynomial::var(dim, n + j).scale(1.0 / m));
    }
    for j in 1..=n {
        let (next, prev, here) = (
            chain_coord(n, j + 1),
            chain_coord(n, j - 1),
            chain_coord(n, j),
        );
        let lap = &(&next + &prev) - &here.scale(2.0);
        let stretch = (&next - &prev).scale(alpha);
        rhs.push((&lap + &(&lap * &stretch)).scale(k));
    }
    system_from_polynomials(&rhs).expect("valid system")
}

/// Every system fixture that is Hamiltonian, with its variable names.
pub fn hamiltonian_systems() -> Vec<(PolySystem, Vec<String>)> {
    vec![
        parse_system_with_vars(CUBIC_SYSTEM).expect("fixture"),
        parse_system_with_vars(ANHARMONIC_SYSTEM).expect("fixture"),
        parse_system_with_vars(DOUBLE_WELL_SYSTEM).expect("fixture"),
        parse_system_with_vars(HARMONIC_SYSTEM).expect("fixture"),
        parse_system_with_vars(FPUT8_SYSTEM).expect("fixture"),
    ]
}

/// Every system fixture, Hamiltonian or not.
pub fn all_systems() -> Vec<(PolySystem, Vec<String>)> {
    let mut out = hamiltonian_systems();
    out.push(parse_system_with_vars(LOTKA_VOLTERRA_SYSTEM).expect("fixture"));
    out.push(parse_system_with_vars(ODD_DIM_SYSTEM).expect("fixture"));
    out
}

pub fn all_hamiltonians() -> Vec<(PolyHamiltonian, Vec<String>)> {
    [
        CUBIC_HAMILTONIAN,
        ANHARMONIC_HAMILTONIAN,
        DOUBLE_WELL_HAMILTONIAN,
        HARMONIC_HAMILTONIAN,
    ]
    .iter()
    .map(|t| parse_hamiltonian_with_vars(t).expect("fixture"))
    .collect()
}

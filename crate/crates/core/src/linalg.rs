//! Thin wrappers over nalgebra's dense solvers.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalues of a symmetric matrix, ascending, with unit eigenvectors in
/// matching order.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Full spectrum of a general real matrix (real Schur form), sorted by real
/// part then imaginary part.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let mut ev: Vec<Complex<f64>> = m.clone().complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let lu = a.clone().lu();
    let x = lu
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::SingularJacobian)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularJacobian);
    }
    Ok(x.iter().copied().collect())
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_spectrum_is_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, -1.0]);
        let (vals, vecs) = symmetric_eigen(&m);
        assert_eq!(vals, vec![-1.0, 4.0]);
        assert_eq!(
            vecs[0].iter().map(|v| v.abs()).collect::<Vec<_>>(),
            vec![0.0, 1.0]
        );
    }

    #[test]
    fn general_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 4.0, 1.0, 0.0]);
        let ev = eigenvalues(&m);
        assert!((ev[0].re + 2.0).abs() < 1e-12 && ev[0].im.abs() < 1e-12);
        assert!((ev[1].re - 2.0).abs() < 1e-12);
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -8.0, 1.0, 0.0]);
        let ev = eigenvalues(&rot);
        for e in &ev {
            assert!(e.re.abs() < 1e-12);
            assert!((e.im.abs() - 8f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_solve_is_an_error() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            solve(&m, &[1.0, 1.0]),
            Err(Error::SingularJacobian)
        ));
        let x = solve(&DMatrix::identity(2, 2), &[3.0, 4.0]).unwrap();
        assert_eq!(x, vec![3.0, 4.0]);
    }
}

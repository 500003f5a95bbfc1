//! Density matrices with explicit basis labels and a small Hermitian
//! eigenvalue routine.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::DEFAULT_TOLERANCE;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    basis: Vec<String>,
    #[serde(serialize_with = "serialize_matrix")]
    matrix: DMatrix<Complex64>,
    weight: f64,
}

impl DensityMatrix {
    /// Wraps a Hermitian matrix. `weight` is carried along untouched; it
    /// records the pre-normalization trace of whatever the matrix was
    /// derived from.
    pub fn new(basis: Vec<String>, matrix: DMatrix<Complex64>, weight: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != basis.len() {
            return Err(Error::domain(format!(
                "{}x{} matrix for {} basis labels",
                matrix.nrows(),
                matrix.ncols(),
                basis.len()
            )));
        }
        let rho = DensityMatrix { basis, matrix, weight };
        let asym = rho.hermiticity_defect();
        if asym > DEFAULT_TOLERANCE * rho.scale().max(1.0) {
            return Err(Error::domain(format!("matrix is not Hermitian (defect {asym:e})")));
        }
        Ok(rho)
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Divides by the trace; the resulting weight is the old trace.
    pub fn normalized(&self) -> Result<DensityMatrix> {
        let tr = self.trace();
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::domain(format!("cannot normalize matrix with trace {tr:e}")));
        }
        Ok(DensityMatrix {
            basis: self.basis.clone(),
            matrix: self.matrix.map(|z| z / tr),
            weight: tr,
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    fn scale(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn serialize_matrix<S>(m: &DMatrix<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error>
where
    S: serde::Serializer,
{
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<[f64; 2]> = (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Eigenvalues of a Hermitian matrix in ascending order. The 2×2 case uses
/// the closed form; larger matrices go through a Hermitian eigendecomposition.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut vals = match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj()).norm();
            let mean = 0.5 * (a + d);
            let half_gap = (0.5 * (a - d)).hypot(b);
            vec![mean - half_gap, mean + half_gap]
        }
        _ => {
            let herm = (m + m.adjoint()).map(|z| z * 0.5);
            herm.symmetric_eigenvalues().iter().copied().collect()
        }
    };
    vals.sort_by(f64::total_cmp);
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_matches_general_solver() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(0.3, 0.0)]);
        let closed = hermitian_eigenvalues(&m);
        let general: Vec<f64> = {
            let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for (a, b) in closed.iter().zip(&general) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((closed.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn larger_matrices_have_real_spectrum() {
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5, 0.0), c(0.3, 0.0), c(0.2, 0.0)]));
        let vals = hermitian_eigenvalues(&diag);
        assert!((vals[0] - 0.2).abs() < 1e-15);
        assert!((vals[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(vec!["↓".into(), "↑".into()], m, 1.0).is_err());
    }

    #[test]
    fn normalization_records_weight() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.64, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.04, 0.0)]);
        let rho = DensityMatrix::new(vec!["↓".into(), "↑".into()], m, 0.0).unwrap();
        let n = rho.normalized().unwrap();
        assert!((n.weight() - 0.68).abs() < 1e-15);
        assert!((n.trace() - 1.0).abs() < 1e-15);
        assert!((n.entry(0, 0).re - 16.0 / 17.0).abs() < 1e-15);
    }
}

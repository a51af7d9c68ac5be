//! Dense compression of rules onto finite bases, and Hermitian spectra.

use crate::basis::{BasisElement, MultiIndex};
use crate::error::{Error, Result};
use crate::rule::LinearRule;
use crate::sparse::SparseVector;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance used to group eigenvalues into multiplicities.
pub const GROUP_TOL: f64 = 1e-8;

/// Column j holds the expansion of `rule(domain[j])` in `codomain`.
///
/// Any output term outside the codomain with magnitude above 1e-12 (relative
/// to the image norm) is a leakage error.
pub fn matrix_of(rule: &LinearRule, domain: &[BasisElement], codomain: &[BasisElement]) -> Result<CMatrix> {
    let index: HashMap<&BasisElement, usize> = codomain.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut m = CMatrix::zeros(codomain.len(), domain.len());
    for (j, e) in domain.iter().enumerate() {
        let image = rule.apply_element(e);
        let scale = image.norm().max(1.0);
        for (t, c) in image.iter() {
            match index.get(t) {
                Some(&i) => m[(i, j)] += *c,
                None if c.norm() > 1e-12 * scale => {
                    return Err(Error::Leakage(format!("{t} (from {e}, amplitude {:.3e})", c.norm())))
                }
                None => {}
            }
        }
    }
    Ok(m)
}

/// Eigen-decomposition summary of one Hermitian block.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub residual: f64,
    pub gamma: Option<MultiIndex>,
}

impl SpectrumResult {
    /// Distinct eigenvalues with multiplicities, grouped within [`GROUP_TOL`].
    pub fn grouped(&self) -> Vec<(f64, usize)> {
        group_values(&self.eigenvalues, GROUP_TOL)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::INFINITY)
    }
}

/// Group sorted values; a group starts at its smallest member.
pub fn group_values(sorted: &[f64], rel_tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((start, count)) if (v - *start).abs() <= rel_tol * start.abs().max(1.0) => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Full eigendecomposition of a Hermitian matrix: sorted eigenvalues and
/// matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    let scale = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let dev = hermitian_deviation(m);
    if dev > 1e-10 * (1.0 + scale) {
        return Err(Error::NonHermitian(dev));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Sorted spectrum with the largest eigenpair residual ‖Av − λv‖.
pub fn hermitian_spectrum(m: &CMatrix, gamma: Option<MultiIndex>) -> Result<SpectrumResult> {
    let (values, vectors) = hermitian_eigen(m)?;
    let mut residual: f64 = 0.0;
    for (c, &lam) in values.iter().enumerate() {
        let v = vectors.column(c);
        let r = m * v - v * Complex64::new(lam, 0.0);
        residual = residual.max(r.norm());
    }
    Ok(SpectrumResult {
        eigenvalues: values,
        residual,
        gamma,
    })
}

/// Max entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Smallest singular value.
pub fn sigma_min(m: &CMatrix) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Dense representation of sparse vectors over the union of their supports.
pub struct DenseFrame {
    pub support: Vec<BasisElement>,
    pub columns: CMatrix,
}

impl DenseFrame {
    pub fn new(vectors: &[SparseVector]) -> Self {
        let mut support: Vec<BasisElement> = vectors
            .iter()
            .flat_map(|v| v.iter().map(|(e, _)| e.clone()))
            .collect();
        support.sort();
        support.dedup();
        let index: HashMap<&BasisElement, usize> = support.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut columns = CMatrix::zeros(support.len(), vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            for (e, c) in v.iter() {
                columns[(index[e], j)] = *c;
            }
        }
        DenseFrame { support, columns }
    }

    /// Least-squares coordinates of `v` in the frame and the norm of the part
    /// of `v` outside the span (including terms outside the support).
    pub fn coordinates(&self, v: &SparseVector) -> (DVector<Complex64>, f64) {
        let index: HashMap<&BasisElement, usize> = self.support.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut dense = DVector::<Complex64>::zeros(self.support.len());
        let mut outside = 0.0;
        for (e, c) in v.iter() {
            match index.get(e) {
                Some(&i) => dense[i] = *c,
                None => outside += c.norm_sqr(),
            }
        }
        let a = &self.columns;
        let gram = a.adjoint() * a;
        let rhs = a.adjoint() * &dense;
        let coords = gram
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&rhs))
            .unwrap_or_else(|| gram.svd(true, true).solve(&rhs, 1e-14).expect("svd solve"));
        let resid = (&dense - a * &coords).norm_squared() + outside;
        (coords, resid.sqrt())
    }
}

/// Compression of a rule onto span(vectors) in the column convention
/// rule(b_j) = Σ_i M_ij b_i. Returns the matrix and the largest relative
/// out-of-span residual.
pub fn compress(rule: &LinearRule, vectors: &[SparseVector]) -> (CMatrix, f64) {
    let frame = DenseFrame::new(vectors);
    let mut m = CMatrix::zeros(vectors.len(), vectors.len());
    let mut leak: f64 = 0.0;
    for (j, v) in vectors.iter().enumerate() {
        let image = rule.apply(v);
        let (coords, resid) = frame.coordinates(&image);
        leak = leak.max(resid / image.norm().max(v.norm()).max(1e-300));
        m.set_column(j, &coords);
    }
    (m, leak)
}

/// Orthonormalize sparse vectors (modified Gram–Schmidt), dropping dependent ones.
pub fn orthonormalize(vectors: &[SparseVector]) -> Vec<SparseVector> {
    let mut out: Vec<SparseVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = u.inner(&w);
            w.axpy(-c, u);
        }
        let nrm = w.norm();
        if nrm > 1e-10 * v.norm().max(1.0) {
            out.push(w.scale(Complex64::new(1.0 / nrm, 0.0)));
        }
    }
    out
}

/// Coefficients of det(μ − M) for a 3×3 matrix, highest degree first
/// (leading 1 omitted): μ³ + c2 μ² + c1 μ + c0 ↦ [c2, c1, c0].
pub fn char_poly3(m: &CMatrix) -> [Complex64; 3] {
    assert_eq!((m.nrows(), m.ncols()), (3, 3));
    let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let det = m.determinant();
    [-tr, minors, -det]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{FormWord, Space};
    use crate::rule::Ops;

    #[test]
    fn identity_matrix() {
        let o = Ops::new(Space::new(1, 1).unwrap());
        let basis: Vec<_> = (0..3).map(|b| BasisElement::new(vec![b], FormWord::EMPTY)).collect();
        let m = matrix_of(&o.id(), &basis, &basis).unwrap();
        assert_eq!(m, CMatrix::identity(3, 3));
    }

    #[test]
    fn creation_one_by_one_and_leak() {
        let o = Ops::new(Space::new(1, 1).unwrap());
        let vac = vec![BasisElement::vacuum(1)];
        let one = vec![BasisElement::new(vec![1], FormWord::EMPTY)];
        let m = matrix_of(&o.cre(0), &vac, &one).unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(1.0, 0.0));
        assert!(matches!(matrix_of(&o.cre(0), &vac, &vac), Err(Error::Leakage(_))));
        let z = matrix_of(&o.ann(0), &vac, &vac).unwrap();
        assert_eq!(z[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn grouping() {
        let g = group_values(&[1.0, 1.0 + 1e-12, 2.0], 1e-8);
        assert_eq!(g, vec![(1.0, 2), (2.0, 1)]);
    }

    #[test]
    fn char_poly_of_diagonal() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ]));
        let c = char_poly3(&m);
        assert!((c[0].re + 6.0).abs() < 1e-14);
        assert!((c[1].re - 11.0).abs() < 1e-14);
        assert!((c[2].re + 6.0).abs() < 1e-14);
    }
}

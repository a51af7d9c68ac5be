//! Closed-form spectral data for the Heisenberg Laplacian and reconciliation
//! with numerically diagonalized blocks.

use crate::basis::{Generator, MultiIndex, Space};
use crate::error::{Error, Result};
use crate::heisenberg::{HeisenbergContext, LaplacianMode};
use crate::linalg::{self, SpectrumResult};
use crate::rule::{LinearRule, Ops};
use crate::sparse::SparseVector;
use crate::basis::{BasisElement, FormWord};
use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

/// Which closed-form line produced a value, with its parameters.
/// `g` is `None` for the g-independent family 2; `sign` is ±1 for family 4, 0 otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub family: u8,
    pub g: Option<u32>,
    pub r: Option<u32>,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogValue {
    pub value: f64,
    pub provenance: Vec<Provenance>,
}

fn floor_half(x: i64) -> f64 {
    x.div_euclid(2) as f64
}

/// Value of one catalog line. `r` is ignored for family 1 and `g` for family 2.
pub fn family_value(n: usize, p: usize, k: f64, family: u8, g: u32, r: u32, sign: i8) -> f64 {
    let d = n as f64 - p as f64;
    let (g, ri) = (g as f64, r as i64);
    let r = r as f64;
    match family {
        1 => 2.0 * k * (g - 1.0) + k * k + d * k,
        2 => k * k + (d + r + 1.0) * k + floor_half(ri + 1) * (d + floor_half(ri) + 1.0),
        3 => 2.0 * k * (g - 1.0) + k * k + (d + r) * k + floor_half(ri) * (d + floor_half(ri + 1)),
        4 => {
            let s = d + r;
            let centre = 2.0 * k * g + k * k + s * k + 0.5 * s + floor_half(ri - 1) * (d + floor_half(ri));
            let rad = (0.25 * s * s + s * k + 2.0 * k * g + k * k).sqrt();
            centre + sign as f64 * rad
        }
        _ => f64::NAN,
    }
}

/// All catalog values for g ≤ g_max and 1 ≤ r ≤ p, coincident values merged.
///
/// Family 1 contributes only g = 1 when p = n: the space carrying it is then
/// one-dimensional.
pub fn eigenvalues(n: usize, p: usize, k: f64, g_max: u32) -> Result<Vec<CatalogValue>> {
    if p > n {
        return Err(Error::Precondition(format!("catalog needs p <= n (got p={p}, n={n}); reflect first")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Precondition(format!("k must be positive, got {k}")));
    }
    if g_max == 0 {
        return Err(Error::Precondition("g_max must be >= 1".into()));
    }
    let mut raw: Vec<(f64, Provenance)> = Vec::new();
    let g1_max = if p == n { 1 } else { g_max };
    for g in 1..=g1_max {
        raw.push((
            family_value(n, p, k, 1, g, 0, 0),
            Provenance { family: 1, g: Some(g), r: None, sign: 0 },
        ));
    }
    for r in 1..=p as u32 {
        raw.push((
            family_value(n, p, k, 2, 0, r, 0),
            Provenance { family: 2, g: None, r: Some(r), sign: 0 },
        ));
        for g in 1..=g_max {
            raw.push((
                family_value(n, p, k, 3, g, r, 0),
                Provenance { family: 3, g: Some(g), r: Some(r), sign: 0 },
            ));
            for sign in [-1i8, 1] {
                raw.push((
                    family_value(n, p, k, 4, g, r, sign),
                    Provenance { family: 4, g: Some(g), r: Some(r), sign },
                ));
            }
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<CatalogValue> = Vec::new();
    for (v, prov) in raw {
        match out.last_mut() {
            Some(last) if (v - last.value).abs() <= 1e-12 * v.abs().max(1.0) => last.provenance.push(prov),
            _ => out.push(CatalogValue { value: v, provenance: vec![prov] }),
        }
    }
    Ok(out)
}

/// Lowest eigenvalue of Δ_{p,n}(k) and its multiplicity, with Hodge
/// reflection for p > n.
pub fn lowest(n: usize, p: usize, k: f64) -> Result<(f64, u64)> {
    if n == 0 || p > 2 * n + 1 {
        return Err(Error::Precondition(format!("need n >= 1 and p <= 2n+1 (n={n}, p={p})")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Precondition(format!("k must be positive, got {k}")));
    }
    let q = if p <= n { p } else { 2 * n + 1 - p };
    Ok((k * k + (n - q) as f64 * k, binomial(n as u64, q as u64)))
}

pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn sym_ops(n: usize) -> Result<Ops> {
    if n < 2 {
        return Err(Error::Precondition("symmetric subspace needs n >= 2".into()));
    }
    Ok(Ops::new(Space::new(n, 1)?))
}

/// Un-normalized ε(p, n) in V^{p,n,|γ|e_1} (mode 0 plays the distinguished
/// direction).
pub fn symmetric_epsilon(p: usize, n: usize, gamma_abs: u32) -> Result<SparseVector> {
    let o = sym_ops(n)?;
    let mut beta = vec![0u32; n];
    beta[0] = gamma_abs;
    let mut v = SparseVector::basis(BasisElement::new(beta, FormWord::EMPTY));
    for step in 1..=p {
        let rule = if step % 2 == 1 {
            let parts: Vec<LinearRule> = (1..n).map(|j| o.prod(&[&o.cre(j), &o.e(Generator::Holo(j))])).collect();
            o.sum(&parts)
        } else {
            let parts: Vec<LinearRule> = (1..n).map(|j| o.prod(&[&o.ann(j), &o.e(Generator::Anti(j))])).collect();
            (-2.0 / step as f64) * &o.sum(&parts)
        };
        v = rule.apply(&v);
    }
    Ok(v)
}

/// The four basis vectors of the symmetric subspace of 2q-forms, in the
/// un-normalized form used by the reference matrix.
pub fn symmetric_basis(q: usize, n: usize, gamma_abs: u32) -> Result<[SparseVector; 4]> {
    if q < 2 {
        return Err(Error::Precondition("symmetric basis needs p = 2q >= 4".into()));
    }
    if gamma_abs == 0 {
        return Err(Error::Precondition("symmetric basis needs |gamma| >= 1".into()));
    }
    if 2 * q > 2 * n + 1 {
        return Err(Error::Precondition(format!("degree 2q = {} exceeds 2n+1", 2 * q)));
    }
    let o = sym_ops(n)?;
    let eps = |p: usize| symmetric_epsilon(p, n, gamma_abs);
    let (t1, tb1, tw) = (Generator::Holo(0), Generator::Anti(0), Generator::Central(0));
    let ttb = o.prod(&[&o.e(t1), &o.e(tb1)]);
    let g = gamma_abs as f64;
    let c = |x: f64| Complex64::new(x, 0.0);

    let mut b1 = ttb.apply(&eps(2 * q - 2)?).scale(c(-g));
    b1.axpy(c(1.0), &o.prod(&[&o.ann(0), &o.e(tb1)]).apply(&eps(2 * q - 1)?));

    let mut b2 = ttb.apply(&eps(2 * q - 2)?);
    b2.axpy(c(1.0), &eps(2 * q)?);

    let mut b3 = o.prod(&[&o.e(tw), &o.e(t1), &o.e(tb1)]).apply(&eps(2 * q - 3)?);
    b3.axpy(c(1.0), &o.prod(&[&o.cre(0), &o.e(tw), &o.e(t1)]).apply(&eps(2 * q - 2)?));
    b3.axpy(c(1.0), &o.e(tw).apply(&eps(2 * q - 1)?));

    let b4 = o.prod(&[&o.ann(0), &o.e(tw), &o.e(tb1)]).apply(&eps(2 * q - 2)?);
    Ok([b1, b2, b3, b4])
}

/// The 4×4 matrix of Δ_{2q,n}(k) on the symmetric basis (column convention).
/// `verbatim` reproduces the uncorrected entry (2,2) = q(n−q−1); otherwise the
/// value q(n−q+1) obtained by direct compression is used.
pub fn symmetric_matrix_reference(q: usize, n: usize, k: f64, gamma_abs: u32, verbatim: bool) -> Matrix4<f64> {
    let (qf, nf, g, sk) = (q as f64, n as f64, gamma_abs as f64, k.sqrt());
    let base = 2.0 * k * g + k * k + nf * k;
    let m22 = if verbatim { qf * (nf - qf - 1.0) } else { qf * (nf - qf + 1.0) };
    #[rustfmt::skip]
    let m = Matrix4::new(
        (qf - 1.0) * (nf - qf), 0.0,  sk,                     sk,
        -qf * g,                m22,  -qf * sk,               0.0,
        sk * g,                 -sk,  k + qf * (nf - qf),     0.0,
        sk * (g + nf - qf),     -sk,  0.0,                    -k + qf * (nf - qf),
    );
    m + Matrix4::identity() * base
}

/// Closed-form eigenvalues, sorted. `verbatim` uses the uncorrected centre term
/// q(n−q−1) for the ± pair; otherwise (q−1)(n−q).
pub fn symmetric_closed_form(q: usize, n: usize, k: f64, gamma_abs: u32, verbatim: bool) -> Vec<f64> {
    let (qf, nf, g) = (q as f64, n as f64, gamma_abs as f64);
    let base = 2.0 * k * g + nf * k + k * k;
    let centre = if verbatim { qf * (nf - qf - 1.0) } else { (qf - 1.0) * (nf - qf) };
    let rad = (0.25 * nf * nf + nf * k + 2.0 * k * g + k * k).sqrt();
    let mut v = vec![
        base + qf * (nf - qf),
        base + qf * (nf - qf),
        base + 0.5 * nf + centre - rad,
        base + 0.5 * nf + centre + rad,
    ];
    v.sort_by(f64::total_cmp);
    v
}

fn real_eigenvalues(m: &Matrix4<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.complex_eigenvalues().iter().map(|c| c.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetricReport {
    pub q: usize,
    pub n: usize,
    pub k: f64,
    pub gamma_abs: u32,
    /// Compression of Δ onto the un-normalized basis (column convention), row-major.
    pub computed: Vec<f64>,
    /// Largest imaginary part of the computed compression.
    pub computed_imag: f64,
    pub reference: Vec<f64>,
    /// max |computed − reference|.
    pub entry_deviation: f64,
    /// max |computed − uncorrected|, kept as a diagnostic.
    pub verbatim_entry_deviation: f64,
    /// Eigenvalues of the Hermitian compression on the orthonormalized basis.
    pub eigenvalues: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub eigen_deviation: f64,
    /// Eigenvalues of the reference matrix vs the closed form.
    pub reference_eigen_deviation: f64,
    pub verbatim_closed_form_deviation: f64,
    /// Relative out-of-span residual of Δ on the basis (0 means invariant).
    pub leak: f64,
    /// max norm of U_ij b (j off the distinguished mode) and of (χ_ij − 1) b
    /// (both off it) over the basis.
    pub symmetry_residual: f64,
}

/// Compresses Δ_{2q,n}(k) onto the symmetric basis and compares with the
/// reference matrix and closed-form eigenvalues.
pub fn symmetric_check(q: usize, n: usize, k: f64, gamma_abs: u32) -> Result<SymmetricReport> {
    let ctx = HeisenbergContext::new(n, k, 2 * q)?;
    let lap = ctx.laplacian(LaplacianMode::Explicit);
    let basis = symmetric_basis(q, n, gamma_abs)?;
    let (m, leak) = linalg::compress(&lap, &basis);
    if leak > 1e-9 {
        return Err(Error::Leakage(format!("symmetric basis not invariant (residual {leak:.3e})")));
    }
    let computed = Matrix4::from_fn(|i, j| m[(i, j)].re);
    let computed_imag = m.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let reference = symmetric_matrix_reference(q, n, k, gamma_abs, false);
    let verbatim = symmetric_matrix_reference(q, n, k, gamma_abs, true);
    let entry_deviation = (computed - reference).abs().max();
    let verbatim_entry_deviation = (computed - verbatim).abs().max();

    let ortho = linalg::orthonormalize(&basis);
    let (h, _) = linalg::compress(&lap, &ortho);
    let eigenvalues = linalg::hermitian_spectrum(&h, None)?.eigenvalues;
    let closed_form = symmetric_closed_form(q, n, k, gamma_abs, false);
    let dev = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let eigen_deviation = if eigenvalues.len() == 4 { dev(&eigenvalues, &closed_form) } else { f64::INFINITY };
    let reference_eigen_deviation = dev(&real_eigenvalues(&reference), &closed_form);
    let verbatim_closed_form_deviation = dev(&symmetric_closed_form(q, n, k, gamma_abs, true), &closed_form);

    let o = Ops::new(ctx.space());
    let mut symmetry_residual: f64 = 0.0;
    for b in &basis {
        for i in 0..n {
            for j in (1..n).filter(|&j| j != i) {
                symmetry_residual = symmetry_residual.max(ctx.u_pair(i, j)?.apply(b).norm());
                if i >= 1 && i < j {
                    symmetry_residual = symmetry_residual.max(o.chi(i, j).apply(b).sub(b).norm());
                }
            }
        }
    }
    let flat = |m: &Matrix4<f64>| (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
    Ok(SymmetricReport {
        q,
        n,
        k,
        gamma_abs,
        computed: flat(&computed),
        computed_imag,
        reference: flat(&reference),
        entry_deviation,
        verbatim_entry_deviation,
        eigenvalues,
        closed_form,
        eigen_deviation,
        reference_eigen_deviation,
        verbatim_closed_form_deviation,
        leak,
        symmetry_residual,
    })
}

/// Eigenvalues of a real symmetric matrix, sorted (used by tests and reports).
pub fn symmetric_eigenvalues(m: &Matrix4<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// One numeric eigenvalue with its catalog match, if any.
#[derive(Clone, Debug, Serialize)]
pub struct MatchRow {
    pub gamma: Option<MultiIndex>,
    pub eigenvalue: f64,
    pub residual: f64,
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub rows: Vec<MatchRow>,
    pub numeric_orphans: Vec<MatchRow>,
    pub catalog_orphans: Vec<CatalogValue>,
}

impl CoverageReport {
    pub fn is_clean(&self) -> bool {
        self.numeric_orphans.is_empty() && self.catalog_orphans.is_empty()
    }
}

/// Reconciles block spectra (|γ| ≤ gamma_max) with the catalog.
///
/// Every numeric eigenvalue must lie within `tol` of a catalog value (searched
/// with a generous g bound so boundary shells are not misreported), and every
/// catalog value with g ≤ gamma_max − 2 must be hit. Degrees p > n use the
/// Hodge-reflected catalog.
pub fn match_spectrum(
    numeric: &[SpectrumResult],
    n: usize,
    p: usize,
    k: f64,
    gamma_max: i32,
    tol: f64,
) -> Result<CoverageReport> {
    let pc = if p <= n { p } else { 2 * n + 1 - p };
    let wide = (gamma_max.max(1) as u32) + p as u32 + 4;
    let catalog = eigenvalues(n, pc, k, wide)?;
    let values: Vec<f64> = catalog.iter().map(|c| c.value).collect();
    let nearest = |x: f64| -> Option<usize> {
        let i = values.partition_point(|&v| v < x);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < values.len())
            .min_by(|&a, &b| (values[a] - x).abs().total_cmp(&(values[b] - x).abs()))
    };
    let mut rows = Vec::new();
    let mut numeric_orphans = Vec::new();
    let mut all: Vec<f64> = Vec::new();
    for s in numeric {
        for &x in &s.eigenvalues {
            all.push(x);
            let prov = nearest(x)
                .filter(|&j| (values[j] - x).abs() <= tol)
                .map(|j| catalog[j].provenance[0]);
            let row = MatchRow {
                gamma: s.gamma.clone(),
                eigenvalue: x,
                residual: s.residual,
                provenance: prov,
            };
            if prov.is_none() {
                numeric_orphans.push(row.clone());
            }
            rows.push(row);
        }
    }
    all.sort_by(f64::total_cmp);
    let g_cover = gamma_max - 2;
    let mut catalog_orphans = Vec::new();
    for c in &catalog {
        let required = c.provenance.iter().any(|pr| pr.g.is_none_or(|g| (g as i32) <= g_cover));
        if !required {
            continue;
        }
        let i = all.partition_point(|&v| v < c.value - tol);
        let hit = i < all.len() && (all[i] - c.value).abs() <= tol;
        if !hit {
            catalog_orphans.push(c.clone());
        }
    }
    Ok(CoverageReport {
        rows,
        numeric_orphans,
        catalog_orphans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_small_case() {
        let k = 1.0;
        assert_eq!(family_value(1, 1, k, 1, 1, 0, 0), 1.0);
        assert_eq!(family_value(1, 1, k, 1, 2, 0, 0), 3.0);
        assert_eq!(family_value(1, 1, k, 3, 1, 1, 0), 2.0);
        assert_eq!(family_value(1, 1, k, 3, 2, 1, 0), 4.0);
        assert_eq!(family_value(1, 1, k, 2, 0, 1, 0), 4.0);
        let plus = family_value(1, 1, k, 4, 1, 1, 1);
        assert!((plus - (4.5 + 4.25f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn lowest_values() {
        assert_eq!(lowest(2, 1, 1.0).unwrap(), (2.0, 2));
        assert_eq!(lowest(3, 3, 2.0).unwrap(), (4.0, 1));
        assert_eq!(lowest(1, 0, 1.0).unwrap(), (2.0, 1));
        assert_eq!(lowest(2, 4, 1.0).unwrap(), lowest(2, 1, 1.0).unwrap());
    }

    #[test]
    fn epsilon_low_degrees() {
        let e0 = symmetric_epsilon(0, 3, 2).unwrap();
        assert_eq!(e0.len(), 1);
        let e2 = symmetric_epsilon(2, 3, 2).unwrap();
        assert_eq!(e2.len(), 2);
        for (el, c) in e2.iter() {
            assert_eq!(el.beta, vec![2, 0, 0]);
            assert!((c - Complex64::new(-1.0, 0.0)).norm() < 1e-14 || (c - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn compression_matches_reference() {
        for &(q, n, k, g) in &[(2usize, 3usize, 1.0, 1u32), (2, 4, 0.7, 2), (3, 4, 1.3, 1)] {
            let r = symmetric_check(q, n, k, g).unwrap();
            assert!(r.leak < 1e-10, "{r:?}");
            assert!(r.entry_deviation < 1e-9, "{r:?}");
            assert!(r.eigen_deviation < 1e-9, "{r:?}");
            assert!(r.reference_eigen_deviation < 1e-9, "{r:?}");
            assert!(r.symmetry_residual < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn spec_symmetric_example() {
        let v = symmetric_closed_form(2, 4, 1.0, 1, false);
        let r = 11f64.sqrt();
        let want = [11.0 - r, 11.0, 11.0, 11.0 + r];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_matches_catalog() {
        for &(n, p) in &[(1usize, 1usize), (2, 1), (2, 2), (2, 3), (1, 0)] {
            let ctx = HeisenbergContext::new(n, 1.0, p).unwrap();
            let sweep = ctx.sweep(6).unwrap();
            let cov = match_spectrum(&sweep, n, p, 1.0, 6, 1e-8).unwrap();
            assert!(cov.is_clean(), "n={n} p={p}: {:?} {:?}", cov.numeric_orphans, cov.catalog_orphans);
        }
    }
}

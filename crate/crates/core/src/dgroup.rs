//! The double Heisenberg group D^{4n+2} (2n ladder pairs, two-dimensional
//! centre): explicit frame, Δ₁(λ), eigenvector families, invariant 3×3
//! subspaces, and the cubic bounds on the lowest eigenvalue.

use crate::basis::{BasisElement, FormWord, Generator, Space};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::nilpotent::{self, FormComplex, FrameReport, StepTwoAlgebra, SymplecticFrame};
use crate::rule::{LinearRule, Ops};
use crate::sparse::SparseVector;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DGroupContext {
    pub n: usize,
    pub lambda: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    U,
    V,
    W,
    WPrime,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::U, Family::V, Family::W, Family::WPrime];

    /// Eigenvalue offset from μ′ in units of |λ|.
    pub fn offset(self) -> f64 {
        match self {
            Family::U => -3.0,
            Family::V => 3.0,
            Family::W => 1.0,
            Family::WPrime => -1.0,
        }
    }

    /// Extra weight in the combination (s_{j+1}+c) f_j − (s_j+c) f_{j+1}.
    fn weight_shift(self) -> u32 {
        match self {
            Family::V | Family::W => 2,
            Family::U | Family::WPrime => 0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::U => "u",
            Family::V => "v",
            Family::W => "w",
            Family::WPrime => "w'",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" => Ok(Family::U),
            "v" => Ok(Family::V),
            "w" => Ok(Family::W),
            "w'" | "wp" | "wprime" => Ok(Family::WPrime),
            _ => Err(Error::Input(format!("unknown family {s:?} (expected u, v, w, w')"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subspace {
    First,
    Second,
}

impl FromStr for Subspace {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Subspace::First),
            "second" => Ok(Subspace::Second),
            _ => Err(Error::Input(format!("unknown subspace {s:?} (expected first, second)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DFrameReport {
    /// max |λ([Z_a, Z̄_b]) − i|λ|δ_ab|.
    pub hermitian_pairing: f64,
    /// max |λ([Z_a, Z_b])|.
    pub holomorphic_pairing: f64,
    /// max deviation of [Z_0, Z_1] from i|λ|⁻¹(−λ₂W₁ + λ₁W₂).
    pub cross_bracket: f64,
    pub symplectic: FrameReport,
}

impl DGroupContext {
    pub fn new(n: usize, lambda: [f64; 2]) -> Result<Self> {
        if n == 0 || 2 * n > 31 {
            return Err(Error::Precondition(format!("n must be in 1..=15, got {n}")));
        }
        if !lambda.iter().all(|x| x.is_finite()) || lambda[0].hypot(lambda[1]) == 0.0 {
            return Err(Error::Precondition("lambda must be finite and nonzero".into()));
        }
        Ok(DGroupContext { n, lambda })
    }

    pub fn r(&self) -> f64 {
        self.lambda[0].hypot(self.lambda[1])
    }

    pub fn pairs(&self) -> usize {
        2 * self.n
    }

    pub fn space(&self) -> Space {
        Space { modes: 2 * self.n, central: 2 }
    }

    pub fn algebra(&self) -> StepTwoAlgebra {
        StepTwoAlgebra::dgroup(self.n)
    }

    /// Per block of four X's:
    /// Z_{2b} = (iλ₁X₀ + iλ₂X₁ + |λ|X₂)/(√2|λ|), Z_{2b+1} = (iλ₂X₀ − iλ₁X₁ + |λ|X₃)/(√2|λ|).
    pub fn frame(&self) -> Vec<Vec<Complex64>> {
        let [l1, l2] = self.lambda;
        let r = self.r();
        let s = 1.0 / (std::f64::consts::SQRT_2 * r);
        let mut out = Vec::with_capacity(2 * self.n);
        for b in 0..self.n {
            let o = 4 * b;
            let mut z0 = vec![Complex64::new(0.0, 0.0); 4 * self.n];
            z0[o] = Complex64::new(0.0, l1 * s);
            z0[o + 1] = Complex64::new(0.0, l2 * s);
            z0[o + 2] = Complex64::new(r * s, 0.0);
            let mut z1 = vec![Complex64::new(0.0, 0.0); 4 * self.n];
            z1[o] = Complex64::new(0.0, l2 * s);
            z1[o + 1] = Complex64::new(0.0, -l1 * s);
            z1[o + 3] = Complex64::new(r * s, 0.0);
            out.push(z0);
            out.push(z1);
        }
        out
    }

    pub fn symplectic_frame(&self) -> SymplecticFrame {
        SymplecticFrame::from_complex(&self.frame())
    }

    pub fn frame_check(&self) -> Result<DFrameReport> {
        let alg = self.algebra();
        let z = self.frame();
        let r = self.r();
        let lam = |c: &[Complex64]| c[0] * self.lambda[0] + c[1] * self.lambda[1];
        let (mut herm, mut holo): (f64, f64) = (0.0, 0.0);
        for a in 0..z.len() {
            for b in 0..z.len() {
                let zb: Vec<Complex64> = z[b].iter().map(|c| c.conj()).collect();
                let want = if a == b { Complex64::new(0.0, r) } else { Complex64::new(0.0, 0.0) };
                herm = herm.max((lam(&alg.bracket(&z[a], &zb)) - want).norm());
                holo = holo.max(lam(&alg.bracket(&z[a], &z[b])).norm());
            }
        }
        let cross = alg.bracket(&z[0], &z[1]);
        let [l1, l2] = self.lambda;
        let want = [Complex64::new(0.0, -l2 / r), Complex64::new(0.0, l1 / r)];
        let cross_bracket = (cross[0] - want[0]).norm().max((cross[1] - want[1]).norm());
        Ok(DFrameReport {
            hermitian_pairing: herm,
            holomorphic_pairing: holo,
            cross_bracket,
            symplectic: nilpotent::frame_invariants(&alg, &self.lambda, &self.symplectic_frame())?,
        })
    }

    /// Δ₁(λ) in the explicit frame (the rule acts on forms of every degree).
    pub fn laplacian(&self) -> Result<LinearRule> {
        Ok(FormComplex::new(&self.algebra(), &self.symplectic_frame(), &self.lambda)?.laplacian())
    }

    fn ops(&self) -> Ops {
        Ops::new(self.space())
    }

    fn check_beta(&self, beta: &[u32]) -> Result<()> {
        if beta.len() != 2 * self.n {
            return Err(Error::DimensionMismatch(format!("beta has length {}, expected {}", beta.len(), 2 * self.n)));
        }
        Ok(())
    }

    /// U_ij = a_i*a_j − e(τ^j)i(Z_i) + e(τ^{ī})i(Z_{j̄}); U_jj for i = j.
    pub fn u(&self, i: usize, j: usize) -> Result<LinearRule> {
        let sp = self.space();
        sp.check_mode(i)?;
        sp.check_mode(j)?;
        let o = self.ops();
        Ok(o.sum(&[
            o.prod(&[&o.cre(i), &o.ann(j)]),
            -&o.prod(&[&o.e(Generator::Holo(j)), &o.i(Generator::Holo(i))]),
            o.prod(&[&o.e(Generator::Anti(i)), &o.i(Generator::Anti(j))]),
        ]))
    }

    /// One of the four displayed 1-forms for ladder pair j (modes 2j, 2j+1).
    /// Vanishing vectors come back empty.
    pub fn unweighted_vector(&self, beta: &[u32], family: Family, j: usize) -> Result<SparseVector> {
        self.check_beta(beta)?;
        if j >= self.n {
            return Err(Error::IndexOutOfRange { what: "pair", index: j, size: self.n });
        }
        let o = self.ops();
        let (a, b) = (2 * j, 2 * j + 1);
        let psi = SparseVector::basis(BasisElement::new(beta.to_vec(), FormWord::EMPTY));
        let (h, hb) = (Generator::Holo, Generator::Anti);
        let (first, second, sign) = match family {
            Family::U => (o.prod(&[&o.ann(b), &o.e(h(a))]), o.prod(&[&o.ann(a), &o.e(h(b))]), -1.0),
            Family::V => (o.prod(&[&o.cre(b), &o.e(hb(a))]), o.prod(&[&o.cre(a), &o.e(hb(b))]), -1.0),
            Family::W => (o.prod(&[&o.cre(a), &o.e(h(a))]), o.prod(&[&o.cre(b), &o.e(h(b))]), 1.0),
            Family::WPrime => (o.prod(&[&o.ann(a), &o.e(hb(a))]), o.prod(&[&o.ann(b), &o.e(hb(b))]), 1.0),
        };
        let mut v = first.apply(&psi);
        v.axpy(Complex64::new(sign, 0.0), &second.apply(&psi));
        Ok(v)
    }

    fn central(&self, beta: &[u32], c1: f64, c2: f64) -> SparseVector {
        SparseVector::from_terms([
            (BasisElement::new(beta.to_vec(), FormWord { holo: 0, anti: 0, central: 1 }), Complex64::new(c1, 0.0)),
            (BasisElement::new(beta.to_vec(), FormWord { holo: 0, anti: 0, central: 2 }), Complex64::new(c2, 0.0)),
        ])
    }

    /// μ′ = |λ|(2n + 2|β|) + |λ|² (with 2n ladder pairs).
    pub fn mu_prime(&self, beta_total: u32) -> f64 {
        let r = self.r();
        r * (2.0 * self.n as f64 + 2.0 * beta_total as f64) + r * r
    }

    /// Checks the family eigenvectors (s_{j+1}+c) f_j − (s_j+c) f_{j+1},
    /// s_j = β_{2j} + β_{2j+1}, against μ′ + offset·|λ|.
    pub fn family_eigencheck(&self, beta: &[u32]) -> Result<FamilyReport> {
        self.check_beta(beta)?;
        if self.n < 2 {
            return Ok(FamilyReport { rows: vec![], max_residual: 0.0 });
        }
        if beta.contains(&0) {
            return Err(Error::Precondition(format!("family check needs all beta entries >= 1: {beta:?}")));
        }
        let lap = self.laplacian()?;
        let mu = self.mu_prime(beta.iter().sum());
        let s = |j: usize| beta[2 * j] + beta[2 * j + 1];
        let mut rows = Vec::new();
        for family in Family::ALL {
            for j in 0..self.n - 1 {
                let c = family.weight_shift();
                let mut v = self.unweighted_vector(beta, family, j)?.scale(Complex64::new((s(j + 1) + c) as f64, 0.0));
                v.axpy(Complex64::new(-((s(j) + c) as f64), 0.0), &self.unweighted_vector(beta, family, j + 1)?);
                let target = mu + family.offset() * self.r();
                let lv = lap.apply(&v);
                let rayleigh = v.inner(&lv).re / v.norm().powi(2);
                let mut res = lv;
                res.axpy(Complex64::new(-target, 0.0), &v);
                rows.push(FamilyRow {
                    family: family.to_string(),
                    pair: j,
                    target,
                    rayleigh,
                    residual: res.norm() / v.norm(),
                });
            }
        }
        let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        Ok(FamilyReport { rows, max_residual })
    }

    /// Compresses Δ₁(λ) onto {Σu_j, Σv_j, (λ₂ω¹ − λ₁ω²)ψ_β} (first) or
    /// {Σw_j, Σw′_j, (λ₁ω¹ + λ₂ω²)ψ_β} (second), dropping vanishing vectors.
    pub fn invariant_3x3(&self, beta: &[u32], which: Subspace) -> Result<Invariant3Report> {
        self.check_beta(beta)?;
        let lap = self.laplacian()?;
        let [l1, l2] = self.lambda;
        let (fa, fb, third) = match which {
            Subspace::First => (Family::U, Family::V, self.central(beta, l2, -l1)),
            Subspace::Second => (Family::W, Family::WPrime, self.central(beta, l1, l2)),
        };
        let sum_family = |f: Family| -> Result<SparseVector> {
            let mut v = SparseVector::new();
            for j in 0..self.n {
                v.axpy(ONE, &self.unweighted_vector(beta, f, j)?);
            }
            Ok(v)
        };
        let labels = [fa.to_string(), fb.to_string(), "centre".to_string()];
        let candidates = [sum_family(fa)?, sum_family(fb)?, third];
        let mut kept = Vec::new();
        let mut skipped = Vec::new();
        for (lab, v) in labels.iter().zip(candidates) {
            if v.is_empty() {
                skipped.push(lab.clone());
            } else {
                kept.push(v);
            }
        }
        let (m, leak) = linalg::compress(&lap, &kept);
        if leak > 1e-9 {
            return Err(Error::Leakage(format!("{which:?} subspace at beta {beta:?} escapes (residual {leak:.3e})")));
        }
        let ortho = linalg::orthonormalize(&kept);
        let (h, _) = linalg::compress(&lap, &ortho);
        let eigenvalues = linalg::hermitian_spectrum(&h, None)?.eigenvalues;

        let r = self.r();
        let b = beta.iter().sum::<u32>() as f64;
        let nf = self.n as f64;
        let base = 2.0 * r * (nf + b) + r * r;
        let full = kept.len() == 3;
        let shifted = &m - CMatrix::identity(kept.len(), kept.len()) * Complex64::new(base, 0.0);
        let real = |mm: &CMatrix| DMatrix::from_fn(mm.nrows(), mm.ncols(), |i, j| mm[(i, j)].re);

        let mut report = Invariant3Report {
            beta: beta.to_vec(),
            which,
            dim: kept.len(),
            skipped,
            leak,
            base,
            shifted: flatten(&real(&shifted)),
            eigenvalues: eigenvalues.clone(),
            closed_form: vec![],
            eigen_deviation: 0.0,
            char_poly_deviation: None,
            entry_deviation: None,
            verbatim_entry_deviation: None,
        };
        if !full {
            return Ok(report);
        }
        let r32 = r.powf(1.5);
        let sr = r.sqrt();
        match which {
            Subspace::First => {
                let c = linalg::char_poly3(&shifted);
                let want = [-2.0 * nf, -r * (2.0 * b + 9.0 * r + 2.0 * nf), 12.0 * nf * r * r];
                let scale = want.iter().map(|x| x.abs()).fold(1.0, f64::max);
                report.char_poly_deviation =
                    Some((0..3).map(|i| (c[i] - Complex64::new(want[i], 0.0)).norm()).fold(0.0, f64::max) / scale);
                // The reference basis has the opposite central orientation.
                let flip = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0]));
                let ours = &flip * real(&shifted) * &flip;
                let corrected = DMatrix::from_row_slice(3, 3, &[
                    -3.0 * r, 0.0, -r32,
                    0.0, 3.0 * r, r32,
                    -b / sr, (b + 2.0 * nf) / sr, 2.0 * nf,
                ]);
                let mut verbatim = corrected.clone();
                verbatim[(2, 1)] = -(b + 2.0 * nf) / sr;
                report.entry_deviation = Some((&ours - corrected).abs().max());
                report.verbatim_entry_deviation = Some((&ours - verbatim).abs().max());
                let mut roots: Vec<f64> = cubic_companion(nf, b, r).complex_eigenvalues().iter().map(|z| z.re + base).collect();
                roots.sort_by(f64::total_cmp);
                report.closed_form = roots;
            }
            Subspace::Second => {
                let corrected = DMatrix::from_row_slice(3, 3, &[
                    r, 0.0, -r32,
                    0.0, -r, r32,
                    -(b + 2.0 * nf) / sr, b / sr, 2.0 * nf,
                ]);
                let mut verbatim = corrected.clone();
                verbatim[(2, 1)] = -b / sr;
                let ours = real(&shifted);
                report.entry_deviation = Some((&ours - corrected).abs().max());
                report.verbatim_entry_deviation = Some((&ours - verbatim).abs().max());
                let rad = (nf * nf + base).sqrt();
                report.closed_form = vec![base + nf - rad, base, base + nf + rad];
                report.closed_form.sort_by(f64::total_cmp);
            }
        }
        report.eigen_deviation = eigenvalues
            .iter()
            .zip(&report.closed_form)
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max);
        Ok(report)
    }

    /// Commutator norms of Δ₁(λ) with the symmetry combinations over 1-forms
    /// with |β| ≤ max_total. Pair indices are 0-based within the first block.
    pub fn commutator_checks(&self, max_total: u32) -> Result<Vec<CommutatorRow>> {
        let lap = self.laplacian()?;
        let elems = nilpotent::truncated_basis(self.space(), 1, max_total);
        let mut combos: Vec<(String, usize, usize, usize, usize, bool)> =
            vec![("U_00 - U_11".into(), 0, 0, 1, 1, true)];
        if self.n >= 1 {
            combos.push(("U_02 - U_31".into(), 0, 2, 3, 1, self.n >= 2));
            combos.push(("U_20 - U_13".into(), 2, 0, 1, 3, self.n >= 2));
            combos.push(("U_12 - U_30".into(), 1, 2, 3, 0, false));
        }
        let mut rows = Vec::new();
        for (label, a, b, c, d, asserted) in combos {
            if a.max(b).max(c).max(d) >= 2 * self.n {
                continue;
            }
            let op = &self.u(a, b)? - &self.u(c, d)?;
            let norm = crate::heisenberg::commutator_residual(&lap, &op, &elems)?;
            rows.push(CommutatorRow { label, norm, asserted });
        }
        Ok(rows)
    }

    /// Lowest Ritz values of Δ₁(λ) on 1-forms with |β| ≤ max_total, computed
    /// sector by sector (sectors are the joint values of U_{2j,2j} − U_{2j+1,2j+1}).
    pub fn truncated_lowest(&self, max_total: u32, count: usize) -> Result<Vec<(f64, Vec<i32>)>> {
        let lap = self.laplacian()?;
        let elems = nilpotent::truncated_basis(self.space(), 1, max_total);
        let mut sectors: BTreeMap<Vec<i32>, Vec<BasisElement>> = BTreeMap::new();
        for e in elems {
            let g = e.gamma();
            let key: Vec<i32> = (0..self.n).map(|j| g[2 * j] - g[2 * j + 1]).collect();
            sectors.entry(key).or_default().push(e);
        }
        let parts: Vec<Vec<(f64, Vec<i32>)>> = sectors
            .into_par_iter()
            .map(|(key, basis)| -> Result<Vec<(f64, Vec<i32>)>> {
                let m = nilpotent::truncated_matrix(&lap, &basis);
                let s = linalg::hermitian_spectrum(&m, None)?;
                Ok(s.eigenvalues.into_iter().take(count).map(|v| (v, key.clone())).collect())
            })
            .collect::<Result<_>>()?;
        let mut all: Vec<(f64, Vec<i32>)> = parts.into_iter().flatten().collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all.truncate(count);
        Ok(all)
    }

    /// Global lowest eigenvalue estimate with bracket, multiplicity and a
    /// convergence check against the truncation two levels lower.
    pub fn lowest_report(&self, max_total: u32) -> Result<LowestReport> {
        if max_total < 3 {
            return Err(Error::Precondition("truncation level must be >= 3".into()));
        }
        let r = self.r();
        let vals = self.truncated_lowest(max_total, 4 * self.n + 2)?;
        let coarse = self.truncated_lowest(max_total - 2, 1)?;
        let lowest = vals[0].0;
        let gap_tol = 1e-6 * r;
        let multiplicity = vals.iter().filter(|v| v.0 - lowest <= gap_tol).count();
        let next = vals.get(multiplicity).map(|v| v.0);
        let mut per_sector: BTreeMap<Vec<i32>, Vec<f64>> = BTreeMap::new();
        for (v, key) in &vals {
            per_sector.entry(key.clone()).or_default().push(*v);
        }
        let simple_in_sector = per_sector
            .values()
            .all(|vs| vs.iter().filter(|&&v| v - lowest <= gap_tol).count() <= 1);
        let (lo, hi) = lowest_bracket(self.n, r);
        Ok(LowestReport {
            n: self.n,
            lambda_norm: r,
            max_total,
            lowest,
            multiplicity,
            next,
            simple_in_sector,
            bracket: (lo, hi),
            inside: lo < lowest && lowest < hi,
            convergence_delta: coarse[0].0 - lowest,
        })
    }

    /// Compares low truncated spectra at λ and at λ rotated by `phi`.
    pub fn rotation_invariance(&self, phi: f64, max_total: u32, count: usize) -> Result<f64> {
        let r = self.r();
        let other = DGroupContext::new(self.n, [r * phi.cos(), r * phi.sin()])?;
        let a = self.truncated_lowest(max_total, count)?;
        let b = other.truncated_lowest(max_total, count)?;
        Ok(a.iter().zip(&b).map(|(x, y)| (x.0 - y.0).abs()).fold(0.0, f64::max))
    }
}

fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
}

/// Companion matrix of p(μ) = μ³ − 2nμ² − r(2b+9r+2n)μ + 12nr².
fn cubic_companion(n: f64, b: f64, r: f64) -> DMatrix<f64> {
    let (c2, c1, c0) = (-2.0 * n, -r * (2.0 * b + 9.0 * r + 2.0 * n), 12.0 * n * r * r);
    DMatrix::from_row_slice(3, 3, &[0.0, 0.0, -c0, 1.0, 0.0, -c1, 0.0, 1.0, -c2])
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyRow {
    pub family: String,
    pub pair: usize,
    pub target: f64,
    pub rayleigh: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub rows: Vec<FamilyRow>,
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Invariant3Report {
    pub beta: Vec<u32>,
    pub which: Subspace,
    pub dim: usize,
    /// Basis vectors that vanish at this β.
    pub skipped: Vec<String>,
    pub leak: f64,
    pub base: f64,
    /// Compression in the un-normalized basis minus base·Id, row-major.
    pub shifted: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub eigen_deviation: f64,
    /// Relative deviation of the shifted characteristic polynomial from p(μ).
    pub char_poly_deviation: Option<f64>,
    /// Against the reference matrix with the (3,2) sign corrected.
    pub entry_deviation: Option<f64>,
    pub verbatim_entry_deviation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorRow {
    pub label: String,
    pub norm: f64,
    /// False for the conjectured combination, which is only reported.
    pub asserted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowestReport {
    pub n: usize,
    pub lambda_norm: f64,
    pub max_total: u32,
    pub lowest: f64,
    pub multiplicity: usize,
    pub next: Option<f64>,
    pub simple_in_sector: bool,
    pub bracket: (f64, f64),
    pub inside: bool,
    /// Lowest value at truncation max_total − 2 minus the value at max_total (≥ 0).
    pub convergence_delta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubicBounds {
    pub b: u32,
    pub n: usize,
    pub lambda_norm: f64,
    pub mu_low: f64,
    pub mu_high: f64,
    pub p_low: f64,
    pub p_high: f64,
    pub p_zero: f64,
}

pub fn cubic(mu: f64, b: u32, n: usize, r: f64) -> f64 {
    let (b, n) = (b as f64, n as f64);
    mu * mu * mu - 2.0 * n * mu * mu - r * (2.0 * b + 9.0 * r + 2.0 * n) * mu + 12.0 * n * r * r
}

pub fn mu_low(b: u32, n: usize, r: f64) -> f64 {
    let (b, n) = (b as f64, n as f64);
    -((b + n + ((b + n).powi(2) + 24.0 * n * n).sqrt()) / (2.0 * n)) * r
}

/// Sign certificates p(μ_low) < 0 < p(μ_high), p(0) > 0 bracketing the
/// lowest root of p.
pub fn cubic_bounds(b: u32, n: usize, r: f64) -> Result<CubicBounds> {
    if b == 0 || n == 0 || !(r > 0.0 && r.is_finite()) {
        return Err(Error::Precondition(format!("need b, n >= 1 and |lambda| > 0 (b={b}, n={n}, r={r})")));
    }
    let lo = mu_low(b, n, r);
    let hi = -3.0 * r;
    let bounds = CubicBounds {
        b,
        n,
        lambda_norm: r,
        mu_low: lo,
        mu_high: hi,
        p_low: cubic(lo, b, n, r),
        p_high: cubic(hi, b, n, r),
        p_zero: cubic(0.0, b, n, r),
    };
    let scale = lo.abs().powi(3).max(1e-300);
    let tol = 1e-12 * scale;
    if !(lo < hi) || bounds.p_low >= -tol || bounds.p_high <= tol || bounds.p_zero <= tol {
        return Err(Error::Certificate(format!(
            "sign pattern (-,+,+) fails: p(mu_low)={:e}, p(mu_high)={:e}, p(0)={:e}",
            bounds.p_low, bounds.p_high, bounds.p_zero
        )));
    }
    Ok(bounds)
}

/// Bracket for the lowest eigenvalue on the first subspace at |β| = b:
/// (μ_low + 2(b+n)|λ| + |λ|², μ_high + 2(b+n)|λ| + |λ|²). The lower end
/// increases with b, and the b = 2 lower end exceeds the b = 1 upper end.
pub fn eigen_bracket(b: u32, n: usize, r: f64) -> (f64, f64) {
    let shift = 2.0 * (b as f64 + n as f64) * r + r * r;
    (mu_low(b, n, r) + shift, -3.0 * r + shift)
}

/// (μ_low(1,n) + 2(n+1)|λ| + |λ|², μ_high(1,n) + 2(n+1)|λ| + |λ|²).
pub fn lowest_bracket(n: usize, r: f64) -> (f64, f64) {
    eigen_bracket(1, n, r)
}

/// Coefficient of |λ| in the lower bracket end; positive for all n.
pub fn lower_coefficient(n: usize) -> f64 {
    mu_low(1, n, 1.0) + 2.0 * (n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_relations() {
        for lam in [[1.0, 0.0], [3.0, 4.0], [-0.3, 0.7]] {
            let ctx = DGroupContext::new(2, lam).unwrap();
            let rep = ctx.frame_check().unwrap();
            assert!(rep.hermitian_pairing < 1e-12 && rep.holomorphic_pairing < 1e-12, "{rep:?}");
            assert!(rep.cross_bracket < 1e-12, "{rep:?}");
            assert!(rep.symplectic.ok(1e-10), "{rep:?}");
        }
    }

    #[test]
    fn unweighted_vector_examples() {
        let ctx = DGroupContext::new(1, [1.0, 0.0]).unwrap();
        let u = ctx.unweighted_vector(&[1, 1], Family::U, 0).unwrap();
        let t = |beta: Vec<u32>, holo: u32| BasisElement::new(beta, FormWord { holo, anti: 0, central: 0 });
        assert_eq!(u.len(), 2);
        assert_eq!(u.get(&t(vec![1, 0], 1)), ONE);
        assert_eq!(u.get(&t(vec![0, 1], 2)), -ONE);
        assert!(ctx.unweighted_vector(&[0, 0], Family::U, 0).unwrap().is_empty());
        let w = ctx.unweighted_vector(&[0, 0], Family::W, 0).unwrap();
        assert_eq!(w.get(&t(vec![1, 0], 1)), ONE);
        assert_eq!(w.get(&t(vec![0, 1], 2)), ONE);
    }

    #[test]
    fn families_are_eigenvectors() {
        for (lam, beta, mu) in [([1.0, 0.0], [1u32, 1, 1, 1], 13.0), ([1.2, 1.6], [2, 1, 1, 1], 32.0)] {
            let ctx = DGroupContext::new(2, lam).unwrap();
            let rep = ctx.family_eigencheck(&beta).unwrap();
            assert!(rep.max_residual < 1e-9, "{rep:?}");
            assert!((ctx.mu_prime(beta.iter().sum()) - mu).abs() < 1e-12);
        }
        let ctx = DGroupContext::new(1, [1.0, 0.0]).unwrap();
        assert!(ctx.family_eigencheck(&[1, 1]).unwrap().rows.is_empty());
    }

    #[test]
    fn invariant_subspaces() {
        let ctx = DGroupContext::new(2, [1.0, 0.0]).unwrap();
        let s = ctx.invariant_3x3(&[1, 0, 0, 0], Subspace::Second).unwrap();
        let want = [9.0 - 11f64.sqrt(), 7.0, 9.0 + 11f64.sqrt()];
        for (a, b) in s.eigenvalues.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{s:?}");
        }
        assert!(s.entry_deviation.unwrap() < 1e-9);
        for lam in [[1.0, 0.0], [1.2, 1.6]] {
            let ctx = DGroupContext::new(2, lam).unwrap();
            for beta in [[1u32, 0, 0, 0], [1, 1, 1, 1], [1, 3, 0, 2]] {
                let f = ctx.invariant_3x3(&beta, Subspace::First).unwrap();
                assert!(f.char_poly_deviation.unwrap() < 1e-10, "{f:?}");
                assert!(f.entry_deviation.unwrap() < 1e-9, "{f:?}");
                assert!(f.eigen_deviation < 1e-9, "{f:?}");
                let s = ctx.invariant_3x3(&beta, Subspace::Second).unwrap();
                assert!(s.entry_deviation.unwrap() < 1e-9 && s.eigen_deviation < 1e-9, "{s:?}");
            }
        }
    }

    #[test]
    fn cubic_examples() {
        let c = cubic_bounds(1, 1, 1.0).unwrap();
        assert!((c.mu_low + 1.0 + 7f64.sqrt()).abs() < 1e-14);
        assert!((c.p_high - 6.0).abs() < 1e-12);
        assert!((lower_coefficient(1) - (3.0 - 7f64.sqrt())).abs() < 1e-14);
        for n in 1..=10 {
            assert!(eigen_bracket(2, n, 1.0).0 > eigen_bracket(1, n, 1.0).1);
            for b in 1..20 {
                assert!(eigen_bracket(b + 1, n, 0.7).0 > eigen_bracket(b, n, 0.7).0);
            }
        }
        let (lo, hi) = lowest_bracket(1, 1.0);
        assert!((lo - (4.0 - 7f64.sqrt())).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
    }
}

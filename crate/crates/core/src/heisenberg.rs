//! Laplacian on p-forms of the Heisenberg group H^{2n+1} in the ladder
//! representation with parameter k > 0, and its finite invariant blocks.

use crate::basis::{BasisElement, FormWord, Generator, MultiIndex, Space};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, SpectrumResult};
use crate::rule::{LinearRule, Ops};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

const I: Complex64 = Complex64::new(0.0, 1.0);
const W: Generator = Generator::Central(0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LaplacianMode {
    /// dd* + d*d assembled from the differential.
    Composed,
    /// Expanded normal-ordered formula, term by term.
    Explicit,
}

/// n ladder pairs (group dimension 2n+1), representation parameter k, degree p.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeisenbergContext {
    pub n: usize,
    pub k: f64,
    pub p: usize,
}

impl HeisenbergContext {
    pub fn new(n: usize, k: f64, p: usize) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::Precondition(format!("n must be in 1..=31, got {n}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Precondition(format!("k must be positive and finite, got {k}")));
        }
        if p > 2 * n + 1 {
            return Err(Error::Precondition(format!("degree {p} exceeds 2n+1 = {}", 2 * n + 1)));
        }
        Ok(HeisenbergContext { n, k, p })
    }

    pub fn with_degree(&self, p: usize) -> Result<Self> {
        HeisenbergContext::new(self.n, self.k, p)
    }

    pub fn space(&self) -> Space {
        Space { modes: self.n, central: 1 }
    }

    fn ops(&self) -> Ops {
        Ops::new(self.space())
    }

    fn check(&self, j: usize) -> Result<()> {
        self.space().check_mode(j)
    }

    /// Image of Z_j: −i√k a_j*.
    pub fn z(&self, j: usize) -> LinearRule {
        (-I * self.k.sqrt()) * &self.ops().cre(j)
    }

    /// Image of Z_{j̄}: −i√k a_j.
    pub fn zbar(&self, j: usize) -> LinearRule {
        (-I * self.k.sqrt()) * &self.ops().ann(j)
    }

    /// Image of W: −ik.
    pub fn w(&self) -> LinearRule {
        (-I * self.k) * &self.ops().id()
    }

    /// θ_j = e(τ^j)Z_j + e(τ^{j̄})Z_{j̄} − i e(τ^j)e(τ^{j̄})i(W).
    pub fn theta(&self, j: usize) -> Result<LinearRule> {
        self.check(j)?;
        let o = self.ops();
        let (h, a) = (Generator::Holo(j), Generator::Anti(j));
        Ok(o.sum(&[
            o.prod(&[&o.e(h), &self.z(j)]),
            o.prod(&[&o.e(a), &self.zbar(j)]),
            -I * &o.prod(&[&o.e(h), &o.e(a), &o.i(W)]),
        ]))
    }

    /// θ_j* = −i(Z_{j̄})Z_j − i(Z_j)Z_{j̄} + i e(τ^w)i(Z_{j̄})i(Z_j).
    pub fn theta_star(&self, j: usize) -> Result<LinearRule> {
        self.check(j)?;
        let o = self.ops();
        let (h, a) = (Generator::Holo(j), Generator::Anti(j));
        Ok(o.sum(&[
            -&o.prod(&[&o.i(a), &self.z(j)]),
            -&o.prod(&[&o.i(h), &self.zbar(j)]),
            I * &o.prod(&[&o.e(W), &o.i(a), &o.i(h)]),
        ]))
    }

    /// d = Σ θ_j + e(τ^w)W.
    pub fn d(&self) -> LinearRule {
        let o = self.ops();
        let mut parts: Vec<LinearRule> = (0..self.n).map(|j| self.theta(j).unwrap()).collect();
        parts.push(o.prod(&[&o.e(W), &self.w()]));
        o.sum(&parts)
    }

    /// d* = Σ θ_j* − i(W)W.
    pub fn d_star(&self) -> LinearRule {
        let o = self.ops();
        let mut parts: Vec<LinearRule> = (0..self.n).map(|j| self.theta_star(j).unwrap()).collect();
        parts.push(-&o.prod(&[&o.i(W), &self.w()]));
        o.sum(&parts)
    }

    pub fn laplacian(&self, mode: LaplacianMode) -> LinearRule {
        match mode {
            LaplacianMode::Composed => {
                let (d, ds) = (self.d(), self.d_star());
                &(&d * &ds) + &(&ds * &d)
            }
            LaplacianMode::Explicit => self.explicit_laplacian(),
        }
    }

    fn explicit_laplacian(&self) -> LinearRule {
        let o = self.ops();
        let [p1, ph, p0] = self.laplacian_parts();
        let k = self.k;
        o.sum(&[(k * k) * &o.id(), k * &p1, k.sqrt() * &ph, p0])
    }

    /// k-independent rules with Δ(k) = k² + k·P₁ + √k·P½ + P₀, returned as
    /// [P₁, P½, P₀].
    pub fn laplacian_parts(&self) -> [LinearRule; 3] {
        let o = self.ops();
        let (mut p1, mut ph, mut p0) = (Vec::new(), Vec::new(), Vec::new());
        for j in 0..self.n {
            let (h, a) = (Generator::Holo(j), Generator::Anti(j));
            p1.push(2.0 * &o.prod(&[&o.cre(j), &o.ann(j)]));
            p1.push(o.prod(&[&o.i(h), &o.e(h)]));
            p1.push(o.prod(&[&o.e(a), &o.i(a)]));
            ph.push(o.prod(&[&o.e(W), &o.i(a), &o.cre(j)]));
            ph.push(-&o.prod(&[&o.e(W), &o.i(h), &o.ann(j)]));
            ph.push(o.prod(&[&o.i(W), &o.e(h), &o.cre(j)]));
            ph.push(-&o.prod(&[&o.i(W), &o.e(a), &o.ann(j)]));
            for l in (0..self.n).filter(|&l| l != j) {
                p0.push(o.prod(&[&o.e(h), &o.e(a), &o.i(Generator::Anti(l)), &o.i(Generator::Holo(l))]));
            }
            p0.push(o.prod(&[&o.e(h), &o.i(h), &o.e(a), &o.i(a), &o.i(W), &o.e(W)]));
            p0.push(o.prod(&[&o.i(h), &o.e(h), &o.i(a), &o.e(a), &o.e(W), &o.i(W)]));
        }
        [o.sum(&p1), o.sum(&ph), o.sum(&p0)]
    }

    /// U_jj = a_j*a_j − e(τ^j)i(Z_j) + e(τ^{j̄})i(Z_{j̄}).
    pub fn u_diag(&self, j: usize) -> Result<LinearRule> {
        self.check(j)?;
        let o = self.ops();
        let (h, a) = (Generator::Holo(j), Generator::Anti(j));
        Ok(o.sum(&[
            o.prod(&[&o.cre(j), &o.ann(j)]),
            -&o.prod(&[&o.e(h), &o.i(h)]),
            o.prod(&[&o.e(a), &o.i(a)]),
        ]))
    }

    /// U_ij = a_i*a_j − e(τ^j)i(Z_i) + e(τ^{ī})i(Z_{j̄}), i ≠ j.
    pub fn u_pair(&self, i: usize, j: usize) -> Result<LinearRule> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::Precondition("U_ij needs i != j; use u_diag".into()));
        }
        let o = self.ops();
        Ok(o.sum(&[
            o.prod(&[&o.cre(i), &o.ann(j)]),
            -&o.prod(&[&o.e(Generator::Holo(j)), &o.i(Generator::Holo(i))]),
            o.prod(&[&o.e(Generator::Anti(i)), &o.i(Generator::Anti(j))]),
        ]))
    }

    /// Swap of complex directions i and j.
    pub fn chi(&self, i: usize, j: usize) -> Result<LinearRule> {
        LinearRule::chi(self.space(), i, j)
    }

    pub fn block(&self, gamma: &[i32]) -> Result<Block> {
        enumerate_block(self.n, self.p, gamma)
    }

    /// Compressed Laplacian on one block (leakage guard active).
    pub fn block_matrix(&self, gamma: &[i32], mode: LaplacianMode) -> Result<CMatrix> {
        let block = self.block(gamma)?;
        linalg::matrix_of(&self.laplacian(mode), &block.basis, &block.basis)
    }

    pub fn block_spectrum(&self, gamma: &[i32]) -> Result<SpectrumResult> {
        self.block_spectrum_with(&self.laplacian(LaplacianMode::Explicit), gamma)
    }

    /// Block spectrum reusing a prebuilt Laplacian rule.
    pub fn block_spectrum_with(&self, lap: &LinearRule, gamma: &[i32]) -> Result<SpectrumResult> {
        let block = self.block(gamma)?;
        let m = linalg::matrix_of(lap, &block.basis, &block.basis)?;
        linalg::hermitian_spectrum(&m, Some(gamma.to_vec()))
    }

    /// Spectra of every non-empty block with |γ| ≤ gamma_max, in block order.
    pub fn sweep(&self, gamma_max: i32) -> Result<Vec<SpectrumResult>> {
        let lap = self.laplacian(LaplacianMode::Explicit);
        gammas(self.n, self.p, gamma_max)
            .par_iter()
            .map(|g| self.block_spectrum_with(&lap, g))
            .collect()
    }

    /// Eigenvalues below `cutoff` over all blocks with |γ| ≤ gamma_max, sorted.
    pub fn low_spectrum(&self, gamma_max: i32, cutoff: f64) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = self
            .sweep(gamma_max)?
            .into_iter()
            .flat_map(|s| s.eigenvalues.into_iter().filter(|&v| v < cutoff))
            .collect();
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Compares the spectra of two blocks related by a permutation of γ or by
    /// γ ↦ γ + e_i − e_j with γ_i ≥ 1, γ_j ≥ 2.
    pub fn spectral_equivalence_check(&self, gamma: &[i32], gamma2: &[i32]) -> Result<EquivalenceReport> {
        if gamma.len() != self.n || gamma2.len() != self.n {
            return Err(Error::DimensionMismatch("gamma length must equal n".into()));
        }
        let mut a = gamma.to_vec();
        let mut b = gamma2.to_vec();
        a.sort();
        b.sort();
        let permutation = a == b;
        let shift = (0..self.n).any(|i| {
            (0..self.n).any(|j| {
                i != j && gamma[i] >= 1 && gamma[j] >= 2 && {
                    let mut g = gamma.to_vec();
                    g[i] += 1;
                    g[j] -= 1;
                    g == gamma2
                }
            })
        });
        if !permutation && !shift {
            return Err(Error::Precondition(format!(
                "{gamma2:?} is neither a permutation of {gamma:?} nor gamma + e_i - e_j with gamma_i >= 1, gamma_j >= 2"
            )));
        }
        let s1 = self.block_spectrum(gamma)?.eigenvalues;
        let s2 = self.block_spectrum(gamma2)?.eigenvalues;
        if s1.len() != s2.len() {
            return Ok(EquivalenceReport {
                equal: false,
                deltas: vec![],
                max_delta: f64::INFINITY,
            });
        }
        let deltas: Vec<f64> = s1.iter().zip(&s2).map(|(x, y)| (x - y).abs()).collect();
        let max_delta = deltas.iter().copied().fold(0.0, f64::max);
        Ok(EquivalenceReport {
            equal: max_delta < 1e-8,
            deltas,
            max_delta,
        })
    }

    /// Smallest singular value of U_12 from block γ to block γ + e_1 − e_2.
    pub fn kernel_lemma_check(&self, gamma: &[i32]) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::Precondition("kernel check needs n >= 2".into()));
        }
        let source = self.block(gamma)?;
        let mut target_gamma = gamma.to_vec();
        target_gamma[0] += 1;
        target_gamma[1] -= 1;
        let target = self.block(&target_gamma)?;
        let m = linalg::matrix_of(&self.u_pair(0, 1)?, &source.basis, &target.basis)?;
        Ok(linalg::sigma_min(&m))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub equal: bool,
    pub deltas: Vec<f64>,
    pub max_delta: f64,
}

/// Simultaneous U_jj eigenspace for eigenvalues γ within p-forms.
#[derive(Clone, Debug, Serialize)]
pub struct Block {
    pub n: usize,
    pub p: usize,
    pub gamma: MultiIndex,
    #[serde(skip)]
    pub basis: Vec<BasisElement>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn subsets_lex(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (0..n).filter(|&j| mask >> j & 1 == 1).collect())
        .collect();
    all.sort();
    all
}

/// Basis of V^{p,n,γ}: all (I, J, w) with |I|+|J|+w = p and β = γ+I−J ≥ 0,
/// ordered lexicographically on (w, I, J).
pub fn enumerate_block(n: usize, p: usize, gamma: &[i32]) -> Result<Block> {
    if gamma.len() != n {
        return Err(Error::DimensionMismatch(format!("gamma has length {}, expected {n}", gamma.len())));
    }
    if gamma.iter().any(|&g| g < -1) {
        return Err(Error::Precondition(format!("gamma entries must be >= -1: {gamma:?}")));
    }
    let minus = gamma.iter().filter(|&&g| g == -1).count();
    if minus > p {
        return Err(Error::Precondition(format!("{minus} entries equal -1 but p = {p}")));
    }
    let subsets = subsets_lex(n);
    let mut basis = Vec::new();
    for w in 0..=1usize {
        for set_i in &subsets {
            for set_j in &subsets {
                if set_i.len() + set_j.len() + w != p {
                    continue;
                }
                let beta: Vec<i32> = (0..n)
                    .map(|t| gamma[t] + set_i.contains(&t) as i32 - set_j.contains(&t) as i32)
                    .collect();
                if beta.iter().any(|&b| b < 0) {
                    continue;
                }
                let form = FormWord {
                    holo: set_i.iter().map(|&t| 1u32 << t).sum(),
                    anti: set_j.iter().map(|&t| 1u32 << t).sum(),
                    central: w as u32,
                };
                basis.push(BasisElement::new(beta.iter().map(|&b| b as u32).collect(), form));
            }
        }
    }
    if basis.is_empty() {
        return Err(Error::EmptyBlock(gamma.to_vec()));
    }
    Ok(Block {
        n,
        p,
        gamma: gamma.to_vec(),
        basis,
    })
}

/// All γ (entries ≥ −1, at most p entries equal −1, Σγ ≤ gamma_max) with a
/// non-empty block, ordered by (Σγ, γ).
pub fn gammas(n: usize, p: usize, gamma_max: i32) -> Vec<MultiIndex> {
    fn rec(n: usize, p: usize, left: i32, cur: &mut Vec<i32>, out: &mut Vec<MultiIndex>) {
        if cur.len() == n {
            if enumerate_block(n, p, cur).is_ok() {
                out.push(cur.clone());
            }
            return;
        }
        let slots_after = (n - cur.len() - 1) as i32;
        let minus = cur.iter().filter(|&&g| g == -1).count();
        for g in -1..=(left + slots_after) {
            if g == -1 && minus >= p {
                continue;
            }
            cur.push(g);
            rec(n, p, left - g, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, gamma_max, &mut Vec::with_capacity(n), &mut out);
    out.retain(|g| g.iter().sum::<i32>() <= gamma_max);
    out.sort_by_key(|g| (g.iter().sum::<i32>(), g.clone()));
    out
}

/// All γ with Σγ exactly `total` (one shell of the sweep).
pub fn gamma_shell(n: usize, p: usize, total: i32) -> Vec<MultiIndex> {
    gammas(n, p, total)
        .into_iter()
        .filter(|g| g.iter().sum::<i32>() == total)
        .collect()
}

/// max ‖[A, B]x‖ over the given basis elements.
pub fn commutator_residual(a: &LinearRule, b: &LinearRule, elements: &[BasisElement]) -> Result<f64> {
    let c = a.commutator(b)?;
    Ok(elements
        .iter()
        .map(|e| c.apply_element(e).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_examples() {
        let b = enumerate_block(1, 1, &[0]).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.basis[0].beta, vec![1]);
        assert_eq!(b.basis[0].form.holo, 1);
        assert_eq!(b.basis[1].beta, vec![0]);
        assert_eq!(b.basis[1].form.central, 1);
        let b = enumerate_block(1, 1, &[-1]).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.basis[0].form.holo, 1);
        let b = enumerate_block(2, 0, &[3, 1]).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(enumerate_block(2, 0, &[-1, 0]).is_err());
    }

    #[test]
    fn small_spectra() {
        let ctx = HeisenbergContext::new(1, 1.0, 1).unwrap();
        let s = ctx.block_spectrum(&[0]).unwrap();
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 4.0).abs() < 1e-12);
        let s = ctx.block_spectrum(&[-1]).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        let ctx = HeisenbergContext::new(1, 2.0, 0).unwrap();
        assert!((ctx.block_spectrum(&[1]).unwrap().eigenvalues[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_enumeration_counts() {
        let gs = gammas(1, 1, 3);
        assert_eq!(gs, vec![vec![-1], vec![0], vec![1], vec![2], vec![3]]);
        assert!(gammas(2, 0, 2).iter().all(|g| g.iter().all(|&x| x >= 0)));
    }

    #[test]
    fn context_validation() {
        assert!(HeisenbergContext::new(1, 0.0, 0).is_err());
        assert!(HeisenbergContext::new(1, 1.0, 4).is_err());
        assert!(HeisenbergContext::new(0, 1.0, 0).is_err());
    }
}

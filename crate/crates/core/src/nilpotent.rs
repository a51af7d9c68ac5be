//! Step-2 nilpotent Lie algebras given by structure constants: J-maps,
//! H-type test, Darboux frames, Pfaffians, and the form Laplacian in the
//! ladder model of an irreducible representation.

use crate::basis::{BasisElement, FormWord, Generator, Space};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rule::{LinearRule, Ops};
use crate::sparse::SparseVector;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Brackets [X_i, X_j] = Σ_q C[i][j][q] W_q of an orthonormal basis X of the
/// complement and W of the centre. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepTwoAlgebra {
    pub m: usize,
    pub l: usize,
    c: Vec<f64>,
}

#[derive(Deserialize)]
struct AlgebraFile {
    m: usize,
    l: usize,
    #[serde(rename = "C")]
    c: Vec<(usize, usize, usize, f64)>,
}

impl StepTwoAlgebra {
    /// Builds C from (i, j, q, value) entries, completing antisymmetry.
    /// Conflicting duplicates and nonzero diagonal entries are rejected.
    pub fn from_entries(m: usize, l: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        if m == 0 || l == 0 {
            return Err(Error::Input(format!("need m >= 1 and l >= 1 (m={m}, l={l})")));
        }
        if l > 31 {
            return Err(Error::Input(format!("centre dimension {l} exceeds 31")));
        }
        let mut alg = StepTwoAlgebra { m, l, c: vec![0.0; m * m * l] };
        let mut set = vec![false; m * m * l];
        for &(i, j, q, v) in entries {
            if i >= m || j >= m || q >= l {
                return Err(Error::Input(format!("entry ({i},{j},{q}) out of range for m={m}, l={l}")));
            }
            if !v.is_finite() {
                return Err(Error::Input(format!("entry ({i},{j},{q}) is not finite")));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::Input(format!("diagonal entry ({i},{i},{q}) must be 0")));
                }
                continue;
            }
            let (a, b) = (alg.idx(i, j, q), alg.idx(j, i, q));
            if set[a] && alg.c[a] != v {
                return Err(Error::Input(format!(
                    "inconsistent entries for ({i},{j},{q}): {} vs {v}",
                    alg.c[a]
                )));
            }
            alg.c[a] = v;
            alg.c[b] = -v;
            set[a] = true;
            set[b] = true;
        }
        Ok(alg)
    }

    /// Parses `{"m": int, "l": int, "C": [[i, j, q, value], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: AlgebraFile = serde_json::from_str(text)?;
        StepTwoAlgebra::from_entries(f.m, f.l, &f.c)
    }

    /// H^{2n+1}: [X_j, Y_j] = W with X_j = index j, Y_j = index n+j.
    pub fn heisenberg(n: usize) -> Self {
        let entries: Vec<_> = (0..n).map(|j| (j, n + j, 0, 1.0)).collect();
        StepTwoAlgebra::from_entries(2 * n, 1, &entries).expect("valid")
    }

    /// D^{4n+2}: per block of four, [X1,X3] = W1, [X1,X4] = W2, [X2,X3] = W2,
    /// [X2,X4] = −W1.
    pub fn dgroup(n: usize) -> Self {
        let mut entries = Vec::new();
        for b in 0..n {
            let o = 4 * b;
            entries.extend([(o, o + 2, 0, 1.0), (o, o + 3, 1, 1.0), (o + 1, o + 2, 1, 1.0), (o + 1, o + 3, 0, -1.0)]);
        }
        StepTwoAlgebra::from_entries(4 * n, 2, &entries).expect("valid")
    }

    fn idx(&self, i: usize, j: usize, q: usize) -> usize {
        (i * self.m + j) * self.l + q
    }

    pub fn c(&self, i: usize, j: usize, q: usize) -> f64 {
        self.c[self.idx(i, j, q)]
    }

    /// Basis vectors of the complement whose brackets with everything vanish
    /// (they would belong to the centre).
    pub fn degenerate_rows(&self) -> Vec<usize> {
        (0..self.m)
            .filter(|&i| (0..self.m).all(|j| (0..self.l).all(|q| self.c(i, j, q) == 0.0)))
            .collect()
    }

    /// Centre components of [u, v] for complex vectors of the complement.
    pub fn bracket(&self, u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.l];
        for i in 0..self.m {
            if u[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.m {
                for (q, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, q);
                    if c != 0.0 {
                        *o += u[i] * v[j] * c;
                    }
                }
            }
        }
        out
    }

    fn check_centre(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.l {
            return Err(Error::DimensionMismatch(format!("centre vector has length {}, expected {}", w.len(), self.l)));
        }
        Ok(())
    }
}

/// J(W)_{ij} = Σ_q W_q C_ij^q, so that ⟨J(W)X, Y⟩ = ⟨W, [X, Y]⟩ with J(W)
/// acting by the transpose.
pub fn j_map(alg: &StepTwoAlgebra, w: &[f64]) -> Result<DMatrix<f64>> {
    alg.check_centre(w)?;
    Ok(DMatrix::from_fn(alg.m, alg.m, |i, j| (0..alg.l).map(|q| w[q] * alg.c(i, j, q)).sum()))
}

#[derive(Clone, Debug, Serialize)]
pub struct HTypeReport {
    pub htype: bool,
    /// max entry of J(W)² + |W|² Id over basis and sampled W.
    pub max_deviation: f64,
    /// max |⟨J(W)X, J(W′)X⟩ − ⟨W,W′⟩|X|²| over sampled triples.
    pub pairing_deviation: f64,
}

fn unit_sample(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-3 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}

/// Tests J(W)² = −|W|² Id on every basis W_q and on `samples` random unit W,
/// and the pairing identity on `samples` random triples.
pub fn is_htype(alg: &StepTwoAlgebra, samples: usize, seed: u64) -> HTypeReport {
    if alg.m % 2 == 1 {
        return HTypeReport {
            htype: false,
            max_deviation: f64::INFINITY,
            pairing_deviation: f64::INFINITY,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ws: Vec<Vec<f64>> = (0..alg.l)
        .map(|q| (0..alg.l).map(|t| if t == q { 1.0 } else { 0.0 }).collect())
        .collect();
    ws.extend((0..samples).map(|_| unit_sample(&mut rng, alg.l)));
    let mut max_deviation: f64 = 0.0;
    for w in &ws {
        let j = j_map(alg, w).expect("length");
        let w2: f64 = w.iter().map(|x| x * x).sum();
        let dev = (&j * &j + DMatrix::identity(alg.m, alg.m) * w2).abs().max();
        max_deviation = max_deviation.max(dev);
    }
    let mut pairing_deviation: f64 = 0.0;
    for _ in 0..samples {
        let x = DVector::from_vec(unit_sample(&mut rng, alg.m));
        let w = unit_sample(&mut rng, alg.l);
        let w2 = unit_sample(&mut rng, alg.l);
        let jx = j_map(alg, &w).expect("length").transpose() * &x;
        let jx2 = j_map(alg, &w2).expect("length").transpose() * &x;
        let ww: f64 = w.iter().zip(&w2).map(|(a, b)| a * b).sum();
        pairing_deviation = pairing_deviation.max((jx.dot(&jx2) - ww * x.norm_squared()).abs());
    }
    HTypeReport {
        htype: max_deviation < 1e-10 && pairing_deviation < 1e-10,
        max_deviation,
        pairing_deviation,
    }
}

/// Complex frame Z_j = (X_j − iY_j)/√2 of the complement for one central
/// functional, with the underlying real pairs.
#[derive(Clone, Debug, Serialize)]
pub struct SymplecticFrame {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
}

impl SymplecticFrame {
    pub fn from_pairs(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>) -> Self {
        SymplecticFrame { x, y }
    }

    /// Recovers real pairs from complex vectors Z_j = (X_j − iY_j)/√2.
    pub fn from_complex(z: &[Vec<Complex64>]) -> Self {
        let s = std::f64::consts::SQRT_2;
        SymplecticFrame {
            x: z.iter().map(|v| v.iter().map(|c| s * c.re).collect()).collect(),
            y: z.iter().map(|v| v.iter().map(|c| -s * c.im).collect()).collect(),
        }
    }

    pub fn pairs(&self) -> usize {
        self.x.len()
    }

    pub fn z(&self, j: usize) -> Vec<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.x[j].iter().zip(&self.y[j]).map(|(&a, &b)| Complex64::new(s * a, -s * b)).collect()
    }

    pub fn zbar(&self, j: usize) -> Vec<Complex64> {
        self.z(j).into_iter().map(|c| c.conj()).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    /// max |⟨u, v⟩ − δ| over all frame vectors.
    pub orthonormality: f64,
    /// max |λ([X_j, X_k])|, |λ([Y_j, Y_k])|.
    pub isotropy: f64,
    /// max |λ([X_j, Y_k]) − δ_jk |λ||.
    pub pairing: f64,
    /// max |[X_j, Y_j] − λ/|λ|| componentwise.
    pub central_bracket: f64,
}

impl FrameReport {
    pub fn ok(&self, tol: f64) -> bool {
        self.orthonormality < tol && self.isotropy < tol && self.pairing < tol && self.central_bracket < tol
    }
}

fn real_bracket(alg: &StepTwoAlgebra, u: &[f64], v: &[f64]) -> Vec<f64> {
    let uc: Vec<Complex64> = u.iter().map(|&a| a.into()).collect();
    let vc: Vec<Complex64> = v.iter().map(|&a| a.into()).collect();
    alg.bracket(&uc, &vc).into_iter().map(|c| c.re).collect()
}

fn norm(lambda: &[f64]) -> f64 {
    lambda.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn frame_invariants(alg: &StepTwoAlgebra, lambda: &[f64], frame: &SymplecticFrame) -> Result<FrameReport> {
    alg.check_centre(lambda)?;
    let r = norm(lambda);
    let pair = |a: &[f64], b: &[f64]| -> f64 { real_bracket(alg, a, b).iter().zip(lambda).map(|(c, l)| c * l).sum() };
    let vecs: Vec<&Vec<f64>> = frame.x.iter().chain(&frame.y).collect();
    let mut orthonormality: f64 = 0.0;
    for (i, u) in vecs.iter().enumerate() {
        for (j, v) in vecs.iter().enumerate() {
            let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            orthonormality = orthonormality.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let (mut isotropy, mut pairing, mut central_bracket): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let p = frame.pairs();
    for j in 0..p {
        for k in 0..p {
            isotropy = isotropy.max(pair(&frame.x[j], &frame.x[k]).abs());
            isotropy = isotropy.max(pair(&frame.y[j], &frame.y[k]).abs());
            let want = if j == k { r } else { 0.0 };
            pairing = pairing.max((pair(&frame.x[j], &frame.y[k]) - want).abs());
        }
        let b = real_bracket(alg, &frame.x[j], &frame.y[j]);
        for q in 0..alg.l {
            central_bracket = central_bracket.max((b[q] - lambda[q] / r).abs());
        }
    }
    Ok(FrameReport {
        orthonormality,
        isotropy,
        pairing,
        central_bracket,
    })
}

/// Darboux basis for b_λ(X, Y) = λ([X, Y]): pivots on the first standard
/// basis vector with norm > 1e-8 after projecting out chosen vectors, and
/// pairs it with Y = J_λᵀX/|λ|.
pub fn symplectic_frame(alg: &StepTwoAlgebra, lambda: &[f64]) -> Result<SymplecticFrame> {
    alg.check_centre(lambda)?;
    let r = norm(lambda);
    if r == 0.0 {
        return Err(Error::Precondition("central functional must be nonzero".into()));
    }
    if alg.m % 2 == 1 {
        return Err(Error::NotHType(format!("odd complement dimension {}", alg.m)));
    }
    let jm = j_map(alg, lambda)?;
    let svd = jm.clone().svd(false, true);
    let (imin, smin) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    if smin < 1e-10 * r {
        let v_t = svd.v_t.expect("requested");
        let kernel: Vec<String> = v_t.row(imin).iter().map(|x| format!("{x:.6}")).collect();
        return Err(Error::NotHType(format!("b_lambda is degenerate; kernel vector [{}]", kernel.join(", "))));
    }
    let dev = (&jm * jm.transpose() - DMatrix::identity(alg.m, alg.m) * (r * r)).abs().max();
    if dev > 1e-10 * r * r {
        return Err(Error::NotHType(format!("J(lambda) J(lambda)^T deviates from |lambda|^2 Id by {dev:.3e}")));
    }
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..alg.m {
        if xs.len() == alg.m / 2 {
            break;
        }
        let mut v = DVector::<f64>::zeros(alg.m);
        v[i] = 1.0;
        for c in &chosen {
            let d = c.dot(&v);
            v -= c * d;
        }
        let nv = v.norm();
        if nv <= 1e-8 {
            continue;
        }
        let x = v / nv;
        let y = jm.transpose() * &x / r;
        xs.push(x.iter().copied().collect());
        ys.push(y.iter().copied().collect());
        chosen.push(x);
        chosen.push(y);
    }
    Ok(SymplecticFrame::from_pairs(xs, ys))
}

/// |Pf(B_λ)| via skew-symmetric LTLᵀ elimination with pivoting.
pub fn pfaffian(alg: &StepTwoAlgebra, lambda: &[f64]) -> Result<f64> {
    let a = j_map(alg, lambda)?;
    pfaffian_of(&a).map(f64::abs)
}

/// Pfaffian of a real skew-symmetric matrix (signed).
pub fn pfaffian_of(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch("pfaffian needs a square matrix".into()));
    }
    if n % 2 == 1 {
        return Err(Error::Precondition(format!("pfaffian of odd dimension {n}")));
    }
    let mut a = a.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (off, _) = (k + 1..n)
            .map(|i| (i, a[(i, k)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        if off != k + 1 {
            a.swap_rows(k + 1, off);
            a.swap_columns(k + 1, off);
            pf = -pf;
        }
        if a[(k + 1, k)] == 0.0 {
            return Ok(0.0);
        }
        pf *= a[(k, k + 1)];
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / a[(k, k + 1)]).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}

/// Exterior differential, its adjoint, and the Laplacian of forms on the
/// group in the ladder model, for a given frame and central functional.
pub struct FormComplex {
    pub space: Space,
    pub lambda: Vec<f64>,
    pub d: LinearRule,
    pub d_star: LinearRule,
}

impl FormComplex {
    /// π(Z_a) = −i√|λ| a_a*, π(Z̄_a) = −i√|λ| a_a, π(W_q) = −iλ_q; brackets of
    /// frame vectors enter through −Σ c_AB^q e(τ^A)e(τ^B)i(W_q).
    pub fn new(alg: &StepTwoAlgebra, frame: &SymplecticFrame, lambda: &[f64]) -> Result<Self> {
        alg.check_centre(lambda)?;
        let r = norm(lambda);
        if r == 0.0 {
            return Err(Error::Precondition("central functional must be nonzero".into()));
        }
        let pairs = frame.pairs();
        if 2 * pairs != alg.m {
            return Err(Error::DimensionMismatch(format!("frame has {pairs} pairs for m = {}", alg.m)));
        }
        let space = Space::new(pairs, alg.l)?;
        let o = Ops::new(space);
        let sr = r.sqrt();
        let mut vecs: Vec<(Generator, Vec<Complex64>)> = Vec::with_capacity(2 * pairs);
        for a in 0..pairs {
            vecs.push((Generator::Holo(a), frame.z(a)));
        }
        for a in 0..pairs {
            vecs.push((Generator::Anti(a), frame.zbar(a)));
        }
        let pi = |g: Generator| -> LinearRule {
            match g {
                Generator::Holo(a) => (-I * sr) * &o.cre(a),
                Generator::Anti(a) => (-I * sr) * &o.ann(a),
                Generator::Central(_) => unreachable!(),
            }
        };
        let conj = |g: Generator| match g {
            Generator::Holo(a) => Generator::Anti(a),
            Generator::Anti(a) => Generator::Holo(a),
            c => c,
        };
        let mut d_terms = Vec::new();
        let mut ds_terms = Vec::new();
        for (g, _) in &vecs {
            d_terms.push(o.prod(&[&o.e(*g), &pi(*g)]));
            ds_terms.push(-&o.prod(&[&o.i(*g), &pi(conj(*g))]));
        }
        for (q, &lq) in lambda.iter().enumerate() {
            let w = Generator::Central(q);
            d_terms.push((-I * lq) * &o.e(w));
            ds_terms.push((I * lq) * &o.i(w));
        }
        for a in 0..vecs.len() {
            for b in a + 1..vecs.len() {
                let c = alg.bracket(&vecs[a].1, &vecs[b].1);
                for (q, cq) in c.iter().enumerate() {
                    if cq.norm() < 1e-14 {
                        continue;
                    }
                    let w = Generator::Central(q);
                    let (ga, gb) = (vecs[a].0, vecs[b].0);
                    d_terms.push(-*cq * &o.prod(&[&o.e(ga), &o.e(gb), &o.i(w)]));
                    ds_terms.push(-cq.conj() * &o.prod(&[&o.e(w), &o.i(gb), &o.i(ga)]));
                }
            }
        }
        Ok(FormComplex {
            space,
            lambda: lambda.to_vec(),
            d: o.sum(&d_terms),
            d_star: o.sum(&ds_terms),
        })
    }

    pub fn laplacian(&self) -> LinearRule {
        &(&self.d * &self.d_star) + &(&self.d_star * &self.d)
    }
}

/// Form Laplacian Δ(λ) for an H-type algebra in the Darboux frame. Only
/// degrees 0 and 1 are supported; the rule itself acts on all degrees.
pub fn build_lap(alg: &StepTwoAlgebra, lambda: &[f64], degree: usize) -> Result<LinearRule> {
    if degree > 1 {
        return Err(Error::Precondition(format!("degree {degree} unsupported for generic algebras (only 0 and 1)")));
    }
    let report = is_htype(alg, 16, 0);
    if !report.htype {
        return Err(Error::NotHType(format!("J(W)^2 + |W|^2 deviates by {:.3e}", report.max_deviation)));
    }
    let frame = symplectic_frame(alg, lambda)?;
    Ok(FormComplex::new(alg, &frame, lambda)?.laplacian())
}

/// Δ₀(λ) eigenvalue on ψ_β: |λ|(2|β| + n′) + |λ|², n′ = m/2.
pub fn zero_form_eigenvalue(pairs: usize, lambda_norm: f64, beta_total: u32) -> f64 {
    lambda_norm * (2.0 * beta_total as f64 + pairs as f64) + lambda_norm * lambda_norm
}

/// All ψ_β ⊗ (degree-p word) with |β| ≤ max_total, in a fixed order.
pub fn truncated_basis(space: Space, degree: usize, max_total: u32) -> Vec<BasisElement> {
    let words = words_of_degree(space, degree);
    let mut out = Vec::new();
    for beta in betas_up_to(space.modes, max_total) {
        for w in &words {
            out.push(BasisElement::new(beta.clone(), *w));
        }
    }
    out
}

pub fn words_of_degree(space: Space, degree: usize) -> Vec<FormWord> {
    let gens = space.all_generators();
    let total = gens.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << total) {
        if mask.count_ones() as usize != degree {
            continue;
        }
        let chosen: Vec<Generator> = (0..total).filter(|&t| mask >> t & 1 == 1).map(|t| gens[t]).collect();
        if let Some((w, _)) = FormWord::from_generators(&chosen) {
            out.push(w);
        }
    }
    out.sort();
    out
}

/// All β ∈ ℤ₊^modes with |β| ≤ max_total, ordered by (|β|, β).
pub fn betas_up_to(modes: usize, max_total: u32) -> Vec<Vec<u32>> {
    fn rec(modes: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == modes {
            out.push(cur.clone());
            return;
        }
        for b in 0..=left {
            cur.push(b);
            rec(modes, left - b, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(modes, max_total, &mut Vec::new(), &mut out);
    out.sort_by_key(|b| (b.iter().sum::<u32>(), b.clone()));
    out
}

/// P A P on span(basis) for an orthonormal basis of elements; terms leaving
/// the span are dropped (Galerkin truncation).
pub fn truncated_matrix(rule: &LinearRule, basis: &[BasisElement]) -> CMatrix {
    use std::collections::HashMap;
    let index: HashMap<&BasisElement, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut m = CMatrix::zeros(basis.len(), basis.len());
    for (j, e) in basis.iter().enumerate() {
        for (t, c) in rule.apply_element(e).iter() {
            if let Some(&i) = index.get(t) {
                m[(i, j)] += *c;
            }
        }
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub lambda_norm_sq: f64,
    pub min_eigenvalue: f64,
    pub margin: f64,
    pub holds: bool,
    pub dimension: usize,
}

/// Smallest Ritz value of Δ(λ) on degree-p forms with |β| ≤ max_total,
/// compared with |λ|². Ritz values of a compression are bounded below by
/// the operator's lower bound, so a violation would falsify it.
pub fn lower_bound_check(alg: &StepTwoAlgebra, lambda: &[f64], degree: usize, max_total: u32) -> Result<LowerBoundReport> {
    let lap = build_lap(alg, lambda, degree)?;
    let basis = truncated_basis(lap.space(), degree, max_total);
    let m = truncated_matrix(&lap, &basis);
    let spec = linalg::hermitian_spectrum(&m, None)?;
    let r2 = lambda.iter().map(|x| x * x).sum::<f64>();
    let min = spec.min();
    Ok(LowerBoundReport {
        lambda_norm_sq: r2,
        min_eigenvalue: min,
        margin: min - r2,
        holds: min >= r2 - 1e-9,
        dimension: basis.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThreeValuesReport {
    pub eigenvalues: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub deviation: f64,
    pub leak: f64,
    /// Eigenvalues of the displayed 3×3 matrix against the closed form.
    pub reference_deviation: f64,
}

/// Compresses Δ₁(λ) onto v₁ = Σ a_j*ψ_β τ^j, v₂ = Σ a_jψ_β τ^{j̄},
/// v₃ = Σ λ_q ψ_β ω^q and compares with the closed-form eigenvalues.
pub fn three_values_check(alg: &StepTwoAlgebra, lambda: &[f64], beta: &[u32]) -> Result<ThreeValuesReport> {
    let lap = build_lap(alg, lambda, 1)?;
    let space = lap.space();
    if beta.len() != space.modes {
        return Err(Error::DimensionMismatch(format!("beta has length {}, expected {}", beta.len(), space.modes)));
    }
    let o = Ops::new(space);
    let psi = SparseVector::basis(BasisElement::new(beta.to_vec(), FormWord::EMPTY));
    let mut v1 = SparseVector::new();
    let mut v2 = SparseVector::new();
    let one = Complex64::new(1.0, 0.0);
    for j in 0..space.modes {
        v1.axpy(one, &o.prod(&[&o.cre(j), &o.e(Generator::Holo(j))]).apply(&psi));
        v2.axpy(one, &o.prod(&[&o.ann(j), &o.e(Generator::Anti(j))]).apply(&psi));
    }
    let mut v3 = SparseVector::new();
    for (q, &lq) in lambda.iter().enumerate() {
        v3.axpy(Complex64::new(lq, 0.0), &o.e(Generator::Central(q)).apply(&psi));
    }
    let vecs: Vec<SparseVector> = [v1, v2, v3].into_iter().filter(|v| !v.is_empty()).collect();
    let ortho = linalg::orthonormalize(&vecs);
    let (m, leak) = linalg::compress(&lap, &ortho);
    let eigenvalues = linalg::hermitian_spectrum(&m, None)?.eigenvalues;
    let r = norm(lambda);
    let b = beta.iter().sum::<u32>() as f64;
    let n = space.modes as f64;
    let mu = r * (2.0 * b + n) + r * r;
    let rad = (0.25 * n * n + mu).sqrt();
    let mut closed_form = vec![mu, mu + 0.5 * n - rad, mu + 0.5 * n + rad];
    closed_form.sort_by(f64::total_cmp);
    let deviation = if eigenvalues.len() == 3 {
        eigenvalues.iter().zip(&closed_form).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let r32 = r.powf(1.5);
    let shown = DMatrix::from_row_slice(
        3,
        3,
        &[
            mu + r, 0.0, -r32,
            0.0, mu - r, r32,
            -(b + n) / r.sqrt(), b / r.sqrt(), mu + n,
        ],
    );
    let mut shown_eigs: Vec<f64> = shown.complex_eigenvalues().iter().map(|c| c.re).collect();
    shown_eigs.sort_by(f64::total_cmp);
    let reference_deviation = shown_eigs.iter().zip(&closed_form).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(ThreeValuesReport {
        eigenvalues,
        closed_form,
        deviation,
        leak,
        reference_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{HeisenbergContext, LaplacianMode};

    #[test]
    fn j_map_examples() {
        let h = StepTwoAlgebra::heisenberg(1);
        let j = j_map(&h, &[1.0]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert_eq!(j_map(&h, &[0.0]).unwrap(), DMatrix::zeros(2, 2));
        let d = StepTwoAlgebra::dgroup(1);
        let j2 = j_map(&d, &[0.0, 1.0]).unwrap();
        assert_eq!(j2[(0, 3)], 1.0);
        assert_eq!(j2[(1, 2)], 1.0);
        assert_eq!(j2[(0, 2)], 0.0);
    }

    #[test]
    fn htype_classification() {
        assert!(is_htype(&StepTwoAlgebra::heisenberg(3), 50, 1).htype);
        assert!(is_htype(&StepTwoAlgebra::dgroup(2), 50, 1).htype);
        let bad = StepTwoAlgebra::from_entries(2, 2, &[(0, 1, 0, 1.0)]).unwrap();
        assert!(!is_htype(&bad, 10, 1).htype);
    }

    #[test]
    fn rejects_inconsistent_duplicates() {
        assert!(StepTwoAlgebra::from_entries(2, 1, &[(0, 1, 0, 1.0), (1, 0, 0, 1.0)]).is_err());
        assert!(StepTwoAlgebra::from_entries(2, 1, &[(0, 1, 0, 1.0), (1, 0, 0, -1.0)]).is_ok());
        assert!(StepTwoAlgebra::from_json(r#"{"m":2,"l":1,"C":[[0,1,0,1.0]]}"#).is_ok());
    }

    #[test]
    fn frames_and_pfaffians() {
        let d = StepTwoAlgebra::dgroup(1);
        let f = symplectic_frame(&d, &[3.0, 4.0]).unwrap();
        let rep = frame_invariants(&d, &[3.0, 4.0], &f).unwrap();
        assert!(rep.ok(1e-10), "{rep:?}");
        assert!((pfaffian(&d, &[3.0, 4.0]).unwrap() - 25.0).abs() < 1e-10);
        let h = StepTwoAlgebra::heisenberg(3);
        assert!((pfaffian(&h, &[2.0]).unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(pfaffian(&h, &[0.0]).unwrap(), 0.0);
        let bad = StepTwoAlgebra::from_entries(2, 2, &[(0, 1, 0, 1.0)]).unwrap();
        assert!(matches!(symplectic_frame(&bad, &[0.0, 1.0]), Err(Error::NotHType(_))));
    }

    #[test]
    fn heisenberg_regression() {
        let n = 2;
        let k = 1.7;
        let lap = build_lap(&StepTwoAlgebra::heisenberg(n), &[k], 1).unwrap();
        let ctx = HeisenbergContext::new(n, k, 1).unwrap();
        let reference = ctx.laplacian(LaplacianMode::Explicit);
        for gamma in crate::heisenberg::gammas(n, 1, 3) {
            let block = ctx.block(&gamma).unwrap();
            let a = linalg::matrix_of(&lap, &block.basis, &block.basis).unwrap();
            let b = linalg::matrix_of(&reference, &block.basis, &block.basis).unwrap();
            assert!(linalg::max_abs(&(a - b)) < 1e-10, "gamma {gamma:?}");
        }
    }

    #[test]
    fn three_values() {
        for (alg, lam, beta) in [
            (StepTwoAlgebra::heisenberg(2), vec![1.3], vec![1u32, 2]),
            (StepTwoAlgebra::dgroup(1), vec![0.6, 0.8], vec![2, 1]),
        ] {
            let r = three_values_check(&alg, &lam, &beta).unwrap();
            assert!(r.leak < 1e-10 && r.deviation < 1e-9, "{r:?}");
            assert!(r.reference_deviation < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn zero_forms_diagonal() {
        let alg = StepTwoAlgebra::dgroup(1);
        let lap = build_lap(&alg, &[0.6, 0.8], 0).unwrap();
        for beta in betas_up_to(2, 3) {
            let e = BasisElement::new(beta.clone(), FormWord::EMPTY);
            let img = lap.apply_element(&e);
            let want = zero_form_eigenvalue(2, 1.0, beta.iter().sum());
            assert!((img.get(&e).re - want).abs() < 1e-10);
            assert!((img.norm() - want).abs() < 1e-10);
        }
    }
}

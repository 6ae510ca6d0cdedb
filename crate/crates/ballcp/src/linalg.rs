//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything here operates on dynamically sized `nalgebra` matrices over
//! `Complex<f64>`. Conventions:
//!
//! - Hermitian eigendecompositions return eigenvalues sorted ascending with
//!   matching eigenvector columns.
//! - Operator norm means largest singular value; `frobenius_inner` is
//!   conjugate-linear in its first argument.
//! - Permutation operators act on tensor factors of `(C^m)^{⊗n}` indexed
//!   row-major (factor 0 is the slowest index), matching `kronecker`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Relative scale used in tolerance comparisons: `max(1, s)`.
pub fn scale_of(s: f64) -> f64 {
    s.abs().max(1.0)
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Embeds a real matrix as a complex one.
pub fn to_complex(a: &RMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| cr(a[(i, j)]))
}

/// Hermitian part `(H + H†)/2`.
pub fn hermitian_part(h: &CMat) -> CMat {
    (h + h.adjoint()) * cr(0.5)
}

/// Operator norm of the anti-Hermitian defect `‖H − H†‖₂`.
pub fn hermitian_defect(h: &CMat) -> f64 {
    opnorm(&(h - h.adjoint()))
}

/// Largest singular value; 0 for empty matrices.
pub fn opnorm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    sv.iter().cloned().fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized first; callers gate on `hermitian_defect`
/// themselves when that matters.
pub fn herm_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let se = hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigs: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (eigs, vecs)
}

/// Number of eigenvalues `≥ threshold` (inclusive).
pub fn rank_at(eigs: &[f64], threshold: f64) -> usize {
    eigs.iter().filter(|&&x| x >= threshold && x > 0.0).count()
}

/// Frobenius inner product `tr(A†B)`, conjugate-linear in `a`.
pub fn frobenius_inner(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub fn pinv(m: &CMat, rel_cutoff: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    m.clone()
        .pseudo_inverse(rel_cutoff * smax.max(f64::MIN_POSITIVE))
        .expect("svd already computed")
}

/// Least-squares solution `X` of `A X = B` via the pseudo-inverse.
pub fn lstsq(a: &CMat, b: &CMat, rel_cutoff: f64) -> CMat {
    pinv(a, rel_cutoff) * b
}

/// Numerical rank with a singular-value cutoff relative to the largest.
pub fn col_rank(m: &CMat, rel_cutoff: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    sv.iter().filter(|&&s| s >= rel_cutoff * smax && s > 0.0).count()
}

/// Numerical rank of a real matrix, same cutoff convention as [`col_rank`].
pub fn real_rank(m: &RMat, rel_cutoff: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    sv.iter().filter(|&&s| s >= rel_cutoff * smax && s > 0.0).count()
}

/// Real Moore-Penrose pseudo-inverse with a relative cutoff.
pub fn real_pinv(m: &RMat, rel_cutoff: f64) -> RMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RMat::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    m.clone()
        .pseudo_inverse(rel_cutoff * smax.max(f64::MIN_POSITIVE))
        .expect("svd already computed")
}

/// n-fold Kronecker power; the zeroth power is the 1×1 identity.
pub fn kron_power(m: &CMat, n: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for _ in 0..n {
        out = out.kronecker(m);
    }
    out
}

/// Column-major flattening of a matrix into a vector.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_iterator(m.nrows() * m.ncols(), m.iter().cloned())
}

/// Inverse of [`vec_of`] for an `r × c` matrix.
pub fn unvec(v: &CVec, r: usize, co: usize) -> CMat {
    CMat::from_iterator(r, co, v.iter().cloned())
}

/// Identity on `n` complex dimensions.
pub fn ceye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Square block-diagonal assembly of square blocks.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let dim: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(dim, dim);
    let mut start = 0usize;
    for b in blocks {
        out.view_mut((start, start), (b.nrows(), b.ncols())).copy_from(b);
        start += b.nrows();
    }
    out
}

// ---------------------------------------------------------------------------
// Permutations and tensor-leg actions
// ---------------------------------------------------------------------------

/// All permutations of `{0, …, n−1}` in a fixed deterministic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(&mut cur, n, &mut out);
    out
}

fn heap_permute(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(cur, k - 1, out);
        if k.is_multiple_of(2) {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// Permutation operator `P_σ` on `(C^m)^{⊗n}` with
/// `P_σ (v_0 ⊗ … ⊗ v_{n−1}) = v_{σ⁻¹(0)} ⊗ … ⊗ v_{σ⁻¹(n−1)}`.
pub fn permutation_operator(m: usize, sigma: &[usize]) -> CMat {
    let n = sigma.len();
    let dim = m.pow(n as u32);
    let mut p = CMat::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    for col in 0..dim {
        // digits of `col` in base m, factor 0 slowest
        let mut rest = col;
        for k in (0..n).rev() {
            digits[k] = rest % m;
            rest /= m;
        }
        let mut row = 0usize;
        for k in 0..n {
            row = row * m + digits[sigma[k]];
        }
        p[(row, col)] = cr(1.0);
    }
    p
}

// ---------------------------------------------------------------------------
// Seeded random draws
// ---------------------------------------------------------------------------

/// Standard real Gaussian.
pub fn randn<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian (independent real and imaginary parts).
pub fn crandn<R: Rng>(rng: &mut R) -> C64 {
    c(randn(rng), randn(rng))
}

/// Matrix with independent complex Gaussian entries.
pub fn ginibre<R: Rng>(rng: &mut R, r: usize, co: usize) -> CMat {
    CMat::from_fn(r, co, |_, _| crandn(rng))
}

/// Matrix with independent real Gaussian entries (as a complex matrix).
pub fn ginibre_real<R: Rng>(rng: &mut R, r: usize, co: usize) -> CMat {
    CMat::from_fn(r, co, |_, _| cr(randn(rng)))
}

/// Real Gaussian matrix.
pub fn randn_mat<R: Rng>(rng: &mut R, r: usize, co: usize) -> RMat {
    RMat::from_fn(r, co, |_, _| randn(rng))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let rm = qr.r();
    for j in 0..n {
        let d = rm[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}

/// Haar-distributed real orthogonal matrix (complex storage, real entries).
pub fn haar_orthogonal<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = ginibre_real(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let rm = qr.r();
    for j in 0..n {
        let s = if rm[(j, j)].re < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            q[(i, j)] *= cr(s);
        }
    }
    q
}

/// Random PSD matrix `B B†` with `B` an `n × rank` Ginibre draw.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize) -> CMat {
    let b = ginibre(rng, n, rank.max(1));
    &b * b.adjoint()
}

// ---------------------------------------------------------------------------
// Deterministic formatting
// ---------------------------------------------------------------------------

/// Canonical float rendering for reports: fixed scientific notation, `-0`
/// collapsed to `0` so byte-identity does not hinge on signed zeros.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12e}")
}

/// Canonical complex rendering `re+imi` used in witness payloads.
pub fn fmt_c64(z: C64) -> String {
    format!("{}{}{}i", fmt_f64(z.re), if z.im < 0.0 { "" } else { "+" }, fmt_f64(z.im))
}

/// One-line matrix rendering: rows bracketed, entries comma-separated.
pub fn fmt_cmat(m: &CMat) -> String {
    let mut s = String::from("[");
    for i in 0..m.nrows() {
        if i > 0 {
            s.push_str("; ");
        }
        s.push('[');
        for j in 0..m.ncols() {
            if j > 0 {
                s.push_str(", ");
            }
            s.push_str(&fmt_c64(m[(i, j)]));
        }
        s.push(']');
    }
    s.push(']');
    s
}

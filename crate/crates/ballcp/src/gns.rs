//! Reproducing-kernel representations of positive definite functions on
//! finite *-semigroups, with minimal dilations, a scaling-limit
//! construction for interval samples, and uniqueness checks.
//!
//! The kernel convention matches the rest of the crate: the Gram block at
//! row `s`, column `t` is `phi(s t*)`. Reading `K_t` as the evaluation
//! functional at `t`, the representation acts by `K_t pi(s) = K_{ts}`,
//! which on coordinate vectors becomes the letter map `t -> t s*`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{AlgebraDescriptor, ElemData, Element, Kind};
use crate::error::{Error, Result};
use crate::linalg::{
    ceye, col_rank, herm_eigen, opnorm, pinv, CMat, CVec, C64,
};
use crate::positivity::{
    psd_certificate, ClosureFunction, GramCertificate, OperatorFunction, PSD_TOL,
    RANK_REL_THRESHOLD,
};
use crate::semigroup::{AbsoluteValue, SemigroupTable};

/// Largest exponent used by the default scaling grid `1 - 2^{-k}`.
pub const MAX_SCALING_EXPONENT: usize = 12;

/// Point mass at one semigroup letter.
pub fn delta(domain: &Arc<AlgebraDescriptor>, letter: usize) -> Result<Element> {
    match &domain.kind {
        Kind::Semigroup { table, .. } => {
            if letter >= table.letters {
                return Err(Error::Domain(format!(
                    "letter index {letter} out of range for a table with {} letters",
                    table.letters
                )));
            }
            let mut w = vec![0.0; table.letters];
            w[letter] = 1.0;
            Ok(Element::new(domain.clone(), ElemData::Sum(w)))
        }
        _ => Err(Error::Unsupported(
            "point masses exist only in semigroup algebras".into(),
        )),
    }
}

fn semigroup_data(phi: &dyn OperatorFunction) -> Result<(Arc<SemigroupTable>, AbsoluteValue)> {
    match &phi.domain().kind {
        Kind::Semigroup { table, alpha } => Ok((table.clone(), alpha.clone())),
        _ => Err(Error::Unsupported(format!(
            "function {} is not defined on a semigroup algebra",
            phi.label()
        ))),
    }
}

/// Extend per-letter block values to a linear function on the semigroup
/// algebra. Evaluation at `sum_s w_s delta_s` returns `sum_s w_s V_s`.
pub fn table_function(
    domain: &Arc<AlgebraDescriptor>,
    values: Vec<CMat>,
    label: impl Into<String>,
) -> Result<ClosureFunction> {
    let table = match &domain.kind {
        Kind::Semigroup { table, .. } => table.clone(),
        _ => {
            return Err(Error::Unsupported(
                "table functions require a semigroup algebra domain".into(),
            ))
        }
    };
    if values.len() != table.letters {
        return Err(Error::Domain(format!(
            "expected one value per letter ({}), got {}",
            table.letters,
            values.len()
        )));
    }
    let d = values[0].nrows();
    for v in &values {
        if v.nrows() != d || v.ncols() != d {
            return Err(Error::Domain(
                "all letter values must be square blocks of one size".into(),
            ));
        }
    }
    Ok(ClosureFunction::new(
        domain.clone(),
        d,
        label,
        move |a: &Element| match &a.data {
            ElemData::Sum(w) => {
                let mut out = CMat::zeros(d, d);
                for (s, c) in w.iter().enumerate() {
                    if *c != 0.0 {
                        out += values[s].map(|z| z * *c);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::DescriptorMismatch(
                "table function applied to a non-semigroup element".into(),
            )),
        },
    ))
}

/// Evaluate `phi` at every point mass of its semigroup domain.
pub fn letter_values(phi: &dyn OperatorFunction) -> Result<Vec<CMat>> {
    let (table, _) = semigroup_data(phi)?;
    (0..table.letters)
        .map(|s| phi.eval(&delta(phi.domain(), s)?))
        .collect()
}

/// Block Gram matrix of `phi` over its whole table: block `(s, t)` is
/// `phi(s t*)`.
pub fn build_gram(phi: &dyn OperatorFunction) -> Result<CMat> {
    let (table, _) = semigroup_data(phi)?;
    let values = letter_values(phi)?;
    let d = phi.output_dim();
    let n = table.letters;
    let mut k = CMat::zeros(n * d, n * d);
    for s in 0..n {
        for t in 0..n {
            let prod = table.mul(s, table.inv[t]);
            k.view_mut((s * d, t * d), (d, d)).copy_from(&values[prod]);
        }
    }
    Ok(k)
}

/// Verify the boundedness inequality `phi(s* t* t s) <= alpha(t)^2 phi(s* s)`
/// blockwise over the table, against the weight function carried by the
/// domain. Returns the pass flag and the worst eigenvalue margin
/// (nonnegative margins certify the inequality).
pub fn alpha_bounded_check(phi: &dyn OperatorFunction, tol: f64) -> Result<(bool, f64)> {
    let (_, alpha) = semigroup_data(phi)?;
    alpha_bounded_check_with(phi, &alpha, tol)
}

/// Same inequality against explicit candidate weights, which need not be
/// submultiplicative; this is how an unsuitable candidate is detected.
pub fn alpha_bounded_check_with(
    phi: &dyn OperatorFunction,
    alpha: &AbsoluteValue,
    tol: f64,
) -> Result<(bool, f64)> {
    let (table, _) = semigroup_data(phi)?;
    if alpha.weights.len() != table.letters {
        return Err(Error::Domain(format!(
            "weight count {} differs from letter count {}",
            alpha.weights.len(),
            table.letters
        )));
    }
    let values = letter_values(phi)?;
    let scale = values.iter().map(opnorm).fold(1.0_f64, f64::max);
    let mut worst = f64::INFINITY;
    for s in 0..table.letters {
        let ss = table.mul(table.inv[s], s);
        for t in 0..table.letters {
            let a = alpha.get(t);
            let stts = table.mul(table.mul(table.mul(table.inv[s], table.inv[t]), t), s);
            let m = values[ss].map(|z| z * a * a) - &values[stts];
            let herm = crate::linalg::hermitian_part(&m);
            let (eigs, _) = herm_eigen(&herm);
            let min = eigs.first().copied().unwrap_or(0.0);
            if min < worst {
                worst = min;
            }
        }
    }
    if table.letters == 0 {
        worst = 0.0;
    }
    Ok((worst >= -tol * scale, worst))
}

/// Minimal dilation of a positive definite function: Hilbert dimension,
/// representation matrices per letter, the linking map when the table is
/// unital, and first-class residuals.
#[derive(Debug, Clone, Serialize)]
pub struct DilationResult {
    pub hilbert_dim: usize,
    /// One representation matrix per letter (or per grid point for
    /// scaling-limit runs), each `h x h`.
    pub pi: Vec<CMat>,
    /// Linking map `h x d`; absent when the table has no unit.
    pub iota: Option<CMat>,
    /// Per-letter `|phi(s) - iota* pi(s) iota|`; empty without a unit.
    pub reconstruction_residuals: Vec<f64>,
    /// Worst least-squares defect of the translation relations that
    /// define `pi`, relative to the Gram scale.
    pub relation_residual: f64,
    /// Worst `|pi(s*) - pi(s)†|` over letters.
    pub adjoint_defect: f64,
    /// Worst `|pi(st) - pi(s) pi(t)|` over table pairs.
    pub multiplicativity_defect: f64,
    /// `max_s (|pi(s)| - alpha(s))`.
    pub contraction_margin: f64,
    /// Whether `pi(S) iota V` spans the whole dilation space.
    pub minimal: bool,
    /// Certificate of the Gram matrix the construction started from.
    pub gram: GramCertificate,
}

struct GramFactor {
    /// Kept eigenvalues, ascending.
    lambda: Vec<f64>,
    /// Coordinate matrix, `h x (n d)`; column `(t, a)` holds the
    /// coordinates of the kernel section at letter `t`, channel `a`.
    w: CMat,
}

fn factor_gram(k: &CMat) -> (GramFactor, GramCertificate) {
    let cert = psd_certificate(k, PSD_TOL);
    let (eigs, u) = herm_eigen(k);
    let lam_max = eigs.last().copied().unwrap_or(0.0).max(0.0);
    let thr = RANK_REL_THRESHOLD * lam_max;
    let kept: Vec<usize> = (0..eigs.len())
        .filter(|&i| eigs[i] >= thr && eigs[i] > 0.0)
        .collect();
    let h = kept.len();
    let nd = k.nrows();
    let mut w = CMat::zeros(h, nd);
    let mut lambda = Vec::with_capacity(h);
    for (row, &idx) in kept.iter().enumerate() {
        let scale = eigs[idx].sqrt();
        for col in 0..nd {
            w[(row, col)] = u[(col, idx)].conj() * scale;
        }
        lambda.push(eigs[idx]);
    }
    (GramFactor { lambda, w }, cert)
}

impl GramFactor {
    /// Least-squares representer of the linear system `X W = target`,
    /// using `W W† = diag(lambda)`.
    fn solve_against(&self, target: &CMat) -> CMat {
        let h = self.lambda.len();
        let mut wplus = self.w.adjoint();
        for (k, lam) in self.lambda.iter().enumerate() {
            for r in 0..wplus.nrows() {
                wplus[(r, k)] /= C64::new(*lam, 0.0);
            }
        }
        if h == 0 {
            CMat::zeros(0, 0)
        } else {
            target * wplus
        }
    }

    /// Coordinates of an external kernel section given its Gram column
    /// against the sample, solved in least squares.
    fn project_column(&self, gram_column: &CMat) -> CMat {
        let h = self.lambda.len();
        let d = gram_column.ncols();
        if h == 0 {
            return CMat::zeros(0, d);
        }
        let mut c = &self.w * gram_column;
        for (k, lam) in self.lambda.iter().enumerate() {
            for j in 0..d {
                c[(k, j)] /= C64::new(*lam, 0.0);
            }
        }
        c
    }
}

/// GNS construction over a finite table. Eigendecomposes the Gram matrix,
/// truncates at the relative rank threshold, solves the translation
/// relations for the representation, and reads the linking map off the
/// unit letter when there is one.
pub fn gns_construct(phi: &dyn OperatorFunction, tol: f64) -> Result<DilationResult> {
    let (table, alpha) = semigroup_data(phi)?;
    let values = letter_values(phi)?;
    let d = phi.output_dim();
    let n = table.letters;

    let k = build_gram(phi)?;
    let (factor, cert) = factor_gram(&k);
    if !cert.passed() {
        return Err(Error::NotPositiveDefinite { min_eig: cert.min_eig, dim: cert.dim });
    }
    let (bounded, margin) = alpha_bounded_check(phi, tol.max(PSD_TOL))?;
    if !bounded {
        return Err(Error::Domain(format!(
            "function is not alpha-bounded on its table: worst operator margin {margin:.3e}"
        )));
    }

    let h = factor.lambda.len();
    let gram_scale = factor.lambda.last().copied().unwrap_or(0.0).sqrt().max(1.0);

    // pi(s) moves the kernel section at t to the section at t s*.
    let mut pi = Vec::with_capacity(n);
    let mut relation_residual = 0.0_f64;
    for s in 0..n {
        let mut target = CMat::zeros(h, n * d);
        for t in 0..n {
            let dest = table.mul(t, table.inv[s]);
            target
                .view_mut((0, t * d), (h, d))
                .copy_from(&factor.w.view((0, dest * d), (h, d)));
        }
        let p = factor.solve_against(&target);
        let defect = opnorm(&(&p * &factor.w - &target)) / gram_scale;
        relation_residual = relation_residual.max(defect);
        pi.push(p);
    }
    if relation_residual > tol {
        return Err(Error::IllConditioned {
            residual: relation_residual,
            rank: h,
            min_kept: factor.lambda.first().copied().unwrap_or(0.0),
        });
    }

    let mut adjoint_defect = 0.0_f64;
    let mut mult_defect = 0.0_f64;
    for s in 0..n {
        adjoint_defect = adjoint_defect.max(opnorm(&(&pi[table.inv[s]] - pi[s].adjoint())));
        for t in 0..n {
            let st = table.mul(s, t);
            mult_defect = mult_defect.max(opnorm(&(&pi[st] - &pi[s] * &pi[t])));
        }
    }

    let (iota, reconstruction_residuals) = match table.unit {
        Some(e) => {
            let iota: CMat = factor.w.view((0, e * d), (h, d)).into();
            let residuals = (0..n)
                .map(|s| opnorm(&(&values[s] - iota.adjoint() * &pi[s] * &iota)))
                .collect();
            (Some(iota), residuals)
        }
        None => (None, Vec::new()),
    };

    let contraction_margin = (0..n)
        .map(|s| opnorm(&pi[s]) - alpha.get(s))
        .fold(f64::NEG_INFINITY, f64::max);

    let minimal = match &iota {
        Some(io) => {
            let mut span = CMat::zeros(h, n * d);
            for s in 0..n {
                span.view_mut((0, s * d), (h, d)).copy_from(&(&pi[s] * io));
            }
            col_rank(&span, RANK_REL_THRESHOLD) == h
        }
        None => col_rank(&factor.w, RANK_REL_THRESHOLD) == h,
    };

    Ok(DilationResult {
        hilbert_dim: h,
        pi,
        iota,
        reconstruction_residuals,
        relation_residual,
        adjoint_defect,
        multiplicativity_defect: mult_defect,
        contraction_margin,
        minimal,
        gram: cert,
    })
}

/// Outcome of matching two minimal dilations of the same function.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub intertwiner: CMat,
    /// Worst defect of `U pi1(s) iota1 = pi2(s) iota2` and of the full
    /// intertwining relation over letters.
    pub intertwining_residual: f64,
    /// `|U†U - I|`.
    pub unitarity_defect: f64,
}

/// Solve the intertwiner between two minimal dilations by least squares
/// over all letters and report how unitary and how intertwining it is.
pub fn uniqueness_intertwiner(
    d1: &DilationResult,
    d2: &DilationResult,
) -> Result<UniquenessReport> {
    if !d1.minimal || !d2.minimal {
        return Err(Error::NotMinimal(
            "uniqueness needs minimal dilations; re-run gns_construct to obtain them".into(),
        ));
    }
    let (io1, io2) = match (&d1.iota, &d2.iota) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Unsupported(
                "uniqueness matching needs linking maps on both dilations".into(),
            ))
        }
    };
    if d1.pi.len() != d2.pi.len() || io1.ncols() != io2.ncols() {
        return Err(Error::DescriptorMismatch(
            "dilations disagree on letter count or value dimension".into(),
        ));
    }
    let n = d1.pi.len();
    let d = io1.ncols();
    let h1 = d1.hilbert_dim;
    let h2 = d2.hilbert_dim;
    let mut a = CMat::zeros(h1, n * d);
    let mut b = CMat::zeros(h2, n * d);
    for s in 0..n {
        a.view_mut((0, s * d), (h1, d)).copy_from(&(&d1.pi[s] * io1));
        b.view_mut((0, s * d), (h2, d)).copy_from(&(&d2.pi[s] * io2));
    }
    let u = &b * pinv(&a, 1e-12);
    let mut residual = 0.0_f64;
    for s in 0..n {
        let lhs = &u * a.view((0, s * d), (h1, d));
        let rhs = b.view((0, s * d), (h2, d));
        residual = residual.max(opnorm(&(lhs - rhs)));
        if h1 == h2 {
            residual = residual.max(opnorm(&(&u * &d1.pi[s] - &d2.pi[s] * &u)));
        }
    }
    let unitarity_defect = opnorm(&(u.adjoint() * &u - ceye(h1)));
    Ok(UniquenessReport { intertwiner: u, intertwining_residual: residual, unitarity_defect })
}

/// Geometric grid `1 - 2^{-k}` for `k = 1..=k_max`, capped at the module
/// maximum.
pub fn scaling_grid(k_max: usize) -> Vec<f64> {
    (1..=k_max.min(MAX_SCALING_EXPONENT))
        .map(|k| 1.0 - 0.5_f64.powi(k as i32))
        .collect()
}

/// Polynomial extrapolation of matrix-valued samples to node zero
/// (Neville form). On a ratio-2 geometric node set this reproduces
/// second-order Richardson extrapolation exactly.
fn extrapolate_to_zero(nodes: &[f64], blocks: &[CMat]) -> CMat {
    assert_eq!(nodes.len(), blocks.len());
    assert!(!blocks.is_empty());
    let mut tab: Vec<CMat> = blocks.to_vec();
    let n = tab.len();
    for level in 1..n {
        for i in 0..n - level {
            let xi = nodes[i];
            let xj = nodes[i + level];
            let num = tab[i + 1].map(|z| z * xi) - tab[i].map(|z| z * xj);
            tab[i] = num.map(|z| z / (xi - xj));
        }
    }
    tab[0].clone()
}

/// Scaling-limit dilation report: grid data, the extrapolated linking map,
/// and the norm-bound and convergence checks.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub grid: Vec<f64>,
    /// `|phi(gamma(r))|` per grid point.
    pub phi_norms: Vec<f64>,
    /// Extrapolated `|phi(gamma(r))|` at the upper endpoint.
    pub phi_limit_norm: f64,
    /// Largest of the grid norms and the extrapolated limit; finite-grid
    /// estimate of the limsup in the norm bound.
    pub sup_phi_norm: f64,
    pub iota_norm_sq: f64,
    /// Whether `|iota|^2 <= sup_phi_norm + tol` held.
    pub bound_ok: bool,
    /// Kernel-section Cauchy defect of the last grid pair.
    pub cauchy_defect: f64,
    /// Whether the Cauchy defects decay along the grid (or already sit
    /// below tolerance); false flags non-convergence at this resolution.
    pub converged: bool,
    pub dilation: DilationResult,
}

/// Dilation through the scaling limit: samples `phi` along `gamma(r) = r*1`
/// for grid values `r`, builds the kernel coordinates, and extrapolates the
/// linking map as the limit of the kernel sections at `r -> 1`.
///
/// Products of grid points land off the grid, so the representation
/// matrices are solved in least squares against projected kernel sections
/// and the defect is reported, never hidden.
pub fn dilation_via_scaling(
    phi: &dyn OperatorFunction,
    grid: &[f64],
    tol: f64,
) -> Result<ScalingReport> {
    let m = grid.len();
    if m < 3 {
        return Err(Error::Domain(
            "scaling dilation needs at least three grid points".into(),
        ));
    }
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Domain("scaling grid must be strictly increasing".into()));
        }
    }
    if grid[0] <= 0.0 || grid[m - 1] >= 1.0 {
        return Err(Error::Domain("scaling grid values must lie in (0, 1)".into()));
    }
    let unit = Element::unit(phi.domain())?;
    let at = |x: f64| -> Result<CMat> { phi.eval(&unit.scale(x)) };
    let d = phi.output_dim();

    let mut gram = CMat::zeros(m * d, m * d);
    for i in 0..m {
        for j in 0..m {
            let block = at(grid[i] * grid[j])?;
            gram.view_mut((i * d, j * d), (d, d)).copy_from(&block);
        }
    }
    let (factor, cert) = factor_gram(&gram);
    if !cert.passed() {
        return Err(Error::NotPositiveDefinite { min_eig: cert.min_eig, dim: cert.dim });
    }
    let h = factor.lambda.len();
    let gram_scale = factor.lambda.last().copied().unwrap_or(0.0).sqrt().max(1.0);

    // Gram column of the kernel section at an arbitrary interior point.
    let column_at = |x: f64| -> Result<CMat> {
        let mut g = CMat::zeros(m * d, d);
        for j in 0..m {
            g.view_mut((j * d, 0), (d, d)).copy_from(&at(grid[j] * x)?);
        }
        Ok(g)
    };
    let coord_at = |x: f64| -> Result<CMat> { Ok(factor.project_column(&column_at(x)?)) };

    let mut pi = Vec::with_capacity(m);
    let mut relation_residual = 0.0_f64;
    for i in 0..m {
        let mut target = CMat::zeros(h, m * d);
        for j in 0..m {
            target
                .view_mut((0, j * d), (h, d))
                .copy_from(&coord_at(grid[j] * grid[i])?);
        }
        let p = factor.solve_against(&target);
        relation_residual =
            relation_residual.max(opnorm(&(&p * &factor.w - &target)) / gram_scale);
        pi.push(p);
    }

    let mut adjoint_defect = 0.0_f64;
    let mut mult_defect = 0.0_f64;
    for i in 0..m {
        adjoint_defect = adjoint_defect.max(opnorm(&(&pi[i] - pi[i].adjoint())));
        for j in 0..m {
            let expected = factor.solve_against(&{
                let mut t = CMat::zeros(h, m * d);
                for k in 0..m {
                    t.view_mut((0, k * d), (h, d))
                        .copy_from(&coord_at(grid[k] * grid[i] * grid[j])?);
                }
                t
            });
            mult_defect = mult_defect.max(opnorm(&(&pi[i] * &pi[j] - expected)));
        }
    }

    // Linking map: extrapolate the kernel-section coordinates to r -> 1.
    let window = 3.min(m);
    let nodes: Vec<f64> = grid[m - window..].iter().map(|r| 1.0 - r).collect();
    let sections: Vec<CMat> = (m - window..m)
        .map(|i| CMat::from(factor.w.view((0, i * d), (h, d))))
        .collect();
    let iota = extrapolate_to_zero(&nodes, &sections);
    let iota_norm_sq = opnorm(&iota).powi(2);

    let phi_norms: Vec<f64> = grid.iter().map(|r| at(*r).map(|b| opnorm(&b))).collect::<Result<_>>()?;
    let norm_blocks: Vec<CMat> = phi_norms[m - window..]
        .iter()
        .map(|v| CMat::from_element(1, 1, C64::new(*v, 0.0)))
        .collect();
    let phi_limit_norm = extrapolate_to_zero(&nodes, &norm_blocks)[(0, 0)].re;
    let sup_phi_norm = phi_norms.iter().copied().fold(phi_limit_norm, f64::max);
    let bound_ok = iota_norm_sq <= sup_phi_norm + tol.max(1e-6);

    // Cauchy defects of consecutive kernel sections, computed from the
    // Gram matrix itself so truncation cannot mask a failure.
    let mut defects = Vec::with_capacity(m - 1);
    for i in 0..m - 1 {
        let gii: CMat = gram.view((i * d, i * d), (d, d)).into();
        let gjj: CMat = gram.view(((i + 1) * d, (i + 1) * d), (d, d)).into();
        let gij: CMat = gram.view((i * d, (i + 1) * d), (d, d)).into();
        let gji: CMat = gram.view(((i + 1) * d, i * d), (d, d)).into();
        let diff = crate::linalg::hermitian_part(&(gii + gjj - gij - gji));
        defects.push(opnorm(&diff).max(0.0).sqrt());
    }
    let cauchy_defect = defects.last().copied().unwrap_or(0.0);
    // Geometric decay certifies convergence; the 0.75 ratio leaves margin
    // over the asymptotic halving that the 1 - 2^{-k} grid produces.
    let converged = cauchy_defect <= tol
        || (defects.len() >= 2 && cauchy_defect <= 0.75 * defects[defects.len() - 2]);

    let reconstruction_residuals: Vec<f64> = (0..m)
        .map(|i| opnorm(&(at(grid[i]).expect("evaluated above") - iota.adjoint() * &pi[i] * &iota)))
        .collect();
    let contraction_margin =
        pi.iter().map(opnorm).fold(f64::NEG_INFINITY, f64::max) - 1.0;
    let minimal = {
        let mut span = CMat::zeros(h, m * d);
        for i in 0..m {
            span.view_mut((0, i * d), (h, d)).copy_from(&(&pi[i] * &iota));
        }
        col_rank(&span, RANK_REL_THRESHOLD) == h
    };

    let dilation = DilationResult {
        hilbert_dim: h,
        pi,
        iota: Some(iota),
        reconstruction_residuals,
        relation_residual,
        adjoint_defect,
        multiplicativity_defect: mult_defect,
        contraction_margin,
        minimal,
        gram: cert,
    };

    Ok(ScalingReport {
        grid: grid.to_vec(),
        phi_norms,
        phi_limit_norm,
        sup_phi_norm,
        iota_norm_sq,
        bound_ok,
        cauchy_defect,
        converged,
        dilation,
    })
}

/// Norm of the best kernel-space approximation to a target vector of
/// values, plus the representability defect of the target on the sample.
pub fn rkhs_functional_norm(gram: &CMat, y: &CVec) -> (f64, f64) {
    let gplus = pinv(gram, 1e-12);
    let coef = &gplus * y;
    let norm_sq = (y.adjoint() * &coef)[(0, 0)].re.max(0.0);
    let defect = (gram * &coef - y).norm();
    (norm_sq.sqrt(), defect)
}

/// Best-approximation diagnostic for the vector-valued function
/// `s -> phi(s) v` over the table sample: its kernel-space norm and how
/// representable it is. Reported as a diagnostic only, never as a
/// dilatability verdict.
pub fn rkhs_membership_diagnostic(phi: &dyn OperatorFunction, v: &CVec) -> Result<(f64, f64)> {
    let (table, _) = semigroup_data(phi)?;
    let values = letter_values(phi)?;
    let d = phi.output_dim();
    if v.len() != d {
        return Err(Error::Domain(format!(
            "direction vector has length {}, expected {d}",
            v.len()
        )));
    }
    let gram = build_gram(phi)?;
    let mut y = CVec::zeros(table.letters * d);
    for s in 0..table.letters {
        let block = &values[s] * v;
        for a in 0..d {
            y[s * d + a] = block[a];
        }
    }
    Ok(rkhs_functional_norm(&gram, &y))
}

/// Norm of the summation functional on the pointwise-product truncation
/// with `n` coordinates. The Gram matrix of the coordinate sample is the
/// identity, so the value is the Euclidean norm of the all-ones target.
pub fn nondilatable_norm(n: usize) -> f64 {
    assert!(n >= 1);
    let table = SemigroupTable::pointwise_basis(n);
    // Sample letters: the n coordinate idempotents (letter 0 is the zero).
    let mut gram = CMat::zeros(n, n);
    let value = |letter: usize| if letter == 0 { 0.0 } else { 1.0 };
    for i in 0..n {
        for j in 0..n {
            let prod = table.mul(i + 1, table.inv[j + 1]);
            gram[(i, j)] = C64::new(value(prod), 0.0);
        }
    }
    let y = CVec::from_element(n, C64::new(1.0, 0.0));
    rkhs_functional_norm(&gram, &y).0
}

/// Divergence table for the summation functional across truncation sizes
/// up to `n_max`: rows `(n, norm)` with the norm growing like the square
/// root of the truncation size.
pub fn nondilatable_demo(n_max: usize) -> Vec<(usize, f64)> {
    assert!(n_max >= 1);
    let mut sizes = Vec::new();
    let mut n = 1;
    while n < n_max {
        sizes.push(n);
        n *= 2;
    }
    sizes.push(n_max);
    sizes.iter().map(|&k| (k, nondilatable_norm(k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, opnorm, rank_at};
    use crate::positivity::{pd_function_check, Verdict};
    use crate::rng::fanout;
    use crate::semigroup::AbsoluteValue;
    use rand::Rng;

    fn scalar_values(vals: &[f64]) -> Vec<CMat> {
        vals.iter().map(|v| CMat::from_element(1, 1, C64::new(*v, 0.0))).collect()
    }

    fn mult01_domain() -> Arc<AlgebraDescriptor> {
        let table = Arc::new(SemigroupTable::mult01());
        let alpha = AbsoluteValue::ones(table.letters);
        AlgebraDescriptor::semigroup(table, alpha).expect("valid")
    }

    #[test]
    fn gram_matches_table_lookup() {
        let domain = mult01_domain();
        let phi = table_function(&domain, scalar_values(&[0.5, 1.0]), "half-one").unwrap();
        let k = build_gram(&phi).unwrap();
        let expect = [[0.5, 0.5], [0.5, 1.0]];
        for s in 0..2 {
            for t in 0..2 {
                assert!((k[(s, t)].re - expect[s][t]).abs() < 1e-15);
                assert_eq!(k[(s, t)].im, 0.0);
            }
        }

        // Constant functions give rank-one Gram matrices.
        let table = Arc::new(SemigroupTable::cyclic(3));
        let dom = AlgebraDescriptor::semigroup(table, AbsoluteValue::ones(3)).unwrap();
        let phi_c = table_function(&dom, scalar_values(&[0.7, 0.7, 0.7]), "const").unwrap();
        let kc = build_gram(&phi_c).unwrap();
        let (eigs, _) = herm_eigen(&kc);
        assert_eq!(rank_at(&eigs, RANK_REL_THRESHOLD * eigs.last().unwrap()), 1);

        // Matrix coefficients of a representation reproduce the
        // representation at the product letter blockwise.
        let mut rng = fanout(7, "gns-gram", 0);
        let q = haar_unitary(&mut rng, 3);
        let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let dmat = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(1.0, 0.0),
            z,
            z * z,
        ]));
        let u = &q * dmat * q.adjoint();
        let powers = vec![ceye(3), u.clone(), &u * &u];
        let table3 = Arc::new(SemigroupTable::cyclic(3));
        let dom3 =
            AlgebraDescriptor::semigroup(table3.clone(), AbsoluteValue::ones(3)).unwrap();
        let phi_u = table_function(&dom3, powers.clone(), "rep").unwrap();
        let ku = build_gram(&phi_u).unwrap();
        for s in 0..3 {
            for t in 0..3 {
                let prod = table3.mul(s, table3.inv[t]);
                let block: CMat = ku.view((3 * s, 3 * t), (3, 3)).into();
                assert!(opnorm(&(block - &powers[prod])) < 1e-14);
            }
        }
    }

    #[test]
    fn alpha_bound_examples() {
        let domain = mult01_domain();
        let ones = table_function(&domain, scalar_values(&[1.0, 1.0]), "const-one").unwrap();
        let (ok, margin) = alpha_bounded_check(&ones, 1e-9).unwrap();
        assert!(ok);
        assert!(margin.abs() < 1e-12);

        // Identity function against candidate weights 1/2 fails at the
        // unit letter: 1 > 0.25. The candidate is not submultiplicative,
        // which is exactly why it is passed in raw.
        let half = AbsoluteValue { weights: vec![0.5, 0.5] };
        let ident = table_function(&domain, scalar_values(&[0.0, 1.0]), "ident").unwrap();
        let (ok, margin) = alpha_bounded_check_with(&ident, &half, 1e-9).unwrap();
        assert!(!ok);
        assert!((margin + 0.75).abs() < 1e-12);
    }

    #[test]
    fn gns_trivial_table() {
        let table = Arc::new(SemigroupTable::trivial());
        let dom = AlgebraDescriptor::semigroup(table, AbsoluteValue::ones(1)).unwrap();
        let phi = table_function(&dom, scalar_values(&[1.0]), "unit").unwrap();
        let d = gns_construct(&phi, 1e-8).unwrap();
        assert_eq!(d.hilbert_dim, 1);
        assert!((d.pi[0][(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let iota = d.iota.as_ref().unwrap();
        assert!((iota[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(d.reconstruction_residuals[0] < 1e-12);
        assert!(d.minimal);
    }

    #[test]
    fn gns_rank_one_and_rank_two() {
        let domain = mult01_domain();

        let flat = table_function(&domain, scalar_values(&[1.0, 1.0]), "flat").unwrap();
        let d1 = gns_construct(&flat, 1e-8).unwrap();
        assert_eq!(d1.hilbert_dim, 1);
        for p in &d1.pi {
            assert!((p[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-10);
        }

        let phi = table_function(&domain, scalar_values(&[0.5, 1.0]), "half-one").unwrap();
        let d2 = gns_construct(&phi, 1e-8).unwrap();
        assert_eq!(d2.hilbert_dim, 2);
        assert!(d2.reconstruction_residuals.iter().all(|r| *r < 1e-10));
        assert!(d2.relation_residual < 1e-10);
        assert!(d2.adjoint_defect < 1e-10);
        assert!(d2.multiplicativity_defect < 1e-8);
        assert!(d2.contraction_margin <= 1e-8);
        assert!(d2.minimal);

        // Independent rank computation agrees with the dilation dimension.
        let k = build_gram(&phi).unwrap();
        assert_eq!(col_rank(&k, RANK_REL_THRESHOLD), 2);
    }

    #[test]
    fn gns_rejects_bad_inputs() {
        let domain = mult01_domain();

        // Not positive definite: phi(0) > phi(1) makes the Gram indefinite.
        let bad = table_function(&domain, scalar_values(&[1.0, 0.5]), "bad").unwrap();
        match gns_construct(&bad, 1e-8) {
            Err(Error::NotPositiveDefinite { min_eig, .. }) => assert!(min_eig < 0.0),
            other => panic!("expected a positivity rejection, got {other:?}"),
        }

        // A barely split Gram gets truncated at the rank threshold; with a
        // strict tolerance the translation relations cannot be honored.
        let marginal =
            table_function(&domain, scalar_values(&[1.0, 1.0 + 5e-9]), "marginal").unwrap();
        match gns_construct(&marginal, 1e-10) {
            Err(Error::IllConditioned { residual, rank, .. }) => {
                assert!(residual > 1e-10);
                assert_eq!(rank, 1);
            }
            other => panic!("expected an ill-conditioning rejection, got {other:?}"),
        }
        // A realistic tolerance accepts the truncated construction.
        let relaxed = gns_construct(&marginal, 1e-6).unwrap();
        assert_eq!(relaxed.hilbert_dim, 1);
        assert!(relaxed.reconstruction_residuals.iter().all(|r| *r < 1e-8));
    }

    fn cyclic_rep_coefficient(
        order: usize,
        dim: usize,
        trial: u64,
    ) -> (Arc<AlgebraDescriptor>, ClosureFunction) {
        let mut rng = fanout(40, "gns-rep", trial);
        let q = haar_unitary(&mut rng, dim);
        let diag: Vec<C64> = (0..dim)
            .map(|_| {
                let k = rng.gen_range(0..order) as f64;
                C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / order as f64)
            })
            .collect();
        let u = &q * CMat::from_diagonal(&CVec::from_vec(diag)) * q.adjoint();
        let mut w = CVec::zeros(dim);
        for a in 0..dim {
            w[a] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let w = &w / C64::new(w.norm(), 0.0);
        let mut values = Vec::with_capacity(order);
        let mut pw = ceye(dim);
        for _ in 0..order {
            let val = (w.adjoint() * &pw * &w)[(0, 0)];
            values.push(CMat::from_element(1, 1, val));
            pw = &pw * &u;
        }
        let table = Arc::new(SemigroupTable::cyclic(order));
        let dom = AlgebraDescriptor::semigroup(table, AbsoluteValue::ones(order)).unwrap();
        let phi = table_function(&dom, values, "rep-coefficient").unwrap();
        (dom, phi)
    }

    #[test]
    fn gns_reconstructs_representation_coefficients() {
        for trial in 0..12u64 {
            let order = 2 + (trial as usize % 5);
            let dim = 2 + (trial as usize % 3);
            let (_, phi) = cyclic_rep_coefficient(order, dim, trial);
            let (ok, _) = alpha_bounded_check(&phi, 1e-9).unwrap();
            assert!(ok, "trial {trial}: coefficient of a unitary representation");
            let d = gns_construct(&phi, 1e-8).unwrap();
            assert!(
                d.reconstruction_residuals.iter().all(|r| *r < 1e-8),
                "trial {trial}: reconstruction residuals {:?}",
                d.reconstruction_residuals
            );
            assert!(d.multiplicativity_defect < 1e-8, "trial {trial}");
            assert!(d.adjoint_defect < 1e-10, "trial {trial}");
            assert!(d.contraction_margin <= 1e-8, "trial {trial}");
            assert!(d.minimal, "trial {trial}");
            let k = build_gram(&phi).unwrap();
            assert_eq!(d.hilbert_dim, col_rank(&k, RANK_REL_THRESHOLD));
        }
    }

    #[test]
    fn gns_operator_valued_representation_kernel() {
        // phi(s) = U^s with a unitary U of order 3; the linking map is an
        // isometry and reconstruction is exact to rounding.
        let mut rng = fanout(41, "gns-op", 0);
        let q = haar_unitary(&mut rng, 3);
        let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let dmat = CMat::from_diagonal(&CVec::from_vec(vec![C64::new(1.0, 0.0), z, z * z]));
        let u = &q * dmat * q.adjoint();
        let values = vec![ceye(3), u.clone(), &u * &u];
        let table = Arc::new(SemigroupTable::cyclic(3));
        let dom = AlgebraDescriptor::semigroup(table, AbsoluteValue::ones(3)).unwrap();
        let phi = table_function(&dom, values.clone(), "unitary-powers").unwrap();
        let d = gns_construct(&phi, 1e-8).unwrap();
        assert_eq!(d.hilbert_dim, 3);
        let iota = d.iota.as_ref().unwrap();
        assert!(opnorm(&(iota.adjoint() * iota - ceye(3))) < 1e-10);
        for s in 0..3 {
            let rec = iota.adjoint() * &d.pi[s] * iota;
            assert!(opnorm(&(rec - &values[s])) < 1e-10);
        }
    }

    #[test]
    fn uniqueness_matches_conjugated_dilations() {
        let (_, phi) = cyclic_rep_coefficient(4, 3, 9);
        let d1 = gns_construct(&phi, 1e-8).unwrap();

        // Identity case.
        let same = uniqueness_intertwiner(&d1, &d1).unwrap();
        assert!(same.intertwining_residual < 1e-10);
        assert!(same.unitarity_defect < 1e-10);
        assert!(opnorm(&(&same.intertwiner - ceye(d1.hilbert_dim))) < 1e-9);

        // Conjugating by a fixed unitary must be recovered up to phase.
        let mut rng = fanout(42, "gns-unique", 1);
        let wmat = haar_unitary(&mut rng, d1.hilbert_dim);
        let mut d2 = d1.clone();
        d2.pi = d1.pi.iter().map(|p| &wmat * p * wmat.adjoint()).collect();
        d2.iota = d1.iota.as_ref().map(|io| &wmat * io);
        let rep = uniqueness_intertwiner(&d1, &d2).unwrap();
        assert!(rep.intertwining_residual < 1e-9, "{}", rep.intertwining_residual);
        assert!(rep.unitarity_defect < 1e-9);
        let overlap = (wmat.adjoint() * &rep.intertwiner).trace();
        let phase = overlap / C64::new(overlap.norm(), 0.0);
        assert!(opnorm(&(&rep.intertwiner - wmat.map(|z| z * phase))) < 1e-8);

        // Different functions produce a visible mismatch.
        let (_, psi) = cyclic_rep_coefficient(4, 3, 10);
        let d3 = gns_construct(&psi, 1e-8).unwrap();
        if d3.hilbert_dim == d1.hilbert_dim {
            let bad = uniqueness_intertwiner(&d1, &d3).unwrap();
            assert!(bad.intertwining_residual > 1e-3);
        }

        // Non-minimal inputs are rejected with advice.
        let mut crippled = d1.clone();
        crippled.minimal = false;
        match uniqueness_intertwiner(&crippled, &d1) {
            Err(Error::NotMinimal(msg)) => assert!(msg.contains("gns_construct")),
            other => panic!("expected a minimality rejection, got {other:?}"),
        }
    }

    #[test]
    fn zero_element_subtraction_stays_positive_definite() {
        // Subtracting the value at the zero letter preserves positive
        // definiteness on the table sample.
        let table = Arc::new(SemigroupTable::pointwise_basis(3));
        let dom = AlgebraDescriptor::semigroup(table.clone(), AbsoluteValue::ones(4)).unwrap();
        let phi = table_function(&dom, scalar_values(&[0.3, 1.0, 1.0, 1.0]), "sum-ish").unwrap();
        let shifted =
            table_function(&dom, scalar_values(&[0.0, 0.7, 0.7, 0.7]), "shifted").unwrap();
        // Point masses sit on the ball boundary; scaling them into the open
        // ball multiplies the Gram by a positive constant, so the verdict
        // is unchanged.
        let tuple: Vec<Element> =
            (0..4).map(|s| delta(&dom, s).unwrap().scale(0.9)).collect();
        let certs = pd_function_check(&phi, std::slice::from_ref(&tuple), PSD_TOL).unwrap();
        assert!(certs.iter().all(|c| c.passed()));
        let certs = pd_function_check(&shifted, &[tuple], PSD_TOL).unwrap();
        assert!(certs.iter().all(|c| c.passed()));
    }

    #[test]
    fn scaling_limit_of_square_character() {
        let phi = crate::positivity::scalar_function("square", |t| t * t);
        let report = dilation_via_scaling(&phi, &[0.9, 0.99, 0.999], 1e-6).unwrap();
        assert_eq!(report.dilation.hilbert_dim, 1);
        assert!((report.iota_norm_sq - 1.0).abs() < 1e-9, "{}", report.iota_norm_sq);
        assert!(report.bound_ok);
        assert!(report.converged);
        assert!(report.dilation.reconstruction_residuals.iter().all(|r| *r < 1e-8));
        assert!(report.dilation.relation_residual < 1e-9);
        assert!(report.dilation.multiplicativity_defect < 1e-8);
    }

    #[test]
    fn scaling_limit_of_affine_function() {
        let phi = crate::positivity::scalar_function("affine", |t| 0.3 + 0.5 * t);
        let report = dilation_via_scaling(&phi, &[0.9, 0.99, 0.999], 1e-6).unwrap();
        assert!(report.iota_norm_sq <= 0.8 + 1e-6, "{}", report.iota_norm_sq);
        assert!((report.iota_norm_sq - 0.8).abs() < 1e-6);
        assert!(report.bound_ok);
        assert!(report.converged);

        // The default geometric grid reaches the same limit.
        let report = dilation_via_scaling(&phi, &scaling_grid(12), 1e-6).unwrap();
        assert!((report.iota_norm_sq - 0.8).abs() < 1e-6, "{}", report.iota_norm_sq);
        assert!(report.bound_ok);
        assert!(report.converged);
    }

    #[test]
    fn scaling_limit_of_zero_function() {
        let phi = crate::positivity::scalar_function("zero", |_| 0.0);
        let report = dilation_via_scaling(&phi, &scaling_grid(6), 1e-6).unwrap();
        assert_eq!(report.dilation.hilbert_dim, 0);
        assert_eq!(report.iota_norm_sq, 0.0);
        assert!(report.bound_ok);
        assert!(report.converged);
    }

    #[test]
    fn scaling_convergence_flag_tracks_resolution() {
        // A steep character looks divergent on a coarse grid and converges
        // once the grid resolves the boundary layer.
        let phi = crate::positivity::scalar_function("steep", |t| t.powi(40));
        let coarse = dilation_via_scaling(&phi, &scaling_grid(3), 1e-9).unwrap();
        assert!(!coarse.converged, "defect {}", coarse.cauchy_defect);
        let fine = dilation_via_scaling(&phi, &scaling_grid(12), 1e-9).unwrap();
        assert!(fine.converged, "defect {}", fine.cauchy_defect);
        assert!(fine.bound_ok);
    }

    #[test]
    fn summation_functional_norm_diverges() {
        assert!((nondilatable_norm(1) - 1.0).abs() < 1e-12);
        assert!((nondilatable_norm(4) - 2.0).abs() < 1e-12);
        assert!((nondilatable_norm(100) - 10.0).abs() < 1e-9);
        let rows = nondilatable_demo(100);
        assert_eq!(rows.last().unwrap().0, 100);
        assert!((rows.last().unwrap().1 - 10.0).abs() < 1e-9);
        for pair in rows.windows(2) {
            assert!(pair[1].1 > pair[0].1, "norms must increase with truncation size");
        }
    }

    #[test]
    fn membership_diagnostic_reports_norm_and_defect() {
        let domain = mult01_domain();
        let phi = table_function(&domain, scalar_values(&[0.5, 1.0]), "half-one").unwrap();
        let v = CVec::from_element(1, C64::new(1.0, 0.0));
        let (norm, defect) = rkhs_membership_diagnostic(&phi, &v).unwrap();
        // Invertible Gram: the target is exactly representable.
        assert!(defect < 1e-10);
        let gram = build_gram(&phi).unwrap();
        let y = CVec::from_vec(vec![C64::new(0.5, 0.0), C64::new(1.0, 0.0)]);
        let direct = gram.clone().try_inverse().unwrap() * &y;
        let expect = (y.adjoint() * direct)[(0, 0)].re.sqrt();
        assert!((norm - expect).abs() < 1e-10);
    }

    #[test]
    fn gram_certificate_carries_verdict() {
        let domain = mult01_domain();
        let phi = table_function(&domain, scalar_values(&[0.5, 1.0]), "half-one").unwrap();
        let d = gns_construct(&phi, 1e-8).unwrap();
        assert!(matches!(d.gram.verdict, Verdict::Pass));
        assert_eq!(d.gram.rank, 2);
    }
}

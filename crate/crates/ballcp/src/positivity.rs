//! Positivity certification: PSD checks with witnesses, positive
//! definiteness of operator functions via block Gram matrices, complete
//! positivity of linear maps via Choi matrices, sampled complete
//! positivity of nonlinear maps via random matrix liftings, the type-W
//! variant with a whole-matrix norm precondition, and fractional Hadamard
//! power checks.
//!
//! Sampling verdicts are falsifiers, not proofs: a PASS records only that
//! no counterexample was found in the given number of seeded trials, while
//! a FAIL carries a replayable counterexample payload.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{AlgebraDescriptor, Element, Field};
use crate::error::{Error, Result};
use crate::linalg::{
    c, cr, haar_unitary, herm_eigen, hermitian_defect, hermitian_part, opnorm, rank_at, CMat,
    CVec, C64, RMat,
};
use crate::rng::fanout;

/// Default relative eigenvalue tolerance for PSD verdicts.
pub const PSD_TOL: f64 = 1e-9;
/// Relative eigenvalue threshold for numerical rank (inclusive).
pub const RANK_REL_THRESHOLD: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Operator functions
// ---------------------------------------------------------------------------

/// A function from the ball of an algebra into complex matrices of a fixed
/// output size. Everything downstream (positive definiteness, sampled
/// complete positivity, dilations, component expansions) consumes this
/// interface.
pub trait OperatorFunction {
    fn domain(&self) -> &Arc<AlgebraDescriptor>;
    fn output_dim(&self) -> usize;
    fn eval(&self, a: &Element) -> Result<CMat>;
    fn label(&self) -> &str;
}

/// Closure-backed operator function.
pub struct ClosureFunction {
    domain: Arc<AlgebraDescriptor>,
    output_dim: usize,
    label: String,
    f: Box<dyn Fn(&Element) -> Result<CMat> + Send + Sync>,
}

impl ClosureFunction {
    pub fn new(
        domain: Arc<AlgebraDescriptor>,
        output_dim: usize,
        label: impl Into<String>,
        f: impl Fn(&Element) -> Result<CMat> + Send + Sync + 'static,
    ) -> Self {
        ClosureFunction { domain, output_dim, label: label.into(), f: Box::new(f) }
    }
}

impl OperatorFunction for ClosureFunction {
    fn domain(&self) -> &Arc<AlgebraDescriptor> {
        &self.domain
    }
    fn output_dim(&self) -> usize {
        self.output_dim
    }
    fn eval(&self, a: &Element) -> Result<CMat> {
        (self.f)(a)
    }
    fn label(&self) -> &str {
        &self.label
    }
}

/// Scalar function on the real interval (−1, 1), presented on M₁(ℝ).
pub fn scalar_function(
    label: impl Into<String>,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> ClosureFunction {
    let domain = AlgebraDescriptor::matrix(1, Field::Real);
    ClosureFunction::new(domain, 1, label, move |a| {
        let t = a.matrix()?[(0, 0)].re;
        Ok(CMat::from_element(1, 1, cr(f(t))))
    })
}

/// Scalar function on the complex unit disc, presented on M₁(ℂ).
pub fn disc_function(
    label: impl Into<String>,
    f: impl Fn(C64) -> C64 + Send + Sync + 'static,
) -> ClosureFunction {
    let domain = AlgebraDescriptor::matrix(1, Field::Complex);
    ClosureFunction::new(domain, 1, label, move |a| {
        let z = a.matrix()?[(0, 0)];
        Ok(CMat::from_element(1, 1, f(z)))
    })
}

/// Extracts the scalar value of an element of M₁(ℝ).
pub fn scalar_of(a: &Element) -> Result<f64> {
    Ok(a.matrix()?[(0, 0)].re)
}

/// Element of M₁(ℝ) holding the scalar t.
pub fn real_scalar(d: &Arc<AlgebraDescriptor>, t: f64) -> Element {
    Element::from_matrix(d, CMat::from_element(1, 1, cr(t))).expect("scalar element")
}

// ---------------------------------------------------------------------------
// PSD certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of a PSD check with enough payload to replay the decision.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GramCertificate {
    pub dim: usize,
    pub min_eig: f64,
    pub rank: usize,
    pub verdict: Verdict,
    /// Unit vector v with ⟨Hv, v⟩ outside the PSD cone when FAIL.
    pub witness: Option<CVec>,
    /// The quadratic form ⟨Hv, v⟩ at the witness; complex when the input
    /// was not Hermitian.
    pub witness_value: Option<C64>,
    pub hermitian_defect: f64,
    pub norm: f64,
    pub tol: f64,
}

impl GramCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// PSD check with relative tolerance; errors when the input is not
/// Hermitian within tolerance. The matrix is symmetrized before the
/// eigensolve so the verdict is deterministic for a fixed input.
pub fn psd_check(h: &CMat, tol: f64) -> Result<GramCertificate> {
    let norm = opnorm(h);
    let defect = hermitian_defect(h);
    if defect > tol * norm.max(1.0) {
        return Err(Error::NotHermitian { defect, tol, norm });
    }
    Ok(psd_certificate(h, tol))
}

/// Like [`psd_check`] but a non-Hermitian input yields a FAIL certificate
/// whose witness exposes a quadratic form with nonzero imaginary part,
/// instead of an error. Positive definiteness checks on arbitrary
/// functions need this: a non-Hermitian Gram is a definiteness failure,
/// not a caller bug.
pub fn psd_certificate(h: &CMat, tol: f64) -> GramCertificate {
    let dim = h.nrows();
    let norm = opnorm(h);
    let defect = hermitian_defect(h);
    let sym = hermitian_part(h);
    let (eigs, vecs) = herm_eigen(&sym);
    let min_eig = eigs.first().copied().unwrap_or(0.0);
    let max_eig = eigs.last().copied().unwrap_or(0.0);
    let rank = rank_at(&eigs, RANK_REL_THRESHOLD * max_eig.abs());
    let hermitian_ok = defect <= tol * norm.max(1.0);
    let spectrum_ok = min_eig >= -tol * norm.max(1.0);
    if hermitian_ok && spectrum_ok {
        return GramCertificate {
            dim,
            min_eig,
            rank,
            verdict: Verdict::Pass,
            witness: None,
            witness_value: None,
            hermitian_defect: defect,
            norm,
            tol,
        };
    }
    let (witness, value) = if !spectrum_ok {
        let v = vecs.column(0).clone_owned();
        let value = (v.adjoint() * h * &v)[(0, 0)];
        (v, value)
    } else {
        // Hermitian defect dominates: an eigenvector of the skew part
        // with extreme eigenvalue gives Im⟨Hv, v⟩ ≠ 0.
        let skew = (h - h.adjoint()) * c(0.0, -0.5);
        let (seigs, svecs) = herm_eigen(&skew);
        let idx = if seigs.first().copied().unwrap_or(0.0).abs()
            >= seigs.last().copied().unwrap_or(0.0).abs()
        {
            0
        } else {
            seigs.len() - 1
        };
        let v = svecs.column(idx).clone_owned();
        let value = (v.adjoint() * h * &v)[(0, 0)];
        (v, value)
    };
    GramCertificate {
        dim,
        min_eig,
        rank,
        verdict: Verdict::Fail,
        witness: Some(witness),
        witness_value: Some(value),
        hermitian_defect: defect,
        norm,
        tol,
    }
}

// ---------------------------------------------------------------------------
// Positive definiteness of operator functions
// ---------------------------------------------------------------------------

/// Block Gram matrix over one tuple: block (j, k) = φ(s_j s_k*).
///
/// Positive definiteness quantified over all tuples is equivalent under
/// either product convention (replace the tuple by its adjoints); this one
/// matches the kernel K(s, t) = φ(st*) used by the dilation module.
pub fn function_gram(phi: &dyn OperatorFunction, tuple: &[Element]) -> Result<CMat> {
    let d = phi.output_dim();
    let n = tuple.len();
    let mut gram = CMat::zeros(n * d, n * d);
    for j in 0..n {
        for k in 0..n {
            let prod = tuple[j].mul(&tuple[k].adjoint())?;
            if prod.seminorm() >= 1.0 {
                return Err(Error::Domain(format!(
                    "product of tuple entries {j} and {k} has seminorm {:.6} outside the open ball",
                    prod.seminorm()
                )));
            }
            let block = phi.eval(&prod)?;
            gram.view_mut((j * d, k * d), (d, d)).copy_from(&block);
        }
    }
    Ok(gram)
}

/// Positive definiteness check on a list of tuples: one certificate per
/// tuple, from the block Gram matrix (φ(s_j s_k*)). A non-Hermitian Gram
/// is reported as FAIL with a complex witness value.
pub fn pd_function_check(
    phi: &dyn OperatorFunction,
    tuples: &[Vec<Element>],
    tol: f64,
) -> Result<Vec<GramCertificate>> {
    tuples
        .iter()
        .map(|tuple| Ok(psd_certificate(&function_gram(phi, tuple)?, tol)))
        .collect()
}

// ---------------------------------------------------------------------------
// Choi matrices of linear maps
// ---------------------------------------------------------------------------

/// A linear map M_d(ℂ) → M_m(ℂ) stored by its action on matrix units,
/// images[i·d + j] = L(E_ij).
pub struct LinearMapData {
    pub d: usize,
    pub m: usize,
    pub images: Vec<CMat>,
}

impl LinearMapData {
    pub fn from_closure(d: usize, m: usize, f: impl Fn(&CMat) -> CMat) -> Self {
        let mut images = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut unit = CMat::zeros(d, d);
                unit[(i, j)] = cr(1.0);
                let img = f(&unit);
                assert_eq!(img.nrows(), m);
                images.push(img);
            }
        }
        LinearMapData { d, m, images }
    }

    /// L(X) = Σ_k w_k A_k X A_k†; completely positive when all w_k ≥ 0.
    pub fn from_kraus(d: usize, m: usize, weights: &[f64], ops: &[CMat]) -> Self {
        assert_eq!(weights.len(), ops.len());
        LinearMapData::from_closure(d, m, |x| {
            let mut acc = CMat::zeros(m, m);
            for (w, a) in weights.iter().zip(ops.iter()) {
                acc += a * x * a.adjoint() * cr(*w);
            }
            acc
        })
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let mut acc = CMat::zeros(self.m, self.m);
        for i in 0..self.d {
            for j in 0..self.d {
                let z = x[(i, j)];
                if z != cr(0.0) {
                    acc += &self.images[i * self.d + j] * z;
                }
            }
        }
        acc
    }
}

/// Choi matrix C = Σ_ij E_ij ⊗ L(E_ij), of size d·m; L is completely
/// positive iff C is PSD.
pub fn choi(l: &LinearMapData) -> CMat {
    let (d, m) = (l.d, l.m);
    let mut out = CMat::zeros(d * m, d * m);
    for i in 0..d {
        for j in 0..d {
            out.view_mut((i * m, j * m), (m, m)).copy_from(&l.images[i * d + j]);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sampled complete positivity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpMode {
    LinearChoi,
    Sampled,
    TypeW,
}

/// Counterexample payload: the lifting B, the lifted PSD matrix A = B*B
/// (rescaled), the failed Gram, and its certificate.
pub struct CpCounterexample {
    pub lifting: Vec<Vec<Element>>,
    pub lifted: Vec<Vec<Element>>,
    pub gram: CMat,
    pub certificate: GramCertificate,
    pub trial: u64,
}

pub struct CpVerdict {
    pub mode: CpMode,
    pub trials: u64,
    pub pass: bool,
    pub counterexample: Option<CpCounterexample>,
}

impl CpVerdict {
    /// Re-verifies a stored counterexample from scratch: the lifted matrix
    /// must equal B*B, satisfy its positivity precondition, and fail PSD
    /// after φ is applied entrywise.
    pub fn reverify(&self, phi: &dyn OperatorFunction, tol: f64) -> Result<bool> {
        let Some(cx) = &self.counterexample else {
            return Ok(true);
        };
        let recomputed = block_star_mul(&cx.lifting)?;
        let n = cx.lifted.len();
        for j in 0..n {
            for k in 0..n {
                if recomputed[j][k].distance(&cx.lifted[j][k])? > 1e-9 {
                    return Ok(false);
                }
            }
        }
        match self.mode {
            CpMode::TypeW => {
                if block_realized_norm(&cx.lifted)? >= 1.0 {
                    return Ok(false);
                }
            }
            _ => {
                for row in &cx.lifted {
                    for entry in row {
                        if entry.seminorm() >= 1.0 {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        let gram = block_apply(phi, &cx.lifted)?;
        Ok(!psd_certificate(&gram, tol).passed())
    }
}

/// A[j][k] = Σ_i B[i][j]* B[i][k]; the canonical PSD lifting shape.
pub fn block_star_mul(b: &[Vec<Element>]) -> Result<Vec<Vec<Element>>> {
    let m = b.len();
    let n = b[0].len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = b[0][j].adjoint().mul(&b[0][k])?;
            for i in 1..m {
                acc = acc.add(&b[i][j].adjoint().mul(&b[i][k])?)?;
            }
            row.push(acc);
        }
        out.push(row);
    }
    Ok(out)
}

/// Applies φ entrywise to a block matrix of elements, assembling the
/// block Gram matrix.
pub fn block_apply(phi: &dyn OperatorFunction, a: &[Vec<Element>]) -> Result<CMat> {
    let n = a.len();
    let d = phi.output_dim();
    let mut gram = CMat::zeros(n * d, n * d);
    for j in 0..n {
        for k in 0..n {
            let block = phi.eval(&a[j][k])?;
            gram.view_mut((j * d, k * d), (d, d)).copy_from(&block);
        }
    }
    Ok(gram)
}

fn block_max_entry_seminorm(a: &[Vec<Element>]) -> f64 {
    a.iter().flatten().map(Element::seminorm).fold(0.0, f64::max)
}

fn block_scale(a: &[Vec<Element>], s: f64) -> Vec<Vec<Element>> {
    a.iter().map(|row| row.iter().map(|e| e.scale(s)).collect()).collect()
}

/// Operator norm of the realized block matrix; matrix-realized domains.
pub fn block_realized_norm(a: &[Vec<Element>]) -> Result<f64> {
    let n = a.len();
    let d = a[0][0].descriptor.realization_dim;
    if !a[0][0].descriptor.matrix_realized() {
        return Err(Error::Unsupported(format!(
            "whole-matrix norm needs a matrix-realized domain; got {}",
            a[0][0].descriptor.name()
        )));
    }
    let mut big = CMat::zeros(n * d, n * d);
    for j in 0..n {
        for k in 0..n {
            big.view_mut((j * d, k * d), (d, d)).copy_from(a[j][k].matrix()?);
        }
    }
    Ok(opnorm(&big))
}

/// Draws one lifting B and the scaled lifted matrix A for a given trial.
/// Three strategies rotate: rank-1 outer products of ball elements (with
/// structured matrix-unit draws on early trials, which reproduce the Choi
/// matrix for linear maps), full Wishart draws, and low-rank
/// diagonal-perturbed draws pushed toward the entrywise ball boundary.
fn draw_lifting<R: Rng>(
    domain: &Arc<AlgebraDescriptor>,
    n: usize,
    trial: u64,
    rng: &mut R,
    whole_matrix_norm: bool,
) -> Result<(Vec<Vec<Element>>, Vec<Vec<Element>>)> {
    let strategy = (trial % 3) as usize;
    let size = match strategy {
        1 => 1 + ((trial / 3) as usize) % n,
        _ => n,
    };
    let b: Vec<Vec<Element>> = match strategy {
        0 => {
            // rank-1: a single row of ball elements
            let row: Vec<Element> = if trial == 0 && unit_row(domain, size).is_some() {
                unit_row(domain, size).unwrap()
            } else if trial % 2 == 1 && unit_row(domain, size).is_some() {
                let units = unit_row(domain, size).unwrap();
                let dim = domain.realization_dim;
                let real_field =
                    matches!(&domain.kind, crate::algebra::Kind::Matrix { field: Field::Real, .. });
                let (u, v) = if real_field {
                    (crate::linalg::haar_orthogonal(rng, dim), crate::linalg::haar_orthogonal(rng, dim))
                } else {
                    (haar_unitary(rng, dim), haar_unitary(rng, dim))
                };
                units
                    .iter()
                    .map(|e| {
                        Element::from_matrix(domain, &u * e.matrix().unwrap() * &v)
                            .expect("rotated unit")
                    })
                    .collect()
            } else {
                (0..size).map(|_| Element::random_in_ball(domain, rng, 0.9)).collect()
            };
            vec![row]
        }
        1 => {
            // full Wishart: as many rows as columns
            (0..size)
                .map(|_| (0..size).map(|_| Element::random(domain, rng)).collect())
                .collect()
        }
        _ => {
            // low-rank near-boundary with a diagonal perturbation
            let mut rows: Vec<Vec<Element>> = (0..2)
                .map(|_| (0..size).map(|_| Element::random(domain, rng)).collect())
                .collect();
            let delta = 0.05f64.sqrt();
            for j in 0..size {
                let mut row = vec![Element::zero(domain); size];
                row[j] = Element::random_in_ball(domain, rng, delta);
                rows.push(row);
            }
            rows
        }
    };
    let a = block_star_mul(&b)?;
    let current = if whole_matrix_norm {
        block_realized_norm(&a)?
    } else {
        block_max_entry_seminorm(&a)
    };
    let target = if strategy == 2 { 0.98 } else { 0.9 };
    let s = if current > 1e-12 { target / current } else { 1.0 };
    let a = block_scale(&a, s);
    let b = block_scale(&b, s.sqrt());
    Ok((b, a))
}

/// Scaled matrix units b_j = E_{1j} when the domain is a plain matrix
/// algebra of size ≥ the row length; their outer products b_j* b_k = E_jk
/// make the Gram of a linear map equal its (scaled) Choi matrix.
fn unit_row(domain: &Arc<AlgebraDescriptor>, size: usize) -> Option<Vec<Element>> {
    match &domain.kind {
        crate::algebra::Kind::Matrix { n, field } if *n >= size && *field != Field::Quaternion => {
            let dim = domain.realization_dim;
            let row = (0..size)
                .map(|j| {
                    let mut m = CMat::zeros(dim, dim);
                    m[(0, j)] = cr(0.9);
                    Element::from_matrix(domain, m).expect("matrix unit")
                })
                .collect();
            Some(row)
        }
        _ => None,
    }
}

/// Sampled complete positivity falsifier (entrywise ball precondition):
/// draws liftings A = B*B with every entry inside the ball, applies φ
/// entrywise, and reports the first PSD failure as a counterexample.
pub fn cp_sampled_check(
    phi: &dyn OperatorFunction,
    n: usize,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<CpVerdict> {
    run_lifting_check(phi, n, trials, seed, tol, CpMode::Sampled)
}

/// Type-W variant: the lifted matrix satisfies ‖A‖ < 1 as a whole matrix
/// instead of entrywise ball membership. Matrix-realized domains only.
pub fn typew_check(
    phi: &dyn OperatorFunction,
    n: usize,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<CpVerdict> {
    if !phi.domain().matrix_realized() {
        return Err(Error::Unsupported(format!(
            "type-W checking needs a matrix-realized domain; got {}",
            phi.domain().name()
        )));
    }
    run_lifting_check(phi, n, trials, seed, tol, CpMode::TypeW)
}

fn run_lifting_check(
    phi: &dyn OperatorFunction,
    n: usize,
    trials: u64,
    seed: u64,
    tol: f64,
    mode: CpMode,
) -> Result<CpVerdict> {
    let domain = phi.domain().clone();
    let tag = match mode {
        CpMode::TypeW => "typew",
        _ => "cp-sampled",
    };
    for trial in 0..trials {
        let mut rng = fanout(seed, tag, trial);
        let (b, a) = draw_lifting(&domain, n, trial, &mut rng, mode == CpMode::TypeW)?;
        let gram = block_apply(phi, &a)?;
        let cert = psd_certificate(&gram, tol);
        if !cert.passed() {
            return Ok(CpVerdict {
                mode,
                trials: trial + 1,
                pass: false,
                counterexample: Some(CpCounterexample {
                    lifting: b,
                    lifted: a,
                    gram,
                    certificate: cert,
                    trial,
                }),
            });
        }
    }
    Ok(CpVerdict { mode, trials, pass: true, counterexample: None })
}

// ---------------------------------------------------------------------------
// Off-diagonal bound and the disc counterexample
// ---------------------------------------------------------------------------

/// For 0 ⪯ A ⪯ 1 and orthonormal u, v: |⟨Au, v⟩| ≤ 1/2. Returns the value
/// and whether the bound holds; a violation indicates a broken
/// precondition, which is checked first and reported as an error.
pub fn offdiag_bound_check(a: &CMat, u: &CVec, v: &CVec, tol: f64) -> Result<(f64, bool)> {
    let lower = psd_check(a, tol)?;
    if !lower.passed() {
        return Err(Error::Domain(format!(
            "matrix is not PSD (min eigenvalue {:.3e})",
            lower.min_eig
        )));
    }
    let upper = psd_check(&(CMat::identity(a.nrows(), a.ncols()) - a), tol)?;
    if !upper.passed() {
        return Err(Error::Domain(format!(
            "matrix exceeds the identity (margin {:.3e})",
            upper.min_eig
        )));
    }
    let nu = u.norm();
    let nv = v.norm();
    if (nu - 1.0).abs() > tol || (nv - 1.0).abs() > tol {
        return Err(Error::Domain(format!("vectors are not unit length: {nu:.6}, {nv:.6}")));
    }
    let inner = (u.adjoint() * v)[(0, 0)].norm();
    if inner > tol.max(1e-12) {
        return Err(Error::Domain(format!("vectors are not orthogonal: |⟨u,v⟩| = {inner:.3e}")));
    }
    let value = (v.adjoint() * a * u)[(0, 0)].norm();
    Ok((value, value <= 0.5 + tol))
}

/// The disc function φ(z) = z when |z| ≤ 1/2 or z ∈ [0, 1), and z + i/4
/// otherwise: completely positive in the type-W sense but not positive
/// definite. Returns φ and the witness pair (0.9e^{iπ/4}, 0.9e^{−iπ/4})
/// whose Gram is non-Hermitian.
pub fn build_counterexample_phi() -> (ClosureFunction, [Element; 2]) {
    let phi = disc_function("example-7.4", |z| {
        if z.norm() <= 0.5 || (z.im == 0.0 && z.re >= 0.0 && z.re < 1.0) {
            z
        } else {
            z + c(0.0, 0.25)
        }
    });
    let domain = phi.domain().clone();
    let angle = std::f64::consts::FRAC_PI_4;
    let a1 = Element::from_matrix(
        &domain,
        CMat::from_element(1, 1, c(0.9 * angle.cos(), 0.9 * angle.sin())),
    )
    .expect("witness");
    let a2 = Element::from_matrix(
        &domain,
        CMat::from_element(1, 1, c(0.9 * angle.cos(), -0.9 * angle.sin())),
    )
    .expect("witness");
    (phi, [a1, a2])
}

// ---------------------------------------------------------------------------
// Hadamard powers
// ---------------------------------------------------------------------------

/// Entrywise power A∘α = (a_ij^α) followed by a PSD check; the input must
/// be PSD with strictly positive entries.
pub fn hadamard_power_check(a: &RMat, alpha: f64, tol: f64) -> Result<GramCertificate> {
    if let Some(bad) = a.iter().find(|v| **v <= 0.0) {
        return Err(Error::Domain(format!(
            "entrywise power needs positive entries; found {bad:.6e}"
        )));
    }
    let complex: CMat = a.map(cr);
    let base = psd_check(&complex, tol)?;
    if !base.passed() {
        return Err(Error::Domain(format!(
            "input must be PSD; min eigenvalue {:.3e}",
            base.min_eig
        )));
    }
    let powered: CMat = a.map(|v| cr(v.powf(alpha)));
    psd_check(&powered, tol)
}

/// Seeded search for a PSD matrix with positive entries whose entrywise
/// α-power is not PSD. Half the trials draw Wishart matrices (rejecting
/// nonpositive entries), half use the rank-one family 1 + ε·b_i b_j whose
/// fractional powers violate PSD below the critical exponent n − 2.
pub fn hadamard_violation_search(
    n: usize,
    alpha: f64,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<Option<(RMat, GramCertificate)>> {
    for trial in 0..trials {
        let mut rng = fanout(seed, "hadamard", trial);
        let candidate = if trial % 2 == 0 {
            // 1 + ε b_i b_j: PSD (all-ones plus a rank-one PSD term),
            // entries positive for small ε
            let b: Vec<f64> = (0..n).map(|_| crate::linalg::randn(&mut rng)).collect();
            let bmax = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-9);
            let eps = (0.2 + 0.7 * rng.gen::<f64>()) / (bmax * bmax);
            RMat::from_fn(n, n, |i, j| 1.0 + eps * b[i] * b[j])
        } else {
            let g = crate::linalg::randn_mat(&mut rng, n, n + 1);
            let w = &g * g.transpose();
            if w.iter().any(|v| *v <= 1e-9) {
                continue;
            }
            w
        };
        if candidate.iter().any(|v| *v <= 0.0) {
            continue;
        }
        let cert = hadamard_power_check(&candidate, alpha, tol)?;
        if !cert.passed() {
            return Ok(Some((candidate, cert)));
        }
    }
    Ok(None)
}

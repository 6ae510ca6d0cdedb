//! Factoring analytic operator functions through the expanded envelope.
//!
//! A bounded analytic function on the ball decomposes into homogeneous
//! components, and each degree-n component of a completely positive
//! function extends to a complex-linear map on the n-th symmetric power
//! of the enveloping realization. This module solves for those linear
//! extensions from sampled values, certifies them through Choi matrices,
//! reassembles the original function along the universal embedding
//! Γ(a) = (1, η(a), η(a)^{⊗2}, …), and checks the two structural
//! consequences: multiplicative functions lift to representations of the
//! truncated exponential algebra, and maps defined on a symmetric power
//! are already determined by their values on embedded powers η(a)^{⊗n}.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{symmetrize_matrix, AlgebraDescriptor, Element, Kind};
use crate::envelope::{envelope, gamma, EnvelopingMap, ExpElement, SymBasis};
use crate::error::{Error, Result};
use crate::expand::extract_components;
use crate::linalg::{
    ceye, col_rank, kron_power, opnorm, pinv, real_pinv, real_rank, unvec, vec_of, CMat, RMat,
};
use crate::positivity::{choi, psd_certificate, GramCertificate, LinearMapData, OperatorFunction};
use crate::rng::fanout;

/// Relative singular-value cutoff deciding whether sample coordinates
/// span the symmetric power.
const SPAN_RANK_CUTOFF: f64 = 1e-10;

/// Pseudo-inverse cutoff for the lifting solves.
const SOLVE_CUTOFF: f64 = 1e-12;

/// Eigenvalue tolerance for Choi positivity certificates.
const CHOI_PSD_TOL: f64 = 1e-8;

/// Cutoff for null-space extraction when computing commutants.
const COMMUTANT_CUTOFF: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Lifted components
// ---------------------------------------------------------------------------

/// One homogeneous component lifted to a linear map on a symmetric power
/// of the enveloping realization.
#[derive(Clone, Serialize)]
pub struct LiftedComponent {
    pub degree: usize,
    /// Side length of the output matrices.
    pub output_dim: usize,
    /// Basis of the symmetric power the map is defined on.
    #[serde(skip)]
    pub basis: Arc<SymBasis>,
    /// Matrix of the map: column k is the vectorized image of the k-th
    /// basis element.
    pub map: CMat,
    /// Largest relative residual of the solve over the training set.
    pub solve_residual: f64,
    /// Largest relative residual over held-out samples.
    pub holdout_residual: f64,
    /// Positivity certificate for the Choi matrix of the lifted map
    /// composed with the orthogonal projection onto the symmetric power.
    pub choi: GramCertificate,
}

impl LiftedComponent {
    /// Apply the lifted map to a matrix on the realized product space.
    /// The input is projected onto the symmetric power first, so ordinary
    /// Kronecker powers are accepted directly.
    pub fn apply_realized(&self, x: &CMat) -> Result<CMat> {
        let r = self.basis.realization_dim();
        if x.nrows() != r || x.ncols() != r {
            return Err(Error::Domain(format!(
                "degree {} component expects a {r} x {r} input, got {} x {}",
                self.degree,
                x.nrows(),
                x.ncols()
            )));
        }
        let coords = self.basis.coords(x);
        Ok(unvec(&(&self.map * coords), self.output_dim, self.output_dim))
    }

    /// Operator norm of the coefficient matrix, a coarse size measure.
    pub fn map_norm(&self) -> f64 {
        opnorm(&self.map)
    }
}

/// Deterministic ball samples for training, holdout, and verification
/// sets; sample i depends only on (seed, tag, i).
pub fn spanning_samples(
    domain: &Arc<AlgebraDescriptor>,
    count: usize,
    radius: f64,
    seed: u64,
    tag: &str,
) -> Vec<Element> {
    (0..count)
        .map(|i| {
            let mut rng = fanout(seed, tag, i as u64);
            Element::random_in_ball(domain, &mut rng, radius)
        })
        .collect()
}

fn prediction_residual(
    map: &CMat,
    basis: &SymBasis,
    env: &EnvelopingMap,
    degree: usize,
    phi_n: &dyn OperatorFunction,
    samples: &[Element],
    d: usize,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for a in samples {
        let power = kron_power(&env.image(a)?, degree);
        let predicted = unvec(&(map * basis.coords(&power)), d, d);
        let actual = phi_n.eval(a)?;
        worst = worst.max(opnorm(&(predicted - &actual)) / (1.0 + opnorm(&actual)));
    }
    Ok(worst)
}

/// Lift one homogeneous component to a linear map on the corresponding
/// symmetric power of the enveloping realization.
///
/// Solves Φₙ(η(a)^{⊗n}) = φₙ(a) in the least-squares sense over the
/// training set. The embedded powers span the whole symmetric power for
/// generic samples, and the solve demands that numerically: a deficient
/// training span is an error reporting the achieved dimension. The map
/// is then validated on held-out samples and certified through the Choi
/// matrix of its composition with the symmetric projection.
pub fn lift_component(
    phi_n: &dyn OperatorFunction,
    env: &EnvelopingMap,
    degree: usize,
    training: &[Element],
    holdout: &[Element],
) -> Result<LiftedComponent> {
    let basis = Arc::new(SymBasis::blocks(env.target_blocks(), degree));
    let dim = basis.dim();
    let d = phi_n.output_dim();
    if training.is_empty() {
        return Err(Error::RankDeficient { achieved: 0, needed: dim });
    }
    let mut cmat = CMat::zeros(dim, training.len());
    let mut ymat = CMat::zeros(d * d, training.len());
    for (k, a) in training.iter().enumerate() {
        let power = kron_power(&env.image(a)?, degree);
        cmat.set_column(k, &basis.coords(&power));
        let value = phi_n.eval(a)?;
        if value.nrows() != d || value.ncols() != d {
            return Err(Error::Domain(format!(
                "component values must be {d} x {d}, got {} x {}",
                value.nrows(),
                value.ncols()
            )));
        }
        ymat.set_column(k, &vec_of(&value));
    }
    let achieved = col_rank(&cmat, SPAN_RANK_CUTOFF);
    if achieved < dim {
        return Err(Error::RankDeficient { achieved, needed: dim });
    }
    let map = &ymat * pinv(&cmat, SOLVE_CUTOFF);
    let solve_residual = prediction_residual(&map, &basis, env, degree, phi_n, training, d)?;
    let holdout_residual = prediction_residual(&map, &basis, env, degree, phi_n, holdout, d)?;

    let realized = basis.realization_dim();
    let basis_for_choi = basis.clone();
    let map_for_choi = map.clone();
    let as_linear_map = LinearMapData::from_closure(realized, d, move |x| {
        unvec(&(&map_for_choi * basis_for_choi.coords(x)), d, d)
    });
    let choi_cert = psd_certificate(&choi(&as_linear_map), CHOI_PSD_TOL);

    Ok(LiftedComponent {
        degree,
        output_dim: d,
        basis,
        map,
        solve_residual,
        holdout_residual,
        choi: choi_cert,
    })
}

// ---------------------------------------------------------------------------
// Assembled factorizations
// ---------------------------------------------------------------------------

/// A factored function: a family of lifted components whose degreewise
/// sum reproduces the original function along the universal embedding.
#[derive(Clone, Serialize)]
pub struct Factorization {
    pub degree_cap: usize,
    /// Components sorted by degree.
    pub components: Vec<LiftedComponent>,
    /// Largest relative mismatch between the reassembled function and
    /// the original over fresh verification samples.
    pub verification_residual: f64,
}

impl Factorization {
    pub fn output_dim(&self) -> usize {
        self.components[0].output_dim
    }

    /// Evaluate the factored map degreewise on a truncated exponential
    /// element.
    pub fn apply(&self, x: &ExpElement) -> Result<CMat> {
        let d = self.output_dim();
        let mut acc = CMat::zeros(d, d);
        for comp in &self.components {
            let block = x.components.get(comp.degree).ok_or_else(|| {
                Error::Domain(format!(
                    "exponential element truncated below degree {}",
                    comp.degree
                ))
            })?;
            acc += comp.apply_realized(block)?;
        }
        Ok(acc)
    }
}

/// Assemble lifted components into a factorization and verify it against
/// the original function on fresh samples.
pub fn assemble(
    components: Vec<LiftedComponent>,
    env: &EnvelopingMap,
    phi: &dyn OperatorFunction,
    fresh: &[Element],
) -> Result<Factorization> {
    if components.is_empty() {
        return Err(Error::Domain("a factorization needs at least one component".into()));
    }
    let mut components = components;
    components.sort_by_key(|c| c.degree);
    let d = components[0].output_dim;
    for pair in components.windows(2) {
        if pair[0].degree == pair[1].degree {
            return Err(Error::Domain(format!("duplicate component of degree {}", pair[0].degree)));
        }
    }
    if components.iter().any(|c| c.output_dim != d) {
        return Err(Error::Domain("components must share one output dimension".into()));
    }
    let degree_cap = components.last().unwrap().degree;
    let mut fact = Factorization { degree_cap, components, verification_residual: 0.0 };
    let mut worst = 0.0_f64;
    for a in fresh {
        let embedded = gamma(env, a, degree_cap)?;
        let predicted = fact.apply(&embedded)?;
        let actual = phi.eval(a)?;
        worst = worst.max(opnorm(&(predicted - &actual)) / (1.0 + opnorm(&actual)));
    }
    fact.verification_residual = worst;
    Ok(fact)
}

// ---------------------------------------------------------------------------
// Representation correspondence
// ---------------------------------------------------------------------------

/// Diagnostics for lifting a multiplicative function on the ball to a
/// representation of the truncated exponential algebra.
#[derive(Clone, Serialize)]
pub struct CorrespondenceReport {
    pub factorization: Factorization,
    /// Worst relative multiplicativity or adjoint defect of the input on
    /// sampled pairs.
    pub hom_defect: f64,
    /// Worst relative defect of Φ(xy) = Φ(x)Φ(y) over products of
    /// embedded elements.
    pub multiplicativity_residual: f64,
    /// Dimension of the commutant of the sampled image.
    pub commutant_dim: usize,
    /// Worst commutator norm between commutant operators and reassembled
    /// values on embedded elements.
    pub commutant_residual: f64,
    /// Worst commutator norm on symmetrized split tensors, which lie
    /// outside the embedded image.
    pub split_residual: f64,
}

/// Orthonormal basis of the joint commutant of the given matrices, from
/// the null space of stacked commutator operators.
fn commutant_basis(images: &[CMat], k: usize) -> Vec<CMat> {
    if images.is_empty() || k == 0 {
        return Vec::new();
    }
    let mut stacked = CMat::zeros(images.len() * k * k, k * k);
    for (s, p) in images.iter().enumerate() {
        // vec(TP - PT) = (Pᵀ ⊗ I - I ⊗ P) vec(T) in column-major layout
        let op = p.transpose().kronecker(&ceye(k)) - ceye(k).kronecker(p);
        stacked.view_mut((s * k * k, 0), (k * k, k * k)).copy_from(&op);
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("svd computed with right singular vectors");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let mut basis = Vec::new();
    for i in 0..sv.len() {
        if smax <= f64::MIN_POSITIVE || sv[i] <= COMMUTANT_CUTOFF * smax {
            let row = v_t.row(i).transpose().map(|z| z.conj());
            basis.push(unvec(&row, k, k));
        }
    }
    basis
}

/// Element of the truncated exponential algebra whose degree-n component
/// is the symmetrized alternating product of two envelope images. These
/// lie outside the set of embedded powers for n at least 2.
fn split_element(ea: &CMat, eb: &CMat, cap: usize) -> ExpElement {
    let m = ea.nrows();
    let mut components = Vec::with_capacity(cap + 1);
    components.push(CMat::zeros(1, 1));
    for n in 1..=cap {
        let mut term = CMat::identity(1, 1);
        for j in 0..n {
            term = term.kronecker(if j % 2 == 0 { ea } else { eb });
        }
        components.push(symmetrize_matrix(&term, m, n));
    }
    ExpElement { cap, components, base_dim: m }
}

/// Lift a multiplicative adjoint-preserving function on the ball to a
/// representation of the truncated exponential algebra.
///
/// Verifies the input really is a homomorphism on sampled pairs, runs
/// the extraction and lifting pipeline, and then checks the two defining
/// properties of the correspondence: the assembled map is multiplicative
/// on products of embedded elements, and every operator commuting with
/// the sampled image also commutes with assembled values, both on
/// embedded elements and on symmetrized split tensors outside them.
pub fn representation_correspondence(
    pi: Arc<dyn OperatorFunction + Send + Sync>,
    degree_cap: usize,
    seed: u64,
    tol: f64,
) -> Result<CorrespondenceReport> {
    let domain = pi.domain().clone();
    let d = pi.output_dim();

    let mut hom_defect = 0.0_f64;
    let mut pairs = Vec::new();
    for trial in 0..6u64 {
        let mut rng = fanout(seed, "correspondence-pairs", trial);
        let a = Element::random_in_ball(&domain, &mut rng, 0.7);
        let b = Element::random_in_ball(&domain, &mut rng, 0.7);
        let pa = pi.eval(&a)?;
        let pb = pi.eval(&b)?;
        let pab = pi.eval(&a.mul(&b)?)?;
        let pstar = pi.eval(&a.adjoint())?;
        let prod_scale = 1.0 + opnorm(&pa) * opnorm(&pb);
        hom_defect = hom_defect.max(opnorm(&(pab - &pa * &pb)) / prod_scale);
        hom_defect = hom_defect.max(opnorm(&(pstar - pa.adjoint())) / (1.0 + opnorm(&pa)));
        pairs.push((a, b));
    }
    if hom_defect > tol {
        return Err(Error::NotARepresentation(format!(
            "multiplicativity or adjoint defect {hom_defect:.3e} exceeds {tol:.3e} on sampled pairs"
        )));
    }

    let extraction_samples = spanning_samples(&domain, 12, 0.7, seed, "correspondence-extract");
    let expansion = extract_components(pi.clone(), &extraction_samples, degree_cap, None, 1e-7)?;

    let env = envelope(&domain)?;
    let top_dim = SymBasis::blocks(env.target_blocks(), degree_cap).dim();
    let training =
        spanning_samples(&domain, 2 * top_dim + 8, 0.75, seed, "correspondence-train");
    let holdout = spanning_samples(&domain, 8, 0.6, seed, "correspondence-holdout");
    let mut lifted = Vec::with_capacity(degree_cap + 1);
    for n in 0..=degree_cap {
        let component = expansion.component(n);
        lifted.push(lift_component(&component, &env, n, &training, &holdout)?);
    }

    let fresh = spanning_samples(&domain, 8, 0.65, seed, "correspondence-fresh");
    let factorization = assemble(lifted, &env, pi.as_ref(), &fresh)?;

    let mut multiplicativity_residual = 0.0_f64;
    for (a, b) in &pairs {
        let ga = gamma(&env, a, degree_cap)?;
        let gb = gamma(&env, b, degree_cap)?;
        let product = ga.mul_componentwise(&gb)?;
        let lhs = factorization.apply(&product)?;
        let va = factorization.apply(&ga)?;
        let vb = factorization.apply(&gb)?;
        let scale = 1.0 + opnorm(&va) * opnorm(&vb);
        multiplicativity_residual =
            multiplicativity_residual.max(opnorm(&(lhs - va * vb)) / scale);
    }

    let mut images = Vec::with_capacity(extraction_samples.len());
    for a in &extraction_samples {
        images.push(pi.eval(a)?);
    }
    let commutant = commutant_basis(&images, d);
    let mut commutant_residual = 0.0_f64;
    let mut split_residual = 0.0_f64;
    for t in &commutant {
        for a in &fresh {
            let value = factorization.apply(&gamma(&env, a, degree_cap)?)?;
            let defect = opnorm(&(t * &value - &value * t)) / (1.0 + opnorm(&value));
            commutant_residual = commutant_residual.max(defect);
        }
        for (a, b) in &pairs {
            let split = split_element(&env.image(a)?, &env.image(b)?, degree_cap);
            let value = factorization.apply(&split)?;
            let defect = opnorm(&(t * &value - &value * t)) / (1.0 + opnorm(&value));
            split_residual = split_residual.max(defect);
        }
    }

    Ok(CorrespondenceReport {
        factorization,
        hom_defect,
        multiplicativity_residual,
        commutant_dim: commutant.len(),
        commutant_residual,
        split_residual,
    })
}

// ---------------------------------------------------------------------------
// Universality of symmetric powers
// ---------------------------------------------------------------------------

/// Result of recovering a map on a symmetric power from its values on
/// embedded powers.
#[derive(Clone, Serialize)]
pub struct UniversalityReport {
    /// Real dimension of the coordinate space the solve runs over.
    pub coordinate_dim: usize,
    /// Real rank achieved by the training coordinates.
    pub achieved_rank: usize,
    /// Real rank of training and holdout coordinates together.
    pub reachable_rank: usize,
    /// Worst relative mismatch on held-out samples.
    pub residual: f64,
}

/// Check that a bounded real-linear map on a symmetric power of the
/// source is determined by its values on embedded powers η(a)^{⊗n}.
///
/// The solve is real-linear in the symmetric coordinates, so maps that
/// are not complex-linear, such as entrywise conjugation, are in scope.
/// Training columns must reach every direction the holdout columns
/// touch; otherwise the deficiency is reported as an error.
pub fn sn_universality_check(
    rho: &dyn OperatorFunction,
    env: &EnvelopingMap,
    degree: usize,
    training: &[Element],
    holdout: &[Element],
) -> Result<UniversalityReport> {
    let Kind::SymmetricPower { inner, degree: rho_degree } = &rho.domain().kind else {
        return Err(Error::Domain(
            "universality check expects a function on a symmetric power".into(),
        ));
    };
    if *rho_degree != degree {
        return Err(Error::Domain(format!(
            "function lives on a degree {rho_degree} symmetric power, check asked for degree {degree}"
        )));
    }
    if inner.name() != env.source.name() {
        return Err(Error::DescriptorMismatch(format!(
            "symmetric power of {} checked against the envelope of {}",
            inner.name(),
            env.source.name()
        )));
    }
    if training.is_empty() || holdout.is_empty() {
        return Err(Error::Domain("universality check needs training and holdout samples".into()));
    }

    let basis = SymBasis::blocks(env.target_blocks(), degree);
    let dim = basis.dim();
    let k = rho.output_dim();
    let build = |elems: &[Element]| -> Result<(RMat, RMat)> {
        let mut coords = RMat::zeros(2 * dim, elems.len());
        let mut values = RMat::zeros(2 * k * k, elems.len());
        for (col, a) in elems.iter().enumerate() {
            let c = basis.coords(&kron_power(&env.image(a)?, degree));
            for i in 0..dim {
                coords[(i, col)] = c[i].re;
                coords[(dim + i, col)] = c[i].im;
            }
            let argument =
                Element::from_matrix(rho.domain(), kron_power(a.matrix()?, degree))?;
            let v = vec_of(&rho.eval(&argument)?);
            for i in 0..k * k {
                values[(i, col)] = v[i].re;
                values[(k * k + i, col)] = v[i].im;
            }
        }
        Ok((coords, values))
    };

    let (ctrain, ytrain) = build(training)?;
    let (chold, yhold) = build(holdout)?;
    let achieved = real_rank(&ctrain, SPAN_RANK_CUTOFF);
    let mut joint = RMat::zeros(2 * dim, training.len() + holdout.len());
    joint.view_mut((0, 0), (2 * dim, training.len())).copy_from(&ctrain);
    joint.view_mut((0, training.len()), (2 * dim, holdout.len())).copy_from(&chold);
    let reachable = real_rank(&joint, SPAN_RANK_CUTOFF);
    if achieved < reachable {
        return Err(Error::RankDeficient { achieved, needed: reachable });
    }

    let map = &ytrain * real_pinv(&ctrain, SOLVE_CUTOFF);
    let mut residual = 0.0_f64;
    for col in 0..holdout.len() {
        let predicted = &map * chold.column(col);
        let actual = yhold.column(col);
        residual = residual.max((predicted - actual).norm() / (1.0 + actual.norm()));
    }

    Ok(UniversalityReport { coordinate_dim: 2 * dim, achieved_rank: achieved, reachable_rank: reachable, residual })
}

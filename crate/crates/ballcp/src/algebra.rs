//! Real seminormed involutive algebras and their elements.
//!
//! An [`AlgebraDescriptor`] is a recipe for a concrete algebra: matrix
//! algebras over ℝ, ℂ, or ℍ (quaternions stored through the 2×2 complex
//! block embedding), weighted semigroup algebras ℝ[S] on finite tables,
//! unitizations, complexifications, tensor products, symmetric powers, and
//! block-diagonal C*-realizations used as envelope targets.
//!
//! Elements are immutable coefficient containers tied to one descriptor:
//! a complex matrix for matrix-realized kinds, a real weight vector for
//! semigroup kinds, and nested pairs for unitization (inner, λ) and
//! complexification (x, y) ≙ x + iy. All operations are pure.
//!
//! Seminorm rules: operator norm of the realization for matrix-realized
//! kinds, the weighted ℓ¹ norm Σ|c_s|α(s) for ℝ[S], p(a) + |λ| for
//! unitizations, and p(x) + p(y) for complexifications.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, ceye, cr, opnorm, randn, CMat,
};
use crate::semigroup::{AbsoluteValue, SemigroupTable};

/// Scalar field of a matrix algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
    Quaternion,
}

/// Descriptor kind; see module docs for the element representation of each.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Matrix { n: usize, field: Field },
    Semigroup { table: Arc<SemigroupTable>, alpha: AbsoluteValue },
    Unitization { inner: Arc<AlgebraDescriptor> },
    Complexification { inner: Arc<AlgebraDescriptor> },
    Tensor { factors: Vec<Arc<AlgebraDescriptor>> },
    SymmetricPower { inner: Arc<AlgebraDescriptor>, degree: usize },
    /// Direct sum of full complex matrix blocks; the realization form of
    /// every enveloping C*-algebra here.
    CStar { blocks: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraDescriptor {
    pub kind: Kind,
    /// Size of the complex matrix realization for matrix-realized kinds;
    /// the coordinate dimension (letter count, inner dim) otherwise.
    pub realization_dim: usize,
}

impl AlgebraDescriptor {
    pub fn matrix(n: usize, field: Field) -> Arc<Self> {
        assert!(n >= 1);
        let dim = match field {
            Field::Quaternion => 2 * n,
            _ => n,
        };
        Arc::new(AlgebraDescriptor { kind: Kind::Matrix { n, field }, realization_dim: dim })
    }

    /// Semigroup algebra ℝ[S] with seminorm p(Σ c_s δ_s) = Σ |c_s| α(s).
    pub fn semigroup(table: Arc<SemigroupTable>, alpha: AbsoluteValue) -> Result<Arc<Self>> {
        table.validate()?;
        alpha.validate(&table)?;
        let letters = table.letters;
        Ok(Arc::new(AlgebraDescriptor {
            kind: Kind::Semigroup { table, alpha },
            realization_dim: letters,
        }))
    }

    pub fn unitize(inner: &Arc<Self>) -> Arc<Self> {
        let dim = inner.realization_dim;
        Arc::new(AlgebraDescriptor { kind: Kind::Unitization { inner: inner.clone() }, realization_dim: dim })
    }

    pub fn complexify(inner: &Arc<Self>) -> Arc<Self> {
        let dim = inner.realization_dim;
        Arc::new(AlgebraDescriptor {
            kind: Kind::Complexification { inner: inner.clone() },
            realization_dim: dim,
        })
    }

    pub fn tensor(factors: &[Arc<Self>]) -> Result<Arc<Self>> {
        if factors.is_empty() {
            return Err(Error::Unsupported("tensor product of zero factors".into()));
        }
        if let Some(f) = factors.iter().find(|f| !f.matrix_realized()) {
            return Err(Error::Unsupported(format!(
                "tensor factors must be matrix-realized; got {}",
                f.name()
            )));
        }
        let dim = factors.iter().map(|f| f.realization_dim).product();
        Ok(Arc::new(AlgebraDescriptor {
            kind: Kind::Tensor { factors: factors.to_vec() },
            realization_dim: dim,
        }))
    }

    pub fn symmetric_power(inner: &Arc<Self>, degree: usize) -> Result<Arc<Self>> {
        if !inner.matrix_realized() {
            return Err(Error::Unsupported(format!(
                "symmetric power needs a matrix-realized inner algebra; got {}",
                inner.name()
            )));
        }
        let dim = inner.realization_dim.pow(degree as u32).max(1);
        Ok(Arc::new(AlgebraDescriptor {
            kind: Kind::SymmetricPower { inner: inner.clone(), degree },
            realization_dim: dim,
        }))
    }

    pub fn cstar(blocks: Vec<usize>) -> Arc<Self> {
        let dim = blocks.iter().sum();
        Arc::new(AlgebraDescriptor { kind: Kind::CStar { blocks }, realization_dim: dim })
    }

    /// Whether elements are single complex matrices of `realization_dim`.
    pub fn matrix_realized(&self) -> bool {
        matches!(
            self.kind,
            Kind::Matrix { .. } | Kind::CStar { .. } | Kind::Tensor { .. } | Kind::SymmetricPower { .. }
        )
    }

    pub fn is_unital(&self) -> bool {
        match &self.kind {
            Kind::Matrix { .. } | Kind::CStar { .. } | Kind::Unitization { .. } => true,
            Kind::Semigroup { table, .. } => table.unit.is_some(),
            Kind::Complexification { inner } => inner.is_unital(),
            Kind::Tensor { factors } => factors.iter().all(|f| f.is_unital()),
            Kind::SymmetricPower { inner, .. } => inner.is_unital(),
        }
    }

    /// Dimension of the real coordinate vector of elements; supported for
    /// the kinds the envelope handles directly.
    pub fn real_coord_dim(&self) -> Result<usize> {
        match &self.kind {
            Kind::Matrix { n, field } => Ok(match field {
                Field::Real => n * n,
                Field::Complex => 2 * n * n,
                Field::Quaternion => 4 * n * n,
            }),
            Kind::Semigroup { table, .. } => Ok(table.letters),
            Kind::Unitization { inner } => Ok(inner.real_coord_dim()? + 1),
            Kind::Complexification { inner } => Ok(2 * inner.real_coord_dim()?),
            Kind::CStar { blocks } => Ok(2 * blocks.iter().map(|b| b * b).sum::<usize>()),
            _ => Err(Error::Unsupported(format!("real coordinates for {}", self.name()))),
        }
    }

    /// Short human-readable name for error messages and reports.
    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Matrix { n, field } => {
                let f = match field {
                    Field::Real => "R",
                    Field::Complex => "C",
                    Field::Quaternion => "H",
                };
                format!("M{n}({f})")
            }
            Kind::Semigroup { table, .. } => format!("R[S:{} letters]", table.letters),
            Kind::Unitization { inner } => format!("{}^1", inner.name()),
            Kind::Complexification { inner } => format!("({})_C", inner.name()),
            Kind::Tensor { factors } => {
                factors.iter().map(|f| f.name()).collect::<Vec<_>>().join(" (x) ")
            }
            Kind::SymmetricPower { inner, degree } => format!("S{degree}({})", inner.name()),
            Kind::CStar { blocks } => format!(
                "C*[{}]",
                blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// Quaternion embedding
// ---------------------------------------------------------------------------

/// Embeds one quaternion a+bi+cj+dk as the 2×2 complex block
/// [[a+bi, c+di], [−c+di, a−bi]].
pub fn embed_quaternion(a: f64, b: f64, cc: f64, d: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[c(a, b), c(cc, d), c(-cc, d), c(a, -b)])
}

/// Defect of the quaternionic reality constraint `Ω M̄ Ω⁻¹ = M` with
/// `Ω = I_n ⊗ [[0,1],[−1,0]]`; zero exactly on embedded matrices.
pub fn quaternion_defect(m: &CMat) -> f64 {
    let two_n = m.nrows();
    let n = two_n / 2;
    let omega_small = CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(-1.0), cr(0.0)]);
    let omega = ceye(n).kronecker(&omega_small);
    let conj = m.map(|z| z.conj());
    opnorm(&(&omega * conj * omega.adjoint() - m))
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum ElemData {
    Mat(CMat),
    Sum(Vec<f64>),
    Pair(Box<ElemData>, Box<ElemData>),
    Unitized(Box<ElemData>, f64),
}

#[derive(Debug, Clone)]
pub struct Element {
    pub descriptor: Arc<AlgebraDescriptor>,
    pub data: ElemData,
}

impl Element {
    pub fn new(descriptor: Arc<AlgebraDescriptor>, data: ElemData) -> Self {
        Element { descriptor, data }
    }

    /// Matrix-kind element from complex entries; rejects data violating the
    /// field constraint (real entries, quaternionic reality, block support).
    pub fn from_matrix(descriptor: &Arc<AlgebraDescriptor>, m: CMat) -> Result<Self> {
        if !descriptor.matrix_realized() {
            return Err(Error::Unsupported(format!("matrix data for {}", descriptor.name())));
        }
        if m.nrows() != descriptor.realization_dim || m.ncols() != descriptor.realization_dim {
            return Err(Error::DescriptorMismatch(format!(
                "matrix size {}×{} vs realization dimension {}",
                m.nrows(),
                m.ncols(),
                descriptor.realization_dim
            )));
        }
        let defect = field_defect(descriptor, &m);
        if defect > 1e-10 * opnorm(&m).max(1.0) {
            return Err(Error::DescriptorMismatch(format!(
                "matrix violates the {} field constraint (defect {defect:.3e})",
                descriptor.name()
            )));
        }
        Ok(Element::new(descriptor.clone(), ElemData::Mat(m)))
    }

    pub fn zero(d: &Arc<AlgebraDescriptor>) -> Self {
        Element::new(d.clone(), zero_data(d))
    }

    pub fn unit(d: &Arc<AlgebraDescriptor>) -> Result<Self> {
        unit_data(d).map(|u| Element::new(d.clone(), u))
    }

    /// Scalar multiple of the unit, for unital descriptors.
    pub fn scalar(d: &Arc<AlgebraDescriptor>, s: f64) -> Result<Self> {
        Ok(Element::unit(d)?.scale(s))
    }

    pub fn matrix(&self) -> Result<&CMat> {
        match &self.data {
            ElemData::Mat(m) => Ok(m),
            _ => Err(Error::Unsupported(format!(
                "element of {} has no direct matrix realization",
                self.descriptor.name()
            ))),
        }
    }

    pub fn seminorm(&self) -> f64 {
        seminorm_data(&self.descriptor, &self.data)
    }

    pub fn ball_membership(&self) -> bool {
        self.seminorm() < 1.0
    }

    pub fn adjoint(&self) -> Self {
        Element::new(self.descriptor.clone(), adjoint_data(&self.descriptor, &self.data))
    }

    pub fn scale(&self, s: f64) -> Self {
        Element::new(self.descriptor.clone(), scale_data(&self.data, s))
    }

    pub fn add(&self, other: &Element) -> Result<Self> {
        self.check_same(other)?;
        Ok(Element::new(self.descriptor.clone(), add_data(&self.data, &other.data)))
    }

    pub fn sub(&self, other: &Element) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Element) -> Result<Self> {
        self.check_same(other)?;
        Ok(Element::new(self.descriptor.clone(), mul_data(&self.descriptor, &self.data, &other.data)))
    }

    /// `a*a = aa* = 1` within tolerance; unital descriptors only.
    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        let unit = Element::unit(&self.descriptor)?;
        let ad = self.adjoint();
        let left = ad.mul(self)?.sub(&unit)?;
        let right = self.mul(&ad)?.sub(&unit)?;
        Ok(left.coord_norm() <= tol && right.coord_norm() <= tol)
    }

    /// Euclidean norm of the raw coordinates; a descriptor-independent
    /// distance for guards and tests (not the seminorm).
    pub fn coord_norm(&self) -> f64 {
        coord_norm_data(&self.data)
    }

    pub fn distance(&self, other: &Element) -> Result<f64> {
        Ok(self.sub(other)?.coord_norm())
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.descriptor == other.descriptor {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(format!(
                "{} vs {}",
                self.descriptor.name(),
                other.descriptor.name()
            )))
        }
    }

    /// Seeded random element, Gaussian in the descriptor's coordinates.
    pub fn random<R: Rng>(d: &Arc<AlgebraDescriptor>, rng: &mut R) -> Self {
        Element::new(d.clone(), random_data(d, rng))
    }

    /// Random element rescaled to seminorm `radius` (inside the ball for
    /// radius < 1). Zero draws are retried.
    pub fn random_in_ball<R: Rng>(d: &Arc<AlgebraDescriptor>, rng: &mut R, radius: f64) -> Self {
        for _ in 0..64 {
            let a = Element::random(d, rng);
            let p = a.seminorm();
            if p > 1e-12 {
                return a.scale(radius / p);
            }
        }
        Element::zero(d)
    }

    // -- real coordinates ---------------------------------------------------

    /// Real coordinate vector; see [`AlgebraDescriptor::real_coord_dim`].
    pub fn real_coords(&self) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.descriptor.real_coord_dim()?);
        real_coords_data(&self.descriptor, &self.data, &mut out)?;
        Ok(out)
    }

    pub fn from_real_coords(d: &Arc<AlgebraDescriptor>, coords: &[f64]) -> Result<Self> {
        let expect = d.real_coord_dim()?;
        if coords.len() != expect {
            return Err(Error::DescriptorMismatch(format!(
                "coordinate length {} vs expected {expect}",
                coords.len()
            )));
        }
        let mut pos = 0usize;
        let data = from_real_coords_data(d, coords, &mut pos)?;
        Ok(Element::new(d.clone(), data))
    }
}

fn field_defect(d: &AlgebraDescriptor, m: &CMat) -> f64 {
    match &d.kind {
        Kind::Matrix { field: Field::Real, .. } => m.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        Kind::Matrix { field: Field::Quaternion, .. } => quaternion_defect(m),
        Kind::CStar { blocks } => {
            // support outside the diagonal blocks
            let mut defect: f64 = 0.0;
            let mut starts = vec![0usize];
            for b in blocks {
                starts.push(starts.last().unwrap() + b);
            }
            let inside = |i: usize, j: usize| {
                (0..blocks.len()).any(|k| {
                    i >= starts[k] && i < starts[k + 1] && j >= starts[k] && j < starts[k + 1]
                })
            };
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if !inside(i, j) {
                        defect = defect.max(m[(i, j)].norm());
                    }
                }
            }
            defect
        }
        _ => 0.0,
    }
}

fn zero_data(d: &AlgebraDescriptor) -> ElemData {
    match &d.kind {
        Kind::Matrix { .. } | Kind::CStar { .. } | Kind::Tensor { .. } | Kind::SymmetricPower { .. } => {
            ElemData::Mat(CMat::zeros(d.realization_dim, d.realization_dim))
        }
        Kind::Semigroup { table, .. } => ElemData::Sum(vec![0.0; table.letters]),
        Kind::Unitization { inner } => ElemData::Unitized(Box::new(zero_data(inner)), 0.0),
        Kind::Complexification { inner } => {
            ElemData::Pair(Box::new(zero_data(inner)), Box::new(zero_data(inner)))
        }
    }
}

fn unit_data(d: &AlgebraDescriptor) -> Result<ElemData> {
    match &d.kind {
        Kind::Matrix { .. } | Kind::CStar { .. } | Kind::Tensor { .. } | Kind::SymmetricPower { .. } => {
            Ok(ElemData::Mat(ceye(d.realization_dim)))
        }
        Kind::Semigroup { table, .. } => match table.unit {
            Some(e) => {
                let mut w = vec![0.0; table.letters];
                w[e] = 1.0;
                Ok(ElemData::Sum(w))
            }
            None => Err(Error::Unsupported(format!("{} has no unit", d.name()))),
        },
        Kind::Unitization { inner } => Ok(ElemData::Unitized(Box::new(zero_data(inner)), 1.0)),
        Kind::Complexification { inner } => {
            Ok(ElemData::Pair(Box::new(unit_data(inner)?), Box::new(zero_data(inner))))
        }
    }
}

fn seminorm_data(d: &AlgebraDescriptor, x: &ElemData) -> f64 {
    match (&d.kind, x) {
        (Kind::Semigroup { alpha, .. }, ElemData::Sum(w)) => {
            w.iter().zip(alpha.weights.iter()).map(|(c, a)| c.abs() * a).sum()
        }
        (Kind::Unitization { inner }, ElemData::Unitized(a, l)) => {
            seminorm_data(inner, a) + l.abs()
        }
        (Kind::Complexification { inner }, ElemData::Pair(x0, y0)) => {
            seminorm_data(inner, x0) + seminorm_data(inner, y0)
        }
        (_, ElemData::Mat(m)) => opnorm(m),
        _ => unreachable!("element data inconsistent with descriptor"),
    }
}

fn adjoint_data(d: &AlgebraDescriptor, x: &ElemData) -> ElemData {
    match (&d.kind, x) {
        (Kind::Semigroup { table, .. }, ElemData::Sum(w)) => {
            let mut out = vec![0.0; table.letters];
            for s in 0..table.letters {
                out[table.inv(s)] = w[s];
            }
            ElemData::Sum(out)
        }
        (Kind::Unitization { inner }, ElemData::Unitized(a, l)) => {
            ElemData::Unitized(Box::new(adjoint_data(inner, a)), *l)
        }
        (Kind::Complexification { inner }, ElemData::Pair(x0, y0)) => ElemData::Pair(
            Box::new(adjoint_data(inner, x0)),
            Box::new(scale_data(&adjoint_data(inner, y0), -1.0)),
        ),
        (_, ElemData::Mat(m)) => ElemData::Mat(m.adjoint()),
        _ => unreachable!("element data inconsistent with descriptor"),
    }
}

fn scale_data(x: &ElemData, s: f64) -> ElemData {
    match x {
        ElemData::Mat(m) => ElemData::Mat(m * cr(s)),
        ElemData::Sum(w) => ElemData::Sum(w.iter().map(|c| c * s).collect()),
        ElemData::Pair(a, b) => {
            ElemData::Pair(Box::new(scale_data(a, s)), Box::new(scale_data(b, s)))
        }
        ElemData::Unitized(a, l) => ElemData::Unitized(Box::new(scale_data(a, s)), l * s),
    }
}

fn add_data(x: &ElemData, y: &ElemData) -> ElemData {
    match (x, y) {
        (ElemData::Mat(a), ElemData::Mat(b)) => ElemData::Mat(a + b),
        (ElemData::Sum(a), ElemData::Sum(b)) => {
            ElemData::Sum(a.iter().zip(b.iter()).map(|(p, q)| p + q).collect())
        }
        (ElemData::Pair(a1, b1), ElemData::Pair(a2, b2)) => {
            ElemData::Pair(Box::new(add_data(a1, a2)), Box::new(add_data(b1, b2)))
        }
        (ElemData::Unitized(a1, l1), ElemData::Unitized(a2, l2)) => {
            ElemData::Unitized(Box::new(add_data(a1, a2)), l1 + l2)
        }
        _ => unreachable!("element data shapes differ"),
    }
}

fn mul_data(d: &AlgebraDescriptor, x: &ElemData, y: &ElemData) -> ElemData {
    match (&d.kind, x, y) {
        (Kind::Semigroup { table, .. }, ElemData::Sum(a), ElemData::Sum(b)) => {
            let mut out = vec![0.0; table.letters];
            for s in 0..table.letters {
                if a[s] == 0.0 {
                    continue;
                }
                for t in 0..table.letters {
                    if b[t] != 0.0 {
                        out[table.mul(s, t)] += a[s] * b[t];
                    }
                }
            }
            ElemData::Sum(out)
        }
        (Kind::Unitization { inner }, ElemData::Unitized(a, l), ElemData::Unitized(b, m)) => {
            // (a, λ)(b, μ) = (ab + λb + μa, λμ)
            let ab = mul_data(inner, a, b);
            let sum = add_data(&add_data(&ab, &scale_data(b, *l)), &scale_data(a, *m));
            ElemData::Unitized(Box::new(sum), l * m)
        }
        (Kind::Complexification { inner }, ElemData::Pair(x0, y0), ElemData::Pair(u, v)) => {
            // (x + iy)(u + iv) = (xu − yv) + i(xv + yu)
            let re = add_data(&mul_data(inner, x0, u), &scale_data(&mul_data(inner, y0, v), -1.0));
            let im = add_data(&mul_data(inner, x0, v), &mul_data(inner, y0, u));
            ElemData::Pair(Box::new(re), Box::new(im))
        }
        (_, ElemData::Mat(a), ElemData::Mat(b)) => ElemData::Mat(a * b),
        _ => unreachable!("element data inconsistent with descriptor"),
    }
}

fn coord_norm_data(x: &ElemData) -> f64 {
    match x {
        ElemData::Mat(m) => m.norm(),
        ElemData::Sum(w) => w.iter().map(|c| c * c).sum::<f64>().sqrt(),
        ElemData::Pair(a, b) => coord_norm_data(a).hypot(coord_norm_data(b)),
        ElemData::Unitized(a, l) => coord_norm_data(a).hypot(*l),
    }
}

fn random_data<R: Rng>(d: &AlgebraDescriptor, rng: &mut R) -> ElemData {
    match &d.kind {
        Kind::Matrix { n, field } => match field {
            Field::Real => ElemData::Mat(linalg::ginibre_real(rng, *n, *n)),
            Field::Complex => ElemData::Mat(linalg::ginibre(rng, *n, *n)),
            Field::Quaternion => {
                let mut m = CMat::zeros(2 * n, 2 * n);
                for i in 0..*n {
                    for j in 0..*n {
                        let q = embed_quaternion(randn(rng), randn(rng), randn(rng), randn(rng));
                        m.view_mut((2 * i, 2 * j), (2, 2)).copy_from(&q);
                    }
                }
                ElemData::Mat(m)
            }
        },
        Kind::CStar { blocks } => {
            let dim = d.realization_dim;
            let mut m = CMat::zeros(dim, dim);
            let mut start = 0usize;
            for b in blocks {
                m.view_mut((start, start), (*b, *b)).copy_from(&linalg::ginibre(rng, *b, *b));
                start += b;
            }
            ElemData::Mat(m)
        }
        Kind::Semigroup { table, .. } => {
            ElemData::Sum((0..table.letters).map(|_| randn(rng)).collect())
        }
        Kind::Unitization { inner } => {
            ElemData::Unitized(Box::new(random_data(inner, rng)), randn(rng))
        }
        Kind::Complexification { inner } => {
            ElemData::Pair(Box::new(random_data(inner, rng)), Box::new(random_data(inner, rng)))
        }
        Kind::Tensor { factors } => {
            // sum of a few Kronecker products of factor draws
            let dim = d.realization_dim;
            let mut acc = CMat::zeros(dim, dim);
            for _ in 0..2 {
                let mut term = CMat::identity(1, 1);
                for f in factors {
                    let ElemData::Mat(m) = random_data(f, rng) else { unreachable!() };
                    term = term.kronecker(&m);
                }
                acc += term;
            }
            ElemData::Mat(acc)
        }
        Kind::SymmetricPower { inner, degree } => {
            // symmetrized sums of n-fold Kronecker draws of inner elements
            let dim = d.realization_dim;
            let m = inner.realization_dim;
            let mut acc = CMat::zeros(dim, dim);
            for _ in 0..2 {
                let mut term = CMat::identity(1, 1);
                for _ in 0..*degree {
                    let ElemData::Mat(x) = random_data(inner, rng) else { unreachable!() };
                    term = term.kronecker(&x);
                }
                acc += symmetrize_matrix(&term, m, *degree);
            }
            ElemData::Mat(acc)
        }
    }
}

/// Symmetrizer q(x) = (1/n!) Σ_σ P_σ x P_σ† on the n-fold Kronecker space.
pub fn symmetrize_matrix(x: &CMat, m: usize, n: usize) -> CMat {
    if n <= 1 {
        return x.clone();
    }
    let perms = linalg::permutations(n);
    let mut acc = CMat::zeros(x.nrows(), x.ncols());
    for sigma in &perms {
        let p = linalg::permutation_operator(m, sigma);
        acc += &p * x * p.adjoint();
    }
    acc * cr(1.0 / perms.len() as f64)
}

// -- real coordinates ---------------------------------------------------

fn real_coords_data(d: &AlgebraDescriptor, x: &ElemData, out: &mut Vec<f64>) -> Result<()> {
    match (&d.kind, x) {
        (Kind::Matrix { n, field }, ElemData::Mat(m)) => {
            match field {
                Field::Real => {
                    for i in 0..*n {
                        for j in 0..*n {
                            out.push(m[(i, j)].re);
                        }
                    }
                }
                Field::Complex => {
                    for i in 0..*n {
                        for j in 0..*n {
                            out.push(m[(i, j)].re);
                            out.push(m[(i, j)].im);
                        }
                    }
                }
                Field::Quaternion => {
                    for i in 0..*n {
                        for j in 0..*n {
                            let z = m[(2 * i, 2 * j)];
                            let w = m[(2 * i, 2 * j + 1)];
                            out.extend_from_slice(&[z.re, z.im, w.re, w.im]);
                        }
                    }
                }
            }
            Ok(())
        }
        (Kind::Semigroup { .. }, ElemData::Sum(w)) => {
            out.extend_from_slice(w);
            Ok(())
        }
        (Kind::Unitization { inner }, ElemData::Unitized(a, l)) => {
            real_coords_data(inner, a, out)?;
            out.push(*l);
            Ok(())
        }
        (Kind::Complexification { inner }, ElemData::Pair(a, b)) => {
            real_coords_data(inner, a, out)?;
            real_coords_data(inner, b, out)
        }
        (Kind::CStar { blocks }, ElemData::Mat(m)) => {
            let mut start = 0usize;
            for b in blocks {
                for i in 0..*b {
                    for j in 0..*b {
                        out.push(m[(start + i, start + j)].re);
                        out.push(m[(start + i, start + j)].im);
                    }
                }
                start += b;
            }
            Ok(())
        }
        _ => Err(Error::Unsupported(format!("real coordinates for {}", d.name()))),
    }
}

fn from_real_coords_data(
    d: &AlgebraDescriptor,
    coords: &[f64],
    pos: &mut usize,
) -> Result<ElemData> {
    let mut next = || {
        let v = coords[*pos];
        *pos += 1;
        v
    };
    match &d.kind {
        Kind::Matrix { n, field } => {
            let mut m = CMat::zeros(d.realization_dim, d.realization_dim);
            match field {
                Field::Real => {
                    for i in 0..*n {
                        for j in 0..*n {
                            m[(i, j)] = cr(next());
                        }
                    }
                }
                Field::Complex => {
                    for i in 0..*n {
                        for j in 0..*n {
                            let re = next();
                            let im = next();
                            m[(i, j)] = c(re, im);
                        }
                    }
                }
                Field::Quaternion => {
                    for i in 0..*n {
                        for j in 0..*n {
                            let (a, b, cc, dd) = (next(), next(), next(), next());
                            m.view_mut((2 * i, 2 * j), (2, 2))
                                .copy_from(&embed_quaternion(a, b, cc, dd));
                        }
                    }
                }
            }
            Ok(ElemData::Mat(m))
        }
        Kind::Semigroup { table, .. } => {
            Ok(ElemData::Sum((0..table.letters).map(|_| next()).collect()))
        }
        Kind::Unitization { inner } => {
            let a = from_real_coords_data(inner, coords, pos)?;
            Ok(ElemData::Unitized(Box::new(a), {
                let v = coords[*pos];
                *pos += 1;
                v
            }))
        }
        Kind::Complexification { inner } => {
            let a = from_real_coords_data(inner, coords, pos)?;
            let b = from_real_coords_data(inner, coords, pos)?;
            Ok(ElemData::Pair(Box::new(a), Box::new(b)))
        }
        Kind::CStar { blocks } => {
            let mut m = CMat::zeros(d.realization_dim, d.realization_dim);
            let mut start = 0usize;
            for b in blocks {
                for i in 0..*b {
                    for j in 0..*b {
                        let re = next();
                        let im = next();
                        m[(start + i, start + j)] = c(re, im);
                    }
                }
                start += b;
            }
            Ok(ElemData::Mat(m))
        }
        _ => Err(Error::Unsupported(format!("real coordinates for {}", d.name()))),
    }
}

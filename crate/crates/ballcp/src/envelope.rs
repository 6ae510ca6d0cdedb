//! Enveloping C*-realizations and their canonical maps.
//!
//! [`envelope`] sends a descriptor to a block-diagonal complex matrix
//! algebra together with the contractive *-homomorphism η realized as a
//! real-linear matrix on coordinates:
//!
//! * `M_n(ℝ)` includes into `M_n(ℂ)` unchanged;
//! * `M_n(ℂ)`, viewed as a real algebra, maps to two blocks `(a, ā)`;
//! * `M_n(ℍ)` is already realized in `M_{2n}(ℂ)`;
//! * a commutative semigroup algebra maps to diagonal matrices through its
//!   bounded real characters, enumerated exactly over sign patterns;
//! * unitizations append a scalar block, complexifications double the
//!   blocks with conjugate halves.
//!
//! The module also owns the symmetrizer `q`, symmetric-power descriptors
//! with their cached coordinate bases ([`SymBasis`]), the truncated
//! exponential elements ([`ExpElement`]), and the map Γ(a) collecting the
//! Kronecker powers of η(a).

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebra::{symmetrize_matrix, AlgebraDescriptor, Element, Field, Kind};
use crate::error::{Error, Result};
use crate::linalg::{block_diag, c, ceye, cr, opnorm, CMat, CVec, RMat};
use crate::semigroup::{AbsoluteValue, SemigroupTable};

/// Largest semigroup table for exact character enumeration (3^letters
/// sign patterns are scanned).
pub const MAX_CHARACTER_LETTERS: usize = 12;

/// A contractive *-homomorphism from a source algebra onto its enveloping
/// block-diagonal C*-realization.
pub struct EnvelopingMap {
    pub source: Arc<AlgebraDescriptor>,
    pub target: Arc<AlgebraDescriptor>,
    /// η as a real-linear matrix: source real coordinates to target real
    /// coordinates.
    pub matrix: RMat,
    /// For semigroup sources: each character as its value row over letters.
    pub characters: Option<Vec<Vec<i8>>>,
}

impl EnvelopingMap {
    pub fn apply(&self, a: &Element) -> Result<Element> {
        if a.descriptor != self.source {
            return Err(Error::DescriptorMismatch(format!(
                "element of {} fed to envelope of {}",
                a.descriptor.name(),
                self.source.name()
            )));
        }
        let coords = nalgebra::DVector::from_vec(a.real_coords()?);
        let out = &self.matrix * coords;
        Element::from_real_coords(&self.target, out.as_slice())
    }

    /// Envelope image as a plain complex matrix.
    pub fn image(&self, a: &Element) -> Result<CMat> {
        Ok(self.apply(a)?.matrix()?.clone())
    }

    pub fn target_blocks(&self) -> &[usize] {
        match &self.target.kind {
            Kind::CStar { blocks } => blocks,
            _ => unreachable!("envelope targets are always block C*-descriptors"),
        }
    }
}

/// Computes the enveloping C*-realization; see module docs for the rules.
pub fn envelope(d: &Arc<AlgebraDescriptor>) -> Result<EnvelopingMap> {
    let (blocks, eta, characters) = build_eta(d)?;
    let target = AlgebraDescriptor::cstar(blocks);
    let src_dim = d.real_coord_dim()?;
    let tgt_dim = target.real_coord_dim()?;
    let mut matrix = RMat::zeros(tgt_dim, src_dim);
    let mut coords = vec![0.0; src_dim];
    for i in 0..src_dim {
        coords[i] = 1.0;
        let basis_elem = Element::from_real_coords(d, &coords)?;
        let img = Element::from_matrix(&target, eta(&basis_elem))?;
        let img_coords = img.real_coords()?;
        for (r, v) in img_coords.iter().enumerate() {
            matrix[(r, i)] = *v;
        }
        coords[i] = 0.0;
    }
    Ok(EnvelopingMap { source: d.clone(), target, matrix, characters })
}

type Eta = Box<dyn Fn(&Element) -> CMat>;

fn build_eta(d: &Arc<AlgebraDescriptor>) -> Result<(Vec<usize>, Eta, Option<Vec<Vec<i8>>>)> {
    match &d.kind {
        Kind::Matrix { n, field } => match field {
            Field::Real => {
                let f: Eta = Box::new(|a| a.matrix().unwrap().clone());
                Ok((vec![*n], f, None))
            }
            Field::Quaternion => {
                let f: Eta = Box::new(|a| a.matrix().unwrap().clone());
                Ok((vec![2 * n], f, None))
            }
            Field::Complex => {
                let f: Eta = Box::new(|a| {
                    let m = a.matrix().unwrap();
                    block_diag(&[m.clone(), m.map(|z| z.conj())])
                });
                Ok((vec![*n, *n], f, None))
            }
        },
        Kind::CStar { blocks } => {
            let f: Eta = Box::new(|a| a.matrix().unwrap().clone());
            Ok((blocks.clone(), f, None))
        }
        Kind::Semigroup { table, alpha } => {
            let chars = characters(table, alpha)?;
            let k = chars.len();
            let letters = table.letters;
            let chars_for_eta = chars.clone();
            let f: Eta = Box::new(move |a| {
                let crate::algebra::ElemData::Sum(w) = &a.data else { unreachable!() };
                let mut m = CMat::zeros(k, k);
                for (row, chi) in chars_for_eta.iter().enumerate() {
                    let val: f64 = (0..letters).map(|s| w[s] * chi[s] as f64).sum();
                    m[(row, row)] = cr(val);
                }
                m
            });
            Ok((vec![1usize; k], f, Some(chars)))
        }
        Kind::Unitization { inner } => {
            let (inner_blocks, inner_eta, _) = build_eta(inner)?;
            let inner_dim: usize = inner_blocks.iter().sum();
            let mut blocks = inner_blocks;
            blocks.push(1);
            let f: Eta = Box::new(move |a| {
                let crate::algebra::ElemData::Unitized(_, lambda) = &a.data else { unreachable!() };
                let inner_elem = Element::new(
                    match &a.descriptor.kind {
                        Kind::Unitization { inner } => inner.clone(),
                        _ => unreachable!(),
                    },
                    match &a.data {
                        crate::algebra::ElemData::Unitized(x, _) => (**x).clone(),
                        _ => unreachable!(),
                    },
                );
                let img = inner_eta(&inner_elem) + ceye(inner_dim) * cr(*lambda);
                let scalar = CMat::from_element(1, 1, cr(*lambda));
                block_diag(&[img, scalar])
            });
            Ok((blocks, f, None))
        }
        Kind::Complexification { inner } => {
            let (inner_blocks, inner_eta, _) = build_eta(inner)?;
            let mut blocks = inner_blocks.clone();
            blocks.extend_from_slice(&inner_blocks);
            let inner_desc = inner.clone();
            let f: Eta = Box::new(move |a| {
                let crate::algebra::ElemData::Pair(x, y) = &a.data else { unreachable!() };
                let ex = Element::new(inner_desc.clone(), (**x).clone());
                let ey = Element::new(inner_desc.clone(), (**y).clone());
                let zx = inner_eta(&ex);
                let zy = inner_eta(&ey);
                let i = c(0.0, 1.0);
                block_diag(&[&zx + &zy * i, &zx - &zy * i])
            });
            Ok((blocks, f, None))
        }
        Kind::Tensor { .. } | Kind::SymmetricPower { .. } => Err(Error::Unsupported(format!(
            "envelope of {}: use tensor_product / symmetric_power directly",
            d.name()
        ))),
    }
}

/// Bounded real characters of a finite commutative semigroup table, as
/// value rows over letters. Exact enumeration over sign patterns: values
/// lie in {−1, 0, 1} because every element of a finite semigroup satisfies
/// s^a = s^{a+b}, forcing χ(s)^a (1 − χ(s)^b) = 0.
pub fn characters(table: &SemigroupTable, alpha: &AbsoluteValue) -> Result<Vec<Vec<i8>>> {
    let n = table.letters;
    for s in 0..n {
        for t in 0..n {
            if table.mul(s, t) != table.mul(t, s) {
                return Err(Error::Unsupported(format!(
                    "characters need a commutative table; {} and {} do not commute",
                    table.names[s], table.names[t]
                )));
            }
        }
    }
    if n > MAX_CHARACTER_LETTERS {
        return Err(Error::Unsupported(format!(
            "character enumeration is exact only up to {MAX_CHARACTER_LETTERS} letters; table has {n}"
        )));
    }
    let values: [i8; 3] = [0, 1, -1];
    let total = 3usize.pow(n as u32);
    let mut found = Vec::new();
    let mut chi = vec![0i8; n];
    'patterns: for pattern in 0..total {
        let mut p = pattern;
        let mut all_zero = true;
        for slot in chi.iter_mut() {
            *slot = values[p % 3];
            p /= 3;
            if *slot != 0 {
                all_zero = false;
            }
        }
        if all_zero {
            continue;
        }
        for (s, &v) in chi.iter().enumerate() {
            if v != 0 && alpha.get(s) < 1.0 - 1e-12 {
                continue 'patterns;
            }
            if chi[table.inv(s)] != v {
                continue 'patterns;
            }
        }
        for s in 0..n {
            for t in s..n {
                if chi[table.mul(s, t)] != chi[s] * chi[t] {
                    continue 'patterns;
                }
            }
        }
        found.push(chi.clone());
    }
    Ok(found)
}

/// Kronecker-realized tensor product descriptor.
pub fn tensor_product(ds: &[Arc<AlgebraDescriptor>]) -> Result<Arc<AlgebraDescriptor>> {
    AlgebraDescriptor::tensor(ds)
}

/// Fixed-point projection q(x) = (1/n!) Σ_σ P_σ x P_σ† on an n-fold tensor
/// element with equal factors; idempotent and *-preserving.
pub fn symmetrize(x: &Element) -> Result<Element> {
    let (m, n) = tensor_shape(&x.descriptor)?;
    let sym = symmetrize_matrix(x.matrix()?, m, n);
    Ok(Element::new(x.descriptor.clone(), crate::algebra::ElemData::Mat(sym)))
}

fn tensor_shape(d: &AlgebraDescriptor) -> Result<(usize, usize)> {
    match &d.kind {
        Kind::Tensor { factors } => {
            let m = factors[0].realization_dim;
            if factors.iter().any(|f| f.realization_dim != m || **f != *factors[0]) {
                return Err(Error::Unsupported(
                    "symmetrization needs equal tensor factors".into(),
                ));
            }
            Ok((m, factors.len()))
        }
        Kind::SymmetricPower { inner, degree } => Ok((inner.realization_dim, *degree)),
        _ => Err(Error::Unsupported(format!("symmetrization on {}", d.name()))),
    }
}

/// Symmetric power descriptor S^n(d); degree 0 yields the scalars.
pub fn symmetric_power(d: &Arc<AlgebraDescriptor>, degree: usize) -> Result<Arc<AlgebraDescriptor>> {
    AlgebraDescriptor::symmetric_power(d, degree)
}

// ---------------------------------------------------------------------------
// Symmetric-power coordinate basis
// ---------------------------------------------------------------------------

/// Orthonormal coordinate basis of S^n(B) inside the n-fold Kronecker
/// algebra, for B a block-diagonal matrix algebra inside M_m.
///
/// The basis vectors are symmetrized products of matrix units over
/// nondecreasing index multisets; they have disjoint 0/1 supports in the
/// product entry basis, so coordinates are sparse sums of entries.
pub struct SymBasis {
    pub m: usize,
    pub degree: usize,
    /// B-basis as global matrix-unit positions inside M_m.
    pub units: Vec<(usize, usize)>,
    /// Nondecreasing unit-index tuples, one per basis vector.
    pub multisets: Vec<Vec<usize>>,
    entries: Vec<Vec<(usize, usize)>>,
    norms: Vec<f64>,
}

impl SymBasis {
    /// Basis of S^n(M_m).
    pub fn full(m: usize, degree: usize) -> Self {
        SymBasis::blocks(&[m], degree)
    }

    /// Basis of S^n(B) for B the block-diagonal subalgebra with the given
    /// block sizes; m is their sum.
    pub fn blocks(blocks: &[usize], degree: usize) -> Self {
        let m: usize = blocks.iter().sum();
        let mut units = Vec::new();
        let mut start = 0usize;
        for b in blocks {
            for i in 0..*b {
                for j in 0..*b {
                    units.push((start + i, start + j));
                }
            }
            start += b;
        }
        let mut multisets = Vec::new();
        let mut current = Vec::new();
        collect_multisets(units.len(), degree, 0, &mut current, &mut multisets);
        let dim_pow = m.pow(degree as u32).max(1);
        let mut entries = Vec::with_capacity(multisets.len());
        let mut norms = Vec::with_capacity(multisets.len());
        for ms in &multisets {
            let arrangements = distinct_arrangements(ms);
            let mut pos = Vec::with_capacity(arrangements.len());
            for arr in &arrangements {
                let mut row = 0usize;
                let mut col = 0usize;
                for &k in arr {
                    let (r, cc) = units[k];
                    row = row * m + r;
                    col = col * m + cc;
                }
                debug_assert!(row < dim_pow && col < dim_pow);
                pos.push((row, col));
            }
            norms.push((pos.len() as f64).sqrt());
            entries.push(pos);
        }
        SymBasis { m, degree, units, multisets, entries, norms }
    }

    /// Linear dimension of S^n(B).
    pub fn dim(&self) -> usize {
        self.multisets.len()
    }

    /// Side length m^n of the realization.
    pub fn realization_dim(&self) -> usize {
        self.m.pow(self.degree as u32).max(1)
    }

    /// Frobenius coordinates of x against the basis; x must be m^n square.
    pub fn coords(&self, x: &CMat) -> CVec {
        let mut out = CVec::zeros(self.dim());
        for (k, pos) in self.entries.iter().enumerate() {
            let mut acc = c(0.0, 0.0);
            for &(r, cc) in pos {
                acc += x[(r, cc)];
            }
            out[k] = acc / cr(self.norms[k]);
        }
        out
    }

    /// Element of S^n(B) with the given coordinates.
    pub fn reconstruct(&self, coords: &CVec) -> CMat {
        let dim = self.realization_dim();
        let mut out = CMat::zeros(dim, dim);
        for (k, pos) in self.entries.iter().enumerate() {
            let v = coords[k] / cr(self.norms[k]);
            for &(r, cc) in pos {
                out[(r, cc)] += v;
            }
        }
        out
    }

    /// Orthogonal projection of x onto S^n(B); equals the symmetrizer
    /// composed with the blockwise conditional expectation.
    pub fn project(&self, x: &CMat) -> CMat {
        self.reconstruct(&self.coords(x))
    }
}

fn collect_multisets(
    units: usize,
    degree: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == degree {
        out.push(current.clone());
        return;
    }
    for k in start..units {
        current.push(k);
        collect_multisets(units, degree, k, current, out);
        current.pop();
    }
}

fn distinct_arrangements(ms: &[usize]) -> Vec<Vec<usize>> {
    if ms.is_empty() {
        return vec![vec![]];
    }
    let mut set = BTreeSet::new();
    let perms = crate::linalg::permutations(ms.len());
    for sigma in &perms {
        let arr: Vec<usize> = sigma.iter().map(|&i| ms[i]).collect();
        set.insert(arr);
    }
    set.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Truncated exponential elements
// ---------------------------------------------------------------------------

/// Element of the truncated exponential algebra over a block C*-algebra:
/// one component of S^k(B) per degree k ≤ cap, componentwise operations.
#[derive(Clone)]
pub struct ExpElement {
    pub cap: usize,
    /// components[k] is m^k square; component 0 is a 1×1 scalar.
    pub components: Vec<CMat>,
    /// Realization size m of the base algebra.
    pub base_dim: usize,
}

impl ExpElement {
    pub fn zero(base_dim: usize, cap: usize) -> Self {
        let components =
            (0..=cap).map(|k| CMat::zeros(base_dim.pow(k as u32), base_dim.pow(k as u32))).collect();
        ExpElement { cap, components, base_dim }
    }

    pub fn mul_componentwise(&self, other: &ExpElement) -> Result<ExpElement> {
        self.check_shape(other)?;
        let components = self
            .components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a * b)
            .collect();
        Ok(ExpElement { cap: self.cap, components, base_dim: self.base_dim })
    }

    pub fn add(&self, other: &ExpElement) -> Result<ExpElement> {
        self.check_shape(other)?;
        let components =
            self.components.iter().zip(other.components.iter()).map(|(a, b)| a + b).collect();
        Ok(ExpElement { cap: self.cap, components, base_dim: self.base_dim })
    }

    pub fn scale(&self, s: f64) -> ExpElement {
        ExpElement {
            cap: self.cap,
            components: self.components.iter().map(|m| m * cr(s)).collect(),
            base_dim: self.base_dim,
        }
    }

    pub fn adjoint(&self) -> ExpElement {
        ExpElement {
            cap: self.cap,
            components: self.components.iter().map(|m| m.adjoint()).collect(),
            base_dim: self.base_dim,
        }
    }

    /// Largest symmetrizer defect across components.
    pub fn symmetry_defect(&self) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(k, b)| opnorm(&(symmetrize_matrix(b, self.base_dim, k) - b)))
            .fold(0.0, f64::max)
    }

    fn check_shape(&self, other: &ExpElement) -> Result<()> {
        if self.cap != other.cap || self.base_dim != other.base_dim {
            return Err(Error::DescriptorMismatch(format!(
                "exponential elements of cap {} base {} vs cap {} base {}",
                self.cap, self.base_dim, other.cap, other.base_dim
            )));
        }
        Ok(())
    }
}

/// Γ(a) truncated at degree cap: (1, η(a), η(a)^{⊗2}, …, η(a)^{⊗cap}).
/// Callers should hold p(a) < 1 for Γ to stay in the closed unit ball.
pub fn gamma(env: &EnvelopingMap, a: &Element, cap: usize) -> Result<ExpElement> {
    let img = env.image(a)?;
    let base_dim = img.nrows();
    let mut components = Vec::with_capacity(cap + 1);
    components.push(CMat::from_element(1, 1, cr(1.0)));
    let mut power = CMat::from_element(1, 1, cr(1.0));
    for _ in 1..=cap {
        power = power.kronecker(&img);
        components.push(power.clone());
    }
    Ok(ExpElement { cap, components, base_dim })
}

/// Truncated c₀-direct-sum norm: max over degrees of the component
/// operator norm.
pub fn exp_norm(x: &ExpElement) -> f64 {
    x.components.iter().map(opnorm).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ElemData;
    use crate::rng::fanout;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
    }

    fn supported_descriptors() -> Vec<Arc<AlgebraDescriptor>> {
        vec![
            AlgebraDescriptor::matrix(2, Field::Real),
            AlgebraDescriptor::matrix(2, Field::Complex),
            AlgebraDescriptor::matrix(1, Field::Quaternion),
            AlgebraDescriptor::unitize(&AlgebraDescriptor::matrix(2, Field::Complex)),
            AlgebraDescriptor::complexify(&AlgebraDescriptor::matrix(2, Field::Real)),
            AlgebraDescriptor::semigroup(
                Arc::new(SemigroupTable::mult01()),
                AbsoluteValue::ones(2),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn eta_is_a_star_homomorphism() {
        for d in supported_descriptors() {
            let env = envelope(&d).unwrap();
            for trial in 0..50 {
                let mut rng = fanout(10, "envelope-hom", trial);
                let a = Element::random(&d, &mut rng);
                let b = Element::random(&d, &mut rng);
                let img_ab = env.image(&a.mul(&b).unwrap()).unwrap();
                let prod = env.image(&a).unwrap() * env.image(&b).unwrap();
                let scale = 1.0 + opnorm(&prod);
                assert!(opnorm(&(img_ab - prod)) < 1e-9 * scale, "{}", d.name());
                let img_star = env.image(&a.adjoint()).unwrap();
                let adj = env.image(&a).unwrap().adjoint();
                assert!(opnorm(&(img_star - adj)) < 1e-10 * scale, "{}", d.name());
            }
        }
    }

    #[test]
    fn eta_is_contractive_for_the_seminorm() {
        for d in supported_descriptors() {
            let env = envelope(&d).unwrap();
            for trial in 0..200 {
                let mut rng = fanout(11, "envelope-contract", trial);
                let a = Element::random(&d, &mut rng);
                let norm = opnorm(&env.image(&a).unwrap());
                let p = a.seminorm();
                assert!(norm <= p * (1.0 + 1e-10), "{}: {norm} > {p}", d.name());
            }
        }
    }

    #[test]
    fn matrix_envelopes_have_expected_blocks() {
        let real = envelope(&AlgebraDescriptor::matrix(2, Field::Real)).unwrap();
        assert_eq!(real.target_blocks(), &[2]);
        let complex = envelope(&AlgebraDescriptor::matrix(2, Field::Complex)).unwrap();
        assert_eq!(complex.target_blocks(), &[2, 2]);
        let quat = envelope(&AlgebraDescriptor::matrix(2, Field::Quaternion)).unwrap();
        assert_eq!(quat.target_blocks(), &[4]);

        // complex case: second block is the entrywise conjugate
        let d = AlgebraDescriptor::matrix(2, Field::Complex);
        let mut rng = fanout(12, "envelope-blocks", 0);
        let a = Element::random(&d, &mut rng);
        let img = complex.image(&a).unwrap();
        let top = img.view((0, 0), (2, 2)).clone_owned();
        let bottom = img.view((2, 2), (2, 2)).clone_owned();
        assert!(opnorm(&(bottom - top.map(|z| z.conj()))) < 1e-12);
    }

    #[test]
    fn trivial_semigroup_has_one_character() {
        let table = Arc::new(SemigroupTable::trivial());
        let alpha = AbsoluteValue::ones(1);
        let d = AlgebraDescriptor::semigroup(table, alpha).unwrap();
        let env = envelope(&d).unwrap();
        assert_eq!(env.target_blocks(), &[1]);
        assert_eq!(env.characters.as_ref().unwrap().len(), 1);
        assert_eq!(env.characters.as_ref().unwrap()[0], vec![1i8]);
    }

    #[test]
    fn pointwise_basis_characters_are_evaluations() {
        // zero letter plus n idempotents: the characters vanishing on the
        // absorbing letter are the n coordinate evaluations; one extra
        // character sends every letter to 1
        let table = Arc::new(SemigroupTable::pointwise_basis(3));
        let alpha = AbsoluteValue::ones(4);
        let chars = characters(&table, &alpha).unwrap();
        assert_eq!(chars.len(), 4);
        let evaluations: Vec<_> = chars.iter().filter(|chi| chi[0] == 0).collect();
        assert_eq!(evaluations.len(), 3);
        for chi in &evaluations {
            assert_eq!(chi.iter().filter(|&&v| v == 1).count(), 1);
        }
        assert!(chars.iter().any(|chi| chi.iter().all(|&v| v == 1)));
    }

    #[test]
    fn noncommutative_table_rejected() {
        let d = AlgebraDescriptor::semigroup(
            Arc::new(SemigroupTable::sym3()),
            AbsoluteValue::ones(6),
        )
        .unwrap();
        assert!(matches!(envelope(&d), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unitization_compatibility_isomorphism() {
        // envelope(unitize(d)) equals the unitized target on coordinates
        for d in [
            AlgebraDescriptor::matrix(2, Field::Real),
            AlgebraDescriptor::matrix(2, Field::Complex),
        ] {
            let env = envelope(&d).unwrap();
            let du = AlgebraDescriptor::unitize(&d);
            let env_u = envelope(&du).unwrap();
            let mut rng = fanout(13, "envelope-unitize", 0);
            for _ in 0..20 {
                let a = Element::random(&d, &mut rng);
                let lambda = crate::linalg::randn(&mut rng);
                let pair =
                    Element::new(du.clone(), ElemData::Unitized(Box::new(a.data.clone()), lambda));
                let lhs = env_u.image(&pair).unwrap();
                let inner = env.image(&a).unwrap();
                let dim = inner.nrows();
                let rhs = block_diag(&[
                    inner + ceye(dim) * cr(lambda),
                    CMat::from_element(1, 1, cr(lambda)),
                ]);
                assert!(opnorm(&(lhs - rhs)) < 1e-10);
            }
        }
    }

    #[test]
    fn complexification_envelope_doubles_blocks() {
        let d = AlgebraDescriptor::complexify(&AlgebraDescriptor::matrix(2, Field::Real));
        let env = envelope(&d).unwrap();
        assert_eq!(env.target_blocks(), &[2, 2]);
        // (x, y) maps to (x + iy, x − iy)
        let inner = AlgebraDescriptor::matrix(2, Field::Real);
        let mut rng = fanout(14, "envelope-cplx", 0);
        let x = Element::random(&inner, &mut rng);
        let y = Element::random(&inner, &mut rng);
        let z = Element::new(
            d.clone(),
            ElemData::Pair(Box::new(x.data.clone()), Box::new(y.data.clone())),
        );
        let img = env.image(&z).unwrap();
        let i = c(0.0, 1.0);
        let expect_top = x.matrix().unwrap() + y.matrix().unwrap() * i;
        let top = img.view((0, 0), (2, 2)).clone_owned();
        assert!(opnorm(&(top - expect_top)) < 1e-12);
    }

    #[test]
    fn tensor_product_dimensions() {
        let a = AlgebraDescriptor::matrix(2, Field::Real);
        let b = AlgebraDescriptor::matrix(3, Field::Real);
        let t = tensor_product(&[a.clone(), b]).unwrap();
        assert_eq!(t.realization_dim, 6);

        // p(a⊗b) = ‖a‖·‖b‖ and η⊗η matches Kronecker of images
        let env = envelope(&a).unwrap();
        let mut rng = fanout(15, "envelope-tensor", 0);
        let x = Element::random(&a, &mut rng);
        let y = Element::random(&a, &mut rng);
        let t2 = tensor_product(&[a.clone(), a.clone()]).unwrap();
        let kron = x.matrix().unwrap().kronecker(y.matrix().unwrap());
        let elem = Element::from_matrix(&t2, kron.clone()).unwrap();
        assert!(close(elem.seminorm(), x.seminorm() * y.seminorm()));
        let img_kron = env.image(&x).unwrap().kronecker(&env.image(&y).unwrap());
        assert!(opnorm(&(kron - img_kron)) < 1e-12);
    }

    #[test]
    fn symmetrizer_properties() {
        let a_desc = AlgebraDescriptor::matrix(2, Field::Complex);
        let t2 = tensor_product(&[a_desc.clone(), a_desc.clone()]).unwrap();
        let mut rng = fanout(16, "envelope-symmetrize", 0);
        let a = Element::random(&a_desc, &mut rng);
        let b = Element::random(&a_desc, &mut rng);
        let am = a.matrix().unwrap();
        let bm = b.matrix().unwrap();

        // a⊗a is fixed
        let aa = Element::from_matrix(&t2, am.kronecker(am)).unwrap();
        assert!(symmetrize(&aa).unwrap().distance(&aa).unwrap() < 1e-12);

        // a⊗b averages to (a⊗b + b⊗a)/2
        let ab = Element::from_matrix(&t2, am.kronecker(bm)).unwrap();
        let sym = symmetrize(&ab).unwrap();
        let expect = (am.kronecker(bm) + bm.kronecker(am)) * cr(0.5);
        assert!(opnorm(&(sym.matrix().unwrap() - expect)) < 1e-12);

        // idempotence on random tensors
        let x = Element::random(&t2, &mut rng);
        let q1 = symmetrize(&x).unwrap();
        let q2 = symmetrize(&q1).unwrap();
        assert!(q1.distance(&q2).unwrap() < 1e-10);

        // *-preserving
        let qs = symmetrize(&x.adjoint()).unwrap();
        assert!(qs.distance(&q1.adjoint()).unwrap() < 1e-10);
    }

    #[test]
    fn symmetric_power_dimensions() {
        // degree 0 is the scalars
        let d = AlgebraDescriptor::matrix(3, Field::Complex);
        let s0 = symmetric_power(&d, 0).unwrap();
        assert_eq!(s0.realization_dim, 1);
        assert_eq!(SymBasis::full(3, 0).dim(), 1);

        // S²(M₂(ℂ)) has linear dimension 10
        assert_eq!(SymBasis::full(2, 2).dim(), 10);

        // block algebra: S²(M₂⊕M₂) has C(8+1, 2) = 36
        assert_eq!(SymBasis::blocks(&[2, 2], 2).dim(), 36);

        // a^{⊗n} lies in S^n for random a
        let mut rng = fanout(17, "envelope-sympow", 0);
        let basis = SymBasis::full(2, 3);
        let d2 = AlgebraDescriptor::matrix(2, Field::Complex);
        let a = Element::random(&d2, &mut rng);
        let am = a.matrix().unwrap();
        let cube = am.kronecker(am).kronecker(am);
        assert!(opnorm(&(basis.project(&cube) - &cube)) < 1e-9 * (1.0 + opnorm(&cube)));
    }

    #[test]
    fn sym_basis_is_orthonormal_and_projects() {
        let basis = SymBasis::blocks(&[2, 1], 2);
        for k in 0..basis.dim() {
            let mut coords = CVec::zeros(basis.dim());
            coords[k] = cr(1.0);
            let u = basis.reconstruct(&coords);
            let back = basis.coords(&u);
            for j in 0..basis.dim() {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((back[j] - cr(expect)).norm() < 1e-12);
            }
        }
        // projection is idempotent and symmetrizer-compatible
        let mut rng = fanout(18, "envelope-symbasis", 0);
        let x = crate::linalg::ginibre(&mut rng, 9, 9);
        let p1 = basis.project(&x);
        let p2 = basis.project(&p1);
        assert!(opnorm(&(&p1 - &p2)) < 1e-10);
        let sym = symmetrize_matrix(&p1, 3, 2);
        assert!(opnorm(&(sym - &p1)) < 1e-10);
    }

    #[test]
    fn gamma_examples() {
        // scalar t = 0.5, cap 3 → (1, 0.5, 0.25, 0.125)
        let d = AlgebraDescriptor::matrix(1, Field::Real);
        let env = envelope(&d).unwrap();
        let a = Element::from_matrix(&d, CMat::from_element(1, 1, cr(0.5))).unwrap();
        let g = gamma(&env, &a, 3).unwrap();
        let expect = [1.0, 0.5, 0.25, 0.125];
        for (k, e) in expect.iter().enumerate() {
            assert!((g.components[k][(0, 0)] - cr(*e)).norm() < 1e-15);
        }
        assert!(close(exp_norm(&g), 1.0));

        // zero element
        let z = Element::zero(&d);
        let gz = gamma(&env, &z, 3).unwrap();
        assert!(close(exp_norm(&gz), 1.0));
        for k in 1..=3 {
            assert_eq!(gz.components[k][(0, 0)], cr(0.0));
        }

        // componentwise product law on matrices
        let d2 = AlgebraDescriptor::matrix(2, Field::Real);
        let env2 = envelope(&d2).unwrap();
        let mut rng = fanout(19, "envelope-gamma", 0);
        let x = Element::random_in_ball(&d2, &mut rng, 0.7);
        let y = Element::random_in_ball(&d2, &mut rng, 0.7);
        let gx = gamma(&env2, &x, 3).unwrap();
        let gy = gamma(&env2, &y, 3).unwrap();
        let gxy = gamma(&env2, &x.mul(&y).unwrap(), 3).unwrap();
        let prod = gx.mul_componentwise(&gy).unwrap();
        for k in 0..=3 {
            let diff = opnorm(&(&gxy.components[k] - &prod.components[k]));
            assert!(diff < 1e-10, "degree {k}: {diff}");
        }
        assert!(gx.symmetry_defect() < 1e-12);

        // exp_norm picks out a lone component
        let mut lone = ExpElement::zero(2, 3);
        lone.components[1] = x.matrix().unwrap().clone();
        assert!(close(exp_norm(&lone), x.seminorm()));
        assert!(close(exp_norm(&ExpElement::zero(2, 3)), 0.0));
    }

    #[test]
    fn degenerate_absolute_value_kills_letters() {
        // α(second idempotent) = 0 forces every character to vanish there
        let table = Arc::new(SemigroupTable::pointwise_basis(2));
        let alpha = AbsoluteValue::new(vec![0.0, 1.0, 0.0], &table).unwrap();
        let chars = characters(&table, &alpha).unwrap();
        assert_eq!(chars.len(), 1);
        assert_eq!(chars[0], vec![0i8, 1, 0]);
    }
}

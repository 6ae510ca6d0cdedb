//! Finite *-semigroup tables and absolute values.
//!
//! A table stores the full multiplication law of a finite *-semigroup: a
//! `letters × letters` product matrix, an involution permutation, optional
//! unit and zero letters, and an optional scaling action sampling a central
//! homomorphism `γ: (0,1] → S` on a grid of `r` values.
//!
//! An [`AbsoluteValue`] is a nonnegative weight `α` with `α(s*) = α(s)` and
//! `α(st) ≤ α(s)α(t)`; it is both the seminorm data of the semigroup algebra
//! `ℝ[S]` and the bound data for α-bounded positive definite functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampled scaling action: `letter[k]` realizes `γ(r[k])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingGrid {
    pub r: Vec<f64>,
    pub letter: Vec<usize>,
}

/// Multiplication table of a finite *-semigroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupTable {
    pub letters: usize,
    /// Row-major products: `mul[s * letters + t] = s·t`.
    pub mul: Vec<usize>,
    /// Involution permutation.
    pub inv: Vec<usize>,
    pub unit: Option<usize>,
    pub zero: Option<usize>,
    pub names: Vec<String>,
    pub scaling: Option<ScalingGrid>,
}

impl SemigroupTable {
    pub fn new(letters: usize, mul: Vec<usize>, inv: Vec<usize>) -> Result<Self> {
        let names = (0..letters).map(|i| format!("s{i}")).collect();
        let mut t = SemigroupTable { letters, mul, inv, unit: None, zero: None, names, scaling: None };
        t.detect_unit_and_zero();
        t.validate()?;
        Ok(t)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.letters);
        self.names = names;
        self
    }

    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.mul[s * self.letters + t]
    }

    pub fn inv(&self, s: usize) -> usize {
        self.inv[s]
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.letters).all(|s| (0..self.letters).all(|t| self.mul(s, t) == self.mul(t, s)))
    }

    fn detect_unit_and_zero(&mut self) {
        self.unit = (0..self.letters)
            .find(|&e| (0..self.letters).all(|s| self.mul(e, s) == s && self.mul(s, e) == s));
        self.zero = (0..self.letters)
            .find(|&z| (0..self.letters).all(|s| self.mul(z, s) == z && self.mul(s, z) == z));
    }

    /// Checks associativity, the involution laws, unit/zero laws, and the
    /// scaling-grid compatibility `γ(r)γ(r′) = γ(rr′)` for products that
    /// land back on the grid.
    pub fn validate(&self) -> Result<()> {
        let n = self.letters;
        if n == 0 {
            return Err(Error::InvalidTable("empty letter set".into()));
        }
        if self.mul.len() != n * n || self.inv.len() != n || self.names.len() != n {
            return Err(Error::InvalidTable("field lengths inconsistent with letter count".into()));
        }
        if let Some(x) = self.mul.iter().chain(self.inv.iter()).find(|&&x| x >= n) {
            return Err(Error::InvalidTable(format!("letter index {x} out of range")));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let left = self.mul(self.mul(a, b), c);
                    let right = self.mul(a, self.mul(b, c));
                    if left != right {
                        return Err(Error::InvalidTable(format!(
                            "associativity fails on ({}, {}, {}): ({}·{})·{} = {} but {}·({}·{}) = {}",
                            self.names[a], self.names[b], self.names[c],
                            self.names[a], self.names[b], self.names[c], self.names[left],
                            self.names[a], self.names[b], self.names[c], self.names[right],
                        )));
                    }
                }
            }
        }
        for s in 0..n {
            if self.inv(self.inv(s)) != s {
                return Err(Error::InvalidTable(format!("involution not involutive at {}", self.names[s])));
            }
            for t in 0..n {
                if self.inv(self.mul(s, t)) != self.mul(self.inv(t), self.inv(s)) {
                    return Err(Error::InvalidTable(format!(
                        "involution is not an antiautomorphism on ({}, {})",
                        self.names[s], self.names[t]
                    )));
                }
            }
        }
        if let Some(e) = self.unit {
            if (0..n).any(|s| self.mul(e, s) != s || self.mul(s, e) != s) {
                return Err(Error::InvalidTable("declared unit is not neutral".into()));
            }
        }
        if let Some(z) = self.zero {
            if (0..n).any(|s| self.mul(z, s) != z || self.mul(s, z) != z) {
                return Err(Error::InvalidTable("declared zero does not absorb".into()));
            }
        }
        if let Some(g) = &self.scaling {
            if g.r.len() != g.letter.len() {
                return Err(Error::InvalidTable("scaling grid lengths differ".into()));
            }
            if g.r.iter().any(|&r| !(0.0 < r && r <= 1.0)) {
                return Err(Error::InvalidTable("scaling grid r-values must lie in (0, 1]".into()));
            }
            if g.letter.iter().any(|&l| l >= n) {
                return Err(Error::InvalidTable("scaling grid letter out of range".into()));
            }
            for (i, &ri) in g.r.iter().enumerate() {
                for (j, &rj) in g.r.iter().enumerate() {
                    let prod = ri * rj;
                    if let Some(k) = g.r.iter().position(|&rk| (rk - prod).abs() <= 1e-12) {
                        if self.mul(g.letter[i], g.letter[j]) != g.letter[k] {
                            return Err(Error::InvalidTable(format!(
                                "scaling action incompatible: γ({ri})γ({rj}) ≠ γ({prod})"
                            )));
                        }
                    }
                }
            }
            // γ must be central and *-fixed where sampled
            for &l in &g.letter {
                if self.inv(l) != l {
                    return Err(Error::InvalidTable("scaling letters must be *-fixed".into()));
                }
                if (0..n).any(|s| self.mul(l, s) != self.mul(s, l)) {
                    return Err(Error::InvalidTable("scaling letters must be central".into()));
                }
            }
        }
        Ok(())
    }

    // -- constructions ------------------------------------------------------

    /// The one-letter trivial monoid `{1}`.
    pub fn trivial() -> Self {
        Self::new(1, vec![0], vec![0]).expect("valid").with_names(vec!["1".into()])
    }

    /// Cyclic group of order `k` with group-inverse involution.
    pub fn cyclic(k: usize) -> Self {
        assert!(k >= 1);
        let mut mul = vec![0usize; k * k];
        for a in 0..k {
            for b in 0..k {
                mul[a * k + b] = (a + b) % k;
            }
        }
        let inv = (0..k).map(|a| (k - a) % k).collect();
        let names = (0..k).map(|a| format!("g{a}")).collect();
        Self::new(k, mul, inv).expect("valid").with_names(names)
    }

    /// The multiplicative monoid `{0, 1}` (letter 0 is the zero).
    pub fn mult01() -> Self {
        // letters: 0 ↦ "z", 1 ↦ "e"
        Self::new(2, vec![0, 0, 0, 1], vec![0, 1])
            .expect("valid")
            .with_names(vec!["z".into(), "e".into()])
    }

    /// Symmetric group S₃ with group-inverse involution.
    pub fn sym3() -> Self {
        let perms = crate::linalg::permutations(3);
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> {
            // (p∘q)(x) = p(q(x))
            (0..3).map(|x| p[q[x]]).collect()
        };
        let idx = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let k = perms.len();
        let mut mul = vec![0usize; k * k];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                mul[a * k + b] = idx(&compose(pa, pb));
            }
        }
        let inv = perms
            .iter()
            .map(|p| {
                let mut q = vec![0usize; 3];
                for (i, &pi) in p.iter().enumerate() {
                    q[pi] = i;
                }
                idx(&q)
            })
            .collect();
        let names = perms.iter().map(|p| format!("p{}{}{}", p[0], p[1], p[2])).collect();
        Self::new(k, mul, inv).expect("valid").with_names(names)
    }

    /// Direct product with componentwise operations.
    pub fn product(a: &SemigroupTable, b: &SemigroupTable) -> Self {
        let n = a.letters * b.letters;
        let pack = |s: usize, t: usize| s * b.letters + t;
        let mut mul = vec![0usize; n * n];
        for s1 in 0..a.letters {
            for t1 in 0..b.letters {
                for s2 in 0..a.letters {
                    for t2 in 0..b.letters {
                        mul[pack(s1, t1) * n + pack(s2, t2)] = pack(a.mul(s1, s2), b.mul(t1, t2));
                    }
                }
            }
        }
        let mut inv = vec![0usize; n];
        let mut names = vec![String::new(); n];
        for s in 0..a.letters {
            for t in 0..b.letters {
                inv[pack(s, t)] = pack(a.inv(s), b.inv(t));
                names[pack(s, t)] = format!("{}.{}", a.names[s], b.names[t]);
            }
        }
        Self::new(n, mul, inv).expect("valid").with_names(names)
    }

    /// Adjoins an absorbing zero as a new last letter.
    pub fn adjoin_zero(&self) -> Self {
        let n = self.letters + 1;
        let z = n - 1;
        let mut mul = vec![z; n * n];
        for s in 0..self.letters {
            for t in 0..self.letters {
                mul[s * n + t] = self.mul(s, t);
            }
        }
        let mut inv: Vec<usize> = self.inv.clone();
        inv.push(z);
        let mut names = self.names.clone();
        names.push("0".into());
        Self::new(n, mul, inv).expect("valid").with_names(names)
    }

    /// Adjoins a unit as a new last letter (even if one already exists).
    pub fn adjoin_unit(&self) -> Self {
        let n = self.letters + 1;
        let e = n - 1;
        let mut mul = vec![0usize; n * n];
        for s in 0..n {
            for t in 0..n {
                mul[s * n + t] = if s == e {
                    t
                } else if t == e {
                    s
                } else {
                    self.mul(s, t)
                };
            }
        }
        let mut inv: Vec<usize> = self.inv.clone();
        inv.push(e);
        let mut names = self.names.clone();
        names.push("1".into());
        Self::new(n, mul, inv).expect("valid").with_names(names)
    }

    /// Idempotent letters `e₁…e_N` with `e_i e_j = 0` for `i ≠ j`, plus the
    /// zero; the product structure of the standard basis of pointwise `ℝ^N`.
    pub fn pointwise_basis(n: usize) -> Self {
        assert!(n >= 1);
        let k = n + 1;
        let mut mul = vec![0usize; k * k];
        for i in 1..k {
            mul[i * k + i] = i;
        }
        let inv = (0..k).collect();
        let mut names = vec!["0".to_string()];
        names.extend((1..k).map(|i| format!("e{i}")));
        Self::new(k, mul, inv).expect("valid").with_names(names)
    }
}

/// Submultiplicative involution-invariant weight on a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsoluteValue {
    pub weights: Vec<f64>,
}

impl AbsoluteValue {
    pub fn ones(letters: usize) -> Self {
        AbsoluteValue { weights: vec![1.0; letters] }
    }

    pub fn new(weights: Vec<f64>, table: &SemigroupTable) -> Result<Self> {
        let a = AbsoluteValue { weights };
        a.validate(table)?;
        Ok(a)
    }

    pub fn get(&self, s: usize) -> f64 {
        self.weights[s]
    }

    pub fn validate(&self, table: &SemigroupTable) -> Result<()> {
        if self.weights.len() != table.letters {
            return Err(Error::InvalidAbsoluteValue("weight count differs from letter count".into()));
        }
        if let Some(w) = self.weights.iter().find(|&&w| !(w >= 0.0)) {
            return Err(Error::InvalidAbsoluteValue(format!("negative or NaN weight {w}")));
        }
        for s in 0..table.letters {
            if (self.get(table.inv(s)) - self.get(s)).abs() > 1e-12 * self.get(s).max(1.0) {
                return Err(Error::InvalidAbsoluteValue(format!(
                    "α({}) ≠ α({}*)",
                    table.names[s], table.names[s]
                )));
            }
            for t in 0..table.letters {
                let lhs = self.get(table.mul(s, t));
                let rhs = self.get(s) * self.get(t);
                if lhs > rhs * (1.0 + 1e-12) {
                    return Err(Error::InvalidAbsoluteValue(format!(
                        "submultiplicativity fails on ({}, {}): α({}) = {} > {}",
                        table.names[s],
                        table.names[t],
                        table.names[table.mul(s, t)],
                        lhs,
                        rhs
                    )));
                }
            }
        }
        Ok(())
    }
}

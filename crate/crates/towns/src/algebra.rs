//! Exact linear algebra over quadratic extensions of small prime fields.
//!
//! For an odd prime `p` the field GF(p^2) is realised as `GF(p)[x]/(x^2 - r)`
//! with `r` the smallest quadratic non-residue mod `p`. Every base-field
//! element then has a square root in the extension, which is what lets us
//! attach an α-characteristic vector to each member of a family: the 0/1
//! indicator of the set followed by one extra coordinate `α` with
//! `α^2 + b ≡ 0 (mod p)`.
//!
//! Two certificates are built on these vectors:
//!
//! * [`independence_certificate`]: when `p ∤ (a-b)`, the Gram matrix of the
//!   α-vectors of a valid town is `(a-b)·I`, so the vectors are linearly
//!   independent and the family has at most `n` members. The certificate
//!   recomputes the rank from scratch and holds iff it equals the family size.
//! * [`isotropy_certificate`]: when `a ≡ b (mod p)`, all products (self and
//!   pairwise) vanish, the span is totally isotropic and its dimension is at
//!   most `⌊(n+1)/2⌋`; counting 0/1 vectors in the span caps the family at
//!   `2^dim`.

use serde_json::json;

use crate::setcore::Family;
use crate::{Error, Result};

/// Deterministic primality by trial division; the moduli here are tiny.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % p) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Smallest quadratic non-residue mod an odd prime `p`, i.e. the least `r ≥ 2`
/// with `r^((p-1)/2) ≡ -1 (mod p)`.
pub fn find_nonresidue(p: u64) -> Result<u64> {
    if !is_prime(p) || p == 2 {
        return Err(Error::InvalidParameter(format!("need an odd prime, got {p}")));
    }
    for r in 2..p {
        if pow_mod(r, (p - 1) / 2, p) == p - 1 {
            return Ok(r);
        }
    }
    unreachable!("every odd prime has a non-residue below p")
}

/// An element `c0 + c1·x` of GF(p^2); the field context supplies `p` and `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadExtScalar {
    pub c0: u64,
    pub c1: u64,
}

impl QuadExtScalar {
    pub const ZERO: QuadExtScalar = QuadExtScalar { c0: 0, c1: 0 };

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn is_one(&self) -> bool {
        self.c0 == 1 && self.c1 == 0
    }
}

impl std::fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.c0, self.c1) {
            (c0, 0) => write!(f, "{c0}"),
            (0, 1) => write!(f, "x"),
            (0, c1) => write!(f, "{c1}x"),
            (c0, 1) => write!(f, "{c0}+x"),
            (c0, c1) => write!(f, "{c0}+{c1}x"),
        }
    }
}

/// GF(p^2) as `GF(p)[x]/(x^2 - r)` for an odd prime `p` and the smallest
/// non-residue `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadExt {
    p: u64,
    r: u64,
}

impl QuadExt {
    pub fn new(p: u64) -> Result<Self> {
        let r = find_nonresidue(p)?;
        Ok(QuadExt { p, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn scalar(&self, c0: u64, c1: u64) -> QuadExtScalar {
        QuadExtScalar { c0: c0 % self.p, c1: c1 % self.p }
    }

    pub fn from_base(&self, v: u64) -> QuadExtScalar {
        self.scalar(v, 0)
    }

    pub fn add(&self, a: QuadExtScalar, b: QuadExtScalar) -> QuadExtScalar {
        QuadExtScalar { c0: (a.c0 + b.c0) % self.p, c1: (a.c1 + b.c1) % self.p }
    }

    pub fn neg(&self, a: QuadExtScalar) -> QuadExtScalar {
        QuadExtScalar { c0: (self.p - a.c0) % self.p, c1: (self.p - a.c1) % self.p }
    }

    pub fn sub(&self, a: QuadExtScalar, b: QuadExtScalar) -> QuadExtScalar {
        self.add(a, self.neg(b))
    }

    /// `(a0 + a1 x)(b0 + b1 x) = a0 b0 + r a1 b1 + (a0 b1 + a1 b0) x`.
    pub fn mul(&self, a: QuadExtScalar, b: QuadExtScalar) -> QuadExtScalar {
        let p = self.p as u128;
        let c0 = (a.c0 as u128 * b.c0 as u128 + self.r as u128 * a.c1 as u128 * b.c1 as u128) % p;
        let c1 = (a.c0 as u128 * b.c1 as u128 + a.c1 as u128 * b.c0 as u128) % p;
        QuadExtScalar { c0: c0 as u64, c1: c1 as u64 }
    }

    /// Inverse via the norm `c0^2 - r c1^2`, which is nonzero in GF(p) for
    /// any nonzero element. Returns `None` for zero.
    pub fn inv(&self, a: QuadExtScalar) -> Option<QuadExtScalar> {
        if a.is_zero() {
            return None;
        }
        let p = self.p as u128;
        let c0sq = a.c0 as u128 * a.c0 as u128 % p;
        let rc1sq = self.r as u128 * a.c1 as u128 % p * a.c1 as u128 % p;
        let norm = ((c0sq + p - rc1sq) % p) as u64;
        debug_assert_ne!(norm, 0, "norm vanishes only at zero");
        let ninv = pow_mod(norm, self.p - 2, self.p);
        // conjugate / norm
        Some(QuadExtScalar {
            c0: (a.c0 as u128 * ninv as u128 % p) as u64,
            c1: ((self.p - a.c1) as u128 * ninv as u128 % p) as u64,
        })
    }

    /// A square root in GF(p^2) of the base-field element `v`. Both roots
    /// `±α` exist; the one with lexicographically smallest `(c1, c0)` is
    /// returned, so results are reproducible.
    pub fn sqrt_of(&self, v: u64) -> QuadExtScalar {
        let v = v % self.p;
        if v == 0 {
            return QuadExtScalar::ZERO;
        }
        if pow_mod(v, (self.p - 1) / 2, self.p) == 1 {
            // Residue: a base-field root exists.
            let t = (1..self.p).find(|&t| t * t % self.p == v).expect("residue has a root");
            return QuadExtScalar { c0: t.min(self.p - t), c1: 0 };
        }
        // Non-residue: v/r is a residue, and (w x)^2 = w^2 r = v for w^2 = v/r.
        let rinv = pow_mod(self.r, self.p - 2, self.p);
        let target = v as u128 * rinv as u128 % self.p as u128;
        let w = (1..self.p)
            .find(|&w| (w as u128 * w as u128) % self.p as u128 == target)
            .expect("v/r is a residue");
        QuadExtScalar { c0: 0, c1: w.min(self.p - w) }
    }

    /// Dot product of two equal-length vectors (no conjugation).
    pub fn dot(&self, u: &[QuadExtScalar], v: &[QuadExtScalar]) -> QuadExtScalar {
        debug_assert_eq!(u.len(), v.len());
        let mut acc = QuadExtScalar::ZERO;
        for (a, b) in u.iter().zip(v.iter()) {
            acc = self.add(acc, self.mul(*a, *b));
        }
        acc
    }
}

/// The α-characteristic vector of a set: `n` indicator entries and a final
/// coordinate equal to α.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaVector {
    entries: Vec<QuadExtScalar>,
}

impl AlphaVector {
    pub fn entries(&self) -> &[QuadExtScalar] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The α-vectors of a family together with the field data that produced them.
#[derive(Debug, Clone)]
pub struct AlphaSystem {
    pub field: QuadExt,
    pub alpha: QuadExtScalar,
    pub vectors: Vec<AlphaVector>,
}

/// Builds α-characteristic vectors for every member. Requires an odd prime
/// `p` dividing the family's modulus; α is chosen with `α^2 ≡ -b (mod p)`.
pub fn alpha_vectors(family: &Family, p: u64) -> Result<AlphaSystem> {
    let spec = family.spec();
    let field = QuadExt::new(p)?;
    if spec.k() % p != 0 {
        return Err(Error::InvalidParameter(format!(
            "p = {p} does not divide the modulus k = {}",
            spec.k()
        )));
    }
    let b = spec.b() % p;
    let alpha = field.sqrt_of((p - b) % p);
    let n = spec.n();
    let one = field.from_base(1);
    let vectors = family
        .members()
        .iter()
        .map(|m| {
            let mut entries = Vec::with_capacity(n + 1);
            for e in 1..=n {
                entries.push(if m.contains(e) { one } else { QuadExtScalar::ZERO });
            }
            entries.push(alpha);
            AlphaVector { entries }
        })
        .collect();
    Ok(AlphaSystem { field, alpha, vectors })
}

/// Dense row-major matrix over GF(p^2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QuadExtScalar>,
}

impl QuadMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QuadMatrix { rows, cols, data: vec![QuadExtScalar::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<QuadExtScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        QuadMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> QuadExtScalar {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: QuadExtScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(QuadExtScalar::is_zero)
    }

    /// Exact rank by Gaussian elimination over the field.
    pub fn rank(&self, field: &QuadExt) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&i| !m.get(i, col).is_zero());
            let Some(pivot) = pivot else { continue };
            for j in 0..m.cols {
                let tmp = m.get(rank, j);
                m.set(rank, j, m.get(pivot, j));
                m.set(pivot, j, tmp);
            }
            let inv = field.inv(m.get(rank, col)).expect("pivot is nonzero");
            for j in col..m.cols {
                let v = field.mul(m.get(rank, j), inv);
                m.set(rank, j, v);
            }
            for i in rank + 1..m.rows {
                let factor = m.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = field.sub(m.get(i, j), field.mul(factor, m.get(rank, j)));
                    m.set(i, j, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Gram matrix `G[i][j] = <v_i, v_j>` of a list of equal-length vectors.
pub fn gram_matrix(field: &QuadExt, vectors: &[AlphaVector]) -> QuadMatrix {
    let m = vectors.len();
    let mut g = QuadMatrix::zero(m, m);
    for i in 0..m {
        for j in i..m {
            let v = field.dot(vectors[i].entries(), vectors[j].entries());
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    g
}

fn vector_matrix(system: &AlphaSystem) -> QuadMatrix {
    QuadMatrix::from_rows(system.vectors.iter().map(|v| v.entries.clone()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// Rank equals family size: the α-vectors are linearly independent, so
    /// the family size is at most `n` (each vector is orthogonal to a fixed
    /// nonzero vector, pinning the span into a hyperplane).
    Independence,
    /// All products vanish: the span is totally isotropic, its dimension at
    /// most `⌊(n+1)/2⌋`, and the family has at most `2^dim` members.
    Isotropy,
}

/// Outcome of a certificate computation. `rank` is the rank of the stacked
/// α-vector matrix (the span dimension); `holds` is the verified claim.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub p: u64,
    pub r: u64,
    pub alpha: QuadExtScalar,
    pub rank: usize,
    pub size: usize,
    pub holds: bool,
    /// Isotropy only: the dimension cap `⌊(n+1)/2⌋`.
    pub dim_bound: Option<usize>,
}

impl Certificate {
    /// Fixed-shape JSON rendering (keys sorted by serde_json) for diffing.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "r": self.r,
            "alpha": [self.alpha.c0, self.alpha.c1],
            "rank": self.rank,
            "size": self.size,
            "holds": self.holds,
        })
    }
}

/// Certifies linear independence of the α-vectors. Requires an odd prime `p`
/// dividing `k` with `a ≢ b (mod p)`; for a valid town the Gram matrix is
/// `(a-b)·I`, hence `holds` with `rank = |F|`. A family that violates the
/// town conditions may come back with `rank < |F|` and `holds = false`.
pub fn independence_certificate(family: &Family, p: u64) -> Result<Certificate> {
    let spec = family.spec();
    if (spec.a() % p) == (spec.b() % p) {
        return Err(Error::InvalidParameter(format!(
            "independence certificate needs a ≢ b mod p; got a={} b={} p={p}",
            spec.a(),
            spec.b()
        )));
    }
    let system = alpha_vectors(family, p)?;
    let rank = vector_matrix(&system).rank(&system.field);
    Ok(Certificate {
        kind: CertificateKind::Independence,
        p,
        r: system.field.r(),
        alpha: system.alpha,
        rank,
        size: family.len(),
        holds: rank == family.len(),
        dim_bound: None,
    })
}

/// Certifies total isotropy of the α-vector span. Requires an odd prime `p`
/// dividing `k` with `a ≡ b (mod p)`; α satisfies `α^2 = -(a mod p)`. Holds
/// iff every self and pairwise product vanishes, the span dimension is at
/// most `⌊(n+1)/2⌋`, and `|F| ≤ 2^dim`.
pub fn isotropy_certificate(family: &Family, p: u64) -> Result<Certificate> {
    let spec = family.spec();
    if (spec.a() % p) != (spec.b() % p) {
        return Err(Error::InvalidParameter(format!(
            "isotropy certificate needs a ≡ b mod p; got a={} b={} p={p}",
            spec.a(),
            spec.b()
        )));
    }
    let system = alpha_vectors(family, p)?;
    let gram = gram_matrix(&system.field, &system.vectors);
    let rank = vector_matrix(&system).rank(&system.field);
    let dim_bound = (spec.n() + 1) / 2;
    let count_ok = rank >= 64 || family.len() as u128 <= 1u128 << rank;
    Ok(Certificate {
        kind: CertificateKind::Isotropy,
        p,
        r: system.field.r(),
        alpha: system.alpha,
        rank,
        size: family.len(),
        holds: gram.is_zero() && rank <= dim_bound && count_ok,
        dim_bound: Some(dim_bound),
    })
}

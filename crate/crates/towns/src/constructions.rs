//! Generators for town families, plus the Hadamard matrices they build on.
//!
//! Every generator returns a family that passes [`Family::check_town`] for
//! its declared parameters; the tests enforce this across parameter grids.

use crate::setcore::{Family, SetWord, TownSpec};
use crate::{algebra, Error, Result};

/// A ±1 matrix `H` with `H·Hᵀ = order·I`, normalized so the first row and
/// first column are all `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    order: usize,
    rows: Vec<Vec<i8>>,
}

impl HadamardMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.rows[i][j]
    }

    /// 0-based columns where row `i` is `+1`.
    pub fn positive_support(&self, i: usize) -> Vec<usize> {
        (0..self.order).filter(|&j| self.rows[i][j] > 0).collect()
    }

    /// 0-based columns where row `i` is `-1`.
    pub fn negative_support(&self, i: usize) -> Vec<usize> {
        (0..self.order).filter(|&j| self.rows[i][j] < 0).collect()
    }

    fn is_hadamard(&self) -> bool {
        let n = self.order as i64;
        for i in 0..self.order {
            for j in 0..self.order {
                let dot: i64 = (0..self.order)
                    .map(|c| self.rows[i][c] as i64 * self.rows[j][c] as i64)
                    .sum();
                if dot != if i == j { n } else { 0 } {
                    return false;
                }
            }
        }
        true
    }
}

/// Quadratic-character construction of a Hadamard matrix of order `q + 1`
/// for a prime `q ≡ 3 (mod 4)`: the skew core `S[i][j] = χ(j - i)` bordered
/// by ones, shifted by the identity, then row-normalized. The result is
/// verified against `H·Hᵀ = (q+1)·I` before it is returned.
pub fn paley_hadamard(q: u64) -> Result<HadamardMatrix> {
    if !algebra::is_prime(q) || q % 4 != 3 {
        return Err(Error::InvalidParameter(format!("need a prime q ≡ 3 (mod 4), got {q}")));
    }
    let qi = q as i64;
    // χ(x): 0 at 0, +1 on squares, -1 otherwise.
    let mut chi = vec![-1i8; q as usize];
    chi[0] = 0;
    for t in 1..qi {
        chi[((t * t) % qi) as usize] = 1;
    }
    let order = q as usize + 1;
    let mut rows = vec![vec![0i8; order]; order];
    for j in 1..order {
        rows[0][j] = 1;
        rows[j][0] = -1;
    }
    for i in 1..order {
        for j in 1..order {
            rows[i][j] = chi[(j as i64 - i as i64).rem_euclid(qi) as usize];
        }
    }
    for i in 0..order {
        rows[i][i] += 1;
    }
    // Flip rows starting with -1 so the first column matches the first row.
    for row in rows.iter_mut() {
        if row[0] < 0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }
    let h = HadamardMatrix { order, rows };
    debug_assert!(h.is_hadamard());
    if !h.is_hadamard() {
        return Err(Error::InvalidParameter(format!("construction failed for q = {q}")));
    }
    Ok(h)
}

/// The block family: a core `{1..m}` together with every union of disjoint
/// consecutive `k`-blocks above it. Produces `2^⌊(n-m)/k⌋` members forming an
/// `(m,m)`-town mod `k` (sizes and intersections are `m` plus multiples of `k`).
pub fn block_construction(m: u64, k: u64, n: usize) -> Result<Family> {
    if m >= k {
        return Err(Error::InvalidParameter(format!("core size must satisfy m < k, got m={m} k={k}")));
    }
    if m as usize > n {
        return Err(Error::InvalidParameter(format!("core {{1..{m}}} does not fit in [{n}]")));
    }
    let spec = TownSpec::new(n, k, m, m)?;
    let m = m as usize;
    let k = k as usize;
    let mut core = SetWord::empty(n);
    for e in 1..=m {
        core.insert(e);
    }
    let blocks = (n - m) / k;
    let mut members = Vec::with_capacity(1 << blocks);
    for mask in 0u64..(1u64 << blocks) {
        let mut s = core.clone();
        for i in 0..blocks {
            if mask >> i & 1 == 1 {
                for e in m + i * k + 1..=m + (i + 1) * k {
                    s.insert(e);
                }
            }
        }
        members.push(s);
    }
    Family::new(spec, members)
}

/// The Hadamard-product family mod 3: split the first `12·⌊n/12⌋` points into
/// blocks of 12; inside a block the 24 candidates are the positive and
/// negative supports of the rows of the order-12 Hadamard matrix (sizes 12,
/// 0, and 6, all ≡ 0; any two overlap in 0, 3, 6 or 12 points, all ≡ 0).
/// Members are all one-candidate-per-block unions: `24^⌊n/12⌋` sets forming a
/// `(0,0)`-town mod 3.
pub fn frankl_odlyzko(k: u64, n: usize) -> Result<Family> {
    if k != 3 {
        return Err(Error::InvalidParameter(format!(
            "the Hadamard-product generator is built for k = 3, got k = {k}"
        )));
    }
    let spec = TownSpec::new(n, 3, 0, 0)?;
    let h = paley_hadamard(11)?;
    let blocks = n / 12;
    // Candidate c in a block: row c/2, positive support if c is even.
    let candidate = |block: usize, c: usize| -> Vec<usize> {
        let row = c / 2;
        let cols =
            if c % 2 == 0 { h.positive_support(row) } else { h.negative_support(row) };
        cols.into_iter().map(|j| block * 12 + j + 1).collect()
    };
    let mut members = Vec::new();
    let mut choice = vec![0usize; blocks];
    loop {
        let mut s = SetWord::empty(n);
        for (block, &c) in choice.iter().enumerate() {
            for e in candidate(block, c) {
                s.insert(e);
            }
        }
        members.push(s);
        // Odometer increment over 24 choices per block.
        let mut pos = 0;
        loop {
            if pos == blocks {
                return Family::new(spec, members);
            }
            choice[pos] += 1;
            if choice[pos] < 24 {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Adjoins `m` fresh points to the ground set and to every member, shifting
/// the residues from `(a,b)` to `(a+m, b+m)` mod `k`.
pub fn augment(family: &Family, m: usize) -> Family {
    let spec = family.spec();
    let n = spec.n() + m;
    let k = spec.k();
    let new_spec =
        TownSpec::new(n, k, (spec.a() + m as u64) % k, (spec.b() + m as u64) % k).expect("widening keeps the spec valid");
    let members = family
        .members()
        .iter()
        .map(|s| {
            let mut t = s.widened(n);
            for e in spec.n() + 1..=n {
                t.insert(e);
            }
            t
        })
        .collect();
    Family::new(new_spec, members).expect("augmenting distinct sets keeps them distinct")
}

/// The star family: a fixed core `{1..c}` with `c ≡ b`, extended by disjoint
/// consecutive blocks of size `d ≡ a - b` (the smallest positive choice).
/// Gives `⌊(n-c)/d⌋` members with sizes `c + d ≡ a` and all pairwise
/// intersections equal to the core.
pub fn star(a: u64, b: u64, k: u64, n: usize) -> Result<Family> {
    let spec = TownSpec::new(n, k, a, b)?;
    let c = b as usize;
    let d = ((a as i128 - b as i128).rem_euclid(k as i128)) as usize;
    let d = if d == 0 { k as usize } else { d };
    if c + d > n {
        return Err(Error::InvalidParameter(format!(
            "no room for a star: core {c} + block {d} exceeds n = {n}"
        )));
    }
    let mut core = SetWord::empty(n);
    for e in 1..=c {
        core.insert(e);
    }
    let count = (n - c) / d;
    let mut members = Vec::with_capacity(count);
    for i in 0..count {
        let mut s = core.clone();
        for e in c + i * d + 1..=c + (i + 1) * d {
            s.insert(e);
        }
        members.push(s);
    }
    Family::new(spec, members)
}

/// The complemented star: a star built for the substituted parameters
/// `(n-a, n-2a+b) mod k`, then complemented back. Often beats the plain star
/// on one residue class of `n`.
pub fn co_star(a: u64, b: u64, k: u64, n: usize) -> Result<Family> {
    let spec = TownSpec::new(n, k, a, b)?;
    let sub = spec.substituted();
    let inner = star(sub.a(), sub.b(), k, n)?;
    Ok(inner.substitute())
}

/// The largest family any generator produces for these parameters, or the
/// empty family when none applies. Ties prefer star, then co-star, then
/// block, then the augmented Hadamard product.
pub fn best_lower_bound(a: u64, b: u64, k: u64, n: usize) -> Result<Family> {
    best_lower_bound_named(a, b, k, n).map(|(f, _)| f)
}

/// Like [`best_lower_bound`], also naming the generator that won.
pub fn best_lower_bound_named(a: u64, b: u64, k: u64, n: usize) -> Result<(Family, &'static str)> {
    let spec = TownSpec::new(n, k, a, b)?;
    // (family, tie priority, name), higher priority wins equal sizes.
    let mut candidates: Vec<(Family, u8, &'static str)> = Vec::new();
    if let Ok(f) = star(a, b, k, n) {
        candidates.push((f, 3, "star"));
    }
    if let Ok(f) = co_star(a, b, k, n) {
        candidates.push((f, 2, "co-star"));
    }
    if a == b {
        if let Ok(f) = block_construction(a, k, n) {
            candidates.push((f, 1, "block"));
        }
        if k == 3 && n > a as usize {
            let m = a as usize;
            if let Ok(base) = frankl_odlyzko(3, n - m) {
                candidates.push((augment(&base, m), 0, "hadamard-product"));
            }
        }
    }
    Ok(candidates
        .into_iter()
        .max_by_key(|(f, priority, _)| (f.len(), *priority))
        .map(|(f, _, name)| (f, name))
        .unwrap_or_else(|| (Family::empty(spec), "empty")))
}

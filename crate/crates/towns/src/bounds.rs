//! Upper bounds for town sizes.
//!
//! Every bound is the conclusion of a rule that fires for some prime divisor
//! `p` of the modulus once the parameters are reduced mod `p`: any town mod
//! `k` is also a town mod `p`, so the cheapest prime wins. [`bound_oracle`]
//! runs every rule and keeps them all; the minimum is the certified bound.

use crate::setcore::TownSpec;
use crate::Result;
use std::cmp::Ordering;
use std::fmt;

/// An exact bound that may be too large to evaluate: either a plain count or
/// a power of two kept symbolic. Ordering compares true numeric values.
#[derive(Debug, Clone, Copy)]
pub enum BoundValue {
    Finite(u128),
    PowerOfTwo(u32),
}

impl BoundValue {
    /// The numeric value, unless `2^e` overflows `u128`.
    pub fn evaluate(&self) -> Option<u128> {
        match *self {
            BoundValue::Finite(v) => Some(v),
            BoundValue::PowerOfTwo(e) if e < 128 => Some(1u128 << e),
            BoundValue::PowerOfTwo(_) => None,
        }
    }
}

impl Ord for BoundValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use BoundValue::*;
        match (self, other) {
            (Finite(x), Finite(y)) => x.cmp(y),
            (PowerOfTwo(e), PowerOfTwo(f)) => e.cmp(f),
            (PowerOfTwo(e), Finite(x)) => {
                if *e >= 128 {
                    Ordering::Greater
                } else {
                    (1u128 << e).cmp(x)
                }
            }
            (Finite(_), PowerOfTwo(_)) => other.cmp(self).reverse(),
        }
    }
}

impl PartialOrd for BoundValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for BoundValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BoundValue {}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BoundValue::Finite(v) => write!(f, "{v}"),
            BoundValue::PowerOfTwo(e) => write!(f, "2^{e}"),
        }
    }
}

/// Which argument produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    /// Single intersection residue distinct from the size residue: the
    /// linear-algebra bound `C(n,1) = n`.
    Binomial,
    /// The `n - 1` bound applied to the parameters as given.
    DirectDeficit,
    /// The `n - 1` bound applied after complementing every member.
    ComplementDeficit,
    /// Exact values for `(2,1)` towns, split by `n mod p`.
    Schedule,
    /// Equal residues: the isotropic-subspace bound, a power of two.
    Eventown,
    /// The known exact table for modulus three.
    Mod3Exact,
    /// Every family is at most the full power set.
    Powerset,
}

impl RuleId {
    pub fn name(&self) -> &'static str {
        match self {
            RuleId::Binomial => "binomial",
            RuleId::DirectDeficit => "deficit",
            RuleId::ComplementDeficit => "deficit-complement",
            RuleId::Schedule => "schedule",
            RuleId::Eventown => "eventown",
            RuleId::Mod3Exact => "mod3-exact",
            RuleId::Powerset => "powerset",
        }
    }
}

/// One rule that applies to the queried parameters. `tight` is set only when
/// a matching construction is known to reach the value at these exact
/// parameters, never merely asymptotically.
#[derive(Debug, Clone, Copy)]
pub struct FiredRule {
    pub id: RuleId,
    /// Prime divisor of `k` the rule reduced to; `None` for the power set.
    pub p: Option<u64>,
    pub value: BoundValue,
    pub tight: bool,
}

/// Everything [`bound_oracle`] learned about one parameter tuple.
#[derive(Debug, Clone)]
pub struct BoundResult {
    n: usize,
    k: u64,
    a: u64,
    b: u64,
    rules: Vec<FiredRule>,
}

impl BoundResult {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// All rules that fired; never empty, the power set always applies.
    pub fn rules(&self) -> &[FiredRule] {
        &self.rules
    }

    /// The smallest bound any rule produced.
    pub fn best_value(&self) -> BoundValue {
        self.rules.iter().map(|r| r.value).min().expect("powerset always fires")
    }

    /// A rule achieving [`best_value`](Self::best_value), preferring one
    /// whose tightness is established.
    pub fn best_rule(&self) -> &FiredRule {
        let best = self.best_value();
        self.rules
            .iter()
            .filter(|r| r.value == best)
            .max_by_key(|r| r.tight)
            .expect("powerset always fires")
    }

    /// Whether the best bound is matched by a known construction.
    pub fn is_tight(&self) -> bool {
        self.best_rule().tight
    }
}

/// `C(n, s)` when it fits in a `u128`.
pub fn binomial(n: u128, s: u128) -> Option<u128> {
    if s > n {
        return Some(0);
    }
    let s = s.min(n - s);
    let mut acc: u128 = 1;
    for i in 0..s {
        // Multiply before dividing; the running product of i+1 consecutive
        // integers is divisible by (i+1)!.
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Ascending prime divisors of `k`.
pub fn prime_divisors(k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = k;
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            out.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        out.push(rest);
    }
    out
}

/// Intersection-residue counting bound: if every member has size `≡ t` and
/// every pairwise intersection size lands in `ell` mod `p`, with `t` itself
/// outside `ell` mod `p`, the family has at most `C(n, |ell mod p|)`
/// members. `None` when the hypothesis fails or the binomial overflows.
pub fn modular_rw(n: usize, p: u64, t: u64, ell: &[u64]) -> Option<u128> {
    let t = t % p;
    let mut residues: Vec<u64> = ell.iter().map(|&l| l % p).collect();
    residues.sort_unstable();
    residues.dedup();
    if residues.contains(&t) {
        return None;
    }
    binomial(n as u128, residues.len() as u128)
}

/// The quantity `a^2 - nb - a + b` reduced mod `p`. Complementing every
/// member of a town replaces `(a, b)` by `(n-a, n-2a+b)` and this expression
/// is unchanged, which is what lets the deficit rule transfer.
pub fn substitution_invariant(a: u64, b: u64, n: usize, p: u64) -> u64 {
    let (a, b, n, p) = (a as i128, b as i128, n as i128, p as i128);
    (a * a - n * b - a + b).rem_euclid(p) as u64
}

fn rules_for_prime(n: usize, k: u64, p: u64, a: u64, b: u64, out: &mut Vec<FiredRule>) {
    let ni = n as i128;
    let pi = p as i128;
    let ai = (a % p) as i128;
    let bi = (b % p) as i128;
    let divides = |x: i128| x.rem_euclid(pi) == 0;

    if let Some(v) = modular_rw(n, p, a, &[b]) {
        out.push(FiredRule { id: RuleId::Binomial, p: Some(p), value: BoundValue::Finite(v), tight: false });
    }

    if p > 2 {
        let inv = divides(ai * ai - ni * bi - ai + bi);
        // Deficit rule, direct parameters: either the fully nondegenerate
        // case or the zero-size-residue case.
        let direct = (!divides(ai) && !divides(bi) && !divides(ai - bi) && !divides(ni) && !inv)
            || (divides(ai) && !divides(bi) && !divides(ni - 1));
        if direct {
            out.push(FiredRule {
                id: RuleId::DirectDeficit,
                p: Some(p),
                value: BoundValue::Finite(n as u128 - 1),
                tight: false,
            });
        }
        // Same rule after complementation; the difference a - b and the
        // invariant survive the substitution unchanged.
        let (ci, di) = ((ni - ai).rem_euclid(pi), (ni - 2 * ai + bi).rem_euclid(pi));
        let complemented = (!divides(ci) && !divides(di) && !divides(ai - bi) && !divides(ni) && !inv)
            || (divides(ci) && !divides(di) && !divides(ni - 1));
        if complemented {
            out.push(FiredRule {
                id: RuleId::ComplementDeficit,
                p: Some(p),
                value: BoundValue::Finite(n as u128 - 1),
                tight: false,
            });
        }

        if ai == 2 % pi && bi == 1 {
            let tight = k == p;
            if divides(ni - 3) {
                out.push(FiredRule {
                    id: RuleId::Schedule,
                    p: Some(p),
                    value: BoundValue::Finite(n as u128),
                    tight,
                });
            } else if !divides(ni) {
                out.push(FiredRule {
                    id: RuleId::Schedule,
                    p: Some(p),
                    value: BoundValue::Finite(n as u128 - 1),
                    tight,
                });
            }
        }
    }

    if ai == bi {
        let exponent = if ai == 0 { n / 2 } else { (n + 1) / 2 };
        out.push(FiredRule {
            id: RuleId::Eventown,
            p: Some(p),
            value: BoundValue::PowerOfTwo(exponent as u32),
            tight: false,
        });
    }

    if p == 3 && ai != bi {
        // Rows of the exact modulus-three table, keyed by n mod 3. The three
        // rows absent here ((0,1), (1,2), (2,0)) have no known exact value.
        let value = match (ai, bi, n % 3) {
            (1, 0, _) => Some(n as u128),
            (2, 1, 0) => Some(n as u128),
            (2, 1, _) => Some(n as u128 - 1),
            (0, 2, 0) => Some(n as u128 - 2),
            (0, 2, 1) => Some(n as u128),
            (0, 2, 2) => Some(n as u128 - 1),
            _ => None,
        };
        if let Some(v) = value {
            out.push(FiredRule {
                id: RuleId::Mod3Exact,
                p: Some(3),
                value: BoundValue::Finite(v),
                tight: k == 3,
            });
        }
    }
}

/// Runs every bound rule for every prime divisor of `k` against the reduced
/// parameters and reports all that fire, including the unconditional power
/// set cap.
pub fn bound_oracle(a: u64, b: u64, k: u64, n: usize) -> Result<BoundResult> {
    TownSpec::new(n, k, a, b)?;
    let mut rules = Vec::new();
    for p in prime_divisors(k) {
        rules_for_prime(n, k, p, a, b, &mut rules);
    }
    rules.push(FiredRule {
        id: RuleId::Powerset,
        p: None,
        value: BoundValue::PowerOfTwo(n as u32),
        tight: false,
    });
    Ok(BoundResult { n, k, a, b, rules })
}

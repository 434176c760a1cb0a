//! Ground sets, bitset-backed subsets, families, and the town checker.
//!
//! A [`TownSpec`] fixes the parameters `(n, k, a, b)`. A [`Family`] is an
//! ordered, duplicate-free list of subsets of `{1..n}`. [`Family::check_town`]
//! decides whether the family is an `(a,b)`-town mod `k` and reports every
//! violation rather than the first one.

use std::collections::HashSet;
use std::fmt;

use crate::{Error, ParseErrorKind, Result};

/// Parameters of a town family: subsets of `{1..n}`, member sizes `≡ a`,
/// pairwise intersection sizes `≡ b`, both mod `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TownSpec {
    n: usize,
    k: u64,
    a: u64,
    b: u64,
}

impl TownSpec {
    /// Requires `n ≥ 1`, `k ≥ 2` and residues already reduced: `0 ≤ a, b < k`.
    pub fn new(n: usize, k: u64, a: u64, b: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec(format!("n must be positive, got {n}")));
        }
        if k < 2 {
            return Err(Error::InvalidSpec(format!("modulus must be at least 2, got {k}")));
        }
        if a >= k || b >= k {
            return Err(Error::InvalidSpec(format!(
                "residues must satisfy 0 <= a,b < k, got a={a} b={b} k={k}"
            )));
        }
        Ok(TownSpec { n, k, a, b })
    }

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

    /// Parameters of the complemented family: `(n-a, n-2a+b)` reduced mod `k`.
    pub fn substituted(&self) -> TownSpec {
        let k = self.k as i128;
        let n = self.n as i128;
        let a = self.a as i128;
        let b = self.b as i128;
        TownSpec {
            n: self.n,
            k: self.k,
            a: (n - a).rem_euclid(k) as u64,
            b: (n - 2 * a + b).rem_euclid(k) as u64,
        }
    }
}

impl fmt::Display for TownSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})-town mod {} over [{}]", self.a, self.b, self.k, self.n)
    }
}

/// Subsets up to width 128 live in one machine word pair; wider ground sets
/// fall back to a word vector. All the set operations below require equal
/// widths and panic otherwise: families enforce widths at construction, so a
/// mismatch is a programming error, not an input error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Bits {
    Small(u128),
    Wide(Vec<u64>),
}

/// A subset of `{1..width}` stored as a bitset; element `e` is bit `e-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetWord {
    width: usize,
    bits: Bits,
}

impl SetWord {
    pub fn empty(width: usize) -> Self {
        let bits = if width <= 128 {
            Bits::Small(0)
        } else {
            Bits::Wide(vec![0; width.div_ceil(64)])
        };
        SetWord { width, bits }
    }

    pub fn full(width: usize) -> Self {
        let mut s = SetWord::empty(width);
        for e in 1..=width {
            s.insert(e);
        }
        s
    }

    /// Builds a set from 1-based elements; order and repetition do not matter.
    pub fn from_elements(width: usize, elements: &[usize]) -> Result<Self> {
        let mut s = SetWord::empty(width);
        for &e in elements {
            if e == 0 || e > width {
                return Err(Error::InvalidParameter(format!(
                    "element {e} outside the ground set 1..={width}"
                )));
            }
            s.insert(e);
        }
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Inserts a 1-based element. Panics if `e` is outside `1..=width`.
    pub fn insert(&mut self, e: usize) {
        assert!(e >= 1 && e <= self.width, "element {e} outside 1..={}", self.width);
        match &mut self.bits {
            Bits::Small(w) => *w |= 1u128 << (e - 1),
            Bits::Wide(v) => v[(e - 1) / 64] |= 1u64 << ((e - 1) % 64),
        }
    }

    pub fn contains(&self, e: usize) -> bool {
        if e == 0 || e > self.width {
            return false;
        }
        match &self.bits {
            Bits::Small(w) => w >> (e - 1) & 1 == 1,
            Bits::Wide(v) => v[(e - 1) / 64] >> ((e - 1) % 64) & 1 == 1,
        }
    }

    pub fn cardinality(&self) -> usize {
        match &self.bits {
            Bits::Small(w) => w.count_ones() as usize,
            Bits::Wide(v) => v.iter().map(|w| w.count_ones() as usize).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == 0
    }

    /// `|self ∩ other|`. Panics on width mismatch.
    pub fn intersect_size(&self, other: &SetWord) -> usize {
        assert_eq!(self.width, other.width, "intersect_size on unequal widths");
        match (&self.bits, &other.bits) {
            (Bits::Small(x), Bits::Small(y)) => (x & y).count_ones() as usize,
            (Bits::Wide(x), Bits::Wide(y)) => x
                .iter()
                .zip(y.iter())
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum(),
            _ => unreachable!("equal widths always share a representation"),
        }
    }

    /// Union with an equal-width set. Panics on width mismatch.
    pub fn union(&self, other: &SetWord) -> SetWord {
        assert_eq!(self.width, other.width, "union on unequal widths");
        let bits = match (&self.bits, &other.bits) {
            (Bits::Small(x), Bits::Small(y)) => Bits::Small(x | y),
            (Bits::Wide(x), Bits::Wide(y)) => {
                Bits::Wide(x.iter().zip(y.iter()).map(|(a, b)| a | b).collect())
            }
            _ => unreachable!("equal widths always share a representation"),
        };
        SetWord { width: self.width, bits }
    }

    /// Complement within `{1..width}`.
    pub fn complement(&self) -> SetWord {
        let bits = match &self.bits {
            Bits::Small(w) => {
                let mask = if self.width == 128 { u128::MAX } else { (1u128 << self.width) - 1 };
                Bits::Small(!w & mask)
            }
            Bits::Wide(v) => {
                let mut out: Vec<u64> = v.iter().map(|w| !w).collect();
                let last_bits = self.width % 64;
                if last_bits != 0 {
                    let idx = out.len() - 1;
                    out[idx] &= (1u64 << last_bits) - 1;
                }
                Bits::Wide(out)
            }
        };
        SetWord { width: self.width, bits }
    }

    /// 1-based elements in increasing order.
    pub fn elements(&self) -> Vec<usize> {
        (1..=self.width).filter(|&e| self.contains(e)).collect()
    }

    /// Grows the ground set to `width`, keeping the same elements.
    pub fn widened(&self, width: usize) -> SetWord {
        assert!(width >= self.width);
        let mut out = SetWord::empty(width);
        for e in self.elements() {
            out.insert(e);
        }
        out
    }
}

impl PartialOrd for SetWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by width first, then by numeric value of the bit pattern. Within a
/// family all widths agree, so this is plain value order there.
impl Ord for SetWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.width.cmp(&other.width).then_with(|| match (&self.bits, &other.bits) {
            (Bits::Small(x), Bits::Small(y)) => x.cmp(y),
            (Bits::Wide(x), Bits::Wide(y)) => x.iter().rev().cmp(y.iter().rev()),
            _ => unreachable!("equal widths always share a representation"),
        })
    }
}

impl fmt::Display for SetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "-");
        }
        let mut first = true;
        for e in 1..=self.width {
            if self.contains(e) {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
                first = false;
            }
        }
        Ok(())
    }
}

/// One failed town condition, with enough context to locate it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Member `index` has cardinality `size`, which is `residue` mod `k`.
    MemberSize { index: usize, size: usize, residue: u64 },
    /// Members `first` and `second` intersect in `size` elements, `residue` mod `k`.
    PairIntersection { first: usize, second: usize, size: usize, residue: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MemberSize { index, size, residue } => {
                write!(f, "member #{index} has size {size} ≡ {residue}")
            }
            Violation::PairIntersection { first, second, size, residue } => {
                write!(f, "members #{first} and #{second} intersect in {size} ≡ {residue}")
            }
        }
    }
}

/// Outcome of the town checker. Empty families pass by convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    violations: Vec<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

/// An ordered, duplicate-free list of subsets of the spec's ground set.
/// Construction enforces widths and distinctness; the town conditions are
/// checked separately so that violating families can be built and reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    spec: TownSpec,
    members: Vec<SetWord>,
}

impl Family {
    pub fn empty(spec: TownSpec) -> Self {
        Family { spec, members: Vec::new() }
    }

    pub fn new(spec: TownSpec, members: Vec<SetWord>) -> Result<Self> {
        let mut f = Family::empty(spec);
        for m in members {
            f.push(m)?;
        }
        Ok(f)
    }

    /// Appends a member, rejecting width mismatches and duplicates.
    pub fn push(&mut self, member: SetWord) -> Result<()> {
        if member.width() != self.spec.n {
            return Err(Error::WidthMismatch { left: member.width(), right: self.spec.n });
        }
        if self.members.contains(&member) {
            return Err(Error::DuplicateMember);
        }
        self.members.push(member);
        Ok(())
    }

    pub fn spec(&self) -> &TownSpec {
        &self.spec
    }

    pub fn members(&self) -> &[SetWord] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Checks all member sizes and all pairwise intersections, collecting
    /// every violation. The empty family passes.
    pub fn check_town(&self) -> CheckReport {
        let k = self.spec.k;
        let mut violations = Vec::new();
        for (i, m) in self.members.iter().enumerate() {
            let size = m.cardinality();
            let residue = size as u64 % k;
            if residue != self.spec.a {
                violations.push(Violation::MemberSize { index: i, size, residue });
            }
        }
        for i in 0..self.members.len() {
            for j in i + 1..self.members.len() {
                let size = self.members[i].intersect_size(&self.members[j]);
                let residue = size as u64 % k;
                if residue != self.spec.b {
                    violations.push(Violation::PairIntersection {
                        first: i,
                        second: j,
                        size,
                        residue,
                    });
                }
            }
        }
        CheckReport { violations }
    }

    /// The complemented family over the same ground set. Complementation is
    /// an involution and maps `(a,b)`-towns to `(n-a, n-2a+b)`-towns mod `k`,
    /// preserving the family size.
    pub fn substitute(&self) -> Family {
        Family {
            spec: self.spec.substituted(),
            members: self.members.iter().map(SetWord::complement).collect(),
        }
    }

    /// Parses the line-oriented family format:
    ///
    /// ```text
    /// # optional comments
    /// n k a b
    /// 1 2 5
    /// -
    /// ```
    ///
    /// The first non-comment line is the header; each later non-empty line is
    /// one set as strictly increasing 1-based elements, `-` for the empty set.
    pub fn parse(text: &str) -> Result<Family> {
        let mut family: Option<Family> = None;
        let mut seen: HashSet<SetWord> = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match family {
                None => {
                    let fields: Vec<&str> = trimmed.split_whitespace().collect();
                    if fields.len() != 4 {
                        return Err(Error::Parse {
                            line,
                            kind: ParseErrorKind::MalformedHeader(format!(
                                "expected 4 fields `n k a b`, got {}",
                                fields.len()
                            )),
                        });
                    }
                    let parse_u64 = |s: &str| -> Result<u64> {
                        s.parse().map_err(|_| Error::Parse {
                            line,
                            kind: ParseErrorKind::MalformedHeader(format!("bad integer `{s}`")),
                        })
                    };
                    let n = parse_u64(fields[0])? as usize;
                    let k = parse_u64(fields[1])?;
                    let a = parse_u64(fields[2])?;
                    let b = parse_u64(fields[3])?;
                    let spec = TownSpec::new(n, k, a, b).map_err(|e| Error::Parse {
                        line,
                        kind: ParseErrorKind::MalformedHeader(e.to_string()),
                    })?;
                    family = Some(Family::empty(spec));
                }
                Some(ref mut f) => {
                    let n = f.spec.n;
                    let member = if trimmed == "-" {
                        SetWord::empty(n)
                    } else {
                        let mut set = SetWord::empty(n);
                        let mut prev = 0usize;
                        for tok in trimmed.split_whitespace() {
                            let e: usize = tok.parse().map_err(|_| Error::Parse {
                                line,
                                kind: ParseErrorKind::InvalidElement(tok.to_string()),
                            })?;
                            if e == 0 || e > n {
                                return Err(Error::Parse {
                                    line,
                                    kind: ParseErrorKind::ElementOutOfRange { value: e, n },
                                });
                            }
                            if e <= prev {
                                return Err(Error::Parse {
                                    line,
                                    kind: ParseErrorKind::NotIncreasing,
                                });
                            }
                            set.insert(e);
                            prev = e;
                        }
                        set
                    };
                    if !seen.insert(member.clone()) {
                        return Err(Error::Parse { line, kind: ParseErrorKind::DuplicateSet });
                    }
                    f.members.push(member);
                }
            }
        }
        family.ok_or(Error::Parse { line: 0, kind: ParseErrorKind::MissingHeader })
    }

    /// Renders in the format accepted by [`Family::parse`]; parsing the output
    /// reproduces the family exactly, member order included.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {} {} {}\n", self.spec.n, self.spec.k, self.spec.a, self.spec.b));
        for m in &self.members {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(width: usize, elems: &[usize]) -> SetWord {
        SetWord::from_elements(width, elems).unwrap()
    }

    #[test]
    fn spec_rejects_bad_parameters() {
        assert!(TownSpec::new(0, 3, 0, 0).is_err());
        assert!(TownSpec::new(5, 1, 0, 0).is_err());
        assert!(TownSpec::new(5, 3, 3, 0).is_err());
        assert!(TownSpec::new(5, 3, 0, 4).is_err());
        assert!(TownSpec::new(5, 3, 2, 1).is_ok());
    }

    #[test]
    fn cardinality_and_intersection() {
        let e = SetWord::empty(10);
        assert_eq!(e.cardinality(), 0);
        let s = set(10, &[1, 5, 10]);
        assert_eq!(s.cardinality(), 3);
        let t = set(10, &[5, 10, 2]);
        assert_eq!(s.intersect_size(&t), 2);
        assert_eq!(s.intersect_size(&e), 0);
        assert_eq!(SetWord::full(10).cardinality(), 10);
    }

    #[test]
    fn complement_and_union() {
        let s = set(6, &[1, 2, 3]);
        assert_eq!(s.complement().elements(), vec![4, 5, 6]);
        assert_eq!(s.complement().complement(), s);
        assert_eq!(s.union(&set(6, &[3, 4])).elements(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn wide_sets_behave_like_small_ones() {
        let mut s = SetWord::empty(150);
        s.insert(1);
        s.insert(130);
        s.insert(150);
        assert_eq!(s.cardinality(), 3);
        assert!(s.contains(130));
        assert!(!s.contains(129));
        assert_eq!(s.complement().cardinality(), 147);
        let t = set(150, &[130, 131]);
        assert_eq!(s.intersect_size(&t), 1);
        assert_eq!(s.elements(), vec![1, 130, 150]);
        assert_eq!(s.complement().complement(), s);
    }

    #[test]
    fn value_order_matches_numeric_order() {
        // {1} < {2} < {1,2} as bit values 1 < 2 < 3.
        let a = set(4, &[1]);
        let b = set(4, &[2]);
        let c = set(4, &[1, 2]);
        assert!(a < b && b < c);
        let mut wide_lo = SetWord::empty(150);
        wide_lo.insert(64);
        let mut wide_hi = SetWord::empty(150);
        wide_hi.insert(65);
        assert!(wide_lo < wide_hi);
    }

    #[test]
    fn checker_accepts_a_star() {
        // {1,2}, {1,3}, ..., {1,n}: sizes 2, intersections 1.
        let spec = TownSpec::new(6, 3, 2, 1).unwrap();
        let members: Vec<SetWord> = (2..=6).map(|e| set(6, &[1, e])).collect();
        let f = Family::new(spec, members).unwrap();
        assert!(f.check_town().passed());
    }

    #[test]
    fn checker_accepts_single_member_and_empty() {
        let spec = TownSpec::new(5, 4, 3, 2).unwrap();
        let f = Family::new(spec, vec![set(5, &[1, 2, 3])]).unwrap();
        assert!(f.check_town().passed());
        assert!(Family::empty(spec).check_town().passed());
    }

    #[test]
    fn checker_reports_every_violation() {
        // Sizes fine, one bad pair: |{1,2} ∩ {2,3}| = 1 but b = 0.
        let spec = TownSpec::new(4, 3, 2, 0).unwrap();
        let f = Family::new(spec, vec![set(4, &[1, 2]), set(4, &[2, 3])]).unwrap();
        let report = f.check_town();
        assert!(!report.passed());
        assert_eq!(
            report.violations(),
            &[Violation::PairIntersection { first: 0, second: 1, size: 1, residue: 1 }]
        );

        // Two bad sizes and one bad pair show up together.
        let spec = TownSpec::new(4, 3, 1, 0).unwrap();
        let f = Family::new(spec, vec![set(4, &[1, 2]), set(4, &[2, 3])]).unwrap();
        assert_eq!(f.check_town().violations().len(), 3);
    }

    #[test]
    fn empty_set_is_a_legal_member_when_a_is_zero() {
        let spec = TownSpec::new(4, 2, 0, 0).unwrap();
        let f = Family::new(spec, vec![SetWord::empty(4), set(4, &[1, 2])]).unwrap();
        assert!(f.check_town().passed());
    }

    #[test]
    fn substitution_swaps_to_the_complement_parameters() {
        // n ≡ 0 mod 3: (2,1) -> (n-2, n-3) ≡ (1, 0).
        let spec = TownSpec::new(6, 3, 2, 1).unwrap();
        let sub = spec.substituted();
        assert_eq!((sub.a(), sub.b()), (1, 0));
        // And back again.
        let back = sub.substituted();
        assert_eq!((back.a(), back.b()), (2, 1));
    }

    #[test]
    fn substitute_complements_members_and_passes_check() {
        let spec = TownSpec::new(6, 3, 2, 1).unwrap();
        let members: Vec<SetWord> = (2..=6).map(|e| set(6, &[1, e])).collect();
        let f = Family::new(spec, members).unwrap();
        let g = f.substitute();
        assert_eq!(g.len(), f.len());
        assert!(g.check_town().passed());
        assert_eq!(g.members()[0], set(6, &[3, 4, 5, 6]));
        assert_eq!(f.substitute().substitute(), f);
    }

    #[test]
    fn parse_and_render_round_trip() {
        let text = "# a comment\n6 3 2 1\n1 2\n\n1 3\n-\n";
        let f = Family::parse(text).unwrap();
        assert_eq!(f.spec().n(), 6);
        assert_eq!(f.len(), 3);
        assert!(f.members()[2].is_empty());
        let rendered = f.render();
        let g = Family::parse(&rendered).unwrap();
        assert_eq!(f, g);
        // Canonical text is a fixed point of parse ∘ render.
        assert_eq!(g.render(), rendered);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Family::parse("6 3 2\n") {
            Err(Error::Parse { line: 1, kind: ParseErrorKind::MalformedHeader(_) }) => {}
            other => panic!("expected malformed header, got {other:?}"),
        }
        match Family::parse("6 3 2 1\n1 7\n") {
            Err(Error::Parse {
                line: 2,
                kind: ParseErrorKind::ElementOutOfRange { value: 7, n: 6 },
            }) => {}
            other => panic!("expected out-of-range, got {other:?}"),
        }
        match Family::parse("6 3 2 1\n1 2\n2 1\n") {
            Err(Error::Parse { line: 3, kind: ParseErrorKind::NotIncreasing }) => {}
            other => panic!("expected not-increasing, got {other:?}"),
        }
        match Family::parse("6 3 2 1\n2 2\n") {
            Err(Error::Parse { line: 2, kind: ParseErrorKind::NotIncreasing }) => {}
            other => panic!("expected duplicate element rejection, got {other:?}"),
        }
        match Family::parse("6 3 2 1\n1 2\n1 2\n") {
            Err(Error::Parse { line: 3, kind: ParseErrorKind::DuplicateSet }) => {}
            other => panic!("expected duplicate set, got {other:?}"),
        }
        match Family::parse("# only comments\n") {
            Err(Error::Parse { kind: ParseErrorKind::MissingHeader, .. }) => {}
            other => panic!("expected missing header, got {other:?}"),
        }
    }

    #[test]
    fn header_only_file_is_the_empty_family() {
        let f = Family::parse("5 2 1 0\n").unwrap();
        assert!(f.is_empty());
        assert!(f.check_town().passed());
        assert_eq!(Family::parse(&f.render()).unwrap(), f);
    }

    #[test]
    fn family_rejects_duplicates_and_width_mismatch() {
        let spec = TownSpec::new(4, 2, 0, 0).unwrap();
        let mut f = Family::empty(spec);
        f.push(set(4, &[1, 2])).unwrap();
        assert!(matches!(f.push(set(4, &[1, 2])), Err(Error::DuplicateMember)));
        assert!(matches!(f.push(set(5, &[1, 2])), Err(Error::WidthMismatch { .. })));
    }
}

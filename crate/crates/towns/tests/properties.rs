//! Randomized invariants: serialization round trips, symmetry of the
//! checker, the substitution involution, divisor reduction, field axioms,
//! and the rank routine against a determinant-based oracle.

use proptest::prelude::*;
use towns::algebra::{QuadExt, QuadExtScalar, QuadMatrix};
use towns::constructions::{block_construction, co_star, star};
use towns::{Family, SetWord, TownSpec};

/// Arbitrary family: any distinct subsets, not necessarily a valid town.
fn family_strategy() -> impl Strategy<Value = Family> {
    (1usize..40, 2u64..6)
        .prop_flat_map(|(n, k)| {
            let member = proptest::collection::btree_set(1usize..=n, 0..=n.min(9));
            (
                Just(n),
                Just(k),
                0..k,
                0..k,
                proptest::collection::btree_set(member, 0..8),
            )
        })
        .prop_map(|(n, k, a, b, members)| {
            let spec = TownSpec::new(n, k, a, b).unwrap();
            let words = members
                .into_iter()
                .map(|m| {
                    let elements: Vec<usize> = m.into_iter().collect();
                    SetWord::from_elements(n, &elements).unwrap()
                })
                .collect();
            Family::new(spec, words).unwrap()
        })
}

proptest! {
    #[test]
    fn render_parse_round_trip(family in family_strategy()) {
        let parsed = Family::parse(&family.render()).unwrap();
        prop_assert_eq!(parsed.spec(), family.spec());
        prop_assert_eq!(parsed.members(), family.members());
    }

    /// Violations are a property of the family, not of its presentation:
    /// reordering members or relabeling ground elements keeps the verdict
    /// and the violation count.
    #[test]
    fn check_ignores_presentation(family in family_strategy(), seed in any::<u64>()) {
        let report = family.check_town();
        let n = family.spec().n();

        let mut order: Vec<usize> = (0..family.len()).collect();
        let mut state = seed | 1;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for i in (1..order.len()).rev() {
            order.swap(i, rng() as usize % (i + 1));
        }
        let shuffled = Family::new(
            *family.spec(),
            order.iter().map(|&i| family.members()[i].clone()).collect(),
        )
        .unwrap();
        let shuffled_report = shuffled.check_town();
        prop_assert_eq!(shuffled_report.passed(), report.passed());
        prop_assert_eq!(shuffled_report.violations().len(), report.violations().len());

        let mut relabel: Vec<usize> = (1..=n).collect();
        for i in (1..relabel.len()).rev() {
            relabel.swap(i, rng() as usize % (i + 1));
        }
        let relabeled_members: Vec<SetWord> = family
            .members()
            .iter()
            .map(|s| {
                let mut elements: Vec<usize> =
                    s.elements().into_iter().map(|e| relabel[e - 1]).collect();
                elements.sort_unstable();
                SetWord::from_elements(n, &elements).unwrap()
            })
            .collect();
        let relabeled = Family::new(*family.spec(), relabeled_members).unwrap();
        let relabeled_report = relabeled.check_town();
        prop_assert_eq!(relabeled_report.passed(), report.passed());
        prop_assert_eq!(relabeled_report.violations().len(), report.violations().len());
    }

    /// Complementing twice is the identity, and the residue difference a - b
    /// survives one complement.
    #[test]
    fn substitution_is_an_involution(family in family_strategy()) {
        let spec = family.spec();
        let sub = family.substitute();
        let k = spec.k();
        prop_assert_eq!(
            (spec.a() + k - spec.b()) % k,
            (sub.spec().a() + k - sub.spec().b()) % k
        );
        let back = sub.substitute();
        prop_assert_eq!(back.spec(), spec);
        prop_assert_eq!(back.members(), family.members());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A town mod k is a town mod every divisor of k, with residues reduced.
    #[test]
    fn towns_reduce_to_divisor_moduli(
        pick in 0usize..3,
        k in 2u64..13,
        a_seed in 0u64..13,
        b_seed in 0u64..13,
        n in 2usize..20,
    ) {
        let (a, b) = (a_seed % k, b_seed % k);
        let family = match pick {
            0 => star(a, b, k, n),
            1 => co_star(a, b, k, n),
            _ => {
                if a == b { block_construction(a, k, n) } else { star(a, b, k, n) }
            }
        };
        let Ok(family) = family else { return Ok(()); };
        prop_assert!(family.check_town().passed());
        for d in 2..=k {
            if k % d == 0 {
                let reduced_spec = TownSpec::new(n, d, a % d, b % d).unwrap();
                let reduced = Family::new(reduced_spec, family.members().to_vec()).unwrap();
                prop_assert!(reduced.check_town().passed(), "d={d}");
            }
        }
    }

    /// Field axioms for GF(p^2), sampled.
    #[test]
    fn quadratic_field_axioms(
        p_idx in 0usize..3,
        a0 in 0u64..7, a1 in 0u64..7,
        b0 in 0u64..7, b1 in 0u64..7,
        c0 in 0u64..7, c1 in 0u64..7,
    ) {
        let p = [3u64, 5, 7][p_idx];
        let f = QuadExt::new(p).unwrap();
        let x = f.scalar(a0 % p, a1 % p);
        let y = f.scalar(b0 % p, b1 % p);
        let z = f.scalar(c0 % p, c1 % p);

        prop_assert_eq!(f.add(x, y), f.add(y, x));
        prop_assert_eq!(f.mul(x, y), f.mul(y, x));
        prop_assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        prop_assert_eq!(f.add(x, f.neg(x)), QuadExtScalar::ZERO);
        if !x.is_zero() {
            let inv = f.inv(x).unwrap();
            prop_assert!(f.mul(x, inv).is_one());
        }
        let v = a0 % p;
        let root = f.sqrt_of(v);
        prop_assert_eq!(f.mul(root, root), f.from_base(v));
    }

    /// Gaussian elimination rank equals the order of the largest square
    /// submatrix with nonzero permutation-expansion determinant.
    #[test]
    fn rank_matches_determinant_oracle(
        rows in 1usize..5,
        cols in 1usize..5,
        entries in proptest::collection::vec((0u64..3, 0u64..3), 16),
    ) {
        let f = QuadExt::new(3).unwrap();
        let matrix = QuadMatrix::from_rows(
            (0..rows)
                .map(|i| {
                    (0..cols)
                        .map(|j| {
                            let (c0, c1) = entries[i * 4 + j];
                            f.scalar(c0, c1)
                        })
                        .collect()
                })
                .collect(),
        );
        prop_assert_eq!(matrix.rank(&f), oracle_rank(&f, &matrix));
    }
}

fn determinant(f: &QuadExt, m: &QuadMatrix, rows: &[usize], cols: &[usize]) -> QuadExtScalar {
    let d = rows.len();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut total = QuadExtScalar::ZERO;
    // Heap's algorithm for all permutations, tracking sign by swap parity.
    let mut stack = vec![0usize; d];
    let mut sign = false;
    let add_term = |perm: &[usize], sign: bool, total: &mut QuadExtScalar| {
        let mut term = f.from_base(1);
        for (i, &pi) in perm.iter().enumerate() {
            term = f.mul(term, m.get(rows[i], cols[pi]));
        }
        if sign {
            term = f.neg(term);
        }
        *total = f.add(*total, term);
    };
    add_term(&perm, sign, &mut total);
    let mut i = 1;
    while i < d {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            sign = !sign;
            add_term(&perm, sign, &mut total);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    total
}

fn oracle_rank(f: &QuadExt, m: &QuadMatrix) -> usize {
    let max_d = m.rows().min(m.cols());
    for d in (1..=max_d).rev() {
        for rows in subsets_of_size(m.rows(), d) {
            for cols in subsets_of_size(m.cols(), d) {
                if !determinant(f, m, &rows, &cols).is_zero() {
                    return d;
                }
            }
        }
    }
    0
}

fn subsets_of_size(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(start: usize, n: usize, d: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            go(i + 1, n, d, current, out);
            current.pop();
        }
    }
    go(0, n, d, &mut current, &mut out);
    out
}

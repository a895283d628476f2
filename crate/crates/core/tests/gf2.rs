use itsnet::gf2::{cross_independent, cross_independent_with_cutoff, BitMatrix, BitString};
use itsnet::seed::{uniform_below, Seed};
use proptest::prelude::*;

fn random_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> BitMatrix {
    BitMatrix::random_bernoulli(rows, cols, density, Seed::from(seed)).unwrap()
}

/// Rank by Gaussian elimination over explicit `Vec<bool>` rows.
fn naive_rank(m: &BitMatrix) -> usize {
    let mut rows: Vec<Vec<bool>> = (0..m.rows()).map(|r| m.row(r).iter().collect()).collect();
    let mut rank = 0;
    for c in 0..m.cols() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Cross-dependence by listing every row selection explicitly.
fn enumerate_cross_independent(blocks: &[BitMatrix]) -> bool {
    let rows: Vec<(usize, BitString)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, m)| (0..m.rows()).map(move |r| (b, m.row(r))))
        .collect();
    let cols = blocks[0].cols();
    for mask in 1u32..(1 << rows.len()) {
        let mut touched = vec![false; blocks.len()];
        let mut acc = BitString::zeros(cols);
        for (k, (b, row)) in rows.iter().enumerate() {
            if mask >> k & 1 == 1 {
                touched[*b] = true;
                acc.xor_assign(row).unwrap();
            }
        }
        if acc.is_zero() && touched.iter().all(|&t| t) {
            return false;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_survives_elementary_row_operations(rows in 1usize..20, cols in 1usize..90, seed in any::<u64>()) {
        let mut m = random_matrix(rows, cols, 0.3, seed);
        let before = m.rank();
        prop_assert_eq!(before, naive_rank(&m));
        let mut rng = Seed::from(seed ^ 0x55).rng();
        for _ in 0..100 {
            let a = uniform_below(&mut rng, rows as u64) as usize;
            let b = uniform_below(&mut rng, rows as u64) as usize;
            if uniform_below(&mut rng, 2) == 0 {
                m.swap_rows(a, b);
            } else if a != b {
                m.xor_row_into(a, b);
            }
        }
        prop_assert_eq!(m.rank(), before);
    }

    #[test]
    fn mul_is_linear(rows in 0usize..30, cols in 1usize..130, seed in any::<u64>()) {
        let m = random_matrix(rows, cols, 0.4, seed);
        let mut rng = Seed::from(seed).derive(1).rng();
        let v1 = BitString::random(cols, &mut rng);
        let v2 = BitString::random(cols, &mut rng);
        let lhs = m.mul(&v1.xor(&v2).unwrap()).unwrap();
        let rhs = m.mul(&v1).unwrap().xor(&m.mul(&v2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cross_independence_matches_enumeration(
        shape in prop::collection::vec(1usize..5, 1..5),
        cols in 1usize..8,
        seed in any::<u64>(),
    ) {
        let blocks: Vec<BitMatrix> = shape
            .iter()
            .enumerate()
            .map(|(k, &r)| random_matrix(r, cols, 0.5, seed.wrapping_add(k as u64)))
            .collect();
        let fast = cross_independent(&blocks).unwrap();
        prop_assert_eq!(fast, enumerate_cross_independent(&blocks));
        if BitMatrix::stack(&blocks).unwrap().has_full_row_rank() {
            prop_assert!(fast);
        }
        // The rank fallback is only ever conservative.
        if cross_independent_with_cutoff(&blocks, 0).unwrap() {
            prop_assert!(fast);
        }
    }

    #[test]
    fn fixed_weight_rows_have_exact_weight(rows in 1usize..40, cols in 1usize..300, d in 1usize..20, seed in any::<u64>()) {
        prop_assume!(d <= cols);
        let m = BitMatrix::random_fixed_weight(rows, cols, d, Seed::from(seed)).unwrap();
        for r in 0..rows {
            prop_assert_eq!(m.row_weight(r), d);
        }
    }
}

#[test]
fn rank_deficient_block_can_still_be_cross_independent() {
    let m1: BitMatrix = "110;110".parse().unwrap();
    let m2: BitMatrix = "011".parse().unwrap();
    assert_eq!(m1.rank(), 1);
    assert!(cross_independent(&[m1.clone(), m2.clone()]).unwrap());
    assert!(enumerate_cross_independent(&[m1, m2]));
}

#[test]
fn bitstring_bytes_roundtrip() {
    let mut rng = Seed::from(3).rng();
    for len in [0usize, 1, 7, 8, 9, 63, 64, 65, 1000] {
        let s = BitString::random(len, &mut rng);
        assert_eq!(BitString::from_bytes(&s.to_bytes(), len).unwrap(), s);
    }
}

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uwram::dp::{
    four_russians_with, knapsack, lcs, lcs_recover, static_prefix_sums, subset_sum, subset_sum_rows, Retention,
};
use uwram::oracle::{self, is_subsequence, knapsack_dp, lcs_table, prefix_ones, subset_sum_dp};
use uwram::{Machine, WideConfig};

fn machine(w: u32, k: usize, cells: usize) -> Machine {
    Machine::new(WideConfig::new(w, k).unwrap(), cells).unwrap()
}

#[test]
fn subset_sum_rows_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (w, k) in [(8, 4), (16, 3), (64, 2)] {
        let mut m = machine(w, k, 1 << w.min(16));
        for _ in 0..30 {
            let n = rng.gen_range(0..8);
            let ws: Vec<u64> = (0..n).map(|_| rng.gen_range(0..60)).collect();
            let t = rng.gen_range(0..150);
            assert_eq!(subset_sum_rows(&mut m, &ws, t).unwrap(), oracle::subset_sum_rows(&ws, t).unwrap());
        }
    }
}

#[test]
fn knapsack_matches_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (w, k) in [(16, 4), (32, 16), (64, 64)] {
        let mut m = machine(w, k, 1 << w.min(20));
        for _ in 0..40 {
            let items: Vec<(u64, u64)> =
                (0..rng.gen_range(0..12)).map(|_| (rng.gen_range(0..40), rng.gen_range(0..40))).collect();
            let b = rng.gen_range(0..120);
            assert_eq!(knapsack(&mut m, &items, b).unwrap(), knapsack_dp(&items, b).unwrap(), "{items:?} b={b}");
        }
    }
}

#[test]
fn lcs_diagonals_match_difference_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (w, k) in [(16, 1), (16, 3), (32, 2), (64, 4)] {
        for _ in 0..25 {
            let sigma = [2, 4, 26][rng.gen_range(0..3)];
            let x: Vec<u8> = (0..rng.gen_range(1..30)).map(|_| rng.gen_range(0..sigma) as u8).collect();
            let y: Vec<u8> = (0..rng.gen_range(1..30)).map(|_| rng.gen_range(0..sigma) as u8).collect();
            let mut m = machine(w, k, 1 << w.min(20));
            let table = lcs_table(&x, &y).unwrap();
            let run = lcs(&mut m, &x, &y, sigma, Retention::Full).unwrap();
            assert_eq!(run.length(), table.length() as u64);
            for i in 0..=x.len() {
                for j in 0..=y.len() {
                    if j > 0 {
                        assert_eq!(run.h(&m, i, j).unwrap() as u32, if i == 0 { 0 } else { table.h(i, j) });
                    }
                    if i > 0 {
                        assert_eq!(run.v(&m, i, j).unwrap() as u32, if j == 0 { 0 } else { table.v(i, j) });
                    }
                }
            }
            let witness = run.recover(&mut m).unwrap();
            assert_eq!(witness.len() as u32, table.length());
            assert!(is_subsequence(&witness, &x) && is_subsequence(&witness, &y));
        }
    }
}

#[test]
fn window_retention_is_bounded() {
    let mut m = machine(64, 4, 1 << 20);
    let x = vec![0u8; 300];
    let full = lcs(&mut m, &x, &x, 2, Retention::Full).unwrap();
    let mark = m.mark();
    let small = lcs(&mut m, &x, &x, 2, Retention::Window).unwrap();
    m.release_to(mark);
    assert_eq!(small.length(), 300);
    assert!(small.diagonal_cells() * 50 < full.diagonal_cells());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subset_sum_agrees(ws in prop::collection::vec(0u64..200, 0..10), t in 0u64..600) {
        let mut m = machine(64, 4, 1 << 14);
        prop_assert_eq!(subset_sum(&mut m, &ws, t).unwrap(), subset_sum_dp(&ws, t).unwrap());
    }

    #[test]
    fn static_rank_agrees(bits in prop::collection::vec(any::<bool>(), 1..700), q in any::<prop::sample::Index>()) {
        let mut m = machine(16, 8, 1 << 16);
        let q = q.index(bits.len());
        let s = static_prefix_sums(&mut m, &bits, q).unwrap();
        prop_assert_eq!(s.ones, prefix_ones(&bits, q).unwrap());
    }

    #[test]
    fn four_russians_agrees(
        x in prop::collection::vec(0u8..3, 0..50),
        y in prop::collection::vec(0u8..3, 0..50),
        t in 0usize..3,
    ) {
        let mut m = machine(32, 8, 1 << 20);
        let got = four_russians_with(&mut m, &x, &y, 3, t).unwrap();
        prop_assert_eq!(got.length, lcs_table(&x, &y).unwrap().length() as u64);
    }

    #[test]
    fn recovered_witness_is_common(
        x in prop::collection::vec(0u8..4, 0..40),
        y in prop::collection::vec(0u8..4, 0..40),
    ) {
        let mut m = machine(16, 4, 1 << 16);
        let z = lcs_recover(&mut m, &x, &y, 4).unwrap();
        prop_assert_eq!(z.len() as u32, lcs_table(&x, &y).unwrap().length());
        prop_assert!(is_subsequence(&z, &x) && is_subsequence(&z, &y));
    }
}

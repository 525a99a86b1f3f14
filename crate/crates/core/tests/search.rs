use proptest::prelude::*;
use uwram::oracle::{bmh_scalar, naive_search};
use uwram::search::{bmh_wide, shift_and_parallel, shift_and_wide, shift_or, Variant};
use uwram::{Machine, WideConfig};

fn text_and_pattern() -> impl Strategy<Value = (usize, Vec<u8>, Vec<u8>)> {
    prop_oneof![Just(2usize), Just(4), Just(26)].prop_flat_map(|sigma| {
        let sym = 0..sigma as u8;
        (Just(sigma), prop::collection::vec(sym.clone(), 0..300), prop::collection::vec(sym, 1..12))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn all_matchers_equal_naive((sigma, t, p) in text_and_pattern(), cfg in 0usize..3) {
        let (w, k) = [(16, 4), (32, 3), (64, 2)][cfg];
        let mut m = Machine::new(WideConfig::new(w, k).unwrap(), 1 << w.min(20)).unwrap();
        let want = naive_search(&t, &p).unwrap();
        prop_assert_eq!(&shift_and_wide(&mut m, &t, &p, sigma).unwrap().occurrences, &want);
        prop_assert_eq!(&shift_or(&mut m, &t, &p, sigma, Variant::Wide).unwrap().occurrences, &want);
        if p.len() <= w as usize {
            prop_assert_eq!(&shift_and_parallel(&mut m, &t, &p, sigma).unwrap().occurrences, &want);
            prop_assert_eq!(&shift_or(&mut m, &t, &p, sigma, Variant::Parallel).unwrap().occurrences, &want);
        }
        let bmh = bmh_wide(&mut m, &t, &p, sigma).unwrap();
        let scalar = bmh_scalar(&t, &p, sigma).unwrap();
        prop_assert_eq!(&bmh.occurrences, &want);
        prop_assert_eq!(bmh.windows, scalar.windows);
    }
}

#[test]
fn periodic_text_every_offset() {
    let mut m = Machine::new(WideConfig::new(16, 8).unwrap(), 1 << 16).unwrap();
    let t: Vec<u8> = (0..200).map(|i| (i % 3 == 2) as u8).collect();
    let p = [0u8, 0, 1, 0, 0, 1];
    let want = naive_search(&t, &p).unwrap();
    assert_eq!(want.len(), 65);
    assert_eq!(shift_and_parallel(&mut m, &t, &p, 2).unwrap().occurrences, want);
}

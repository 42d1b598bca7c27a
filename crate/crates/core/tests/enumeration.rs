use polya_core::indexcomb::{counts, degree_block, enumerate, GradedEnumeration, MultiIndex};
use proptest::prelude::*;

/// Every multi-index in `[0, s]^n`, by odometer.
fn brute_force(n: usize, s: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut k = vec![0u32; n];
    loop {
        if k.iter().sum::<u32>() <= s {
            out.push(k.clone());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if k[pos] < s {
                k[pos] += 1;
                break;
            }
            k[pos] = 0;
        }
    }
}

#[test]
fn counts_match_brute_force() {
    for n in 1..=4 {
        let all = brute_force(n, 12);
        for s in 0..=12u32 {
            let m = all.iter().filter(|k| k.iter().sum::<u32>() <= s).count() as u64;
            let block = all.iter().filter(|k| k.iter().sum::<u32>() == s).count() as u64;
            let l: u64 = all.iter().map(|k| k.iter().sum::<u32>() as u64).filter(|&d| d <= s as u64).sum();
            let c = counts(n, s).unwrap();
            assert_eq!((c.m, c.n_s, c.l), (m, block, l), "n = {n}, s = {s}");
        }
    }
}

#[test]
fn enumeration_is_sorted_and_complete() {
    for n in 1..=4 {
        let mut all = brute_force(n, 6);
        all.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then(a.cmp(b)));
        let got: Vec<Vec<u32>> = enumerate(n, all.len()).iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(got, all);
    }
}

#[test]
fn two_dimensional_order() {
    let got: Vec<Vec<u32>> = enumerate(2, 6).iter().map(|k| k.entries().to_vec()).collect();
    assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]);
}

#[test]
fn overflow_is_reported() {
    assert!(counts(40, 200).is_err());
}

proptest! {
    #[test]
    fn blocks_partition_the_prefix(n in 1usize..5, s in 0u32..9) {
        let e = GradedEnumeration::up_to_degree(n, s).unwrap();
        let c = counts(n, s).unwrap();
        prop_assert_eq!(e.len() as u64, c.m);
        let mut start = 0;
        for d in 0..=s {
            let block = degree_block(n, d);
            prop_assert_eq!(&e.indices()[start..start + block.len()], &block[..]);
            start += block.len();
        }
        prop_assert_eq!(e.degree_sum(e.len()), c.l);
    }

    #[test]
    fn order_is_graded_then_lex(a in prop::collection::vec(0u32..6, 3), b in prop::collection::vec(0u32..6, 3)) {
        let (ka, kb) = (MultiIndex::new(a.clone()), MultiIndex::new(b.clone()));
        let expected = a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then(a.cmp(&b));
        prop_assert_eq!(ka.cmp(&kb), expected);
    }
}

mod common;

use proptest::prelude::*;
use synergist::info::{cond_entropy, cond_mutual_info, entropy, mutual_info};
use synergist::JointPmf;

fn pmf_strategy() -> impl Strategy<Value = JointPmf> {
    (prop::collection::vec(2usize..4, 3), any::<u64>())
        .prop_map(|(cards, seed)| JointPmf::random(&cards, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized(pmf in pmf_strategy()) {
        let total: f64 = pmf.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(pmf.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn entropy_matches_reference(pmf in pmf_strategy()) {
        for vars in [vec![0], vec![1, 2], vec![0, 1, 2]] {
            prop_assert!((entropy(&pmf, &vars).unwrap() - common::h(&pmf, &vars)).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_rule(pmf in pmf_strategy()) {
        let joint = entropy(&pmf, &[0, 1]).unwrap();
        let split = entropy(&pmf, &[0]).unwrap() + cond_entropy(&pmf, &[1], &[0]).unwrap();
        prop_assert!((joint - split).abs() < 1e-12);
        let lhs = mutual_info(&pmf, &[0], &[1, 2]).unwrap();
        let rhs = mutual_info(&pmf, &[0], &[1]).unwrap() + cond_mutual_info(&pmf, &[0], &[2], &[1]).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn symmetric_and_nonnegative(pmf in pmf_strategy()) {
        let ab = mutual_info(&pmf, &[0], &[1, 2]).unwrap();
        let ba = mutual_info(&pmf, &[1, 2], &[0]).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= 0.0);
        prop_assert!(cond_mutual_info(&pmf, &[0], &[1], &[2]).unwrap() >= 0.0);
    }

    #[test]
    fn data_processing(pmf in pmf_strategy(), map in prop::collection::vec(0usize..2, 3)) {
        let processed = pmf.append_redundant(2, |s| map[s[1]]).unwrap();
        let direct = mutual_info(&processed, &[0], &[1]).unwrap();
        let through = mutual_info(&processed, &[0], &[3]).unwrap();
        prop_assert!(through <= direct + 1e-12);
    }

    #[test]
    fn json_round_trip(pmf in pmf_strategy()) {
        let back = JointPmf::from_json(&pmf.to_json()).unwrap();
        prop_assert_eq!(back.cardinalities(), pmf.cardinalities());
        for (a, b) in back.probs().iter().zip(pmf.probs()) {
            prop_assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_round_trip(pmf in pmf_strategy()) {
        let back = JointPmf::read_csv(pmf.to_csv().as_bytes()).unwrap();
        prop_assert_eq!(back.cardinalities(), pmf.cardinalities());
        for (a, b) in back.probs().iter().zip(pmf.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hypercube_round_trip(pmf in pmf_strategy()) {
        let params = pmf.to_params();
        prop_assert_eq!(params.len(), JointPmf::num_params(pmf.cardinalities()).unwrap());
        prop_assert!(params.values().iter().all(|v| (0.0..=1.0).contains(v)));
        let back = JointPmf::from_params(pmf.cardinalities(), &params).unwrap();
        for (a, b) in back.probs().iter().zip(pmf.probs()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn permute_preserves_information(pmf in pmf_strategy()) {
        let swapped = pmf.permute(&[2, 0, 1]).unwrap();
        let before = mutual_info(&pmf, &[0, 1], &[2]).unwrap();
        let after = mutual_info(&swapped, &[1, 2], &[0]).unwrap();
        prop_assert!((before - after).abs() < 1e-12);
    }
}

//! Property tests for the loss references.

use distilforge_core::loss::{ce_loss, sdrrl_loss, sft_loss, ExampleLoss, TokenAgg, TokenDistribution};
use distilforge_core::record::TransferSubsetKind;
use proptest::prelude::*;

fn distribution() -> impl Strategy<Value = TokenDistribution> {
    prop::collection::vec(0.01f64..1.0, 2..8).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        TokenDistribution::new(raw.into_iter().map(|v| v / sum).collect()).unwrap()
    })
}

fn subset_kind() -> impl Strategy<Value = TransferSubsetKind> {
    prop::sample::select(TransferSubsetKind::ALL.to_vec())
}

fn tagged_losses(max: usize) -> impl Strategy<Value = Vec<ExampleLoss>> {
    prop::collection::vec((subset_kind(), 0.0f64..10.0), 1..max).prop_map(|items| {
        items
            .into_iter()
            .enumerate()
            .map(|(i, (subset, total))| {
                ExampleLoss::new(format!("e{i}"), subset, vec![total], TokenAgg::Mean).unwrap()
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn ce_loss_is_nonnegative_and_zero_only_on_hits(
        dists in prop::collection::vec(distribution(), 1..6),
        seed in 0u64..1000,
    ) {
        let gold: Vec<usize> = dists
            .iter()
            .enumerate()
            .map(|(i, d)| (seed as usize + i) % d.vocab_size())
            .collect();
        let loss = ce_loss("e", TransferSubsetKind::SourceSource, &gold, &dists, TokenAgg::Mean).unwrap();
        prop_assert!(loss.total >= 0.0);
        let all_hits = gold.iter().zip(&dists).all(|(&g, d)| d.prob(g) == 1.0);
        prop_assert_eq!(loss.total == 0.0, all_hits);
    }

    #[test]
    fn sdrrl_is_permutation_invariant(losses in tagged_losses(40), swap in any::<prop::sample::Index>()) {
        let baseline = sdrrl_loss(&losses).unwrap();
        let mut shuffled = losses.clone();
        shuffled.reverse();
        let i = swap.index(shuffled.len());
        shuffled.swap(0, i);
        let permuted = sdrrl_loss(&shuffled).unwrap();
        prop_assert!((baseline.total - permuted.total).abs() < 1e-9);
        prop_assert_eq!(baseline.per_subset.len(), permuted.per_subset.len());
    }

    #[test]
    fn duplicating_a_subset_does_not_move_the_total(losses in tagged_losses(30)) {
        let baseline = sdrrl_loss(&losses).unwrap();
        let target = losses[0].subset;
        let mut doubled = losses.clone();
        for loss in &losses {
            if loss.subset == target {
                let mut copy = loss.clone();
                copy.example_id.push_str("-dup");
                doubled.push(copy);
            }
        }
        let result = sdrrl_loss(&doubled).unwrap();
        prop_assert!((baseline.total - result.total).abs() < 1e-12);
        prop_assert!(
            (baseline.per_subset[&target] - result.per_subset[&target]).abs() < 1e-12
        );
    }

    #[test]
    fn adding_a_new_subset_with_positive_losses_increases_the_total(
        losses in tagged_losses(30),
        extra in 0.1f64..5.0,
    ) {
        let baseline = sdrrl_loss(&losses).unwrap();
        if let Some(absent) = TransferSubsetKind::ALL
            .iter()
            .find(|k| !baseline.per_subset.contains_key(k))
        {
            let mut extended = losses.clone();
            extended.push(
                ExampleLoss::new("extra".into(), *absent, vec![extra], TokenAgg::Mean).unwrap(),
            );
            let result = sdrrl_loss(&extended).unwrap();
            prop_assert!(result.total > baseline.total);
        }
    }

    #[test]
    fn single_subset_sdrrl_equals_sft(totals in prop::collection::vec(0.0f64..10.0, 1..30)) {
        let losses: Vec<ExampleLoss> = totals
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                ExampleLoss::new(format!("e{i}"), TransferSubsetKind::Completion, vec![t], TokenAgg::Mean)
                    .unwrap()
            })
            .collect();
        let sdrrl = sdrrl_loss(&losses).unwrap();
        let sft = sft_loss(&losses).unwrap();
        prop_assert!((sdrrl.total - sft).abs() < 1e-12);
    }
}

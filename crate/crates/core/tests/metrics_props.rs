use advids_core::metrics::{confusion, ConfusionMatrix};
use proptest::prelude::*;

fn counts() -> impl Strategy<Value = ConfusionMatrix> {
    (0..10_000u64, 0..10_000u64, 0..10_000u64, 0..10_000u64)
        .prop_map(|(tp, tn, fp, fn_)| ConfusionMatrix::new(tp, tn, fp, fn_))
}

proptest! {
    #[test]
    fn scores_are_percentages(cm in counts()) {
        let s = cm.scores();
        for v in [s.precision, s.recall, s.f1, s.accuracy] {
            prop_assert!((0.0..=100.0).contains(&v));
        }
    }

    #[test]
    fn scores_are_scale_invariant(cm in counts(), k in 1..50u64) {
        let big = ConfusionMatrix::new(cm.tp * k, cm.tn * k, cm.fp * k, cm.fn_ * k);
        let (a, b) = (cm.scores(), big.scores());
        for (x, y) in [(a.precision, b.precision), (a.recall, b.recall), (a.f1, b.f1), (a.accuracy, b.accuracy)] {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn f1_counts_identity(cm in counts()) {
        prop_assume!(cm.tp > 0);
        let direct = 200.0 * cm.tp as f64 / (2 * cm.tp + cm.fp + cm.fn_) as f64;
        prop_assert!((cm.f1() - direct).abs() < 1e-9);
        let lo = cm.precision().min(cm.recall());
        let hi = cm.precision().max(cm.recall());
        prop_assert!(cm.f1() >= lo - 1e-9 && cm.f1() <= hi + 1e-9);
    }

    #[test]
    fn confusion_counts_every_pair(pairs in prop::collection::vec((0..2u8, 0..2u8), 1..200)) {
        let (pred, actual): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
        let cm = confusion(&pred, &actual).unwrap();
        prop_assert_eq!(cm.total(), pairs.len() as u64);
        prop_assert_eq!(cm.tp + cm.fn_, actual.iter().filter(|&&y| y == 1).count() as u64);
        prop_assert_eq!(cm.tp + cm.fp, pred.iter().filter(|&&y| y == 1).count() as u64);
    }
}

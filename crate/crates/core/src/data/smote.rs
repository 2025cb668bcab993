use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{class_indices, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig { k_neighbors: 5 }
    }
}

/// How one synthetic row was made: `parent + gap · (neighbor − parent)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoteOrigin {
    /// Row index of the minority parent in the input dataset.
    pub parent: usize,
    /// Row index of the chosen neighbor in the input dataset.
    pub neighbor: usize,
    pub gap: f64,
}

/// Oversamples the minority class up to the majority count.
pub fn smote_balance(data: &Dataset, cfg: &SmoteConfig, rng: &mut Rng) -> Result<Dataset> {
    smote_with_origins(data, cfg, rng).map(|(d, _)| d)
}

/// [`smote_balance`] that also reports the parent, neighbor and gap of each
/// synthetic row. Original rows come first, unchanged; synthetic rows follow.
pub fn smote_with_origins(
    data: &Dataset,
    cfg: &SmoteConfig,
    rng: &mut Rng,
) -> Result<(Dataset, Vec<SmoteOrigin>)> {
    let counts = data.class_counts();
    if counts[0] == counts[1] {
        return Ok((data.clone(), Vec::new()));
    }
    let minority_class = if counts[0] < counts[1] { 0u8 } else { 1u8 };
    let members = &class_indices(data.labels())[minority_class as usize];
    let k = cfg.k_neighbors;
    if k == 0 || members.len() <= k {
        return Err(Error::Config(format!(
            "SMOTE needs more minority rows than k_neighbors (minority {}, k {k})",
            members.len()
        )));
    }

    let x = data.features();
    let neighbors = nearest_minority_neighbors(x, members, k);
    let needed = counts[minority_class as usize ^ 1] - members.len();
    let cols = x.cols();

    let mut extra = Vec::with_capacity(needed * cols);
    let mut origins = Vec::with_capacity(needed);
    for _ in 0..needed {
        let p = rng.below(members.len());
        let q = neighbors[p][rng.below(k)];
        let gap = rng.next_f64();
        let (parent, neighbor) = (members[p], members[q]);
        let (s, n) = (x.row(parent), x.row(neighbor));
        extra.extend(s.iter().zip(n).map(|(a, b)| a + gap * (b - a)));
        origins.push(SmoteOrigin {
            parent,
            neighbor,
            gap,
        });
    }

    let synthetic = Matrix::new(needed, cols, extra)?;
    let features = x.vstack(&synthetic)?;
    let mut labels = data.labels().to_vec();
    labels.resize(labels.len() + needed, minority_class);
    let out = Dataset::with_state(
        data.schema().clone(),
        features,
        labels,
        data.normalization().clone(),
    )?;
    Ok((out, origins))
}

/// For each minority row (by position in `members`), the positions of its `k`
/// nearest other minority rows under Euclidean distance; ties go to the lower index.
fn nearest_minority_neighbors(x: &Matrix, members: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(members.len());
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(members.len());
    for (i, &a) in members.iter().enumerate() {
        dist.clear();
        let ra = x.row(a);
        for (j, &b) in members.iter().enumerate() {
            if i != j {
                let d: f64 = ra
                    .iter()
                    .zip(x.row(b))
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum();
                dist.push((d, j));
            }
        }
        dist.select_nth_unstable_by(k - 1, |l, r| l.0.total_cmp(&r.0).then(l.1.cmp(&r.1)));
        let mut nearest: Vec<(f64, usize)> = dist[..k].to_vec();
        nearest.sort_unstable_by(|l, r| l.0.total_cmp(&r.0).then(l.1.cmp(&r.1)));
        out.push(nearest.into_iter().map(|(_, j)| j).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Schema;
    use alloc::vec;

    fn imbalanced(n_minority: usize, n_majority: usize, seed: u64) -> Dataset {
        let mut rng = Rng::new(seed);
        let n = n_minority + n_majority;
        let data = (0..n * 3).map(|_| rng.normal()).collect();
        let mut labels = vec![1u8; n_majority];
        labels.extend(vec![0u8; n_minority]);
        Dataset::new(
            Schema::synthetic(3),
            Matrix::new(n, 3, data).unwrap(),
            labels,
        )
        .unwrap()
    }

    #[test]
    fn balanced_input_unchanged() {
        let d = imbalanced(20, 20, 1);
        let out = smote_balance(&d, &SmoteConfig::default(), &mut Rng::new(1)).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn equalizes_and_keeps_originals() {
        let d = imbalanced(12, 80, 2);
        let out = smote_balance(&d, &SmoteConfig::default(), &mut Rng::new(2)).unwrap();
        assert_eq!(out.class_counts(), [80, 80]);
        for r in 0..d.len() {
            assert_eq!(out.features().row(r), d.features().row(r));
            assert_eq!(out.labels()[r], d.labels()[r]);
        }
    }

    #[test]
    fn synthetic_rows_lie_on_knn_segments() {
        let d = imbalanced(15, 60, 3);
        let cfg = SmoteConfig { k_neighbors: 3 };
        let (out, origins) = smote_with_origins(&d, &cfg, &mut Rng::new(3)).unwrap();
        let x = d.features();
        let minority: Vec<usize> = (0..d.len()).filter(|&i| d.labels()[i] == 0).collect();
        for (o, row) in origins.iter().zip(out.features().row_iter().skip(d.len())) {
            // brute-force k-NN of the parent
            let mut ds: Vec<(f64, usize)> = minority
                .iter()
                .filter(|&&j| j != o.parent)
                .map(|&j| {
                    let d: f64 = x
                        .row(o.parent)
                        .iter()
                        .zip(x.row(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (d, j)
                })
                .collect();
            ds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            assert!(ds[..3].iter().any(|&(_, j)| j == o.neighbor));
            assert!((0.0..=1.0).contains(&o.gap));
            for ((v, s), n) in row.iter().zip(x.row(o.parent)).zip(x.row(o.neighbor)) {
                assert!((v - (s + o.gap * (n - s))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn minority_must_exceed_k() {
        let d = imbalanced(5, 30, 4);
        let r = smote_balance(&d, &SmoteConfig::default(), &mut Rng::new(1));
        assert!(matches!(r, Err(Error::Config(_))));
        let r = smote_balance(&d, &SmoteConfig { k_neighbors: 0 }, &mut Rng::new(1));
        assert!(r.is_err());
    }

    #[test]
    fn seeded() {
        let d = imbalanced(10, 40, 5);
        let a = smote_balance(&d, &SmoteConfig::default(), &mut Rng::new(7)).unwrap();
        let b = smote_balance(&d, &SmoteConfig::default(), &mut Rng::new(7)).unwrap();
        assert_eq!(a, b);
    }
}

use serde::{Deserialize, Serialize};

use super::data::feature_dim;
use crate::error::{Error, Result};
use crate::gaussian_shift::LabeledSample;

/// k-nearest-neighbour classifier over a stored training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    points: Vec<Vec<f64>>,
    labels: Vec<f64>,
    sq_norms: Vec<f64>,
    k: usize,
}

impl KnnModel {
    pub fn fit(data: &[LabeledSample], k: usize) -> Result<Self> {
        feature_dim(data)?;
        if k == 0 || k > data.len() {
            return Err(Error::domain(format!(
                "k = {k} outside [1, {}]",
                data.len()
            )));
        }
        let points: Vec<Vec<f64>> = data.iter().map(|s| s.x.clone()).collect();
        let sq_norms = points.iter().map(|p| p.iter().map(|v| v * v).sum()).collect();
        Ok(KnnModel {
            points,
            labels: data.iter().map(|s| s.y).collect(),
            sq_norms,
            k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of features the model reads.
    pub fn dims(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub(crate) fn sq_norms(&self) -> &[f64] {
        &self.sq_norms
    }

    pub fn classify(&self, x: &[f64]) -> f64 {
        let dims = self.dims();
        let scores: Vec<f64> = self
            .points
            .iter()
            .map(|p| p.iter().zip(&x[..dims]).map(|(a, b)| (a - b) * (a - b)).sum())
            .collect();
        self.vote(&scores)
    }

    /// Majority vote among the `k` smallest scores.
    ///
    /// Any score that orders training points like the Euclidean distance to
    /// the query works. Equal scores go to the lower training index; a split
    /// vote goes to the single nearest neighbour.
    pub(crate) fn vote(&self, scores: &[f64]) -> f64 {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        let by_score = |a: &usize, b: &usize| scores[*a].total_cmp(&scores[*b]).then(a.cmp(b));
        if self.k < order.len() {
            order.select_nth_unstable_by(self.k - 1, by_score);
            order.truncate(self.k);
        }
        order.sort_unstable_by(by_score);
        let tally: f64 = order.iter().map(|&i| self.labels[i]).sum();
        if tally > 0.0 {
            1.0
        } else if tally < 0.0 {
            -1.0
        } else {
            self.labels[order[0]]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn sample(x: Vec<f64>, y: f64) -> LabeledSample {
        LabeledSample::new(x, y).unwrap()
    }

    /// Full sort of (distance, index) pairs.
    fn exhaustive(data: &[LabeledSample], k: usize, q: &[f64]) -> f64 {
        let mut d: Vec<(f64, usize)> = data
            .iter()
            .enumerate()
            .map(|(i, s)| (s.x.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum(), i))
            .collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let votes: f64 = d[..k].iter().map(|&(_, i)| data[i].y).sum();
        if votes == 0.0 {
            data[d[0].1].y
        } else {
            votes.signum()
        }
    }

    #[test]
    fn exact_match_with_k1() {
        let data = vec![sample(vec![0.0, 0.0], 1.0), sample(vec![1.0, 1.0], -1.0)];
        let m = KnnModel::fit(&data, 1).unwrap();
        assert_eq!(m.classify(&[1.0, 1.0]), -1.0);
        assert_eq!(m.classify(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn majority_of_three() {
        let data = vec![
            sample(vec![0.0], 1.0),
            sample(vec![0.1], 1.0),
            sample(vec![-0.1], -1.0),
            sample(vec![5.0], -1.0),
        ];
        let m = KnnModel::fit(&data, 3).unwrap();
        assert_eq!(m.classify(&[0.0]), 1.0);
    }

    #[test]
    fn even_split_goes_to_nearest() {
        let data = vec![sample(vec![0.0], -1.0), sample(vec![1.0], 1.0)];
        let m = KnnModel::fit(&data, 2).unwrap();
        assert_eq!(m.classify(&[0.2]), -1.0);
        assert_eq!(m.classify(&[0.9]), 1.0);
        // equidistant: lower index wins
        assert_eq!(m.classify(&[0.5]), -1.0);
    }

    #[test]
    fn agrees_with_exhaustive_scan() {
        let mut rng = rng_from_seed(21);
        let data: Vec<_> = (0..20)
            .map(|_| {
                sample(
                    (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                )
            })
            .collect();
        let m = KnnModel::fit(&data, 3).unwrap();
        for _ in 0..100 {
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
            assert_eq!(m.classify(&q), exhaustive(&data, 3, &q));
        }
    }

    #[test]
    fn invalid_k() {
        let data = vec![sample(vec![0.0], 1.0)];
        assert!(KnnModel::fit(&data, 0).is_err());
        assert!(KnnModel::fit(&data, 2).is_err());
        assert!(KnnModel::fit(&[], 1).is_err());
    }
}

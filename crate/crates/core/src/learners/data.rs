use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian_shift::LabeledSample;

/// First `n_sub` samples, in order.
pub fn subsample(data: &[LabeledSample], n_sub: usize) -> Result<Vec<LabeledSample>> {
    if n_sub == 0 || n_sub > data.len() {
        return Err(Error::domain(format!(
            "subsample size {n_sub} outside [1, {}]",
            data.len()
        )));
    }
    Ok(data[..n_sub].to_vec())
}

/// Keep the first `d_proj` coordinates of every sample.
pub fn project(data: &[LabeledSample], d_proj: usize) -> Result<Vec<LabeledSample>> {
    let d = feature_dim(data)?;
    if d_proj == 0 || d_proj > d {
        return Err(Error::domain(format!("projection size {d_proj} outside [1, {d}]")));
    }
    Ok(data
        .iter()
        .map(|s| LabeledSample {
            x: s.x[..d_proj].to_vec(),
            y: s.y,
        })
        .collect())
}

/// Shared feature dimension of a nonempty dataset.
pub fn feature_dim(data: &[LabeledSample]) -> Result<usize> {
    let first = data
        .first()
        .ok_or_else(|| Error::domain("dataset is empty"))?;
    let d = first.x.len();
    if d == 0 {
        return Err(Error::domain("samples have no features"));
    }
    for s in data {
        if s.x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.x.len(),
            });
        }
    }
    Ok(d)
}

/// Design matrix (rows are samples) and label vector.
pub(crate) fn design(data: &[LabeledSample]) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let d = feature_dim(data)?;
    let x = DMatrix::from_fn(data.len(), d, |i, j| data[i].x[j]);
    let y = DVector::from_iterator(data.len(), data.iter().map(|s| s.y));
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Vec<LabeledSample> {
        (0..5)
            .map(|i| LabeledSample {
                x: vec![i as f64, -(i as f64), 2.0 * i as f64],
                y: if i % 2 == 0 { 1.0 } else { -1.0 },
            })
            .collect()
    }

    #[test]
    fn subsample_is_prefix() {
        let data = toy();
        assert_eq!(subsample(&data, 5).unwrap(), data);
        assert_eq!(subsample(&data, 1).unwrap(), vec![data[0].clone()]);
        assert!(subsample(&data, 0).is_err());
        assert!(subsample(&data, 6).is_err());
    }

    #[test]
    fn projection_keeps_prefix() {
        let data = toy();
        assert_eq!(project(&data, 3).unwrap(), data);
        let p = project(&data, 2).unwrap();
        assert_eq!(p[3].x, vec![3.0, -3.0]);
        assert!(project(&data, 4).is_err());
        assert!(project(&data, 0).is_err());
    }

    #[test]
    fn ragged_data_rejected() {
        let mut data = toy();
        data[2].x.pop();
        assert!(feature_dim(&data).is_err());
    }
}

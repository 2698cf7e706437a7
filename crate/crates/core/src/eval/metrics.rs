//! Normalized mean error and its normalization factors.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use std::collections::BTreeMap;

pub const LEFT_EYE_OUTER: &str = "left_eye_outer";
pub const RIGHT_EYE_OUTER: &str = "right_eye_outer";

/// Mean per-vertex Euclidean distance between `pred` and `gt`, divided by
/// the normalization factor `d`.
pub fn nme(pred: &DenseMatrix, gt: &DenseMatrix, d: f64) -> Result<f64> {
    if pred.rows() != gt.rows() || pred.cols() != 3 || gt.cols() != 3 {
        return Err(CoreError::shape(format!(
            "prediction is {}x{} and ground truth {}x{}, expected matching Nx3",
            pred.rows(),
            pred.cols(),
            gt.rows(),
            gt.cols()
        )));
    }
    if pred.rows() == 0 {
        return Err(CoreError::invalid("error needs at least one point"));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(CoreError::invalid(format!(
            "normalization factor must be positive and finite, got {d}"
        )));
    }
    let mut sum = 0.0;
    for i in 0..pred.rows() {
        let p = pred.row(i);
        let g = gt.row(i);
        sum += ((p[0] - g[0]).powi(2) + (p[1] - g[1]).powi(2) + (p[2] - g[2]).powi(2)).sqrt();
    }
    Ok(sum / (pred.rows() as f64 * d))
}

fn xy_extents(points: &DenseMatrix) -> Result<(f64, f64)> {
    if points.rows() < 2 {
        return Err(CoreError::invalid(
            "bounding box needs at least two points",
        ));
    }
    if points.cols() < 2 {
        return Err(CoreError::shape(format!(
            "bounding box needs x/y columns, points have {}",
            points.cols()
        )));
    }
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for i in 0..points.rows() {
        for j in 0..2 {
            let v = points.get(i, j);
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    let (w, h) = (max[0] - min[0], max[1] - min[1]);
    if !(w > 0.0) || !(h > 0.0) {
        return Err(CoreError::invalid(format!(
            "bounding box has zero extent ({w} x {h})"
        )));
    }
    Ok((w, h))
}

/// `sqrt(width * height)` of the axis-aligned x/y bounding box.
pub fn bbox_size(points: &DenseMatrix) -> Result<f64> {
    let (w, h) = xy_extents(points)?;
    Ok((w * h).sqrt())
}

/// Diagonal length of the axis-aligned x/y bounding box.
pub fn bbox_diagonal(points: &DenseMatrix) -> Result<f64> {
    let (w, h) = xy_extents(points)?;
    Ok(w.hypot(h))
}

/// Euclidean distance between the two labeled outer eye corners.
pub fn interocular_distance(
    points: &DenseMatrix,
    labels: &BTreeMap<String, usize>,
) -> Result<f64> {
    let corner = |label: &str| -> Result<[f64; 3]> {
        let &idx = labels
            .get(label)
            .ok_or_else(|| CoreError::invalid(format!("landmark label {label:?} is missing")))?;
        if idx >= points.rows() {
            return Err(CoreError::invalid(format!(
                "landmark {label:?} points at row {idx}, but there are only {} points",
                points.rows()
            )));
        }
        let row = points.row(idx);
        Ok([row[0], row[1], row[2]])
    };
    let l = corner(LEFT_EYE_OUTER)?;
    let r = corner(RIGHT_EYE_OUTER)?;
    Ok(((l[0] - r[0]).powi(2) + (l[1] - r[1]).powi(2) + (l[2] - r[2]).powi(2)).sqrt())
}

/// Choice of normalization factor for [`nme`], computed from ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// `sqrt(w * h)` of the x/y bounding box.
    BboxSqrtWh,
    /// Diagonal of the x/y bounding box.
    BboxDiagonal,
    /// Distance between labeled outer eye corners.
    Interocular,
}

impl Normalizer {
    pub fn parse(s: &str) -> Result<Normalizer> {
        match s {
            "bbox" => Ok(Normalizer::BboxSqrtWh),
            "diagonal" => Ok(Normalizer::BboxDiagonal),
            "interocular" => Ok(Normalizer::Interocular),
            other => Err(CoreError::invalid(format!(
                "unknown normalizer {other:?}, expected bbox, diagonal, or interocular"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalizer::BboxSqrtWh => "bbox",
            Normalizer::BboxDiagonal => "diagonal",
            Normalizer::Interocular => "interocular",
        }
    }

    pub fn compute(self, gt: &DenseMatrix, labels: &BTreeMap<String, usize>) -> Result<f64> {
        match self {
            Normalizer::BboxSqrtWh => bbox_size(gt),
            Normalizer::BboxDiagonal => bbox_diagonal(gt),
            Normalizer::Interocular => {
                let d = interocular_distance(gt, labels)?;
                if !(d > 0.0) {
                    return Err(CoreError::invalid(
                        "interocular distance is zero, cannot normalize by it",
                    ));
                }
                Ok(d)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(left: usize, right: usize) -> BTreeMap<String, usize> {
        BTreeMap::from([
            (LEFT_EYE_OUTER.to_string(), left),
            (RIGHT_EYE_OUTER.to_string(), right),
        ])
    }

    #[test]
    fn nme_hand_cases() {
        let gt = DenseMatrix::from_vec(1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(nme(&gt, &gt, 10.0).unwrap(), 0.0);
        let pred = DenseMatrix::from_vec(1, 3, vec![4.0, 6.0, 3.0]).unwrap();
        assert_eq!(nme(&pred, &gt, 10.0).unwrap(), 0.5);
    }

    #[test]
    fn nme_matches_direct_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let pred = DenseMatrix::from_fn(20, 3, |_, _| rng.gen_range(-1.0..1.0));
        let gt = DenseMatrix::from_fn(20, 3, |_, _| rng.gen_range(-1.0..1.0));
        let direct: f64 = (0..20)
            .map(|i| {
                let (p, g) = (pred.row(i), gt.row(i));
                (0..3).map(|j| (p[j] - g[j]).powi(2)).sum::<f64>().sqrt()
            })
            .sum::<f64>()
            / 20.0
            / 0.7;
        assert!((nme(&pred, &gt, 0.7).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn nme_is_translation_invariant_and_scales_inversely_in_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let pred = DenseMatrix::from_fn(9, 3, |_, _| rng.gen_range(-1.0..1.0));
        let gt = DenseMatrix::from_fn(9, 3, |_, _| rng.gen_range(-1.0..1.0));
        let shift = |m: &DenseMatrix| {
            DenseMatrix::from_fn(m.rows(), 3, |i, j| m.get(i, j) + [5.0, -2.0, 11.0][j])
        };
        let base = nme(&pred, &gt, 2.0).unwrap();
        let moved = nme(&shift(&pred), &shift(&gt), 2.0).unwrap();
        assert!((base - moved).abs() < 1e-12);
        let doubled = nme(&pred, &gt, 4.0).unwrap();
        assert!((doubled * 2.0 - base).abs() < 1e-12);
        assert!(nme(&pred, &gt, 0.0).is_err());
        assert!(nme(&pred, &gt, -1.0).is_err());
    }

    #[test]
    fn bbox_hand_cases() {
        let square = DenseMatrix::from_vec(
            4,
            3,
            vec![
                0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 1.0, 1.0, -0.5, 0.0, 1.0, 9.0,
            ],
        )
        .unwrap();
        assert_eq!(bbox_size(&square).unwrap(), 1.0);
        assert_eq!(bbox_diagonal(&square).unwrap(), 2.0f64.sqrt());

        let rect = DenseMatrix::from_vec(2, 3, vec![0.0, 0.0, 0.0, 2.0, 8.0, 0.0]).unwrap();
        assert_eq!(bbox_size(&rect).unwrap(), 4.0);

        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let cloud = DenseMatrix::from_fn(30, 3, |_, _| rng.gen_range(-3.0..3.0));
        let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for i in 0..30 {
            for j in 0..2 {
                min[j] = min[j].min(cloud.get(i, j));
                max[j] = max[j].max(cloud.get(i, j));
            }
        }
        let expect = ((max[0] - min[0]) * (max[1] - min[1])).sqrt();
        assert!((bbox_size(&cloud).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn degenerate_boxes_are_rejected() {
        let one = DenseMatrix::from_vec(1, 3, vec![0.0, 0.0, 0.0]).unwrap();
        assert!(bbox_size(&one).is_err());
        // all points on a vertical line: zero width
        let line = DenseMatrix::from_vec(3, 3, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 2.0, 0.0])
            .unwrap();
        assert!(bbox_size(&line).unwrap_err().to_string().contains("zero"));
    }

    #[test]
    fn interocular_hand_cases() {
        let points =
            DenseMatrix::from_vec(3, 3, vec![9.0, 9.0, 9.0, 0.0, 0.0, 0.0, 3.0, 4.0, 0.0])
                .unwrap();
        assert_eq!(interocular_distance(&points, &labels(1, 2)).unwrap(), 5.0);
        assert_eq!(interocular_distance(&points, &labels(1, 1)).unwrap(), 0.0);

        let missing = BTreeMap::from([(LEFT_EYE_OUTER.to_string(), 0)]);
        let err = interocular_distance(&points, &missing).unwrap_err().to_string();
        assert!(err.contains(RIGHT_EYE_OUTER), "{err}");
        assert!(interocular_distance(&points, &labels(0, 7)).is_err());
    }

    #[test]
    fn normalizer_parses_and_computes() {
        assert_eq!(Normalizer::parse("bbox").unwrap(), Normalizer::BboxSqrtWh);
        assert_eq!(
            Normalizer::parse("diagonal").unwrap(),
            Normalizer::BboxDiagonal
        );
        assert_eq!(
            Normalizer::parse("interocular").unwrap(),
            Normalizer::Interocular
        );
        assert!(Normalizer::parse("other").is_err());

        let points =
            DenseMatrix::from_vec(2, 3, vec![0.0, 0.0, 0.0, 3.0, 4.0, 0.0]).unwrap();
        assert_eq!(
            Normalizer::BboxSqrtWh
                .compute(&points, &BTreeMap::new())
                .unwrap(),
            12.0f64.sqrt()
        );
        assert_eq!(
            Normalizer::Interocular
                .compute(&points, &labels(0, 1))
                .unwrap(),
            5.0
        );
        // identical corners: distance 0 is rejected as a normalizer
        assert!(Normalizer::Interocular
            .compute(&points, &labels(1, 1))
            .is_err());
    }
}

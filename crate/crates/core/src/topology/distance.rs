use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    /// Per-component absolute differences without wrapping (values up to L - 1).
    Raw,
    /// Each component wrapped to at most half the extent.
    MinImage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Euclidean norm of the component differences.
    Norm,
    /// A single component, by axis index.
    Component(usize),
}

/// Distance between two embedding positions on a periodic domain.
pub fn jump_distance(
    from: &[usize],
    to: &[usize],
    extents: &[usize],
    mode: DistanceMode,
    metric: Metric,
) -> Result<f64> {
    if from.len() != extents.len() {
        return Err(Error::DimensionMismatch {
            expected: extents.len(),
            got: from.len(),
        });
    }
    if to.len() != extents.len() {
        return Err(Error::DimensionMismatch {
            expected: extents.len(),
            got: to.len(),
        });
    }
    let delta = |k: usize| -> f64 {
        let d = from[k].abs_diff(to[k]);
        let d = match mode {
            DistanceMode::Raw => d,
            DistanceMode::MinImage => d.min(extents[k] - d),
        };
        d as f64
    };
    match metric {
        Metric::Norm => Ok((0..extents.len())
            .map(|k| delta(k).powi(2))
            .sum::<f64>()
            .sqrt()),
        Metric::Component(axis) if axis < extents.len() => Ok(delta(axis)),
        Metric::Component(axis) => Err(Error::DimensionMismatch {
            expected: extents.len(),
            got: axis + 1,
        }),
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn one_dimensional() {
        let d = |mode| jump_distance(&[1], &[9], &[10], mode, Metric::Norm).unwrap();
        assert_eq!(d(DistanceMode::Raw), 8.0);
        assert_eq!(d(DistanceMode::MinImage), 2.0);
    }

    #[test]
    fn two_dimensional() {
        let raw = |a: &[usize], b: &[usize], m| {
            jump_distance(a, b, &[10, 10], DistanceMode::Raw, m).unwrap()
        };
        assert_eq!(raw(&[0, 0], &[3, 0], Metric::Norm), 3.0);
        assert!((raw(&[0, 0], &[5, 5], Metric::Norm) - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(raw(&[0, 2], &[5, 9], Metric::Component(1)), 7.0);
        assert_eq!(
            jump_distance(
                &[0, 2],
                &[5, 9],
                &[10, 10],
                DistanceMode::MinImage,
                Metric::Component(1)
            )
            .unwrap(),
            3.0
        );
    }

    #[test]
    fn dimension_mismatch() {
        assert!(jump_distance(&[0], &[1, 2], &[4, 4], DistanceMode::Raw, Metric::Norm).is_err());
        assert!(jump_distance(&[0], &[1], &[4], DistanceMode::Raw, Metric::Component(1)).is_err());
    }

    proptest! {
        #[test]
        fn symmetric(l in 2usize..50, a in proptest::collection::vec(0usize..1000, 2),
                     b in proptest::collection::vec(0usize..1000, 2), wrap in any::<bool>()) {
            let a: Vec<usize> = a.iter().map(|v| v % l).collect();
            let b: Vec<usize> = b.iter().map(|v| v % l).collect();
            let mode = if wrap { DistanceMode::MinImage } else { DistanceMode::Raw };
            let ext = [l, l];
            let d1 = jump_distance(&a, &b, &ext, mode, Metric::Norm).unwrap();
            let d2 = jump_distance(&b, &a, &ext, mode, Metric::Norm).unwrap();
            prop_assert_eq!(d1, d2);
            if wrap {
                prop_assert!(d1 <= (2.0f64).sqrt() * l as f64 / 2.0 + 1e-9);
            }
        }
    }
}

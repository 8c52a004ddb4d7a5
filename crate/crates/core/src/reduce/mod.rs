//! Supervised dimensionality reduction and class-separability measures.

mod res;
mod scatter;
mod ulda;

pub use res::{res_index, res_index_general, ClassStats};
pub use scatter::{scatter_export, write_scatter};
pub use ulda::{fit_ulda, project, UldaProjection, RANK_TOLERANCE};

use crate::error::{Error, Result};

/// Check labels lie in `0..n_classes` and every class has at least
/// `min_count` samples; returns per-class counts.
pub(crate) fn class_counts(y: &[usize], n_classes: usize, min_count: usize) -> Result<Vec<usize>> {
    if n_classes < 2 {
        return Err(Error::DegenerateClasses(format!(
            "need at least 2 classes, got {n_classes}"
        )));
    }
    let mut counts = vec![0usize; n_classes];
    for &label in y {
        if label >= n_classes {
            return Err(Error::DegenerateClasses(format!(
                "label {label} outside 0..{n_classes}"
            )));
        }
        counts[label] += 1;
    }
    if let Some((k, &c)) = counts.iter().enumerate().find(|(_, &c)| c < min_count) {
        return Err(Error::DegenerateClasses(format!(
            "class {k} has {c} samples, need at least {min_count}"
        )));
    }
    Ok(counts)
}

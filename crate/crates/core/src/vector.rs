//! Small dense-vector helpers shared by the feature extractors.

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

pub(crate) fn is_zero(u: &[f64]) -> bool {
    u.iter().all(|&x| x == 0.0)
}

/// Cosine similarity, or `None` when either side is the zero vector.
pub(crate) fn cosine(u: &[f64], v: &[f64]) -> Option<f64> {
    debug_assert_eq!(u.len(), v.len());
    if is_zero(u) || is_zero(v) {
        return None;
    }
    Some((dot(u, v) / (norm(u) * norm(v))).clamp(-1.0, 1.0))
}

/// Accumulates a running sum of vectors and yields their mean.
#[derive(Debug, Clone)]
pub(crate) struct MeanAccumulator {
    sum: Vec<f64>,
    count: usize,
}

impl MeanAccumulator {
    pub(crate) fn new(dimension: usize) -> Self {
        MeanAccumulator {
            sum: vec![0.0; dimension],
            count: 0,
        }
    }

    pub(crate) fn add<T: Copy + Into<f64>>(&mut self, v: &[T]) {
        for (s, &x) in self.sum.iter_mut().zip(v) {
            *s += x.into();
        }
        self.count += 1;
    }

    pub(crate) fn add_zero(&mut self) {
        self.count += 1;
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }

    /// The mean, or the zero vector when nothing was added.
    pub(crate) fn mean(mut self) -> Vec<f64> {
        if self.count > 0 {
            let n = self.count as f64;
            self.sum.iter_mut().for_each(|s| *s /= n);
        }
        self.sum
    }
}

//! Compensated summation.
//!
//! Several series in this crate (notably the smooth pair-correlation density
//! at small separations) are sums of large terms that cancel to an O(1)
//! result; a running compensation term keeps the rounding error at the level
//! of the result rather than of the largest term.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<KahanSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancelling_series() {
        // 1 + 1e100 + 1 - 1e100 = 2, naive summation loses the ones.
        let mut k = KahanSum::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            k.add(x);
        }
        assert_eq!(k.value(), 2.0);
    }

    #[test]
    fn matches_exact_rational_sum() {
        let xs: Vec<f64> = (1..=100_000).map(|k| 1.0 / k as f64).collect();
        let harmonic = sum(&xs);
        // Reference from summing smallest-first, which is nearly exact here.
        let mut rev = xs.clone();
        rev.reverse();
        let reference = sum(&rev);
        assert!((harmonic - reference).abs() < 1e-12);
    }
}

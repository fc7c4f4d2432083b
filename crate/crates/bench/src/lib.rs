//! Shared inputs for the pipeline benchmarks.

use moykr_core::BraidSpec;

/// Braids benchmarked by default: a knot and a link at two levels.
pub fn sample_specs() -> Vec<BraidSpec> {
    [(2, 3), (2, 8), (4, 7), (6, 12)].into_iter().map(|(n, k)| BraidSpec::new(n, k).expect("valid spec")).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn samples_are_valid() {
        assert_eq!(super::sample_specs().len(), 4);
    }
}

//! Term-budget schedules.

use crate::error::{CliError, CliResult};

/// Budget schedule `B = ceil(c · n^{2/(2-α)})` for the fast-rate regime of
/// finite-class ranking ERM, `α ∈ [0, 1]`. At α = 0 this is the linear
/// budget `c·n`; at α = 1 it reaches `c·n²`. No claim is made about the
/// rate constant itself.
pub fn fast_rate_budget(n: u64, alpha: f64, c: f64) -> CliResult<u64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CliError::domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if !(c > 0.0) || n == 0 {
        return Err(CliError::domain(
            "fast-rate budget needs c > 0 and n >= 1".to_string(),
        ));
    }
    let b = (c * (n as f64).powf(2.0 / (2.0 - alpha))).ceil();
    if !b.is_finite() || b > u64::MAX as f64 {
        return Err(CliError::domain(format!("budget overflows: {b}")));
    }
    Ok(b as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        // alpha = 0: B = ceil(c n); alpha = 1: B = ceil(c n^2)
        assert_eq!(fast_rate_budget(1000, 0.0, 1.0).unwrap(), 1000);
        assert_eq!(fast_rate_budget(1000, 0.0, 2.5).unwrap(), 2500);
        assert_eq!(fast_rate_budget(1000, 1.0, 1.0).unwrap(), 1_000_000);
    }

    #[test]
    fn monotone_in_alpha() {
        let mut prev = 0;
        for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let b = fast_rate_budget(500, alpha, 1.0).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn domain_checks() {
        assert!(fast_rate_budget(100, -0.1, 1.0).is_err());
        assert!(fast_rate_budget(100, 1.5, 1.0).is_err());
        assert!(fast_rate_budget(100, 0.5, 0.0).is_err());
        assert!(fast_rate_budget(0, 0.5, 1.0).is_err());
    }
}

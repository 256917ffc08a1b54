//! Benchmark scoring formulas.

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum MetricError {
    #[error("best-known cost {best} exceeds achieved cost {achieved}; best-known bookkeeping is broken")]
    BestAboveAchieved { best: u64, achieved: u64 },
}

/// Cost-quality score: `C*/C` against the best known cost, 0 for unsolved.
/// Zero-cost optima score 1 when matched exactly.
pub fn sat_score(best_known: u64, achieved: Option<u64>) -> Result<f64, MetricError> {
    match achieved {
        None => Ok(0.0),
        Some(c) => {
            if best_known > c {
                return Err(MetricError::BestAboveAchieved { best: best_known, achieved: c });
            }
            if c == 0 {
                return Ok(1.0);
            }
            Ok(best_known as f64 / c as f64)
        }
    }
}

pub const DEFAULT_AGL_HORIZON_S: f64 = 900.0;

/// Time score: `1 - log(T)/log(horizon)`, clamped to [0, 1] so runtimes
/// at or under one second score 1 and runtimes at or past the horizon
/// score 0. Callers score unsolved runs as 0 themselves.
pub fn agl_score(runtime_s: f64, horizon_s: f64) -> f64 {
    debug_assert!(runtime_s >= 0.0 && horizon_s > 1.0);
    if runtime_s <= 1.0 {
        return 1.0;
    }
    (1.0 - runtime_s.ln() / horizon_s.ln()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sat_score_cases() {
        assert_eq!(sat_score(3, Some(3)).unwrap(), 1.0);
        assert_eq!(sat_score(3, Some(4)).unwrap(), 0.75);
        assert_eq!(sat_score(3, None).unwrap(), 0.0);
        assert_eq!(sat_score(0, Some(0)).unwrap(), 1.0);
        assert!(sat_score(5, Some(3)).is_err());
    }

    #[test]
    fn agl_score_cases() {
        let h = DEFAULT_AGL_HORIZON_S;
        assert_eq!(agl_score(900.0, h), 0.0);
        assert_eq!(agl_score(1.0, h), 1.0);
        assert_eq!(agl_score(0.0, h), 1.0);
        assert_eq!(agl_score(2000.0, h), 0.0);
        let expected = 1.0 - 30f64.ln() / 900f64.ln();
        assert!((agl_score(30.0, h) - expected).abs() < 1e-9);
    }

    #[test]
    fn agl_monotone_decreasing() {
        let h = DEFAULT_AGL_HORIZON_S;
        let mut last = 1.0;
        for t in [1.0, 2.0, 10.0, 100.0, 500.0, 899.0, 900.0] {
            let s = agl_score(t, h);
            assert!(s <= last);
            last = s;
        }
    }
}

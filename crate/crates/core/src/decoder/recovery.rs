//! Local time recovery for the sliding-window decoder.
//!
//! Each window's centre is known on the tag's clock (bits are counted from
//! the preamble) and measured on the reader's clock (correlation peak). The
//! next centre is predicted from the line through the preamble anchor
//! `(0, origin)` and the latest measurement. With an exact measurement the
//! prediction error is `(origin_hat - origin)·(1 - s[i+1]/s[i])`, which
//! vanishes as the packet grows.

/// Bounds on the estimated clock ratio.
pub const CLOCK_RATIO_RANGE: (f64, f64) = (0.9, 1.1);

#[derive(Debug, Clone, PartialEq)]
pub struct TimeRecoveryState {
    /// Reader-clock estimate of the preamble start (the regression anchor).
    pub origin_us: f64,
    /// Latest window centre on the reader clock.
    pub reader_center_us: Option<f64>,
    /// Latest window centre on the tag clock, measured from the preamble start.
    pub tag_center_us: Option<f64>,
    /// Reader time elapsed per unit of tag time.
    pub clock_ratio: f64,
    least_squares: Option<LeastSquares>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct LeastSquares {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    sxy: f64,
    intercept: f64,
}

impl LeastSquares {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.sxy += x * y;
    }
}

impl TimeRecoveryState {
    pub fn new(origin_us: f64, clock_ratio_prior: f64) -> Self {
        Self {
            origin_us,
            reader_center_us: None,
            tag_center_us: None,
            clock_ratio: clamp_ratio(clock_ratio_prior),
            least_squares: None,
        }
    }

    /// Regress over every past window (with the anchor) instead of the two-point line.
    pub fn with_least_squares(mut self) -> Self {
        let mut ls = LeastSquares { intercept: self.origin_us, ..Default::default() };
        ls.push(0.0, self.origin_us);
        self.least_squares = Some(ls);
        self
    }

    pub fn predict(&self, tag_us: f64) -> f64 {
        match &self.least_squares {
            Some(ls) if ls.n >= 2.0 => ls.intercept + self.clock_ratio * tag_us,
            _ => self.origin_us + self.clock_ratio * tag_us,
        }
    }

    pub fn observe(&mut self, tag_us: f64, reader_us: f64) {
        self.tag_center_us = Some(tag_us);
        self.reader_center_us = Some(reader_us);
        if let Some(ls) = &mut self.least_squares {
            ls.push(tag_us, reader_us);
            let denom = ls.n * ls.sxx - ls.sx * ls.sx;
            if denom.abs() > f64::EPSILON {
                let slope = (ls.n * ls.sxy - ls.sx * ls.sy) / denom;
                self.clock_ratio = clamp_ratio(slope);
                ls.intercept = (ls.sy - self.clock_ratio * ls.sx) / ls.n;
            }
        } else if tag_us > 0.0 {
            self.clock_ratio = clamp_ratio((reader_us - self.origin_us) / tag_us);
        }
    }
}

fn clamp_ratio(k: f64) -> f64 {
    k.clamp(CLOCK_RATIO_RANGE.0, CLOCK_RATIO_RANGE.1)
}

/// Boundary-estimate errors of the two-point predictor on noiseless timing.
///
/// `tag_centers_us` are the window centres on the tag clock; the true reader
/// time of centre `i` is `origin + k·s[i]`, the estimator starts from
/// `origin + origin_error_us`. Entry `i` is `t_hat[i+1] - t[i+1]` after
/// observing window `i` exactly.
pub fn recovery_error_trace(tag_centers_us: &[f64], clock_ratio: f64, origin_error_us: f64) -> Vec<f64> {
    let origin = 0.0;
    let truth = |s: f64| origin + clock_ratio * s;
    let mut state = TimeRecoveryState::new(origin + origin_error_us, clock_ratio);
    tag_centers_us
        .windows(2)
        .map(|w| {
            state.observe(w[0], truth(w[0]));
            state.predict(w[1]) - truth(w[1])
        })
        .collect()
}

/// The trace for a packet of `packet_bits` payload bits at `bit_period_us`:
/// window `i` is centred on bit `i`, two bit periods after the preamble start.
pub fn packet_error_trace(packet_bits: usize, clock_ratio: f64, origin_error_us: f64, bit_period_us: f64) -> Vec<f64> {
    let centers: Vec<f64> = (0..=packet_bits).map(|i| (2.0 + i as f64) * bit_period_us).collect();
    recovery_error_trace(&centers, clock_ratio, origin_error_us)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_origin_gives_zero_error() {
        assert!(packet_error_trace(64, 1.01, 0.0, 2000.0).iter().all(|e| e.abs() < 1e-9));
    }

    #[test]
    fn matches_closed_form() {
        // (origin_hat - origin)(1 - s[i+1]/s[i]) with s[i] = (2 + i)·T
        let trace = packet_error_trace(512, 1.01, 50.0, 2000.0);
        assert_eq!(trace.len(), 512);
        for (i, e) in trace.iter().enumerate() {
            let closed = 50.0 * (1.0 - (3.0 + i as f64) / (2.0 + i as f64));
            assert!((e - closed).abs() < 1e-6, "{i}: {e} vs {closed}");
        }
        let ratio = trace[511].abs() / trace[10].abs();
        assert!(ratio < 0.05, "{ratio}");
        for w in trace.windows(2) {
            assert!(w[1].abs() < w[0].abs());
        }
    }

    proptest! {
        #[test]
        fn error_scales_with_step_ratio(
            gaps in proptest::collection::vec(100.0f64..5000.0, 3..60),
            k in 0.95f64..1.05,
            e0 in -40.0f64..40.0,
        ) {
            let mut s = vec![1000.0];
            for g in gaps {
                let last = *s.last().unwrap();
                s.push(last + g);
            }
            let trace = recovery_error_trace(&s, k, e0);
            for (i, e) in trace.iter().enumerate() {
                let closed = e0 * (1.0 - s[i + 1] / s[i]);
                prop_assert!((e - closed).abs() < 1e-6 * (1.0 + closed.abs()));
            }
        }
    }

    #[test]
    fn ratio_is_clamped() {
        let mut st = TimeRecoveryState::new(0.0, 1.0);
        st.observe(1000.0, 2000.0);
        assert_eq!(st.clock_ratio, 1.1);
        st.observe(1000.0, 10.0);
        assert_eq!(st.clock_ratio, 0.9);
    }

    #[test]
    fn least_squares_recovers_line() {
        let mut st = TimeRecoveryState::new(5.0, 1.0).with_least_squares();
        for i in 1..20 {
            let s = i as f64 * 100.0;
            st.observe(s, 5.0 + 1.02 * s);
        }
        assert!((st.clock_ratio - 1.02).abs() < 1e-9);
        assert!((st.predict(3000.0) - (5.0 + 1.02 * 3000.0)).abs() < 1e-6);
    }
}

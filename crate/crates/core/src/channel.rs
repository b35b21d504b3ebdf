//! Parametric reader-tag-reader link model.
//!
//! Received power follows a log-distance law anchored at a calibration point
//! (-80 dBm at 1.5 m for the retro-reflective path), plus a reflector-area
//! term and an incidence roll-off beyond 20 degrees. Waveform distortions
//! cover additive noise, mains/narrowband interference, slow ambient drift
//! and AGC saturation (clipping). The tag's RC oscillator is modelled by
//! remapping chip boundaries from tag time to reader time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::signal::{BasebandWaveform, ChipTrain, SignalError};

/// One third of an 8.2 x 5.2 cm card: the prototype's reflector area.
pub const REF_REFLECTOR_AREA_CM2: f64 = 8.2 * 5.2 / 3.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("path loss exponent {0} outside [2, 4]")]
    PathLossExponent(f64),
    #[error("reference distance must be positive, got {0}")]
    RefDistance(f64),
    #[error("clock ratio {0} outside [0.9, 1.1]")]
    ClockRatio(f64),
    #[error("clip_high {high} must exceed clip_low {low}")]
    ClipOrder { high: f64, low: f64 },
    #[error("noise and interference amplitudes must be finite and non-negative")]
    Amplitude,
    #[error("distance must be positive, got {0}")]
    Distance(f64),
    #[error("incidence angle {0} outside [0, 90)")]
    IncidenceAngle(f64),
    #[error("reflector area must be positive, got {0}")]
    ReflectorArea(f64),
    #[error("clock drift {rate}/s makes the clock map non-increasing before {at_us} us")]
    ClockMapNotMonotone { rate: f64, at_us: f64 },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub path_loss_exponent: f64,
    pub ref_distance_m: f64,
    pub ref_rx_power_dbm: f64,
    pub tx_power_dbm: f64,
    /// Incidence angle up to which the retro-reflector keeps its gain.
    pub angle_breakpoint_deg: f64,
    pub angle_rolloff_db_per_deg: f64,
    /// Baseband amplitude of the uplink swing when the link sits exactly at `ref_rx_power_dbm`.
    pub amplitude_at_ref: f64,
    /// Whether `apply_channel` scales the waveform by received power. Off means unit gain.
    pub scale_by_path_loss: bool,
    pub awgn_sigma: f64,
    /// `(frequency_hz, amplitude)` sinusoidal interferers.
    pub ac_harmonic_amps: Vec<(f64, f64)>,
    pub drift_amplitude: f64,
    pub drift_freq_hz: f64,
    pub clip_high: Option<f64>,
    pub clip_low: Option<f64>,
    pub clock_ratio_k: f64,
    pub clock_offset_us: f64,
    /// Change of the clock ratio per second of tag time.
    pub clock_drift_rate: f64,
    /// Angular fall-off of the retro-reflected lobe outside the dispersion half-angle.
    pub eavesdrop_rolloff_db_per_deg: f64,
    /// Spreading exponent of the reflected beam past the reader.
    pub beam_spread_exponent: f64,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            path_loss_exponent: 2.5,
            ref_distance_m: 1.5,
            ref_rx_power_dbm: -80.0,
            tx_power_dbm: 30.0,
            angle_breakpoint_deg: 20.0,
            angle_rolloff_db_per_deg: 0.5,
            amplitude_at_ref: 1.0,
            scale_by_path_loss: false,
            awgn_sigma: 0.0,
            // Mains harmonics (50/60 Hz supplies) and one narrowband term for
            // FM-band pickup folded down by the envelope detector.
            ac_harmonic_amps: vec![(100.0, 0.0), (120.0, 0.0), (3700.0, 0.0)],
            drift_amplitude: 0.0,
            drift_freq_hz: 4.0,
            clip_high: None,
            clip_low: None,
            clock_ratio_k: 1.0,
            clock_offset_us: 0.0,
            clock_drift_rate: 0.0,
            eavesdrop_rolloff_db_per_deg: 5.0,
            beam_spread_exponent: 6.0,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    /// No noise, interference, drift, clipping or clock error.
    pub fn ideal() -> Self {
        Self::default()
    }

    /// Conventional backscatter, for comparison: fourth-power attenuation.
    pub fn omni_backscatter() -> Self {
        Self { path_loss_exponent: 4.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(2.0..=4.0).contains(&self.path_loss_exponent) {
            return Err(ChannelError::PathLossExponent(self.path_loss_exponent));
        }
        if !(self.ref_distance_m > 0.0) {
            return Err(ChannelError::RefDistance(self.ref_distance_m));
        }
        if !(0.9..=1.1).contains(&self.clock_ratio_k) {
            return Err(ChannelError::ClockRatio(self.clock_ratio_k));
        }
        if let (Some(high), Some(low)) = (self.clip_high, self.clip_low) {
            if !(high > low) {
                return Err(ChannelError::ClipOrder { high, low });
            }
        }
        let amps_ok = [self.awgn_sigma, self.drift_amplitude, self.amplitude_at_ref]
            .iter()
            .chain(self.ac_harmonic_amps.iter().map(|(_, a)| a))
            .all(|a| a.is_finite() && *a >= 0.0);
        if !amps_ok {
            return Err(ChannelError::Amplitude);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    pub distance_m: f64,
    /// Equal to the irradiation angle at the reader.
    pub incidence_angle_deg: f64,
    pub reflector_area_cm2: f64,
    pub dispersion_halfangle_deg: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            distance_m: 1.5,
            incidence_angle_deg: 0.0,
            reflector_area_cm2: REF_REFLECTOR_AREA_CM2,
            dispersion_halfangle_deg: 5.0,
        }
    }
}

impl GeometryConfig {
    pub fn at_distance(distance_m: f64) -> Self {
        Self { distance_m, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.distance_m > 0.0) {
            return Err(ChannelError::Distance(self.distance_m));
        }
        if !(0.0..90.0).contains(&self.incidence_angle_deg) {
            return Err(ChannelError::IncidenceAngle(self.incidence_angle_deg));
        }
        if !(self.reflector_area_cm2 > 0.0) {
            return Err(ChannelError::ReflectorArea(self.reflector_area_cm2));
        }
        Ok(())
    }
}

/// Non-positive dB penalty: flat up to the breakpoint, then linear in dB.
pub fn angle_penalty_db(cfg: &ChannelConfig, angle_deg: f64) -> f64 {
    let excess = angle_deg.abs() - cfg.angle_breakpoint_deg;
    if excess <= 0.0 {
        0.0
    } else {
        -cfg.angle_rolloff_db_per_deg * excess
    }
}

pub fn received_power_dbm(cfg: &ChannelConfig, geo: &GeometryConfig) -> f64 {
    cfg.ref_rx_power_dbm - 10.0 * cfg.path_loss_exponent * (geo.distance_m / cfg.ref_distance_m).log10()
        + 10.0 * (geo.reflector_area_cm2 / REF_REFLECTOR_AREA_CM2).log10()
        + angle_penalty_db(cfg, geo.incidence_angle_deg)
}

/// Amplitude gain applied to the uplink waveform: unit at the reference power.
pub fn amplitude_scale(cfg: &ChannelConfig, geo: &GeometryConfig) -> f64 {
    if !cfg.scale_by_path_loss {
        return cfg.amplitude_at_ref;
    }
    cfg.amplitude_at_ref * 10f64.powf((received_power_dbm(cfg, geo) - cfg.ref_rx_power_dbm) / 20.0)
}

/// Noise sigma giving `snr_db` against a signal of standard deviation `signal_std`.
pub fn awgn_sigma_for_snr(signal_std: f64, snr_db: f64) -> f64 {
    signal_std / 10f64.powf(snr_db / 20.0)
}

/// `clip(scale · wave + noise + interferers + drift)`, deterministic in `cfg.seed`.
pub fn apply_channel(
    wave: &BasebandWaveform,
    cfg: &ChannelConfig,
    geo: &GeometryConfig,
) -> Result<BasebandWaveform, ChannelError> {
    cfg.validate()?;
    geo.validate()?;
    let scale = amplitude_scale(cfg, geo);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.awgn_sigma).map_err(|_| ChannelError::Amplitude)?;
    let phases: Vec<f64> = cfg.ac_harmonic_amps.iter().map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let drift_phase = rng.random_range(0.0..std::f64::consts::TAU);
    let dt = 1.0 / wave.sample_rate_hz();

    let out = wave
        .samples()
        .iter()
        .enumerate()
        .map(|(n, &x)| {
            let t = (n as f64 + 0.5) * dt;
            let mut y = scale * x;
            if cfg.awgn_sigma > 0.0 {
                y += noise.sample(&mut rng);
            }
            for (&(f, a), &ph) in cfg.ac_harmonic_amps.iter().zip(&phases) {
                if a > 0.0 {
                    y += a * (std::f64::consts::TAU * f * t + ph).sin();
                }
            }
            if cfg.drift_amplitude > 0.0 {
                y += cfg.drift_amplitude * (std::f64::consts::TAU * cfg.drift_freq_hz * t + drift_phase).sin();
            }
            clip(y, cfg.clip_low, cfg.clip_high)
        })
        .collect();
    Ok(wave.with_samples(out)?)
}

pub fn clip(x: f64, low: Option<f64>, high: Option<f64>) -> f64 {
    let x = high.map_or(x, |h| x.min(h));
    low.map_or(x, |l| x.max(l))
}

pub fn clip_waveform(wave: &BasebandWaveform, low: Option<f64>, high: Option<f64>) -> BasebandWaveform {
    let out = wave.samples().iter().map(|&x| clip(x, low, high)).collect();
    wave.with_samples(out).expect("clipping keeps samples finite")
}

/// Maps nominal tag-clock instants to reader time: `T ↦ k(T)·T + offset`
/// with `k(T) = k0 + drift_rate·T`. Fails if the map stops increasing inside the span.
pub fn apply_tag_clock(nominal_us: &[f64], cfg: &ChannelConfig) -> Result<Vec<f64>, ChannelError> {
    if !(0.9..=1.1).contains(&cfg.clock_ratio_k) {
        return Err(ChannelError::ClockRatio(cfg.clock_ratio_k));
    }
    let rate_per_us = cfg.clock_drift_rate * 1e-6;
    // d/dT [k0·T + r·T²] = k0 + 2rT must stay positive over the span.
    for &t in nominal_us.iter().filter(|t| t.is_finite()) {
        if cfg.clock_ratio_k + 2.0 * rate_per_us * t <= 0.0 {
            return Err(ChannelError::ClockMapNotMonotone { rate: cfg.clock_drift_rate, at_us: t });
        }
    }
    Ok(nominal_us.iter().map(|&t| (cfg.clock_ratio_k + rate_per_us * t) * t + cfg.clock_offset_us).collect())
}

/// Retimes a chip train's boundaries through [`apply_tag_clock`].
pub fn retime_chip_train(train: &ChipTrain, cfg: &ChannelConfig) -> Result<ChipTrain, ChannelError> {
    Ok(ChipTrain { levels: train.levels.clone(), boundaries_us: apply_tag_clock(&train.boundaries_us, cfg)? })
}

/// Observer able to pick up the retro-reflected uplink off axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sniffer {
    /// Receiver gain relative to the legitimate reader's.
    pub gain_db: f64,
    pub sensitivity_dbm: f64,
}

impl Default for Sniffer {
    fn default() -> Self {
        Self { gain_db: 0.0, sensitivity_dbm: -100.0 }
    }
}

/// Power seen by an observer `sniffer_distance_m` from the tag and
/// `sniffer_angle_deg` off the retro axis. Equals [`received_power_dbm`] on
/// axis at the reader's own distance.
pub fn eavesdrop_power_dbm(
    cfg: &ChannelConfig,
    geo: &GeometryConfig,
    sniffer_angle_deg: f64,
    sniffer_distance_m: f64,
) -> f64 {
    let spread = -10.0 * cfg.beam_spread_exponent * (sniffer_distance_m / geo.distance_m).log10();
    let off_lobe = (sniffer_angle_deg.abs() - geo.dispersion_halfangle_deg).max(0.0);
    received_power_dbm(cfg, geo) + spread - cfg.eavesdrop_rolloff_db_per_deg * off_lobe
}

pub fn eavesdrop_detectable(
    cfg: &ChannelConfig,
    geo: &GeometryConfig,
    sniffer: &Sniffer,
    sniffer_angle_deg: f64,
    sniffer_distance_m: f64,
) -> bool {
    eavesdrop_power_dbm(cfg, geo, sniffer_angle_deg, sniffer_distance_m) + sniffer.gain_db >= sniffer.sensitivity_dbm
}

/// One cell of an eavesdropping map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EavesdropCell {
    pub angle_deg: f64,
    pub distance_m: f64,
    pub power_dbm: f64,
    pub detectable: bool,
}

pub fn eavesdrop_map(
    cfg: &ChannelConfig,
    geo: &GeometryConfig,
    sniffer: &Sniffer,
    angles_deg: &[f64],
    distances_m: &[f64],
) -> Vec<EavesdropCell> {
    let mut cells = Vec::with_capacity(angles_deg.len() * distances_m.len());
    for &angle_deg in angles_deg {
        for &distance_m in distances_m {
            let power_dbm = eavesdrop_power_dbm(cfg, geo, angle_deg, distance_m);
            cells.push(EavesdropCell {
                angle_deg,
                distance_m,
                power_dbm,
                detectable: power_dbm + sniffer.gain_db >= sniffer.sensitivity_dbm,
            });
        }
    }
    cells
}

/// Polar-grid area (m²) covered by detectable cells, each cell a wedge of
/// the grid's angular and radial spacing.
pub fn detectable_area_m2(cells: &[EavesdropCell], angle_step_deg: f64, distance_step_m: f64) -> f64 {
    cells.iter().filter(|c| c.detectable).map(|c| c.distance_m * angle_step_deg.to_radians() * distance_step_m).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{render_chip_train, LcdShapingParams};

    fn calibrated() -> ChannelConfig {
        ChannelConfig::default()
    }

    #[test]
    fn calibration_point() {
        let p = received_power_dbm(&calibrated(), &GeometryConfig::at_distance(1.5));
        assert!((p + 80.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_area_adds_three_db() {
        let g = GeometryConfig::default();
        let g2 = GeometryConfig { reflector_area_cm2: 2.0 * g.reflector_area_cm2, ..g };
        let delta = received_power_dbm(&calibrated(), &g2) - received_power_dbm(&calibrated(), &g);
        assert!((delta - 3.0103).abs() < 1e-3, "{delta}");
    }

    #[test]
    fn doubling_distance() {
        for (n, expected) in [(4.0, -12.0412), (2.0, -6.0206)] {
            let cfg = ChannelConfig { path_loss_exponent: n, ..calibrated() };
            let d = received_power_dbm(&cfg, &GeometryConfig::at_distance(2.0))
                - received_power_dbm(&cfg, &GeometryConfig::at_distance(1.0));
            assert!((d - expected).abs() < 1e-3, "{n}: {d}");
        }
    }

    #[test]
    fn log_log_fit_recovers_exponent() {
        for n in [2.0, 2.5, 3.0, 4.0] {
            let cfg = ChannelConfig { path_loss_exponent: n, ..calibrated() };
            let pts: Vec<(f64, f64)> = (1..=30)
                .map(|i| {
                    let d = 0.1 * i as f64;
                    (d.log10(), received_power_dbm(&cfg, &GeometryConfig::at_distance(d)))
                })
                .collect();
            let slope = least_squares_slope(&pts);
            assert!((-slope / 10.0 - n).abs() < 1e-9, "{n} vs {slope}");
        }
    }

    fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    #[test]
    fn angular_power_is_non_increasing() {
        let cfg = calibrated();
        let mut last = f64::INFINITY;
        for i in 0..89 {
            let g = GeometryConfig { incidence_angle_deg: i as f64, ..Default::default() };
            let p = received_power_dbm(&cfg, &g);
            assert!(p <= last);
            if i <= 20 {
                assert_eq!(p, received_power_dbm(&cfg, &GeometryConfig::default()));
            }
            last = p;
        }
    }

    #[test]
    fn validation() {
        assert!(ChannelConfig { path_loss_exponent: 4.5, ..calibrated() }.validate().is_err());
        assert!(ChannelConfig { clock_ratio_k: 1.2, ..calibrated() }.validate().is_err());
        assert!(ChannelConfig { clip_high: Some(0.1), clip_low: Some(0.2), ..calibrated() }.validate().is_err());
        assert!(GeometryConfig { incidence_angle_deg: 90.0, ..Default::default() }.validate().is_err());
        assert!(GeometryConfig::at_distance(0.0).validate().is_err());
    }

    fn square_wave() -> BasebandWaveform {
        let train = ChipTrain::uniform((0..40).map(|i| (i % 2) as u8).collect(), 1000.0, 1000.0);
        render_chip_train(&train, &LcdShapingParams::default(), 16_000.0, 42_000.0).unwrap()
    }

    #[test]
    fn identity_up_to_scale() {
        let w = square_wave();
        let cfg = ChannelConfig { amplitude_at_ref: 0.5, ..ChannelConfig::ideal() };
        let out = apply_channel(&w, &cfg, &GeometryConfig::default()).unwrap();
        for (a, b) in w.samples().iter().zip(out.samples()) {
            assert!((0.5 * a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn path_loss_scaling_is_unit_at_reference() {
        let cfg = ChannelConfig { scale_by_path_loss: true, ..ChannelConfig::ideal() };
        assert!((amplitude_scale(&cfg, &GeometryConfig::at_distance(1.5)) - 1.0).abs() < 1e-12);
        let far = amplitude_scale(&cfg, &GeometryConfig::at_distance(3.0));
        assert!((20.0 * far.log10() - (-25.0 * 2f64.log10())).abs() < 1e-9);
    }

    #[test]
    fn top_truncation_flattens_peaks() {
        let w = square_wave();
        let cfg = ChannelConfig { clip_high: Some(0.6), ..ChannelConfig::ideal() };
        let out = apply_channel(&w, &cfg, &GeometryConfig::default()).unwrap();
        let peak = out.samples().iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(peak, 0.6);
        let flat = out.samples().iter().filter(|&&s| s == 0.6).count();
        assert!(flat > out.len() / 4, "{flat}");
        assert_eq!(clip_waveform(&out, None, Some(0.6)), out);
    }

    #[test]
    fn drift_moves_window_means() {
        let w = square_wave();
        let cfg = ChannelConfig { drift_amplitude: 0.5, drift_freq_hz: 10.0, ..ChannelConfig::ideal() };
        let out = apply_channel(&w, &cfg, &GeometryConfig::default()).unwrap();
        let means: Vec<f64> = out.samples().chunks(32 * 4).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
        let spread = means.iter().cloned().fold(f64::MIN, f64::max) - means.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 0.3, "{spread}");
    }

    #[test]
    fn deterministic_per_seed() {
        let w = square_wave();
        let cfg = ChannelConfig {
            awgn_sigma: 0.1,
            ac_harmonic_amps: vec![(100.0, 0.05), (3700.0, 0.02)],
            seed: 7,
            ..ChannelConfig::ideal()
        };
        let a = apply_channel(&w, &cfg, &GeometryConfig::default()).unwrap();
        let b = apply_channel(&w, &cfg, &GeometryConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = apply_channel(&w, &ChannelConfig { seed: 8, ..cfg }, &GeometryConfig::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn clock_identity_and_ratio() {
        let nominal: Vec<f64> = (0..=100).map(|i| i as f64 * 1000.0).collect();
        assert_eq!(apply_tag_clock(&nominal, &ChannelConfig::ideal()).unwrap(), nominal);
        let cfg = ChannelConfig { clock_ratio_k: 1.01, ..ChannelConfig::ideal() };
        let mapped = apply_tag_clock(&nominal, &cfg).unwrap();
        assert!((mapped[100] - nominal[100] - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn clock_drift_matches_integrated_rate() {
        // Oracle: integrate the instantaneous rate d/dT[k(T)·T] = k0 + 2rT numerically.
        let cfg = ChannelConfig {
            clock_ratio_k: 0.995,
            clock_drift_rate: 0.02,
            clock_offset_us: 12.0,
            ..ChannelConfig::ideal()
        };
        let nominal: Vec<f64> = (0..=200).map(|i| i as f64 * 1000.0).collect();
        let mapped = apply_tag_clock(&nominal, &cfg).unwrap();
        let rate = |t: f64| cfg.clock_ratio_k + 2.0 * cfg.clock_drift_rate * 1e-6 * t;
        let steps = 20_000;
        for (i, &t_end) in nominal.iter().enumerate().step_by(20) {
            let h = t_end / steps as f64;
            let integral: f64 = (0..steps).map(|j| 0.5 * h * (rate(j as f64 * h) + rate((j + 1) as f64 * h))).sum();
            assert!((mapped[i] - (cfg.clock_offset_us + integral)).abs() < 1e-6, "{i}");
        }
        // superlinear displacement
        let disp: Vec<f64> = mapped.iter().zip(&nominal).map(|(m, n)| m - n * cfg.clock_ratio_k).collect();
        for w in disp.windows(3) {
            assert!(w[2] - w[1] > w[1] - w[0]);
        }
    }

    #[test]
    fn clock_map_rejects_runaway_drift() {
        let cfg = ChannelConfig { clock_drift_rate: -10.0, ..ChannelConfig::ideal() };
        let nominal = [0.0, 1e5];
        assert!(matches!(apply_tag_clock(&nominal, &cfg), Err(ChannelError::ClockMapNotMonotone { .. })));
    }

    #[test]
    fn sniffer_consistency_and_lobe() {
        let cfg = calibrated();
        let geo = GeometryConfig::at_distance(0.6);
        let on_axis = eavesdrop_power_dbm(&cfg, &geo, 0.0, 0.6);
        assert!((on_axis - received_power_dbm(&cfg, &geo)).abs() < 1e-12);
        assert!(!eavesdrop_detectable(&cfg, &geo, &Sniffer::default(), 30.0, 0.6));
        assert!(eavesdrop_detectable(&cfg, &geo, &Sniffer::default(), 0.0, 1.0));
    }

    #[test]
    fn detectable_area_grows_with_gain() {
        let cfg = calibrated();
        let geo = GeometryConfig::at_distance(0.6);
        let angles: Vec<f64> = (-60..=60).map(|a| a as f64).collect();
        let dists: Vec<f64> = (0..=60).map(|i| 0.6 + 0.05 * i as f64).collect();
        let mut last = 0.0;
        for gain in [-10.0, -5.0, 0.0, 3.0, 6.0, 10.0] {
            let s = Sniffer { gain_db: gain, ..Sniffer::default() };
            let area = detectable_area_m2(&eavesdrop_map(&cfg, &geo, &s, &angles, &dists), 1.0, 0.05);
            assert!(area > last, "{gain}: {area} <= {last}");
            last = area;
        }
    }
}

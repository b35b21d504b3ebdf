use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rvlc_core::channel::{apply_channel, awgn_sigma_for_snr, retime_chip_train, ChannelConfig};
use rvlc_core::decoder::{decode_swmsmf, detect_preamble, true_bit_centers_us, DecoderKind};
use rvlc_core::fixtures::{fixture_wave, FixtureCase};
use rvlc_core::signal::{
    build_frame, render_chip_train, synthesize_uplink_waveform, uplink_chip_train, DEFAULT_CHIP_PERIOD_US,
    LEAD_IDLE_CHIPS, TAIL_IDLE_CHIPS,
};
use rvlc_core::{BasebandWaveform, BitStream, DecoderConfig, GeometryConfig, LcdShapingParams, TemplateBank};

const RATE: f64 = 16_000.0;

#[test]
fn clean_frames_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1usize, 4, 16] {
        for _ in 0..20 {
            let bytes: Vec<u8> = (0..n).map(|_| rng.random()).collect();
            let frame = build_frame(&BitStream::from_bytes(&bytes), DEFAULT_CHIP_PERIOD_US).unwrap();
            let wave = synthesize_uplink_waveform(&frame, &LcdShapingParams::default(), RATE).unwrap();
            let cfg = DecoderConfig::for_payload_bytes(n);
            let out = DecoderKind::SlidingWindow.decode(&wave, &cfg).unwrap();
            assert!(out.crc_ok);
            assert_eq!(out.payload.to_bytes().unwrap(), bytes);
        }
    }
}

/// Timing errors against received bit centres for a frame keyed by a tag whose clock runs at `k`.
fn drift_errors(k: f64, payload_bytes: usize, shaping: &LcdShapingParams) -> Vec<f64> {
    let bytes: Vec<u8> = (0..payload_bytes as u8).map(|i| i.wrapping_mul(37) ^ 0x5a).collect();
    let frame = build_frame(&BitStream::from_bytes(&bytes), DEFAULT_CHIP_PERIOD_US).unwrap();
    let chip = DEFAULT_CHIP_PERIOD_US;
    let channel = ChannelConfig { clock_ratio_k: k, ..ChannelConfig::ideal() };
    let train = retime_chip_train(&uplink_chip_train(&frame, LEAD_IDLE_CHIPS as f64 * chip), &channel).unwrap();
    let wave = render_chip_train(&train, shaping, RATE, train.end_us() + TAIL_IDLE_CHIPS as f64 * chip).unwrap();
    let cfg = DecoderConfig::for_payload_bytes(payload_bytes);
    let latency = detect_preamble(&wave, &cfg).unwrap().position * wave.sample_period_us() - train.start_us();
    let truth: Vec<f64> = true_bit_centers_us(&train, cfg.coded_bits()).iter().map(|t| t + latency).collect();
    let mut out = DecoderKind::SlidingWindow.decode(&wave, &cfg).unwrap();
    assert!(out.crc_ok, "k = {k}");
    assert_eq!(out.payload.to_bytes().unwrap(), bytes);
    out.attach_truth(&truth);
    out.per_bit_timing_error_us
}

#[test]
fn slow_tag_clock_error_shrinks_over_the_frame() {
    let errs = drift_errors(1.01, 31, &LcdShapingParams::rectangular());
    let first = errs[0].abs();
    let last = errs.last().unwrap().abs();
    assert!(last < first, "first {first}, last {last}");
}

#[test]
fn clock_ratio_span_decodes() {
    for k in [0.97, 0.99, 1.0, 1.01, 1.03] {
        let errs = drift_errors(k, 8, &LcdShapingParams::default());
        let tail = &errs[errs.len() - 8..];
        assert!(tail.iter().all(|e| e.abs() < 0.25 * DEFAULT_CHIP_PERIOD_US), "k = {k}: {tail:?}");
    }
}

/// 0x17 = 00010111 holds every 3-bit window; the frame around it covers all eight templates.
#[test]
fn every_template_matches_under_lcd_memory() {
    let payload = BitStream::from_bytes(&[0x17, 0xe8, 0x17, 0xe8]);
    let frame = build_frame(&payload, DEFAULT_CHIP_PERIOD_US).unwrap();
    let bits = frame.coded_bits();
    let seen: std::collections::BTreeSet<usize> =
        bits.as_slice().windows(3).map(|w| TemplateBank::index_of([w[0], w[1], w[2]])).collect();
    assert_eq!(seen.len(), 8);

    let cfg = DecoderConfig::for_payload_bytes(4);
    for tau in [0.0, 50.0, 150.0, 300.0, 500.0] {
        let wave = synthesize_uplink_waveform(&frame, &LcdShapingParams::with_tau(tau), RATE).unwrap();
        let bank = TemplateBank::new(cfg.chip_samples(RATE).round() as usize);
        let out = decode_swmsmf(&wave, &bank, &cfg).unwrap();
        assert_eq!(out.bit_errors(&bits), 0, "tau {tau}");
    }
}

#[test]
fn sliding_window_dominates_baselines_on_corpus() {
    let seeds = 30u64;
    for case in FixtureCase::ALL {
        let mut errors = [0usize; 4];
        for seed in 0..seeds {
            let fx = fixture_wave(case, seed, 15.0).unwrap();
            let cfg = fx.decoder_config();
            for (slot, kind) in DecoderKind::ALL.iter().enumerate() {
                errors[slot] += match kind.decode(&fx.wave, &cfg) {
                    Ok(r) => r.bit_errors(&fx.coded_bits),
                    Err(_) => fx.coded_bits.len(),
                };
            }
        }
        assert!(errors[1..].iter().all(|&e| errors[0] <= e), "{}: {errors:?}", case.name());
    }
}

#[test]
fn noise_alone_rarely_passes_the_preamble_threshold() {
    let cfg = DecoderConfig::for_payload_bytes(4);
    let mut detections = 0;
    for seed in 0..200u64 {
        let silent = BasebandWaveform::new(vec![0.0; 16 * 60], RATE).unwrap();
        let channel = ChannelConfig { awgn_sigma: awgn_sigma_for_snr(0.5, 0.0), seed, ..ChannelConfig::ideal() };
        let noise = apply_channel(&silent, &channel, &GeometryConfig::default()).unwrap();
        if detect_preamble(&noise, &cfg).is_ok() {
            detections += 1;
        }
    }
    assert!(detections <= 2, "{detections} false detections in 200");
}

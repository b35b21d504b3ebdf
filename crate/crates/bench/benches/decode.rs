use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rvlc_core::channel::{apply_channel, awgn_sigma_for_snr};
use rvlc_core::decoder::{detect_preamble, DecoderKind};
use rvlc_core::signal::{build_frame, synthesize_uplink_waveform, DEFAULT_CHIP_PERIOD_US};
use rvlc_core::{BasebandWaveform, BitStream, ChannelConfig, DecoderConfig, GeometryConfig, LcdShapingParams};
use std::hint::black_box;

fn noisy_frame(bytes: usize) -> BasebandWaveform {
    let mut rng = ChaCha8Rng::seed_from_u64(bytes as u64);
    let payload: Vec<u8> = (0..bytes).map(|_| rng.random()).collect();
    let frame = build_frame(&BitStream::from_bytes(&payload), DEFAULT_CHIP_PERIOD_US).unwrap();
    let clean = synthesize_uplink_waveform(&frame, &LcdShapingParams::default(), 16_000.0).unwrap();
    let ch = ChannelConfig { awgn_sigma: awgn_sigma_for_snr(0.5, 15.0), seed: 3, ..ChannelConfig::ideal() };
    apply_channel(&clean, &ch, &GeometryConfig::default()).unwrap()
}

fn decode(c: &mut Criterion) {
    let mut g = c.benchmark_group("decode");
    for bytes in [4usize, 64] {
        let wave = noisy_frame(bytes);
        let cfg = DecoderConfig::for_payload_bytes(bytes);
        g.bench_with_input(BenchmarkId::new("preamble", bytes), &wave, |b, w| {
            b.iter(|| detect_preamble(black_box(w), &cfg))
        });
        for kind in [DecoderKind::SlidingWindow, DecoderKind::Averaging, DecoderKind::Edge, DecoderKind::SingleSymbol] {
            g.bench_with_input(BenchmarkId::new(format!("{kind:?}"), bytes), &wave, |b, w| {
                b.iter(|| kind.decode(black_box(w), &cfg))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, decode);
criterion_main!(benches);

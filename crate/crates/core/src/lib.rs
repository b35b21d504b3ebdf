//! Simulation and signal processing for a duplex visible-light backscatter
//! link: an LED reader illuminates a battery-free tag, the tag answers by
//! keying an LCD shutter in front of a retro-reflector.
//!
//! * [`signal`]: Manchester and clock-period codecs, CRC-8, framing, LCD-shaped uplink synthesis
//! * [`channel`]: path loss, distortions (noise, interference, drift, AGC clipping), tag clock retiming
//! * [`decoder`]: preamble detection, the sliding-window multi-symbol matched filter, baselines
//! * [`tag`]: comparator receive path, LCD and harvesting energy models
//! * [`mac`]: discrete-event polling, reader contention and the tag table
//! * [`io`]: waveform and bit sidecar files
//! * [`fixtures`]: the distortion corpus used to compare decoders

pub mod channel;
pub mod decoder;
pub mod fixtures;
pub mod io;
pub mod mac;
pub mod signal;
pub mod tag;

pub use channel::{ChannelConfig, GeometryConfig};
pub use decoder::{DecodeResult, DecoderConfig, TemplateBank, TimeRecoveryState};
pub use signal::{BasebandWaveform, BitStream, ChipSequence, Frame, LcdShapingParams};
pub use tag::{EnergyLedger, LcdEnergyModel, McuDutyModel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

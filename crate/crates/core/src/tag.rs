//! Tag-side models: the comparator receive path and the energy budget.
//!
//! Harvest follows `a / (d² + d0²) · cos θ + ambient`. The `d0` term softens
//! the inverse-square law close to the lamp (an extended source), which is
//! what lets a twofold distance change double the charging time near 10-20 cm.

use crate::signal::{clock_period_decode, BitStream, SignalError};

/// Phase power draws at 2.0 V.
pub const RX_POWER_UW: f64 = 87.6;
pub const TX_POWER_UW: f64 = 90.2;
pub const OPERATING_VOLTAGE_V: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TagError {
    #[error("harvest {harvest_uw} uW does not exceed leakage {leakage_uw} uW")]
    NeverCharges { harvest_uw: f64, leakage_uw: f64 },
    #[error("edge timestamps must be finite and strictly increasing (index {0})")]
    UnorderedEdges(usize),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Receive,
    Transmit,
}

impl Phase {
    pub fn power_uw(self) -> f64 {
        match self {
            Self::Receive => RX_POWER_UW,
            Self::Transmit => TX_POWER_UW,
        }
    }
}

/// Running energy account of one tag.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub harvested_uw: f64,
    pub rx_power_uw: f64,
    pub tx_power_uw: f64,
    pub stored_uj: f64,
    pub v_operating: f64,
    /// Total simulated time, microseconds.
    pub elapsed_us: f64,
}

impl EnergyLedger {
    pub fn new(harvested_uw: f64) -> Self {
        Self {
            harvested_uw: harvested_uw.max(0.0),
            rx_power_uw: RX_POWER_UW,
            tx_power_uw: TX_POWER_UW,
            stored_uj: 0.0,
            v_operating: OPERATING_VOLTAGE_V,
            elapsed_us: 0.0,
        }
    }

    /// Advances `dt_us` while drawing `load_uw`. Storage never goes negative;
    /// returns false if the load could not be met for the whole step.
    pub fn step(&mut self, dt_us: f64, load_uw: f64) -> bool {
        self.elapsed_us += dt_us;
        self.stored_uj += (self.harvested_uw - load_uw) * dt_us * 1e-6;
        if self.stored_uj < 0.0 {
            self.stored_uj = 0.0;
            return false;
        }
        true
    }

    pub fn phase_power_uw(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Receive => self.rx_power_uw,
            Phase::Transmit => self.tx_power_uw,
        }
    }
}

/// The tag can sustain `phase` from harvest alone.
pub fn link_feasible(ledger: &EnergyLedger, phase: Phase) -> bool {
    ledger.harvested_uw >= ledger.phase_power_uw(phase)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcdEnergyModel {
    pub capacitance_nf: f64,
    pub v_drive: f64,
    pub toggle_rate_hz: f64,
    /// Supply current per unit of LCD charge current at a fixed boost ratio.
    pub supply_conversion: f64,
    pub reuse_enabled: bool,
    pub reuse_efficiency: f64,
}

/// Boost-conversion factor that makes the default LCD draw 84 uA.
pub const LCD_SUPPLY_CONVERSION: f64 = 84.0 / (9e-9 * 5.5 * 500.0 * 1e6);
/// Fraction of the LCD charge recovered on discharge: 84 uA becomes 46 uA.
pub const LCD_REUSE_EFFICIENCY: f64 = 1.0 - 46.0 / 84.0;

impl Default for LcdEnergyModel {
    fn default() -> Self {
        Self {
            capacitance_nf: 9.0,
            v_drive: 5.5,
            toggle_rate_hz: 500.0,
            supply_conversion: LCD_SUPPLY_CONVERSION,
            reuse_enabled: false,
            reuse_efficiency: LCD_REUSE_EFFICIENCY,
        }
    }
}

impl LcdEnergyModel {
    pub fn with_reuse(self) -> Self {
        Self { reuse_enabled: true, ..self }
    }
}

/// Supply current of the LCD driver: `C·V·f` times the conversion factor,
/// reduced by the reuse efficiency when reuse is on.
pub fn lcd_current_ua(model: &LcdEnergyModel) -> f64 {
    let charge_current_ua = model.capacitance_nf * 1e-9 * model.v_drive * model.toggle_rate_hz * 1e6;
    let supply = charge_current_ua * model.supply_conversion;
    if model.reuse_enabled {
        supply * (1.0 - model.reuse_efficiency)
    } else {
        supply
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McuDutyModel {
    pub wake_us: f64,
    pub cycle_us: f64,
}

impl Default for McuDutyModel {
    fn default() -> Self {
        Self { wake_us: 16.0, cycle_us: 200.0 }
    }
}

impl McuDutyModel {
    pub fn duty_cycle(&self) -> f64 {
        self.wake_us / self.cycle_us
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarvestModel {
    /// Harvest at 1 m on axis with no near-field softening, uW·m².
    pub coeff_uw_m2: f64,
    pub near_field_m: f64,
    /// Extra harvest from room lighting; zero in the dark chamber.
    pub ambient_uw: f64,
}

/// Puts the transmit-phase threshold 1.54 dB below the harvest at 1.4 m and
/// 1.54 dB above the harvest at 2.0 m.
pub const HARVEST_COEFF_UW_M2: f64 = 254.6;
/// `d0² = 0.02 m²` makes harvest at 10 cm exactly twice that at 20 cm.
pub const HARVEST_NEAR_FIELD_M: f64 = 0.141_421_356_237_309_5;
/// Office lighting: separates the dark and office curves only beyond ~0.6 m.
pub const OFFICE_AMBIENT_UW: f64 = 33.0;

impl Default for HarvestModel {
    fn default() -> Self {
        Self { coeff_uw_m2: HARVEST_COEFF_UW_M2, near_field_m: HARVEST_NEAR_FIELD_M, ambient_uw: 0.0 }
    }
}

impl HarvestModel {
    pub fn office() -> Self {
        Self { ambient_uw: OFFICE_AMBIENT_UW, ..Self::default() }
    }

    pub fn harvest_uw(&self, distance_m: f64, angle_deg: f64) -> f64 {
        let cos = angle_deg.to_radians().cos().max(0.0);
        self.coeff_uw_m2 / (distance_m * distance_m + self.near_field_m * self.near_field_m) * cos + self.ambient_uw
    }
}

/// Storage capacitor charged from 10% to the 82.5% activation point, where
/// 82.5% of full scale is the operating voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageModel {
    pub capacitance_uf: f64,
    pub v_operating: f64,
    pub leakage_uw: f64,
}

/// Chosen so a zero-energy tag at 10 cm wakes after 50 ms in the dark.
pub const STORAGE_CAPACITANCE_UF: f64 = 215.3;
pub const STORAGE_LEAKAGE_UW: f64 = 2.0;

impl Default for StorageModel {
    fn default() -> Self {
        Self {
            capacitance_uf: STORAGE_CAPACITANCE_UF,
            v_operating: OPERATING_VOLTAGE_V,
            leakage_uw: STORAGE_LEAKAGE_UW,
        }
    }
}

impl StorageModel {
    /// Energy between 10% and 82.5% of full scale, in uJ.
    pub fn threshold_uj(&self) -> f64 {
        let full = self.v_operating / 0.825;
        let start = 0.1 * full;
        0.5 * self.capacitance_uf * (self.v_operating.powi(2) - start.powi(2))
    }
}

pub fn charging_time_ms(harvest_uw: f64, threshold_uj: f64, leakage_uw: f64) -> Result<f64, TagError> {
    if !(harvest_uw > leakage_uw) {
        return Err(TagError::NeverCharges { harvest_uw, leakage_uw });
    }
    Ok(threshold_uj / (harvest_uw - leakage_uw) * 1e3)
}

/// Charging time found by stepping an [`EnergyLedger`] until the threshold.
pub fn simulate_charging_ms(harvest_uw: f64, storage: &StorageModel, step_us: f64, limit_ms: f64) -> Option<f64> {
    let threshold = storage.threshold_uj();
    let mut ledger = EnergyLedger::new(harvest_uw);
    while ledger.elapsed_us < limit_ms * 1e3 {
        let before = ledger.stored_uj;
        ledger.step(step_us, storage.leakage_uw);
        if ledger.stored_uj >= threshold {
            let frac = (threshold - before) / (ledger.stored_uj - before);
            return Some((ledger.elapsed_us - step_us * (1.0 - frac)) * 1e-3);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagReceive {
    pub bits: BitStream,
    /// MCU time spent awake timestamping edges.
    pub busy_us: f64,
}

/// Comparator edges to bits via clock-period decoding; the MCU wakes for
/// `wake_us` per edge.
pub fn tag_receive(edges_us: &[f64], tolerance_us: f64, mcu: &McuDutyModel) -> Result<TagReceive, TagError> {
    if let Some(i) = edges_us.iter().position(|t| !t.is_finite()) {
        return Err(TagError::UnorderedEdges(i));
    }
    if let Some(i) = edges_us.windows(2).position(|w| w[1] <= w[0]) {
        return Err(TagError::UnorderedEdges(i + 1));
    }
    let periods: Vec<f64> = edges_us.windows(2).map(|w| w[1] - w[0]).collect();
    let bits = clock_period_decode(&periods, tolerance_us)?;
    Ok(TagReceive { bits, busy_us: edges_us.len() as f64 * mcu.wake_us })
}

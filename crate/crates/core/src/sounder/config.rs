//! Sounder configuration and frequency plan.

use crate::error::{Error, Result};
use crate::linkbudget::Budget;
use crate::scalar::Scalar;
use crate::sounder::pn::{MAX_ORDER, MIN_ORDER};

/// Configuration of the dual-conversion sliding-correlator sounder.
///
/// Defaults reproduce the 140 GHz band instrument: a 2 Gcps, 11-bit PN
/// sequence, 7 GHz IF, 11.25 GHz LO multiplied by 12 (142 GHz RF center
/// inside the 139-145 GHz passband), 0 dBm TX power, and 27 dBi horns at
/// both ends. The default sensitivity is calibrated so the maximum
/// measurable path loss is exactly 145 dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SounderConfig<T> {
    /// Chip rate in chips/s.
    pub chip_rate_cps: T,
    /// PN register order; sequence length is `2^order - 1`.
    pub pn_order: u32,
    /// Slide factor gamma between the TX and RX chip clocks.
    pub slide_factor: u32,
    /// IF center in Hz.
    pub if_frequency_hz: T,
    /// LO synthesizer frequency in Hz, before multiplication.
    pub lo_frequency_hz: T,
    /// LO multiplication factor.
    pub lo_multiplier: u32,
    /// RF band-pass 3 dB passband in Hz.
    pub passband_hz: (T, T),
    /// TX power in dBm.
    pub tx_power_dbm: T,
    pub tx_gain_dbi: T,
    pub rx_gain_dbi: T,
    /// Effective receiver sensitivity in dBm (gain- and processing-gain
    /// inclusive convention; see [`crate::linkbudget`]).
    pub rx_sensitivity_dbm: T,
    /// Baseband samples per chip.
    pub oversampling: u32,
}

/// Target dynamic range used to calibrate the default sensitivity.
pub const DEFAULT_MAX_MEASURABLE_PL_DB: f64 = 145.0;

impl<T: Scalar> Default for SounderConfig<T> {
    fn default() -> Self {
        let tx_power = 0.0;
        let gain = 27.0;
        let pg = processing_gain_db::<f64>(11);
        Self {
            chip_rate_cps: T::of(2e9),
            pn_order: 11,
            slide_factor: 8000,
            if_frequency_hz: T::of(7e9),
            lo_frequency_hz: T::of(11.25e9),
            lo_multiplier: 12,
            passband_hz: (T::of(139e9), T::of(145e9)),
            tx_power_dbm: T::of(tx_power),
            tx_gain_dbi: T::of(gain),
            rx_gain_dbi: T::of(gain),
            rx_sensitivity_dbm: T::of(
                tx_power + 2.0 * gain + pg - DEFAULT_MAX_MEASURABLE_PL_DB,
            ),
            oversampling: 2,
        }
    }
}

impl<T: Scalar> SounderConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.chip_rate_cps.is_finite() && self.chip_rate_cps > T::zero()) {
            return Err(Error::Config(format!(
                "chip rate must be > 0 cps, got {}",
                self.chip_rate_cps
            )));
        }
        if !(MIN_ORDER..=MAX_ORDER).contains(&self.pn_order) {
            return Err(Error::Config(format!(
                "PN order must be in {MIN_ORDER}..={MAX_ORDER}, got {}",
                self.pn_order
            )));
        }
        if self.slide_factor < 2 {
            return Err(Error::Config(format!(
                "slide factor must be >= 2, got {}",
                self.slide_factor
            )));
        }
        if self.oversampling < 1 {
            return Err(Error::Config("oversampling must be >= 1".into()));
        }
        if self.passband_hz.0 >= self.passband_hz.1 {
            return Err(Error::Config(format!(
                "passband low edge {} Hz must sit below high edge {} Hz",
                self.passband_hz.0, self.passband_hz.1
            )));
        }
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("tx_gain_dbi", self.tx_gain_dbi),
            ("rx_gain_dbi", self.rx_gain_dbi),
            ("rx_sensitivity_dbm", self.rx_sensitivity_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        self.rf_center_frequency_hz()?;
        Ok(())
    }

    /// RF center out of the frequency plan:
    /// `lo_frequency * lo_multiplier + if_frequency`, which must land inside
    /// the passband (142 GHz for the defaults).
    pub fn rf_center_frequency_hz(&self) -> Result<T> {
        let center =
            self.lo_frequency_hz * T::of(self.lo_multiplier as f64) + self.if_frequency_hz;
        if center < self.passband_hz.0 || center > self.passband_hz.1 {
            return Err(Error::Config(format!(
                "RF center {center} Hz falls outside the {}-{} Hz passband",
                self.passband_hz.0, self.passband_hz.1
            )));
        }
        Ok(center)
    }

    /// PN sequence length for the configured order.
    pub fn pn_length(&self) -> usize {
        (1usize << self.pn_order) - 1
    }

    /// Observed duration of one PDP acquisition, `L * gamma / chip_rate`
    /// (8.19 ms for the defaults).
    pub fn acquisition_period_s(&self) -> T {
        T::of(self.pn_length() as f64) * T::of(self.slide_factor as f64) / self.chip_rate_cps
    }

    /// The sounder's link budget with the correlation processing gain.
    pub fn budget(&self) -> Budget<T> {
        Budget {
            tx_power_dbm: self.tx_power_dbm,
            tx_gain_dbi: self.tx_gain_dbi,
            rx_gain_dbi: self.rx_gain_dbi,
            processing_gain_db: processing_gain_db::<T>(self.pn_order),
            rx_sensitivity_dbm: self.rx_sensitivity_dbm,
        }
    }

    /// Maximum measurable path loss of this configuration in dB.
    pub fn max_measurable_pl(&self) -> T {
        self.tx_power_dbm + self.tx_gain_dbi + self.rx_gain_dbi
            + processing_gain_db::<T>(self.pn_order)
            - self.rx_sensitivity_dbm
    }
}

/// Autocorrelation processing gain of a `2^order - 1` PN sequence:
/// `20 * log10(2^order)` (66.23 dB for 11 bits).
///
/// Defined for order 0 as well (0 dB), though configurations reject orders
/// below [`MIN_ORDER`].
pub fn processing_gain_db<T: Scalar>(order: u32) -> T {
    T::of(20.0) * T::of(2.0).powi(order as i32).log10()
}

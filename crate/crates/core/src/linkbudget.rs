//! Dynamic-range accounting for the sounder.
//!
//! Maximum measurable path loss, sensitivity calibration, and maximum
//! measurable distance under a close-in path-loss model.

use crate::error::{Error, Result};
use crate::rfmath::fspl_db;
use crate::scalar::Scalar;

/// Link budget of a sounder: everything that bounds the measurable path loss.
///
/// The 145 dB dynamic-range convention used here bundles both antenna gains
/// and the correlation processing gain into the measurable total; the
/// effective receiver sensitivity is the calibration output of
/// [`calibrate_sensitivity`], not a hardware datum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget<T> {
    pub tx_power_dbm: T,
    pub tx_gain_dbi: T,
    pub rx_gain_dbi: T,
    pub processing_gain_db: T,
    pub rx_sensitivity_dbm: T,
}

impl<T: Scalar> Budget<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("tx_gain_dbi", self.tx_gain_dbi),
            ("rx_gain_dbi", self.rx_gain_dbi),
            ("processing_gain_db", self.processing_gain_db),
            ("rx_sensitivity_dbm", self.rx_sensitivity_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("budget field {name} must be finite")));
            }
        }
        if self.processing_gain_db < T::zero() {
            return Err(Error::Config(format!(
                "processing gain must be >= 0 dB, got {}",
                self.processing_gain_db
            )));
        }
        Ok(())
    }
}

/// Maximum measurable path loss in dB:
/// `tx_power + tx_gain + rx_gain + processing_gain - rx_sensitivity`.
pub fn max_measurable_pl<T: Scalar>(budget: &Budget<T>) -> Result<T> {
    budget.validate()?;
    Ok(budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi
        + budget.processing_gain_db
        - budget.rx_sensitivity_dbm)
}

/// Receiver sensitivity in dBm that makes [`max_measurable_pl`] equal to
/// `target_max_pl_db`; the budget's own sensitivity field is ignored.
pub fn calibrate_sensitivity<T: Scalar>(target_max_pl_db: T, budget: &Budget<T>) -> T {
    budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi + budget.processing_gain_db
        - target_max_pl_db
}

/// Maximum distance in m at which a close-in model with exponent `ple`
/// stays within `pl_max_db`: `d0 * 10^((pl_max - FSPL(f, d0)) / (10 * ple))`.
pub fn max_distance_m<T: Scalar>(
    pl_max_db: T,
    frequency_hz: T,
    ple: T,
    d0_m: T,
) -> Result<T> {
    if !(ple.is_finite() && ple > T::zero()) {
        return Err(Error::Domain(format!(
            "path loss exponent must be > 0, got {ple}"
        )));
    }
    let anchor = fspl_db(frequency_hz, d0_m)?;
    if pl_max_db < anchor {
        return Err(Error::NoCoverage(format!(
            "maximum path loss {pl_max_db} dB is below the {anchor} dB anchor loss at d0"
        )));
    }
    Ok(d0_m * T::of(10.0).powf((pl_max_db - anchor) / (T::of(10.0) * ple)))
}

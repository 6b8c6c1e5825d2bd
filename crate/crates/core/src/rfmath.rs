//! Scalar RF arithmetic.
//!
//! dB conversions, Friis free-space path loss, antenna aperture/gain
//! relations, constant-aperture received power, and atmospheric excess
//! attenuation via a sparse frequency table.
//!
//! All quantities are plain scalars with the unit carried in the identifier
//! (`_db`, `_dbm`, `_dbi`, `_hz`, `_m`, ...). Full double precision is kept
//! throughout; rounding happens only when reports are emitted.

use std::f64::consts::PI;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// dB conversions
// ---------------------------------------------------------------------------

/// Convert a linear power ratio to dB: `10 * log10(x)`.
///
/// Fails on non-positive or non-finite input.
pub fn db_from_linear<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() || x <= T::zero() {
        return Err(Error::Domain(format!(
            "dB conversion requires a positive finite linear value, got {x}"
        )));
    }
    Ok(T::of(10.0) * x.log10())
}

/// Convert dB back to a linear power ratio: `10^(db/10)`.
///
/// Fails on non-finite input; composes with [`db_from_linear`] to identity.
pub fn linear_from_db<T: Scalar>(db: T) -> Result<T> {
    if !db.is_finite() {
        return Err(Error::Domain(format!("dB value must be finite, got {db}")));
    }
    Ok(T::of(10.0).powf(db / T::of(10.0)))
}

// ---------------------------------------------------------------------------
// Free-space path loss and Friis
// ---------------------------------------------------------------------------

/// Free-space path loss in dB: `20 * log10(4 * pi * d * f / c)`.
pub fn fspl_db<T: Scalar>(frequency_hz: T, distance_m: T) -> Result<T> {
    if !(frequency_hz.is_finite() && frequency_hz > T::zero()) {
        return Err(Error::Domain(format!(
            "FSPL requires frequency > 0 Hz, got {frequency_hz}"
        )));
    }
    if !(distance_m.is_finite() && distance_m > T::zero()) {
        return Err(Error::Domain(format!(
            "FSPL requires distance > 0 m, got {distance_m}"
        )));
    }
    let four_pi = T::of(4.0 * PI);
    let ratio = four_pi * distance_m * frequency_hz / T::speed_of_light();
    Ok(T::of(20.0) * ratio.log10())
}

/// Received power in dBm for isotropic-referenced antenna gains:
/// `pt + gt + gr - FSPL(f, d)`.
pub fn friis_received_power_dbm<T: Scalar>(
    pt_dbm: T,
    gt_dbi: T,
    gr_dbi: T,
    frequency_hz: T,
    distance_m: T,
) -> Result<T> {
    let fspl = fspl_db(frequency_hz, distance_m)?;
    Ok(pt_dbm + gt_dbi + gr_dbi - fspl)
}

// ---------------------------------------------------------------------------
// Effective aperture
// ---------------------------------------------------------------------------

/// Antenna effective aperture in cm², strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture<T> {
    area_cm2: T,
}

impl<T: Scalar> Aperture<T> {
    pub fn new(area_cm2: T) -> Result<Self> {
        if !(area_cm2.is_finite() && area_cm2 > T::zero()) {
            return Err(Error::Domain(format!(
                "effective aperture must be > 0 cm2, got {area_cm2}"
            )));
        }
        Ok(Self { area_cm2 })
    }

    pub fn area_cm2(&self) -> T {
        self.area_cm2
    }

    pub fn area_m2(&self) -> T {
        self.area_cm2 * T::of(1e-4)
    }
}

/// Antenna gain in dBi from effective aperture: `10 * log10(4 * pi * Ae / lambda^2)`.
pub fn gain_from_aperture_dbi<T: Scalar>(aperture: Aperture<T>, frequency_hz: T) -> Result<T> {
    if !(frequency_hz.is_finite() && frequency_hz > T::zero()) {
        return Err(Error::Domain(format!(
            "aperture gain requires frequency > 0 Hz, got {frequency_hz}"
        )));
    }
    let lambda = T::speed_of_light() / frequency_hz;
    let g = T::of(4.0 * PI) * aperture.area_m2() / (lambda * lambda);
    db_from_linear(g)
}

/// Received power in dBm between two constant-aperture antennas:
/// `pt + 10 * log10(Ae_t * Ae_r / (d^2 * lambda^2))`.
///
/// Algebraically identical to [`friis_received_power_dbm`] with both gains
/// taken from [`gain_from_aperture_dbi`]; unlike the fixed-gain form, the
/// result improves with frequency.
pub fn aperture_received_power_dbm<T: Scalar>(
    pt_dbm: T,
    ae_tx: Aperture<T>,
    ae_rx: Aperture<T>,
    frequency_hz: T,
    distance_m: T,
) -> Result<T> {
    if !(distance_m.is_finite() && distance_m > T::zero()) {
        return Err(Error::Domain(format!(
            "aperture link requires distance > 0 m, got {distance_m}"
        )));
    }
    if !(frequency_hz.is_finite() && frequency_hz > T::zero()) {
        return Err(Error::Domain(format!(
            "aperture link requires frequency > 0 Hz, got {frequency_hz}"
        )));
    }
    let lambda = T::speed_of_light() / frequency_hz;
    let ratio = ae_tx.area_m2() * ae_rx.area_m2() / (distance_m * distance_m * lambda * lambda);
    Ok(pt_dbm + db_from_linear(ratio)?)
}

// ---------------------------------------------------------------------------
// Atmospheric excess attenuation
// ---------------------------------------------------------------------------

/// Sparse table of atmospheric excess attenuation anchors:
/// `(frequency_ghz, excess_db_per_km)` sorted by strictly increasing frequency.
///
/// Lookups interpolate linearly in log-frequency and linearly in dB/km;
/// queries outside the covered range fail rather than extrapolate.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmosTable<T> {
    entries: Vec<(T, T)>,
}

/// Expected header row of an atmospheric table file.
pub const ATMOS_TABLE_HEADER: &str = "frequency_ghz,excess_db_per_km";

impl<T: Scalar> AtmosTable<T> {
    pub fn new(entries: Vec<(T, T)>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Config(format!(
                "atmospheric table needs at least two anchor points, got {}",
                entries.len()
            )));
        }
        for window in entries.windows(2) {
            if window[1].0 <= window[0].0 {
                return Err(Error::Config(format!(
                    "atmospheric table frequencies must be strictly increasing \
                     ({} GHz then {} GHz)",
                    window[0].0, window[1].0
                )));
            }
        }
        for &(freq, att) in &entries {
            if !(freq.is_finite() && freq > T::zero()) {
                return Err(Error::Config(format!(
                    "atmospheric anchor frequency must be > 0 GHz, got {freq}"
                )));
            }
            if !(att.is_finite() && att >= T::zero()) {
                return Err(Error::Config(format!(
                    "atmospheric attenuation must be >= 0 dB/km, got {att} at {freq} GHz"
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Built-in default anchors.
    ///
    /// The low-loss windows at 77, 140, and 240 GHz carry 1 dB/km or less;
    /// the absorption peaks at 60, 120, 183, 325, and 380 GHz carry
    /// approximate sea-level values. Peak magnitudes are indicative only and
    /// meant to be overridden with a measured table when accuracy matters.
    pub fn default_table() -> Self {
        let anchors = [
            (60.0, 15.0),  // O2 absorption complex (approximate)
            (77.0, 0.4),   // low-loss window
            (120.0, 2.0),  // O2 line (approximate)
            (140.0, 1.0),  // low-loss window
            (183.0, 28.0), // H2O line (approximate)
            (240.0, 1.0),  // low-loss window
            (325.0, 38.0), // H2O line (approximate)
            (380.0, 100.0),// H2O line (approximate)
        ];
        let entries = anchors
            .iter()
            .map(|&(f, a)| (T::of(f), T::of(a)))
            .collect();
        Self::new(entries).expect("default anchors are valid")
    }

    pub fn entries(&self) -> &[(T, T)] {
        &self.entries
    }

    /// Covered frequency range in GHz.
    pub fn range_ghz(&self) -> (T, T) {
        (
            self.entries[0].0,
            self.entries[self.entries.len() - 1].0,
        )
    }

    /// Load from a two-column text file with the header row
    /// `frequency_ghz,excess_db_per_km`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::Schema("atmospheric table file is empty".into()))?;
        if header.trim() != ATMOS_TABLE_HEADER {
            return Err(Error::Schema(format!(
                "atmospheric table header must be `{ATMOS_TABLE_HEADER}`, got `{}`",
                header.trim()
            )));
        }
        let mut entries = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let line_no = idx + 2;
            let mut fields = line.split(',');
            let freq = fields
                .next()
                .ok_or_else(|| Error::Schema(format!("line {line_no}: missing frequency")))?;
            let att = fields
                .next()
                .ok_or_else(|| Error::Schema(format!("line {line_no}: missing attenuation")))?;
            if fields.next().is_some() {
                return Err(Error::Schema(format!(
                    "line {line_no}: expected two columns"
                )));
            }
            let freq: f64 = freq.trim().parse().map_err(|_| {
                Error::Schema(format!("line {line_no}: malformed frequency `{freq}`"))
            })?;
            let att: f64 = att.trim().parse().map_err(|_| {
                Error::Schema(format!("line {line_no}: malformed attenuation `{att}`"))
            })?;
            entries.push((T::of(freq), T::of(att)));
        }
        Self::new(entries)
    }

    /// Excess attenuation in dB/km at the given frequency, interpolated
    /// linearly in log-frequency between anchors.
    pub fn excess_db_per_km(&self, frequency_hz: T) -> Result<T> {
        let freq_ghz = frequency_hz / T::of(1e9);
        let (lo, hi) = self.range_ghz();
        if !(frequency_hz.is_finite() && frequency_hz > T::zero()) {
            return Err(Error::Domain(format!(
                "attenuation lookup requires frequency > 0 Hz, got {frequency_hz}"
            )));
        }
        if freq_ghz < lo || freq_ghz > hi {
            return Err(Error::OutOfRange(format!(
                "{freq_ghz} GHz outside atmospheric table range {lo}-{hi} GHz \
                 (no extrapolation)"
            )));
        }
        let pos = self
            .entries
            .iter()
            .position(|&(f, _)| freq_ghz <= f)
            .expect("frequency within table range");
        if self.entries[pos].0 == freq_ghz {
            return Ok(self.entries[pos].1);
        }
        let (f0, a0) = self.entries[pos - 1];
        let (f1, a1) = self.entries[pos];
        let t = (freq_ghz.ln() - f0.ln()) / (f1.ln() - f0.ln());
        Ok(a0 + (a1 - a0) * t)
    }
}

/// Atmospheric excess attenuation in dB over `distance_km`, linear in
/// distance.
pub fn atmospheric_excess_db<T: Scalar>(
    frequency_hz: T,
    distance_km: T,
    table: &AtmosTable<T>,
) -> Result<T> {
    if !(distance_km.is_finite() && distance_km >= T::zero()) {
        return Err(Error::Domain(format!(
            "atmospheric path distance must be >= 0 km, got {distance_km}"
        )));
    }
    Ok(table.excess_db_per_km(frequency_hz)? * distance_km)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

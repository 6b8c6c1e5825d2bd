//! Baseband simulation of the sliding-correlator receive chain.
//!
//! The up/downconversion hardware is modeled as frequency-plan validation
//! plus ideal translation; what is simulated sample-by-sample is the part
//! that carries the measurable claims: the PN waveform, the multipath
//! channel, additive receiver noise, and the correlation that turns one PN
//! period into a power delay profile on a time axis dilated by the slide
//! factor.
//!
//! Amplitudes are kept in sqrt-mW so squared magnitudes read directly in mW
//! and `10*log10` gives dBm.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::rng::normal_pair;
use crate::scalar::Scalar;
use crate::sounder::channel::ChannelSpec;
use crate::sounder::config::{processing_gain_db, SounderConfig};
use crate::sounder::pn::PnSequence;

/// Peak-relative extraction threshold used when recovering path loss.
pub const DEFAULT_EXTRACT_THRESHOLD_DB: f64 = 30.0;

/// Detected taps must also clear the noise floor by this margin.
const NOISE_MARGIN_DB: f64 = 5.0;

/// Floor applied before taking logs of correlator powers.
const POWER_FLOOR_MW: f64 = 1e-40;

// ---------------------------------------------------------------------------
// Received stream
// ---------------------------------------------------------------------------

/// Complex baseband samples out of the simulated receiver front end.
#[derive(Debug, Clone, PartialEq)]
pub struct RxStream<T> {
    /// (I, Q) pairs in sqrt-mW.
    pub samples: Vec<(T, T)>,
    pub sample_rate_hz: T,
}

impl<T: Scalar> RxStream<T> {
    /// Mean received power in dBm.
    pub fn mean_power_dbm(&self) -> T {
        let n = T::of(self.samples.len() as f64);
        let total: T = self
            .samples
            .iter()
            .map(|&(re, im)| re * re + im * im)
            .sum();
        (total / n).max(T::of(POWER_FLOOR_MW)).log10() * T::of(10.0)
    }
}

/// Run one PN period through a multipath channel at the given carrier path
/// loss and add white Gaussian noise of the stated total power.
///
/// The stream is the circular steady state of the periodic transmission, so
/// a delayed tap wraps around the period end. Tap amplitudes bundle the TX
/// power, both antenna gains, the carrier path loss, and the tap's own
/// relative gain.
pub fn propagate<T: Scalar>(
    pn: &PnSequence,
    channel: &ChannelSpec<T>,
    cfg: &SounderConfig<T>,
    carrier_path_loss_db: T,
    noise_power_dbm: T,
    seed: u64,
) -> Result<RxStream<T>> {
    cfg.validate()?;
    let q = cfg.oversampling as usize;
    let l = pn.len();
    let n = l * q;
    let fs = cfg.chip_rate_cps * T::of(q as f64);

    let mut samples = vec![(T::zero(), T::zero()); n];
    for tap in channel.taps() {
        let delay_samples = (tap.delay_s * fs).round();
        let delay_samples = delay_samples
            .to_f64()
            .expect("finite delay in samples") as i64;
        if delay_samples < 0 || delay_samples as usize >= n {
            return Err(Error::Aliasing(format!(
                "tap delay {} s spans {delay_samples} samples, beyond one PN period of {n}",
                tap.delay_s
            )));
        }
        let delay_samples = delay_samples as usize;
        let amp_db = cfg.tx_power_dbm + cfg.tx_gain_dbi + cfg.rx_gain_dbi
            - carrier_path_loss_db
            + tap.gain_db;
        let amp = T::of(10.0).powf(amp_db / T::of(20.0));
        let re_k = amp * tap.phase_rad.cos();
        let im_k = amp * tap.phase_rad.sin();
        for (idx, sample) in samples.iter_mut().enumerate() {
            let src = (idx + n - delay_samples) % n;
            let chip = T::of(pn.chips()[src / q] as f64);
            sample.0 += chip * re_k;
            sample.1 += chip * im_k;
        }
    }

    // Complex AWGN of total power `noise_power_dbm`; -inf disables it.
    let sigma = T::of(10.0).powf(noise_power_dbm / T::of(20.0)) / T::of(2.0).sqrt();
    if sigma > T::zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sample in &mut samples {
            let (g_i, g_q) = normal_pair(&mut rng);
            sample.0 += sigma * T::of(g_i);
            sample.1 += sigma * T::of(g_q);
        }
    }

    Ok(RxStream {
        samples,
        sample_rate_hz: fs,
    })
}

// ---------------------------------------------------------------------------
// Power delay profile
// ---------------------------------------------------------------------------

/// Correlator output: power versus dilated time.
///
/// The observed (dilated) time axis is uniform; true propagation delay is
/// `dilated_time / slide_factor`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile<T> {
    powers_db: Vec<T>,
    dilated_step_s: T,
    slide_factor: u32,
    chip_rate_cps: T,
    oversampling: u32,
    noise_floor_db: T,
}

impl<T: Scalar> PowerDelayProfile<T> {
    pub fn from_parts(
        powers_db: Vec<T>,
        dilated_step_s: T,
        slide_factor: u32,
        chip_rate_cps: T,
        oversampling: u32,
        noise_floor_db: T,
    ) -> Result<Self> {
        if !(dilated_step_s.is_finite() && dilated_step_s > T::zero()) {
            return Err(Error::Domain(format!(
                "dilated step must be > 0 s, got {dilated_step_s}"
            )));
        }
        if slide_factor < 2 {
            return Err(Error::Config(format!(
                "slide factor must be >= 2, got {slide_factor}"
            )));
        }
        Ok(Self {
            powers_db,
            dilated_step_s,
            slide_factor,
            chip_rate_cps,
            oversampling,
            noise_floor_db,
        })
    }

    pub fn len(&self) -> usize {
        self.powers_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers_db.is_empty()
    }

    pub fn powers_db(&self) -> &[T] {
        &self.powers_db
    }

    pub fn dilated_step_s(&self) -> T {
        self.dilated_step_s
    }

    pub fn slide_factor(&self) -> u32 {
        self.slide_factor
    }

    pub fn chip_rate_cps(&self) -> T {
        self.chip_rate_cps
    }

    pub fn noise_floor_db(&self) -> T {
        self.noise_floor_db
    }

    /// (dilated_time_s, power_db) pairs.
    pub fn samples(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.powers_db
            .iter()
            .enumerate()
            .map(move |(i, &p)| (T::of(i as f64) * self.dilated_step_s, p))
    }

    /// Observed duration of one full acquisition, `L * gamma / chip_rate`.
    pub fn dilated_duration_s(&self) -> T {
        T::of(self.powers_db.len() as f64) * self.dilated_step_s
    }

    /// Convert a dilated-axis time back to true propagation delay.
    pub fn true_delay_s(&self, dilated_time_s: T) -> T {
        dilated_time_s / T::of(self.slide_factor as f64)
    }

    /// Export as `#`-prefixed metadata lines plus a two-column table.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# slide_factor = {}\n", self.slide_factor));
        out.push_str(&format!("# chip_rate = {}\n", self.chip_rate_cps));
        out.push_str(&format!("# noise_floor = {}\n", self.noise_floor_db));
        out.push_str("dilated_time_s,power_db\n");
        for (t, p) in self.samples() {
            out.push_str(&format!("{t},{p}\n"));
        }
        out
    }
}

/// Correlate one PN period of the received stream against the oversampled
/// PN replica at every lag, producing the PDP on the dilated time axis.
///
/// One full acquisition dilates a PN period to `L * gamma / chip_rate`
/// (8.19 ms for the 11-bit, gamma = 8000, 2 Gcps defaults), which is the
/// time axis this profile reports.
pub fn sliding_correlate<T: Scalar>(
    rx: &RxStream<T>,
    pn: &PnSequence,
    cfg: &SounderConfig<T>,
) -> Result<PowerDelayProfile<T>> {
    cfg.validate()?;
    let q = cfg.oversampling as usize;
    let l = pn.len();
    let n = l * q;
    let fs = cfg.chip_rate_cps * T::of(q as f64);
    let rate_err = ((rx.sample_rate_hz - fs) / fs).abs();
    if rate_err > T::of(1e-9) {
        return Err(Error::Config(format!(
            "rx sample rate {} Hz does not match chip_rate * oversampling = {fs} Hz",
            rx.sample_rate_hz
        )));
    }
    if rx.samples.len() < n {
        return Err(Error::InsufficientData(format!(
            "rx stream holds {} samples; one dilated period needs {n}",
            rx.samples.len()
        )));
    }

    let replica: Vec<T> = (0..n).map(|i| T::of(pn.chips()[i / q] as f64)).collect();
    let inv_n = T::one() / T::of(n as f64);
    let mut powers_db = Vec::with_capacity(n);
    for lag in 0..n {
        let mut acc_re = T::zero();
        let mut acc_im = T::zero();
        // replica index (j - lag) mod n, split to keep the inner loops
        // modulo-free.
        for j in 0..lag {
            let p = replica[j + n - lag];
            let (re, im) = rx.samples[j];
            acc_re += re * p;
            acc_im += im * p;
        }
        for j in lag..n {
            let p = replica[j - lag];
            let (re, im) = rx.samples[j];
            acc_re += re * p;
            acc_im += im * p;
        }
        acc_re *= inv_n;
        acc_im *= inv_n;
        let power = (acc_re * acc_re + acc_im * acc_im).max(T::of(POWER_FLOOR_MW));
        powers_db.push(T::of(10.0) * power.log10());
    }

    let mut sorted = powers_db.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite powers"));
    let noise_floor_db = sorted[sorted.len() / 2];

    let gamma = T::of(cfg.slide_factor as f64);
    PowerDelayProfile::from_parts(
        powers_db,
        gamma / fs,
        cfg.slide_factor,
        cfg.chip_rate_cps,
        cfg.oversampling,
        noise_floor_db,
    )
}

// ---------------------------------------------------------------------------
// Multipath extraction and path-loss recovery
// ---------------------------------------------------------------------------

/// One detected multipath component, on the true (undilated) delay axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractedTap<T> {
    pub delay_s: T,
    pub power_dbm: T,
}

/// Extraction result plus a flag for thresholds that dipped into the noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedTaps<T> {
    /// Detected taps sorted by delay.
    pub taps: Vec<ExtractedTap<T>>,
    /// True when `peak - threshold` fell below `noise_floor + 5 dB`, i.e.
    /// the requested threshold is noise-limited rather than peak-limited.
    pub noise_limited: bool,
}

/// Pick local maxima within `threshold_below_peak_db` of the strongest
/// sample and at least 5 dB above the noise floor, converting dilated time
/// back to true delay.
pub fn extract_multipath<T: Scalar>(
    pdp: &PowerDelayProfile<T>,
    threshold_below_peak_db: T,
) -> Result<ExtractedTaps<T>> {
    if !(threshold_below_peak_db.is_finite() && threshold_below_peak_db > T::zero()) {
        return Err(Error::Domain(format!(
            "extraction threshold must be > 0 dB, got {threshold_below_peak_db}"
        )));
    }
    if pdp.is_empty() {
        return Err(Error::InsufficientData("cannot extract taps from an empty PDP".into()));
    }
    let powers = pdp.powers_db();
    let n = powers.len();
    let peak = powers
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| a.max(b));
    let floor_gate = pdp.noise_floor_db() + T::of(NOISE_MARGIN_DB);
    let peak_gate = peak - threshold_below_peak_db;
    let gate = peak_gate.max(floor_gate);
    let noise_limited = peak_gate < floor_gate;

    let mut taps = Vec::new();
    for i in 0..n {
        let p = powers[i];
        if p < gate {
            continue;
        }
        // Circular local maximum; strict against the previous sample so a
        // flat pedestal never counts.
        let prev = powers[(i + n - 1) % n];
        let next = powers[(i + 1) % n];
        if n > 1 && !(p > prev && p >= next) {
            continue;
        }
        let dilated_time = T::of(i as f64) * pdp.dilated_step_s();
        taps.push(ExtractedTap {
            delay_s: pdp.true_delay_s(dilated_time),
            power_dbm: p,
        });
    }
    Ok(ExtractedTaps { taps, noise_limited })
}

/// Recover the carrier path loss from a PDP:
/// `tx_power + tx_gain + rx_gain - integrated detected power`.
///
/// Fails with a below-sensitivity error when no tap clears the noise floor
/// or when the integrated power lands under the calibrated sensitivity
/// (referred to the correlator input by the processing gain).
pub fn measured_path_loss<T: Scalar>(
    pdp: &PowerDelayProfile<T>,
    cfg: &SounderConfig<T>,
) -> Result<T> {
    cfg.validate()?;
    let extracted = extract_multipath(pdp, T::of(DEFAULT_EXTRACT_THRESHOLD_DB))?;
    if extracted.taps.is_empty() {
        return Err(Error::BelowSensitivity(
            "no multipath component clears the noise floor".into(),
        ));
    }
    let integrated_mw: T = extracted
        .taps
        .iter()
        .map(|tap| T::of(10.0).powf(tap.power_dbm / T::of(10.0)))
        .sum();
    let integrated_dbm = T::of(10.0) * integrated_mw.log10();
    let detection_floor = cfg.rx_sensitivity_dbm - processing_gain_db::<T>(cfg.pn_order);
    if integrated_dbm < detection_floor {
        return Err(Error::BelowSensitivity(format!(
            "integrated received power {integrated_dbm} dBm is under the \
             sensitivity floor {detection_floor} dBm"
        )));
    }
    Ok(cfg.tx_power_dbm + cfg.tx_gain_dbi + cfg.rx_gain_dbi - integrated_dbm)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sounder::channel::{ChannelTap, synth_channel};
    use crate::sounder::pn::generate_default_msequence;

    const NO_NOISE: f64 = f64::NEG_INFINITY;

    fn small_cfg() -> SounderConfig<f64> {
        // Order 7 keeps the O(n^2) correlation cheap in unit tests.
        SounderConfig {
            pn_order: 7,
            ..SounderConfig::default()
        }
    }

    fn two_tap_channel(second_delay_s: f64, second_gain_db: f64) -> ChannelSpec<f64> {
        ChannelSpec::new(
            vec![
                ChannelTap {
                    delay_s: 0.0,
                    gain_db: 0.0,
                    phase_rad: 0.0,
                    cluster: 0,
                },
                ChannelTap {
                    delay_s: second_delay_s,
                    gain_db: second_gain_db,
                    phase_rad: 0.9,
                    cluster: 1,
                },
            ],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn identity_channel_scales_the_waveform() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 54.0, NO_NOISE, 0).unwrap();
        // pt + gt + gr - PL = 0: unit amplitude copy of the chips.
        for (idx, &(re, im)) in rx.samples.iter().enumerate() {
            let chip = pn.chips()[idx / cfg.oversampling as usize] as f64;
            assert!((re - chip).abs() < 1e-12);
            assert!(im.abs() < 1e-12);
        }
    }

    #[test]
    fn single_tap_power_matches_budget() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        for pl in [60.0, 75.37, 90.0] {
            let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, pl, NO_NOISE, 0).unwrap();
            let expected = cfg.tx_power_dbm + cfg.tx_gain_dbi + cfg.rx_gain_dbi - pl;
            assert!(
                (rx.mean_power_dbm() - expected).abs() < 0.1,
                "pl {pl}: got {} want {expected}",
                rx.mean_power_dbm()
            );
        }
    }

    #[test]
    fn noise_power_adds_to_the_budget() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let signal_dbm = cfg.tx_power_dbm + cfg.tx_gain_dbi + cfg.rx_gain_dbi - 70.0;
        let noise_dbm = signal_dbm; // equal-power noise: total = signal + 3.01 dB
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 70.0, noise_dbm, 9).unwrap();
        let expected = signal_dbm + 10.0 * 2.0_f64.log10();
        assert!(
            (rx.mean_power_dbm() - expected).abs() < 0.2,
            "got {} want {expected}",
            rx.mean_power_dbm()
        );
    }

    #[test]
    fn two_equal_taps_add_three_db() {
        // Full-length sequence: the -1/L pedestal correlation between the
        // two chip waveforms is negligible only for long codes.
        let cfg = SounderConfig::<f64>::default();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let single = propagate(&pn, &ChannelSpec::identity(), &cfg, 80.0, NO_NOISE, 0).unwrap();
        let double = propagate(&pn, &two_tap_channel(10e-9, 0.0), &cfg, 80.0, NO_NOISE, 0).unwrap();
        let delta = double.mean_power_dbm() - single.mean_power_dbm();
        assert!((delta - 3.01).abs() < 0.01, "delta = {delta}");
    }

    #[test]
    fn tap_beyond_period_is_aliasing() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let period_s = pn.len() as f64 / cfg.chip_rate_cps;
        let ch = two_tap_channel(period_s * 1.5, 0.0);
        assert!(matches!(
            propagate(&pn, &ch, &cfg, 80.0, NO_NOISE, 0),
            Err(Error::Aliasing(_))
        ));
    }

    #[test]
    fn propagate_is_deterministic_per_seed() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let ch = synth_channel(4, 3.0, 2.0, 10e-9, 0.2).unwrap();
        let a = propagate(&pn, &ch, &cfg, 90.0, -90.0, 123).unwrap();
        let b = propagate(&pn, &ch, &cfg, 90.0, -90.0, 123).unwrap();
        assert_eq!(a, b);
        let c = propagate(&pn, &ch, &cfg, 90.0, -90.0, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn identity_pdp_has_full_processing_gain() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 75.37, NO_NOISE, 0).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();

        let q = cfg.oversampling as usize;
        let peak_idx = pdp
            .powers_db()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak_idx, 0);
        // Max sidelobe outside the main lobe (one chip each side).
        let sidelobe = pdp
            .powers_db()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let d = (*i).min(pdp.len() - *i);
                d > q
            })
            .map(|(_, &p)| p)
            .fold(f64::NEG_INFINITY, f64::max);
        let pslr = pdp.powers_db()[0] - sidelobe;
        let expected = 20.0 * (pn.len() as f64).log10();
        assert!(
            (pslr - expected).abs() < 1e-6,
            "pslr = {pslr}, expected {expected}"
        );
    }

    #[test]
    fn dilated_axis_carries_the_slide_factor() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let true_sep = 10e-9;
        let rx = propagate(&pn, &two_tap_channel(true_sep, -6.0), &cfg, 80.0, NO_NOISE, 0).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
        let gamma = cfg.slide_factor as f64;

        let taps = extract_multipath(&pdp, 20.0).unwrap().taps;
        assert_eq!(taps.len(), 2);
        // Dilated spacing = true spacing * gamma, to one PDP sample.
        let dilated_spacing = (taps[1].delay_s - taps[0].delay_s) * gamma;
        assert!(
            (dilated_spacing - true_sep * gamma).abs() <= pdp.dilated_step_s(),
            "dilated spacing {dilated_spacing}"
        );
        // Duration of one acquisition: L * gamma / chip_rate.
        let expected_duration = pn.len() as f64 * gamma / cfg.chip_rate_cps;
        assert!((pdp.dilated_duration_s() - expected_duration).abs() < 1e-12);
    }

    #[test]
    fn insufficient_rx_data_detected() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let mut rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 80.0, NO_NOISE, 0).unwrap();
        rx.samples.truncate(rx.samples.len() - 1);
        assert!(matches!(
            sliding_correlate(&rx, &pn, &cfg),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn sample_rate_mismatch_detected() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let mut rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 80.0, NO_NOISE, 0).unwrap();
        rx.sample_rate_hz *= 2.0;
        assert!(matches!(
            sliding_correlate(&rx, &pn, &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn identity_extraction_finds_one_tap_at_zero() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 75.0, NO_NOISE, 0).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
        let extracted = extract_multipath(&pdp, 25.0).unwrap();
        assert_eq!(extracted.taps.len(), 1);
        let half_chip = 0.5 / cfg.chip_rate_cps;
        assert!(extracted.taps[0].delay_s.abs() <= half_chip);
        assert!(!extracted.noise_limited);
    }

    #[test]
    fn two_tap_recovery_hits_delay_and_power_targets() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let pl = 80.0;
        let rx = propagate(&pn, &two_tap_channel(10e-9, -6.0), &cfg, pl, NO_NOISE, 0).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
        let taps = extract_multipath(&pdp, 20.0).unwrap().taps;
        assert_eq!(taps.len(), 2);

        assert!(taps[0].delay_s.abs() < 0.25e-9);
        assert!((taps[1].delay_s - 10e-9).abs() < 0.25e-9);
        let budget = cfg.tx_power_dbm + cfg.tx_gain_dbi + cfg.rx_gain_dbi;
        assert!((taps[0].power_dbm - (budget - pl)).abs() < 0.5);
        assert!((taps[1].power_dbm - (budget - pl - 6.0)).abs() < 0.5);
    }

    #[test]
    fn threshold_semantics_drop_weak_tap() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &two_tap_channel(10e-9, -6.0), &cfg, 80.0, NO_NOISE, 0).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
        let taps = extract_multipath(&pdp, 3.0).unwrap().taps;
        assert_eq!(taps.len(), 1);
        assert!(taps[0].delay_s.abs() < 0.25e-9);
    }

    #[test]
    fn noise_limited_flag_raised_when_threshold_dips_into_noise() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 80.0, -60.0, 5).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
        // Peak sits ~46 dB over the correlator floor here; asking for
        // everything within 60 dB of the peak is noise-limited.
        let extracted = extract_multipath(&pdp, 60.0).unwrap();
        assert!(extracted.noise_limited);
        let strict = extract_multipath(&pdp, 10.0).unwrap();
        assert!(!strict.noise_limited);
    }

    #[test]
    fn extract_rejects_bad_threshold_and_empty_pdp() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 80.0, NO_NOISE, 0).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
        assert!(matches!(
            extract_multipath(&pdp, 0.0),
            Err(Error::Domain(_))
        ));
        let empty =
            PowerDelayProfile::from_parts(Vec::new(), 1e-6, 8000, 2e9, 2, -100.0).unwrap();
        assert!(matches!(
            extract_multipath(&empty, 20.0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn loopback_recovers_injected_path_loss() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        for pl in [60.0, 75.37, 90.0, 110.0] {
            let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, pl, NO_NOISE, 0).unwrap();
            let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
            let recovered = measured_path_loss(&pdp, &cfg).unwrap();
            assert!(
                (recovered - pl).abs() < 0.2,
                "pl {pl}: recovered {recovered}"
            );
        }
    }

    #[test]
    fn gains_cancel_in_recovered_path_loss() {
        let mut cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        // Low enough to stay measurable even with the gains zeroed.
        let pl = 40.0;
        let with_gains = {
            let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, pl, NO_NOISE, 0).unwrap();
            measured_path_loss(&sliding_correlate(&rx, &pn, &cfg).unwrap(), &cfg).unwrap()
        };
        cfg.tx_gain_dbi = 0.0;
        cfg.rx_gain_dbi = 0.0;
        let without_gains = {
            let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, pl, NO_NOISE, 0).unwrap();
            measured_path_loss(&sliding_correlate(&rx, &pn, &cfg).unwrap(), &cfg).unwrap()
        };
        assert!((with_gains - without_gains).abs() < 1e-9);
    }

    #[test]
    fn dynamic_range_boundary_raises_below_sensitivity() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let max_pl = cfg.max_measurable_pl();
        let detectable = {
            let rx =
                propagate(&pn, &ChannelSpec::identity(), &cfg, max_pl - 3.0, NO_NOISE, 0).unwrap();
            measured_path_loss(&sliding_correlate(&rx, &pn, &cfg).unwrap(), &cfg)
        };
        assert!((detectable.unwrap() - (max_pl - 3.0)).abs() < 0.2);
        let rejected = {
            let rx =
                propagate(&pn, &ChannelSpec::identity(), &cfg, max_pl + 3.0, NO_NOISE, 0).unwrap();
            measured_path_loss(&sliding_correlate(&rx, &pn, &cfg).unwrap(), &cfg)
        };
        assert!(matches!(rejected, Err(Error::BelowSensitivity(_))));
    }

    #[test]
    fn pdp_export_has_metadata_and_rows() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 80.0, NO_NOISE, 0).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap();
        let text = pdp.export_text();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# slide_factor = 8000");
        assert!(lines.next().unwrap().starts_with("# chip_rate = "));
        assert!(lines.next().unwrap().starts_with("# noise_floor = "));
        assert_eq!(lines.next().unwrap(), "dilated_time_s,power_db");
        assert_eq!(lines.count(), pdp.len());
    }

    #[test]
    fn loopback_works_in_f32() {
        let cfg = SounderConfig::<f32> {
            pn_order: 7,
            ..SounderConfig::default()
        };
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let rx = propagate(&pn, &ChannelSpec::identity(), &cfg, 75.0_f32, f32::NEG_INFINITY, 0)
            .unwrap();
        let recovered = measured_path_loss(&sliding_correlate(&rx, &pn, &cfg).unwrap(), &cfg)
            .unwrap();
        assert!((recovered - 75.0).abs() < 0.5, "got {recovered}");
    }

    #[test]
    fn pdp_is_bit_identical_for_identical_seeds() {
        let cfg = small_cfg();
        let pn = generate_default_msequence(cfg.pn_order).unwrap();
        let ch = synth_channel(21, 5.9, 3.8, 10e-9, 0.2).unwrap();
        let run = || {
            let rx = propagate(&pn, &ch, &cfg, 85.0, -95.0, 55).unwrap();
            sliding_correlate(&rx, &pn, &cfg).unwrap()
        };
        assert_eq!(run(), run());
    }
}

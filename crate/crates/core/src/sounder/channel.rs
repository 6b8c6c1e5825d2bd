//! Synthetic multipath channels.
//!
//! A channel is a list of (delay, gain, phase) taps grouped into clusters.
//! Synthesis follows the usual clustered arrival picture: cluster count and
//! per-cluster multipath counts are Poisson (clamped to at least one),
//! inter-arrival times are exponential, and tap gain decays linearly in dB
//! with delay. Everything is driven by one seeded stream, so a seed pins the
//! channel bit-for-bit.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::rng::{exponential, poisson, uniform01};
use crate::scalar::Scalar;

/// Intra-cluster arrivals are this fraction of the cluster arrival scale.
const INTRA_CLUSTER_SCALE: f64 = 0.1;

/// One multipath component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTap<T> {
    pub delay_s: T,
    /// Gain in dB relative to the direct path at the carrier path loss.
    pub gain_db: T,
    pub phase_rad: T,
    /// Cluster the tap belongs to.
    pub cluster: u32,
}

/// A synthetic multipath channel: taps sorted by delay, grouped by cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec<T> {
    taps: Vec<ChannelTap<T>>,
    /// Path loss of the direct path the tap gains are relative to, in dB.
    /// Metadata only; the simulator takes the carrier path loss explicitly.
    pub reference_path_loss_db: T,
}

impl<T: Scalar> ChannelSpec<T> {
    /// Build a channel from taps; taps are sorted by delay.
    pub fn new(mut taps: Vec<ChannelTap<T>>, reference_path_loss_db: T) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Domain("a channel needs at least one tap".into()));
        }
        for tap in &taps {
            if !(tap.delay_s.is_finite() && tap.delay_s >= T::zero()) {
                return Err(Error::Domain(format!(
                    "tap delay must be >= 0 s, got {}",
                    tap.delay_s
                )));
            }
            if !tap.gain_db.is_finite() || !tap.phase_rad.is_finite() {
                return Err(Error::Domain("tap gain and phase must be finite".into()));
            }
        }
        taps.sort_by(|a, b| a.delay_s.partial_cmp(&b.delay_s).expect("finite delays"));
        Ok(Self {
            taps,
            reference_path_loss_db,
        })
    }

    /// Single-tap identity channel: zero delay, zero relative gain.
    pub fn identity() -> Self {
        Self {
            taps: vec![ChannelTap {
                delay_s: T::zero(),
                gain_db: T::zero(),
                phase_rad: T::zero(),
                cluster: 0,
            }],
            reference_path_loss_db: T::zero(),
        }
    }

    pub fn taps(&self) -> &[ChannelTap<T>] {
        &self.taps
    }

    pub fn cluster_count(&self) -> usize {
        let mut clusters: Vec<u32> = self.taps.iter().map(|t| t.cluster).collect();
        clusters.sort_unstable();
        clusters.dedup();
        clusters.len()
    }

    /// Serialize as one `delay_ns,gain_db,phase_rad,cluster_id` line per tap.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for tap in &self.taps {
            out.push_str(&format!(
                "{},{},{},{}\n",
                tap.delay_s * T::of(1e9),
                tap.gain_db,
                tap.phase_rad,
                tap.cluster
            ));
        }
        out
    }

    /// Parse the [`to_text`](Self::to_text) format. Blank lines and `#`
    /// comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut taps = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let line_no = idx + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Schema(format!(
                    "line {line_no}: expected `delay_ns,gain_db,phase_rad,cluster_id`, \
                     got {} fields",
                    fields.len()
                )));
            }
            let parse = |name: &str, field: &str| -> Result<f64> {
                field.trim().parse().map_err(|_| {
                    Error::Schema(format!("line {line_no}: malformed {name} `{field}`"))
                })
            };
            let delay_ns = parse("delay_ns", fields[0])?;
            let gain_db = parse("gain_db", fields[1])?;
            let phase_rad = parse("phase_rad", fields[2])?;
            let cluster: u32 = fields[3].trim().parse().map_err(|_| {
                Error::Schema(format!(
                    "line {line_no}: malformed cluster_id `{}`",
                    fields[3]
                ))
            })?;
            taps.push(ChannelTap {
                delay_s: T::of(delay_ns / 1e9),
                gain_db: T::of(gain_db),
                phase_rad: T::of(phase_rad),
                cluster,
            });
        }
        Self::new(taps, T::zero())
    }
}

/// Synthesize a clustered multipath channel.
///
/// * `mean_clusters` / `mean_mpcs_per_cluster` - Poisson means, clamped to
///   at least one cluster and one component per cluster.
/// * `delay_scale_s` - mean exponential inter-arrival of clusters;
///   intra-cluster arrivals use a tenth of it.
/// * `decay_db_per_ns` - linear dB decay of tap gain with delay.
///
/// The first cluster starts at zero delay and its first tap carries 0 dB,
/// so the direct path always survives the clamp.
pub fn synth_channel<T: Scalar>(
    seed: u64,
    mean_clusters: f64,
    mean_mpcs_per_cluster: f64,
    delay_scale_s: f64,
    decay_db_per_ns: f64,
) -> Result<ChannelSpec<T>> {
    if !(mean_clusters.is_finite() && mean_clusters > 0.0) {
        return Err(Error::Domain(format!(
            "mean cluster count must be > 0, got {mean_clusters}"
        )));
    }
    if !(mean_mpcs_per_cluster.is_finite() && mean_mpcs_per_cluster > 0.0) {
        return Err(Error::Domain(format!(
            "mean multipath count must be > 0, got {mean_mpcs_per_cluster}"
        )));
    }
    if !(delay_scale_s.is_finite() && delay_scale_s > 0.0) {
        return Err(Error::Domain(format!(
            "delay scale must be > 0 s, got {delay_scale_s}"
        )));
    }
    if !(decay_db_per_ns.is_finite() && decay_db_per_ns >= 0.0) {
        return Err(Error::Domain(format!(
            "decay must be >= 0 dB/ns, got {decay_db_per_ns}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_clusters = poisson(&mut rng, mean_clusters).max(1);
    let mut taps = Vec::new();
    let mut cluster_start = 0.0_f64;
    for cluster in 0..n_clusters {
        if cluster > 0 {
            cluster_start += exponential(&mut rng, delay_scale_s);
        }
        let n_mpcs = poisson(&mut rng, mean_mpcs_per_cluster).max(1);
        let mut delay = cluster_start;
        for mpc in 0..n_mpcs {
            if mpc > 0 {
                delay += exponential(&mut rng, delay_scale_s * INTRA_CLUSTER_SCALE);
            }
            let gain_db = -decay_db_per_ns * delay * 1e9;
            let phase = 2.0 * std::f64::consts::PI * uniform01(&mut rng);
            taps.push(ChannelTap {
                delay_s: T::of(delay),
                gain_db: T::of(gain_db),
                phase_rad: T::of(phase),
                cluster: cluster as u32,
            });
        }
    }
    ChannelSpec::new(taps, T::zero())
}

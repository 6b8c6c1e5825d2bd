//! Sliding-correlator channel-sounder simulation.
//!
//! The pipeline mirrors the measurement chain of the dual-conversion
//! instrument: a maximal-length PN probing sequence ([`pn`]), a synthetic
//! clustered multipath channel ([`channel`]), noisy baseband reception and
//! sliding correlation into a time-dilated power delay profile, multipath
//! extraction, and path-loss recovery ([`sim`]).

pub mod channel;
pub mod config;
pub mod pn;
pub mod sim;

pub use channel::{synth_channel, ChannelSpec, ChannelTap};
pub use config::{processing_gain_db, SounderConfig, DEFAULT_MAX_MEASURABLE_PL_DB};
pub use pn::{default_taps, generate_default_msequence, generate_msequence, PnSequence};
pub use sim::{
    extract_multipath, measured_path_loss, propagate, sliding_correlate, ExtractedTap,
    ExtractedTaps, PowerDelayProfile, RxStream, DEFAULT_EXTRACT_THRESHOLD_DB,
};

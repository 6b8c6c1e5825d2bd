//! Millimeter-wave propagation toolkit.
//!
//! Desk-scale counterpart of a 140 GHz wideband measurement system:
//!
//! * [`rfmath`] - dB conversions, Friis free-space path loss, antenna
//!   aperture relations, and atmospheric excess attenuation;
//! * [`sounder`] - a sliding-correlator channel-sounder simulator, from PN
//!   sequence to time-dilated power delay profile and recovered path loss;
//! * [`plfit`] - closed-form least-squares fitting of the CI, FI, CIF, and
//!   ABG path-loss models;
//! * [`penetration`] - material penetration loss with the embedded
//!   drywall/clear-glass reference table at 28, 73, and 140 GHz;
//! * [`linkbudget`] - dynamic-range accounting and maximum measurable
//!   distance;
//! * [`campaign`] - measurement-record ingestion, configuration, and report
//!   emission;
//! * [`verify`] - the embedded replication suite behind `mmprop verify`.
//!
//! The math modules are generic over the [`Scalar`] floating-point type;
//! the aliases exported here pin everything to `f64`, which is what the CLI
//! and the published tolerances use.

pub mod campaign;
pub mod error;
pub mod linkbudget;
pub mod penetration;
pub mod plfit;
pub mod rfmath;
pub(crate) mod rng;
pub mod scalar;
pub mod sounder;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Scalar, SPEED_OF_LIGHT_M_S};

// Non-generic types pass straight through.
pub use campaign::{CampaignConfig, Diagnostic, Environment, Ingest, MeasurementRecord};
pub use penetration::Polarization;
pub use plfit::ModelKind;
pub use sounder::PnSequence;

// Double-precision instantiations of the generic core.
pub type Aperture = rfmath::Aperture<f64>;
pub type AtmosTable = rfmath::AtmosTable<f64>;
pub type Budget = linkbudget::Budget<f64>;
pub type SounderConfig = sounder::SounderConfig<f64>;
pub type ChannelSpec = sounder::ChannelSpec<f64>;
pub type ChannelTap = sounder::ChannelTap<f64>;
pub type RxStream = sounder::RxStream<f64>;
pub type PowerDelayProfile = sounder::PowerDelayProfile<f64>;
pub type PlSample = plfit::PlSample<f64>;
pub type CiParams = plfit::CiParams<f64>;
pub type FiParams = plfit::FiParams<f64>;
pub type CifParams = plfit::CifParams<f64>;
pub type AbgParams = plfit::AbgParams<f64>;
pub type PenetrationMeasurement = penetration::PenetrationMeasurement<f64>;
pub type MaterialResult = penetration::MaterialResult<f64>;

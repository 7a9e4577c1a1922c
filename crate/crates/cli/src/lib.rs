//! Scenario ingestion, product-term decomposition, surface sampling, and
//! file export around the phase-space core.

pub mod export;
pub mod opspec;
pub mod props;
pub mod scenario;
pub mod surface;

use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank/order out of range: (j, m) = ({j}, {m}) for spin J = {spin}")]
    RankOutOfRange { j: String, m: String, spin: String },

    #[error("spin slot {slot} out of range for {n_spins} spins")]
    SlotOutOfRange { slot: usize, n_spins: usize },

    #[error("repeated spin slot {slot}")]
    RepeatedSlot { slot: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not hermitian (relative deviation {dev:.3e})")]
    NotHermitian { dev: f64 },

    #[error("state has non-unit trace ({trace:.6e})")]
    NonUnitTrace { trace: f64 },

    #[error(
        "unrepresentable rank {rank} (spherical ranks must stay <= {max} for spin J = {spin})"
    )]
    UnrepresentableRank { rank: u32, max: u32, spin: String },

    #[error("not a natural Hamiltonian: a term couples {count} spins")]
    NotNaturalHamiltonian { count: usize },

    #[error("nonlinear Hamiltonian unsupported for J > 1/2")]
    NonlinearHamiltonian,

    #[error("under-resolved grid: rank {rank} requires more than {n_theta} polar nodes")]
    UnderResolvedGrid { rank: u32, n_theta: usize },

    #[error("times must be sorted in strictly increasing order")]
    UnsortedTimes,

    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

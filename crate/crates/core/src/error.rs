use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("occupation tuple {0:?} is not a member of the basis")]
    NotInBasis(Vec<u32>),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("both couplings are zero")]
    NoCoupling,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("negative time step {0}")]
    NegativeTimeStep(f64),

    #[error("phase schedule has {got} entries, expected {expected}")]
    ScheduleLength { expected: usize, got: usize },

    #[error("success probability is zero; conditional quantity undefined")]
    ZeroSuccess,

    #[error("detuning is zero; the strong-detuning limit does not apply")]
    ZeroDetuning,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (determinant {0:e})")]
    Singular(f64),
    #[error("height must be positive, got {0}")]
    NonPositiveHeight(f64),
    #[error("modulus b must lie in the upper half plane (Im b = {0})")]
    ModulusNotInUpperHalfPlane(f64),
    #[error("input is parabolic; complex length undefined")]
    ParabolicInput,
    #[error("input is the identity")]
    IdentityInput,
    #[error("operation requires a != 0 (cusp parameter)")]
    ZeroA,
    #[error("e^a = 1 with a != 0: the normalized chart degenerates")]
    SingularNormalization,
    #[error("target filling coordinates (0, 0) are excluded")]
    ZeroTarget,
    #[error("newton iterate {0} left the path domain")]
    DomainExit(String),
    #[error("derivative vanishes at {0}")]
    CriticalPoint(String),
    #[error("point lies below the plane over the real line (Im z = {0})")]
    WrongSide(f64),
    #[error("point {0} is outside the declared domain")]
    OutsideDomain(String),
    #[error("finite-difference stencil exits the domain")]
    StepTooLarge,
    #[error("step {0:e} is below the cancellation limit")]
    StepTooSmall(f64),
    #[error("word letter {letter} is invalid for {generators} generators")]
    BadWord { letter: i32, generators: usize },
    #[error("sampling region has zero volume")]
    DegenerateRegion,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building or checking the algebraic
/// objects of this crate.
///
/// The variants fall into three families that callers (the CLI in
/// particular) map onto distinct exit codes: structural misuse, inadmissible
/// input, and exceeding the exhaustive-enumeration cap.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("elements belong to different Boolean algebras ({left} vs {right} atoms)")]
    AlgebraMismatch { left: u32, right: u32 },

    #[error("atom bits {bits:#x} out of range for a {atoms}-atom algebra")]
    ElementOutOfRange { atoms: u32, bits: u64 },

    #[error("Boolean algebra with {0} atoms is too large for this operation")]
    TooManyAtoms(u32),

    #[error("ideal contains the top element, so it is improper")]
    ImproperIdeal,

    #[error("ideal is not maximal")]
    NotMaximal,

    #[error("subset is not an ideal of the Boolean algebra: {0}")]
    NotBoolIdeal(String),

    #[error("map is not a Boolean homomorphism: {0}")]
    NotBoolHom(String),

    #[error("ring axiom violated: {0}")]
    RingAxiom(String),

    #[error("the zero ring (1 = 0) is not admissible")]
    ZeroRing,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("polynomial {0} is reducible over the prime field")]
    ReduciblePolynomial(String),

    #[error("subset is not an ideal: {0}")]
    NotRingIdeal(String),

    #[error("subset is not a subring: {0}")]
    NotSubring(String),

    #[error("element {element} is outside a ring of size {size}")]
    ElementOutOfRing { element: usize, size: usize },

    #[error("ideal is not maximal in the ring")]
    NotMaximalRingIdeal,

    #[error("ring of size {size} exceeds the exhaustive cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("patch presheaf violation: {0}")]
    Presheaf(String),

    #[error("not an element of the patch algebra: {0}")]
    NotInAlgebra(String),

    #[error("morphism violation: {0}")]
    Morphism(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by inadmissible parameters rather than misuse.
    pub fn is_admissibility(&self) -> bool {
        matches!(
            self,
            Error::RingAxiom(_)
                | Error::ZeroRing
                | Error::NotPrime(_)
                | Error::ReduciblePolynomial(_)
                | Error::NotRingIdeal(_)
                | Error::NotSubring(_)
                | Error::ElementOutOfRing { .. }
                | Error::Presheaf(_)
                | Error::Morphism(_)
                | Error::NotInAlgebra(_)
                | Error::InvalidArgument(_)
                | Error::NotBoolIdeal(_)
                | Error::NotBoolHom(_)
                | Error::ElementOutOfRange { .. }
                | Error::AlgebraMismatch { .. }
                | Error::TooManyAtoms(_)
        )
    }
}

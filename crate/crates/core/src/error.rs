use thiserror::Error;

/// Every failure the engine can report. Variants carry enough detail to name
/// the offending object without needing the caller's context.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not Hermitian at entry ({row}, {col})")]
    NotHermitian { row: usize, col: usize },
    #[error("matrix is not idempotent at entry ({row}, {col})")]
    NotIdempotent { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("spectrum is not rational (exact factorisation failed); supply a spectral resolution")]
    IrrationalSpectrum,
    #[error("invalid spectral resolution hint: {0}")]
    InvalidHint(String),
    #[error("operator has no attached spectral resolution")]
    Unresolved,
    #[error("state is not normalized: squared norm / trace is {0}")]
    NotNormalized(String),
    #[error("invalid density decomposition: {0}")]
    InvalidDensity(String),
    #[error("expectation value has nonzero imaginary part {0}")]
    ComplexExpectation(String),
    #[error("atoms {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("atoms do not sum to the identity")]
    NotResolution,
    #[error("the trivial algebra (a single atom) is excluded")]
    TrivialContext,
    #[error("atom {0} is the zero projector")]
    ZeroAtom(usize),
    #[error("context has {found} atoms; at most {max} are supported")]
    TooManyAtoms { found: usize, max: usize },
    #[error("unknown context '{0}'")]
    UnknownContext(String),
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("image of context '{0}' lies outside the poset")]
    ImageOutsidePoset(String),
    #[error("context '{sub}' is not below '{sup}'")]
    NotSubcontext { sub: String, sup: String },
    #[error("projector is not an element of context '{0}'")]
    NotInAlgebra(String),
    #[error("operands belong to different context posets")]
    PosetMismatch,
    #[error("sieves have different roots ('{0}' vs '{1}')")]
    RootMismatch(String, String),
    #[error("invalid sieve: {0}")]
    InvalidSieve(String),
    #[error("sub-object is not compatible with restriction from '{from}' to '{to}'")]
    NotCompatible { from: String, to: String },
    #[error("threshold r = {0} is outside (0, 1]")]
    BadThreshold(String),
    #[error("measure is ill defined: {0}")]
    IllDefined(String),
    #[error("invalid basis system: {0}")]
    InvalidSystem(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error in '{object}': {message}")]
    Validation { object: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotIdempotent { .. } => "NotIdempotent",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IrrationalSpectrum => "IrrationalSpectrum",
            Error::InvalidHint(_) => "InvalidHint",
            Error::Unresolved => "Unresolved",
            Error::NotNormalized(_) => "NotNormalized",
            Error::InvalidDensity(_) => "InvalidDensity",
            Error::ComplexExpectation(_) => "ComplexExpectation",
            Error::NotOrthogonal(..) => "NotOrthogonal",
            Error::NotResolution => "NotResolution",
            Error::TrivialContext => "TrivialContext",
            Error::ZeroAtom(_) => "ZeroAtom",
            Error::TooManyAtoms { .. } => "TooManyAtoms",
            Error::UnknownContext(_) => "UnknownContext",
            Error::NotUnitary => "NotUnitary",
            Error::ImageOutsidePoset(_) => "ImageOutsidePoset",
            Error::NotSubcontext { .. } => "NotSubcontext",
            Error::NotInAlgebra(_) => "NotInAlgebra",
            Error::PosetMismatch => "PosetMismatch",
            Error::RootMismatch(..) => "RootMismatch",
            Error::InvalidSieve(_) => "InvalidSieve",
            Error::NotCompatible { .. } => "NotCompatible",
            Error::BadThreshold(_) => "BadThreshold",
            Error::IllDefined(_) => "IllDefined",
            Error::InvalidSystem(_) => "InvalidSystem",
            Error::Parse { .. } => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the scattering toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    BadGridSize(usize),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("input is not real-valued (max |im| = {0:e})")]
    NotReal(f64),

    #[error("weight vanishes on grid (min sample = {0:e})")]
    WeightVanishes(f64),

    #[error("input is not unimodular (max ||s| - 1| = {0:e})")]
    NotUnimodular(f64),

    #[error("phase jump of {step:.6} rad at grid index {index}; refine the grid")]
    PhaseJump { index: usize, step: f64 },

    #[error("function leaves the unit ball (sup modulus = {0})")]
    NotSchur(f64),

    #[error("function does not vanish at the origin (|c_0| = {0:e})")]
    NonzeroAtOrigin(f64),

    #[error("alpha_minus_one must be unimodular, got modulus {0}")]
    AnchorNotUnimodular(f64),

    #[error("Verblunsky coefficient {index} has modulus {modulus} (must be < 1)")]
    CoefficientOutsideDisk { index: usize, modulus: f64 },

    #[error("degenerate Schur step at n = {n}: |a_n| = {modulus}")]
    Degenerate { n: usize, modulus: f64 },

    #[error("index order violated: j = {j} > n = {n}")]
    IndexOrder { j: usize, n: usize },

    #[error(
        "insufficient Fourier range: index {needed} required, grid supports |n| < {available}"
    )]
    InsufficientRange { needed: usize, available: usize },

    #[error("denominator vanishes on grid (min modulus = {0:e})")]
    DenominatorVanishes(f64),

    #[error("non-canonical or out of implemented scope: {0}")]
    NonCanonical(String),

    #[error("canonicity undecided: {0}")]
    Undecided(String),

    #[error("oscillation sup v - inf v = {0} must be below pi")]
    Oscillation(f64),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

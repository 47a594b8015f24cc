//! Mixed moduli of smoothness of fractional order for 2π-periodic functions
//! of two variables.
//!
//! The crate is organised bottom-up:
//!
//! * [`mixed_norm`]: uniform grids, samples and the mixed `L^{p1 p2}` norms.
//! * [`spectral`]: Fourier analysis/synthesis, Weyl derivatives, conjugates,
//!   de la Vallée-Poussin means and fractional-difference multipliers.
//! * [`smoothness`]: fractional differences and the mixed modulus
//!   `ω_{α1,α2}(f, δ1, δ2)_{p1 p2}` with a discretised supremum over steps.
//! * [`realization`]: the four-term realization functional and best
//!   approximation by angle.
//! * [`harness`]: example functions, Hardy-type right-hand sides of the
//!   Ulyanov inequalities, ratio reports and power-log rate fits.
//! * [`properties`]: seeded property suites for the modulus, the conjugate
//!   phase identity and the kernel partial-sum bound.
//! * [`report`]: CSV/JSON emission shared by the CLI.

pub mod error;
pub mod harness;
pub mod mixed_norm;
pub mod properties;
pub mod realization;
pub mod report;
pub mod smoothness;
pub mod spectral;

mod eval;
mod sum;

pub use error::{Error, Result};
pub use harness::{
    LacunaryParams, Phase, RateFit, RefinementCheck, Separation, UlyanovQuery, UlyanovReport, UlyanovRow,
};

pub use mixed_norm::{Exponent, ExponentPair, GridSpec2D, Sample2D};
pub use realization::AngleDegrees;

pub use smoothness::{BinomialTail, ModulusControls, ModulusOutcome, ModulusQuery};
pub use spectral::{Spectrum1D, Spectrum2D, VpOrder};

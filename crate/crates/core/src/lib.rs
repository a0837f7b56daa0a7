//! Exact Fourier analysis of boolean functions on the hypercube.
//!
//! The crate computes Walsh spectra, influences, Fourier entropy and
//! restricted-Fourier moments of functions `f: {-1,1}^n -> {-1,1}` with
//! `n <= 24`, and checks the entropy/influence inequalities built on them:
//!
//! * [`spectrum`]: integer Walsh–Hadamard transform and exact influences;
//! * [`entropy`]: entropy, min-entropy, concentration and the explicit
//!   `(3I + sum I_k ln(4/I_k)) / ln 2` bound;
//! * [`moments`]: `M_{V,ε}` moments, the telescoping chain and the
//!   derivative route back to entropy;
//! * [`inequality`]: scalar binomial inequalities and coefficient-pair
//!   functionals;
//! * [`search`]: exhaustive and sampled sweeps with checkpoints.
//!
//! ```
//! use hypercube_spectra::{analyze, make_family};
//!
//! let maj = make_family(&"majority:n=3".parse()?)?;
//! let report = analyze(&maj, &[])?;
//! assert_eq!(report.entropy_bits, 2.0);
//! assert!(report.entropy_bits <= report.bound_bits);
//! # Ok::<(), hypercube_spectra::Error>(())
//! ```

pub mod boolfn;
pub mod coords;
pub mod dyadic;
pub mod entropy;
mod error;
pub mod family;
pub mod inequality;
pub mod moments;
pub mod numeric;
pub mod search;
pub mod spectrum;
pub mod verify;

/// Largest supported dimension.
pub const MAX_DIMENSION: usize = 24;

pub use boolfn::{BooleanFunction, Restriction};
pub use coords::CoordSet;
pub use dyadic::Dyadic;
pub use entropy::{analyze, AnalysisReport};
pub use error::{Error, Result};
pub use family::{family_report, make_family, Family, FamilySpec};
pub use spectrum::{influences_combinatorial, influences_spectral, wht, InfluenceProfile, Spectrum};

// The guide's code blocks run as doctests, one module per chapter.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/truth-tables.md")]
    mod truth_tables {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

//! Dunkl operator dynamics on truncated power series of entire functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`numeric`]: MPFR-backed reals, a complex pair type, log-domain scalars
//!   and a Stirling-series log-gamma.
//! - [`series`]: truncated Taylor series with point and circle evaluation.
//! - [`dunkl`]: the weights `d_n(alpha)`, the operator and its right inverse,
//!   and general weighted backward shifts.
//! - [`means`]: integral means `M_p(f, r)` and the Hausdorff-Young comparison.
//! - [`growth`]: rate exponents, weight asymptotics, Mittag-Leffler functions
//!   and growth profiles.
//! - [`construct`]: builders for hypercyclic and frequently hypercyclic
//!   functions together with their verifiers.
//! - [`dynamics`]: orbits at the origin and the Cauchy-estimate obstruction.
//! - [`report`]: CSV emission shared by the experiment runner.

pub mod construct;
pub mod dunkl;
pub mod dynamics;
pub mod growth;
pub mod means;
pub mod numeric;
pub mod report;
pub mod series;

pub use dunkl::{DunklWeights, WeightedShift};
pub use numeric::{HighComplex, HighReal, LogScaled};
pub use series::TruncatedSeries;

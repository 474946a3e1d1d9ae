//! Sufficient instability certificates for circulatory and gyroscopic
//! conservative linear systems.
//!
//! A real polynomial has a non-real root whenever some Gram determinant of
//! its root-power vectors is negative. Those determinants are Hankel
//! determinants of root power sums, and power sums are available from the
//! coefficients (Newton's identities) or from matrix traces. Applied to the
//! reduced characteristic polynomial `Q(α)` of `q'' + K q + C q = 0` or
//! `q'' + G q' + K q = 0`, a non-real root of `Q` forces a characteristic
//! root `λ = ±√α` with positive real part.
//!
//! Modules:
//!
//! - [`polycrit`]: power sums, Gram determinants and coefficient criteria.
//! - [`matcrit`]: symmetric/skew splits, trace power sums, characteristic
//!   polynomials.
//! - [`mech`]: mechanical systems, their verdicts and the two example
//!   families.
//! - [`oracle`]: root finding and spectral ground truth.
//! - [`sweep`]: `(k, c)` parameter sweeps with CSV and SVG output.
//! - [`doc`]: JSON system documents consumed by the CLI.

pub mod doc;
pub mod error;
pub mod matcrit;
pub mod mech;
pub mod oracle;
pub mod polycrit;
pub mod sweep;

pub use error::{Error, Result};
pub use matcrit::{RealSquareMatrix, SymSkewSplit};
pub use mech::{CirculatorySystem, Classification, GyroscopicSystem, NormalForm};
pub use oracle::{RootSet, SpectralReport};
pub use polycrit::{CriterionVerdict, MonicPolynomial, PowerSums};

//! Holomorphic k-differentials on the degenerating annulus family `zw = t`.
//!
//! The crate covers Laurent coefficient recovery on circles, the pointwise
//! form algebra of the nodal family, band bounds for k-differentials,
//! holomorphic extension of band-bounded families across the node, zero
//! counting by the argument principle, the hyperbolic collar metric, and
//! the correspondence between relative sections and canonical forms.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collar;
pub mod differentials;
pub mod divisor;
pub mod error;
pub mod extension;
mod json;
pub mod laurent;
pub mod nodal;
pub mod random;
pub mod sheaf;
pub mod verify;

pub use num_complex::Complex64;

pub use differentials::{
    AnnulusKDifferential, Band, BandGrid, BandSpec, NodalKDifferential, PowerSeries,
};
pub use error::{Error, Result};
pub use extension::{Branch, FamilySamples, TwoVarSeries};
pub use laurent::{CircleSamples, Decomposition, LaurentSeries};
pub use nodal::{AnnulusSpec, ChartPoint, CotangentElement, NodalFamilySpec, TangentElement};
pub use sheaf::{CanonicalForm, GaugeFunction, RelativeSection};

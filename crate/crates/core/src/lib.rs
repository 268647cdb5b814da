// `!(x <= tol)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod fit;
pub mod gpdyn;
pub mod oscint;
pub mod scalar;
pub mod strichartz;
pub mod symbol;

pub use error::{Error, Result};
pub use scalar::{Exact, Real};

/// Double-precision instances of the generic types.
pub type Grid = field::RadialGrid<f64>;
pub type Field = field::RadialField<f64>;
pub type State = gpdyn::GPState<f64>;
pub type MField = gpdyn::MState<f64>;
pub type Symbol = symbol::SymbolSpec<f64>;
pub type Prediction = strichartz::StrichartzPrediction<num_rational::Ratio<i64>>;

//! Exact construction and analysis of monads on P³, their extensions and
//! restrictions to lines, plus a numerical lab for instanton connections on
//! a flat chart of S⁴.

pub mod error;
pub mod ext;
pub mod field;
pub mod graded;
pub mod json;
pub mod lab;
pub mod linalg;
pub mod lines;
pub mod monad;

pub use error::{Error, Result};
pub use field::{Field, FieldKind, Fp, GaussianRational, Rational};
pub use graded::{BinaryForm, HomogeneousForm};
pub use linalg::{DenseMatrix, RowSpace};
pub use monad::{CohomologyTable, FormMatrix, Monad, TwistTerm};

/// The default prime field.
pub type Gf32003 = Fp<32003>;

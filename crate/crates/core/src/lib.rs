//! Extending near D(4)-pairs `{a, b}` to D(4)-quadruples.
//!
//! A set is a D(4)-m-tuple when the product of any two distinct elements plus
//! 4 is a perfect square. This crate enumerates the third elements `c` of a
//! pair, sets up the simultaneous Pellian equations for `{a, b, c}`, bounds
//! their solutions through linear forms in logarithms, reduces the bounds and
//! searches the remaining range.

pub mod bigarith;
pub mod dtuples;
pub mod error;
pub mod families;
pub mod linforms;
pub mod pell;
pub mod reduction;

pub use bigarith::{enclose, Expr, RealEnclosure};
pub use dtuples::{CLabel, DnPair, DnQuadruple, DnTriple};
pub use error::{ArithError, LinformError, PellError, ReductionError, TupleError};
pub use families::{FamilyCatalog, ParametricFamily};
pub use linforms::{FormKind, LinearFormInstance, MignotteParameters};
pub use pell::{Intersection, IntersectionCase, ParityClass, SolutionSequence};
pub use reduction::{BoundRoute, IndexBound, ReductionInstance, ReductionOutcome};

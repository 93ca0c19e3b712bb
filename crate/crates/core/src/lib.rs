pub mod autgroup;
pub mod curves;
pub mod equiv;
pub mod error;
pub mod ffield;
pub mod moebius;
pub mod places;
pub mod poly;
pub mod quotients;
pub mod verify;

pub use error::{GfcError, Result};
pub use ffield::{Elem, Field, FieldElement, Tower};
pub use moebius::{Moebius, ProjPoint};
pub use places::{Divisor, Place, RatFn};
pub use poly::Poly;

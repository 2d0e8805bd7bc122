//! Microlocal analysis at boundary covectors.

mod companion;
mod covector;
mod dn;
mod lopatinski;
mod residue;
mod roots;

pub use companion::*;
pub use covector::*;
pub use dn::*;
pub use lopatinski::*;
pub use residue::*;
pub use roots::*;

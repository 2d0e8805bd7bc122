//! Bicharacteristics, reflections, lens maps and boundary distances.

mod distance;
mod flow;
mod leg;
mod recover;
mod reflect;
mod transport;

pub use distance::*;
pub use flow::*;
pub use leg::*;
pub use recover::*;
pub use reflect::*;
pub use transport::*;

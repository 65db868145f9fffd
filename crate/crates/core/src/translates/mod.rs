mod classify;
mod convolution;
mod expansion;
mod generator;
mod union;

pub use classify::*;
pub use convolution::*;
pub use expansion::*;
pub use generator::*;
pub use union::*;

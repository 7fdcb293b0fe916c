pub mod birkhoff;
pub mod dd;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod map;
pub mod numerics;
pub mod orbits;
pub mod real;
pub mod stability;

pub mod analysis;
pub mod basis;
pub mod circuit;
pub mod device;
pub mod experiment;
pub mod probability;
pub mod readout;
pub mod rng;

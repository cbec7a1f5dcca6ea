pub mod decode;
pub mod dips;
pub mod eval;
pub mod label;
pub mod predict;
pub mod rouge;
pub mod segment;
pub mod silver;
pub mod synth;
pub mod train;

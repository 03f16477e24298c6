//! Deterministic numerical substrate shared by every other module.

mod fft;
pub mod fourier;
pub mod grid;
pub mod hermite;
pub mod monotone;
pub mod quadrature;
pub mod rng;

pub use fourier::GridPair;
pub use grid::GridSpec;
pub use hermite::{hermite_function, hermite_functions, MAX_HERMITE_ORDER};
pub use monotone::{inverse_cdf, Cdf, MonotoneMap, Orientation, QuantileMap};
pub use quadrature::{integrate, integrate_complex, simpson_weights};
pub use rng::SeededStream;

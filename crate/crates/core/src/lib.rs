//! Special Kähler geometry on the bases of spectral-curve integrable systems
//! over genus-2 hyperelliptic curves.

pub mod acceptance;
pub mod golden;
pub mod oracle;
pub mod periods;
pub mod poly;
pub mod quad2d;
pub mod riemann;
pub mod skmetric;
pub mod symalg;

pub use num_complex::Complex64 as C64;

pub mod cli;
pub mod coefficients;
pub mod continuum;
pub mod dalembertian;
pub mod error;
pub mod exact;
pub mod hypergeom;
pub mod real;
pub mod sprinkling;

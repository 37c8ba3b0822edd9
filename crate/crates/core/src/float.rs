// Brings `sin`, `sqrt`, ... into scope for `f64` when `std` is unavailable.
#[allow(unused_imports)]
pub(crate) use num_traits::Float;

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;

//! Transcendental functions routed through `libm` so the crate stays
//! `no_std`-compatible and produces identical bits on every platform.

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp2(x: f64) -> f64 {
    libm::exp2(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

//! `f64` helpers for `no_std` builds.

pub(crate) use core::f64::consts::PI;

pub(crate) const TWO_PI: f64 = 2.0 * PI;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Wraps an angle into `[-pi, pi)`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    if (-PI..PI).contains(&a) {
        return a;
    }
    let r = a - TWO_PI * floor((a + PI) / TWO_PI);
    if r >= PI {
        r - TWO_PI
    } else if r < -PI {
        -PI
    } else {
        r
    }
}

/// Signed shortest angular difference `b - a` in `[-pi, pi)`.
#[inline]
pub(crate) fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(b - a)
}

//! Minimal helpers for planar vectors stored as `[f64; 2]`.

pub type Vec2 = [f64; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// z-component of the planar cross product.
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(s: f64, a: Vec2) -> Vec2 {
    [s * a[0], s * a[1]]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn unit_from_angle(theta: f64) -> Vec2 {
    [theta.cos(), theta.sin()]
}

#[inline]
pub fn midpoint(a: Vec2, b: Vec2) -> Vec2 {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

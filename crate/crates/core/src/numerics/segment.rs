//! Closed-form integrals of |a + b t| along straight momentum segments.

use crate::numerics::gk::{integrate_adaptive, QuadOptions};
use crate::Vec3;

const GL5_X: [f64; 5] = [
    0.046_910_077_030_668_004,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL5_W: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// Integral over s in [0, s1] of sqrt(b s^2 + d), s1 >= 0.
fn from_zero(s1: f64, b: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.5 * b.sqrt() * s1 * s1;
    }
    let r = (b * s1 * s1 + d).sqrt();
    0.5 * (s1 * r + d / b.sqrt() * (b.sqrt() * s1 / d.sqrt()).asinh())
}

/// Integral over s in [lo, lo + 1] of sqrt(b s^2 + d), lo >= 0, without cancellation.
fn unit_span(lo: f64, b: f64, d: f64) -> f64 {
    let hi = lo + 1.0;
    let sum = hi + lo;
    if d == 0.0 {
        return 0.5 * b.sqrt() * sum;
    }
    let r_lo = (b * lo * lo + d).sqrt();
    let r_hi = (b * hi * hi + d).sqrt();
    let sr = sum * (b * (hi * hi + lo * lo) + d) / (hi * r_hi + lo * r_lo);
    let ash = (b.sqrt() * sum / (hi * r_lo + lo * r_hi)).asinh();
    0.5 * (sr + d / b.sqrt() * ash)
}

/// Integral of |a + b t| for t in [0, dt].
pub fn abs_linear_integral(a: &Vec3, b: &Vec3, dt: f64) -> f64 {
    if dt == 0.0 {
        return 0.0;
    }
    let c = b * dt;
    let scale = a.norm().max((a + c).norm());
    if scale == 0.0 {
        return 0.0;
    }
    let a1 = a / scale;
    let c1 = c / scale;
    let bb = c1.norm_squared();
    let unit = if bb < 1e-8 {
        GL5_X.iter().zip(&GL5_W).map(|(u, w)| w * (a1 + c1 * *u).norm()).sum()
    } else {
        let u_star = -a1.dot(&c1) / bb;
        let d = (a1.cross(&c1).norm_squared() / bb).max(0.0);
        let s0 = -u_star;
        let s1 = 1.0 - u_star;
        if s0 < 0.0 && s1 > 0.0 {
            from_zero(-s0, bb, d) + from_zero(s1, bb, d)
        } else if s0 >= 0.0 {
            unit_span(s0, bb, d)
        } else {
            unit_span(-s1, bb, d)
        }
    };
    unit * scale * dt
}

/// Integral of |a1 + b t| - |a2 + b t| for t in [0, dt], without cancelling the two large parts.
pub fn abs_linear_integral_diff(a1: &Vec3, a2: &Vec3, b: &Vec3, dt: f64) -> f64 {
    let d = a1 - a2;
    if dt == 0.0 || d == Vec3::zeros() {
        return 0.0;
    }
    // |q1| - |q2| = d . (q1 + q2) / (|q1| + |q2|)
    let h = |t: f64| {
        let q1 = a1 + b * t;
        let q2 = a2 + b * t;
        let den = q1.norm() + q2.norm();
        if den == 0.0 {
            0.0
        } else {
            d.dot(&(q1 + q2)) / den
        }
    };
    let sweep = b.norm() * dt;
    let size = a1.norm().max(a2.norm()) + sweep;
    if size <= 1e3 * d.norm() {
        // at most three digits cancel
        return abs_linear_integral(a1, b, dt) - abs_linear_integral(a2, b, dt);
    }
    let r = min_norm(a1, b, dt).min(min_norm(a2, b, dt));
    if r >= 8.0 * sweep {
        return dt * GL5_X.iter().zip(&GL5_W).map(|(u, w)| w * h(u * dt)).sum::<f64>();
    }
    let breaks: Vec<f64> = [a1, a2].iter().filter_map(|a| closest_approach(a, b, dt)).collect();
    let opts = QuadOptions { abs_tol: 1e-15 * d.norm() * dt, rel_tol: 1e-13, max_intervals: 2000 };
    integrate_adaptive(h, 0.0, dt, &breaks, &opts)
        .unwrap_or_else(|_| abs_linear_integral(a1, b, dt) - abs_linear_integral(a2, b, dt))
}

fn min_norm(a: &Vec3, b: &Vec3, dt: f64) -> f64 {
    match closest_approach(a, b, dt) {
        Some(t) => (a + b * t).norm(),
        None => a.norm().min((a + b * dt).norm()),
    }
}

/// Time at which |a + b t| is smallest, if it lies strictly inside (0, dt).
pub fn closest_approach(a: &Vec3, b: &Vec3, dt: f64) -> Option<f64> {
    let bb = b.norm_squared();
    if bb == 0.0 {
        return None;
    }
    let t = -a.dot(b) / bb;
    (t > 0.0 && t < dt).then_some(t)
}

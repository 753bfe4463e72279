//! The disk, the bidisk, the symmetrized bidisk and Carleson tents.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDiskPoint(C64);

impl UnitDiskPoint {
    pub fn new(w: C64) -> Option<Self> {
        (w.norm() < 1.0).then_some(Self(w))
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BidiskPoint {
    pub w1: C64,
    pub w2: C64,
}

impl BidiskPoint {
    pub fn new(w1: C64, w2: C64) -> Option<Self> {
        (w1.norm() < 1.0 && w2.norm() < 1.0).then_some(Self { w1, w2 })
    }

    pub fn swapped(self) -> Self {
        Self { w1: self.w2, w2: self.w1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GPoint {
    pub z1: C64,
    pub z2: C64,
}

impl GPoint {
    pub fn new(z1: C64, z2: C64) -> Option<Self> {
        in_g(z1, z2).then_some(Self { z1, z2 })
    }
}

pub fn phi(p: BidiskPoint) -> GPoint {
    GPoint {
        z1: p.w1 + p.w2,
        z2: p.w1 * p.w2,
    }
}

/// Roots of `t^2 - z1 t + z2`, with multiplicity.
pub fn phi_preimage(z1: C64, z2: C64) -> (C64, C64) {
    let disc = (z1 * z1 - 4.0 * z2).sqrt();
    // pick the sign avoiding cancellation, then use the product of roots
    let plus = z1 + disc;
    let minus = z1 - disc;
    let big = if plus.norm() >= minus.norm() { plus } else { minus } * 0.5;
    if big.norm() == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    (big, z2 / big)
}

pub fn in_g(z1: C64, z2: C64) -> bool {
    let (a, b) = phi_preimage(z1, z2);
    a.norm() < 1.0 && b.norm() < 1.0
}

pub fn jacobian(p: BidiskPoint) -> C64 {
    p.w1 - p.w2
}

/// `-log |z1^2 - 4 z2|`.
pub fn delta_weight(z: GPoint) -> Result<f64> {
    let d = (z.z1 * z.z1 - 4.0 * z.z2).norm();
    if d == 0.0 {
        return Err(Error::SingularLocus);
    }
    Ok(-d.ln())
}

/// `T_z = D ∩ D(z/|z|, 1 - |z|)`, and `T_0 = D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TentSpec {
    pub z: C64,
}

impl TentSpec {
    pub fn new(z: C64) -> Option<Self> {
        (z.norm() < 1.0).then_some(Self { z })
    }

    /// The tent with apex `e^{iθ}` and radius `r`, `0 < r ≤ 1`.
    pub fn from_apex(theta: f64, r: f64) -> Self {
        Self {
            z: C64::from_polar(1.0 - r, theta),
        }
    }

    pub fn is_whole_disk(&self) -> bool {
        self.z.norm() == 0.0
    }

    pub fn radius(&self) -> f64 {
        1.0 - self.z.norm()
    }

    /// Apex on the unit circle; `1` for the whole-disk tent.
    pub fn apex(&self) -> C64 {
        if self.is_whole_disk() {
            C64::new(1.0, 0.0)
        } else {
            self.z / self.z.norm()
        }
    }
}

pub fn tent_contains(t: &TentSpec, w: C64) -> bool {
    if t.is_whole_disk() {
        return true;
    }
    (1.0 - w.conj() * t.apex()).norm() < t.radius()
}

/// Area of `D ∩ D(a, r)` for `|a| = 1`.
pub fn lens_area(r: f64) -> f64 {
    2.0 * (0.5 * r).asin() + r * r * (0.5 * r).acos() - 0.5 * r * (4.0 - r * r).sqrt()
}

pub fn tent_area(t: &TentSpec) -> f64 {
    if t.is_whole_disk() {
        PI
    } else {
        lens_area(t.radius())
    }
}

/// Area of a tent by midpoint sampling of its indicator in polar
/// coordinates about the apex.
pub fn tent_area_by_indicator(t: &TentSpec, n_r: usize, n_theta: usize) -> f64 {
    let (centre, rho) = if t.is_whole_disk() { (C64::new(0.0, 0.0), 1.0) } else { (t.apex(), t.radius()) };
    let dr = rho / n_r as f64;
    let dt = 2.0 * PI / n_theta as f64;
    let mut area = 0.0;
    for i in 0..n_r {
        let r = dr * (i as f64 + 0.5);
        let inside = (0..n_theta)
            .filter(|k| (centre + C64::from_polar(r, dt * (*k as f64 + 0.5))).norm() < 1.0)
            .count();
        area += r * dr * dt * inside as f64;
    }
    area
}

/// Infimum of `lens_area(r) / r^2` over `0 < r ≤ 1`, attained at `r = 1`.
pub fn lens_ratio_floor() -> f64 {
    2.0 * PI / 3.0 - 0.75f64.sqrt()
}

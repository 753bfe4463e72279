//! Bergman kernels of the disk, the bidisk and the symmetrized bidisk,
//! partial kernels, and kernel derivatives.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::domain::{phi_preimage, GPoint};

/// `normalized = true` carries the `1/π` per disk factor so that the kernel
/// reproduces against plain area measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelConvention {
    pub normalized: bool,
}

impl KernelConvention {
    pub const NORMALIZED: Self = Self { normalized: true };
    pub const BARE: Self = Self { normalized: false };

    pub fn disk_factor(self) -> f64 {
        if self.normalized {
            1.0 / PI
        } else {
            1.0
        }
    }
}

/// Prefactor printed in the kernel representation on the symmetrized bidisk.
pub const G_PREFACTOR_AS_STATED: f64 = 1.0 / (2.0 * PI * PI);

/// Prefactor that makes the representation reproduce against Lebesgue
/// measure on the symmetrized bidisk.
pub const G_PREFACTOR_REPRODUCING: f64 = 1.0 / (PI * PI);

pub const DIAGONAL_THRESHOLD: f64 = 1e-6;

pub fn disk_kernel(w: C64, eta: C64, c: KernelConvention) -> C64 {
    let d = C64::new(1.0, 0.0) - w * eta.conj();
    c.disk_factor() / (d * d)
}

pub fn bidisk_kernel(w: (C64, C64), eta: (C64, C64), c: KernelConvention) -> C64 {
    disk_kernel(w.0, eta.0, c) * disk_kernel(w.1, eta.1, c)
}

/// Kernel of the symmetrized bidisk in covering coordinates, with the
/// prefactor left explicit.
pub fn g_kernel_covering(w: (C64, C64), eta: (C64, C64), prefactor: f64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let a = |x: C64, y: C64| one / (one - x * y.conj());
    let (a11, a12, a21, a22) = (a(w.0, eta.0), a(w.0, eta.1), a(w.1, eta.0), a(w.1, eta.1));
    let dw = w.0 - w.1;
    let de = (eta.0 - eta.1).conj();
    if dw.norm() < DIAGONAL_THRESHOLD || de.norm() < DIAGONAL_THRESHOLD {
        // bracket = (w1 - w2)(conj η1 - conj η2) a11 a12 a21 a22 (a11 a22 + a12 a21)
        return prefactor * a11 * a12 * a21 * a22 * (a11 * a22 + a12 * a21);
    }
    let bracket = a11 * a11 * a22 * a22 - a12 * a12 * a21 * a21;
    prefactor * bracket / (dw * de)
}

/// Kernel on the symmetrized bidisk with the stated `1/(2π²)` prefactor.
pub fn g_kernel(z: GPoint, zeta: GPoint) -> C64 {
    g_kernel_with(z, zeta, G_PREFACTOR_AS_STATED)
}

pub fn g_kernel_with(z: GPoint, zeta: GPoint, prefactor: f64) -> C64 {
    let w = phi_preimage(z.z1, z.z2);
    let eta = phi_preimage(zeta.z1, zeta.z2);
    g_kernel_covering(w, eta, prefactor)
}

fn powi(z: C64, k: u32) -> C64 {
    z.powu(k)
}

/// Disk kernel minus the first `beta` terms of its series in `w conj(η)`.
pub fn partial_kernel(beta: u32, w: C64, eta: C64) -> C64 {
    let x = w * eta.conj();
    let one = C64::new(1.0, 0.0);
    let b = beta as f64;
    let num = (b + 1.0) * powi(x, beta) - b * powi(x, beta + 1);
    num / ((one - x) * (one - x))
}

/// The defining series subtraction, evaluated literally.
pub fn partial_kernel_series(beta: u32, w: C64, eta: C64) -> C64 {
    let x = w * eta.conj();
    let one = C64::new(1.0, 0.0);
    let mut head = C64::new(0.0, 0.0);
    for j in 0..beta {
        head += (j as f64 + 1.0) * powi(x, j);
    }
    one / ((one - x) * (one - x)) - head
}

fn rising_factorial_from_two(beta: u32) -> f64 {
    // (β + 1)! = 2 · 3 ⋯ (β + 1)
    (2..=beta + 1).map(|k| k as f64).product()
}

/// `∂_w^β (1 - w conj(η))^{-2}`.
pub fn kernel_w_derivative(beta: u32, w: C64, eta: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let d = one - w * eta.conj();
    rising_factorial_from_two(beta) * powi(eta.conj(), beta) / d.powu(beta + 2)
}

/// `∂_{conj η}^β (1 - w conj(η))^{-2}`.
pub fn kernel_eta_bar_derivative(beta: u32, w: C64, eta: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let d = one - w * eta.conj();
    rising_factorial_from_two(beta) * powi(w, beta) / d.powu(beta + 2)
}

/// `|K_β(w, η)| / |w^β (1 - w conj(η))^{-2}|`.
pub fn kernel_bound_check(beta: u32, w: C64, eta: C64) -> f64 {
    if beta == 0 {
        return 1.0;
    }
    if w.norm() == 0.0 {
        return (beta as f64 + 1.0) * eta.norm().powi(beta as i32);
    }
    let one = C64::new(1.0, 0.0);
    let d = one - w * eta.conj();
    let reference = powi(w, beta) / (d * d);
    partial_kernel(beta, w, eta).norm() / reference.norm()
}

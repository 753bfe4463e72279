//! Integrals of `|w - c|^s` over intersections of disks, in polar
//! coordinates about `c`.
//!
//! Along each ray the radial integral is done in closed form; the angular
//! integral is split at every direction where the ray's entry or exit point
//! changes character (tangencies, circle crossings) and each piece is
//! integrated by adaptive Gauss-Legendre after a cosine change of variable.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;

use crate::gauss::gauss_legendre;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: C64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub disks: Vec<Disk>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularOptions {
    pub order: usize,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for AngularOptions {
    fn default() -> Self {
        Self {
            order: 10,
            rel_tol: 1e-11,
            max_depth: 40,
        }
    }
}

impl Region {
    pub fn contains_closed(&self, w: C64) -> bool {
        self.disks.iter().all(|d| (w - d.center).norm() <= d.radius)
    }

    /// `{t ≥ 0 : c + t u ∈ region}` as `[t0, t1]`.
    pub fn ray_interval(&self, c: C64, u: C64) -> Option<(f64, f64)> {
        let mut lo: f64 = 0.0;
        let mut hi = f64::INFINITY;
        for d in &self.disks {
            let off = c - d.center;
            let b = (u.conj() * off).re;
            let cc = off.norm_sqr() - d.radius * d.radius;
            let disc = b * b - cc;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            // stable pair of roots of t^2 + 2 b t + cc
            let (t_minus, t_plus) = if b > 0.0 {
                let q = -b - sq;
                (q, if q != 0.0 { cc / q } else { 0.0 })
            } else {
                let q = -b + sq;
                (if q != 0.0 { cc / q } else { 0.0 }, q)
            };
            lo = lo.max(t_minus);
            hi = hi.min(t_plus);
        }
        (hi > lo).then_some((lo, hi))
    }

    /// Directions from `c` at which the radial interval is non-smooth.
    pub fn breakpoints(&self, c: C64) -> Vec<f64> {
        let mut out = Vec::new();
        for d in &self.disks {
            let v = d.center - c;
            let dist = v.norm();
            if dist == 0.0 {
                continue;
            }
            let base = v.arg();
            out.extend([base, base + PI, base + 0.5 * PI, base - 0.5 * PI]);
            if dist > d.radius {
                let half = (d.radius / dist).asin();
                out.extend([base + half, base - half]);
            }
        }
        for (i, a) in self.disks.iter().enumerate() {
            for b in &self.disks[i + 1..] {
                for p in circle_crossings(a, b) {
                    if (p - c).norm() > 0.0 {
                        out.push((p - c).arg());
                    }
                }
            }
        }
        let mut out: Vec<f64> = out.into_iter().map(|x| x.rem_euclid(TAU)).collect();
        out.push(0.0);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        out
    }

    /// `∫_region |w - c|^s dA(w)`; `+∞` when `s ≤ -2` and `c` lies in the
    /// closed region.
    pub fn power_integral(&self, c: C64, s: f64, opts: AngularOptions) -> f64 {
        if s <= -2.0 && self.contains_closed(c) {
            return f64::INFINITY;
        }
        if let Some(q) = self.interior_point() {
            if self.gap(c) >= self.diameter() {
                return self.far_power_integral(q, c, s, opts);
            }
        }
        let radial = |phi: f64| -> (f64, f64) {
            let u = C64::from_polar(1.0, phi);
            match self.ray_interval(c, u) {
                None => (0.0, 0.0),
                Some((t0, t1)) => {
                    if s == -2.0 {
                        ((t1 / t0).ln(), (t1 / t0).ln().abs().max(1.0))
                    } else {
                        let e = s + 2.0;
                        let hi = t1.powf(e);
                        let lo = if t0 > 0.0 { t0.powf(e) } else { 0.0 };
                        ((hi - lo) / e, (hi + lo) / e.abs())
                    }
                }
            }
        };
        integrate_periodic(&radial, &self.breakpoints(c), opts)
    }
}

impl Region {
    fn diameter(&self) -> f64 {
        2.0 * self.disks.iter().map(|d| d.radius).fold(f64::INFINITY, f64::min)
    }

    fn gap(&self, c: C64) -> f64 {
        self.disks.iter().map(|d| (c - d.center).norm() - d.radius).fold(f64::NEG_INFINITY, f64::max)
    }

    /// A point strictly inside the region, for one or two disks.
    fn interior_point(&self) -> Option<C64> {
        match self.disks.as_slice() {
            [d] => Some(d.center),
            [a, b] => {
                let v = b.center - a.center;
                let dist = v.norm();
                if dist == 0.0 {
                    return Some(a.center);
                }
                let lo = (dist - b.radius).max(-a.radius);
                let hi = a.radius.min(dist + b.radius);
                (hi > lo).then(|| a.center + v / dist * (0.5 * (lo + hi)))
            }
            _ => None,
        }
    }

    /// Polar coordinates about an interior point `q`, for `c` well outside.
    fn far_power_integral(&self, q: C64, c: C64, s: f64, opts: AngularOptions) -> f64 {
        let gl = gauss_legendre(20);
        let radial = |phi: f64| -> (f64, f64) {
            let u = C64::from_polar(1.0, phi);
            let Some((_, t1)) = self.ray_interval(q, u) else {
                return (0.0, 0.0);
            };
            let half = 0.5 * t1;
            let acc: f64 = gl
                .0
                .iter()
                .zip(&gl.1)
                .map(|(x, w)| {
                    let r = half * (1.0 + x);
                    w * r * (q + u * r - c).norm().powf(s)
                })
                .sum::<f64>()
                * half;
            (acc, acc)
        };
        integrate_periodic(&radial, &self.breakpoints(q), opts)
    }
}

fn circle_crossings(a: &Disk, b: &Disk) -> Vec<C64> {
    let v = b.center - a.center;
    let d = v.norm();
    if d == 0.0 || d > a.radius + b.radius || d < (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let x = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let h = (a.radius * a.radius - x * x).max(0.0).sqrt();
    let e = v / d;
    let foot = a.center + e * x;
    let n = C64::new(-e.im, e.re);
    vec![foot + n * h, foot - n * h]
}

/// Integrates a `2π`-periodic function piecewise between sorted breakpoints
/// in `[0, 2π)`. `f` returns its value together with the magnitude of the
/// terms it was computed from, which sets the rounding floor of each panel.
pub fn integrate_periodic(f: &dyn Fn(f64) -> (f64, f64), breaks: &[f64], opts: AngularOptions) -> f64 {
    let mut edges: Vec<f64> = breaks.to_vec();
    if edges.is_empty() {
        edges.push(0.0);
    }
    let first = edges[0];
    edges.push(first + TAU);
    let segments: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    let gl = gauss_legendre(opts.order);
    let mapped = |a: f64, b: f64, lo: f64, hi: f64| -> Panel {
        // φ = a + (b - a)(1 - cos πτ)/2 on τ ∈ [lo, hi]
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        let mut mag = 0.0;
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let tau = mid + half * x;
            let phi = a + (b - a) * 0.5 * (1.0 - (PI * tau).cos());
            let jac = (b - a) * 0.5 * PI * (PI * tau).sin();
            let (v, m) = f(phi);
            acc += w * v * jac;
            mag += w * m * jac.abs();
        }
        Panel { value: acc * half, noise: 64.0 * f64::EPSILON * mag * half }
    };
    let coarse: f64 = segments
        .iter()
        .map(|(a, b)| mapped(*a, *b, 0.0, 0.5).value + mapped(*a, *b, 0.5, 1.0).value)
        .sum();
    let tol = opts.rel_tol * coarse.abs();
    let mut total = 0.0;
    for (a, b) in segments {
        let frac = (b - a) / TAU;
        let whole = mapped(a, b, 0.0, 1.0);
        total += adapt(&mapped, (a, b), (0.0, 1.0), whole, tol * frac, opts.max_depth);
    }
    total
}

#[derive(Clone, Copy)]
struct Panel {
    value: f64,
    noise: f64,
}

fn adapt(
    mapped: &dyn Fn(f64, f64, f64, f64) -> Panel,
    seg: (f64, f64),
    span: (f64, f64),
    whole: Panel,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lo, hi) = span;
    let mid = 0.5 * (lo + hi);
    let left = mapped(seg.0, seg.1, lo, mid);
    let right = mapped(seg.0, seg.1, mid, hi);
    let halves = left.value + right.value;
    if (halves - whole.value).abs() <= tol.max(whole.noise) || depth == 0 {
        return halves;
    }
    adapt(mapped, seg, (lo, mid), left, 0.5 * tol, depth - 1) + adapt(mapped, seg, (mid, hi), right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::lens_area;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn unit() -> Disk {
        Disk { center: c(0.0, 0.0), radius: 1.0 }
    }

    fn lens(apex: C64, r: f64) -> Region {
        Region { disks: vec![unit(), Disk { center: apex, radius: r }] }
    }

    #[test]
    fn area_from_any_centre() {
        let opts = AngularOptions::default();
        for r in [1.0, 0.5, 0.1, 1e-3] {
            let reg = lens(c(1.0, 0.0), r);
            for centre in [c(0.0, 0.0), c(1.0 - 0.5 * r, 0.0), c(0.3, 0.9), c(1.0, 0.2 * r)] {
                let got = reg.power_integral(centre, 0.0, opts);
                assert!((got / lens_area(r) - 1.0).abs() < 1e-9, "r={r} centre={centre} got={got}");
            }
        }
    }

    #[test]
    fn centred_disk_powers() {
        let reg = Region { disks: vec![unit()] };
        let opts = AngularOptions::default();
        assert!((reg.power_integral(c(0.0, 0.0), -1.0, opts) - 2.0 * PI).abs() < 1e-12);
        assert!((reg.power_integral(c(0.0, 0.0), 2.0, opts) - PI / 2.0).abs() < 1e-12);
        // ∫_D |w - a|^2 = π/2 + π |a|^2 also for a outside the disk
        for a in [c(0.5, 0.5), c(1.5, 0.0), c(0.0, -3.0)] {
            let got = reg.power_integral(a, 2.0, opts);
            assert!((got - (PI / 2.0 + PI * a.norm_sqr())).abs() < 1e-10, "a={a}");
        }
        assert_eq!(reg.power_integral(c(0.2, 0.0), -2.0, opts), f64::INFINITY);
        assert!(reg.power_integral(c(2.0, 0.0), -3.0, opts).is_finite());
    }
}

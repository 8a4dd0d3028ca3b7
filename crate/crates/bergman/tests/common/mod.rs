//! Shared oracles for the integration tests.
//!
//! Everything here recomputes quantities from first principles with textbook
//! methods — composite Simpson in the radius, a periodic trapezoid rule in
//! the angle, central finite differences — so agreement with the library is
//! evidence, not circularity.

use bergman::series::MonomialSeries;
use bergman::weights::RadialWeight;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// lambda(r) on [0, 1], taking the rim value by its limit. Callers keep
/// weights that blow up at the rim (power with t < 0) away from r = 1.
pub fn weight_at(w: &RadialWeight, r: f64) -> f64 {
    if r < 1.0 {
        return w.eval(r).expect("radius must be admissible");
    }
    match w {
        RadialWeight::Power { t } if *t > 0.0 => 0.0,
        RadialWeight::Power { t } if *t == 0.0 => 1.0,
        RadialWeight::Power { .. } => panic!("weight is singular at the rim"),
        // exp(A - B (1-r^2)^{-alpha}) and the cutoff factor both vanish.
        RadialWeight::Exponential { .. } => 0.0,
        RadialWeight::Cutoff { .. } => 0.0,
    }
}

/// Composite Simpson on [a, b] with an even number of intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    assert!(
        intervals >= 2 && intervals % 2 == 0,
        "need an even interval count"
    );
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let coeff = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += coeff * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn simpson_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, intervals: usize) -> Complex64 {
    let re = simpson(|x| f(x).re, a, b, intervals);
    let im = simpson(|x| f(x).im, a, b, intervals);
    Complex64::new(re, im)
}

/// mu at index n, i.e. 2 pi int_0^1 r^{2n+1} lambda(r) dr, by Simpson alone.
pub fn simpson_moment(w: &RadialWeight, n: usize, intervals: usize) -> f64 {
    TAU * simpson(
        |r| r.powi(2 * n as i32 + 1) * weight_at(w, r),
        0.0,
        1.0,
        intervals,
    )
}

/// <f, g> over the weighted disc by a polar product grid: periodic trapezoid
/// in the angle (spectrally exact for trigonometric polynomials shorter than
/// the grid) times composite Simpson in the radius.
pub fn polar_inner_product(
    f: &MonomialSeries,
    g: &MonomialSeries,
    w: &RadialWeight,
    radial_intervals: usize,
    angular_points: usize,
) -> Complex64 {
    let max_angular_degree = f.degree().unwrap_or(0) + g.degree().unwrap_or(0);
    assert!(
        (max_angular_degree as usize) < angular_points,
        "angular grid too coarse for the integrand"
    );
    let angular_average = |r: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..angular_points {
            let theta = TAU * m as f64 / angular_points as f64;
            let z = Complex64::from_polar(r, theta);
            acc += f.eval(z) * g.eval(z).conj();
        }
        acc * (TAU / angular_points as f64)
    };
    simpson_complex(
        |r| angular_average(r) * (r * weight_at(w, r)),
        0.0,
        1.0,
        radial_intervals,
    )
}

/// The unweighted Bergman kernel 1 / (pi (1 - z conj(w))^2).
pub fn unweighted_kernel(z: Complex64, w: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - z * w.conj();
    Complex64::new(1.0 / PI, 0.0) / (d * d)
}

/// d/dz of z -> lambda(|z|) by central differences: (d_x - i d_y) / 2.
pub fn fd_wirtinger_z(w: &RadialWeight, z: Complex64, h: f64) -> Complex64 {
    let g = |x: f64, y: f64| weight_at(w, (x * x + y * y).sqrt());
    let gx = (g(z.re + h, z.im) - g(z.re - h, z.im)) / (2.0 * h);
    let gy = (g(z.re, z.im + h) - g(z.re, z.im - h)) / (2.0 * h);
    Complex64::new(gx, -gy) * 0.5
}

/// d^2/dz^2 likewise: ((d_x - i d_y)/2)^2 = (g_xx - g_yy - 2 i g_xy) / 4.
pub fn fd_wirtinger_zz(w: &RadialWeight, z: Complex64, h: f64) -> Complex64 {
    let g = |x: f64, y: f64| weight_at(w, (x * x + y * y).sqrt());
    let (x, y) = (z.re, z.im);
    let gxx = (g(x + h, y) - 2.0 * g(x, y) + g(x - h, y)) / (h * h);
    let gyy = (g(x, y + h) - 2.0 * g(x, y) + g(x, y - h)) / (h * h);
    let gxy =
        (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h)) / (4.0 * h * h);
    Complex64::new((gxx - gyy) / 4.0, -gxy / 2.0)
}

/// |a - b| relative to |b|, guarded against a zero reference.
pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Complex counterpart of rel_gap.
pub fn rel_gap_c(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

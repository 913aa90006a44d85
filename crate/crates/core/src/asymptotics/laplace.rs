//! Leading-order Laplace expansion of `int g(r) e^{-A h(r) + i A zeta r} dr`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const GOLDEN: f64 = 1.618_033_988_749_895;
const MAX_BRACKET_STEPS: usize = 200;
const GOLDEN_ITERATIONS: usize = 200;

/// Integration interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && !lo.is_nan() && !hi.is_nan() {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::OutOfDomain(format!("empty interval ({lo}, {hi})")))
        }
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// Smooth increasing bijection from the real line onto the open interval.
    fn map(&self, t: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + (self.hi - self.lo) / (1.0 + (-t).exp()),
            (true, false) => self.lo + t.exp(),
            (false, true) => self.hi - (-t).exp(),
            (false, false) => t,
        }
    }

    fn unmap(&self, r: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let p = (r - self.lo) / (self.hi - self.lo);
                (p / (1.0 - p)).ln()
            }
            (true, false) => (r - self.lo).ln(),
            (false, true) => -(self.hi - r).ln(),
            (false, false) => r,
        }
    }

    fn contains(&self, r: f64) -> bool {
        r > self.lo && r < self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceExpansion {
    pub value: Complex64,
    /// `log |value|`, finite when `value` itself underflows.
    pub ln_modulus: f64,
    pub phase: f64,
    pub minimizer: f64,
    pub curvature: f64,
}

/// Finite-difference step used for `h''` at `r`.
pub fn curvature_step(r: f64) -> f64 {
    (1e-5f64).max(1e-5 * r.abs())
}

/// Locates the interior minimum of `h` by bracket expansion and golden
/// section in the mapped coordinate, then polishes with Newton steps on
/// central differences.
pub fn locate_minimum(h: impl Fn(f64) -> f64, interval: Interval) -> Result<f64> {
    let no_min = || Error::NoInteriorMinimum {
        lo: interval.lo,
        hi: interval.hi,
    };
    let f = |t: f64| {
        let v = h(interval.map(t));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let start = if interval.lo.is_finite() && interval.hi.is_finite() {
        0.0
    } else if interval.lo.is_finite() {
        interval.unmap(interval.lo + 1.0)
    } else if interval.hi.is_finite() {
        interval.unmap(interval.hi - 1.0)
    } else {
        0.0
    };

    // downhill bracket expansion
    let (mut a, mut b) = (start, start + 1.0);
    let (mut fa, mut fb) = (f(a), f(b));
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut steps = 0;
    while fc <= fb {
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !c.is_finite() {
            return Err(no_min());
        }
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + GOLDEN * (b - a);
        fc = f(c);
    }
    if !(fb < fa) && !(fb < fc) {
        return Err(no_min());
    }

    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };
    let inv = 1.0 / GOLDEN;
    let mut x1 = hi - inv * (hi - lo);
    let mut x2 = lo + inv * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERATIONS {
        if (hi - lo).abs() <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut r = interval.map(0.5 * (lo + hi));
    if !interval.contains(r) {
        return Err(no_min());
    }

    for _ in 0..3 {
        let d = curvature_step(r);
        if !interval.contains(r - d) || !interval.contains(r + d) {
            break;
        }
        let (hm, h0, hp) = (h(r - d), h(r), h(r + d));
        let second = (hp - 2.0 * h0 + hm) / (d * d);
        if !(second > 0.0) {
            break;
        }
        let candidate = r - (hp - hm) / (2.0 * d) / second;
        if !interval.contains(candidate) || !(h(candidate) <= h0) {
            break;
        }
        r = candidate;
    }
    Ok(r)
}

/// `e^{-A h(r*) + i A zeta r*} exp(-A zeta^2 / (2 h''(r*))) sqrt(2 pi / (A h''(r*))) g(r*)`.
pub fn laplace_expand(
    h: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    interval: Interval,
    a: f64,
    zeta: f64,
) -> Result<LaplaceExpansion> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "A",
            value: a,
            reason: "must be finite and > 0",
        });
    }
    let r = locate_minimum(&h, interval)?;
    let d = curvature_step(r);
    if !interval.contains(r - d) || !interval.contains(r + d) {
        return Err(Error::NoInteriorMinimum {
            lo: interval.lo,
            hi: interval.hi,
        });
    }
    let h0 = h(r);
    let curvature = (h(r + d) - 2.0 * h0 + h(r - d)) / (d * d);
    if !(curvature > 0.0) {
        return Err(Error::NonPositiveCurvature(curvature));
    }
    let gr = g(r);
    let ln_modulus = -a * h0 - a * zeta * zeta / (2.0 * curvature)
        + 0.5 * (2.0 * PI / (a * curvature)).ln()
        + gr.abs().ln();
    let phase = a * zeta * r + if gr < 0.0 { PI } else { 0.0 };
    Ok(LaplaceExpansion {
        value: Complex64::from_polar(ln_modulus.exp(), phase),
        ln_modulus,
        phase,
        minimizer: r,
        curvature,
    })
}

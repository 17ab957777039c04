//! Spherical Bessel and Hankel functions of complex argument.
//!
//! `j_n` is evaluated by upward recurrence while `n <= |z|` and by Miller's
//! downward recurrence (normalized against the closed forms of `j_0`/`j_1`)
//! otherwise; upward recurrence for `j_n` is unstable once `n >> |z|`, which
//! is exactly where small-sphere surface modes live. `y_n` always uses upward
//! recurrence. `h_n^(1)` is assembled as `j_n + i y_n` so that on the real axis
//! its real part is exactly the accurate `j_n`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Agreement required between two successive Miller start orders.
const MILLER_TOL: f64 = 1e-12;
const RESCALE_AT: f64 = 1e100;

/// Function whose Riccati derivative `d/dz [z f_n(z)]` is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiccatiKind {
    J,
    H1,
}

pub fn sph_bessel_j(n: u32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_j_seq(n, z)?[n as usize])
}

pub fn sph_bessel_y(n: u32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_y_seq(n, z)?[n as usize])
}

pub fn sph_hankel1(n: u32, z: Complex64) -> Result<Complex64> {
    let j = sph_bessel_j(n, z)?;
    let y = sph_bessel_y(n, z)?;
    Ok(j + I * y)
}

/// `d/dz [z f_n(z)] = z f_{n-1}(z) - n f_n(z)`.
pub fn riccati_deriv(kind: RiccatiKind, n: u32, z: Complex64) -> Result<Complex64> {
    let seq = match kind {
        RiccatiKind::J => SphericalBesselSeq::bessel_j(n, z)?,
        RiccatiKind::H1 => SphericalBesselSeq::with_hankel(n, z)?,
    };
    Ok(match kind {
        RiccatiKind::J => seq.riccati_j(n),
        RiccatiKind::H1 => seq.riccati_h(n),
    })
}

/// `ln(m!!)` for odd `m >= 1`.
pub fn log_double_factorial(m: u32) -> Result<f64> {
    if m == 0 || m.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "double factorial needs an odd positive argument, got {m}"
        )));
    }
    Ok((1..=m).step_by(2).map(|k| (k as f64).ln()).sum())
}

/// `j_0 .. j_nmax` at a common argument.
pub fn bessel_j_seq(nmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    let len = nmax as usize + 1;
    if z == ZERO {
        let mut out = vec![ZERO; len];
        out[0] = ONE;
        return Ok(out);
    }
    let (s, c) = (z.sin(), z.cos());
    if !(s.is_finite() && c.is_finite()) {
        return Err(Error::Overflow { order: 0, z });
    }
    let j0 = s / z;
    if nmax == 0 {
        return Ok(vec![j0]);
    }

    let out = if (nmax as f64) <= z.norm() {
        upward(j0, s / (z * z) - c / z, nmax, z)
    } else {
        miller(nmax, z, j0, s, c)?
    };

    for (order, v) in out.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Overflow { order: order as u32, z });
        }
        if v.norm() < f64::MIN_POSITIVE {
            return Err(Error::Underflow { order: order as u32, z });
        }
    }
    Ok(out)
}

/// `y_0 .. y_nmax` at a common argument, by upward recurrence.
pub fn bessel_y_seq(nmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    if z == ZERO {
        return Err(Error::Domain("y_n has a pole at z = 0".into()));
    }
    let (s, c) = (z.sin(), z.cos());
    if !(s.is_finite() && c.is_finite()) {
        return Err(Error::Overflow { order: 0, z });
    }
    let y0 = -c / z;
    let y1 = -c / (z * z) - s / z;
    let out = if nmax == 0 { vec![y0] } else { upward(y0, y1, nmax, z) };
    if let Some(order) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::Overflow { order: order as u32, z });
    }
    Ok(out)
}

fn upward(f0: Complex64, f1: Complex64, nmax: u32, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(nmax as usize + 1);
    out.push(f0);
    out.push(f1);
    for k in 1..nmax as usize {
        let next = (2 * k + 1) as f64 / z * out[k] - out[k - 1];
        out.push(next);
    }
    out
}

fn miller(nmax: u32, z: Complex64, j0: Complex64, s: Complex64, c: Complex64) -> Result<Vec<Complex64>> {
    let margin = 15usize.max(z.norm().ceil() as usize);
    let mut extra = margin;
    let mut previous = miller_pass(nmax as usize, nmax as usize + extra, z, j0, s, c);
    loop {
        extra *= 2;
        let current = miller_pass(nmax as usize, nmax as usize + extra, z, j0, s, c);
        // Below |z| the sequence oscillates; an entry sitting on a zero is
        // judged against its neighbours instead of its own tiny magnitude.
        let oscillatory = z.norm() as usize;
        let worst = (0..current.len())
            .filter(|&k| current[k].norm() > 0.0)
            .map(|k| {
                let mut scale = current[k].norm();
                if k <= oscillatory {
                    let lo = k.saturating_sub(1);
                    let hi = (k + 1).min(current.len() - 1);
                    scale = current[lo..=hi].iter().map(|v| v.norm()).fold(scale, f64::max);
                }
                (previous[k] - current[k]).norm() / scale
            })
            .fold(0.0, f64::max);
        if worst <= MILLER_TOL && current.iter().all(|v| v.is_finite()) {
            return Ok(current);
        }
        if extra > 64 * margin + 4096 {
            return Err(Error::Underflow { order: nmax, z });
        }
        previous = current;
    }
}

fn miller_pass(nmax: usize, start: usize, z: Complex64, j0: Complex64, s: Complex64, c: Complex64) -> Vec<Complex64> {
    let mut out = vec![ZERO; nmax + 1];
    let mut upper = ZERO;
    let mut current = ONE;
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = current;
        }
        let lower = (2 * k + 1) as f64 / z * current - upper;
        upper = current;
        current = lower;
        if current.norm() > RESCALE_AT {
            let scale = 1.0 / RESCALE_AT;
            current *= scale;
            upper *= scale;
            for v in out.iter_mut().skip(k) {
                *v *= scale;
            }
        }
    }
    out[0] = current;
    // Normalize against whichever closed form is better conditioned.
    let norm = if z.norm() < 1.0 {
        cdiv(j0, out[0])
    } else {
        let j1 = s / (z * z) - c / z;
        if j0.norm() >= j1.norm() {
            cdiv(j0, out[0])
        } else {
            cdiv(j1, out[1])
        }
    };
    for v in &mut out {
        *v *= norm;
    }
    out
}

/// Complex division without the overflow of the textbook `|b|²` formula
/// (Smith's algorithm); `num_complex`'s `Div` squares the divisor.
pub fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}

/// Bessel (and optionally Hankel) values for orders `0..=nmax` at one argument,
/// with Riccati derivatives derived from adjacent orders.
#[derive(Debug, Clone)]
pub struct SphericalBesselSeq {
    z: Complex64,
    j: Vec<Complex64>,
    h: Option<Vec<Complex64>>,
}

impl SphericalBesselSeq {
    pub fn bessel_j(nmax: u32, z: Complex64) -> Result<Self> {
        Ok(Self {
            z,
            j: bessel_j_seq(nmax, z)?,
            h: None,
        })
    }

    pub fn with_hankel(nmax: u32, z: Complex64) -> Result<Self> {
        let j = bessel_j_seq(nmax, z)?;
        let y = bessel_y_seq(nmax, z)?;
        let h = j.iter().zip(&y).map(|(j, y)| j + I * y).collect();
        Ok(Self { z, j, h: Some(h) })
    }

    pub fn argument(&self) -> Complex64 {
        self.z
    }

    pub fn max_order(&self) -> u32 {
        (self.j.len() - 1) as u32
    }

    pub fn j(&self, n: u32) -> Complex64 {
        self.j[n as usize]
    }

    /// Panics if the sequence was built without Hankel functions.
    pub fn h(&self, n: u32) -> Complex64 {
        self.hankel()[n as usize]
    }

    pub fn riccati_j(&self, n: u32) -> Complex64 {
        if n == 0 {
            self.z.cos()
        } else {
            self.z * self.j[n as usize - 1] - n as f64 * self.j[n as usize]
        }
    }

    pub fn riccati_h(&self, n: u32) -> Complex64 {
        if n == 0 {
            (I * self.z).exp()
        } else {
            let h = self.hankel();
            self.z * h[n as usize - 1] - n as f64 * h[n as usize]
        }
    }

    fn hankel(&self) -> &[Complex64] {
        self.h.as_deref().expect("sequence built without Hankel functions")
    }
}

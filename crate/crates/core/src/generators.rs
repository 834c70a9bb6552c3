//! Closed-form example data: Jacobi weights, polynomial weights with zeros on
//! the circle, single-coefficient (Bernstein–Szegő) and geometric sequences.

use num_complex::Complex64;

use crate::circle::{check_grid_size, GridFunction};
use crate::error::{Error, Result};
use crate::schur::VerblunskyData;

fn minus_one() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

/// `a_n = -(γ₁ - (-1)ⁿγ₂)/(n + 1 + γ₁ + γ₂)` for `n < count`.
pub fn jacobi_parameters(gamma1: f64, gamma2: f64, count: usize) -> Result<Vec<f64>> {
    for g in [gamma1, gamma2] {
        if !(g > -0.5) {
            return Err(Error::InvalidArgument(format!(
                "Jacobi exponent {g} must exceed -1/2"
            )));
        }
    }
    Ok((0..count)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            -(gamma1 - sign * gamma2) / (n as f64 + 1.0 + gamma1 + gamma2)
        })
        .collect())
}

/// Jacobi data with `α₋₁ = -1`, so `α_n = a_n`.
pub fn jacobi(gamma1: f64, gamma2: f64, count: usize) -> Result<VerblunskyData> {
    let params: Vec<Complex64> = jacobi_parameters(gamma1, gamma2, count)?
        .into_iter()
        .map(|a| Complex64::new(a, 0.0))
        .collect();
    VerblunskyData::from_schur_parameters(minus_one(), &params)
}

/// `|1 - t|^{2γ₁}|1 + t|^{2γ₂}` at the half-offset angles `2π(j + 1/2)/m`,
/// scaled to grid mean 1; the offset keeps the zeros at `t = ±1` off the grid.
pub fn jacobi_weight_offset(gamma1: f64, gamma2: f64, m: usize) -> Result<GridFunction> {
    jacobi_parameters(gamma1, gamma2, 0)?;
    check_grid_size(m)?;
    let raw: Vec<f64> = (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
            let t = Complex64::from_polar(1.0, theta);
            (1.0 - t).norm().powf(2.0 * gamma1) * (1.0 + t).norm().powf(2.0 * gamma2)
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / m as f64;
    GridFunction::new(raw.iter().map(|x| Complex64::new(x / mean, 0.0)).collect())
}

/// Weight `c|P|²` for a monic `P` with all zeros on the circle.
#[derive(Clone, Debug)]
pub struct PolyWeight {
    /// Ascending coefficients of the monic `P`.
    pub poly: Vec<Complex64>,
    /// `c` chosen so that `∫ c|P|² dm = 1`.
    pub scale: f64,
    pub alpha_minus_one: Complex64,
    /// Taylor coefficients of `D = √c·P/P(0)`.
    pub d_taylor: Vec<Complex64>,
    pub w: GridFunction,
    /// `s = -ᾱ₋₁·conj(P(0))·tᴺ`.
    pub s: GridFunction,
    pub index: i64,
}

pub fn polyweight(roots: &[Complex64], alpha_minus_one: Complex64, m: usize) -> Result<PolyWeight> {
    check_grid_size(m)?;
    if roots.is_empty() {
        return Err(Error::InvalidArgument(
            "polynomial weight needs at least one root".into(),
        ));
    }
    for r in roots {
        if (r.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "root {r} is not on the unit circle"
            )));
        }
    }
    let am = alpha_minus_one.norm();
    if (am - 1.0).abs() >= 1e-12 {
        return Err(Error::AnchorNotUnimodular(am));
    }
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::default(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= r * c;
        }
        poly = next;
    }
    let scale = 1.0 / poly.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let p0 = poly[0];
    let d_taylor: Vec<Complex64> = poly.iter().map(|c| scale.sqrt() * c / p0).collect();
    let eval = |z: Complex64| {
        poly.iter()
            .rev()
            .fold(Complex64::default(), |acc, c| acc * z + c)
    };
    let w = GridFunction::from_fn(m, |t| Complex64::new(scale * eval(t).norm_sqr(), 0.0))?;
    let n = roots.len() as i32;
    let lead = -alpha_minus_one.conj() * p0.conj();
    let s = GridFunction::from_fn(m, |t| lead * t.powi(n))?;
    Ok(PolyWeight {
        poly: poly.clone(),
        scale,
        alpha_minus_one,
        d_taylor,
        w,
        s,
        index: roots.len() as i64,
    })
}

/// `α = (a)`, `α₋₁ = -1`.
pub fn bernstein(a: Complex64) -> Result<VerblunskyData> {
    VerblunskyData::new(minus_one(), vec![a])
}

/// `α_n = ratio^{n+1}` for `n < count`, `α₋₁ = -1`.
pub fn geometric(ratio: f64, count: usize) -> Result<VerblunskyData> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "ratio {ratio} must lie in (0, 1)"
        )));
    }
    VerblunskyData::new(
        minus_one(),
        (0..count)
            .map(|n| Complex64::new(ratio.powi(n as i32 + 1), 0.0))
            .collect(),
    )
}

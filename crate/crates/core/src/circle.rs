//! Function algebra on a uniform grid of the unit circle.
//!
//! A [`GridFunction`] holds samples at `t_j = exp(2πi j/M)`; a
//! [`FourierSeries`] holds the coefficients `c_n`, `n ∈ [-M/2, M/2)`, of
//! the exact discrete Fourier pair. Integration against the normalized
//! Lebesgue measure is the grid mean.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Smallest admissible grid.
pub const MIN_GRID: usize = 16;
/// Grid used when the caller does not choose one.
pub const DEFAULT_GRID: usize = 4096;

const REAL_TOL: f64 = 1e-10;
const UNIMODULAR_TOL: f64 = 1e-8;
const WEIGHT_FLOOR: f64 = 1e-12;
/// Largest phase increment accepted between neighbouring samples.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(m: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(m))
}

fn inverse_plan(m: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m))
}

pub fn check_grid_size(m: usize) -> Result<()> {
    if m < MIN_GRID || !m.is_power_of_two() {
        return Err(Error::BadGridSize(m));
    }
    Ok(())
}

/// Grid node `t_j`.
pub fn grid_point(m: usize, j: usize) -> Complex64 {
    Complex64::from_polar(1.0, grid_angle(m, j))
}

pub fn grid_angle(m: usize, j: usize) -> f64 {
    2.0 * PI * (j as f64) / (m as f64)
}

/// Samples of a function on the uniform circle grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_grid_size(samples.len())?;
        if let Some(j) = samples
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(j));
        }
        Ok(Self { samples })
    }

    /// Wraps samples produced by internal arithmetic; the grid size is
    /// inherited from an already validated function.
    pub(crate) fn from_raw(samples: Vec<Complex64>) -> Self {
        debug_assert!(samples.len().is_power_of_two());
        Self { samples }
    }

    pub fn from_fn(m: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        check_grid_size(m)?;
        Self::new((0..m).map(|j| f(grid_point(m, j))).collect())
    }

    /// Samples a real function of the angle `θ_j = 2πj/M`.
    pub fn from_real_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid_size(m)?;
        Self::new(
            (0..m)
                .map(|j| Complex64::new(f(grid_angle(m, j)), 0.0))
                .collect(),
        )
    }

    pub fn constant(m: usize, value: Complex64) -> Result<Self> {
        check_grid_size(m)?;
        Self::new(vec![value; m])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn point(&self, j: usize) -> Complex64 {
        grid_point(self.len(), j)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_raw(self.samples.iter().map(|&z| f(z)).collect())
    }

    /// Pointwise map that also sees the grid node.
    pub fn map_with_point(&self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let m = self.len();
        Self::from_raw(
            self.samples
                .iter()
                .enumerate()
                .map(|(j, &z)| f(grid_point(m, j), z))
                .collect(),
        )
    }

    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_raw(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Integral against the normalized Lebesgue measure.
    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.len() as f64
    }

    /// Grid `L²(m)` norm.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.len() as f64).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol * (1.0 + self.sup_norm())
    }

    fn require_real(&self) -> Result<()> {
        if !self.is_real(REAL_TOL) {
            return Err(Error::NotReal(self.max_imag()));
        }
        Ok(())
    }

    /// Discrete Fourier analysis.
    pub fn analyze(&self) -> FourierSeries {
        let m = self.len();
        let mut buf = self.samples.clone();
        forward_plan(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        FourierSeries { coeffs: buf }
    }
}

/// Which Fourier indices a projection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// `n >= 0`
    Plus,
    /// `n <= -1`
    Minus,
    /// `n >= 1`
    StrictlyPositive,
}

impl Part {
    fn keeps(self, n: i64) -> bool {
        match self {
            Part::Plus => n >= 0,
            Part::Minus => n < 0,
            Part::StrictlyPositive => n > 0,
        }
    }
}

/// Fourier coefficients `c_n`, `n ∈ [-M/2, M/2)`, stored in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    pub fn zeros(m: usize) -> Result<Self> {
        check_grid_size(m)?;
        Ok(Self {
            coeffs: vec![Complex64::new(0.0, 0.0); m],
        })
    }

    /// Builds a series from `(index, value)` pairs; unspecified indices are zero.
    pub fn from_terms(m: usize, terms: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = Self::zeros(m)?;
        for &(n, c) in terms {
            s.set(n, c)?;
        }
        Ok(s)
    }

    /// Analytic series from Taylor coefficients `c_0, c_1, …`.
    pub fn from_taylor(m: usize, taylor: &[Complex64]) -> Result<Self> {
        let mut s = Self::zeros(m)?;
        for (n, &c) in taylor.iter().enumerate() {
            s.set(n as i64, c)?;
        }
        Ok(s)
    }

    pub fn grid_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn min_index(&self) -> i64 {
        -(self.grid_size() as i64 / 2)
    }

    pub fn max_index(&self) -> i64 {
        self.grid_size() as i64 / 2 - 1
    }

    pub fn in_range(&self, n: i64) -> bool {
        n >= self.min_index() && n <= self.max_index()
    }

    fn slot(&self, n: i64) -> usize {
        n.rem_euclid(self.grid_size() as i64) as usize
    }

    /// Coefficient `c_n`; zero outside the represented range.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if self.in_range(n) {
            self.coeffs[self.slot(n)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, n: i64, c: Complex64) -> Result<()> {
        if !self.in_range(n) {
            return Err(Error::InsufficientRange {
                needed: n.unsigned_abs() as usize,
                available: self.grid_size() / 2,
            });
        }
        let k = self.slot(n);
        self.coeffs[k] = c;
        Ok(())
    }

    /// `(n, c_n)` in increasing index order.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        (self.min_index()..=self.max_index()).map(move |n| (n, self.coeff(n)))
    }

    /// Errors unless every index in `[-reach, reach]` is represented.
    pub fn require_reach(&self, reach: usize) -> Result<()> {
        if reach as i64 > self.max_index() {
            return Err(Error::InsufficientRange {
                needed: reach,
                available: self.grid_size() / 2,
            });
        }
        Ok(())
    }

    /// Discrete Fourier synthesis.
    pub fn synthesize(&self) -> GridFunction {
        let m = self.grid_size();
        let mut buf = self.coeffs.clone();
        inverse_plan(m).process(&mut buf);
        GridFunction::from_raw(buf)
    }

    pub fn project(&self, part: Part) -> FourierSeries {
        let m = self.grid_size() as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let n = if (k as i64) < m / 2 {
                    k as i64
                } else {
                    k as i64 - m
                };
                if part.keeps(n) {
                    c
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        FourierSeries { coeffs }
    }

    /// `ℓ²` norm of the coefficients (equals the grid `L²` norm of the synthesis).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ |n| |c_n|²` over the represented indices.
    pub fn besov_seminorm(&self) -> f64 {
        self.iter_indexed()
            .map(|(n, c)| n.unsigned_abs() as f64 * c.norm_sqr())
            .sum()
    }

    /// Evaluates the truncated series at an arbitrary point `z ≠ 0`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.iter_indexed()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|(n, c)| c * z.powi(n as i32))
            .sum()
    }
}

/// Analysis or synthesis, dispatched on the argument type.
pub enum FourierData {
    Grid(GridFunction),
    Series(FourierSeries),
}

pub fn fourier(data: FourierData) -> FourierData {
    match data {
        FourierData::Grid(g) => FourierData::Series(g.analyze()),
        FourierData::Series(s) => FourierData::Grid(s.synthesize()),
    }
}

/// Harmonic conjugate `ũ`: multiplies `c_n` by `-i·sign(n)`.
///
/// The Nyquist coefficient `c_{-M/2}` has no partner index on the grid and
/// is dropped so that the result stays real.
pub fn harmonic_conjugate(u: &GridFunction) -> Result<GridFunction> {
    u.require_real()?;
    let mut c = u.analyze();
    let m = c.grid_size() as i64;
    for n in c.min_index()..=c.max_index() {
        let factor = match n.signum() {
            1 => Complex64::new(0.0, -1.0),
            -1 if n != -m / 2 => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, 0.0),
        };
        let v = c.coeff(n) * factor;
        c.set(n, v)?;
    }
    Ok(c.synthesize().map(|z| Complex64::new(z.re, 0.0)))
}

fn checked_log_weight(w: &GridFunction) -> Result<GridFunction> {
    w.require_real()?;
    let min = w
        .samples()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    if min <= WEIGHT_FLOOR {
        return Err(Error::WeightVanishes(min));
    }
    Ok(w.map(|z| Complex64::new(z.re.ln(), 0.0)))
}

/// Samples of the outer function `O` with `|O|² = w` and `O(0) > 0`.
pub fn outer_samples(w: &GridFunction) -> Result<GridFunction> {
    let c = checked_log_weight(w)?.analyze();
    let mut h = c.project(Part::StrictlyPositive);
    h.set(0, c.coeff(0) * 0.5)?;
    // half of the Nyquist term keeps Re h = log(w)/2 exactly on the grid
    let nyq = c.min_index();
    h.set(nyq, c.coeff(nyq) * 0.5)?;
    Ok(h.synthesize().map(|z| z.exp()))
}

/// Analytic Fourier coefficients of the outer function with `|O|² = w`.
pub fn outer_from_modulus_squared(w: &GridFunction) -> Result<FourierSeries> {
    Ok(outer_samples(w)?.analyze().project(Part::Plus))
}

/// Decomposition `s = c · t^N · e^{ig}` of a unimodular function.
#[derive(Clone, Debug, PartialEq)]
pub struct WindingDecomposition {
    pub index: i64,
    /// Real phase `g` with zero mean.
    pub phase: GridFunction,
    pub constant: Complex64,
}

impl WindingDecomposition {
    /// Rebuilds `c · t^N · e^{ig}` on the grid.
    pub fn reconstruct(&self) -> GridFunction {
        let n = self.index as i32;
        let c = self.constant;
        self.phase
            .map_with_point(|t, g| c * t.powi(n) * Complex64::from_polar(1.0, g.re))
    }
}

pub fn max_unimodular_defect(s: &GridFunction) -> f64 {
    s.samples()
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max)
}

pub fn require_unimodular(s: &GridFunction) -> Result<()> {
    let defect = max_unimodular_defect(s);
    if defect > UNIMODULAR_TOL {
        return Err(Error::NotUnimodular(defect));
    }
    Ok(())
}

/// Winding index and phase of a unimodular grid function.
pub fn winding_index(s: &GridFunction) -> Result<WindingDecomposition> {
    require_unimodular(s)?;
    let m = s.len();
    let z = s.samples();
    let mut unwrapped = Vec::with_capacity(m);
    let mut acc = z[0].arg();
    for j in 0..m {
        unwrapped.push(acc);
        let step = (z[(j + 1) % m] / z[j]).arg();
        if step.abs() >= MAX_PHASE_STEP {
            return Err(Error::PhaseJump { index: j, step });
        }
        acc += step;
    }
    let total = acc - z[0].arg();
    let index = (total / (2.0 * PI)).round() as i64;
    let residual: Vec<f64> = unwrapped
        .iter()
        .enumerate()
        .map(|(j, &p)| p - index as f64 * grid_angle(m, j))
        .collect();
    let mu = residual.iter().sum::<f64>() / m as f64;
    let phase = GridFunction::from_raw(
        residual
            .iter()
            .map(|&p| Complex64::new(p - mu, 0.0))
            .collect(),
    );
    Ok(WindingDecomposition {
        index,
        phase,
        constant: Complex64::from_polar(1.0, mu),
    })
}

/// `Σ |n| |c_n|²`.
pub fn besov_seminorm(c: &FourierSeries) -> f64 {
    c.besov_seminorm()
}

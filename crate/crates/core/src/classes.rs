//! Helson–Szegő (A₂) and Golinskii–Ibragimov diagnostics, and the
//! Helson–Szegő generator `(u, v, c) ↦ (w, s, α₋₁)`.
//!
//! Class memberships are asymptotic; everything here is finite evidence.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{harmonic_conjugate, winding_index, GridFunction};
use crate::cmv::spectral_density;
use crate::error::{Error, Result};
use crate::operators::{hankel_block, transformation_inverse_norms};
use crate::scattering::{
    canonical_test_escalating, inverse_scattering_assuming_canonical, scattering_from_szego,
    szego_function, verblunsky_from_density, Verdict, DEFAULT_SIZES, DEFAULT_TAU_HI,
    DEFAULT_TAU_LO, MAX_ESCALATED_SIZE,
};
use crate::schur::VerblunskyData;

/// Deepest dyadic level used by [`classify`].
pub const DEFAULT_A2_DEPTH: usize = 10;
/// Block sizes for the Hankel and `ℒ⁻¹` norm traces.
pub const NORM_SIZES: [usize; 4] = [16, 32, 64, 128];
/// Below this many coefficients the partial sums carry no trend.
pub const MIN_TREND_LENGTH: usize = 16;
/// A₂ trace counts as bounded while the last two levels grow by less than this factor.
pub const A2_GROWTH_LIMIT: f64 = 1.25;
/// and while the running supremum stays below this value.
pub const A2_BOUND: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Level {
    pub depth: usize,
    /// Running supremum of `⟨w⟩_I⟨w⁻¹⟩_I` over dyadic arcs of depth `≤ depth`.
    pub sup: f64,
}

/// Running supremum of `⟨w⟩_I⟨w⁻¹⟩_I` over arcs of `M/2^d` consecutive grid
/// points at every offset, for `d = 0..=max_depth`.
pub fn a2_supremum(w: &GridFunction, max_depth: usize) -> Result<Vec<A2Level>> {
    let m = w.len();
    let log_m = m.trailing_zeros() as usize;
    if max_depth + 2 > log_m {
        return Err(Error::InvalidArgument(format!(
            "depth {max_depth} exceeds log2(M) - 2 = {}",
            log_m - 2
        )));
    }
    let imag = w.max_imag();
    if imag > 1e-12 {
        return Err(Error::NotReal(imag));
    }
    let x = w.real_parts();
    let floor = x.iter().copied().fold(f64::INFINITY, f64::min);
    if !(floor > 0.0) {
        return Err(Error::WeightVanishes(floor));
    }
    let prefix = |f: &dyn Fn(f64) -> f64| {
        let mut acc = vec![0.0; 2 * m + 1];
        for j in 0..2 * m {
            acc[j + 1] = acc[j] + f(x[j % m]);
        }
        acc
    };
    let sum_w = prefix(&|y| y);
    let sum_inv = prefix(&|y| 1.0 / y);
    let mut running = 0.0f64;
    let mut out = Vec::with_capacity(max_depth + 1);
    for depth in 0..=max_depth {
        let len = m >> depth;
        let best = (0..m)
            .map(|start| {
                let a = (sum_w[start + len] - sum_w[start]) / len as f64;
                let b = (sum_inv[start + len] - sum_inv[start]) / len as f64;
                a * b
            })
            .fold(0.0, f64::max);
        running = running.max(best);
        out.push(A2Level {
            depth,
            sup: running,
        });
    }
    Ok(out)
}

/// `Σ n|a_n|²` and `∏ρ_n^{n+1}` with their partial traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GiReport {
    pub gi_sum: f64,
    pub widom_product: f64,
    /// Entry `n` is `Σ_{k≤n} k|a_k|²`.
    pub partial_sums: Vec<f64>,
    /// Entry `n` is `∏_{k≤n} ρ_k^{k+1}`.
    pub partial_products: Vec<f64>,
}

pub fn gi_functional(v: &VerblunskyData) -> GiReport {
    let mut sum = 0.0;
    let mut product = 1.0;
    let mut partial_sums = Vec::with_capacity(v.n_supp());
    let mut partial_products = Vec::with_capacity(v.n_supp());
    for n in 0..v.n_supp() {
        sum += n as f64 * v.alpha(n).norm_sqr();
        product *= v.rho(n).powi(n as i32 + 1);
        partial_sums.push(sum);
        partial_products.push(product);
    }
    GiReport {
        gi_sum: sum,
        widom_product: product,
        partial_sums,
        partial_products,
    }
}

/// Partial sums at `N/4, N/2, N` for a trace of length `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingTrace {
    pub sizes: Vec<usize>,
    pub sums: Vec<f64>,
    /// `None` when the trace is shorter than [`MIN_TREND_LENGTH`].
    pub stabilizing: Option<bool>,
}

/// Non-stabilizing when the last doubling increment is at least half the
/// first one and above `1e-3`.
pub fn gi_doubling(partial_sums: &[f64]) -> DoublingTrace {
    let n = partial_sums.len();
    if n < MIN_TREND_LENGTH {
        return DoublingTrace {
            sizes: vec![n],
            sums: vec![partial_sums.last().copied().unwrap_or(0.0)],
            stabilizing: None,
        };
    }
    let sizes = vec![n / 4, n / 2, n];
    let sums: Vec<f64> = sizes.iter().map(|&k| partial_sums[k - 1]).collect();
    let first = sums[1] - sums[0];
    let last = sums[2] - sums[1];
    let growing = last >= 0.5 * first && last > 1e-3;
    DoublingTrace {
        sizes,
        sums,
        stabilizing: Some(!growing),
    }
}

/// Output of the Helson–Szegő generator.
#[derive(Clone, Debug)]
pub struct HsOutput {
    pub w: GridFunction,
    pub s: GridFunction,
    pub alpha_minus_one: Complex64,
}

/// `w = Ce^{u-ṽ}` with grid mean 1, `s = c·e^{i(ũ+v)}`, `α₋₁ = -c̄`.
/// Grid means of `u` and `v` are removed first.
pub fn hs_generator(u: &GridFunction, v: &GridFunction, c: Complex64) -> Result<HsOutput> {
    u.same_grid(v)?;
    for f in [u, v] {
        let imag = f.max_imag();
        if imag > 1e-12 {
            return Err(Error::NotReal(imag));
        }
    }
    let modulus = c.norm();
    if (modulus - 1.0).abs() >= 1e-12 {
        return Err(Error::AnchorNotUnimodular(modulus));
    }
    let centered = |f: &GridFunction| {
        let mu = f.mean().re;
        f.map(|x| Complex64::new(x.re - mu, 0.0))
    };
    let u = centered(u);
    let v = centered(v);
    let vs = v.real_parts();
    let spread = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - vs.iter().copied().fold(f64::INFINITY, f64::min);
    if spread >= PI - 1e-6 {
        return Err(Error::Oscillation(spread));
    }
    let u_conj = harmonic_conjugate(&u)?;
    let v_conj = harmonic_conjugate(&v)?;
    let raw = u.zip_with(&v_conj, |a, b| Complex64::new((a.re - b.re).exp(), 0.0))?;
    let scale = raw.mean().re;
    let w = raw.map(|x| x / scale);
    let s = u_conj.zip_with(&v, |a, b| c * Complex64::from_polar(1.0, a.re + b.re))?;
    Ok(HsOutput {
        w,
        s,
        alpha_minus_one: -c.conj(),
    })
}

/// Input to [`classify`].
#[derive(Clone, Debug)]
pub enum ClassInput {
    Verblunsky(VerblunskyData),
    /// Positive weight; rescaled to mean 1, anchored at `α₋₁ = -1`.
    Weight(GridFunction),
    Scattering(GridFunction),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hint {
    Positive,
    Negative,
    Inconclusive,
}

/// Finite-data hints; none of them is a membership proof.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub kind: String,
    pub hs: Hint,
    pub gi: Hint,
    pub a2_family: String,
    /// Why coefficient-based fields are empty, when they are.
    pub coefficient_note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizedValue {
    pub size: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub a2_trace: Vec<A2Level>,
    pub besov_logw: Option<f64>,
    pub besov_phase: Option<f64>,
    pub gi_partial_sums: Vec<f64>,
    pub widom_partial_products: Vec<f64>,
    pub hankel_norms: Vec<SizedValue>,
    pub linv_norms: Vec<SizedValue>,
    pub canonical_verdict: Option<Verdict>,
    pub evidence: Evidence,
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub grid: usize,
    /// Coefficients recovered from weight or scattering inputs.
    pub depth: usize,
    pub a2_depth: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            grid: crate::circle::DEFAULT_GRID,
            depth: 64,
            a2_depth: DEFAULT_A2_DEPTH,
        }
    }
}

/// Bounded when the running supremum stays below [`A2_BOUND`] and grows by
/// less than [`A2_GROWTH_LIMIT`] over the last two levels.
pub fn a2_hint(trace: &[A2Level]) -> Hint {
    match trace {
        [.., a, _, b] if b.sup.is_finite() => {
            if b.sup < A2_GROWTH_LIMIT * a.sup && b.sup < A2_BOUND {
                Hint::Positive
            } else {
                Hint::Negative
            }
        }
        _ => Hint::Inconclusive,
    }
}

pub fn gi_hint(partial_sums: &[f64]) -> Hint {
    match gi_doubling(partial_sums).stabilizing {
        Some(true) => Hint::Positive,
        Some(false) => Hint::Negative,
        None if partial_sums.is_empty() => Hint::Positive,
        None => Hint::Inconclusive,
    }
}

fn log_besov(w: &GridFunction) -> f64 {
    w.map(|x| Complex64::new(x.re.ln(), 0.0))
        .analyze()
        .besov_seminorm()
}

fn hankel_norms(s: &GridFunction) -> Result<Vec<SizedValue>> {
    let shat = s.analyze();
    NORM_SIZES
        .iter()
        .filter(|&&m| 4 * m <= s.len())
        .map(|&m| {
            Ok(SizedValue {
                size: m,
                value: hankel_block(&shat, m)?.spectral_norm(),
            })
        })
        .collect()
}

fn linv_norms(v: &VerblunskyData, grid: usize) -> Result<Vec<SizedValue>> {
    let sizes: Vec<usize> = NORM_SIZES
        .iter()
        .copied()
        .filter(|&m| 4 * m <= grid)
        .collect();
    Ok(transformation_inverse_norms(v, &sizes, grid)?
        .into_iter()
        .map(|(size, value)| SizedValue { size, value })
        .collect())
}

/// Aggregated diagnostics for one input.
pub fn classify(input: &ClassInput, opts: &ClassifyOptions) -> Result<ClassReport> {
    let mut note = None;
    let (kind, weight, coefficients, s, verdict) = match input {
        ClassInput::Verblunsky(v) => {
            let w = spectral_density(v, opts.grid)?;
            let (_, d) = szego_function(&w)?;
            let s = scattering_from_szego(&d, v.alpha_minus_one());
            ("verblunsky", Some(w), Some(v.clone()), s, None)
        }
        ClassInput::Weight(w) => {
            let imag = w.max_imag();
            if imag > 1e-12 {
                return Err(Error::NotReal(imag));
            }
            let scale = w.mean().re;
            if !(scale > 0.0) {
                return Err(Error::WeightVanishes(scale));
            }
            let w = w.map(|x| x / scale);
            let am1 = Complex64::new(-1.0, 0.0);
            let (_, d) = szego_function(&w)?;
            let s = scattering_from_szego(&d, am1);
            match verblunsky_from_density(&w, am1, opts.depth) {
                Ok((v, _, _)) => ("weight", Some(w), Some(v), s, None),
                Err(e) => {
                    note = Some(format!(
                        "coefficient recovery to depth {} failed: {e}",
                        opts.depth
                    ));
                    ("weight", Some(w), None, s, None)
                }
            }
        }
        ClassInput::Scattering(s) => {
            let max_size = (s.len() / 4).min(MAX_ESCALATED_SIZE);
            let report = canonical_test_escalating(
                s,
                &DEFAULT_SIZES,
                DEFAULT_TAU_LO,
                DEFAULT_TAU_HI,
                max_size,
            )?;
            let (w, v) = if winding_index(s)?.index == 0 {
                let inv = inverse_scattering_assuming_canonical(s, opts.depth)?;
                (Some(inv.spectral.w), Some(inv.data))
            } else {
                (None, None)
            };
            ("scattering", w, v, s.clone(), Some(report.verdict))
        }
    };
    let a2_trace = match &weight {
        Some(w) => a2_supremum(w, opts.a2_depth.min(w.len().trailing_zeros() as usize - 2))?,
        None => Vec::new(),
    };
    let gi = coefficients.as_ref().map(gi_functional);
    let besov_phase = winding_index(&s)
        .ok()
        .filter(|d| d.index == 0)
        .map(|d| d.phase.analyze().besov_seminorm());
    let linv = match &coefficients {
        Some(v) => linv_norms(v, s.len())?,
        None => Vec::new(),
    };
    let gi_partial_sums = gi
        .as_ref()
        .map(|g| g.partial_sums.clone())
        .unwrap_or_default();
    let evidence = Evidence {
        kind: kind.into(),
        hs: a2_hint(&a2_trace),
        gi: if coefficients.is_some() {
            gi_hint(&gi_partial_sums)
        } else {
            Hint::Inconclusive
        },
        a2_family: "finite dyadic arc family, all offsets".into(),
        coefficient_note: note,
    };
    Ok(ClassReport {
        besov_logw: weight.as_ref().map(log_besov),
        a2_trace,
        besov_phase,
        gi_partial_sums,
        widom_partial_products: gi.map(|g| g.partial_products).unwrap_or_default(),
        hankel_norms: hankel_norms(&s)?,
        linv_norms: linv,
        canonical_verdict: verdict,
        evidence,
    })
}

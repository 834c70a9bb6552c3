//! Direct and inverse scattering: Szegő and scattering functions, the `s_ℰ`
//! family, the canonical-symbol test and the monomial non-uniqueness family.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{
    harmonic_conjugate, outer_from_modulus_squared, winding_index, FourierSeries, GridFunction,
    Part, WindingDecomposition,
};
use crate::cmv::density_from_phi;
use crate::error::{Error, Result};
use crate::schur::{schur_forward, SchurChain, VerblunskyData};

const MEAN_TOL: f64 = 1e-8;
const MONOMIAL_TOL: f64 = 1e-8;

/// Thresholds and block sizes of the canonical test.
pub const DEFAULT_TAU_LO: f64 = 1e-6;
pub const DEFAULT_TAU_HI: f64 = 1e-3;
pub const DEFAULT_SIZES: [usize; 3] = [32, 64, 128];
/// Largest block the guarded inverse escalates to.
pub const MAX_ESCALATED_SIZE: usize = 512;

/// Absolutely continuous spectral data: density, Szegő function and anchor.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub w: GridFunction,
    pub d: FourierSeries,
    pub d_samples: GridFunction,
    pub alpha_minus_one: Complex64,
}

/// Outer `D` with `|D|² = w` and `D(0) > 0`, as coefficients and samples.
pub fn szego_function(w: &GridFunction) -> Result<(FourierSeries, GridFunction)> {
    let mean = w.mean();
    if (mean.re - 1.0).abs() > MEAN_TOL || mean.im.abs() > MEAN_TOL {
        return Err(Error::InvalidArgument(format!(
            "density must have mean 1, got {}",
            mean.re
        )));
    }
    let d = outer_from_modulus_squared(w)?;
    let samples = d.synthesize();
    Ok((d, samples))
}

/// `D = ψ_0/(1 + ᾱ₋₁φ)` from a chain with its ψ-sequence filled.
pub fn szego_from_chain(chain: &SchurChain, alpha_minus_one: Complex64) -> Result<GridFunction> {
    let psi = chain
        .psi(0)
        .ok_or_else(|| Error::InvalidArgument("ψ-chain not filled".into()))?;
    let c = alpha_minus_one.conj();
    let den = chain.phi(0).map(|p| 1.0 + c * p);
    let floor = den
        .samples()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    if floor < 1e-12 {
        return Err(Error::DenominatorVanishes(floor));
    }
    psi.zip_with(&den, |a, b| a / b)
}

/// `s = -ᾱ₋₁ D/D̄`.
pub fn scattering_from_szego(d: &GridFunction, alpha_minus_one: Complex64) -> GridFunction {
    let c = -alpha_minus_one.conj();
    d.map(|x| c * x / x.conj())
}

/// A unimodular scattering function with its coefficients and index.
#[derive(Clone, Debug)]
pub struct ScatteringData {
    pub s: GridFunction,
    pub shat: FourierSeries,
    pub index: i64,
    pub spectral: SpectralData,
}

/// Scattering function of finitely supported data.
pub fn scattering_function(v: &VerblunskyData, m: usize) -> Result<ScatteringData> {
    let chain = SchurChain::from_verblunsky(v, m, v.n_supp())?.with_psi()?;
    let am1 = v.alpha_minus_one();
    let d_samples = szego_from_chain(&chain, am1)?;
    let w = density_from_phi(chain.phi(0), am1)?;
    let s = scattering_from_szego(&d_samples, am1);
    let index = winding_index(&s)?.index;
    Ok(ScatteringData {
        shat: s.analyze(),
        s,
        index,
        spectral: SpectralData {
            w,
            d: d_samples.analyze().project(Part::Plus),
            d_samples,
            alpha_minus_one: am1,
        },
    })
}

/// `s_ℰ = -(ψ/ψ̄)(ℰ + φ̄)/(1 + ℰφ)` for samples of an analytic `ℰ` with `‖ℰ‖_∞ ≤ 1`.
pub fn scattering_family(chain: &SchurChain, e: &GridFunction) -> Result<GridFunction> {
    let psi = chain
        .psi(0)
        .ok_or_else(|| Error::InvalidArgument("ψ-chain not filled".into()))?;
    let sup = e.sup_norm();
    if sup > 1.0 + 1e-10 {
        return Err(Error::NotSchur(sup));
    }
    let phi = chain.phi(0);
    let den = e.zip_with(phi, |x, p| 1.0 + x * p)?;
    let floor = den
        .samples()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    if floor < 1e-12 {
        return Err(Error::DenominatorVanishes(floor));
    }
    let ratio = psi.map(|p| p / p.conj());
    let num = e.zip_with(phi, |x, p| x + p.conj())?;
    ratio
        .zip_with(&num, |r, n| -r * n)?
        .zip_with(&den, |a, b| a / b)
}

/// `‖P₋(a - b)‖₂` on coefficients.
pub fn negative_part_gap(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    Ok(a.zip_with(b, |x, y| x - y)?
        .analyze()
        .project(Part::Minus)
        .l2_norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Canonical,
    Noncanonical,
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Canonical => "canonical",
            Verdict::Noncanonical => "noncanonical",
            Verdict::Undecided => "undecided",
        })
    }
}

/// Singular-value evidence at one block size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeEvidence {
    pub size: usize,
    /// Smallest singular values of the `T_s̄` block, ascending (at most three).
    pub toeplitz_conj: Vec<f64>,
    /// Smallest singular values of the `T_{t̄s̄}` block, ascending (at most three).
    pub toeplitz_shifted: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub verdict: Verdict,
    pub sizes: Vec<usize>,
    pub sigma_min_evidence: Vec<SizeEvidence>,
}

/// Dense `n × n` block with entries `(j, k) ↦ ĝ(j - k)`.
pub fn toeplitz_matrix(g: &FourierSeries, n: usize) -> Result<DMatrix<Complex64>> {
    g.require_reach(n.saturating_sub(1))?;
    Ok(DMatrix::from_fn(n, n, |j, k| g.coeff(j as i64 - k as i64)))
}

pub fn singular_values_ascending(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Kernel dimension read from singular values, or `None` inside the gap `(τ_lo, τ_hi)`.
fn kernel_dimension(sigma: &[f64], tau_lo: f64, tau_hi: f64) -> Option<usize> {
    if sigma.iter().any(|&x| x > tau_lo && x < tau_hi) {
        return None;
    }
    Some(sigma.iter().filter(|&&x| x <= tau_lo).count())
}

/// Trivial kernel for `T_s̄` and a one-dimensional kernel for `T_{t̄s̄}`,
/// read off finite sections.
///
/// A size is noncanonical only when a kernel is resolved where none (or a
/// smaller one) is allowed; values in the gap, an unresolved kernel of
/// `T_{t̄s̄}` or disagreement between sizes give undecided.
pub fn canonical_test(
    s: &GridFunction,
    sizes: &[usize],
    tau_lo: f64,
    tau_hi: f64,
) -> Result<CanonicalReport> {
    if sizes.is_empty() || tau_lo >= tau_hi {
        return Err(Error::InvalidArgument(
            "canonical test needs sizes and tau_lo < tau_hi".into(),
        ));
    }
    let conj = s.conj();
    let shifted = conj.map_with_point(|t, x| t.conj() * x);
    let conj_hat = conj.analyze();
    let shifted_hat = shifted.analyze();
    let mut evidence = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let a = singular_values_ascending(&toeplitz_matrix(&conj_hat, n)?);
        let b = singular_values_ascending(&toeplitz_matrix(&shifted_hat, n)?);
        let verdict = match (
            kernel_dimension(&a, tau_lo, tau_hi),
            kernel_dimension(&b, tau_lo, tau_hi),
        ) {
            (Some(0), Some(1)) => Verdict::Canonical,
            (Some(a), Some(b)) if a >= 1 || b >= 2 => Verdict::Noncanonical,
            _ => Verdict::Undecided,
        };
        evidence.push(SizeEvidence {
            size: n,
            toeplitz_conj: a.into_iter().take(3).collect(),
            toeplitz_shifted: b.into_iter().take(3).collect(),
            verdict,
        });
    }
    let first = evidence[0].verdict;
    let verdict = if evidence.iter().all(|e| e.verdict == first) {
        first
    } else {
        Verdict::Undecided
    };
    Ok(CanonicalReport {
        verdict,
        sizes: sizes.to_vec(),
        sigma_min_evidence: evidence,
    })
}

/// Runs [`canonical_test`] on `sizes`, doubling every size while the verdict
/// is undecided and the largest size stays within `max_size`.
pub fn canonical_test_escalating(
    s: &GridFunction,
    sizes: &[usize],
    tau_lo: f64,
    tau_hi: f64,
    max_size: usize,
) -> Result<CanonicalReport> {
    let mut sizes = sizes.to_vec();
    loop {
        let report = canonical_test(s, &sizes, tau_lo, tau_hi)?;
        let next: Vec<usize> = sizes.iter().map(|n| 2 * n).collect();
        if report.verdict != Verdict::Undecided || next.iter().any(|&n| n > max_size) {
            return Ok(report);
        }
        sizes = next;
    }
}

/// Reconstruction from a canonical index-zero scattering function.
#[derive(Clone, Debug)]
pub struct InverseResult {
    pub data: VerblunskyData,
    pub spectral: SpectralData,
    pub degeneracy: Option<(usize, f64)>,
    /// `max |s_reconstructed - s|` with `s_reconstructed = -ᾱ₋₁D/D̄`.
    pub match_error: f64,
    /// Canonicity evidence; absent when the test was skipped.
    pub report: Option<CanonicalReport>,
}

/// Recovers `α₋₁`, the density and `depth` Verblunsky coefficients from `s`.
///
/// With `s = c·e^{ig}`: `α₋₁ = -c̄`, `w = C e^{-g̃}` normalized to mean 1,
/// `R = ŵ(0) + 2Σ_{k≥1} ŵ(k)zᵏ`, `φ = α₋₁(1 - R)/(1 + R)`.
pub fn inverse_scattering(s: &GridFunction, depth: usize) -> Result<InverseResult> {
    let winding = winding_index(s)?;
    if winding.index != 0 {
        return Err(Error::NonCanonical(format!(
            "winding index {} is nonzero; canonical symbols in the implemented class have index 0",
            winding.index
        )));
    }
    let max_size = (s.len() / 4).min(MAX_ESCALATED_SIZE);
    let report =
        canonical_test_escalating(s, &DEFAULT_SIZES, DEFAULT_TAU_LO, DEFAULT_TAU_HI, max_size)?;
    match report.verdict {
        Verdict::Canonical => {}
        Verdict::Noncanonical => {
            return Err(Error::NonCanonical(evidence_summary(&report)));
        }
        Verdict::Undecided => return Err(Error::Undecided(evidence_summary(&report))),
    }
    finish(s, &winding, depth, Some(report))
}

/// The reconstruction of [`inverse_scattering`] without the finite-section
/// canonicity test, for symbols known to be canonical (for instance the
/// scattering function of finitely supported data). The index must still be 0.
pub fn inverse_scattering_assuming_canonical(
    s: &GridFunction,
    depth: usize,
) -> Result<InverseResult> {
    let winding = winding_index(s)?;
    if winding.index != 0 {
        return Err(Error::NonCanonical(format!(
            "winding index {} is nonzero; canonical symbols in the implemented class have index 0",
            winding.index
        )));
    }
    finish(s, &winding, depth, None)
}

fn finish(
    s: &GridFunction,
    winding: &WindingDecomposition,
    depth: usize,
    report: Option<CanonicalReport>,
) -> Result<InverseResult> {
    let (data, spectral, degeneracy) = reconstruct(winding, depth)?;
    let rebuilt = scattering_from_szego(&spectral.d_samples, spectral.alpha_minus_one);
    let match_error = rebuilt.max_abs_diff(s)?;
    Ok(InverseResult {
        data,
        spectral,
        degeneracy,
        match_error,
        report,
    })
}

fn evidence_summary(report: &CanonicalReport) -> String {
    report
        .sigma_min_evidence
        .iter()
        .map(|e| {
            format!(
                "n={}: sigma(T_conj s)={:.3e}, sigma(T_conj(ts))={:?}",
                e.size,
                e.toeplitz_conj.first().copied().unwrap_or(f64::NAN),
                e.toeplitz_shifted
                    .iter()
                    .take(2)
                    .map(|x| format!("{x:.3e}"))
                    .collect::<Vec<_>>()
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Coefficients, spectral data and the degeneracy marker of a reconstruction.
pub type Reconstruction = (VerblunskyData, SpectralData, Option<(usize, f64)>);

fn reconstruct(winding: &WindingDecomposition, depth: usize) -> Result<Reconstruction> {
    let am1 = -winding.constant.conj();
    let conj_phase = harmonic_conjugate(&winding.phase)?;
    let raw = conj_phase.map(|x| Complex64::new((-x.re).exp(), 0.0));
    let scale = raw.mean().re;
    verblunsky_from_density(&raw.map(|x| x / scale), am1, depth)
}

/// Leading `depth` coefficients of the measure `w dm` with anchor `α₋₁`,
/// through `R = ŵ(0) + 2Σ_{k≥1} ŵ(k)zᵏ` and `φ = α₋₁(1 - R)/(1 + R)`.
pub fn verblunsky_from_density(
    w: &GridFunction,
    alpha_minus_one: Complex64,
    depth: usize,
) -> Result<Reconstruction> {
    let (d, d_samples) = szego_function(w)?;
    let what = w.analyze();
    let mut r = FourierSeries::zeros(w.len())?;
    for (n, c) in what.iter_indexed().filter(|&(n, _)| n >= 0) {
        r.set(n, if n == 0 { c } else { 2.0 * c })?;
    }
    let am1 = alpha_minus_one;
    let phi = r.synthesize().map(|x| am1 * (1.0 - x) / (1.0 + x));
    let forward = schur_forward(&phi, depth, am1)?;
    Ok((
        forward.data,
        SpectralData {
            w: w.clone(),
            d,
            d_samples,
            alpha_minus_one: am1,
        },
        forward.degeneracy,
    ))
}

/// One solution of the inverse problem for `s = κtᴺ`.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub tau: Complex64,
    pub alpha_minus_one: Complex64,
    /// Taylor coefficients of `D_τ = (1 + τκzᴺ)/√2`.
    pub d_taylor: Vec<Complex64>,
    pub d_samples: GridFunction,
    pub w: GridFunction,
    /// `max |-ᾱ₋₁D/D̄ - s|`.
    pub match_error: f64,
}

impl FamilyMember {
    /// Leading Verblunsky coefficients by the Schur algorithm applied to
    /// `φ = α₋₁(1 - R)/(1 + R)` with `R = 1 + τκzᴺ`.
    pub fn verblunsky(&self, depth: usize) -> Result<VerblunskyData> {
        let am1 = self.alpha_minus_one;
        let lead = self.d_taylor.last().copied().unwrap_or_default() * std::f64::consts::SQRT_2;
        let n = self.d_taylor.len() as i32 - 1;
        let phi = GridFunction::from_fn(self.w.len(), |z| {
            let r = 1.0 + lead * z.powi(n);
            am1 * (1.0 - r) / (1.0 + r)
        })?;
        Ok(schur_forward(&phi, depth, am1)?.data)
    }
}

/// `(κ, N)` when `s = κtᴺ` with `N ≥ 1` to within 1e-8.
pub fn monomial_form(s: &GridFunction) -> Result<(Complex64, i64)> {
    let winding = winding_index(s)?;
    let spread = winding.phase.sup_norm();
    if winding.index < 1 || spread > MONOMIAL_TOL {
        return Err(Error::NonCanonical(format!(
            "symbol is not of the form kappa*t^N with N >= 1 (index {}, phase spread {spread:.3e})",
            winding.index
        )));
    }
    Ok((winding.constant, winding.index))
}

/// The solutions `α₋₁ = -τ`, `D_τ = (1 + τκzᴺ)/√2` attached to the inner
/// parameter `ℰ = -κzᴺ`; each reproduces `s = κtᴺ`.
pub fn noncanonical_family(s: &GridFunction, taus: &[Complex64]) -> Result<Vec<FamilyMember>> {
    let (kappa, n) = monomial_form(s)?;
    let m = s.len();
    taus.iter()
        .map(|&tau| {
            let r = tau.norm();
            if (r - 1.0).abs() > 1e-12 {
                return Err(Error::AnchorNotUnimodular(r));
            }
            let mut d_taylor = vec![Complex64::default(); n as usize + 1];
            d_taylor[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            d_taylor[n as usize] += tau * kappa * std::f64::consts::FRAC_1_SQRT_2;
            let d_samples = GridFunction::from_fn(m, |z| {
                (1.0 + tau * kappa * z.powi(n as i32)) * std::f64::consts::FRAC_1_SQRT_2
            })?;
            let w = d_samples.map(|x| Complex64::new(x.norm_sqr(), 0.0));
            let am1 = -tau;
            let c = -am1.conj();
            let match_error = d_samples
                .zip_with(s, |x, target| {
                    if x.norm() < 1e-300 {
                        Complex64::default()
                    } else {
                        c * x / x.conj() - target
                    }
                })?
                .sup_norm();
            Ok(FamilyMember {
                tau,
                alpha_minus_one: am1,
                d_taylor,
                d_samples,
                w,
                match_error,
            })
        })
        .collect()
}

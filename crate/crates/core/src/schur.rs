//! Verblunsky data, the Schur algorithm and the ψ-chain.
//!
//! Schur parameters are tied to the Verblunsky coefficients by
//! `a_n = f_n(0) = -α₋₁ α_n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{outer_samples, GridFunction};
use crate::error::{Error, Result};

const ANCHOR_TOL: f64 = 1e-12;
const SCHUR_BOUND_TOL: f64 = 1e-10;
const ORIGIN_TOL: f64 = 1e-8;
/// `|a_n|` at or above `1 - DEGENERACY_GAP` stops the forward recursion.
pub const DEGENERACY_GAP: f64 = 1e-10;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Finitely supported Verblunsky coefficients with the unimodular anchor `α₋₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VerblunskyJson", into = "VerblunskyJson")]
pub struct VerblunskyData {
    alpha_minus_one: Complex64,
    alphas: Vec<Complex64>,
}

/// Wire form: `{"alpha_minus_one": [re, im], "alphas": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct VerblunskyJson {
    alpha_minus_one: [f64; 2],
    alphas: Vec<[f64; 2]>,
}

impl TryFrom<VerblunskyJson> for VerblunskyData {
    type Error = Error;

    fn try_from(raw: VerblunskyJson) -> Result<Self> {
        VerblunskyData::new(
            Complex64::new(raw.alpha_minus_one[0], raw.alpha_minus_one[1]),
            raw.alphas
                .iter()
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        )
    }
}

impl From<VerblunskyData> for VerblunskyJson {
    fn from(v: VerblunskyData) -> Self {
        VerblunskyJson {
            alpha_minus_one: [v.alpha_minus_one.re, v.alpha_minus_one.im],
            alphas: v.alphas.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl VerblunskyData {
    pub fn new(alpha_minus_one: Complex64, alphas: Vec<Complex64>) -> Result<Self> {
        let r = alpha_minus_one.norm();
        if !r.is_finite() || (r - 1.0).abs() >= ANCHOR_TOL {
            return Err(Error::AnchorNotUnimodular(r));
        }
        for (index, a) in alphas.iter().enumerate() {
            let modulus = a.norm();
            if !(modulus < 1.0) {
                return Err(Error::CoefficientOutsideDisk { index, modulus });
            }
        }
        Ok(Self {
            alpha_minus_one,
            alphas,
        })
    }

    /// Data whose Schur parameters are `a_n`, i.e. `α_n = -ᾱ₋₁ a_n`.
    pub fn from_schur_parameters(alpha_minus_one: Complex64, params: &[Complex64]) -> Result<Self> {
        let c = -alpha_minus_one.conj();
        Self::new(alpha_minus_one, params.iter().map(|a| c * a).collect())
    }

    /// All coefficients zero.
    pub fn free(alpha_minus_one: Complex64) -> Result<Self> {
        Self::new(alpha_minus_one, Vec::new())
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn alpha_minus_one(&self) -> Complex64 {
        self.alpha_minus_one
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn n_supp(&self) -> usize {
        self.alphas.len()
    }

    /// `α_k`, zero beyond the stored support.
    pub fn alpha(&self, k: usize) -> Complex64 {
        self.alphas.get(k).copied().unwrap_or_else(zero)
    }

    /// `ρ_k = sqrt(1 - |α_k|²)`.
    pub fn rho(&self, k: usize) -> f64 {
        (1.0 - self.alpha(k).norm_sqr()).sqrt()
    }

    /// Schur parameter `a_k = -α₋₁ α_k`.
    pub fn schur_parameter(&self, k: usize) -> Complex64 {
        -self.alpha_minus_one * self.alpha(k)
    }

    pub fn schur_parameters(&self) -> Vec<Complex64> {
        (0..self.n_supp())
            .map(|k| self.schur_parameter(k))
            .collect()
    }

    /// `∏_{k≥n} ρ_k`.
    pub fn tail_rho_product(&self, n: usize) -> f64 {
        (n..self.n_supp()).map(|k| self.rho(k)).product()
    }

    /// Drops trailing coefficients with modulus below `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let keep = self
            .alphas
            .iter()
            .rposition(|a| a.norm() >= tol)
            .map_or(0, |k| k + 1);
        Self {
            alpha_minus_one: self.alpha_minus_one,
            alphas: self.alphas[..keep].to_vec(),
        }
    }
}

/// The Schur iterates `f_n`, `φ_n = z f_n` and, once filled, `ψ_n`.
#[derive(Clone, Debug)]
pub struct SchurChain {
    params: Vec<Complex64>,
    f: Vec<GridFunction>,
    phi: Vec<GridFunction>,
    psi: Option<Vec<GridFunction>>,
}

fn times_z(f: &GridFunction) -> GridFunction {
    f.map_with_point(|t, z| t * z)
}

fn rho_of(a: Complex64) -> f64 {
    (1.0 - a.norm_sqr()).sqrt()
}

impl SchurChain {
    fn from_iterates(params: Vec<Complex64>, f: Vec<GridFunction>) -> Self {
        let phi = f.iter().map(times_z).collect();
        Self {
            params,
            f,
            phi,
            psi: None,
        }
    }

    /// Chain of finitely supported data by downward recursion from
    /// `f_depth = 0`; `depth` is raised to the support size if smaller.
    pub fn from_verblunsky(v: &VerblunskyData, m: usize, depth: usize) -> Result<Self> {
        let depth = depth.max(v.n_supp());
        let params: Vec<Complex64> = (0..depth).map(|k| v.schur_parameter(k)).collect();
        let mut f = vec![GridFunction::constant(m, zero())?];
        for &a in params.iter().rev() {
            let next = f.last().expect("non-empty");
            let cur = next.map_with_point(|t, g| (a + t * g) / (1.0 + a.conj() * t * g));
            f.push(cur);
        }
        f.reverse();
        Ok(Self::from_iterates(params, f))
    }

    pub fn depth(&self) -> usize {
        self.params.len()
    }

    pub fn grid_size(&self) -> usize {
        self.f[0].len()
    }

    pub fn params(&self) -> &[Complex64] {
        &self.params
    }

    /// `a_n`, zero past the computed depth.
    pub fn param(&self, n: usize) -> Complex64 {
        self.params.get(n).copied().unwrap_or_else(zero)
    }

    pub fn rho(&self, n: usize) -> f64 {
        rho_of(self.param(n))
    }

    pub fn f(&self, n: usize) -> &GridFunction {
        &self.f[n]
    }

    pub fn phi(&self, n: usize) -> &GridFunction {
        &self.phi[n]
    }

    pub fn psi(&self, n: usize) -> Option<&GridFunction> {
        self.psi.as_ref().map(|p| &p[n])
    }

    pub fn has_psi(&self) -> bool {
        self.psi.is_some()
    }

    /// `ψ_n(0)` read as the grid mean.
    pub fn psi_at_origin(&self, n: usize) -> Option<f64> {
        self.psi(n).map(|p| p.mean().re)
    }

    /// Fills `ψ_n` by the downward recursion `ψ_k = ψ_{k+1}(1 - ā_k f_k)/ρ_k`.
    ///
    /// The bottom of the chain is `ψ_depth = 1` when `φ_depth` vanishes and
    /// the outer function of `1 - |φ_depth|²` otherwise.
    pub fn with_psi(mut self) -> Result<Self> {
        let depth = self.depth();
        let m = self.grid_size();
        let bottom = if self.phi[depth].sup_norm() < 1e-14 {
            GridFunction::constant(m, one())?
        } else {
            outer_samples(&self.phi[depth].map(|z| Complex64::new(1.0 - z.norm_sqr(), 0.0)))?
        };
        let mut psi = vec![bottom];
        for k in (0..depth).rev() {
            let a = self.params[k];
            let rho = rho_of(a);
            let next = psi.last().expect("non-empty");
            let cur = next.zip_with(&self.f[k], |p, f| p * (1.0 - a.conj() * f) / rho)?;
            psi.push(cur);
        }
        psi.reverse();
        self.psi = Some(psi);
        Ok(self)
    }

    /// Max deviation between `ψ_n` and the outer function of `1 - |φ_n|²`,
    /// or `None` when that weight comes within 1e-12 of zero on the grid.
    pub fn psi_outer_discrepancy(&self, n: usize) -> Result<Option<f64>> {
        let Some(psi) = self.psi(n) else {
            return Err(Error::InvalidArgument("ψ-chain not filled".into()));
        };
        let weight = self.phi[n].map(|z| Complex64::new(1.0 - z.norm_sqr(), 0.0));
        if weight.samples().iter().any(|z| z.re <= 1e-12) {
            return Ok(None);
        }
        let outer = outer_samples(&weight)?;
        Ok(Some(outer.max_abs_diff(psi)?))
    }

    /// Max of `||φ_n|² + |ψ_n|² - 1|` over the grid and all `n`.
    pub fn pythagoras_defect(&self) -> Option<f64> {
        let psi = self.psi.as_ref()?;
        Some(
            self.phi
                .iter()
                .zip(psi)
                .flat_map(|(p, q)| {
                    p.samples()
                        .iter()
                        .zip(q.samples())
                        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
                })
                .fold(0.0, f64::max),
        )
    }
}

/// Outcome of the forward Schur algorithm.
#[derive(Clone, Debug)]
pub struct SchurForward {
    pub data: VerblunskyData,
    pub chain: SchurChain,
    /// `(n, |a_n|)` when the recursion hit `|a_n| ≥ 1 - DEGENERACY_GAP`.
    pub degeneracy: Option<(usize, f64)>,
}

fn check_anchor(alpha_minus_one: Complex64) -> Result<()> {
    let r = alpha_minus_one.norm();
    if (r - 1.0).abs() >= ANCHOR_TOL {
        return Err(Error::AnchorNotUnimodular(r));
    }
    Ok(())
}

/// Peels `depth` Schur parameters off `φ`, reading `f_n(0)` as the grid mean.
pub fn schur_forward(
    phi: &GridFunction,
    depth: usize,
    alpha_minus_one: Complex64,
) -> Result<SchurForward> {
    check_anchor(alpha_minus_one)?;
    let sup = phi.sup_norm();
    if sup > 1.0 + SCHUR_BOUND_TOL {
        return Err(Error::NotSchur(sup));
    }
    let c0 = phi.mean().norm();
    if c0 > ORIGIN_TOL {
        return Err(Error::NonzeroAtOrigin(c0));
    }
    let mut f = vec![phi.map_with_point(|t, z| z * t.conj())];
    let mut params = Vec::with_capacity(depth);
    let mut degeneracy = None;
    for n in 0..depth {
        let cur = &f[n];
        let a = cur.mean();
        if a.norm() >= 1.0 - DEGENERACY_GAP {
            degeneracy = Some((n, a.norm()));
            break;
        }
        let g = cur.map(|z| (z - a) / (1.0 - a.conj() * z));
        let residual = g.mean().norm();
        if residual > ORIGIN_TOL {
            return Err(Error::NonzeroAtOrigin(residual));
        }
        f.push(g.map_with_point(|t, z| z * t.conj()));
        params.push(a);
    }
    let data = VerblunskyData::from_schur_parameters(alpha_minus_one, &params)?;
    Ok(SchurForward {
        data,
        chain: SchurChain::from_iterates(params, f),
        degeneracy,
    })
}

/// `φ` on the grid from finitely supported data (downward recursion from `f_N = 0`).
pub fn schur_inverse(v: &VerblunskyData, m: usize) -> Result<GridFunction> {
    let chain = SchurChain::from_verblunsky(v, m, v.n_supp())?;
    Ok(chain.phi(0).clone())
}

/// `φ(z)` at an arbitrary point of the closed disk.
pub fn schur_function_at(v: &VerblunskyData, z: Complex64) -> Complex64 {
    let f0 = (0..v.n_supp()).rev().fold(zero(), |g, k| {
        let a = v.schur_parameter(k);
        (a + z * g) / (1.0 + a.conj() * z * g)
    });
    z * f0
}

/// Fills the ψ-chain.
pub fn psi_chain(chain: SchurChain) -> Result<SchurChain> {
    chain.with_psi()
}

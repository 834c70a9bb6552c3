//! Transfer matrices of the Schur recursion as polynomial pairs `(𝒫, 𝒬)`.

use num_complex::Complex64;

use crate::circle::GridFunction;
use crate::error::{Error, Result};
use crate::schur::VerblunskyData;

/// Polynomial stored by ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.0.get(k).copied().unwrap_or_default()
    }

    pub fn degree_bound(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, c| acc * z + c)
    }

    pub fn shift(&self, k: usize) -> Self {
        let mut out = vec![Complex64::default(); k];
        out.extend_from_slice(&self.0);
        Poly(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Poly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Self {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Poly) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![Complex64::default(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn max_coeff(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn on_grid(&self, m: usize) -> Result<GridFunction> {
        GridFunction::from_fn(m, |z| self.eval(z))
    }
}

/// First `terms` Taylor coefficients of `num/den`; needs `den(0) ≠ 0`.
pub fn series_divide(num: &Poly, den: &Poly, terms: usize) -> Result<Vec<Complex64>> {
    let d0 = den.coeff(0);
    if d0.norm() < 1e-300 {
        return Err(Error::DenominatorVanishes(d0.norm()));
    }
    let mut out: Vec<Complex64> = Vec::with_capacity(terms);
    for k in 0..terms {
        let acc = (1..=k).fold(num.coeff(k), |acc, i| acc - den.coeff(i) * out[k - i]);
        out.push(acc / d0);
    }
    Ok(out)
}

/// `(𝒫_n^j, 𝒬_n^j)`: the product of steps `j..n` applied to `(0, 1)`.
#[derive(Clone, Debug)]
pub struct TransferChain {
    pub j: usize,
    pub n: usize,
    pub p: Poly,
    pub q: Poly,
}

impl TransferChain {
    pub fn new(v: &VerblunskyData, j: usize, n: usize) -> Result<Self> {
        if j > n {
            return Err(Error::IndexOrder { j, n });
        }
        let mut p = Poly(Vec::new());
        let mut q = Poly::constant(Complex64::new(1.0, 0.0));
        for k in j..n {
            let a = v.schur_parameter(k);
            let rho = v.rho(k);
            let zp = p.shift(1);
            let next_p = zp.add(&q.scale(a.conj())).scale((1.0 / rho).into());
            let next_q = zp.scale(a).add(&q).scale((1.0 / rho).into());
            p = next_p;
            q = next_q;
        }
        Ok(Self { j, n, p, q })
    }

    /// `ℰ = 𝒫/𝒬` on the grid.
    pub fn e_samples(&self, m: usize) -> Result<GridFunction> {
        let p = self.p.on_grid(m)?;
        let q = self.q.on_grid(m)?;
        let floor = q
            .samples()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if floor < 1e-12 {
            return Err(Error::DenominatorVanishes(floor));
        }
        p.zip_with(&q, |a, b| a / b)
    }

    /// First `terms` Taylor coefficients of `ℰ`.
    pub fn e_taylor(&self, terms: usize) -> Result<Vec<Complex64>> {
        series_divide(&self.p, &self.q, terms)
    }
}

/// `ℰ_n^j` on the grid by `ℰ_{k+1} = (zℰ_k + ā_k)/(1 + a_k zℰ_k)` from `ℰ_j = 0`.
pub fn e_recursive(v: &VerblunskyData, j: usize, n: usize, m: usize) -> Result<GridFunction> {
    if j > n {
        return Err(Error::IndexOrder { j, n });
    }
    let mut e = GridFunction::constant(m, Complex64::default())?;
    for k in j..n {
        let a = v.schur_parameter(k);
        e = e.map_with_point(|t, x| (t * x + a.conj()) / (1.0 + a * t * x));
    }
    Ok(e)
}

/// Max coefficient of `𝒫_n⁰𝒬_nʲ - 𝒬_n⁰𝒫_nʲ - z^{n-j}𝒫_j⁰`.
pub fn determinant_residual(v: &VerblunskyData, j: usize, n: usize) -> Result<f64> {
    let full = TransferChain::new(v, 0, n)?;
    let tail = TransferChain::new(v, j, n)?;
    let head = TransferChain::new(v, 0, j)?;
    let lhs = full.p.mul(&tail.q).sub(&full.q.mul(&tail.p));
    Ok(lhs.sub(&head.p.shift(n - j)).max_coeff())
}

/// Max of the first `n - j` Taylor coefficients of `ℰ_n⁰ - ℰ_nʲ`.
pub fn vanishing_residual(v: &VerblunskyData, j: usize, n: usize) -> Result<f64> {
    let terms = n - j;
    let full = TransferChain::new(v, 0, n)?.e_taylor(terms)?;
    let tail = TransferChain::new(v, j, n)?.e_taylor(terms)?;
    Ok(full
        .iter()
        .zip(&tail)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

//! Finite blocks of the Hankel, Toeplitz and transformation operators, the
//! GLM factorization, the Widom determinant and the model-space Gram matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::circle::{FourierSeries, GridFunction};
use crate::cmv::max_modulus;
use crate::error::{Error, Result};
use crate::scattering::{scattering_function, singular_values_ascending};
use crate::schur::{SchurChain, VerblunskyData};

/// Row extension factor of the Hankel side.
pub const HANKEL_EXTENSION: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Hankel,
    Toeplitz,
    Transform,
    TransformInverse,
}

/// Dense block with the largest discarded coefficient that should vanish.
#[derive(Clone, Debug)]
pub struct OperatorBlock {
    pub kind: BlockKind,
    pub matrix: DMatrix<Complex64>,
    /// For transform blocks: max modulus of the negative-index coefficients
    /// that the triangular structure drops.
    pub leakage: f64,
}

impl OperatorBlock {
    pub fn size(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn max_above_diagonal(&self) -> f64 {
        let n = self.matrix.nrows().min(self.matrix.ncols());
        (0..n)
            .flat_map(|i| (i + 1..self.matrix.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| self.matrix[(i, j)].norm())
            .fold(0.0, f64::max)
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, Complex64)> {
        let (r, c) = self.matrix.shape();
        (0..r)
            .flat_map(|i| (0..c).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let x = self.matrix[(i, j)];
                (x != Complex64::default()).then_some((i, j, x))
            })
            .collect()
    }
}

pub fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
    singular_values_ascending(a).last().copied().unwrap_or(0.0)
}

fn hankel_rows(shat: &FourierSeries, rows: usize, cols: usize) -> Result<DMatrix<Complex64>> {
    shat.require_reach(rows + cols - 1)?;
    Ok(DMatrix::from_fn(rows, cols, |j, k| {
        shat.coeff(-1 - j as i64 - k as i64)
    }))
}

/// `m × m` block with entries `(j, k) ↦ ŝ(-1-j-k)`.
pub fn hankel_block(shat: &FourierSeries, m: usize) -> Result<OperatorBlock> {
    Ok(OperatorBlock {
        kind: BlockKind::Hankel,
        matrix: hankel_rows(shat, m, m)?,
        leakage: 0.0,
    })
}

/// `m × m` block with entries `(j, k) ↦ ĝ(j-k)`.
pub fn toeplitz_block(ghat: &FourierSeries, m: usize) -> Result<OperatorBlock> {
    Ok(OperatorBlock {
        kind: BlockKind::Toeplitz,
        matrix: crate::scattering::toeplitz_matrix(ghat, m)?,
        leakage: 0.0,
    })
}

fn require_grid(grid: usize, reach: usize) -> Result<()> {
    if reach >= grid / 2 {
        return Err(Error::InsufficientRange {
            needed: reach,
            available: grid / 2,
        });
    }
    Ok(())
}

fn chain_for(v: &VerblunskyData, m: usize, grid: usize) -> Result<SchurChain> {
    require_grid(grid, m)?;
    SchurChain::from_verblunsky(v, grid, m.max(v.n_supp()))?.with_psi()
}

/// `ℒ_{nk} = (ψ_n/(1 + ℰ_n⁰φ_n))_{n-k}` for `n, k < m`; rows past the support are unit rows.
pub fn transformation_block(v: &VerblunskyData, m: usize, grid: usize) -> Result<OperatorBlock> {
    let chain = chain_for(v, m, grid)?;
    transformation_from_chain(v, &chain, m)
}

fn transformation_from_chain(
    v: &VerblunskyData,
    chain: &SchurChain,
    m: usize,
) -> Result<OperatorBlock> {
    let grid = chain.grid_size();
    let mut matrix = DMatrix::from_element(m, m, Complex64::default());
    let mut leakage: f64 = 0.0;
    let mut e = GridFunction::constant(grid, Complex64::default())?;
    for n in 0..m {
        if n >= v.n_supp() {
            matrix[(n, n)] = Complex64::new(1.0, 0.0);
            continue;
        }
        let psi = chain.psi(n).expect("filled");
        let den = e.zip_with(chain.phi(n), |x, f| 1.0 + x * f)?;
        let g = psi.zip_with(&den, |p, d| p / d)?.analyze();
        for k in 0..=n {
            matrix[(n, k)] = g.coeff((n - k) as i64);
        }
        leakage = leakage.max(
            (1..=m as i64)
                .map(|j| g.coeff(-j).norm())
                .fold(0.0, f64::max),
        );
        let a = v.schur_parameter(n);
        e = e.map_with_point(|t, x| (t * x + a.conj()) / (1.0 + a * t * x));
    }
    Ok(OperatorBlock {
        kind: BlockKind::Transform,
        matrix,
        leakage,
    })
}

/// `ℒ⁻¹_{nk} = (1/ψ_k)_{n-k}`.
pub fn transformation_inverse_block(
    v: &VerblunskyData,
    m: usize,
    grid: usize,
) -> Result<OperatorBlock> {
    let chain = chain_for(v, m, grid)?;
    transformation_inverse_from_chain(&chain, m)
}

fn transformation_inverse_from_chain(chain: &SchurChain, m: usize) -> Result<OperatorBlock> {
    let mut matrix = DMatrix::from_element(m, m, Complex64::default());
    let mut leakage: f64 = 0.0;
    for k in 0..m {
        let psi = chain.psi(k.min(chain.depth())).expect("filled");
        let floor = psi
            .samples()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if floor < 1e-12 {
            return Err(Error::DenominatorVanishes(floor));
        }
        let inv = psi.map(|p| 1.0 / p).analyze();
        for n in k..m {
            matrix[(n, k)] = inv.coeff((n - k) as i64);
        }
        leakage = leakage.max(
            (1..=m as i64)
                .map(|j| inv.coeff(-j).norm())
                .fold(0.0, f64::max),
        );
    }
    Ok(OperatorBlock {
        kind: BlockKind::TransformInverse,
        matrix,
        leakage,
    })
}

/// `‖ℒ_m ℒ⁻¹_m - I‖_max`.
pub fn transform_product_residual(v: &VerblunskyData, m: usize, grid: usize) -> Result<f64> {
    let chain = chain_for(v, m, grid)?;
    let l = transformation_from_chain(v, &chain, m)?;
    let inv = transformation_inverse_from_chain(&chain, m)?;
    let product = &l.matrix * &inv.matrix - DMatrix::<Complex64>::identity(m, m);
    Ok(max_modulus(product.iter()))
}

/// Both sides of `I - 𝓗*𝓗 = ℒ*ℒ` on the leading `m × m` block.
#[derive(Clone, Debug)]
pub struct GlmReport {
    pub residual: f64,
    /// `Σ_{n > m″} n|ŝ(-n)|²` over the represented coefficients.
    pub tail_bound: f64,
    pub lhs: DMatrix<Complex64>,
    pub rhs: DMatrix<Complex64>,
}

/// `(I - 𝓗*𝓗)_m` with `m″ = 4m` Hankel rows.
fn glm_lhs(shat: &FourierSeries, m: usize) -> Result<DMatrix<Complex64>> {
    let h = hankel_rows(shat, HANKEL_EXTENSION * m, m)?;
    Ok(DMatrix::<Complex64>::identity(m, m) - h.adjoint() * h)
}

fn hankel_tail(shat: &FourierSeries, from: usize) -> f64 {
    (from as i64 + 1..=-shat.min_index())
        .map(|n| n as f64 * shat.coeff(-n).norm_sqr())
        .sum()
}

/// Frobenius norm of `(I - 𝓗*𝓗)_m - (ℒ*ℒ)_m`, with `ℒ` taken to `m + N_supp` rows.
pub fn glm_residual(v: &VerblunskyData, m: usize, grid: usize) -> Result<GlmReport> {
    let extended = m + v.n_supp();
    let shat = scattering_function(v, grid)?.shat;
    let lhs = glm_lhs(&shat, m)?;
    let l = transformation_block(v, extended, grid)?.matrix;
    let full = l.adjoint() * &l;
    let rhs = full.view((0, 0), (m, m)).into_owned();
    let residual = (&lhs - &rhs).norm();
    Ok(GlmReport {
        residual,
        tail_bound: hankel_tail(&shat, HANKEL_EXTENSION * m),
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidomReport {
    pub det: f64,
    pub product: f64,
    pub gap: f64,
    pub trace: f64,
    pub trace_series: f64,
}

/// Determinant of `(I - 𝓗*𝓗)_m` via Cholesky, against `∏ρ_j^{2(j+1)}`,
/// and `tr(𝓗*𝓗)_m` against `Σ n|ŝ(-n)|²`.
pub fn widom_check(v: &VerblunskyData, m: usize, grid: usize) -> Result<WidomReport> {
    let shat = scattering_function(v, grid)?.shat;
    let lhs = glm_lhs(&shat, m)?;
    let chol = lhs.clone().cholesky().ok_or(Error::LinearAlgebra(
        "I - H*H block is not positive definite",
    ))?;
    let det = chol
        .l()
        .diagonal()
        .iter()
        .map(|d| d.norm_sqr())
        .product::<f64>();
    let product = (0..v.n_supp())
        .map(|j| v.rho(j).powi(2 * (j as i32 + 1)))
        .product::<f64>();
    let trace = (0..m).map(|k| 1.0 - lhs[(k, k)].re).sum();
    let trace_series = (1..=-shat.min_index())
        .map(|n| n as f64 * shat.coeff(-n).norm_sqr())
        .sum();
    Ok(WidomReport {
        det,
        product,
        gap: (det - product).abs(),
        trace,
        trace_series,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    F,
    E,
}

/// Gram matrix of the first `m` basis vectors under
/// `⟨F, G⟩ = ∫ G* [[1, s̄₀], [s₀, 1]] F dm`, `s₀ = -(ψ/ψ̄)φ̄`.
pub fn model_gram(
    v: &VerblunskyData,
    m: usize,
    basis: Basis,
    grid: usize,
) -> Result<DMatrix<Complex64>> {
    let chain = chain_for(v, m, grid)?;
    let psi0 = chain.psi(0).expect("filled");
    let s0 = psi0.zip_with(chain.phi(0), |p, f| -(p / p.conj()) * f.conj())?;
    let vectors: Vec<(GridFunction, GridFunction)> = (0..m)
        .map(|k| basis_vector(&chain, basis, k))
        .collect::<Result<_>>()?;
    let s0 = s0.samples();
    let weight = 1.0 / grid as f64;
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let (f1, f2) = &vectors[j];
        let (g1, g2) = &vectors[i];
        (0..grid)
            .map(|p| {
                let (f1, f2) = (f1.samples()[p], f2.samples()[p]);
                let (g1, g2) = (g1.samples()[p], g2.samples()[p]);
                g1.conj() * (f1 + s0[p].conj() * f2) + g2.conj() * (s0[p] * f1 + f2)
            })
            .sum::<Complex64>()
            * weight
    }))
}

fn basis_vector(
    chain: &SchurChain,
    basis: Basis,
    k: usize,
) -> Result<(GridFunction, GridFunction)> {
    let ratio = |n: usize| -> Result<(GridFunction, GridFunction)> {
        let psi = chain.psi(n).expect("filled");
        let phi = chain.phi(n);
        Ok((
            psi.map(|p| 1.0 / p),
            phi.zip_with(psi, |f, p| f.conj() / p.conj())?,
        ))
    };
    match basis {
        Basis::F => {
            let (inv, second) = ratio(k)?;
            let p = k as i32;
            Ok((inv.map_with_point(|t, x| t.powi(p) * x), second))
        }
        Basis::E => {
            let psi = chain.psi(k).expect("filled");
            let phi = chain.phi(k);
            let n = (k / 2) as i32;
            if k.is_multiple_of(2) {
                let (inv, second) = ratio(k)?;
                Ok((
                    inv.map_with_point(|t, x| t.powi(n) * x),
                    second.map_with_point(|t, x| t.powi(-n) * x),
                ))
            } else {
                let first = phi
                    .zip_with(psi, |f, p| f / p)?
                    .map_with_point(|t, x| t.powi(n) * x);
                let second = psi.map_with_point(|t, p| t.powi(-n - 1) / p.conj());
                Ok((first, second))
            }
        }
    }
}

pub fn gram_defect(g: &DMatrix<Complex64>) -> f64 {
    let n = g.nrows();
    max_modulus((g - DMatrix::<Complex64>::identity(n, n)).iter())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HankelSpectrum {
    /// Singular values of the `𝓗_s` block, descending.
    pub symbol: Vec<f64>,
    /// Singular values of the `𝓗_s̄` block, descending.
    pub conjugate: Vec<f64>,
    /// Max gap between the leading squared singular values.
    pub top_gap: f64,
}

/// Singular values of the `𝓗_s` and `𝓗_s̄` blocks and the gap between their top `top` squares.
pub fn hankel_spectrum(shat: &FourierSeries, m: usize, top: usize) -> Result<HankelSpectrum> {
    let h = hankel_rows(shat, m, m)?;
    let hc = DMatrix::from_fn(m, m, |j, k| shat.coeff(1 + j as i64 + k as i64).conj());
    let mut symbol = singular_values_ascending(&h);
    let mut conjugate = singular_values_ascending(&hc);
    symbol.reverse();
    conjugate.reverse();
    let top_gap = symbol
        .iter()
        .zip(&conjugate)
        .take(top)
        .map(|(a, b)| (a * a - b * b).abs())
        .fold(0.0, f64::max);
    Ok(HankelSpectrum {
        symbol,
        conjugate,
        top_gap,
    })
}

/// `‖ℒ⁻¹_m‖₂` for each requested block size.
pub fn transformation_inverse_norms(
    v: &VerblunskyData,
    sizes: &[usize],
    grid: usize,
) -> Result<Vec<(usize, f64)>> {
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let chain = chain_for(v, largest, grid)?;
    let full = transformation_inverse_from_chain(&chain, largest)?;
    Ok(sizes
        .iter()
        .map(|&m| {
            (
                m,
                spectral_norm(&full.matrix.view((0, 0), (m, m)).into_owned()),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: usize = 4096;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bernstein() -> VerblunskyData {
        VerblunskyData::new(c(-1.0, 0.0), vec![c(0.5, 0.0)]).unwrap()
    }

    fn geometric(n: usize) -> VerblunskyData {
        VerblunskyData::new(
            c(-1.0, 0.0),
            (0..n).map(|k| c(0.5f64.powi(k as i32 + 1), 0.0)).collect(),
        )
        .unwrap()
    }

    fn generic() -> VerblunskyData {
        VerblunskyData::new(
            Complex64::from_polar(1.0, -1.2),
            vec![
                c(0.3, -0.2),
                c(-0.1, 0.4),
                c(0.25, 0.25),
                c(-0.3, 0.0),
                c(0.1, 0.2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hankel_examples() {
        let minus_t = FourierSeries::from_terms(64, &[(1, c(-1.0, 0.0))]).unwrap();
        assert_eq!(
            max_modulus(hankel_block(&minus_t, 8).unwrap().matrix.iter()),
            0.0
        );
        let single =
            FourierSeries::from_terms(64, &[(-1, c(-0.5, 0.0)), (0, c(1.0, 0.0))]).unwrap();
        let h = hankel_block(&single, 8).unwrap();
        assert_eq!(h.nonzero_entries(), vec![(0, 0, c(-0.5, 0.0))]);
        assert!(hankel_block(&single, 40).is_err());
    }

    #[test]
    fn toeplitz_examples() {
        let one = FourierSeries::from_terms(64, &[(0, c(1.0, 0.0))]).unwrap();
        let t = toeplitz_block(&one, 5).unwrap().matrix;
        assert_eq!(t, DMatrix::<Complex64>::identity(5, 5));
        let shift = FourierSeries::from_terms(64, &[(1, c(1.0, 0.0))]).unwrap();
        let t = toeplitz_block(&shift, 5).unwrap();
        assert_eq!(t.nonzero_entries().len(), 4);
        assert!(t.nonzero_entries().iter().all(|&(i, j, _)| i == j + 1));
        let g = FourierSeries::from_terms(64, &[(2, c(0.3, 0.7)), (-1, c(2.0, 0.0))]).unwrap();
        let t = toeplitz_block(&g, 5).unwrap().matrix;
        assert_eq!(t[(2, 0)], c(0.3, 0.7));
        assert_eq!(t[(0, 1)], c(2.0, 0.0));
    }

    #[test]
    fn transform_examples() {
        let free = VerblunskyData::free(c(-1.0, 0.0)).unwrap();
        let l = transformation_block(&free, 8, 256).unwrap();
        assert_eq!(l.matrix, DMatrix::<Complex64>::identity(8, 8));
        let l = transformation_block(&bernstein(), 8, 256).unwrap();
        let inv = transformation_inverse_block(&bernstein(), 8, 256).unwrap();
        let r = 0.75f64.sqrt();
        for n in 0..8 {
            for k in 0..8 {
                let (a, b) = if n == k && n == 0 {
                    (r, 1.0 / r)
                } else if n == k {
                    (1.0, 1.0)
                } else {
                    (0.0, 0.0)
                };
                assert!((l.matrix[(n, k)] - c(a, 0.0)).norm() < 1e-12);
                assert!((inv.matrix[(n, k)] - c(b, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn transform_structure() {
        let v = generic();
        let l = transformation_block(&v, 24, GRID).unwrap();
        assert!(l.leakage < 1e-12);
        assert!(l.max_above_diagonal() == 0.0);
        for n in 0..24 {
            assert!((l.matrix[(n, n)].re - v.tail_rho_product(n)).abs() < 1e-8);
        }
        assert!(l.spectral_norm() <= 1.0 + 1e-8);
        let inv = transformation_inverse_block(&v, 24, GRID).unwrap();
        assert!(inv.leakage < 1e-12);
        assert!(transform_product_residual(&v, 64, GRID).unwrap() < 1e-10);
    }

    #[test]
    fn glm_examples() {
        let free = VerblunskyData::free(c(-1.0, 0.0)).unwrap();
        assert!(glm_residual(&free, 8, 256).unwrap().residual < 1e-15);
        let report = glm_residual(&bernstein(), 16, GRID).unwrap();
        assert!(report.residual < 1e-8);
        assert!((report.lhs[(0, 0)] - c(0.75, 0.0)).norm() < 1e-12);
        assert!((report.rhs[(0, 0)] - c(0.75, 0.0)).norm() < 1e-12);
        assert!((report.lhs[(1, 1)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(glm_residual(&geometric(10), 32, GRID).unwrap().residual < 1e-6);
        assert!(glm_residual(&generic(), 16, GRID).unwrap().residual < 1e-8);
    }

    #[test]
    fn widom_examples() {
        let free = VerblunskyData::free(c(-1.0, 0.0)).unwrap();
        let w = widom_check(&free, 8, 256).unwrap();
        assert!((w.det - 1.0).abs() < 1e-15 && w.product == 1.0);
        let w = widom_check(&bernstein(), 16, GRID).unwrap();
        assert!((w.det - 0.75).abs() < 1e-12);
        assert!((w.trace - 0.25).abs() < 1e-12);
        assert!((w.trace_series - 0.25).abs() < 1e-12);
        let w = widom_check(&geometric(20), 64, GRID).unwrap();
        assert!(w.gap < 1e-6, "{w:?}");
        assert!((w.trace - w.trace_series).abs() < 1e-10);
    }

    #[test]
    fn gram_matrices() {
        let free = VerblunskyData::free(c(-1.0, 0.0)).unwrap();
        assert!(gram_defect(&model_gram(&free, 8, Basis::F, 256).unwrap()) < 1e-15);
        for basis in [Basis::F, Basis::E] {
            assert!(gram_defect(&model_gram(&bernstein(), 16, basis, GRID).unwrap()) < 1e-6);
            assert!(gram_defect(&model_gram(&generic(), 16, basis, GRID).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn hankel_spectra() {
        let constant = FourierSeries::from_terms(256, &[(0, c(0.0, 1.0))]).unwrap();
        let sp = hankel_spectrum(&constant, 16, 10).unwrap();
        assert!(sp.symbol.iter().chain(&sp.conjugate).all(|&x| x == 0.0));
        let shat = scattering_function(&bernstein(), 1024).unwrap().shat;
        let sp = hankel_spectrum(&shat, 16, 10).unwrap();
        assert!((sp.symbol[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_norms_bounded_for_finite_support() {
        let norms = transformation_inverse_norms(&generic(), &[8, 16, 32], GRID).unwrap();
        assert!(norms.windows(2).all(|w| (w[1].1 - w[0].1).abs() < 1e-6));
    }
}

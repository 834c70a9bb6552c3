//! The CMV matrix, its Carathéodory function and spectral density, orthonormal
//! polynomials and the generalized eigenvector.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::circle::GridFunction;
use crate::error::{Error, Result};
use crate::schur::{schur_function_at, SchurChain, VerblunskyData};

/// Largest modulus accepted by the Carathéodory routes.
pub const CARATHEODORY_RADIUS: f64 = 0.9;

fn block(a: Complex64) -> [[Complex64; 2]; 2] {
    let rho = Complex64::new((1.0 - a.norm_sqr()).sqrt(), 0.0);
    [[a.conj(), rho], [rho, -a]]
}

/// Dense `m × m` window of `𝔄 = 𝔄_od 𝔄_e`.
///
/// `𝔄_od = (-α₋₁) ⊕ A_1 ⊕ A_3 ⊕ …` and `𝔄_e = A_0 ⊕ A_2 ⊕ …`, where
/// `A_k = [[ā_k, ρ_k], [ρ_k, -a_k]]` carries the Schur parameter `a_k`.
/// The block of `𝔄_od` cut by the window is replaced by a unit corner.
#[derive(Clone, Debug)]
pub struct CmvMatrix {
    v: VerblunskyData,
    entries: DMatrix<Complex64>,
}

pub fn build_cmv(v: &VerblunskyData, m: usize) -> Result<CmvMatrix> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "CMV size must be even and at least 4, got {m}"
        )));
    }
    let zero = Complex64::default();
    let mut od = DMatrix::from_element(m, m, zero);
    let mut even = DMatrix::from_element(m, m, zero);
    od[(0, 0)] = -v.alpha_minus_one();
    for k in (1..m - 1).step_by(2) {
        place(&mut od, k, block(v.schur_parameter(k)));
    }
    od[(m - 1, m - 1)] = Complex64::new(1.0, 0.0);
    for k in (0..m).step_by(2) {
        place(&mut even, k, block(v.schur_parameter(k)));
    }
    Ok(CmvMatrix {
        v: v.clone(),
        entries: od * even,
    })
}

pub(crate) fn max_modulus<'a>(entries: impl Iterator<Item = &'a Complex64>) -> f64 {
    entries.map(|x| x.norm()).fold(0.0, f64::max)
}

fn place(target: &mut DMatrix<Complex64>, k: usize, b: [[Complex64; 2]; 2]) {
    for (i, row) in b.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            target[(k + i, k + j)] = *x;
        }
    }
}

impl CmvMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Rows and columns at least this far from the window edge are exact.
    fn interior(&self) -> usize {
        self.size().saturating_sub(4)
    }

    /// `‖(𝔄*𝔄 - I)‖_max` over the leading `m - 4` rows and columns.
    pub fn interior_unitarity_defect(&self) -> f64 {
        let k = self.interior();
        let g = self.entries.adjoint() * &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Max residuals of the three cyclicity relations
    /// `𝔄(ρ_{2n}e_{2n} - ā_{2n}e_{2n+1}) = ā_{2n+1}e_{2n+1} + ρ_{2n+1}e_{2n+2}`,
    /// `𝔄⁻¹(ρ_{2n+1}e_{2n+1} - a_{2n+1}e_{2n+2}) = a_{2n+2}e_{2n+2} + ρ_{2n+2}e_{2n+3}`,
    /// `𝔄⁻¹e_0 = -ᾱ₋₁(a_0e_0 + ρ_0e_1)`, with `𝔄⁻¹ = 𝔄*`.
    pub fn cyclicity_residuals(&self) -> [f64; 3] {
        let m = self.size();
        let a = |k: usize| self.v.schur_parameter(k);
        let rho = |k: usize| Complex64::new(self.v.rho(k), 0.0);
        let unit = |pairs: &[(usize, Complex64)]| {
            let mut x = DVector::from_element(m, Complex64::default());
            for &(i, c) in pairs {
                x[i] += c;
            }
            x
        };
        let adj = self.entries.adjoint();
        let gap = |x: DVector<Complex64>, y: DVector<Complex64>| max_modulus((x - y).iter());
        let mut first: f64 = 0.0;
        let mut second: f64 = 0.0;
        for n in 0.. {
            if 2 * n + 3 >= self.interior() {
                break;
            }
            let lhs = &self.entries * unit(&[(2 * n, rho(2 * n)), (2 * n + 1, -a(2 * n).conj())]);
            let rhs = unit(&[
                (2 * n + 1, a(2 * n + 1).conj()),
                (2 * n + 2, rho(2 * n + 1)),
            ]);
            first = first.max(gap(lhs, rhs));
            let lhs = &adj * unit(&[(2 * n + 1, rho(2 * n + 1)), (2 * n + 2, -a(2 * n + 1))]);
            let rhs = unit(&[(2 * n + 2, a(2 * n + 2)), (2 * n + 3, rho(2 * n + 2))]);
            second = second.max(gap(lhs, rhs));
        }
        let anchor = -self.v.alpha_minus_one().conj();
        let lhs = &adj * unit(&[(0, Complex64::new(1.0, 0.0))]);
        let rhs = unit(&[(0, anchor * a(0)), (1, anchor * rho(0))]);
        [first, second, gap(lhs, rhs)]
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, Complex64)> {
        let m = self.size();
        (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let x = self.entries[(i, j)];
                (x != Complex64::default()).then_some((i, j, x))
            })
            .collect()
    }
}

fn check_radius(points: &[Complex64]) -> Result<()> {
    match points.iter().find(|z| z.norm() > CARATHEODORY_RADIUS) {
        Some(z) => Err(Error::InvalidArgument(format!(
            "evaluation point {z} outside |z| <= {CARATHEODORY_RADIUS}"
        ))),
        None => Ok(()),
    }
}

/// `R(z) = (1 - ᾱ₋₁φ(z))/(1 + ᾱ₋₁φ(z))` with `φ` from the Schur recursion.
pub fn caratheodory(v: &VerblunskyData, points: &[Complex64]) -> Result<Vec<Complex64>> {
    check_radius(points)?;
    let c = v.alpha_minus_one().conj();
    Ok(points
        .iter()
        .map(|&z| {
            let p = c * schur_function_at(v, z);
            (1.0 - p) / (1.0 + p)
        })
        .collect())
}

/// Window size used by the resolvent route.
pub fn resolvent_size(v: &VerblunskyData) -> usize {
    let m = (4 * v.n_supp() + 64).max(256);
    m + m % 2
}

/// `R(z) = ⟨(𝔄 + z)(𝔄 - z)⁻¹e_0, e_0⟩` on a truncated window.
pub fn caratheodory_resolvent(v: &VerblunskyData, points: &[Complex64]) -> Result<Vec<Complex64>> {
    check_radius(points)?;
    let cmv = build_cmv(v, resolvent_size(v))?;
    let a = cmv.matrix();
    let m = cmv.size();
    let identity = DMatrix::<Complex64>::identity(m, m);
    points
        .iter()
        .map(|&z| {
            let rhs = (a + &identity * z).column(0).into_owned();
            let x = (a - &identity * z)
                .lu()
                .solve(&rhs)
                .ok_or(Error::LinearAlgebra("resolvent solve failed"))?;
            Ok(x[0])
        })
        .collect()
}

/// `w = (1 - |φ|²)/|1 + ᾱ₋₁φ|²` on the grid.
pub fn spectral_density(v: &VerblunskyData, m: usize) -> Result<GridFunction> {
    let chain = SchurChain::from_verblunsky(v, m, v.n_supp())?;
    density_from_phi(chain.phi(0), v.alpha_minus_one())
}

pub(crate) fn density_from_phi(
    phi: &GridFunction,
    alpha_minus_one: Complex64,
) -> Result<GridFunction> {
    let c = alpha_minus_one.conj();
    let w = phi.map(|p| Complex64::new((1.0 - p.norm_sqr()) / (1.0 + c * p).norm_sqr(), 0.0));
    let floor = w
        .samples()
        .iter()
        .map(|x| x.re)
        .fold(f64::INFINITY, f64::min);
    if !(floor > 0.0) || !floor.is_finite() {
        return Err(Error::WeightVanishes(floor));
    }
    Ok(w)
}

/// Orthonormal polynomials `p_0..=p_{n_max}` (ascending coefficients) by the
/// Szegő recursion `Φ_{n+1} = zΦ_n - ᾱ_nΦ_n*`, `p_n = Φ_n/∏_{k<n}ρ_k`.
pub fn opuc_polynomials(v: &VerblunskyData, n_max: usize) -> Vec<Vec<Complex64>> {
    let mut monic = vec![Complex64::new(1.0, 0.0)];
    let mut norm = 1.0;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push(monic.iter().map(|c| c / norm).collect());
        let alpha = v.alpha(n);
        let reversed: Vec<Complex64> = monic.iter().rev().map(|c| c.conj()).collect();
        let mut next = vec![Complex64::default(); n + 2];
        for (k, c) in monic.iter().enumerate() {
            next[k + 1] += c;
        }
        for (k, c) in reversed.iter().enumerate() {
            next[k] -= alpha.conj() * c;
        }
        monic = next;
        norm *= v.rho(n);
    }
    out
}

fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::default(), |acc, c| acc * z + c)
}

/// `‖G - I‖_max` for the Gram matrix of `p_0..=p_{n_max}` under `w dm`.
pub fn opuc_gram_defect(v: &VerblunskyData, n_max: usize, m: usize) -> Result<f64> {
    let w = spectral_density(v, m)?;
    let polys: Vec<GridFunction> = opuc_polynomials(v, n_max)
        .iter()
        .map(|p| GridFunction::from_fn(m, |z| eval_poly(p, z)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (j, pj) in polys.iter().enumerate() {
        for (k, pk) in polys.iter().enumerate() {
            let inner = pj
                .samples()
                .iter()
                .zip(pk.samples())
                .zip(w.samples())
                .map(|((a, b), x)| a * b.conj() * x.re)
                .sum::<Complex64>()
                / m as f64;
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((inner - target).norm());
        }
    }
    Ok(worst)
}

/// Components `Ψ_{2n}` and `Ψ_{2n+1}` of the generalized eigenvector with
/// their distances to the free asymptotics `tⁿ` and `s̄t^{-n-1}`.
#[derive(Clone, Debug)]
pub struct EigenRow {
    pub n: usize,
    pub even: GridFunction,
    pub odd: GridFunction,
    pub r_even: f64,
    pub r_odd: f64,
}

/// `Ψ_{2n} = D̄t^{-n}p_{2n}` and `Ψ_{2n+1} = -α₋₁D̄tⁿp̄_{2n+1}` for `n ≤ n_max`.
pub fn generalized_eigenrows(v: &VerblunskyData, n_max: usize, m: usize) -> Result<Vec<EigenRow>> {
    let chain = SchurChain::from_verblunsky(v, m, v.n_supp())?.with_psi()?;
    let anchor = v.alpha_minus_one();
    let d = chain
        .psi(0)
        .expect("filled")
        .zip_with(chain.phi(0), |p, f| p / (1.0 + anchor.conj() * f))?;
    let s = d.map(|x| -anchor.conj() * x / x.conj());
    let polys = opuc_polynomials(v, 2 * n_max + 1);
    (0..=n_max)
        .map(|n| {
            let ni = n as i32;
            let even =
                d.map_with_point(|t, x| x.conj() * t.powi(-ni) * eval_poly(&polys[2 * n], t));
            let odd = d.map_with_point(|t, x| {
                -anchor * x.conj() * t.powi(ni) * eval_poly(&polys[2 * n + 1], t).conj()
            });
            let free_even = GridFunction::from_fn(m, |t| t.powi(ni))?;
            let free_odd = s.map_with_point(|t, q| q.conj() * t.powi(-ni - 1));
            let r_even = even.zip_with(&free_even, |a, b| a - b)?.l2_norm();
            let r_odd = odd.zip_with(&free_odd, |a, b| a - b)?.l2_norm();
            Ok(EigenRow {
                n,
                even,
                odd,
                r_even,
                r_odd,
            })
        })
        .collect()
}

/// Max over grid points and interior columns `k` of `|Σ_j Ψ_j 𝔄_{jk} - tΨ_k|`.
pub fn row_relation_residual(v: &VerblunskyData, rows: &[EigenRow]) -> Result<f64> {
    let components = 2 * rows.len();
    if components < 6 {
        return Err(Error::InvalidArgument(
            "need at least three eigenrows".into(),
        ));
    }
    let cmv = build_cmv(v, components + 4)?;
    let a = cmv.matrix();
    let columns = components - 3;
    let psi = |j: usize| {
        if j.is_multiple_of(2) {
            &rows[j / 2].even
        } else {
            &rows[j / 2].odd
        }
    };
    let m = rows[0].even.len();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let t = rows[0].even.point(i);
        for k in 0..columns {
            let lhs: Complex64 = (0..components)
                .map(|j| psi(j).samples()[i] * a[(j, k)])
                .sum();
            worst = worst.max((lhs - t * psi(k).samples()[i]).norm());
        }
    }
    Ok(worst)
}

//! Finite sections of the operators a symbol induces: block Toeplitz and
//! Hankel matrices, their Toeplitz-plus-Hankel combinations, and corners
//! of analytic functions of Toeplitz matrices.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::symbol::{exp_symbol_auto, sample, BlockSymbol, DoublingPolicy};
use crate::C64;

/// Slack added to analyticity-region radii to absorb eigenvalue rounding.
const REGION_SLACK: f64 = 1e-9;

/// The four Toeplitz-plus-Hankel combinations handled by this crate.
///
/// With `phi_k` the coefficients of the symbol, block entry `(j, k)` of the
/// `n`-th section is
///
/// * `I`:   `phi_{j-k} + phi_{j+k+1}`
/// * `II`:  `phi_{j-k} - phi_{j+k+1}`
/// * `III`: `phi_{j-k} - phi_{j+k+2}`
/// * `IV`:  `phi_{j-k} + phi_{j+k}` for `k >= 1`, plain Toeplitz in column 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MVariant {
    I,
    II,
    III,
    IV,
}

impl MVariant {
    pub const ALL: [MVariant; 4] = [MVariant::I, MVariant::II, MVariant::III, MVariant::IV];
}

impl fmt::Display for MVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MVariant::I => "I",
            MVariant::II => "II",
            MVariant::III => "III",
            MVariant::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for MVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(MVariant::I),
            "II" | "ii" | "2" => Ok(MVariant::II),
            "III" | "iii" | "3" => Ok(MVariant::III),
            "IV" | "iv" | "4" => Ok(MVariant::IV),
            _ => Err(Error::InvalidInput("variant must be one of I, II, III, IV")),
        }
    }
}

/// Where a function of an operator argument is analytic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticityRegion {
    Entire,
    Disc { center: C64, radius: f64 },
}

impl AnalyticityRegion {
    fn contains(&self, z: C64) -> bool {
        match self {
            AnalyticityRegion::Entire => true,
            AnalyticityRegion::Disc { center, radius } => (z - center).norm() <= radius + REGION_SLACK,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FunctionKind {
    Exp,
    Polynomial(Vec<C64>),
}

/// An analytic function applied to matrices, symbols, and scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    region: AnalyticityRegion,
}

impl FunctionSpec {
    pub fn exp() -> Self {
        Self { kind: FunctionKind::Exp, region: AnalyticityRegion::Entire }
    }

    /// `coeffs[j]` multiplies the `j`-th power of the argument.
    pub fn polynomial(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("polynomial coefficients must be finite"));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient"));
        }
        Ok(Self { kind: FunctionKind::Polynomial(coeffs), region: AnalyticityRegion::Entire })
    }

    /// Restricts the declared analyticity to a disc; spectra are then
    /// checked against it before the function is applied to an operator.
    pub fn with_disc(mut self, center: C64, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidInput("disc radius must be positive and finite"));
        }
        self.region = AnalyticityRegion::Disc { center, radius };
        Ok(self)
    }

    pub fn region(&self) -> AnalyticityRegion {
        self.region
    }

    pub fn apply_scalar(&self, z: C64) -> C64 {
        match &self.kind {
            FunctionKind::Exp => z.exp(),
            FunctionKind::Polynomial(coeffs) => {
                let mut acc = C64::new(0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    acc = acc * z + c;
                }
                acc
            }
        }
    }

    /// Applies the function to a square matrix after checking its spectrum
    /// against the analyticity region.
    pub fn apply_matrix(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_spectrum(a)?;
        match &self.kind {
            FunctionKind::Exp => a.expm(),
            FunctionKind::Polynomial(coeffs) => a.horner(coeffs),
        }
    }

    /// Applies the function pointwise to a symbol. Polynomials are expanded
    /// exactly in the coefficient algebra; the exponential goes through the
    /// sampling grid.
    pub fn apply_symbol(&self, sym: &BlockSymbol, policy: DoublingPolicy) -> Result<BlockSymbol> {
        self.check_symbol_range(sym)?;
        match &self.kind {
            FunctionKind::Exp => Ok(exp_symbol_auto(sym, policy)?.symbol),
            FunctionKind::Polynomial(coeffs) => {
                let n = sym.block_size();
                let id = BlockSymbol::identity(n);
                let mut acc = scale_symbol(&id, *coeffs.last().expect("nonempty"), sym.tail_tol())?;
                for &c in coeffs.iter().rev().skip(1) {
                    acc = acc.multiply(sym)?;
                    acc = add_constant(&acc, c)?;
                }
                Ok(acc)
            }
        }
    }

    /// Errors with the offending spectral point when an eigenvalue of `a`
    /// leaves the analyticity region.
    pub fn check_spectrum(&self, a: &DenseMatrix) -> Result<()> {
        if matches!(self.region, AnalyticityRegion::Entire) {
            return Ok(());
        }
        for ev in a.eigenvalues()? {
            if !self.region.contains(ev) {
                return Err(Error::RegionViolation { spectral_point: ev });
            }
        }
        Ok(())
    }

    /// Checks the pointwise spectra of the symbol over a sampling grid.
    pub fn check_symbol_range(&self, sym: &BlockSymbol) -> Result<()> {
        if matches!(self.region, AnalyticityRegion::Entire) {
            return Ok(());
        }
        let span = sym.band().map_or(1, |b| b.width());
        let m = (4 * span).max(64).next_power_of_two();
        let grid = sample(sym, m)?;
        for v in grid.values() {
            for ev in v.eigenvalues()? {
                if !self.region.contains(ev) {
                    return Err(Error::RegionViolation { spectral_point: ev });
                }
            }
        }
        Ok(())
    }
}

fn scale_symbol(sym: &BlockSymbol, factor: C64, tail_tol: f64) -> Result<BlockSymbol> {
    let mut coeffs = alloc::collections::BTreeMap::new();
    for (k, mat) in sym.coeffs() {
        coeffs.insert(k, mat.scale(factor));
    }
    BlockSymbol::new(sym.block_size(), coeffs, tail_tol)
}

fn add_constant(sym: &BlockSymbol, c: C64) -> Result<BlockSymbol> {
    let n = sym.block_size();
    let mut coeffs: alloc::collections::BTreeMap<i64, DenseMatrix> =
        sym.coeffs().map(|(k, m)| (k, m.clone())).collect();
    let mut zero = coeffs.remove(&0).unwrap_or_else(|| DenseMatrix::zeros(n, n));
    for i in 0..n {
        zero[(i, i)] += c;
    }
    coeffs.insert(0, zero);
    BlockSymbol::new(n, coeffs, sym.tail_tol())
}

/// Block Toeplitz section: block `(j, k)` is `phi_{j-k}`, `0 <= j, k < n`.
pub fn toeplitz_finite(sym: &BlockSymbol, n: usize) -> DenseMatrix {
    let bs = sym.block_size();
    let mut out = DenseMatrix::zeros(n * bs, n * bs);
    for j in 0..n {
        for k in 0..n {
            if let Some(mat) = sym.coeff(j as i64 - k as i64) {
                out.set_block(j * bs, k * bs, mat).expect("in bounds");
            }
        }
    }
    out
}

/// Block Hankel section: block `(j, k)` is `phi_{j+k+1}`.
pub fn hankel_finite(sym: &BlockSymbol, rows: usize, cols: usize) -> DenseMatrix {
    let bs = sym.block_size();
    let mut out = DenseMatrix::zeros(rows * bs, cols * bs);
    for j in 0..rows {
        for k in 0..cols {
            if let Some(mat) = sym.coeff((j + k + 1) as i64) {
                out.set_block(j * bs, k * bs, mat).expect("in bounds");
            }
        }
    }
    out
}

/// `T_n(phi) + H_n(psi)` for symbols of equal block size.
pub fn toeplitz_plus_hankel(phi: &BlockSymbol, psi: &BlockSymbol, n: usize) -> Result<DenseMatrix> {
    if phi.block_size() != psi.block_size() {
        return Err(Error::SizeMismatch { expected: phi.block_size(), got: psi.block_size() });
    }
    toeplitz_finite(phi, n).add(&hankel_finite(psi, n, n))
}

/// Section of the Toeplitz-plus-Hankel combination selected by `variant`.
pub fn m_operator_finite(sym: &BlockSymbol, variant: MVariant, n: usize) -> DenseMatrix {
    let bs = sym.block_size();
    let mut out = DenseMatrix::zeros(n * bs, n * bs);
    let add_at = |out: &mut DenseMatrix, j: usize, k: usize, idx: i64, sign: f64| {
        if let Some(mat) = sym.coeff(idx) {
            for r in 0..bs {
                for c in 0..bs {
                    out[(j * bs + r, k * bs + c)] += mat[(r, c)] * sign;
                }
            }
        }
    };
    for j in 0..n {
        for k in 0..n {
            add_at(&mut out, j, k, j as i64 - k as i64, 1.0);
            match variant {
                MVariant::I => add_at(&mut out, j, k, (j + k + 1) as i64, 1.0),
                MVariant::II => add_at(&mut out, j, k, (j + k + 1) as i64, -1.0),
                MVariant::III => add_at(&mut out, j, k, (j + k + 2) as i64, -1.0),
                MVariant::IV => {
                    if k >= 1 {
                        add_at(&mut out, j, k, (j + k) as i64, 1.0);
                    }
                }
            }
        }
    }
    out
}

/// Top-left `rows x cols` corner of a matrix.
pub fn corner(a: &DenseMatrix, rows: usize, cols: usize) -> Result<DenseMatrix> {
    a.sub_matrix(0, 0, rows, cols)
}

/// Compression to the complement of the first `n` coordinates: the
/// bottom-right `(dim - n) x (dim - n)` block.
pub fn qn_compress(a: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::SizeMismatch { expected: a.rows(), got: a.cols() });
    }
    if n > a.rows() {
        return Err(Error::OutOfRange { index: n, bound: a.rows() });
    }
    let d = a.rows() - n;
    a.sub_matrix(n, n, d, d)
}

/// Top-left `n`-block corner of `f(T_m(phi))` for `m >= n`.
///
/// The eigenvalues of the section (and of the symbol values, through
/// `check_spectrum`) must lie in the declared analyticity region.
pub fn f_of_toeplitz_corner(
    sym: &BlockSymbol,
    f: &FunctionSpec,
    n: usize,
    m: usize,
) -> Result<DenseMatrix> {
    if m < n {
        return Err(Error::OutOfRange { index: n, bound: m });
    }
    let t = toeplitz_finite(sym, m);
    let ft = f.apply_matrix(&t)?;
    corner(&ft, n * sym.block_size(), n * sym.block_size())
}

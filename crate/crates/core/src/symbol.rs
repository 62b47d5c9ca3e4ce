//! Block-valued Laurent symbols on the unit circle.
//!
//! A [`BlockSymbol`] stores finitely many Fourier coefficients of a
//! function `phi(e^{i theta})` with values in `N x N` complex matrices.
//! Pointwise operations (products, inverses, logs of determinants,
//! exponentials) go through a power-of-two sampling grid; the returned
//! series carry a residual so callers can see how well the band captured
//! the result, and aliasing beyond the requested band is an error that
//! the `_auto` wrappers clear by doubling the grid.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
// Required when num-traits resolves with libm alone; shadowed by inherent
// methods when a std-enabled graph unifies features.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft;
use crate::matrix::DenseMatrix;
use crate::C64;

/// Tail tolerance assigned when the caller does not provide one.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Entrywise tolerance for symbol equality and evenness checks.
pub const SYMBOL_EQ_TOL: f64 = 1e-10;
/// Smallest pivot-ratio at which a sampled symbol value is still inverted.
const SINGULAR_RCOND: f64 = 1e-12;
/// Smallest sampling grid used by the `_auto` wrappers.
const MIN_GRID: usize = 64;
/// Winding detection must land this close to an integer multiple of 2 pi.
const WINDING_SLACK: f64 = 0.1;

const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Inclusive index range `lo..=hi` of Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    pub lo: i64,
    pub hi: i64,
}

impl Band {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInput("band lower edge above upper edge"));
        }
        Ok(Self { lo, hi })
    }

    pub fn symmetric(radius: i64) -> Self {
        Self { lo: -radius, hi: radius }
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.lo && k <= self.hi
    }
}

/// Doubling budget for grid and truncation refinement loops.
#[derive(Debug, Clone, Copy)]
pub struct DoublingPolicy {
    pub max_doublings: usize,
}

impl Default for DoublingPolicy {
    fn default() -> Self {
        Self { max_doublings: 8 }
    }
}

/// Values of a symbol on the uniform grid `theta_j = 2 pi j / M`.
#[derive(Debug, Clone)]
pub struct GridSamples {
    block_size: usize,
    values: Vec<DenseMatrix>,
    tail_tol: f64,
}

impl GridSamples {
    /// `values[j]` is the symbol value at `theta_j`; the grid length must be
    /// a power of two, at least 4.
    pub fn new(block_size: usize, values: Vec<DenseMatrix>, tail_tol: f64) -> Result<Self> {
        let m = values.len();
        if !m.is_power_of_two() || m < 4 {
            return Err(Error::InvalidInput("grid length must be a power of two, at least 4"));
        }
        if block_size == 0 {
            return Err(Error::InvalidInput("block size must be positive"));
        }
        if !tail_tol.is_finite() || tail_tol <= 0.0 {
            return Err(Error::InvalidInput("tail tolerance must be positive and finite"));
        }
        for v in &values {
            if v.rows() != block_size || v.cols() != block_size {
                return Err(Error::SizeMismatch { expected: block_size, got: v.rows() });
            }
        }
        Ok(Self { block_size, values, tail_tol })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn values(&self) -> &[DenseMatrix] {
        &self.values
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.len() as f64
    }
}

/// Finitely supported block Laurent series.
#[derive(Debug, Clone)]
pub struct BlockSymbol {
    block_size: usize,
    coeffs: BTreeMap<i64, DenseMatrix>,
    tail_tol: f64,
}

impl BlockSymbol {
    pub fn new(block_size: usize, coeffs: BTreeMap<i64, DenseMatrix>, tail_tol: f64) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidInput("block size must be positive"));
        }
        if !tail_tol.is_finite() || tail_tol <= 0.0 {
            return Err(Error::InvalidInput("tail tolerance must be positive and finite"));
        }
        for mat in coeffs.values() {
            if mat.rows() != block_size || mat.cols() != block_size {
                return Err(Error::SizeMismatch { expected: block_size, got: mat.rows() });
            }
            if mat.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidInput("symbol coefficients must be finite"));
            }
        }
        Ok(Self { block_size, coeffs, tail_tol })
    }

    /// Scalar symbol from `(index, value)` pairs.
    pub fn scalar_from_pairs(pairs: &[(i64, C64)], tail_tol: f64) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for &(k, v) in pairs {
            coeffs.insert(k, DenseMatrix::scalar(v));
        }
        Self::new(1, coeffs, tail_tol)
    }

    /// Constant symbol `I_N`.
    pub fn identity(block_size: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, DenseMatrix::identity(block_size));
        Self { block_size, coeffs, tail_tol: DEFAULT_TAIL_TOL }
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Result<Self> {
        if !tail_tol.is_finite() || tail_tol <= 0.0 {
            return Err(Error::InvalidInput("tail tolerance must be positive and finite"));
        }
        self.tail_tol = tail_tol;
        Ok(self)
    }

    pub fn coeff(&self, k: i64) -> Option<&DenseMatrix> {
        self.coeffs.get(&k)
    }

    pub fn coeff_or_zero(&self, k: i64) -> DenseMatrix {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| DenseMatrix::zeros(self.block_size, self.block_size))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &DenseMatrix)> {
        self.coeffs.iter().map(|(&k, m)| (k, m))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Smallest band containing the support; `None` for the zero symbol.
    pub fn band(&self) -> Option<Band> {
        Some(Band { lo: self.min_index()?, hi: self.max_index()? })
    }

    /// Requires `block_size == 1`.
    pub fn ensure_scalar(&self) -> Result<()> {
        if self.block_size != 1 {
            return Err(Error::SizeMismatch { expected: 1, got: self.block_size });
        }
        Ok(())
    }

    /// Entry `(0, 0)` of the coefficient at `k` (zero when absent).
    pub fn scalar_coeff(&self, k: i64) -> C64 {
        self.coeffs.get(&k).map_or(C64::new(0.0, 0.0), |m| m[(0, 0)])
    }

    /// Pointwise value at angle `theta`.
    pub fn evaluate(&self, theta: f64) -> DenseMatrix {
        let mut acc = DenseMatrix::zeros(self.block_size, self.block_size);
        for (&k, mat) in &self.coeffs {
            let angle = theta * k as f64;
            let w = C64::new(angle.cos(), angle.sin());
            for i in 0..self.block_size {
                for j in 0..self.block_size {
                    acc[(i, j)] += mat[(i, j)] * w;
                }
            }
        }
        acc
    }

    /// `phi(1/z)`: coefficient indices negate, blocks are untouched.
    pub fn reflect(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&k, m)| (-k, m.clone())).collect();
        Self { block_size: self.block_size, coeffs, tail_tol: self.tail_tol }
    }

    /// Multiplication by `z^s`: shifts every index up by `s`.
    pub fn shift(&self, s: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(&k, m)| (k + s, m.clone())).collect();
        Self { block_size: self.block_size, coeffs, tail_tol: self.tail_tol }
    }

    /// Convolution product; block order matters.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.block_size != other.block_size {
            return Err(Error::SizeMismatch { expected: self.block_size, got: other.block_size });
        }
        let n = self.block_size;
        let mut coeffs: BTreeMap<i64, DenseMatrix> = BTreeMap::new();
        for (&ka, ma) in &self.coeffs {
            for (&kb, mb) in &other.coeffs {
                let prod = ma.mul(mb)?;
                coeffs
                    .entry(ka + kb)
                    .and_modify(|acc| {
                        *acc = acc.add(&prod).expect("shapes agree");
                    })
                    .or_insert(prod);
            }
        }
        let tail_tol = self.tail_tol.min(other.tail_tol);
        Ok(Self { block_size: n, coeffs, tail_tol }.trimmed())
    }

    /// Restricts the support to `band`.
    pub fn restrict(&self, band: Band) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| band.contains(**k))
            .map(|(&k, m)| (k, m.clone()))
            .collect();
        Self { block_size: self.block_size, coeffs, tail_tol: self.tail_tol }
    }

    /// Drops coefficients whose largest entry is at or below the tail tolerance.
    pub fn trimmed(mut self) -> Self {
        let tol = self.tail_tol;
        self.coeffs.retain(|_, m| m.max_abs() > tol);
        self
    }

    /// Entrywise agreement within `tol`, treating absent coefficients as zero.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.block_size != other.block_size {
            return false;
        }
        let keys: alloc::collections::BTreeSet<i64> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        for k in keys {
            let a = self.coeff_or_zero(k);
            let b = other.coeff_or_zero(k);
            if a.sub(&b).map(|d| d.max_abs()).unwrap_or(f64::INFINITY) > tol {
                return false;
            }
        }
        true
    }

    /// True when `phi(1/z) = phi(z)` within the shared equality tolerance.
    pub fn is_even(&self) -> bool {
        self.approx_eq(&self.reflect(), SYMBOL_EQ_TOL)
    }
}

/// Result of a grid-backed symbol transform, with its reconstruction residual.
#[derive(Debug, Clone)]
pub struct SymbolTransform {
    pub symbol: BlockSymbol,
    pub residual: f64,
}

/// Scalar log-determinant series of a symbol, with the winding number of
/// `det phi` about the origin. For nonzero winding the series describes
/// `log(det phi(e^{i t}) e^{-i w t})`.
#[derive(Debug, Clone)]
pub struct LogDetSeries {
    pub series: BlockSymbol,
    pub winding: i64,
    pub residual: f64,
}

/// Samples `sym` on the uniform `m`-point grid.
pub fn sample(sym: &BlockSymbol, m: usize) -> Result<GridSamples> {
    if !m.is_power_of_two() || m < 4 {
        return Err(Error::InvalidInput("grid length must be a power of two, at least 4"));
    }
    if let Some(band) = sym.band() {
        let span = band.width();
        if m < 2 * span {
            return Err(Error::GridTooCoarse { required: 2 * span, got: m });
        }
    }
    let values = (0..m).map(|j| sym.evaluate(TAU * j as f64 / m as f64)).collect();
    GridSamples::new(sym.block_size(), values, sym.tail_tol())
}

/// Recovers the coefficients on `band` from grid values.
///
/// The mass the band fails to capture (all discarded FFT bins, or the band
/// edges when nothing is discarded) must stay below the grid's tail
/// tolerance, otherwise the grid is declared too coarse via `AliasWarning`.
pub fn fourier_coeffs(grid: &GridSamples, band: Band) -> Result<BlockSymbol> {
    let m = grid.len();
    let width = band.width();
    if width > m {
        return Err(Error::GridTooCoarse { required: width, got: m });
    }
    let n = grid.block_size();
    let scale = 1.0 / m as f64;
    let mut mats: BTreeMap<i64, DenseMatrix> = BTreeMap::new();
    let mut discarded_any = false;
    let mut discard_est = 0.0f64;
    let mut edge_est = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let series: Vec<C64> = grid.values().iter().map(|v| v[(r, c)]).collect();
            let f = fft::fft(&series);
            for (b, fb) in f.iter().enumerate() {
                let k = if b <= m / 2 { b as i64 } else { b as i64 - m as i64 };
                let value = fb * scale;
                if band.contains(k) {
                    let entry = mats
                        .entry(k)
                        .or_insert_with(|| DenseMatrix::zeros(n, n));
                    entry[(r, c)] = value;
                    if k == band.lo || k == band.hi {
                        edge_est = edge_est.max(value.norm());
                    }
                } else {
                    discarded_any = true;
                    discard_est = discard_est.max(value.norm());
                }
            }
        }
    }
    let tail_estimate = if discarded_any { discard_est } else { edge_est };
    if tail_estimate > grid.tail_tol() {
        return Err(Error::AliasWarning { tail_estimate, tail_tol: grid.tail_tol() });
    }
    Ok(BlockSymbol::new(n, mats, grid.tail_tol())?.trimmed())
}

fn initial_grid(sym: &BlockSymbol) -> usize {
    let span = sym.band().map_or(1, |b| b.width());
    (4 * span).max(MIN_GRID).next_power_of_two()
}

/// Runs `f` with a doubling grid until it stops reporting aliasing.
fn with_doubling<T>(
    mut m: usize,
    policy: DoublingPolicy,
    mut f: impl FnMut(usize) -> Result<T>,
) -> Result<T> {
    let mut attempt = 0;
    loop {
        match f(m) {
            Err(Error::AliasWarning { tail_estimate, tail_tol }) if attempt < policy.max_doublings => {
                let _ = (tail_estimate, tail_tol);
                m *= 2;
                attempt += 1;
            }
            Err(Error::GridTooCoarse { .. }) if attempt < policy.max_doublings => {
                m *= 2;
                attempt += 1;
            }
            other => return other,
        }
    }
}

/// Pointwise inverse, reconstructed on `band`.
pub fn invert_symbol(sym: &BlockSymbol, m: usize, band: Band) -> Result<SymbolTransform> {
    let grid = sample(sym, m)?;
    let n = sym.block_size();
    let id = DenseMatrix::identity(n);
    let mut inv_values = Vec::with_capacity(m);
    for (j, v) in grid.values().iter().enumerate() {
        let lu = v.lu().map_err(|e| match e {
            Error::SingularMatrix => Error::SingularSymbol { theta: grid.theta(j) },
            other => other,
        })?;
        if lu.rcond_estimate() < SINGULAR_RCOND {
            return Err(Error::SingularSymbol { theta: grid.theta(j) });
        }
        inv_values.push(lu.solve(&id)?);
    }
    let inv_grid = GridSamples::new(n, inv_values, sym.tail_tol())?;
    let symbol = fourier_coeffs(&inv_grid, band)?;
    let mut residual = 0.0f64;
    for (j, v) in grid.values().iter().enumerate() {
        let recon = v.mul(&symbol.evaluate(grid.theta(j)))?;
        residual = residual.max(recon.sub(&id)?.max_abs());
    }
    Ok(SymbolTransform { symbol, residual })
}

/// Pointwise inverse on a full symmetric band, doubling the grid as needed.
pub fn invert_symbol_auto(sym: &BlockSymbol, policy: DoublingPolicy) -> Result<SymbolTransform> {
    with_doubling(initial_grid(sym), policy, |m| {
        let band = Band { lo: -(m as i64 / 2 - 1), hi: m as i64 / 2 - 1 };
        invert_symbol(sym, m, band)
    })
}

/// Like [`invert_symbol_auto`] but restricted to indices `>= 0`, for symbols
/// whose inverse is known to be analytic in the disc.
pub fn invert_plus_auto(sym: &BlockSymbol, policy: DoublingPolicy) -> Result<SymbolTransform> {
    with_doubling(initial_grid(sym), policy, |m| {
        let band = Band { lo: 0, hi: m as i64 / 2 - 1 };
        invert_symbol(sym, m, band)
    })
}

/// Mirror of [`invert_plus_auto`] for indices `<= 0`.
pub fn invert_minus_auto(sym: &BlockSymbol, policy: DoublingPolicy) -> Result<SymbolTransform> {
    with_doubling(initial_grid(sym), policy, |m| {
        let band = Band { lo: -(m as i64 / 2 - 1), hi: 0 };
        invert_symbol(sym, m, band)
    })
}

/// Scalar series of `log det phi` on `band`, with continuous phase tracking.
pub fn log_det_series(sym: &BlockSymbol, m: usize, band: Band) -> Result<LogDetSeries> {
    let grid = sample(sym, m)?;
    let mut logs = Vec::with_capacity(m);
    let mut dets = Vec::with_capacity(m);
    for (j, v) in grid.values().iter().enumerate() {
        let lu = v.lu().map_err(|e| match e {
            Error::SingularMatrix => Error::SingularSymbol { theta: grid.theta(j) },
            other => other,
        })?;
        if lu.rcond_estimate() < SINGULAR_RCOND {
            return Err(Error::SingularSymbol { theta: grid.theta(j) });
        }
        let ld = lu.log_det();
        logs.push(ld);
        dets.push(ld.exp());
    }
    // Unwrap the phase along the grid, then around the full circle to get
    // the winding of det phi.
    let mut phases = Vec::with_capacity(m + 1);
    phases.push(logs[0].im);
    for j in 1..m {
        phases.push(unwrap_step(phases[j - 1], logs[j].im));
    }
    let closed = unwrap_step(phases[m - 1], logs[0].im);
    let total = closed - phases[0];
    let winding_f = total / TAU;
    let winding = winding_f.round() as i64;
    if (winding_f - winding as f64).abs() > WINDING_SLACK {
        return Err(Error::GridTooCoarse { required: 2 * m, got: m });
    }
    // Remove the i * winding * theta ramp so the remaining log is periodic.
    let values: Vec<DenseMatrix> = (0..m)
        .map(|j| DenseMatrix::scalar(C64::new(logs[j].re, phases[j] - winding as f64 * grid.theta(j))))
        .collect();
    let log_grid = GridSamples::new(1, values, sym.tail_tol())?;
    let series = fourier_coeffs(&log_grid, band)?;
    let mut residual = 0.0f64;
    for (j, det) in dets.iter().enumerate() {
        let recon = series.evaluate(grid.theta(j))[(0, 0)]
            + C64::new(0.0, winding as f64 * grid.theta(j));
        let err = (recon.exp() - det).norm() / (1.0 + det.norm());
        residual = residual.max(err);
    }
    Ok(LogDetSeries { series, winding, residual })
}

/// [`log_det_series`] over a full symmetric band with grid doubling.
pub fn log_det_series_auto(sym: &BlockSymbol, policy: DoublingPolicy) -> Result<LogDetSeries> {
    with_doubling(initial_grid(sym), policy, |m| {
        let band = Band { lo: -(m as i64 / 2 - 1), hi: m as i64 / 2 - 1 };
        log_det_series(sym, m, band)
    })
}

/// Pointwise matrix exponential reconstructed on `band`.
pub fn exp_symbol(sym: &BlockSymbol, m: usize, band: Band) -> Result<SymbolTransform> {
    let grid = sample(sym, m)?;
    let n = sym.block_size();
    let mut exp_values = Vec::with_capacity(m);
    for v in grid.values() {
        if n == 1 {
            exp_values.push(DenseMatrix::scalar(v[(0, 0)].exp()));
        } else {
            exp_values.push(v.expm()?);
        }
    }
    let exp_grid = GridSamples::new(n, exp_values.clone(), sym.tail_tol())?;
    let symbol = fourier_coeffs(&exp_grid, band)?;
    let mut residual = 0.0f64;
    for (j, exact) in exp_values.iter().enumerate() {
        let recon = symbol.evaluate(grid.theta(j));
        residual = residual.max(recon.sub(exact)?.max_abs() / (1.0 + exact.max_abs()));
    }
    Ok(SymbolTransform { symbol, residual })
}

/// [`exp_symbol`] over a full symmetric band with grid doubling.
pub fn exp_symbol_auto(sym: &BlockSymbol, policy: DoublingPolicy) -> Result<SymbolTransform> {
    with_doubling(initial_grid(sym), policy, |m| {
        let band = Band { lo: -(m as i64 / 2 - 1), hi: m as i64 / 2 - 1 };
        exp_symbol(sym, m, band)
    })
}

/// Geometric mean `G(phi) = exp((log det phi)_0)`.
pub fn g_constant(sym: &BlockSymbol, policy: DoublingPolicy) -> Result<C64> {
    let lds = log_det_series_auto(sym, policy)?;
    if lds.winding != 0 {
        return Err(Error::NonzeroWinding { winding: lds.winding });
    }
    Ok(lds.series.scalar_coeff(0).exp())
}

/// Banach-algebra norm `sum_k ||phi_k|| + sqrt(sum_k |k| ||phi_k||^2)`,
/// coefficients measured in the spectral norm.
pub fn b_norm(sym: &BlockSymbol) -> Result<f64> {
    let mut wiener = 0.0f64;
    let mut weighted = 0.0f64;
    for (k, mat) in sym.coeffs() {
        let norm = mat.spectral_norm()?;
        wiener += norm;
        weighted += k.unsigned_abs() as f64 * norm * norm;
    }
    Ok(wiener + weighted.sqrt())
}

/// Weighted norm `sqrt(sum_k (1 + |k|)^2 ||phi_k||^2)` in the spectral
/// norm; finiteness is a sufficient condition for both Hankel operators
/// of the symbol to be trace class.
pub fn fl21_norm(sym: &BlockSymbol) -> Result<f64> {
    let mut acc = 0.0f64;
    for (k, mat) in sym.coeffs() {
        let norm = mat.spectral_norm()?;
        let weight = 1.0 + k.unsigned_abs() as f64;
        acc += weight * weight * norm * norm;
    }
    Ok(acc.sqrt())
}

fn unwrap_step(prev: f64, raw: f64) -> f64 {
    let mut d = (raw - prev) % TAU;
    if d > core::f64::consts::PI {
        d -= TAU;
    } else if d <= -core::f64::consts::PI {
        d += TAU;
    }
    prev + d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// |1 - 0.5 z|^2, the standard positive scalar fixture.
    fn fixture_b() -> BlockSymbol {
        BlockSymbol::scalar_from_pairs(
            &[(-1, c(-0.5, 0.0)), (0, c(1.25, 0.0)), (1, c(-0.5, 0.0))],
            DEFAULT_TAIL_TOL,
        )
        .unwrap()
    }

    #[test]
    fn evaluate_matches_hand_expansion() {
        let sym = fixture_b();
        let theta = 0.7;
        let expected = 1.25 - (theta.cos()) * 1.0; // -0.5 e^{i t} - 0.5 e^{-i t} = -cos t
        let got = sym.evaluate(theta)[(0, 0)];
        assert!((got - c(expected, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sample_and_fourier_round_trip() {
        let sym = fixture_b();
        let grid = sample(&sym, 64).unwrap();
        let back = fourier_coeffs(&grid, Band::symmetric(5)).unwrap();
        assert!(back.approx_eq(&sym, 1e-13));
    }

    #[test]
    fn sample_rejects_coarse_grid() {
        let sym = BlockSymbol::scalar_from_pairs(
            &(-10..=10).map(|k| (k, c(1.0 / (1 + k * k) as f64, 0.0))).collect::<Vec<_>>(),
            DEFAULT_TAIL_TOL,
        )
        .unwrap();
        assert!(matches!(sample(&sym, 16), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn multiply_expands_products_of_factors() {
        let up = BlockSymbol::scalar_from_pairs(&[(0, c(1.0, 0.0)), (1, c(-0.5, 0.0))], DEFAULT_TAIL_TOL).unwrap();
        let um = BlockSymbol::scalar_from_pairs(&[(0, c(1.0, 0.0)), (-1, c(-0.5, 0.0))], DEFAULT_TAIL_TOL).unwrap();
        let prod = um.multiply(&up).unwrap();
        assert!(prod.approx_eq(&fixture_b(), 1e-15));
    }

    #[test]
    fn block_multiply_is_order_sensitive() {
        let mut a = BTreeMap::new();
        a.insert(0, DenseMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap());
        let mut b = BTreeMap::new();
        b.insert(1, DenseMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap());
        let sa = BlockSymbol::new(2, a, DEFAULT_TAIL_TOL).unwrap();
        let sb = BlockSymbol::new(2, b, DEFAULT_TAIL_TOL).unwrap();
        let ab = sa.multiply(&sb).unwrap();
        let ba = sb.multiply(&sa).unwrap();
        assert!(!ab.approx_eq(&ba, 1e-12));
    }

    #[test]
    fn reflect_is_an_involution_and_shift_moves_support() {
        let sym = fixture_b();
        assert!(sym.reflect().reflect().approx_eq(&sym, 0.0));
        let shifted = sym.shift(3);
        assert_eq!(shifted.min_index(), Some(2));
        assert_eq!(shifted.max_index(), Some(4));
    }

    #[test]
    fn inverse_of_fixture_matches_geometric_series() {
        let sym = fixture_b();
        let inv = invert_symbol_auto(&sym, DoublingPolicy::default()).unwrap();
        assert!(inv.residual < 1e-11);
        // 1 / |1 - 0.5 z|^2 has coefficients (4/3) 0.5^{|k|}.
        for k in -10i64..=10 {
            let expected = (4.0 / 3.0) * 0.5f64.powi(k.unsigned_abs() as i32);
            let got = inv.symbol.scalar_coeff(k);
            assert!((got - c(expected, 0.0)).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn log_det_series_of_fixture_matches_mercator_series() {
        let sym = fixture_b();
        let lds = log_det_series_auto(&sym, DoublingPolicy::default()).unwrap();
        assert_eq!(lds.winding, 0);
        assert!(lds.residual < 1e-12);
        // log B = log(1 - z/2) + log(1 - 1/(2z)) = -sum_k 0.5^k (z^k + z^-k)/k.
        assert!(lds.series.scalar_coeff(0).norm() < 1e-13);
        for k in 1i64..=8 {
            let expected = -0.5f64.powi(k as i32) / k as f64;
            assert!((lds.series.scalar_coeff(k) - c(expected, 0.0)).norm() < 1e-13);
            assert!((lds.series.scalar_coeff(-k) - c(expected, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn winding_of_z_is_detected() {
        let sym = BlockSymbol::scalar_from_pairs(&[(1, c(1.0, 0.0))], DEFAULT_TAIL_TOL).unwrap();
        let lds = log_det_series_auto(&sym, DoublingPolicy::default()).unwrap();
        assert_eq!(lds.winding, 1);
        assert!(matches!(
            g_constant(&sym, DoublingPolicy::default()),
            Err(Error::NonzeroWinding { winding: 1 })
        ));
    }

    #[test]
    fn singular_symbol_is_flagged_with_its_angle() {
        let sym = BlockSymbol::scalar_from_pairs(&[(0, c(1.0, 0.0)), (1, c(-1.0, 0.0))], DEFAULT_TAIL_TOL).unwrap();
        match invert_symbol_auto(&sym, DoublingPolicy::default()) {
            Err(Error::SingularSymbol { theta }) => assert!(theta.abs() < 1e-12),
            other => panic!("expected singular symbol, got {other:?}"),
        }
    }

    #[test]
    fn exp_symbol_builds_the_exponential_series() {
        let a = c(0.4, -0.1);
        let sym = BlockSymbol::scalar_from_pairs(&[(1, a)], DEFAULT_TAIL_TOL).unwrap();
        let e = exp_symbol_auto(&sym, DoublingPolicy::default()).unwrap();
        assert!(e.residual < 1e-12);
        let mut factorial = 1.0;
        for k in 0i64..=6 {
            if k > 0 {
                factorial *= k as f64;
            }
            let expected = a.powu(k as u32) / factorial;
            assert!((e.symbol.scalar_coeff(k) - expected).norm() < 1e-13, "k={k}");
        }
        assert!(e.symbol.scalar_coeff(-1).norm() < 1e-13);
    }

    #[test]
    fn g_constant_of_fixture_is_one() {
        let g = g_constant(&fixture_b(), DoublingPolicy::default()).unwrap();
        assert!((g - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn norms_match_hand_computations() {
        // Tridiagonal fixture: coefficients 1.25 at k=0 and -0.5 at k=+-1.
        let sym = fixture_b();
        let b_expected = 2.25 + (0.25f64 + 0.25).sqrt();
        assert!((b_norm(&sym).unwrap() - b_expected).abs() < 1e-12);
        let fl_expected = (1.25f64 * 1.25 + 4.0 * 0.25 + 4.0 * 0.25).sqrt();
        assert!((fl21_norm(&sym).unwrap() - fl_expected).abs() < 1e-12);

        // Single coefficient at k=1 with unit norm: both norms equal 2.
        let shift = BlockSymbol::scalar_from_pairs(&[(1, c(1.0, 0.0))], 1e-12).unwrap();
        assert!((b_norm(&shift).unwrap() - 2.0).abs() < 1e-14);
        assert!((fl21_norm(&shift).unwrap() - 2.0).abs() < 1e-14);

        assert!((b_norm(&BlockSymbol::identity(1)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn alias_warning_fires_for_slow_tails_and_doubling_clears_it() {
        // 1 / (1 - 0.99 z) has a very slow geometric tail; a small grid and
        // narrow band must refuse, a wide request on a big grid succeeds.
        let sym = BlockSymbol::scalar_from_pairs(&[(0, c(1.0, 0.0)), (1, c(-0.99, 0.0))], 1e-10).unwrap();
        let narrow = invert_symbol(&sym, 64, Band { lo: -31, hi: 31 });
        assert!(matches!(narrow, Err(Error::AliasWarning { .. })));
        let wide = invert_symbol_auto(&sym, DoublingPolicy { max_doublings: 12 });
        assert!(wide.is_ok(), "{wide:?}");
    }
}

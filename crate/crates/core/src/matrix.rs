//! Dense complex matrices and the small set of factorizations the crate
//! needs: LU with partial pivoting (determinants, solves, inverses), a
//! Pade scaling-and-squaring exponential, and a shifted-QR eigensolver
//! used for spectral norms and analyticity-region checks.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
// Required when num-traits resolves with libm alone; shadowed by inherent
// methods when a std-enabled graph unifies features.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense matrix over `C64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data. Entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::SizeMismatch { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// 1x1 matrix holding a single scalar.
    pub fn scalar(value: C64) -> Self {
        Self { rows: 1, cols: 1, data: vec![value] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, factor: C64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::SizeMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Copies `block` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) -> Result<()> {
        if r0 + block.rows > self.rows || c0 + block.cols > self.cols {
            return Err(Error::OutOfRange { index: r0 + block.rows, bound: self.rows });
        }
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
        Ok(())
    }

    /// Extracts the `rows x cols` submatrix anchored at `(r0, c0)`.
    pub fn sub_matrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Self> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::OutOfRange { index: r0 + rows, bound: self.rows });
        }
        Ok(Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum column sum of absolute values.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.cols {
            let mut s = 0.0;
            for i in 0..self.rows {
                s += self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::SizeMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(())
    }

    fn check_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::SizeMismatch { expected: self.rows, got: self.cols });
        }
        Ok(())
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<LuDecomposition> {
        self.check_square()?;
        let n = self.rows;
        let mut lu = self.clone();
        let mut pivots = Vec::with_capacity(n);
        let mut swaps = 0usize;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                swaps += 1;
            }
            pivots.push(p);
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(LuDecomposition { lu, pivots, swaps })
    }

    /// Principal-branch `log det`, imaginary part folded into `(-pi, pi]`.
    pub fn log_det(&self) -> Result<C64> {
        Ok(self.lu()?.log_det())
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        lu.solve(&Self::identity(self.rows))
    }

    /// Matrix exponential via Pade(13) with scaling and squaring.
    pub fn expm(&self) -> Result<Self> {
        self.check_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        const THETA_13: f64 = 5.371920351148152;
        let norm = self.one_norm();
        let mut squarings = 0u32;
        let mut a = self.clone();
        if norm > THETA_13 {
            squarings = (norm / THETA_13).log2().ceil() as u32;
            a = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
        }
        const B: [f64; 14] = [
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ];
        let id = Self::identity(n);
        let a2 = a.mul(&a)?;
        let a4 = a2.mul(&a2)?;
        let a6 = a2.mul(&a4)?;
        let w1 = a6
            .scale(C64::new(B[13], 0.0))
            .add(&a4.scale(C64::new(B[11], 0.0)))?
            .add(&a2.scale(C64::new(B[9], 0.0)))?;
        let w2 = a6
            .scale(C64::new(B[7], 0.0))
            .add(&a4.scale(C64::new(B[5], 0.0)))?
            .add(&a2.scale(C64::new(B[3], 0.0)))?
            .add(&id.scale(C64::new(B[1], 0.0)))?;
        let u = a.mul(&a6.mul(&w1)?.add(&w2)?)?;
        let z1 = a6
            .scale(C64::new(B[12], 0.0))
            .add(&a4.scale(C64::new(B[10], 0.0)))?
            .add(&a2.scale(C64::new(B[8], 0.0)))?;
        let v = a6
            .mul(&z1)?
            .add(&a6.scale(C64::new(B[6], 0.0)))?
            .add(&a4.scale(C64::new(B[4], 0.0)))?
            .add(&a2.scale(C64::new(B[2], 0.0)))?
            .add(&id.scale(C64::new(B[0], 0.0)))?;
        let num = v.add(&u)?;
        let den = v.sub(&u)?;
        let mut result = den.lu()?.solve(&num)?;
        for _ in 0..squarings {
            result = result.mul(&result)?;
        }
        Ok(result)
    }

    /// Evaluates the matrix polynomial `sum_j coeffs[j] A^j` by Horner.
    pub fn horner(&self, coeffs: &[C64]) -> Result<Self> {
        self.check_square()?;
        let n = self.rows;
        match coeffs.last() {
            None => Ok(Self::zeros(n, n)),
            Some(&top) => {
                let mut acc = Self::identity(n).scale(top);
                for &c in coeffs.iter().rev().skip(1) {
                    acc = acc.mul(self)?;
                    for i in 0..n {
                        acc[(i, i)] += c;
                    }
                }
                Ok(acc)
            }
        }
    }

    /// All eigenvalues, in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        self.check_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(Vec::new());
        }
        if n == 1 {
            return Ok(vec![self[(0, 0)]]);
        }
        let mut h = self.clone();
        hessenberg_in_place(&mut h);
        let mut eigs = Vec::with_capacity(n);
        let mut hi = n - 1;
        let mut iters_since_deflation = 0usize;
        let mut total_iters = 0usize;
        let max_total = 80 * n;
        loop {
            // Locate the active block [lo..=hi] by walking up from hi while
            // subdiagonal entries stay significant.
            let mut lo = hi;
            while lo > 0 {
                let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
                let scale = if scale == 0.0 { 1.0 } else { scale };
                if h[(lo, lo - 1)].norm() <= f64::EPSILON * scale {
                    h[(lo, lo - 1)] = ZERO;
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                eigs.push(h[(hi, hi)]);
                if hi == 0 {
                    return Ok(eigs);
                }
                hi -= 1;
                iters_since_deflation = 0;
                continue;
            }
            if total_iters >= max_total {
                return Err(Error::NoConvergence {
                    last_delta: h[(hi, hi - 1)].norm(),
                    truncation: total_iters,
                });
            }
            total_iters += 1;
            iters_since_deflation += 1;
            let sigma = if iters_since_deflation.is_multiple_of(13) {
                // Exceptional shift to break rare cycles.
                h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
            } else {
                wilkinson_shift(&h, hi)
            };
            qr_step(&mut h, lo, hi, sigma);
        }
    }

    /// Largest singular value, computed from the eigenvalues of `A^H A`.
    pub fn spectral_norm(&self) -> Result<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(0.0);
        }
        if self.rows == 1 && self.cols == 1 {
            return Ok(self.data[0].norm());
        }
        let gram = self.adjoint().mul(self)?;
        let eigs = gram.eigenvalues()?;
        let lmax = eigs.iter().map(|l| l.re).fold(0.0f64, f64::max);
        Ok(lmax.max(0.0).sqrt())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Output of [`DenseMatrix::lu`]: packed factors plus the pivot trail.
pub struct LuDecomposition {
    lu: DenseMatrix,
    pivots: Vec<usize>,
    swaps: usize,
}

impl LuDecomposition {
    /// `log det` with the imaginary part folded into `(-pi, pi]`.
    pub fn log_det(&self) -> C64 {
        let n = self.lu.rows();
        let mut re = 0.0f64;
        let mut im = if self.swaps % 2 == 1 { core::f64::consts::PI } else { 0.0 };
        for i in 0..n {
            let d = self.lu[(i, i)];
            re += d.norm().ln();
            im += d.arg();
        }
        let tau = 2.0 * core::f64::consts::PI;
        let mut folded = im % tau;
        if folded > core::f64::consts::PI {
            folded -= tau;
        } else if folded <= -core::f64::consts::PI {
            folded += tau;
        }
        C64::new(re, folded)
    }

    /// Ratio of smallest to largest pivot magnitude; a cheap conditioning probe.
    pub fn rcond_estimate(&self) -> f64 {
        let n = self.lu.rows();
        if n == 0 {
            return 1.0;
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let v = self.lu[(i, i)].norm();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    /// Solves `A X = B` for each column of `B`.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.lu.rows();
        if rhs.rows() != n {
            return Err(Error::SizeMismatch { expected: n, got: rhs.rows() });
        }
        let mut x = rhs.clone();
        // Apply row swaps in elimination order.
        for (k, &p) in self.pivots.iter().enumerate() {
            if p != k {
                for j in 0..x.cols() {
                    let tmp = x[(k, j)];
                    x[(k, j)] = x[(p, j)];
                    x[(p, j)] = tmp;
                }
            }
        }
        // Forward substitution with unit lower factor.
        for i in 1..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l == ZERO {
                    continue;
                }
                for j in 0..x.cols() {
                    let t = x[(k, j)];
                    x[(i, j)] -= l * t;
                }
            }
        }
        // Back substitution.
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u == ZERO {
                    continue;
                }
                for j in 0..x.cols() {
                    let t = x[(k, j)];
                    x[(i, j)] -= u * t;
                }
            }
            let d = self.lu[(i, i)];
            for j in 0..x.cols() {
                x[(i, j)] /= d;
            }
        }
        Ok(x)
    }
}

fn hessenberg_in_place(a: &mut DenseMatrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let mut xnorm2 = 0.0f64;
        for i in k + 1..n {
            xnorm2 += a[(i, k)].norm_sqr();
        }
        let xnorm = xnorm2.sqrt();
        if xnorm <= 1e-300 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v = vec![ZERO; n - k - 1];
        v[0] = x0 - alpha;
        for i in k + 2..n {
            v[i - k - 1] = a[(i, k)];
        }
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= 1e-300 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // Left reflection on rows k+1.. .
        for j in k..n {
            let mut dot = ZERO;
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * a[(k + 1 + i, j)];
            }
            let s = beta * dot;
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, j)] -= s * vi;
            }
        }
        // Right reflection on columns k+1.. .
        for r in 0..n {
            let mut dot = ZERO;
            for (i, vi) in v.iter().enumerate() {
                dot += a[(r, k + 1 + i)] * vi;
            }
            let s = beta * dot;
            for (i, vi) in v.iter().enumerate() {
                a[(r, k + 1 + i)] -= s * vi.conj();
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(h: &DenseMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - C64::new(4.0, 0.0) * det).sqrt();
    let half = C64::new(0.5, 0.0);
    let l1 = (tr + disc) * half;
    let l2 = (tr - disc) * half;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn givens(f: C64, g: C64) -> (f64, C64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, ZERO);
    }
    let fnorm = f.norm();
    if fnorm == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = (fnorm * fnorm + gn * gn).sqrt();
    let c = fnorm / d;
    let s = (f / fnorm) * (g.conj() / d);
    (c, s)
}

/// One explicit shifted QR sweep on the Hessenberg block `[lo..=hi]`.
fn qr_step(h: &mut DenseMatrix, lo: usize, hi: usize, sigma: C64) {
    for i in lo..=hi {
        h[(i, i)] -= sigma;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
        for j in i..=hi {
            let x = h[(i, j)];
            let y = h[(i + 1, j)];
            h[(i, j)] = c * x + s * y;
            h[(i + 1, j)] = -s.conj() * x + c * y;
        }
        rotations.push((c, s));
    }
    for (idx, (c, s)) in rotations.iter().enumerate() {
        let i = lo + idx;
        let last = core::cmp::min(i + 1, hi);
        for r in lo..=last {
            let x = h[(r, i)];
            let y = h[(r, i + 1)];
            h[(r, i)] = *c * x + s.conj() * y;
            h[(r, i + 1)] = -s * x + *c * y;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += sigma;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lu_solves_and_reconstructs() {
        let a = DenseMatrix::new(
            3,
            3,
            vec![
                c(2.0, 1.0),
                c(-1.0, 0.0),
                c(0.5, -0.5),
                c(0.0, 3.0),
                c(1.0, 1.0),
                c(2.0, 0.0),
                c(4.0, 0.0),
                c(0.0, -1.0),
                c(1.0, 2.0),
            ],
        )
        .unwrap();
        let b = DenseMatrix::from_fn(3, 2, |i, j| c((i + 2 * j) as f64, 1.0 - i as f64));
        let x = a.lu().unwrap().solve(&b).unwrap();
        let back = a.mul(&x).unwrap();
        assert!(back.sub(&b).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn log_det_tracks_permutation_sign() {
        let swap = DenseMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        let ld = swap.log_det().unwrap();
        assert!(ld.re.abs() < 1e-14);
        assert!((ld.im.abs() - core::f64::consts::PI).abs() < 1e-14);

        let diag = DenseMatrix::new(2, 2, vec![c(3.0, 0.0), ZERO, ZERO, c(0.5, 0.0)]).unwrap();
        assert!((diag.log_det().unwrap().re - 1.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = DenseMatrix::new(2, 2, vec![ONE, ONE, ONE, ONE]).unwrap();
        assert_eq!(a.lu().err(), Some(Error::SingularMatrix));
    }

    #[test]
    fn inverse_round_trip() {
        let a = DenseMatrix::new(
            2,
            2,
            vec![c(1.0, 2.0), c(0.0, 1.0), c(-1.0, 0.0), c(2.0, -1.0)],
        )
        .unwrap();
        let inv = a.inverse().unwrap();
        let eye = a.mul(&inv).unwrap();
        assert!(eye.sub(&DenseMatrix::identity(2)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn expm_matches_diagonal_and_nilpotent_oracles() {
        let d = DenseMatrix::new(2, 2, vec![c(1.0, 0.5), ZERO, ZERO, c(-0.3, 1.0)]).unwrap();
        let e = d.expm().unwrap();
        assert!((e[(0, 0)] - c(1.0, 0.5).exp()).norm() < 1e-13);
        assert!((e[(1, 1)] - c(-0.3, 1.0).exp()).norm() < 1e-13);
        assert!(e[(0, 1)].norm() < 1e-13);

        let n = DenseMatrix::new(2, 2, vec![ZERO, c(7.0, -2.0), ZERO, ZERO]).unwrap();
        let en = n.expm().unwrap();
        assert!((en[(0, 1)] - c(7.0, -2.0)).norm() < 1e-12);
        assert!((en[(0, 0)] - ONE).norm() < 1e-13);
    }

    #[test]
    fn expm_handles_large_norm_via_squaring() {
        // exp(t J) for J = [[0,1],[-1,0]] is a rotation by t.
        let t = 25.0;
        let j = DenseMatrix::new(2, 2, vec![ZERO, c(t, 0.0), c(-t, 0.0), ZERO]).unwrap();
        let e = j.expm().unwrap();
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-10);
        assert!((e[(0, 1)] - c(t.sin(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn horner_matches_explicit_powers() {
        let a = DenseMatrix::new(2, 2, vec![c(0.3, 0.1), c(1.0, 0.0), c(0.0, -0.2), c(-0.5, 0.4)]).unwrap();
        let coeffs = [c(2.0, 0.0), c(0.0, 1.0), c(-0.7, 0.3)];
        let p = a.horner(&coeffs).unwrap();
        let direct = DenseMatrix::identity(2)
            .scale(coeffs[0])
            .add(&a.scale(coeffs[1]))
            .unwrap()
            .add(&a.mul(&a).unwrap().scale(coeffs[2]))
            .unwrap();
        assert!(p.sub(&direct).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_of_tridiagonal_toeplitz() {
        // diag 1.25, off-diagonals -0.5: eigenvalues 1.25 - cos(k pi / (n+1)).
        let n = 12;
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(1.25, 0.0)
            } else if i.abs_diff(j) == 1 {
                c(-0.5, 0.0)
            } else {
                ZERO
            }
        });
        let mut eigs: Vec<f64> = a.eigenvalues().unwrap().iter().map(|l| l.re).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (k, ev) in eigs.iter().enumerate() {
            let expected = 1.25 - ((k + 1) as f64 * core::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((ev - expected).abs() < 1e-10, "k={k}: {ev} vs {expected}");
        }
    }

    #[test]
    fn eigenvalues_of_rotation_are_imaginary_pair() {
        let a = DenseMatrix::new(2, 2, vec![ZERO, ONE, -ONE, ZERO]).unwrap();
        let mut eigs = a.eigenvalues().unwrap();
        eigs.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((eigs[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((eigs[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_companion_matrix() {
        // Companion of (z - r1)(z - r2)(z - r3) has exactly those roots.
        let roots = [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)];
        let coeffs = [
            -roots[0] * roots[1] * roots[2],
            roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2],
            -(roots[0] + roots[1] + roots[2]),
        ];
        let comp = DenseMatrix::from_fn(3, 3, |i, j| {
            if j == 2 {
                -coeffs[i]
            } else if i == j + 1 {
                ONE
            } else {
                ZERO
            }
        });
        let eigs = comp.eigenvalues().unwrap();
        for r in roots {
            let hit = eigs.iter().any(|l| (l - r).norm() < 1e-10);
            assert!(hit, "missing root {r}");
        }
    }

    #[test]
    fn spectral_norm_of_rank_one() {
        // u v^H has spectral norm |u| |v|.
        let u = [c(1.0, 1.0), c(0.0, -2.0), c(0.5, 0.0)];
        let v = [c(2.0, 0.0), c(0.0, 1.0)];
        let a = DenseMatrix::from_fn(3, 2, |i, j| u[i] * v[j].conj());
        let un: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((a.spectral_norm().unwrap() - un * vn).abs() < 1e-12);
    }

    #[test]
    fn rcond_flags_near_singular() {
        let a = DenseMatrix::new(2, 2, vec![ONE, ONE, ONE, c(1.0 + 1e-13, 0.0)]).unwrap();
        let lu = a.lu().unwrap();
        assert!(lu.rcond_estimate() < 1e-11);
    }
}

//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them on success).
//!
//! The fixtures used throughout:
//! - `B`: (1 - 0.5 z)(1 - 0.5/z), the tridiagonal workhorse;
//! - `C`: exp(0.3 z + 0.2/z), smooth and non-even;
//! - `F`: exp(0.4 z + 0.4/z), smooth and even;
//! - `NONEVEN`: (1 - 0.3 z)(1 - 0.2/z);
//! - a block-diagonal 2x2 symbol diag(B, C) and a coupled 2x2 symbol.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

use szegolab_core::constants::{
    e_m_operator, e_m_scalar_even, e_m_scalar_even_from_beta1, f_toeplitz_constant,
};
use szegolab_core::determinant::{e_constant, jacobi_identity_check, scalar_szego_e};
use szegolab_core::factorization::{
    anti_factorize, matrix_factorize_left, matrix_factorize_left_auto, matrix_factorize_right_auto,
    scalar_factorize, CanonicalFactorization,
};
use szegolab_core::lab::{
    banded_e_check, bef_even_check, bocg_check, f_toeplitz_check, szego_widom_fit, th_noneven_check,
};
use szegolab_core::matrix::DenseMatrix;
use szegolab_core::operators::{toeplitz_finite, FunctionSpec, MVariant};
use szegolab_core::symbol::{
    exp_symbol_auto, g_constant, invert_symbol_auto, log_det_series_auto, Band, BlockSymbol,
    DoublingPolicy,
};
use szegolab_core::C64;

const TAIL: f64 = 1e-13;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn policy() -> DoublingPolicy {
    DoublingPolicy::default()
}

fn fixture_b() -> BlockSymbol {
    BlockSymbol::scalar_from_pairs(&[(-1, c(-0.5, 0.0)), (0, c(1.25, 0.0)), (1, c(-0.5, 0.0))], TAIL)
        .unwrap()
}

fn fixture_c() -> BlockSymbol {
    let exponent =
        BlockSymbol::scalar_from_pairs(&[(-1, c(0.2, 0.0)), (1, c(0.3, 0.0))], TAIL).unwrap();
    exp_symbol_auto(&exponent, policy()).unwrap().symbol
}

fn fixture_f() -> BlockSymbol {
    let exponent =
        BlockSymbol::scalar_from_pairs(&[(-1, c(0.4, 0.0)), (1, c(0.4, 0.0))], TAIL).unwrap();
    exp_symbol_auto(&exponent, policy()).unwrap().symbol
}

fn fixture_noneven() -> BlockSymbol {
    BlockSymbol::scalar_from_pairs(&[(-1, c(-0.2, 0.0)), (0, c(1.06, 0.0)), (1, c(-0.3, 0.0))], TAIL)
        .unwrap()
}

fn fixture_block_diag() -> BlockSymbol {
    let b = fixture_b();
    let c_sym = fixture_c();
    let mut coeffs: BTreeMap<i64, DenseMatrix> = BTreeMap::new();
    let lo = c_sym.min_index().unwrap().min(-1);
    let hi = c_sym.max_index().unwrap().max(1);
    for k in lo..=hi {
        let mut block = DenseMatrix::zeros(2, 2);
        block[(0, 0)] = b.scalar_coeff(k);
        block[(1, 1)] = c_sym.scalar_coeff(k);
        if block.max_abs() > 0.0 {
            coeffs.insert(k, block);
        }
    }
    BlockSymbol::new(2, coeffs, TAIL).unwrap()
}

fn fixture_coupled() -> BlockSymbol {
    let mut coeffs: BTreeMap<i64, DenseMatrix> = BTreeMap::new();
    coeffs.insert(0, DenseMatrix::identity(2));
    coeffs.insert(
        1,
        DenseMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap(),
    );
    coeffs.insert(
        -1,
        DenseMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.2, 0.0), c(0.0, 0.0)]).unwrap(),
    );
    BlockSymbol::new(2, coeffs, TAIL).unwrap()
}

fn rel_err(got: C64, want: C64) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}

#[test]
fn criterion_01_tridiagonal_determinants_match_closed_form() {
    let sym = fixture_b();
    let r: f64 = 0.5;
    let mut worst = 0.0f64;
    for n in 1..=40 {
        let det = toeplitz_finite(&sym, n).lu().unwrap().log_det().exp();
        let want = (1.0 - r.powi(2 * n as i32 + 2)) / (1.0 - r * r);
        worst = worst.max(rel_err(det, c(want, 0.0)));
    }
    assert!(worst < 1e-10, "worst relative error {worst:.3e}");
    println!("[PASS] criterion 1: tridiagonal determinants exact to {worst:.2e} for n=1..40");
}

#[test]
fn criterion_02_constants_and_fit() {
    let sym = fixture_b();
    let g = g_constant(&sym, policy()).unwrap();
    let e = e_constant(&sym, 1e-10, policy()).unwrap().value;
    assert!(rel_err(g, c(1.0, 0.0)) < 1e-8, "G = {g}");
    assert!(rel_err(e, c(4.0 / 3.0, 0.0)) < 1e-8, "E = {e}");
    let fit = szego_widom_fit(&sym, 1, 40, 1e-6, policy()).unwrap();
    let g_gap = rel_err(fit.g_fit, c(1.0, 0.0));
    let e_gap = rel_err(fit.e_fit, c(4.0 / 3.0, 0.0));
    assert!(g_gap < 1e-6, "fitted G off by {g_gap:.3e}");
    assert!(e_gap < 1e-6, "fitted E off by {e_gap:.3e}");
    println!(
        "[PASS] criterion 2: G=1, E=4/3 computed to 1e-8; fit recovers them to {:.2e}/{:.2e}",
        g_gap, e_gap
    );
}

#[test]
fn criterion_03_operator_and_series_e_agree() {
    let mut worst = 0.0f64;
    for sym in [fixture_b(), fixture_c()] {
        let op = e_constant(&sym, 1e-11, policy()).unwrap().value;
        let series = log_det_series_auto(&sym, policy()).unwrap().series;
        let closed = scalar_szego_e(&series).unwrap();
        worst = worst.max(rel_err(op, closed));
    }
    assert!(worst < 1e-8, "worst disagreement {worst:.3e}");
    let e_c = e_constant(&fixture_c(), 1e-11, policy()).unwrap().value;
    let gap = rel_err(e_c, c(0.06f64.exp(), 0.0));
    assert!(gap < 1e-8, "E(C) off exp(0.06) by {gap:.3e}");
    println!(
        "[PASS] criterion 3: operator and series E agree to {worst:.2e}; E(C)=exp(0.06) to {gap:.2e}"
    );
}

#[test]
fn criterion_04_exact_finite_size_identity() {
    let mut worst = 0.0f64;
    for (name, sym) in [
        ("B", fixture_b()),
        ("C", fixture_c()),
        ("diag(B,C)", fixture_block_diag()),
    ] {
        let out = bocg_check(&sym, 1, 10, 1e-8, policy()).unwrap();
        assert!(
            out.report.pass,
            "{name}: max residual {:.3e}, flatness {:?}",
            out.report.max_residual(),
            out.report.flatness
        );
        worst = worst.max(out.report.max_residual());
    }
    for sym in [fixture_b(), fixture_c()] {
        let out = bocg_check(&sym, 15, 15, 1e-8, policy()).unwrap();
        let (_, corr) = out.corrections[0];
        assert!((corr - c(1.0, 0.0)).norm() < 1e-6, "correction at n=15: {corr}");
    }
    println!(
        "[PASS] criterion 4: exact identity flat to {worst:.2e} on B, C, diag(B,C); correction(15) ~ 1"
    );
}

#[test]
fn criterion_05_banded_identity() {
    let sym = fixture_b();
    let report = banded_e_check(&sym, 1, 5, 1e-8, policy()).unwrap();
    assert!(report.pass, "max residual {:.3e}", report.max_residual());
    let inv = invert_symbol_auto(&sym, policy()).unwrap().symbol;
    let t1 = toeplitz_finite(&inv, 1).lu().unwrap().log_det().exp();
    assert!(rel_err(t1, c(4.0 / 3.0, 0.0)) < 1e-10, "det T_1(phi^-1) = {t1}");
    println!(
        "[PASS] criterion 5: banded identity holds for n=1..5 (max residual {:.2e}); det T_1(phi^-1)=4/3",
        report.max_residual()
    );
}

#[test]
fn criterion_06_finite_section_jacobi_identity() {
    let mut rng = StdRng::seed_from_u64(0x5a3e60);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = rng.gen_range(2..=50usize);
        let rank = rng.gen_range(1..=3usize);
        let mut a = DenseMatrix::identity(dim);
        for _ in 0..rank {
            let u: Vec<C64> =
                (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let v: Vec<C64> =
                (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let scale = 0.4 / (nu * nv * rank as f64);
            for i in 0..dim {
                for j in 0..dim {
                    a[(i, j)] += u[i] * v[j].conj() * scale;
                }
            }
        }
        let n = rng.gen_range(1..=dim);
        let res = jacobi_identity_check(&a, n).unwrap();
        worst = worst.max(res);
    }
    assert!(worst < 1e-9, "worst residual {worst:.3e}");
    println!(
        "[PASS] criterion 6: finite-section determinant identity holds to {worst:.2e} over 100 random sections"
    );
}

#[test]
fn criterion_07_compatible_pair_even_identity() {
    let mut worst_row = 0.0f64;
    let mut worst_em = 0.0f64;
    for (name, sym) in [("B", fixture_b()), ("F", fixture_f())] {
        for variant in MVariant::ALL {
            let report = bef_even_check(&sym, variant, 1, 10, 1e-6, policy()).unwrap();
            assert!(
                report.pass,
                "{name} variant {variant}: max residual {:.3e}, flatness {:?}",
                report.max_residual(),
                report.flatness
            );
            worst_row = worst_row.max(report.max_residual());
            // Resolve the odd-sum reading: the operator determinant is the
            // ground truth, and the two closed-form readings differ by
            // exp(+-beta_1) on variants I and II.
            let op = e_m_operator(&sym, variant, 1e-10, policy()).unwrap().value;
            let displayed = e_m_scalar_even(&sym, variant, policy()).unwrap();
            let inclusive = e_m_scalar_even_from_beta1(&sym, variant, policy()).unwrap();
            let inclusive_gap = rel_err(inclusive, op);
            let displayed_gap = rel_err(displayed, op);
            assert!(
                inclusive_gap < 1e-6,
                "{name} variant {variant}: beta_1-inclusive closed form off by {inclusive_gap:.3e} (operator {op})"
            );
            if matches!(variant, MVariant::I | MVariant::II) {
                assert!(
                    displayed_gap > 1e-3,
                    "{name} variant {variant}: both readings match, fixture cannot distinguish them"
                );
            }
            worst_em = worst_em.max(inclusive_gap);
        }
    }
    println!(
        "[PASS] criterion 7: even identity flat to {worst_row:.2e}; the odd sum in the closed-form E_M must start at the first log coefficient (matches the operator to {worst_em:.2e}), the reading that starts at the third does not"
    );
}

#[test]
fn criterion_08_noneven_identity() {
    let sym = fixture_noneven();
    let anti = anti_factorize(&sym, policy()).unwrap();
    assert!(anti.residual < 1e-8, "anti-factorization residual {:.3e}", anti.residual);
    let mut worst = 0.0f64;
    for variant in [MVariant::I, MVariant::IV] {
        let report = th_noneven_check(&sym, variant, 1, 8, 1e-6, policy()).unwrap();
        assert!(
            report.pass,
            "variant {variant}: max residual {:.3e}",
            report.max_residual()
        );
        worst = worst.max(report.max_residual());
    }
    println!(
        "[PASS] criterion 8: non-even identity exact to {worst:.2e} for variants I and IV; anti-factorization residual {:.2e}",
        anti.residual
    );
}

#[test]
fn criterion_09_exp_of_toeplitz() {
    let sym =
        BlockSymbol::scalar_from_pairs(&[(-1, c(0.2, 0.0)), (1, c(0.3, 0.0))], TAIL).unwrap();
    let f = FunctionSpec::exp();
    let report = f_toeplitz_check(&sym, &f, 20, 20, 1e-6, policy()).unwrap();
    let row = report.rows[0];
    let g = g_constant(&fixture_c(), policy()).unwrap();
    let target = c(20.0, 0.0) * g.ln() + c(0.03, 0.0);
    let gap = ((row.lhs_log - target).exp() - c(1.0, 0.0)).norm();
    assert!(gap < 1e-6, "n=20 corner determinant off by {gap:.3e}");
    let c_plus = f_toeplitz_constant(&sym, &f, 1e-9, policy()).unwrap().value;
    let negated = BlockSymbol::scalar_from_pairs(&[(-1, c(-0.2, 0.0)), (1, c(-0.3, 0.0))], TAIL)
        .unwrap();
    let c_minus = f_toeplitz_constant(&negated, &f, 1e-9, policy()).unwrap().value;
    let e = e_constant(&fixture_c(), 1e-10, policy()).unwrap().value;
    let pairing_gap = rel_err(c_plus * c_minus, e);
    assert!(pairing_gap < 1e-6, "pairing identity off by {pairing_gap:.3e}");
    println!(
        "[PASS] criterion 9: exp(T) corner determinant matches exp(0.03) to {gap:.2e} at n=20; constant pairing to {pairing_gap:.2e}"
    );
}

fn assert_canonical(name: &str, fact: &CanonicalFactorization) -> f64 {
    assert!(fact.residual < 1e-8, "{name}: residual {:.3e}", fact.residual);
    assert!(fact.normalized, "{name}: minus factor constant term is not I");
    assert!(
        fact.minus_factor.max_index().unwrap_or(0) <= 0,
        "{name}: minus factor leaks positive indices"
    );
    assert!(
        fact.plus_factor.min_index().unwrap_or(0) >= 0,
        "{name}: plus factor leaks negative indices"
    );
    fact.residual
}

#[test]
fn criterion_10_factorization_quality() {
    let fixtures = [
        ("B", fixture_b()),
        ("C", fixture_c()),
        ("noneven", fixture_noneven()),
        ("coupled", fixture_coupled()),
        ("diag(B,C)", fixture_block_diag()),
    ];
    let mut worst = 0.0f64;
    for (name, sym) in &fixtures {
        let left = matrix_factorize_left_auto(sym, policy()).unwrap();
        worst = worst.max(assert_canonical(name, &left));
        let right = matrix_factorize_right_auto(sym, policy()).unwrap();
        worst = worst.max(assert_canonical(name, &right));
    }
    // Exercise the one-shot matrix solver and the scalar splitter on the
    // same fixture to confirm they land on the same canonical factors.
    let b = fixture_b();
    let direct = matrix_factorize_left(&b, 64, Band::symmetric(64)).unwrap();
    worst = worst.max(assert_canonical("B (one-shot)", &direct));
    let split = scalar_factorize(&b, policy()).unwrap();
    assert!(direct.minus_factor.approx_eq(&split.minus_factor, 1e-9));
    assert!(direct.plus_factor.approx_eq(&split.plus_factor, 1e-9));
    println!(
        "[PASS] criterion 10: factorizations reconstruct all fixtures to {worst:.2e} with canonical supports and normalization"
    );
}

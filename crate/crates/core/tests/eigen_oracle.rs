//! The in-house Jacobi solver against nalgebra's symmetric eigensolver on
//! the kernel matrices the CF certificate builds.

use nalgebra::DMatrix;
use semisd_core::decompose::is_valid_cf;
use semisd_core::linalg::{hermitian_eigenvalues, symmetric_eigenvalues};
use semisd_core::transforms::symmetric_grid;
use semisd_core::{corpus, semistable, Complex64, SemiStableExponent, TransformFn};

fn kernel(g: &TransformFn, grid: &[f64]) -> Vec<Complex64> {
    let mut m = Vec::with_capacity(grid.len() * grid.len());
    for &x in grid {
        for &y in grid {
            m.push(g.at(x - y));
        }
    }
    m
}

fn nalgebra_min_eig(g: &TransformFn, grid: &[f64]) -> f64 {
    let n = grid.len();
    let m = DMatrix::from_fn(n, n, |i, j| g.at(grid[i] - grid[j]).re);
    m.symmetric_eigenvalues().min()
}

#[test]
fn real_kernels_agree_with_nalgebra() {
    let grid = symmetric_grid(5.0, 41);
    let psi = SemiStableExponent::new(1.0, (-1.0f64).exp(), 0.03, 0.0, 1.0).unwrap();
    let cases = [
        corpus::gaussian(1.0),
        corpus::cauchy(1.0),
        semistable::semistable_cf(&psi),
        semistable::scaling_innovation(&psi),
        TransformFn::cf("cos", |s| Complex64::new(s.cos(), 0.0)),
    ];
    for g in &cases {
        let ours = is_valid_cf(g, &grid, 1e-8).unwrap().value;
        let oracle = nalgebra_min_eig(g, &grid);
        assert!((ours - oracle).abs() < 1e-10, "{}: {ours} vs {oracle}", g.label());
    }
}

#[test]
fn full_spectrum_matches() {
    let grid = symmetric_grid(3.0, 25);
    let g = corpus::cauchy(0.7);
    let m: Vec<f64> = kernel(&g, &grid).iter().map(|z| z.re).collect();
    let ours = symmetric_eigenvalues(&m, grid.len());
    let mut theirs: Vec<f64> = DMatrix::from_row_slice(grid.len(), grid.len(), &m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    theirs.sort_by(f64::total_cmp);
    for (a, b) in ours.iter().zip(&theirs) {
        assert!((a - b).abs() < 1e-11, "{a} vs {b}");
    }
}

#[test]
fn hermitian_kernel_matches_real_embedding_oracle() {
    // point mass at 0.8: complex kernel e^{0.8 i (x - y)}, rank one
    let grid = symmetric_grid(5.0, 21);
    let g = corpus::point_mass_cf(0.8);
    let n = grid.len();
    let m = kernel(&g, &grid);
    let ours = hermitian_eigenvalues(&m, n);
    let big = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n) * n + (j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut theirs: Vec<f64> = big.symmetric_eigenvalues().iter().copied().collect();
    theirs.sort_by(f64::total_cmp);
    let theirs: Vec<f64> = theirs.into_iter().step_by(2).collect();
    for (a, b) in ours.iter().zip(&theirs) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
    assert!((ours[n - 1] - n as f64).abs() < 1e-10);
}

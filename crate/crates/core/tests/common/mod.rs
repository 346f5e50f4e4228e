//! Independent reference computations for the integration tests. Nothing here
//! calls the library's solver, FFT or stencil code.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Coordinates of `site` with axis 0 varying fastest.
pub fn coords(site: usize, d: usize, l: usize) -> Vec<usize> {
    let mut c = Vec::with_capacity(d);
    let mut s = site;
    for _ in 0..d {
        c.push(s % l);
        s /= l;
    }
    c
}

pub fn site(c: &[i64], l: usize) -> usize {
    let mut s = 0;
    let mut stride = 1;
    for &x in c {
        s += (x.rem_euclid(l as i64) as usize) * stride;
        stride *= l;
    }
    s
}

pub fn neighbour(x: usize, axis: usize, d: usize, l: usize) -> usize {
    let mut c: Vec<i64> = coords(x, d, l).iter().map(|&v| v as i64).collect();
    c[axis] += 1;
    site(&c, l)
}

/// Lattice Green function of the unit Laplacian by direct Fourier summation:
/// `G(x, y) = L^{-d} sum_{k != 0} cos(2 pi k.(x - y) / L) / sum_i 4 sin^2(pi k_i / L)`.
pub fn dft_green(d: usize, l: usize, x: usize, y: usize) -> f64 {
    let n = l.pow(d as u32);
    let cx = coords(x, d, l);
    let cy = coords(y, d, l);
    let mut s = 0.0;
    for k in 1..n {
        let ck = coords(k, d, l);
        let mut phase = 0.0;
        let mut sym = 0.0;
        for i in 0..d {
            phase += ck[i] as f64 * (cx[i] as f64 - cy[i] as f64);
            sym += 4.0 * (PI * ck[i] as f64 / l as f64).sin().powi(2);
        }
        s += (2.0 * PI * phase / l as f64).cos() / sym;
    }
    s / n as f64
}

pub fn dft_green_column(d: usize, l: usize, y: usize) -> Vec<f64> {
    (0..l.pow(d as u32)).map(|x| dft_green(d, l, x, y)).collect()
}

/// Forward differences `u(x + e_i) - u(x)` at edge index `d x + i`.
pub fn grad(u: &[f64], d: usize, l: usize) -> Vec<f64> {
    let mut g = vec![0.0; u.len() * d];
    for x in 0..u.len() {
        for i in 0..d {
            g[x * d + i] = u[neighbour(x, i, d, l)] - u[x];
        }
    }
    g
}

/// `grad_b [G(., y + e_i) - G(., y)]` for the unit Laplacian.
pub fn dft_mixed_row(d: usize, l: usize, y: usize, i: usize) -> Vec<f64> {
    let g0 = dft_green_column(d, l, y);
    let g1 = dft_green_column(d, l, neighbour(y, i, d, l));
    let diff: Vec<f64> = g1.iter().zip(&g0).map(|(a, b)| a - b).collect();
    grad(&diff, d, l)
}

/// Dense matrix of `u -> grad* a grad u`, assembled edge by edge.
pub fn dense_operator(a: &[f64], d: usize, l: usize) -> Vec<Vec<f64>> {
    let n = l.pow(d as u32);
    let mut m = vec![vec![0.0; n]; n];
    for x in 0..n {
        for i in 0..d {
            let y = neighbour(x, i, d, l);
            let c = a[x * d + i];
            m[x][x] += c;
            m[y][y] += c;
            m[x][y] -= c;
            m[y][x] -= c;
        }
    }
    m
}

/// Solves `m u = f` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut m: Vec<Vec<f64>>, mut f: Vec<f64>) -> Vec<f64> {
    let n = f.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        f.swap(c, p);
        for r in (c + 1)..n {
            let factor = m[r][c] / m[c][c];
            if factor != 0.0 {
                for k in c..n {
                    m[r][k] -= factor * m[c][k];
                }
                f[r] -= factor * f[c];
            }
        }
    }
    let mut u = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|k| m[r][k] * u[k]).sum();
        u[r] = (f[r] - s) / m[r][r];
    }
    u
}

/// Mean-free solution of `grad* a grad u = f` for mean-free `f`, via the
/// regularized system `(M + 1 1^T / n) u = f`.
pub fn dense_meanfree_solve(a: &[f64], d: usize, l: usize, f: &[f64]) -> Vec<f64> {
    let mut m = dense_operator(a, d, l);
    let n = f.len();
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v += 1.0 / n as f64;
        }
    }
    gauss_solve(m, f.to_vec())
}

/// Corrector by dense solve, pinned to zero at the origin.
pub fn dense_corrector(a: &[f64], d: usize, l: usize, xi: &[f64]) -> Vec<f64> {
    let n = l.pow(d as u32);
    // f = -grad* (a xi) = sum_i a([x,x+e_i]) xi_i - a([x-e_i,x]) xi_i
    let mut f = vec![0.0; n];
    for x in 0..n {
        for i in 0..d {
            let y = neighbour(x, i, d, l);
            let flux = a[x * d + i] * xi[i];
            f[x] += flux;
            f[y] -= flux;
        }
    }
    let mut u = dense_meanfree_solve(a, d, l, &f);
    let u0 = u[0];
    u.iter_mut().for_each(|v| *v -= u0);
    u
}

pub fn harmonic_mean(v: &[f64]) -> f64 {
    v.len() as f64 / v.iter().map(|x| 1.0 / x).sum::<f64>()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

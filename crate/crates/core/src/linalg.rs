//! Small dense linear algebra on 3-vectors and 3×3 matrices.
//!
//! The eigensolver works from the characteristic polynomial: roots come from
//! the trigonometric or Cardano form and are polished by Newton steps, and
//! eigenvectors are cross products of rows of `J - λI`.

use core::f64::consts::PI;

use libm::{acos, cbrt, cos, sqrt};
use num_complex::Complex64;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];
pub type CVec3 = [Complex64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    sqrt(dot(a, a))
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn distance(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b))
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Sum of the three principal 2×2 minors.
pub fn principal_minor_sum(m: &Mat3) -> f64 {
    (m[0][0] * m[1][1] - m[0][1] * m[1][0])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
}

/// Coefficients `(a, b, c)` of the monic characteristic polynomial
/// `λ³ + aλ² + bλ + c`.
pub fn char_poly(m: &Mat3) -> [f64; 3] {
    [-trace(m), principal_minor_sum(m), -det(m)]
}

/// Discriminant of the monic cubic with coefficients `(a, b, c)`.
/// Positive for three distinct real roots, negative for a complex pair.
pub fn cubic_discriminant([a, b, c]: [f64; 3]) -> f64 {
    18.0 * a * b * c - 4.0 * a * a * a * c + a * a * b * b - 4.0 * b * b * b - 27.0 * c * c
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes relative to the matrix scale.
pub fn solve(m: &Mat3, rhs: &Vec3) -> Option<Vec3> {
    let mut a = *m;
    let mut b = *rhs;
    let scale = a.iter().flat_map(|r| r.iter()).fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        if a[pivot][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Orthonormalises the columns of `frame` in place (two passes of modified
/// Gram–Schmidt) and returns the diagonal of the triangular factor.
pub fn gram_schmidt(frame: &mut [Vec3; 3]) -> [f64; 3] {
    let mut r = [0.0; 3];
    for j in 0..3 {
        for _pass in 0..2 {
            for i in 0..j {
                let p = dot(&frame[i], &frame[j]);
                frame[j] = sub(&frame[j], &scale(&frame[i], p));
            }
        }
        let n = norm(&frame[j]);
        r[j] = n;
        if n > 0.0 {
            frame[j] = scale(&frame[j], 1.0 / n);
        }
    }
    r
}

fn eval_cubic([a, b, c]: [f64; 3], x: f64) -> (f64, f64) {
    let p = ((x + a) * x + b) * x + c;
    let dp = (3.0 * x + 2.0 * a) * x + b;
    (p, dp)
}

fn eval_cubic_c([a, b, c]: [f64; 3], z: Complex64) -> (Complex64, Complex64) {
    let p = ((z + a) * z + b) * z + c;
    let dp = (z * 3.0 + 2.0 * a) * z + b;
    (p, dp)
}

fn polish_real(coeffs: [f64; 3], mut x: f64) -> f64 {
    let (mut p, _) = eval_cubic(coeffs, x);
    for _ in 0..8 {
        let (_, dp) = eval_cubic(coeffs, x);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let cand = x - p / dp;
        let (pc, _) = eval_cubic(coeffs, cand);
        if pc.abs() < p.abs() {
            x = cand;
            p = pc;
        } else {
            break;
        }
    }
    x
}

fn polish_complex(coeffs: [f64; 3], mut z: Complex64) -> Complex64 {
    let (mut p, _) = eval_cubic_c(coeffs, z);
    for _ in 0..8 {
        let (_, dp) = eval_cubic_c(coeffs, z);
        if cabs(dp) == 0.0 || cabs(p) == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = eval_cubic_c(coeffs, cand);
        if cabs(pc) < cabs(p) {
            z = cand;
            p = pc;
        } else {
            break;
        }
    }
    z
}

/// Roots of `λ³ + aλ² + bλ + c`, complex pairs exactly conjugate.
pub fn cubic_roots(coeffs: [f64; 3]) -> [Complex64; 3] {
    let [a, b, c] = coeffs;
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let delta = half_q * half_q + third_p * third_p * third_p;

    if p == 0.0 && q == 0.0 {
        let r = Complex64::new(-shift, 0.0);
        return [r, r, r];
    }

    if delta <= 0.0 {
        // three real roots
        let m = 2.0 * sqrt(-third_p);
        let arg = (3.0 * q / (2.0 * p) * sqrt(-3.0 / p)).clamp(-1.0, 1.0);
        let phi = acos(arg) / 3.0;
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let t = m * cos(phi - 2.0 * PI * k as f64 / 3.0);
            *slot = Complex64::new(polish_real(coeffs, t - shift), 0.0);
        }
        out
    } else {
        let sq = sqrt(delta);
        let u = cbrt(-half_q - if half_q >= 0.0 { sq } else { -sq });
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        let r = polish_real(coeffs, t - shift);
        // remaining quadratic λ² + bb λ + cc
        let bb = a + r;
        let cc = if r.abs() > 1e-8 { -c / r } else { b + r * bb };
        let disc = bb * bb / 4.0 - cc;
        if disc >= 0.0 {
            let s = sqrt(disc);
            let big = -bb / 2.0 - if bb >= 0.0 { s } else { -s };
            let small = if big != 0.0 { cc / big } else { 0.0 };
            [
                Complex64::new(r, 0.0),
                Complex64::new(polish_real(coeffs, big), 0.0),
                Complex64::new(polish_real(coeffs, small), 0.0),
            ]
        } else {
            let z = polish_complex(coeffs, Complex64::new(-bb / 2.0, sqrt(-disc)));
            let z = Complex64::new(z.re, z.im.abs());
            [Complex64::new(r, 0.0), z, z.conj()]
        }
    }
}

/// Roots of the characteristic polynomial of `[[a, b], [c, d]]`.
fn eigenvalues2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let half_tr = 0.5 * (a + d);
    let h = 0.5 * (a - d);
    let disc = h * h + b * c;
    if disc >= 0.0 {
        let s = sqrt(disc);
        let big = half_tr + if half_tr >= 0.0 { s } else { -s };
        let det = a * d - b * c;
        let small = if big != 0.0 { det / big } else { half_tr - s };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let w = sqrt(-disc);
        [Complex64::new(half_tr, w), Complex64::new(half_tr, -w)]
    }
}

/// Eigenvalues of a real 3×3 matrix. A row or column with vanishing
/// off-diagonal entries is split off first, so block-triangular matrices
/// keep exact diagonal eigenvalues even when they repeat.
pub fn eigenvalues(m: &Mat3) -> [Complex64; 3] {
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let row = m[i][j] == 0.0 && m[i][k] == 0.0;
        let col = m[j][i] == 0.0 && m[k][i] == 0.0;
        if row || col {
            let [p, q] = eigenvalues2(m[j][j], m[j][k], m[k][j], m[k][k]);
            return [Complex64::new(m[i][i], 0.0), p, q];
        }
    }
    cubic_roots(char_poly(m))
}

/// Orders eigenvalues by descending real part, ties by ascending imaginary part.
pub fn eigen_order(a: &Complex64, b: &Complex64) -> core::cmp::Ordering {
    b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im))
}

/// Modulus of a complex number.
pub fn cabs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

fn cnorm(v: &CVec3) -> f64 {
    sqrt(v.iter().map(|c| c.norm_sqr()).sum())
}

fn ccross(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn cscale(v: &CVec3, s: Complex64) -> CVec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

/// Unit norm, largest component rotated onto the positive real axis.
fn canonical(v: CVec3) -> CVec3 {
    let n = cnorm(&v);
    if n == 0.0 {
        return v;
    }
    let lead = v.iter().copied().max_by(|a, b| cabs(*a).total_cmp(&cabs(*b))).unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / cabs(lead);
    cscale(&v, phase / n)
}

/// Null vectors of `J - λI`, as many as the numerical rank deficiency allows
/// (at most `want`).
fn null_vectors(m: &Mat3, lambda: Complex64, want: usize) -> alloc::vec::Vec<CVec3> {
    use alloc::vec::Vec;
    let rows: [CVec3; 3] = core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let d = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
            Complex64::new(m[i][j], 0.0) - d
        })
    });
    let scale = rows.iter().map(cnorm).fold(0.0_f64, f64::max).max(1e-300);

    let pairs = [(0, 1), (0, 2), (1, 2)];
    let best = pairs
        .iter()
        .map(|&(i, j)| ccross(&rows[i], &rows[j]))
        .max_by(|a, b| cnorm(a).total_cmp(&cnorm(b)))
        .unwrap_or([Complex64::new(0.0, 0.0); 3]);

    let mut out = Vec::new();
    if want <= 1 && cnorm(&best) > 1e-10 * scale * scale {
        out.push(canonical(best));
        return out;
    }

    // rank ≤ 1: vectors orthogonal (bilinearly) to the dominant row
    let lead =
        rows.iter().copied().max_by(|a, b| cnorm(a).total_cmp(&cnorm(b))).unwrap_or([Complex64::new(0.0, 0.0); 3]);
    if cnorm(&lead) <= 1e-10 * scale.max(1.0) {
        for k in 0..want.min(3) {
            let mut e = [Complex64::new(0.0, 0.0); 3];
            e[k] = Complex64::new(1.0, 0.0);
            out.push(e);
        }
        return out;
    }
    let mut cands: Vec<CVec3> = (0..3)
        .map(|k| {
            let mut e = [Complex64::new(0.0, 0.0); 3];
            e[k] = Complex64::new(1.0, 0.0);
            ccross(&lead, &e)
        })
        .collect();
    cands.sort_by(|a, b| cnorm(b).total_cmp(&cnorm(a)));
    let first = canonical(cands[0]);
    out.push(first);
    if want >= 2 {
        // Hermitian Gram–Schmidt of the runner-up against the first
        let second = cands[1];
        let proj: Complex64 = first.iter().zip(second.iter()).map(|(f, s)| f.conj() * s).sum();
        let resid: CVec3 = core::array::from_fn(|i| second[i] - first[i] * proj);
        if cnorm(&resid) > 1e-12 {
            out.push(canonical(resid));
        } else {
            out.push(first);
        }
    }
    out
}

/// Eigenvalues and unit eigenvectors of a real 3×3 matrix, sorted by
/// descending real part (ties by ascending imaginary part).
pub fn eigen_decomposition(m: &Mat3) -> ([Complex64; 3], [CVec3; 3]) {
    let mut values = eigenvalues(m);
    values.sort_by(eigen_order);

    let scale = values.iter().map(|v| cabs(*v)).fold(1.0_f64, f64::max);
    let mut vectors = [[Complex64::new(0.0, 0.0); 3]; 3];
    let mut i = 0;
    while i < 3 {
        // group numerically repeated eigenvalues
        let mut j = i + 1;
        while j < 3 && cabs(values[j] - values[i]) <= 1e-9 * scale {
            j += 1;
        }
        let vs = null_vectors(m, values[i], j - i);
        for (k, slot) in vectors[i..j].iter_mut().enumerate() {
            *slot = vs[k.min(vs.len() - 1)];
        }
        i = j;
    }
    // exact conjugate symmetry for complex pairs
    for k in 0..2 {
        if values[k].im != 0.0 && values[k + 1] == values[k].conj() {
            vectors[k + 1] = core::array::from_fn(|c| vectors[k][c].conj());
        }
    }
    (values, vectors)
}

/// `‖M v − λ v‖ / ‖v‖`.
pub fn eigen_residual(m: &Mat3, lambda: Complex64, v: &CVec3) -> f64 {
    let mv: CVec3 =
        core::array::from_fn(|i| (0..3).map(|j| v[j] * m[i][j]).fold(Complex64::new(0.0, 0.0), |a, b| a + b));
    let r: CVec3 = core::array::from_fn(|i| mv[i] - v[i] * lambda);
    cnorm(&r) / cnorm(v).max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        cabs(a - b) <= tol
    }

    #[test]
    fn diagonal_matrix_sorted_descending() {
        let m = [[-10.0, 0.0, 0.0], [0.0, 27.0, 0.0], [0.0, 0.0, 12.0]];
        let (vals, vecs) = eigen_decomposition(&m);
        assert!(close(vals[0], Complex64::new(27.0, 0.0), 1e-12));
        assert!(close(vals[1], Complex64::new(12.0, 0.0), 1e-12));
        assert!(close(vals[2], Complex64::new(-10.0, 0.0), 1e-12));
        for k in 0..3 {
            assert!(eigen_residual(&m, vals[k], &vecs[k]) < 1e-12);
        }
    }

    #[test]
    fn repeated_semisimple_eigenvalue_gets_two_independent_vectors() {
        let m = [[6.0, 0.0, 0.0], [0.0, 6.0, 0.0], [0.0, 0.0, 31.0]];
        let (vals, vecs) = eigen_decomposition(&m);
        assert!(close(vals[1], Complex64::new(6.0, 0.0), 1e-12));
        assert!(close(vals[2], Complex64::new(6.0, 0.0), 1e-12));
        let overlap: Complex64 = vecs[1].iter().zip(vecs[2].iter()).map(|(a, b)| a.conj() * b).sum();
        assert!(cabs(overlap) < 1e-12);
        for k in 0..3 {
            assert!(eigen_residual(&m, vals[k], &vecs[k]) < 1e-12);
        }
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let m = [[-1.0, -3.0, 0.0], [3.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        let (vals, vecs) = eigen_decomposition(&m);
        assert!(close(vals[0], Complex64::new(2.0, 0.0), 1e-12));
        assert!(close(vals[1], Complex64::new(-1.0, -3.0), 1e-12));
        assert!(close(vals[2], Complex64::new(-1.0, 3.0), 1e-12));
        for k in 0..3 {
            assert!(eigen_residual(&m, vals[k], &vecs[k]) < 1e-12);
        }
    }

    #[test]
    fn solve_recovers_known_solution() {
        let m = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [1.0, -2.0, 0.5];
        let b = mat_vec(&m, &x);
        let got = solve(&m, &b).unwrap();
        assert!(distance(&got, &x) < 1e-14);
        assert!(solve(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]], &b).is_none());
    }

    #[test]
    fn gram_schmidt_orthonormalises() {
        let mut f = [[1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];
        let r = gram_schmidt(&mut f);
        assert!(r.iter().all(|v| *v > 0.0));
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&f[i], &f[j]) - expect).abs() < 1e-14);
            }
        }
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn eigenpairs_satisfy_residual_bound(
            e in proptest::array::uniform9(-20.0f64..20.0)
        ) {
            let m = [[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]];
            let (vals, vecs) = eigen_decomposition(&m);
            let s = vals.iter().map(|v| cabs(*v)).fold(1.0, f64::max);
            for k in 0..3 {
                prop_assert!(eigen_residual(&m, vals[k], &vecs[k]) <= 1e-8 * s);
            }
            let sum: Complex64 = vals.iter().sum();
            prop_assert!((sum.re - trace(&m)).abs() < 1e-9 * s);
        }
    }
}

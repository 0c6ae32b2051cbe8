//! Closed-form eigenvalues of real 3x3 matrices via the cubic resolvent.
//!
//! The Jacobians of the replicator system are fixed 3x3 matrices, so the
//! characteristic cubic is solved directly: the trigonometric branch covers
//! three real roots, Cardano's formula the one-real/complex-pair case. Roots
//! get a guarded Newton polish to tighten residuals.

use num_complex::Complex64;

/// Eigenvalues of a real 3x3 matrix, sorted by descending real part with
/// ties broken by descending imaginary part.
pub fn eigenvalues_3x3(m: &[[f64; 3]; 3]) -> [Complex64; 3] {
    // Characteristic polynomial: lambda^3 + a lambda^2 + b lambda + c.
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minor_sum = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        + m[0][0] * m[2][2]
        - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);

    let a = -tr;
    let b = minor_sum;
    let c = -det;

    let mut roots = solve_cubic(a, b, c);
    for root in &mut roots {
        *root = polish_root(*root, a, b, c);
    }
    // Conjugate-pair symmetry can be lost by the polish; restore it so the
    // pair sorts deterministically.
    if roots.iter().any(|r| r.im != 0.0) {
        let (pair, real): (Vec<Complex64>, Vec<Complex64>) =
            roots.iter().partition(|r| r.im != 0.0);
        if pair.len() == 2 {
            let re = 0.5 * (pair[0].re + pair[1].re);
            let im = 0.5 * (pair[0].im.abs() + pair[1].im.abs());
            roots = [Complex64::new(re, im), Complex64::new(re, -im), real[0]];
        }
    }
    roots.sort_by(|p, q| {
        q.re.partial_cmp(&p.re)
            .unwrap()
            .then(q.im.partial_cmp(&p.im).unwrap())
    });
    roots
}

/// Roots of `t^3 + a t^2 + b t + c` with real coefficients.
fn solve_cubic(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    // Depressed form t = s - a/3: s^3 + p s + q.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;

    let discriminant = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);

    if discriminant > 0.0 {
        // One real root and a complex-conjugate pair (Cardano).
        let sq = discriminant.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        let real = u + v + shift;
        let re = -(u + v) / 2.0 + shift;
        let im = (u - v) * 3.0_f64.sqrt() / 2.0;
        [
            Complex64::new(real, 0.0),
            Complex64::new(re, im.abs()),
            Complex64::new(re, -im.abs()),
        ]
    } else {
        // Three real roots (trigonometric branch). p <= 0 here.
        let rad = (-p / 3.0).sqrt();
        if rad < 1e-300 {
            // Triple root.
            return [Complex64::new(shift, 0.0); 3];
        }
        let cos_arg = (-q / (2.0 * rad * rad * rad)).clamp(-1.0, 1.0);
        let theta = cos_arg.acos();
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let angle = (theta + 2.0 * std::f64::consts::PI * k as f64) / 3.0;
            *slot = Complex64::new(2.0 * rad * angle.cos() + shift, 0.0);
        }
        out
    }
}

/// Up to two Newton steps on the characteristic polynomial, kept only while
/// they shrink the residual; skipped near multiple roots.
fn polish_root(root: Complex64, a: f64, b: f64, c: f64) -> Complex64 {
    let eval = |z: Complex64| ((z + a) * z + b) * z + c;
    let deriv = |z: Complex64| (3.0 * z + 2.0 * a) * z + b;
    let mut z = root;
    let mut residual = eval(z).norm();
    for _ in 0..2 {
        let d = deriv(z);
        if d.norm() < 1e-12 * (1.0 + z.norm()) {
            break;
        }
        let candidate = z - eval(z) / d;
        let candidate_residual = eval(candidate).norm();
        if candidate_residual < residual {
            z = candidate;
            residual = candidate_residual;
        } else {
            break;
        }
    }
    z
}

/// Solves `A x = rhs` for a 3x3 system by Gaussian elimination with partial
/// pivoting; `None` when the matrix is numerically singular.
pub(crate) fn solve_linear_3x3(a: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = rhs[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        let pivot_row = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let factor = row[col] / pivot_row[col];
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * src;
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut acc = m[i][3];
        for k in i + 1..3 {
            acc -= m[i][k] * x[k];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}

/// Determinant of `M - lambda I` in complex arithmetic; the residual used to
/// validate returned eigenvalues.
#[allow(dead_code)]
pub(crate) fn char_poly_residual(m: &[[f64; 3]; 3], lambda: Complex64) -> f64 {
    let e = |i: usize, j: usize| {
        let diag = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
        Complex64::new(m[i][j], 0.0) - diag
    };
    let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    det.norm()
}

/// Max-row-sum norm, the scale used in residual bounds.
#[allow(dead_code)]
pub(crate) fn matrix_norm(m: &[[f64; 3]; 3]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

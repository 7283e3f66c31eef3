//! Orthonormal polynomial bases on the reference interval and triangle.
//!
//! The interval basis is the L2-normalized Legendre family. The triangle
//! basis is the orthonormalized Koornwinder-Dubiner family on the bi-unit
//! right triangle, evaluated through collapsed coordinates. Both are
//! orthonormal with respect to the unweighted L2 inner product on their
//! reference element.

/// Gamma function at nonnegative integer argument (i.e. `(n-1)!`).
fn gamma_int(n: usize) -> f64 {
    (1..n).map(|i| i as f64).product::<f64>().max(1.0)
}

/// Orthonormal Jacobi polynomial `J_n^{(alpha, beta)}(x)` for integer
/// `alpha`, `beta`; normalized so that
/// `int_{-1}^{1} (1-x)^a (1+x)^b J_m J_n dx = delta_mn`.
pub fn jacobi_orthonormal(n: usize, alpha: usize, beta: usize) -> impl Fn(f64) -> f64 {
    let a = alpha as f64;
    let b = beta as f64;
    move |x: f64| {
        let gamma0 = 2f64.powf(a + b + 1.0) / (a + b + 1.0) * gamma_int(alpha + 1)
            * gamma_int(beta + 1)
            / gamma_int(alpha + beta + 1);
        let p0 = 1.0 / gamma0.sqrt();
        if n == 0 {
            return p0;
        }
        let gamma1 = (a + 1.0) * (b + 1.0) / (a + b + 3.0) * gamma0;
        let p1 = ((a + b + 2.0) * x / 2.0 + (a - b) / 2.0) / gamma1.sqrt();
        if n == 1 {
            return p1;
        }
        let mut aold = 2.0 / (2.0 + a + b) * ((a + 1.0) * (b + 1.0) / (a + b + 3.0)).sqrt();
        let mut pm1 = p0;
        let mut p = p1;
        for i in 1..n {
            let h1 = 2.0 * i as f64 + a + b;
            let anew = 2.0 / (h1 + 2.0)
                * ((i as f64 + 1.0) * (i as f64 + 1.0 + a + b) * (i as f64 + 1.0 + a)
                    * (i as f64 + 1.0 + b)
                    / ((h1 + 1.0) * (h1 + 3.0)))
                    .sqrt();
            let bnew = -(a * a - b * b) / (h1 * (h1 + 2.0));
            let pnew = ((x - bnew) * p - aold * pm1) / anew;
            aold = anew;
            pm1 = p;
            p = pnew;
        }
        p
    }
}

fn jacobi(x: f64, n: usize, alpha: usize, beta: usize) -> f64 {
    jacobi_orthonormal(n, alpha, beta)(x)
}

/// Derivative of the orthonormal Jacobi polynomial.
fn jacobi_grad(x: f64, n: usize, alpha: usize, beta: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        let a = alpha as f64;
        let b = beta as f64;
        (n as f64 * (n as f64 + a + b + 1.0)).sqrt() * jacobi(x, n - 1, alpha + 1, beta + 1)
    }
}

/// L2-normalized Legendre polynomial on `[-1, 1]`.
pub fn legendre_normalized(x: f64, n: usize) -> f64 {
    jacobi(x, n, 0, 0)
}

/// Derivative of the normalized Legendre polynomial.
pub fn legendre_normalized_grad(x: f64, n: usize) -> f64 {
    jacobi_grad(x, n, 0, 0)
}

/// Map triangle coordinates to collapsed coordinates `(a, b)` with
/// `a = 2 (1+x)/(1-y) - 1`, `b = y`. At the degenerate vertex `y = 1` we
/// take the limit along the left edge, `a = -1`.
fn collapsed(x: f64, y: f64) -> (f64, f64) {
    if (1.0 - y).abs() < 1e-14 {
        (-1.0, y)
    } else {
        (2.0 * (1.0 + x) / (1.0 - y) - 1.0, y)
    }
}

/// Orthonormal Koornwinder-Dubiner mode `(i, m)` at `(x, y)` on the bi-unit
/// triangle: `sqrt(2) P_i(a) J_m^{(2i+1,0)}(b) (1-b)^i`.
pub fn dubiner(x: f64, y: f64, i: usize, m: usize) -> f64 {
    let (a, b) = collapsed(x, y);
    let pa = jacobi(a, i, 0, 0);
    let gb = jacobi(b, m, 2 * i + 1, 0);
    2f64.sqrt() * pa * gb * (1.0 - b).powi(i as i32)
}

/// Gradient `(d/dx, d/dy)` of the Dubiner mode `(i, m)` at `(x, y)`.
///
/// The collapsed-coordinate chain rule produces a factor `(1-b)^(i-1)`,
/// which is polynomial for `i >= 1`; the `i = 0` modes have no `a`
/// dependence so the singular factor never appears.
pub fn dubiner_grad(x: f64, y: f64, i: usize, m: usize) -> (f64, f64) {
    let (a, b) = collapsed(x, y);
    let s2 = 2f64.sqrt();
    let pa = jacobi(a, i, 0, 0);
    let dpa = jacobi_grad(a, i, 0, 0);
    let gb = jacobi(b, m, 2 * i + 1, 0);
    let dgb = jacobi_grad(b, m, 2 * i + 1, 0);
    if i == 0 {
        return (0.0, s2 * pa * dgb);
    }
    let omb_im1 = (1.0 - b).powi(i as i32 - 1);
    let omb_i = omb_im1 * (1.0 - b);
    let dx = s2 * 2.0 * dpa * gb * omb_im1;
    let dy = s2
        * (dpa * (1.0 + a) * gb * omb_im1 + pa * (dgb * omb_i - i as f64 * gb * omb_im1));
    (dx, dy)
}

/// Modes of the degree-`N` triangle basis in a fixed order.
pub fn triangle_modes(n: usize) -> Vec<(usize, usize)> {
    let mut modes = Vec::new();
    for i in 0..=n {
        for m in 0..=(n - i) {
            modes.push((i, m));
        }
    }
    modes
}

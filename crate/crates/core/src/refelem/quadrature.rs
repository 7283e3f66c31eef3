//! Quadrature rules on the reference interval and reference triangle.
//!
//! Interval rules (Gauss-Legendre, Gauss-Legendre-Lobatto) are computed by
//! Newton iteration on the Legendre recurrences. Triangle rules up to
//! exactness degree 9 are embedded symmetric positive-weight rules; degrees
//! 10-12 fall back to a symmetrized collapsed-coordinate product rule, which
//! keeps every weight positive at the cost of extra points.

use crate::error::{Error, Result};

/// A quadrature rule on a reference domain.
///
/// Points are stored as `[x, y]`; 1D rules use only the first coordinate.
/// Weights carry reference-measure units, so they sum to the measure of the
/// reference domain (2 for the interval, 2 for the bi-unit right triangle).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evaluate the Legendre polynomial `P_n` and its derivative at `x`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // derivative from the standard relation (1-x^2) P_n' = n (P_{n-1} - x P_n)
    let dp = if x.abs() < 1.0 {
        n as f64 * (p0 - x * p1) / (1.0 - x * x)
    } else {
        // endpoint limit, only used for safety
        let nf = n as f64;
        x.powi(n as i32 + 1) * nf * (nf + 1.0) / 2.0
    };
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`, exact for degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "gauss_legendre requires at least one point".into(),
        ));
    }
    let mut pts = vec![0.0f64; n];
    let mut wts = vec![0.0f64; n];
    let m = n / 2;
    for i in 0..m {
        // Tricomi-style initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..50 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        pts[i] = -x.abs();
        pts[n - 1 - i] = x.abs();
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        wts[i] = w;
        wts[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        pts[m] = 0.0;
        let (_, dp) = legendre_pair(n, 0.0);
        wts[m] = 2.0 / (dp * dp);
    }
    Ok(QuadratureRule {
        dim: 1,
        points: pts.iter().map(|&x| [x, 0.0]).collect(),
        weights: wts,
        exactness_degree: 2 * n - 1,
    })
}

/// `n`-point Gauss-Legendre-Lobatto rule on `[-1, 1]`, exact for degree
/// `2n - 3`. Includes both endpoints.
pub fn gauss_lobatto(n: usize) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "gauss_lobatto requires at least two points".into(),
        ));
    }
    let m = n - 1; // interior nodes are roots of P_m'
    let mut pts = vec![0.0f64; n];
    pts[0] = -1.0;
    pts[n - 1] = 1.0;
    for i in 1..n - 1 {
        // Chebyshev-Lobatto initial guess; Newton on P_m'
        let mut x = (std::f64::consts::PI * (m - i) as f64 / m as f64).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_pair(m, x);
            // Legendre ODE: (1-x^2) P_m'' = 2 x P_m' - m(m+1) P_m
            let ddp = (2.0 * x * dp - (m * (m + 1)) as f64 * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        pts[i] = x;
    }
    // symmetrize
    for i in 0..n / 2 {
        let a = 0.5 * (pts[n - 1 - i] - pts[i]);
        pts[i] = -a;
        pts[n - 1 - i] = a;
    }
    if n % 2 == 1 {
        pts[n / 2] = 0.0;
    }
    let scale = 2.0 / (n as f64 * (n as f64 - 1.0));
    let wts: Vec<f64> = pts
        .iter()
        .map(|&x| {
            let (p, _) = legendre_pair(m, x);
            scale / (p * p)
        })
        .collect();
    Ok(QuadratureRule {
        dim: 1,
        points: pts.iter().map(|&x| [x, 0.0]).collect(),
        weights: wts,
        exactness_degree: 2 * n - 3,
    })
}

/// `n`-point Gauss-Jacobi rule for the weight `(1-x)^alpha` on `[-1, 1]`
/// via Golub-Welsch. Used to build collapsed-coordinate triangle rules.
fn gauss_jacobi(n: usize, alpha: f64) -> Vec<(f64, f64)> {
    use nalgebra::DMatrix;
    let beta = 0.0f64;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    let mut diag = (beta - alpha) / (2.0 + alpha + beta);
    for k in 0..n - 1 {
        let kp1 = (k + 1) as f64;
        let den = 2.0 * kp1 + alpha + beta;
        let off = 2.0 / den
            * (kp1 * (kp1 + alpha) * (kp1 + beta) * (kp1 + alpha + beta)
                / ((den + 1.0) * (den - 1.0)))
                .sqrt();
        jm[(k, k)] = diag;
        jm[(k, k + 1)] = off;
        jm[(k + 1, k)] = off;
        diag = (beta * beta - alpha * alpha) / (den * (den + 2.0));
    }
    jm[(n - 1, n - 1)] = diag;
    let eig = jm.symmetric_eigen();
    // mu0 = integral of (1-x)^alpha over [-1,1]
    let mu0 = 2f64.powf(alpha + 1.0) / (alpha + 1.0);
    let mut nw: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = eig.eigenvalues[j];
            let v = eig.eigenvectors[(0, j)];
            (x, mu0 * v * v)
        })
        .collect();
    nw.sort_by(|a, b| a.0.total_cmp(&b.0));
    nw
}

// Symmetric positive-weight rules on the bi-unit reference triangle with
// vertices (-1,-1), (1,-1), (-1,1). Columns: x, y, weight; weights sum to 2.
// Solved to 50-digit precision from the classical orbit structures.

const TRI_RULE_DEG1: [[f64; 3]; 1] = [[-1.0 / 3.0, -1.0 / 3.0, 2.0]];

const TRI_RULE_DEG2: [[f64; 3]; 3] = [
    [-2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0],
    [1.0 / 3.0, -2.0 / 3.0, 2.0 / 3.0],
    [-2.0 / 3.0, -2.0 / 3.0, 2.0 / 3.0],
];

const TRI_RULE_DEG4: [[f64; 3]; 6] = [
    [-0.10810301816807023, -0.78379396366385955, 0.44676317935602293],
    [-0.78379396366385955, -0.10810301816807023, 0.44676317935602293],
    [-0.10810301816807023, -0.10810301816807023, 0.44676317935602293],
    [-0.81684757298045851, 0.63369514596091703, 0.21990348731064374],
    [0.63369514596091703, -0.81684757298045851, 0.21990348731064374],
    [-0.81684757298045851, -0.81684757298045851, 0.21990348731064374],
];

const TRI_RULE_DEG5: [[f64; 3]; 7] = [
    [-0.33333333333333333, -0.33333333333333333, 0.45],
    [-0.05971587178976982, -0.88056825642046036, 0.26478830557701236],
    [-0.88056825642046036, -0.05971587178976982, 0.26478830557701236],
    [-0.05971587178976982, -0.05971587178976982, 0.26478830557701236],
    [-0.79742698535308732, 0.59485397070617464, 0.25187836108965431],
    [0.59485397070617464, -0.79742698535308732, 0.25187836108965431],
    [-0.79742698535308732, -0.79742698535308732, 0.25187836108965431],
];

const TRI_RULE_DEG6: [[f64; 3]; 12] = [
    [-0.50142650965817916, 0.0028530193163583148, 0.23357255145275873],
    [0.0028530193163583148, -0.50142650965817916, 0.23357255145275873],
    [-0.50142650965817916, -0.50142650965817916, 0.23357255145275873],
    [-0.87382197101699554, 0.74764394203399109, 0.10168981274041363],
    [0.74764394203399109, -0.87382197101699554, 0.10168981274041363],
    [-0.87382197101699554, -0.87382197101699554, 0.10168981274041363],
    [-0.89370990031036611, 0.27300499824279729, 0.16570215123674715],
    [0.27300499824279729, -0.89370990031036611, 0.16570215123674715],
    [-0.37929509793243119, 0.27300499824279729, 0.16570215123674715],
    [0.27300499824279729, -0.37929509793243119, 0.16570215123674715],
    [-0.37929509793243119, -0.89370990031036611, 0.16570215123674715],
    [-0.89370990031036611, -0.37929509793243119, 0.16570215123674715],
];

const TRI_RULE_DEG8: [[f64; 3]; 16] = [
    [-0.33333333333333333, -0.33333333333333333, 0.28863121535557434],
    [-0.081414823414553688, -0.83717035317089262, 0.19018326853456925],
    [-0.83717035317089262, -0.081414823414553688, 0.19018326853456925],
    [-0.081414823414553688, -0.081414823414553688, 0.19018326853456925],
    [-0.65886138449647959, 0.31772276899295917, 0.2064347410694365],
    [0.31772276899295917, -0.65886138449647959, 0.2064347410694365],
    [-0.65886138449647959, -0.65886138449647959, 0.2064347410694365],
    [-0.89890554336593805, 0.7978110867318761, 0.064916995246396161],
    [0.7978110867318761, -0.89890554336593805, 0.064916995246396161],
    [-0.89890554336593805, -0.89890554336593805, 0.064916995246396161],
    [-0.98321044518008479, 0.45698478591080856, 0.054460628348869989],
    [0.45698478591080856, -0.98321044518008479, 0.054460628348869989],
    [-0.47377434073072377, 0.45698478591080856, 0.054460628348869989],
    [0.45698478591080856, -0.47377434073072377, 0.054460628348869989],
    [-0.47377434073072377, -0.98321044518008479, 0.054460628348869989],
    [-0.98321044518008479, -0.47377434073072377, 0.054460628348869989],
];

const TRI_RULE_DEG9: [[f64; 3]; 19] = [
    [-0.33333333333333333, -0.33333333333333333, 0.19427159256559767],
    [-0.020634961602524744, -0.95873007679495051, 0.062669400454278141],
    [-0.95873007679495051, -0.020634961602524744, 0.062669400454278141],
    [-0.020634961602524744, -0.020634961602524744, 0.062669400454278141],
    [-0.12582081701412673, -0.74835836597174655, 0.15565508200954856],
    [-0.74835836597174655, -0.12582081701412673, 0.15565508200954856],
    [-0.12582081701412673, -0.12582081701412673, 0.15565508200954856],
    [-0.62359292876193454, 0.24718585752386908, 0.15929547785442051],
    [0.24718585752386908, -0.62359292876193454, 0.15929547785442051],
    [-0.62359292876193454, -0.62359292876193454, 0.15929547785442051],
    [-0.91054097321109458, 0.82108194642218916, 0.051155351317396063],
    [0.82108194642218916, -0.91054097321109458, 0.051155351317396063],
    [-0.91054097321109458, -0.91054097321109458, 0.051155351317396063],
    [-0.92632317589052743, 0.48239719756899604, 0.086567078754578755],
    [0.48239719756899604, -0.92632317589052743, 0.086567078754578755],
    [-0.55607402167846861, 0.48239719756899604, 0.086567078754578755],
    [0.48239719756899604, -0.55607402167846861, 0.086567078754578755],
    [-0.55607402167846861, -0.92632317589052743, 0.086567078754578755],
    [-0.92632317589052743, -0.55607402167846861, 0.086567078754578755],
];

/// Maximum supported exactness degree for triangle rules.
pub const TRI_MAX_DEGREE: usize = 12;

fn tri_rule_from_table(table: &[[f64; 3]], degree: usize) -> QuadratureRule {
    QuadratureRule {
        dim: 2,
        points: table.iter().map(|r| [r[0], r[1]]).collect(),
        weights: table.iter().map(|r| r[2]).collect(),
        exactness_degree: degree,
    }
}

/// Collapsed-coordinate product rule on the bi-unit triangle, symmetrized
/// over the S3 symmetry group so the result is invariant under vertex
/// permutations. Exact for total degree `2n - 1`, all weights positive.
fn tri_duffy_symmetrized(n: usize, degree: usize) -> QuadratureRule {
    let ga = gauss_legendre(n).expect("n >= 1");
    let gb = gauss_jacobi(n, 1.0);
    let mut raw: Vec<([f64; 2], f64)> = Vec::with_capacity(n * n);
    for (ia, pa) in ga.points.iter().enumerate() {
        let a = pa[0];
        let wa = ga.weights[ia];
        for &(b, wb) in &gb {
            // x = (1+a)(1-b)/2 - 1, y = b; dx dy = (1-b)/2 da db, and the
            // (1-b) factor is the Jacobi weight; the remaining 1/2 is here.
            let x = 0.5 * (1.0 + a) * (1.0 - b) - 1.0;
            raw.push(([x, b], 0.5 * wa * wb));
        }
    }
    // S3 images: vertex permutations of the bi-unit right triangle
    let maps: [fn(f64, f64) -> (f64, f64); 6] = [
        |x, y| (x, y),
        |x, y| (y, x),
        |x, y| (-x - y - 1.0, y),
        |x, y| (y, -x - y - 1.0),
        |x, y| (-x - y - 1.0, x),
        |x, y| (x, -x - y - 1.0),
    ];
    let mut points = Vec::with_capacity(6 * raw.len());
    let mut weights = Vec::with_capacity(6 * raw.len());
    for map in maps {
        for &([x, y], w) in &raw {
            let (mx, my) = map(x, y);
            points.push([mx, my]);
            weights.push(w / 6.0);
        }
    }
    QuadratureRule {
        dim: 2,
        points,
        weights,
        exactness_degree: degree,
    }
}

/// Positive-weight symmetric quadrature rule on the bi-unit reference
/// triangle, exact for polynomials of total degree `degree`.
///
/// Degrees above [`TRI_MAX_DEGREE`] are rejected rather than served by rules
/// with negative weights, since positivity of the quadrature norm is what
/// the operator identities rest on.
pub fn triangle_quadrature(degree: usize) -> Result<QuadratureRule> {
    if degree == 0 || degree > TRI_MAX_DEGREE {
        return Err(Error::UnsupportedDegree {
            degree,
            max: TRI_MAX_DEGREE,
        });
    }
    Ok(match degree {
        1 => tri_rule_from_table(&TRI_RULE_DEG1, 1),
        2 => tri_rule_from_table(&TRI_RULE_DEG2, 2),
        3 | 4 => tri_rule_from_table(&TRI_RULE_DEG4, degree),
        5 => tri_rule_from_table(&TRI_RULE_DEG5, 5),
        6 => tri_rule_from_table(&TRI_RULE_DEG6, 6),
        7 | 8 => tri_rule_from_table(&TRI_RULE_DEG8, degree),
        9 => tri_rule_from_table(&TRI_RULE_DEG9, 9),
        d => {
            // smallest n with 2n - 1 >= d
            let n = d / 2 + 1;
            tri_duffy_symmetrized(n, d)
        }
    })
}

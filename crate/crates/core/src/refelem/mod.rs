//! Reference elements and the quadrature-based operator set.
//!
//! Everything here lives on the reference interval `[-1, 1]` or the bi-unit
//! right triangle with vertices (-1,-1), (1,-1), (-1,1). The heart of the
//! module is [`build_operator_set`], which assembles the interpolation,
//! projection, lifting and differentiation matrices together with the
//! decoupled block operator `D_N` and its integrated form `Q_N`, and
//! [`verify_sbp`], which measures how well the operator identities hold.

pub mod basis;
pub mod quadrature;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
pub use quadrature::{gauss_legendre, gauss_lobatto, triangle_quadrature, QuadratureRule};

/// Supported reference element shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementType {
    Interval,
    Triangle,
}

impl ElementType {
    pub fn dim(&self) -> usize {
        match self {
            ElementType::Interval => 1,
            ElementType::Triangle => 2,
        }
    }

    /// Measure of the reference element.
    pub fn measure(&self) -> f64 {
        2.0
    }
}

/// Volume quadrature choices named by the experiment drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMode {
    /// (N+1)-point Gauss-Legendre-Lobatto; the collocated DG-SEM regime.
    Gll,
    /// (N+1)-point Gauss-Legendre.
    GaussNp1,
    /// Over-integrated (N+2)-point Gauss-Legendre.
    GaussNp2,
    /// Triangle rule exact for degree 2N with (N+1)-point edge Gauss rules.
    Tri2N,
}

impl QuadMode {
    pub fn label(&self) -> &'static str {
        match self {
            QuadMode::Gll => "gll",
            QuadMode::GaussNp1 => "gauss1",
            QuadMode::GaussNp2 => "gauss2",
            QuadMode::Tri2N => "tri2n",
        }
    }
}

impl std::str::FromStr for QuadMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gll" => Ok(QuadMode::Gll),
            "gauss1" => Ok(QuadMode::GaussNp1),
            "gauss2" => Ok(QuadMode::GaussNp2),
            "tri2n" => Ok(QuadMode::Tri2N),
            other => Err(Error::Config(format!("unknown quadrature mode `{other}`"))),
        }
    }
}

/// Surface quadrature: points on the element boundary with outward unit
/// normals, face ids, and weights that already include the reference face
/// Jacobian.
#[derive(Debug, Clone)]
pub struct SurfaceRule {
    pub points: Vec<[f64; 2]>,
    /// Quadrature weight times the reference face Jacobian.
    pub weights: Vec<f64>,
    /// Outward unit normal of the reference element at each point.
    pub normals: Vec<[f64; 2]>,
    /// Reference face Jacobian at each point.
    pub jhat: Vec<f64>,
    /// Which face each point belongs to.
    pub face: Vec<usize>,
    /// Number of faces.
    pub n_faces: usize,
    /// Points per face.
    pub points_per_face: usize,
}

impl SurfaceRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A reference element: shape, polynomial degree, and its quadrature rules.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub element_type: ElementType,
    pub n: usize,
    pub np: usize,
    pub volume: QuadratureRule,
    pub surface: SurfaceRule,
    pub quad_mode: QuadMode,
}

impl ReferenceElement {
    /// Interval element of degree `n` with the given volume quadrature mode.
    pub fn interval(n: usize, mode: QuadMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        let volume = match mode {
            QuadMode::Gll => gauss_lobatto(n + 1)?,
            QuadMode::GaussNp1 => gauss_legendre(n + 1)?,
            QuadMode::GaussNp2 => gauss_legendre(n + 2)?,
            QuadMode::Tri2N => {
                return Err(Error::InvalidArgument(
                    "tri2n quadrature is a triangle mode".into(),
                ))
            }
        };
        // two endpoint "faces"; point weights are 1 and the surface norm
        // matrix is the identity
        let surface = SurfaceRule {
            points: vec![[-1.0, 0.0], [1.0, 0.0]],
            weights: vec![1.0, 1.0],
            normals: vec![[-1.0, 0.0], [1.0, 0.0]],
            jhat: vec![1.0, 1.0],
            face: vec![0, 1],
            n_faces: 2,
            points_per_face: 1,
        };
        Ok(ReferenceElement {
            element_type: ElementType::Interval,
            n,
            np: n + 1,
            volume,
            surface,
            quad_mode: mode,
        })
    }

    /// Triangle element of degree `n`: degree-2N volume rule and
    /// (N+1)-point Gauss rules on each edge, with the reference face
    /// Jacobian pre-multiplied into the surface weights.
    pub fn triangle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        let volume = triangle_quadrature(2 * n)?;
        let edge = gauss_legendre(n + 1)?;
        // counterclockwise faces of the bi-unit right triangle
        let verts: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]];
        let faces = [(0usize, 1usize), (1, 2), (2, 0)];
        let normals = [
            [0.0, -1.0],
            [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
            [-1.0, 0.0],
        ];
        let mut surface = SurfaceRule {
            points: Vec::new(),
            weights: Vec::new(),
            normals: Vec::new(),
            jhat: Vec::new(),
            face: Vec::new(),
            n_faces: 3,
            points_per_face: edge.len(),
        };
        for (f, &(a, b)) in faces.iter().enumerate() {
            let (va, vb) = (verts[a], verts[b]);
            let len = ((vb[0] - va[0]).powi(2) + (vb[1] - va[1]).powi(2)).sqrt();
            let jhat = len / 2.0;
            for (pt, &w) in edge.points.iter().zip(&edge.weights) {
                let s = 0.5 * (pt[0] + 1.0);
                surface.points.push([
                    va[0] + s * (vb[0] - va[0]),
                    va[1] + s * (vb[1] - va[1]),
                ]);
                surface.weights.push(w * jhat);
                surface.normals.push(normals[f]);
                surface.jhat.push(jhat);
                surface.face.push(f);
            }
        }
        Ok(ReferenceElement {
            element_type: ElementType::Triangle,
            n,
            np: (n + 1) * (n + 2) / 2,
            volume,
            surface,
            quad_mode: QuadMode::Tri2N,
        })
    }

    pub fn dim(&self) -> usize {
        self.element_type.dim()
    }

    /// Basis evaluation matrix: row per point, column per mode.
    pub fn basis_eval(&self, points: &[[f64; 2]]) -> DMatrix<f64> {
        match self.element_type {
            ElementType::Interval => DMatrix::from_fn(points.len(), self.np, |i, j| {
                basis::legendre_normalized(points[i][0], j)
            }),
            ElementType::Triangle => {
                let modes = basis::triangle_modes(self.n);
                DMatrix::from_fn(points.len(), self.np, |i, j| {
                    let (a, m) = modes[j];
                    basis::dubiner(points[i][0], points[i][1], a, m)
                })
            }
        }
    }

    /// Basis gradient matrices, one per reference direction.
    pub fn basis_grad_eval(&self, points: &[[f64; 2]]) -> Vec<DMatrix<f64>> {
        match self.element_type {
            ElementType::Interval => vec![DMatrix::from_fn(points.len(), self.np, |i, j| {
                basis::legendre_normalized_grad(points[i][0], j)
            })],
            ElementType::Triangle => {
                let modes = basis::triangle_modes(self.n);
                let mut gx = DMatrix::zeros(points.len(), self.np);
                let mut gy = DMatrix::zeros(points.len(), self.np);
                for (i, pt) in points.iter().enumerate() {
                    for (j, &(a, m)) in modes.iter().enumerate() {
                        let (dx, dy) = basis::dubiner_grad(pt[0], pt[1], a, m);
                        gx[(i, j)] = dx;
                        gy[(i, j)] = dy;
                    }
                }
                vec![gx, gy]
            }
        }
    }
}

/// All reference-element matrices for one (element type, N, quadrature)
/// triple. Immutable after construction and safe to share across workers.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub elem: ReferenceElement,
    /// Volume quadrature weights (diagonal of W).
    pub w: DVector<f64>,
    /// Surface quadrature weights including the reference face Jacobian
    /// (diagonal of W_f).
    pub wf: DVector<f64>,
    /// Interpolation to volume quadrature points, N_q x N_p.
    pub vq: DMatrix<f64>,
    /// Interpolation to surface quadrature points, N_q^f x N_p.
    pub vf: DMatrix<f64>,
    /// Quadrature mass matrix V_q^T W V_q.
    pub m: DMatrix<f64>,
    /// Quadrature L2 projection M^{-1} V_q^T W, N_p x N_q.
    pub pq: DMatrix<f64>,
    /// Lifting matrix M^{-1} V_f^T W_f, N_p x N_q^f.
    pub lq: DMatrix<f64>,
    /// Modal differentiation matrices, N_p x N_p, one per direction.
    pub d: Vec<DMatrix<f64>>,
    /// Quadrature differentiation V_q D_i P_q, N_q x N_q.
    pub dq: Vec<DMatrix<f64>>,
    /// Decoupled block operator over volume+surface points.
    pub dn: Vec<DMatrix<f64>>,
    /// Integrated form Q_N^i = W_N D_N^i.
    pub qn: Vec<DMatrix<f64>>,
    /// Diagonal of the boundary matrix B_N^i.
    pub bn: Vec<DVector<f64>>,
    /// Diagonal of W_N = diag(W, W_f).
    pub wn: DVector<f64>,
    /// Condition number of the mass matrix.
    pub cond_m: f64,
}

impl OperatorSet {
    pub fn nq(&self) -> usize {
        self.vq.nrows()
    }

    pub fn nqf(&self) -> usize {
        self.vf.nrows()
    }

    pub fn np(&self) -> usize {
        self.vq.ncols()
    }

    pub fn dim(&self) -> usize {
        self.elem.dim()
    }

    /// Total points in the combined volume+surface set.
    pub fn ntot(&self) -> usize {
        self.nq() + self.nqf()
    }
}

/// Assemble the full operator set for a reference element.
///
/// `D_i` is computed modally, projecting the analytic basis gradients with
/// `P_q`; this is exact whenever the volume rule integrates degree 2N-1.
pub fn build_operator_set(elem: &ReferenceElement) -> Result<OperatorSet> {
    let nq = elem.volume.len();
    let nqf = elem.surface.len();
    let np = elem.np;
    let dim = elem.dim();

    let w = DVector::from_vec(elem.volume.weights.clone());
    let wf = DVector::from_vec(elem.surface.weights.clone());

    let vq = elem.basis_eval(&elem.volume.points);
    let vf = elem.basis_eval(&elem.surface.points);

    // M = V_q^T W V_q
    let mut vtw = vq.transpose();
    for (col, &wi) in elem.volume.weights.iter().enumerate() {
        for r in 0..np {
            vtw[(r, col)] *= wi;
        }
    }
    let m = &vtw * &vq;

    let sv = m.clone().svd(false, false).singular_values;
    let cond_m = sv.max() / sv.min();
    if !cond_m.is_finite() || cond_m > 1e8 {
        return Err(Error::IllConditionedBasis(cond_m));
    }
    let chol = nalgebra::Cholesky::new(m.clone())
        .ok_or_else(|| Error::IllConditionedBasis(f64::INFINITY))?;

    // P_q = M^{-1} V_q^T W
    let pq = chol.solve(&vtw);

    // L_q = M^{-1} V_f^T W_f
    let mut vftw = vf.transpose();
    for (col, &wi) in elem.surface.weights.iter().enumerate() {
        for r in 0..np {
            vftw[(r, col)] *= wi;
        }
    }
    let lq = chol.solve(&vftw);

    // modal differentiation per direction
    let grads = elem.basis_grad_eval(&elem.volume.points);
    let d: Vec<DMatrix<f64>> = grads.iter().map(|g| &pq * g).collect();
    let dq: Vec<DMatrix<f64>> = d.iter().map(|di| &vq * di * &pq).collect();

    // V_q L_q and V_f P_q show up in every block of D_N
    let vql = &vq * &lq;
    let vfp = &vf * &pq;

    let nt = nq + nqf;
    let mut dn = Vec::with_capacity(dim);
    let mut qn = Vec::with_capacity(dim);
    let mut bn = Vec::with_capacity(dim);

    let mut wn = DVector::zeros(nt);
    for i in 0..nq {
        wn[i] = w[i];
    }
    for i in 0..nqf {
        wn[nq + i] = wf[i];
    }

    for i in 0..dim {
        let nhat: Vec<f64> = elem.surface.normals.iter().map(|nv| nv[i]).collect();
        let mut dni = DMatrix::zeros(nt, nt);
        // top-left: D_q - 1/2 V_q L_q diag(n) V_f P_q
        for r in 0..nq {
            for c in 0..nq {
                let mut s = dq[i][(r, c)];
                for k in 0..nqf {
                    s -= 0.5 * vql[(r, k)] * nhat[k] * vfp[(k, c)];
                }
                dni[(r, c)] = s;
            }
        }
        // top-right: 1/2 V_q L_q diag(n)
        for r in 0..nq {
            for k in 0..nqf {
                dni[(r, nq + k)] = 0.5 * vql[(r, k)] * nhat[k];
            }
        }
        // bottom-left: -1/2 diag(n) V_f P_q
        for k in 0..nqf {
            for c in 0..nq {
                dni[(nq + k, c)] = -0.5 * nhat[k] * vfp[(k, c)];
            }
        }
        // bottom-right: 1/2 diag(n)
        for k in 0..nqf {
            dni[(nq + k, nq + k)] = 0.5 * nhat[k];
        }

        let mut qni = dni.clone();
        for r in 0..nt {
            for c in 0..nt {
                qni[(r, c)] *= wn[r];
            }
        }

        let mut bni = DVector::zeros(nt);
        for k in 0..nqf {
            bni[nq + k] = wf[k] * nhat[k];
        }

        dn.push(dni);
        qn.push(qni);
        bn.push(bni);
    }

    Ok(OperatorSet {
        elem: elem.clone(),
        w,
        wf,
        vq,
        vf,
        m,
        pq,
        lq,
        d,
        dq,
        dn,
        qn,
        bn,
        wn,
        cond_m,
    })
}

/// Max-abs residuals of the operator identities.
#[derive(Debug, Clone)]
pub struct SbpReport {
    /// W D_q + (W D_q)^T - P_q^T V_f^T W_f diag(n) V_f P_q
    pub lemma_sbp: f64,
    /// Q_N + Q_N^T - B_N
    pub qn_symmetry: f64,
    /// Q_N 1
    pub qn_nullvec: f64,
    /// P_q V_q - I
    pub projection_identity: f64,
    /// [P_q L_q] D_N [V_q; V_f] - D
    pub recovery: f64,
    /// weighted-derivative route vs direct projection on polynomial data
    pub weighted_derivative: f64,
}

impl SbpReport {
    pub fn max(&self) -> f64 {
        [
            self.lemma_sbp,
            self.qn_symmetry,
            self.qn_nullvec,
            self.projection_identity,
            self.recovery,
            self.weighted_derivative,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("lemma_sbp", self.lemma_sbp),
            ("qn_symmetry", self.qn_symmetry),
            ("qn_nullvec", self.qn_nullvec),
            ("projection_identity", self.projection_identity),
            ("recovery", self.recovery),
            ("weighted_derivative", self.weighted_derivative),
        ]
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

/// Small deterministic generator for the polynomial-data checks; keeps the
/// library free of an RNG dependency.
fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Measure every operator identity and return the residual report.
pub fn verify_sbp(ops: &OperatorSet) -> SbpReport {
    let nq = ops.nq();
    let nqf = ops.nqf();
    let nt = nq + nqf;
    let dim = ops.dim();
    let np = ops.np();

    let mut lemma = 0.0f64;
    let mut qsym = 0.0f64;
    let mut qnull = 0.0f64;
    let mut recov = 0.0f64;

    for i in 0..dim {
        // (a) Lemma: W D_q + (W D_q)^T = P_q^T V_f^T W_f diag(n) V_f P_q
        let mut wdq = ops.dq[i].clone();
        for r in 0..nq {
            for c in 0..nq {
                wdq[(r, c)] *= ops.w[r];
            }
        }
        let lhs = &wdq + wdq.transpose();
        let vfp = &ops.vf * &ops.pq;
        let mut wnvfp = vfp.clone();
        for r in 0..nqf {
            let scale = ops.wf[r] * ops.elem.surface.normals[r][i];
            for c in 0..nq {
                wnvfp[(r, c)] *= scale;
            }
        }
        let rhs = vfp.transpose() * wnvfp;
        lemma = lemma.max(max_abs(&(lhs - rhs)));

        // (b) Q_N + Q_N^T = B_N
        let mut sym = &ops.qn[i] + ops.qn[i].transpose();
        for k in 0..nt {
            sym[(k, k)] -= ops.bn[i][k];
        }
        qsym = qsym.max(max_abs(&sym));

        // (c) Q_N 1 = 0
        let ones = DVector::from_element(nt, 1.0);
        let qn1 = &ops.qn[i] * ones;
        qnull = qnull.max(qn1.iter().fold(0.0f64, |a, &v| a.max(v.abs())));

        // (e) [P_q L_q] D_N [V_q; V_f] = D
        let mut vstack = DMatrix::zeros(nt, np);
        vstack.view_mut((0, 0), (nq, np)).copy_from(&ops.vq);
        vstack.view_mut((nq, 0), (nqf, np)).copy_from(&ops.vf);
        let mut pl = DMatrix::zeros(np, nt);
        pl.view_mut((0, 0), (np, nq)).copy_from(&ops.pq);
        pl.view_mut((0, nq), (np, nqf)).copy_from(&ops.lq);
        let recovered = &pl * &ops.dn[i] * &vstack;
        recov = recov.max(max_abs(&(recovered - &ops.d[i])));
    }

    // (d) P_q V_q = I
    let mut pv = &ops.pq * &ops.vq;
    for k in 0..np {
        pv[(k, k)] -= 1.0;
    }
    let proj = max_abs(&pv);

    // (f) weighted-derivative approximation on random degree-N data: the
    // decoupled route [P_q L_q] diag(w) D_N [u] must agree with the direct
    // quadrature projection P_q (w_q . (D_q u_q)) when w, u are polynomials.
    let mut state = 0x5DEECE66Du64;
    let mut wd = 0.0f64;
    for _ in 0..5 {
        let wc = DVector::from_fn(np, |_, _| splitmix(&mut state));
        let uc = DVector::from_fn(np, |_, _| splitmix(&mut state));
        let wq = &ops.vq * &wc;
        let wf_ = &ops.vf * &wc;
        let uq = &ops.vq * &uc;
        let uf = &ops.vf * &uc;
        let mut uvec = DVector::zeros(nt);
        for k in 0..nq {
            uvec[k] = uq[k];
        }
        for k in 0..nqf {
            uvec[nq + k] = uf[k];
        }
        for i in 0..dim {
            let dnu = &ops.dn[i] * &uvec;
            let mut weighted = dnu.clone();
            for k in 0..nq {
                weighted[k] *= wq[k];
            }
            for k in 0..nqf {
                weighted[nq + k] *= wf_[k];
            }
            let via_dn = &ops.pq * weighted.rows(0, nq).into_owned()
                + &ops.lq * weighted.rows(nq, nqf).into_owned();
            let dqu = &ops.dq[i] * &uq;
            let mut prod = dqu.clone();
            for k in 0..nq {
                prod[k] *= wq[k];
            }
            let direct = &ops.pq * prod;
            let diff = via_dn - direct;
            wd = wd.max(diff.iter().fold(0.0f64, |a, &v| a.max(v.abs())));
        }
    }

    SbpReport {
        lemma_sbp: lemma,
        qn_symmetry: qsym,
        qn_nullvec: qnull,
        projection_identity: proj,
        recovery: recov,
        weighted_derivative: wd,
    }
}

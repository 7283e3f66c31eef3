//! Interval meshes and triangular meshes of bisected uniform quadrilaterals,
//! with affine geometric factors and periodic face-quadrature connectivity.
//!
//! Face matching works on physical coordinates: every surface quadrature
//! point of every element is matched to the coincident point of the
//! neighboring element (translated by the domain period across periodic
//! boundaries). The matching is an involution and matched points carry
//! opposite unit normals.

use crate::error::{Error, Result};
use crate::refelem::{ElementType, ReferenceElement, SurfaceRule};
use std::collections::HashMap;

/// Affine geometry of one element.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    /// Forward map Jacobian `A = dx/dxhat` (column j is the image of the
    /// j-th reference direction).
    pub a: [[f64; 2]; 2],
    /// Image of the reference origin, so `x = offset + A xhat`.
    pub offset: [f64; 2],
    /// Geometric factors `G_ij = dxhat_j / dx_i` (i.e. `A^{-T}`).
    pub g: [[f64; 2]; 2],
    /// Volume Jacobian (constant, positive).
    pub j: f64,
    /// Physical face Jacobian at each surface quadrature point.
    pub jf: Vec<f64>,
    /// Physical unit outward normal at each surface quadrature point.
    pub normal: Vec<[f64; 2]>,
    /// `jf / jhat`: scale between physical and reference surface weights.
    pub jf_scale: Vec<f64>,
}

impl ElementGeometry {
    /// Map a reference point to physical coordinates.
    pub fn map(&self, xhat: [f64; 2]) -> [f64; 2] {
        [
            self.offset[0] + self.a[0][0] * xhat[0] + self.a[0][1] * xhat[1],
            self.offset[1] + self.a[1][0] * xhat[0] + self.a[1][1] * xhat[1],
        ]
    }
}

/// Where a surface quadrature point is coupled to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conn {
    /// Interior (or periodic-image) partner: (element, surface point).
    Interior { elem: usize, point: usize },
    /// Domain boundary point.
    Boundary,
}

/// A mesh of affine elements sharing one reference element.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub element_type: ElementType,
    /// Element vertices; interval elements use the first two entries.
    pub verts: Vec<[[f64; 2]; 3]>,
    pub geoms: Vec<ElementGeometry>,
    /// Connectivity per element per surface quadrature point.
    pub conn: Vec<Vec<Conn>>,
    /// Physical surface quadrature points, per element.
    pub surface_points: Vec<Vec<[f64; 2]>>,
    pub bbox: [[f64; 2]; 2],
    pub periodic: [bool; 2],
    /// CFL mesh size: min over elements of `2 J / max(J_f)` (the element
    /// length in one dimension).
    pub h_min: f64,
}

impl Mesh {
    pub fn n_elements(&self) -> usize {
        self.geoms.len()
    }

    pub fn n_boundary_points(&self) -> usize {
        self.conn
            .iter()
            .flat_map(|c| c.iter())
            .filter(|c| matches!(c, Conn::Boundary))
            .count()
    }

    /// One-line text summary (element count, h, J range).
    pub fn summary(&self) -> String {
        let jmin = self.geoms.iter().map(|g| g.j).fold(f64::INFINITY, f64::min);
        let jmax = self.geoms.iter().map(|g| g.j).fold(0.0f64, f64::max);
        format!(
            "{} elements, h = {:.6e}, J in [{:.6e}, {:.6e}], {} boundary points",
            self.n_elements(),
            self.h_min,
            jmin,
            jmax,
            self.n_boundary_points()
        )
    }
}

/// Compute the affine geometric factors of one element.
pub fn geometric_factors(
    element_type: ElementType,
    verts: &[[f64; 2]; 3],
    surface: &SurfaceRule,
) -> Result<ElementGeometry> {
    let (a, offset) = match element_type {
        ElementType::Interval => {
            let len = verts[1][0] - verts[0][0];
            (
                [[0.5 * len, 0.0], [0.0, 1.0]],
                [0.5 * (verts[0][0] + verts[1][0]), 0.0],
            )
        }
        ElementType::Triangle => {
            // reference vertices (-1,-1), (1,-1), (-1,1)
            let a = [
                [
                    0.5 * (verts[1][0] - verts[0][0]),
                    0.5 * (verts[2][0] - verts[0][0]),
                ],
                [
                    0.5 * (verts[1][1] - verts[0][1]),
                    0.5 * (verts[2][1] - verts[0][1]),
                ],
            ];
            let offset = [
                verts[0][0] + a[0][0] + a[0][1],
                verts[0][1] + a[1][0] + a[1][1],
            ];
            (a, offset)
        }
    };
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let j = match element_type {
        ElementType::Interval => a[0][0],
        ElementType::Triangle => det,
    };
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::InvalidMesh(format!(
            "element has non-positive Jacobian {j}"
        )));
    }
    // A^{-T}
    let inv_det = 1.0 / det;
    let g = [
        [a[1][1] * inv_det, -a[1][0] * inv_det],
        [-a[0][1] * inv_det, a[0][0] * inv_det],
    ];
    let mut jf = Vec::with_capacity(surface.len());
    let mut normal = Vec::with_capacity(surface.len());
    let mut jf_scale = Vec::with_capacity(surface.len());
    for p in 0..surface.len() {
        let nhat = surface.normals[p];
        let jhat = surface.jhat[p];
        // scaled physical normal: v = J jhat A^{-T} nhat, so |v| = J_f
        let v = [
            j * jhat * (g[0][0] * nhat[0] + g[0][1] * nhat[1]),
            j * jhat * (g[1][0] * nhat[0] + g[1][1] * nhat[1]),
        ];
        let mag = (v[0] * v[0] + v[1] * v[1]).sqrt();
        jf.push(mag);
        normal.push([v[0] / mag, v[1] / mag]);
        jf_scale.push(mag / jhat);
    }
    Ok(ElementGeometry {
        a,
        offset,
        g,
        j,
        jf,
        normal,
        jf_scale,
    })
}

/// Uniform interval mesh of `k` elements on `[a, b]`.
pub fn build_mesh_1d(
    elem: &ReferenceElement,
    k: usize,
    interval: [f64; 2],
    periodic: bool,
) -> Result<Mesh> {
    if elem.element_type != ElementType::Interval {
        return Err(Error::InvalidArgument(
            "build_mesh_1d requires an interval reference element".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("element count must be positive".into()));
    }
    let [a, b] = interval;
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}] is empty"
        )));
    }
    let dx = (b - a) / k as f64;
    let mut verts = Vec::with_capacity(k);
    for i in 0..k {
        let x0 = a + i as f64 * dx;
        let x1 = if i + 1 == k { b } else { a + (i + 1) as f64 * dx };
        verts.push([[x0, 0.0], [x1, 0.0], [0.0, 0.0]]);
    }
    assemble_mesh(elem, verts, [[a, 0.0], [b, 0.0]], [periodic, false])
}

/// Triangular mesh from `kx * ky` uniform quadrilaterals, each bisected
/// into two right triangles.
pub fn build_tri_mesh(
    elem: &ReferenceElement,
    kx: usize,
    ky: usize,
    bbox: [[f64; 2]; 2],
    periodic: [bool; 2],
) -> Result<Mesh> {
    if elem.element_type != ElementType::Triangle {
        return Err(Error::InvalidArgument(
            "build_tri_mesh requires a triangle reference element".into(),
        ));
    }
    if kx == 0 || ky == 0 {
        return Err(Error::InvalidArgument("quad counts must be positive".into()));
    }
    let [[x0, y0], [x1, y1]] = bbox;
    if !(x0 < x1 && y0 < y1) {
        return Err(Error::InvalidArgument(format!(
            "degenerate box [{x0},{x1}]x[{y0},{y1}]"
        )));
    }
    let dx = (x1 - x0) / kx as f64;
    let dy = (y1 - y0) / ky as f64;
    let xc = |i: usize| if i == kx { x1 } else { x0 + i as f64 * dx };
    let yc = |j: usize| if j == ky { y1 } else { y0 + j as f64 * dy };
    let mut verts = Vec::with_capacity(2 * kx * ky);
    for j in 0..ky {
        for i in 0..kx {
            let c00 = [xc(i), yc(j)];
            let c10 = [xc(i + 1), yc(j)];
            let c01 = [xc(i), yc(j + 1)];
            let c11 = [xc(i + 1), yc(j + 1)];
            // both bisection halves are positively oriented
            verts.push([c00, c10, c01]);
            verts.push([c11, c01, c10]);
        }
    }
    assemble_mesh(elem, verts, bbox, periodic)
}

fn assemble_mesh(
    elem: &ReferenceElement,
    verts: Vec<[[f64; 2]; 3]>,
    bbox: [[f64; 2]; 2],
    periodic: [bool; 2],
) -> Result<Mesh> {
    let mut geoms = Vec::with_capacity(verts.len());
    let mut surface_points = Vec::with_capacity(verts.len());
    for v in &verts {
        let geo = geometric_factors(elem.element_type, v, &elem.surface)?;
        let pts: Vec<[f64; 2]> = elem.surface.points.iter().map(|&p| geo.map(p)).collect();
        surface_points.push(pts);
        geoms.push(geo);
    }
    let h_min = geoms
        .iter()
        .map(|g| 2.0 * g.j / g.jf.iter().fold(0.0f64, |a, &b| a.max(b)))
        .fold(f64::INFINITY, f64::min);
    let conn = connect_faces(elem, &geoms, &surface_points, bbox, periodic, h_min)?;
    Ok(Mesh {
        element_type: elem.element_type,
        verts,
        geoms,
        conn,
        surface_points,
        bbox,
        periodic,
        h_min,
    })
}

/// Match surface quadrature points across faces (and across periodic
/// images) into an involutive connectivity table.
pub fn connect_faces(
    elem: &ReferenceElement,
    geoms: &[ElementGeometry],
    surface_points: &[Vec<[f64; 2]>],
    bbox: [[f64; 2]; 2],
    periodic: [bool; 2],
    h: f64,
) -> Result<Vec<Vec<Conn>>> {
    let tol = 1e-10 * h.max(1e-30);
    let cell = 4.0 * tol;
    let key = |p: [f64; 2]| -> (i64, i64) {
        ((p[0] / cell).round() as i64, (p[1] / cell).round() as i64)
    };
    let mut buckets: HashMap<(i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for (k, pts) in surface_points.iter().enumerate() {
        for (p, &pt) in pts.iter().enumerate() {
            buckets.entry(key(pt)).or_default().push((k, p));
        }
    }
    let period = [bbox[1][0] - bbox[0][0], bbox[1][1] - bbox[0][1]];
    let dim = elem.element_type.dim();

    // candidate translations: identity plus periodic shifts
    let mut shifts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let xs: &[f64] = if periodic[0] { &[0.0, 1.0, -1.0] } else { &[0.0] };
    let ys: &[f64] = if periodic[1] && dim == 2 { &[0.0, 1.0, -1.0] } else { &[0.0] };
    for &sx in xs {
        for &sy in ys {
            if sx != 0.0 || sy != 0.0 {
                shifts.push([sx * period[0], sy * period[1]]);
            }
        }
    }

    let nsp = elem.surface.len();
    let mut conn = vec![vec![Conn::Boundary; nsp]; geoms.len()];
    for (k, pts) in surface_points.iter().enumerate() {
        'point: for (p, &pt) in pts.iter().enumerate() {
            let n = geoms[k].normal[p];
            for shift in &shifts {
                let probe = [pt[0] + shift[0], pt[1] + shift[1]];
                let (kx, ky) = key(probe);
                for bx in kx - 1..=kx + 1 {
                    for by in ky - 1..=ky + 1 {
                        let Some(cands) = buckets.get(&(bx, by)) else {
                            continue;
                        };
                        for &(k2, p2) in cands {
                            if k2 == k && p2 == p && shift == &[0.0, 0.0] {
                                continue;
                            }
                            let q = surface_points[k2][p2];
                            let d = ((q[0] - probe[0]).powi(2) + (q[1] - probe[1]).powi(2)).sqrt();
                            if d > tol {
                                continue;
                            }
                            let n2 = geoms[k2].normal[p2];
                            // partner must face the opposite way
                            if n[0] * n2[0] + n[1] * n2[1] > -0.5 {
                                continue;
                            }
                            conn[k][p] = Conn::Interior { elem: k2, point: p2 };
                            continue 'point;
                        }
                    }
                }
            }
            // no partner found: legal only on a non-periodic boundary
            let on_boundary = {
                let eps = tol.max(1e-12);
                let on_x = (pt[0] - bbox[0][0]).abs() < eps || (pt[0] - bbox[1][0]).abs() < eps;
                let on_y = dim == 2
                    && ((pt[1] - bbox[0][1]).abs() < eps || (pt[1] - bbox[1][1]).abs() < eps);
                on_x || on_y
            };
            if !on_boundary {
                return Err(Error::NonconformingMesh(format!(
                    "unmatched interior surface point ({:.6}, {:.6}) of element {k}",
                    pt[0], pt[1]
                )));
            }
        }
    }

    // involution check
    for (k, row) in conn.iter().enumerate() {
        for (p, &c) in row.iter().enumerate() {
            if let Conn::Interior { elem: k2, point: p2 } = c {
                let back = conn[k2][p2];
                if back != (Conn::Interior { elem: k, point: p }) {
                    return Err(Error::NonconformingMesh(format!(
                        "face matching is not an involution at element {k} point {p}"
                    )));
                }
            }
        }
    }
    Ok(conn)
}

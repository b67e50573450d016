//! P1 finite elements for the Laplacian and the smallest Neumann/Dirichlet
//! eigenpairs.

mod lobpcg;
mod sparse;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analytic::{BoundaryCondition, Spectrum, SpectrumSource};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::mesh::{Mesh, P1Field};

pub use lobpcg::{lobpcg, EigenPairs, SolverConfig};
pub use sparse::SparseSym;

/// Triangles with area below this multiple of `h^2` abort assembly.
pub const DEGENERATE_AREA: f64 = 1e-14;

/// Stiffness (cotangent formula) and consistent mass matrices.
pub fn assemble(mesh: &Mesh) -> Result<(SparseSym, SparseSym)> {
    let n = mesh.n_vertices();
    let floor = DEGENERATE_AREA * mesh.h().powi(2).max(f64::MIN_POSITIVE);
    let mut kt = Vec::with_capacity(9 * mesh.n_triangles());
    let mut mt = Vec::with_capacity(9 * mesh.n_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        if !(area >= floor) {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        let p = mesh.corners(t);
        // gradient of the hat function at vertex i is perp(opposite edge) / 2A
        let g: [_; 3] = std::array::from_fn(|i| (p[(i + 2) % 3] - p[(i + 1) % 3]).perp());
        for i in 0..3 {
            for j in 0..3 {
                kt.push((tri[i], tri[j], g[i].dot(g[j]) / (4.0 * area)));
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                mt.push((tri[i], tri[j], m));
            }
        }
    }
    Ok((
        SparseSym::from_triplets(n, &kt)?,
        SparseSym::from_triplets(n, &mt)?,
    ))
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub spectrum: Spectrum,
    /// M-orthonormal eigenfunctions aligned with `spectrum.values`.
    pub eigenfunctions: Vec<P1Field>,
    pub residuals: Vec<f64>,
    /// Per-eigenvalue relative Richardson estimates (zeros when a single
    /// level was solved).
    pub error_estimates: Vec<f64>,
    /// Effective spacing of the coarse mesh.
    pub h: f64,
    pub seed: u64,
    pub iterations: usize,
}

/// Serialized form of an [`EigenResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub bc: BoundaryCondition,
    pub h: f64,
    pub seed: u64,
    pub eigenvalues: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl EigenResult {
    pub fn report(&self) -> EigenReport {
        EigenReport {
            bc: self.spectrum.bc,
            h: self.h,
            seed: self.seed,
            eigenvalues: self.spectrum.values.clone(),
            error_estimates: self.error_estimates.clone(),
            residuals: self.residuals.clone(),
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.eigenfunctions[0].mesh()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FemConfig {
    pub solver: SolverConfig,
    /// Solve on the refined mesh too and report its values with a
    /// two-level error estimate.
    pub richardson: bool,
}

impl Default for FemConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            richardson: true,
        }
    }
}

fn fold_max(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

/// The `k` smallest eigenpairs on `mesh`. Neumann results carry the constant
/// mode as `lambda_0 = 0` followed by `lambda_1..lambda_k`; Dirichlet results
/// are `lambda_0..lambda_{k-1}` with boundary rows eliminated.
///
/// `init` holds full-length nodal starting vectors (excluding the constant
/// mode).
pub fn solve_smallest(
    mesh: Arc<Mesh>,
    k_mat: &SparseSym,
    m_mat: &SparseSym,
    k: usize,
    bc: BoundaryCondition,
    cfg: &SolverConfig,
    init: Option<&DMatrix<f64>>,
) -> Result<EigenResult> {
    let n = mesh.n_vertices();
    let (pairs, expand): (EigenPairs, Box<dyn Fn(&[f64]) -> Vec<f64>>) = match bc {
        BoundaryCondition::Neumann => {
            let ones = vec![1.0; n];
            let pairs = lobpcg(k_mat, m_mat, k, Some(&ones), init, cfg)?;
            (pairs, Box::new(|v: &[f64]| v.to_vec()))
        }
        BoundaryCondition::Dirichlet => {
            let free: Vec<bool> = mesh.boundary_mask().iter().map(|b| !b).collect();
            let kf = k_mat.submatrix(&free);
            let mf = m_mat.submatrix(&free);
            let init_f = init.map(|x| restrict_rows(x, &free));
            let pairs = lobpcg(&kf, &mf, k, None, init_f.as_ref(), cfg)?;
            let free2 = free.clone();
            (
                pairs,
                Box::new(move |v: &[f64]| {
                    let mut out = vec![0.0; free2.len()];
                    let mut it = v.iter();
                    for (o, &f) in out.iter_mut().zip(&free2) {
                        if f {
                            *o = *it.next().unwrap();
                        }
                    }
                    out
                }),
            )
        }
    };
    let mut values = Vec::with_capacity(k + 1);
    let mut funcs = Vec::with_capacity(k + 1);
    let mut residuals = Vec::with_capacity(k + 1);
    if bc == BoundaryCondition::Neumann {
        let c = 1.0 / m_mat.total_sum().sqrt();
        let constant = vec![c; n];
        let kc = k_mat.mul_vec(&constant);
        values.push(0.0);
        residuals.push(kc.iter().map(|v| v * v).sum::<f64>().sqrt());
        funcs.push(P1Field::new(mesh.clone(), constant)?);
    }
    for j in 0..pairs.values.len() {
        values.push(pairs.values[j]);
        residuals.push(pairs.residuals[j]);
        funcs.push(P1Field::new(
            mesh.clone(),
            expand(pairs.vectors.column(j).as_slice()),
        )?);
    }
    let len = values.len();
    Ok(EigenResult {
        spectrum: Spectrum {
            bc,
            values,
            source: SpectrumSource::Fem,
            error_estimate: 0.0,
        },
        eigenfunctions: funcs,
        residuals,
        error_estimates: vec![0.0; len],
        h: mesh.h(),
        seed: mesh.seed(),
        iterations: pairs.iterations,
    })
}

fn restrict_rows(x: &DMatrix<f64>, keep: &[bool]) -> DMatrix<f64> {
    let rows: Vec<usize> = (0..keep.len()).filter(|&i| keep[i]).collect();
    DMatrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

fn solve_on(
    mesh: Arc<Mesh>,
    bc: BoundaryCondition,
    k: usize,
    cfg: &SolverConfig,
    init: Option<&DMatrix<f64>>,
) -> Result<EigenResult> {
    let (km, mm) = assemble(&mesh)?;
    solve_smallest(mesh, &km, &mm, k, bc, cfg, init)
}

/// Triangulate, assemble and solve; with `cfg.richardson` the refined mesh is
/// solved too (warm-started from the coarse eigenvectors), its values are
/// reported, and `error_estimate = max |lambda_h - lambda_{h/2}| / lambda_{h/2}`.
pub fn spectrum_with(
    body: &ConvexBody,
    bc: BoundaryCondition,
    k: usize,
    h: f64,
    seed: u64,
    cfg: &FemConfig,
) -> Result<EigenResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let poly = body.to_polygon()?;
    let mesh = Mesh::triangulate(&poly, h, seed)?;
    let solver = SolverConfig {
        seed,
        ..cfg.solver.clone()
    };
    let coarse = solve_on(Arc::new(mesh), bc, k, &solver, None)?;
    if !cfg.richardson {
        return Ok(coarse);
    }
    let refinement = coarse.mesh().refine_with_map();
    let skip = usize::from(bc == BoundaryCondition::Neumann);
    let nf = refinement.mesh.n_vertices();
    let coarse_vecs = &coarse.eigenfunctions[skip..];
    let mut init = DMatrix::zeros(nf, coarse_vecs.len());
    for (j, f) in coarse_vecs.iter().enumerate() {
        init.set_column(
            j,
            &nalgebra::DVector::from_vec(refinement.prolongate(f.values())),
        );
    }
    let mut fine = solve_on(Arc::new(refinement.mesh), bc, k, &solver, Some(&init))?;
    let est: Vec<f64> = fine
        .spectrum
        .values
        .iter()
        .zip(&coarse.spectrum.values)
        .map(|(&f, &c)| if f > 0.0 { (c - f).abs() / f } else { 0.0 })
        .collect();
    fine.spectrum.error_estimate = fold_max(&est);
    fine.error_estimates = est;
    fine.h = coarse.h;
    fine.iterations += coarse.iterations;
    Ok(fine)
}

pub fn spectrum(
    body: &ConvexBody,
    bc: BoundaryCondition,
    k: usize,
    h: f64,
    seed: u64,
) -> Result<EigenResult> {
    spectrum_with(body, bc, k, h, seed, &FemConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Polygon};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn reference_triangle_matrices() {
        let mesh = Mesh::from_parts(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
            vec![[0, 1, 2]],
            &[0, 1, 2],
            1.0,
            0,
        )
        .unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        for i in 0..3 {
            let s: f64 = k.row(i).map(|e| e.1).sum();
            assert!(s.abs() < 1e-15);
        }
        assert_relative_eq!(m.total_sum(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(k.get(0, 0), 1.0);
        assert_relative_eq!(k.get(1, 2), 0.0);
        assert!(k.is_symmetric(9, 0, 0.0));
    }

    #[test]
    fn degenerate_triangle_aborts() {
        let mesh = Mesh::from_parts(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.5, 1e-20),
            ],
            vec![[0, 1, 2]],
            &[],
            1.0,
            0,
        )
        .unwrap();
        assert!(matches!(
            assemble(&mesh),
            Err(Error::DegenerateTriangle { .. })
        ));
    }

    #[test]
    fn square_mass_and_constant_mode() {
        let p = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let mesh = Arc::new(Mesh::triangulate(&p, 0.1, 1).unwrap());
        let (k, m) = assemble(&mesh).unwrap();
        assert_relative_eq!(m.total_sum(), 1.0, max_relative = 1e-12);
        let ones = vec![1.0; mesh.n_vertices()];
        let k1 = k.mul_vec(&ones);
        assert!(k1.iter().all(|v| v.abs() < 1e-10));
        let r = solve_smallest(
            mesh,
            &k,
            &m,
            3,
            BoundaryCondition::Neumann,
            &SolverConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.spectrum.values[0], 0.0);
        assert!(r.residuals[0] < 1e-10);
        assert!(m.cholesky_pivots().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn square_neumann_and_dirichlet() {
        let body: ConvexBody = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into();
        let n = spectrum(&body, BoundaryCondition::Neumann, 3, 1.0 / 32.0, 1).unwrap();
        let want = [0.0, PI * PI, PI * PI, 2.0 * PI * PI];
        for (g, w) in n.spectrum.values.iter().zip(want) {
            assert!((g - w).abs() <= 0.01 * w, "{g} vs {w}");
        }
        let d = spectrum(&body, BoundaryCondition::Dirichlet, 1, 1.0 / 32.0, 1).unwrap();
        assert!((d.spectrum.values[0] / (2.0 * PI * PI) - 1.0).abs() < 0.01);
        // orthonormality and Rayleigh quotients
        for res in [&n, &d] {
            let fs = &res.eigenfunctions;
            let (km, mm) = assemble(res.mesh()).unwrap();
            for i in 0..fs.len() {
                for j in 0..fs.len() {
                    let g = mm.bilinear(fs[i].values(), fs[j].values());
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-8, "gram {i} {j} = {g}");
                }
                let rq = km.bilinear(fs[i].values(), fs[i].values());
                let lam = res.spectrum.values[i];
                assert!((rq - lam).abs() <= 1e-8 * lam.max(1.0));
            }
        }
    }
}

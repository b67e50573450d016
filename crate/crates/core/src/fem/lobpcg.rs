//! Locally optimal block preconditioned conjugate gradient for the smallest
//! eigenpairs of `K x = lambda M x`, with a Jacobi preconditioner.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sparse::SparseSym;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Residual tolerance on `|K u - lambda M u|_2 / |u|_M`.
    pub tol: f64,
    pub max_iter: usize,
    /// Block columns beyond the requested count.
    pub extra_block: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 2000,
            extra_block: 5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors, one per column.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// `c = alpha * op(a) * b + beta * c` with `op(a) = a^T` when `ta`.
fn gemm(alpha: f64, a: &DMatrix<f64>, ta: bool, b: &DMatrix<f64>, beta: f64, c: &mut DMatrix<f64>) {
    let (m, k) = if ta {
        (a.ncols(), a.nrows())
    } else {
        (a.nrows(), a.ncols())
    };
    let n = b.ncols();
    assert_eq!(b.nrows(), k);
    assert_eq!((c.nrows(), c.ncols()), (m, n));
    if m == 0 || n == 0 {
        return;
    }
    let lda = a.nrows() as isize;
    let (rsa, csa) = if ta { (lda, 1) } else { (1, lda) };
    // SAFETY: the pointers cover the column-major storage of the three
    // matrices with the strides given, and `c` does not alias `a` or `b`
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            1,
            b.nrows() as isize,
            beta,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
}

/// `a^T b`.
fn atb(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(a.ncols(), b.ncols());
    gemm(1.0, a, true, b, 0.0, &mut c);
    c
}

/// `a b`.
fn ab(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(a.nrows(), b.ncols());
    gemm(1.0, a, false, b, 0.0, &mut c);
    c
}

struct Basis<'a> {
    m: &'a SparseSym,
    /// M-unit deflation vector and its M-image, as single columns.
    defl: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

impl Basis<'_> {
    /// Projects `y` against the deflation vector and the M-orthonormal block
    /// `x` (with `bx = M x`), then M-orthonormalizes it, dropping numerically
    /// dependent directions. Returns `(y, M y)`.
    fn orthonormalize(
        &self,
        mut y: DMatrix<f64>,
        x: Option<(&DMatrix<f64>, &DMatrix<f64>)>,
    ) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut my = self.m.mul_mat(&y);
        for _ in 0..2 {
            if let Some((c, mc)) = &self.defl {
                let coeff = atb(mc, &y);
                gemm(-1.0, c, false, &coeff, 1.0, &mut y);
                gemm(-1.0, mc, false, &coeff, 1.0, &mut my);
            }
            if let Some((x, bx)) = x {
                let coeff = atb(bx, &y);
                gemm(-1.0, x, false, &coeff, 1.0, &mut y);
                gemm(-1.0, bx, false, &coeff, 1.0, &mut my);
            }
            if y.ncols() == 0 {
                break;
            }
            let mut g = atb(&y, &my);
            g = 0.5 * (&g + g.transpose());
            let eig = SymmetricEigen::new(g);
            let dmax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
            let keep: Vec<usize> = (0..eig.eigenvalues.len())
                .filter(|&i| eig.eigenvalues[i] > 1e-12 * dmax && dmax > 0.0)
                .collect();
            let mut t = DMatrix::zeros(eig.eigenvalues.len(), keep.len());
            for (c, &i) in keep.iter().enumerate() {
                let s = 1.0 / eig.eigenvalues[i].sqrt();
                t.set_column(c, &(eig.eigenvectors.column(i) * s));
            }
            y = ab(&y, &t);
            my = ab(&my, &t);
        }
        (y, my)
    }
}

/// Rayleigh-Ritz with an M-orthonormal basis: returns the ascending Ritz
/// values and the coefficient matrix.
fn ritz(a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let a = 0.5 * (&a + a.transpose());
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut c = DMatrix::zeros(eig.eigenvectors.nrows(), order.len());
    for (k, &i) in order.iter().enumerate() {
        c.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, c)
}

fn random_block(n: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// The `count` smallest eigenpairs of `(k, m)`, optionally on the
/// M-orthogonal complement of `deflation`. `init` supplies starting vectors
/// (columns), padded with random ones.
pub fn lobpcg(
    k: &SparseSym,
    m: &SparseSym,
    count: usize,
    deflation: Option<&[f64]>,
    init: Option<&DMatrix<f64>>,
    cfg: &SolverConfig,
) -> Result<EigenPairs> {
    let n = k.dim();
    if m.dim() != n {
        return Err(Error::InvalidArgument("K and M differ in size".into()));
    }
    let avail = n - usize::from(deflation.is_some());
    let bs = count + cfg.extra_block;
    if count == 0 || bs > avail {
        return Err(Error::InvalidArgument(format!(
            "block size {bs} for {count} eigenpairs exceeds the {avail} available dimensions"
        )));
    }
    let defl = deflation.map(|c| {
        let c = DMatrix::from_column_slice(n, 1, c);
        let mc = m.mul_mat(&c);
        let norm = c.dot(&mc).sqrt();
        (c / norm, mc / norm)
    });
    let basis = Basis { m, defl };
    let inv_diag: Vec<f64> = k
        .diag()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x0 = random_block(n, bs, &mut rng);
    if let Some(init) = init {
        for j in 0..init.ncols().min(bs) {
            x0.set_column(j, &init.column(j));
        }
    }
    let (mut x, mut bx) = basis.orthonormalize(x0, None);
    if x.ncols() < bs {
        let extra = random_block(n, bs - x.ncols(), &mut rng);
        let (y, my) = basis.orthonormalize(extra, Some((&x, &bx)));
        x = concat(&x, &y);
        bx = concat(&bx, &my);
    }
    let mut ax = k.mul_mat(&x);
    let (mut lambda, c) = ritz(atb(&x, &ax));
    x = ab(&x, &c);
    ax = ab(&ax, &c);
    bx = ab(&bx, &c);

    let mut p: Option<DMatrix<f64>> = None;
    let mut residuals = vec![f64::INFINITY; bs];
    for it in 0..=cfg.max_iter {
        let mut r = ax.clone();
        for j in 0..bs {
            let mut col = r.column_mut(j);
            col.axpy(-lambda[j], &bx.column(j), 1.0);
            residuals[j] = col.norm();
        }
        if residuals[..count].iter().all(|&res| res <= cfg.tol) {
            return Ok(EigenPairs {
                values: lambda[..count].to_vec(),
                vectors: x.columns(0, count).into_owned(),
                residuals: residuals[..count].to_vec(),
                iterations: it,
            });
        }
        if it == cfg.max_iter {
            break;
        }
        let active: Vec<usize> = (0..bs).filter(|&j| residuals[j] > cfg.tol).collect();
        let mut w = DMatrix::zeros(n, active.len());
        for (c, &j) in active.iter().enumerate() {
            for i in 0..n {
                w[(i, c)] = inv_diag[i] * r[(i, j)];
            }
        }
        let y = match &p {
            Some(p) => concat(&w, p),
            None => w,
        };
        let (y, _) = basis.orthonormalize(y, Some((&x, &bx)));
        if y.ncols() == 0 {
            break;
        }
        let ky = k.mul_mat(&y);
        let nb = bs + y.ncols();
        let mut a = DMatrix::zeros(nb, nb);
        a.view_mut((0, 0), (bs, bs)).copy_from(&atb(&x, &ax));
        let xky = atb(&ax, &y);
        a.view_mut((0, bs), (bs, y.ncols())).copy_from(&xky);
        a.view_mut((bs, 0), (y.ncols(), bs))
            .copy_from(&xky.transpose());
        a.view_mut((bs, bs), (y.ncols(), y.ncols()))
            .copy_from(&atb(&y, &ky));
        let (vals, c) = ritz(a);
        let cx = c.view((0, 0), (bs, bs)).into_owned();
        let cy = c.view((bs, 0), (y.ncols(), bs)).into_owned();
        let py = ab(&y, &cy);
        let mut xn = py.clone();
        gemm(1.0, &x, false, &cx, 1.0, &mut xn);
        x = xn;
        // fresh products and Rayleigh quotients keep the residual honest
        bx = m.mul_mat(&x);
        ax = k.mul_mat(&x);
        lambda = vals[..bs].to_vec();
        for j in 0..bs {
            let nrm = x.column(j).dot(&bx.column(j)).sqrt();
            x.column_mut(j).scale_mut(1.0 / nrm);
            ax.column_mut(j).scale_mut(1.0 / nrm);
            bx.column_mut(j).scale_mut(1.0 / nrm);
            lambda[j] = x.column(j).dot(&ax.column(j));
        }
        let mut pa = DMatrix::zeros(n, active.len());
        for (c, &j) in active.iter().enumerate() {
            pa.set_column(c, &py.column(j));
        }
        p = Some(pa);

        if it % 8 == 7 {
            // restore exact M-orthonormality of the block
            let (xr, bxr) = basis.orthonormalize(x, None);
            if xr.ncols() < bs {
                return Err(Error::NotConverged {
                    iterations: it,
                    max_residual: residuals.iter().cloned().fold(0.0, f64::max),
                    residuals: residuals[..count].to_vec(),
                });
            }
            let axr = k.mul_mat(&xr);
            let (l, c) = ritz(atb(&xr, &axr));
            x = ab(&xr, &c);
            ax = ab(&axr, &c);
            bx = ab(&bxr, &c);
            lambda = l;
        }
    }
    let residuals = residuals[..count].to_vec();
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        max_residual: residuals.iter().cloned().fold(0.0, f64::max),
        residuals,
    })
}

fn concat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Neumann Laplacian on `[0, 1]`, linear elements.
    fn chain(n: usize) -> (SparseSym, SparseSym) {
        let h = 1.0 / (n - 1) as f64;
        let mut kt = Vec::new();
        let mut mt = Vec::new();
        for e in 0..n - 1 {
            let (i, j) = (e, e + 1);
            kt.extend([
                (i, i, 1.0 / h),
                (j, j, 1.0 / h),
                (i, j, -1.0 / h),
                (j, i, -1.0 / h),
            ]);
            mt.extend([
                (i, i, h / 3.0),
                (j, j, h / 3.0),
                (i, j, h / 6.0),
                (j, i, h / 6.0),
            ]);
        }
        (
            SparseSym::from_triplets(n, &kt).unwrap(),
            SparseSym::from_triplets(n, &mt).unwrap(),
        )
    }

    #[test]
    fn matches_dense_solver() {
        let (k, m) = chain(60);
        let ones = vec![1.0; 60];
        let res = lobpcg(&k, &m, 4, Some(&ones), None, &SolverConfig::default()).unwrap();
        // dense reference via M^{-1/2} K M^{-1/2}
        let md = m.to_dense();
        let chol = md.clone().cholesky().unwrap();
        let linv = chol.l().try_inverse().unwrap();
        let a = &linv * k.to_dense() * linv.transpose();
        let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for i in 0..4 {
            assert!((res.values[i] - ev[i + 1]).abs() < 1e-8 * ev[i + 1], "{i}");
        }
        assert!(res.residuals.iter().all(|&r| r <= 1e-8));
        // M-orthonormal
        let g = res.vectors.transpose() * m.mul_mat(&res.vectors);
        assert!((g - DMatrix::identity(4, 4)).abs().max() < 1e-8);
        // continuum value pi^2 within discretization error
        assert!((res.values[0] / std::f64::consts::PI.powi(2) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn block_too_large_rejected() {
        let (k, m) = chain(6);
        assert!(lobpcg(&k, &m, 2, None, None, &SolverConfig::default()).is_err());
    }

    #[test]
    fn iteration_cap_reports_residuals() {
        let (k, m) = chain(400);
        let cfg = SolverConfig {
            max_iter: 2,
            ..Default::default()
        };
        match lobpcg(&k, &m, 3, None, None, &cfg) {
            Err(Error::NotConverged { residuals, .. }) => assert_eq!(residuals.len(), 3),
            other => panic!("{other:?}"),
        }
    }
}

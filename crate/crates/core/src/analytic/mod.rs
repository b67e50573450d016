//! Closed-form Laplacian spectra of boxes and disks.
//!
//! Convention: `values[k]` is `lambda_k`. Neumann spectra start with the
//! constant mode `lambda_0 = 0`; Dirichlet spectra start with the ground
//! state. `lambda_1^N([0,1]^n) = pi^2`.

mod bessel_zeros;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use bessel_zeros::{JP_CUTOFF, JP_ZEROS, J_CUTOFF, J_ZEROS};

/// Lattice points visited by `box_spectrum` before giving up.
pub const ENUMERATION_CAP: usize = 1_000_000;

/// Largest eigenvalue count served by `disk_spectrum`.
pub const DISK_TABLE_LIMIT: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neumann" | "n" => Ok(Self::Neumann),
            "dirichlet" | "d" => Ok(Self::Dirichlet),
            _ => Err(Error::Unknown {
                kind: "boundary condition",
                name: s.into(),
            }),
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Neumann => "neumann",
            Self::Dirichlet => "dirichlet",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    Analytic,
    Fem,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub bc: BoundaryCondition,
    /// Ascending eigenvalues in 1/length^2.
    pub values: Vec<f64>,
    pub source: SpectrumSource,
    /// Relative error estimate (0 for closed forms).
    pub error_estimate: f64,
}

impl Spectrum {
    pub fn analytic(bc: BoundaryCondition, values: Vec<f64>) -> Self {
        Self {
            bc,
            values,
            source: SpectrumSource::Analytic,
            error_estimate: 0.0,
        }
    }

    /// `lambda_k` under the indexing convention of this module.
    pub fn lambda(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spectrum of the body scaled by `r`: every value divided by `r^2`.
    pub fn scaled(&self, r: f64) -> Spectrum {
        Spectrum {
            values: self.values.iter().map(|v| v / (r * r)).collect(),
            ..self.clone()
        }
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Precondition("spectrum not ascending".into()));
        }
        if self.values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::Precondition(
                "negative or non-finite eigenvalue".into(),
            ));
        }
        if self.bc == BoundaryCondition::Neumann {
            if let Some(&v0) = self.values.first() {
                let scale = self.values.last().copied().unwrap_or(1.0).max(1.0);
                if v0 > self.error_estimate.max(1e-9) * scale {
                    return Err(Error::Precondition(format!(
                        "Neumann spectrum starts at {v0}, not 0"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn enumerate_box(
    inv_len_sq: &[f64],
    min_index: u64,
    cap: f64,
    budget: &mut usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    fn rec(
        dim: usize,
        inv_len_sq: &[f64],
        min_index: u64,
        partial: f64,
        cap: f64,
        budget: &mut usize,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        if dim == inv_len_sq.len() {
            out.push(partial);
            return Ok(());
        }
        let mut k = min_index;
        loop {
            let term = PI * PI * (k * k) as f64 * inv_len_sq[dim];
            if partial + term > cap {
                return Ok(());
            }
            if *budget == 0 {
                return Err(Error::EnumerationCap {
                    cap: ENUMERATION_CAP,
                });
            }
            *budget -= 1;
            rec(
                dim + 1,
                inv_len_sq,
                min_index,
                partial + term,
                cap,
                budget,
                out,
            )?;
            k += 1;
        }
    }
    rec(0, inv_len_sq, min_index, 0.0, cap, budget, out)
}

/// The `count` smallest eigenvalues `pi^2 sum_i (k_i / L_i)^2` of the box with
/// side lengths `lengths`, with multiplicity. Neumann uses `k_i >= 0`,
/// Dirichlet `k_i >= 1`.
pub fn box_spectrum(lengths: &[f64], bc: BoundaryCondition, count: usize) -> Result<Spectrum> {
    if lengths.is_empty() || lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidArgument(
            "box lengths must be positive".into(),
        ));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    let inv_len_sq: Vec<f64> = lengths.iter().map(|l| 1.0 / (l * l)).collect();
    let min_index = match bc {
        BoundaryCondition::Neumann => 0,
        BoundaryCondition::Dirichlet => 1,
    };
    // every Dirichlet mode is at least the ground state; start there so the
    // first pass already contains something
    let mut cap = PI * PI * inv_len_sq.iter().sum::<f64>();
    let mut budget = ENUMERATION_CAP;
    loop {
        let mut vals = Vec::new();
        enumerate_box(&inv_len_sq, min_index, cap, &mut budget, &mut vals)?;
        if vals.len() >= count {
            vals.sort_by(f64::total_cmp);
            vals.truncate(count);
            return Ok(Spectrum::analytic(bc, vals));
        }
        cap *= 2.0;
    }
}

/// The `count` smallest eigenvalues of the disk of radius `radius`, from the
/// embedded Bessel-zero table: `z^2 / radius^2` with multiplicity 2 for
/// angular order `m >= 1`.
pub fn disk_spectrum(radius: f64, bc: BoundaryCondition, count: usize) -> Result<Spectrum> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be > 0, got {radius}"
        )));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    let (table, cutoff) = match bc {
        BoundaryCondition::Neumann => (&JP_ZEROS, JP_CUTOFF),
        BoundaryCondition::Dirichlet => (&J_ZEROS, J_CUTOFF),
    };
    let mut zs: Vec<f64> = Vec::new();
    if bc == BoundaryCondition::Neumann {
        zs.push(0.0);
    }
    for (m, row) in table.iter().enumerate() {
        for &z in row.iter().take_while(|&&z| z < cutoff) {
            zs.push(z);
            if m > 0 {
                zs.push(z);
            }
        }
    }
    zs.sort_by(f64::total_cmp);
    let available = zs.len().min(DISK_TABLE_LIMIT);
    if count > available {
        return Err(Error::TableExhausted {
            requested: count,
            available,
        });
    }
    let values = zs[..count]
        .iter()
        .map(|z| z * z / (radius * radius))
        .collect();
    Ok(Spectrum::analytic(bc, values))
}

/// First Neumann eigenvalue of a vanishing-width box along the diagonal of
/// the unit n-cube: `pi^2 / n`.
pub fn needle_prediction(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    Ok(PI * PI / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use BoundaryCondition::*;

    const P2: f64 = PI * PI;

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12, max_relative = 1e-13);
        }
    }

    #[test]
    fn interval_and_square_by_separation_of_variables() {
        close(
            &box_spectrum(&[1.0], Neumann, 3).unwrap().values,
            &[0.0, P2, 4.0 * P2],
        );
        close(
            &box_spectrum(&[1.0, 1.0], Neumann, 4).unwrap().values,
            &[0.0, P2, P2, 2.0 * P2],
        );
        close(
            &box_spectrum(&[1.0], Dirichlet, 2).unwrap().values,
            &[P2, 4.0 * P2],
        );
    }

    #[test]
    fn square_neumann_first_six() {
        // (k1,k2): (0,0) (1,0) (0,1) (1,1) (2,0) (0,2)
        close(
            &box_spectrum(&[1.0, 1.0], Neumann, 6).unwrap().values,
            &[0.0, P2, P2, 2.0 * P2, 4.0 * P2, 4.0 * P2],
        );
    }

    #[test]
    fn enumeration_cap_reported() {
        let err = box_spectrum(&[1.0; 12], Neumann, 500_000).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { .. }));
    }

    #[test]
    fn disk_values() {
        let n = disk_spectrum(1.0, Neumann, 2).unwrap();
        assert_eq!(n.values[0], 0.0);
        assert_relative_eq!(n.values[1], 3.3900, epsilon = 1e-4);
        let d = disk_spectrum(1.0, Dirichlet, 1).unwrap();
        assert_relative_eq!(d.values[0], 5.7832, epsilon = 1e-4);
        let d2 = disk_spectrum(2.0, Dirichlet, 10).unwrap();
        let d1 = disk_spectrum(1.0, Dirichlet, 10).unwrap();
        for (a, b) in d2.values.iter().zip(&d1.values) {
            assert_relative_eq!(*a, b / 4.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn disk_multiplicities() {
        let n = disk_spectrum(1.0, Neumann, 6).unwrap().values;
        // 0, j'_11 (x2), j'_21 (x2), j'_01
        assert_eq!(n[1], n[2]);
        assert_eq!(n[3], n[4]);
        assert_relative_eq!(n[5].sqrt(), 3.831705970207512, max_relative = 1e-12);
    }

    fn series_j(m: usize, x: f64) -> f64 {
        // sum_k (-1)^k (x/2)^(2k+m) / (k! (k+m)!)
        let mut term = (0..m).fold(1.0, |t, i| t * (x / 2.0) / (i + 1) as f64);
        let mut sum = term;
        for k in 1..200 {
            term *= -(x / 2.0) * (x / 2.0) / (k as f64 * (k + m) as f64);
            sum += term;
        }
        sum
    }

    fn series_jp(m: usize, x: f64) -> f64 {
        if m == 0 {
            -series_j(1, x)
        } else {
            0.5 * (series_j(m - 1, x) - series_j(m + 1, x))
        }
    }

    #[test]
    fn table_matches_power_series() {
        for m in 0..bessel_zeros::J_ZEROS.len() {
            for &z in bessel_zeros::J_ZEROS[m].iter().filter(|&&z| z < 16.0) {
                let d = 1e-7;
                assert!(series_j(m, z).abs() < 1e-9, "J_{m}({z})");
                assert!(series_j(m, z - d) * series_j(m, z + d) < 0.0);
            }
            for &z in bessel_zeros::JP_ZEROS[m].iter().filter(|&&z| z < 16.0) {
                let d = 1e-7;
                assert!(series_jp(m, z).abs() < 1e-9, "J'_{m}({z})");
                assert!(series_jp(m, z - d) * series_jp(m, z + d) < 0.0);
            }
        }
        assert!(series_j(11, J_CUTOFF).abs() < 1e-9);
        assert!(series_jp(11, JP_CUTOFF).abs() < 1e-9);
    }

    #[test]
    fn published_zeros() {
        assert_relative_eq!(J_ZEROS[0][0], 2.404825557695773, max_relative = 1e-14);
        assert_relative_eq!(JP_ZEROS[1][0], 1.841183781340659, max_relative = 1e-14);
        assert_relative_eq!(J_ZEROS[1][0], 3.831705970207512, max_relative = 1e-14);
    }

    #[test]
    fn disk_table_limit() {
        assert!(disk_spectrum(1.0, Neumann, 30).is_ok());
        assert!(disk_spectrum(1.0, Dirichlet, 30).is_ok());
        assert!(matches!(
            disk_spectrum(1.0, Neumann, 31),
            Err(Error::TableExhausted { .. })
        ));
    }

    #[test]
    fn needle_law() {
        assert_relative_eq!(needle_prediction(1).unwrap(), P2);
        assert_relative_eq!(needle_prediction(2).unwrap(), P2 / 2.0);
        for n in 1..=6 {
            let cube = box_spectrum(&vec![1.0; n], Neumann, 2).unwrap().values[1];
            assert_relative_eq!(needle_prediction(n).unwrap() / cube, 1.0 / n as f64);
        }
        assert!(needle_prediction(0).is_err());
    }

    #[test]
    fn dirichlet_monotone_on_nested_boxes() {
        let small = box_spectrum(&[1.0, 1.0], Dirichlet, 12).unwrap().values;
        let big = box_spectrum(&[2.0, 2.0], Dirichlet, 12).unwrap().values;
        for (s, b) in small.iter().zip(&big) {
            assert!(b <= s);
        }
    }

    #[test]
    fn scaling_covariance() {
        let base = box_spectrum(&[1.0, 0.5], Neumann, 10).unwrap();
        let scaled = box_spectrum(&[3.0, 1.5], Neumann, 10).unwrap();
        close(&scaled.values, &base.scaled(3.0).values);
    }

    #[test]
    fn invariants_hold() {
        box_spectrum(&[1.0, 2.0, 0.7], Neumann, 20)
            .unwrap()
            .check_invariants()
            .unwrap();
        disk_spectrum(1.3, Dirichlet, 25)
            .unwrap()
            .check_invariants()
            .unwrap();
    }
}

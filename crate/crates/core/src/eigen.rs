//! Dense Hermitian eigendecomposition and functions of Hermitian matrices.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative residual above which a decomposition is rejected.
const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
enum Vectors {
    /// Column-major, `dim * dim`.
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// `H = V diag(values) V^H` with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    dim: usize,
    values: Vec<f64>,
    vectors: Vectors,
}

impl HermitianEigen {
    /// Decomposes the `dim x dim` row-major matrix `entries`, which must
    /// already be Hermitian. Purely real input takes the real symmetric path.
    pub fn decompose(dim: usize, entries: &[Complex64]) -> Result<Self> {
        assert_eq!(entries.len(), dim * dim);
        if dim == 0 {
            return Ok(HermitianEigen {
                dim,
                values: Vec::new(),
                vectors: Vectors::Real(Vec::new()),
            });
        }
        let real = entries.iter().all(|z| z.im == 0.0);
        let (values, vectors) = if real {
            let m = Mat::<f64>::from_fn(dim, dim, |i, j| entries[i * dim + j].re);
            let eig = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|_| Error::Eigen { residual: f64::NAN })?;
            let s = eig.S().column_vector();
            let u = eig.U();
            let values: Vec<f64> = (0..dim).map(|k| s[k]).collect();
            let mut cols = vec![0.0; dim * dim];
            for k in 0..dim {
                for i in 0..dim {
                    cols[k * dim + i] = u[(i, k)];
                }
            }
            (values, Vectors::Real(cols))
        } else {
            let m = Mat::<Complex64>::from_fn(dim, dim, |i, j| entries[i * dim + j]);
            let eig = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|_| Error::Eigen { residual: f64::NAN })?;
            let s = eig.S().column_vector();
            let u = eig.U();
            let values: Vec<f64> = (0..dim).map(|k| s[k].re).collect();
            let mut cols = vec![Complex64::new(0.0, 0.0); dim * dim];
            for k in 0..dim {
                for i in 0..dim {
                    cols[k * dim + i] = u[(i, k)];
                }
            }
            (values, Vectors::Complex(cols))
        };
        let mut eig = HermitianEigen {
            dim,
            values,
            vectors,
        };
        eig.sort();
        let residual = eig.residual(entries);
        if !(residual <= RESIDUAL_TOLERANCE) {
            return Err(Error::Eigen { residual });
        }
        Ok(eig)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Component `i` of eigenvector `k`.
    pub fn vector_entry(&self, i: usize, k: usize) -> Complex64 {
        match &self.vectors {
            Vectors::Real(v) => Complex64::new(v[k * self.dim + i], 0.0),
            Vectors::Complex(v) => v[k * self.dim + i],
        }
    }

    fn dominant_index(&self, k: usize) -> usize {
        (0..self.dim)
            .max_by(|&i, &j| {
                self.vector_entry(i, k)
                    .norm_sqr()
                    .total_cmp(&self.vector_entry(j, k).norm_sqr())
                    .then(j.cmp(&i))
            })
            .unwrap_or(0)
    }

    /// Ascending eigenvalues; exact ties ordered by the index of the largest
    /// eigenvector component.
    fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.dim).collect();
        let dominant: Vec<usize> = (0..self.dim).map(|k| self.dominant_index(k)).collect();
        order.sort_by(|&p, &q| {
            self.values[p]
                .total_cmp(&self.values[q])
                .then(dominant[p].cmp(&dominant[q]))
        });
        if order.iter().enumerate().all(|(i, &k)| i == k) {
            return;
        }
        let n = self.dim;
        self.values = order.iter().map(|&k| self.values[k]).collect();
        self.vectors = match &self.vectors {
            Vectors::Real(v) => Vectors::Real(
                order
                    .iter()
                    .flat_map(|&k| v[k * n..(k + 1) * n].iter().copied())
                    .collect(),
            ),
            Vectors::Complex(v) => Vectors::Complex(
                order
                    .iter()
                    .flat_map(|&k| v[k * n..(k + 1) * n].iter().copied())
                    .collect(),
            ),
        };
    }

    /// `V^H x`.
    fn to_eigenbasis(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        match &self.vectors {
            Vectors::Real(v) => (0..n)
                .map(|k| {
                    let col = &v[k * n..(k + 1) * n];
                    col.iter().zip(x).map(|(&c, z)| z * c).sum()
                })
                .collect(),
            Vectors::Complex(v) => (0..n)
                .map(|k| {
                    let col = &v[k * n..(k + 1) * n];
                    col.iter().zip(x).map(|(c, z)| c.conj() * z).sum()
                })
                .collect(),
        }
    }

    /// `V c`.
    fn from_eigenbasis(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        match &self.vectors {
            Vectors::Real(v) => {
                for (k, ck) in c.iter().enumerate() {
                    let col = &v[k * n..(k + 1) * n];
                    out.iter_mut().zip(col).for_each(|(o, &vi)| *o += ck * vi);
                }
            }
            Vectors::Complex(v) => {
                for (k, ck) in c.iter().enumerate() {
                    let col = &v[k * n..(k + 1) * n];
                    out.iter_mut().zip(col).for_each(|(o, vi)| *o += ck * vi);
                }
            }
        }
        out
    }

    /// `f(H) x = V diag(f(values)) V^H x`.
    pub fn apply_fn(&self, x: &[Complex64], f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut c = self.to_eigenbasis(x);
        c.iter_mut()
            .zip(&self.values)
            .for_each(|(ck, &lam)| *ck *= f(lam));
        self.from_eigenbasis(&c)
    }

    /// `V diag(multipliers) V^H x` with precomputed multipliers.
    pub(crate) fn apply_multipliers(
        &self,
        x: &[Complex64],
        multipliers: &[Complex64],
    ) -> Vec<Complex64> {
        let mut c = self.to_eigenbasis(x);
        c.iter_mut().zip(multipliers).for_each(|(ck, m)| *ck *= m);
        self.from_eigenbasis(&c)
    }

    /// Relative residual `||H x - V L V^H x|| / (||x|| max(1, |L|))` on a
    /// fixed probe vector.
    fn residual(&self, entries: &[Complex64]) -> f64 {
        let n = self.dim;
        let probe: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 + j as f64 / n as f64, (j % 7) as f64 / 7.0))
            .collect();
        let direct: Vec<Complex64> = (0..n)
            .map(|i| {
                entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(&probe)
                    .map(|(h, x)| h * x)
                    .sum()
            })
            .collect();
        let spectral = self.apply_fn(&probe, |lam| Complex64::new(lam, 0.0));
        let err = direct
            .iter()
            .zip(&spectral)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm = probe.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = self.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        err / (norm * scale)
    }
}

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_traits::Float;
use statrs::function::erf::erfc;

use crate::data::Dataset;
use crate::Scalar;

use super::{check_alpha, CiError, CiOutcome, CiQuery, CiTest};

/// Fisher-z test on partial correlations. The sample correlation matrix is
/// computed once; each query inverts only the sub-matrix it touches.
#[derive(Debug, Clone)]
pub struct FisherZ<T: Scalar> {
    index: HashMap<String, usize>,
    corr: DMatrix<T>,
    n: usize,
    alpha: f64,
}

impl<T: Scalar> FisherZ<T> {
    pub fn new(data: &Dataset<T>, alpha: f64) -> Result<Self, CiError> {
        let alpha = check_alpha(alpha)?;
        let n = data.n_rows();
        let p = data.n_cols();
        let nt = T::from_usize(n.max(1)).expect("row count fits scalar");
        let centered: Vec<Vec<T>> = (0..p)
            .map(|j| {
                let col = data.column_at(j);
                let mean = col.iter().fold(T::zero(), |s, &v| s + v) / nt;
                col.iter().map(|&v| v - mean).collect()
            })
            .collect();
        let mut cov = DMatrix::<T>::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let s = centered[i]
                    .iter()
                    .zip(&centered[j])
                    .fold(T::zero(), |s, (&a, &b)| s + a * b);
                cov[(i, j)] = s;
                cov[(j, i)] = s;
            }
        }
        let sd: Vec<T> = (0..p).map(|i| Float::sqrt(cov[(i, i)])).collect();
        let corr = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                T::one()
            } else {
                cov[(i, j)] / (sd[i] * sd[j])
            }
        });
        let index = data
            .columns()
            .iter()
            .enumerate()
            .map(|(j, c)| (c.clone(), j))
            .collect();
        Ok(FisherZ { index, corr, n, alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Partial correlation of the query pair given its conditioning set,
    /// or `None` when the correlation sub-matrix is singular or degenerate.
    pub fn partial_correlation(&self, q: &CiQuery) -> Result<Option<T>, CiError> {
        let idx = q
            .variables()
            .map(|v| {
                self.index
                    .get(v)
                    .copied()
                    .ok_or_else(|| CiError::UnknownVariable(v.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rho = if idx.len() == 2 {
            self.corr[(idx[0], idx[1])]
        } else {
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.corr[(idx[i], idx[j])]);
            let eig = sub.clone().symmetric_eigenvalues();
            let (lo, hi) = eig.iter().fold((Float::max_value(), Float::min_value()), |(lo, hi), &e| {
                (Float::min(lo, e), Float::max(hi, e))
            });
            if !(lo > hi * T::from_f64_lossy(1e-10)) {
                return Ok(None);
            }
            let Some(prec) = sub.try_inverse() else {
                return Ok(None);
            };
            -prec[(0, 1)] / Float::sqrt(prec[(0, 0)] * prec[(1, 1)])
        };
        Ok(Float::is_finite(rho).then_some(rho))
    }
}

impl<T: Scalar> CiTest for FisherZ<T> {
    fn test(&self, q: &CiQuery) -> Result<CiOutcome, CiError> {
        let k = q.cond().len();
        if self.n <= k + 3 {
            return Err(CiError::InsufficientSamples { n: self.n, cond: k });
        }
        let Some(rho) = self.partial_correlation(q)? else {
            return Ok(CiOutcome::inconclusive());
        };
        let bound = T::one() - T::from_f64_lossy(1e-7);
        let rho = Float::min(Float::max(rho, -bound), bound);
        let z = Float::atanh(rho);
        let scale = T::from_usize(self.n - k - 3).expect("sample count fits scalar");
        let stat = (Float::sqrt(scale) * Float::abs(z)).to_f64_lossy();
        let p = erfc(stat / std::f64::consts::SQRT_2);
        Ok(CiOutcome::from_p_value(p, stat, self.alpha))
    }
}

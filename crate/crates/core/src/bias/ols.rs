use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Least-squares fit of `target ~ features + intercept + group`.
///
/// Coefficients are laid out as one per feature column, then the
/// intercept, then the group indicator. The group coefficient is the
/// additive bias estimate: a negative value means members of the indicated
/// group score lower than otherwise-identical non-members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct RegressionFit<T> {
    pub coefficients: Vec<T>,
    pub residual_sd: T,
    pub n: usize,
}

impl<T: Scalar> RegressionFit<T> {
    pub fn feature_coefficients(&self) -> &[T] {
        &self.coefficients[..self.coefficients.len() - 2]
    }

    pub fn intercept(&self) -> T {
        self.coefficients[self.coefficients.len() - 2]
    }

    pub fn group_coefficient(&self) -> T {
        self.coefficients[self.coefficients.len() - 1]
    }

    pub fn predict(&self, features: &[T], group: T) -> T {
        self.feature_coefficients()
            .iter()
            .zip(features)
            .fold(self.intercept() + self.group_coefficient() * group, |acc, (&w, &x)| {
                acc + w * x
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OlsOptions<T> {
    /// Ridge penalty added to the Gram diagonal. Off unless set.
    pub ridge: Option<T>,
}

/// Ordinary least squares via the normal equations.
pub fn fit_ols<T: Scalar>(
    features: &[Vec<T>],
    group_indicator: &[T],
    targets: &[T],
) -> Result<RegressionFit<T>> {
    fit_ols_with(features, group_indicator, targets, OlsOptions { ridge: None })
}

pub fn fit_ols_with<T: Scalar>(
    features: &[Vec<T>],
    group_indicator: &[T],
    targets: &[T],
    options: OlsOptions<T>,
) -> Result<RegressionFit<T>> {
    let n = targets.len();
    check_len("features", n, features.len())?;
    check_len("group_indicator", n, group_indicator.len())?;
    let width = features.first().map_or(0, Vec::len);
    for row in features {
        check_len("feature row", width, row.len())?;
    }
    let p = width + 2;
    if n <= p {
        return Err(Error::InsufficientRows { rows: n, coefficients: p });
    }

    let row = |i: usize| -> Vec<T> {
        let mut r = features[i].clone();
        r.push(T::one());
        r.push(group_indicator[i]);
        r
    };

    let mut gram = vec![vec![T::zero(); p]; p];
    let mut moment = vec![T::zero(); p];
    for i in 0..n {
        let x = row(i);
        for a in 0..p {
            moment[a] = moment[a] + x[a] * targets[i];
            for b in 0..=a {
                gram[a][b] = gram[a][b] + x[a] * x[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[b][a] = gram[a][b];
        }
        if let Some(lambda) = options.ridge {
            gram[a][a] = gram[a][a] + lambda;
        }
    }

    let chol = cholesky(&gram)?;
    let y = forward_sub(&chol, &moment);
    let coefficients = backward_sub_transposed(&chol, &y);

    let mut rss = T::zero();
    for i in 0..n {
        let x = row(i);
        let fitted = x.iter().zip(&coefficients).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        let r = targets[i] - fitted;
        rss = rss + r * r;
    }
    let dof = T::from_usize(n - p).expect("count fits scalar");
    Ok(RegressionFit {
        coefficients,
        residual_sd: (rss / dof).sqrt(),
        n,
    })
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { what, expected, found })
    }
}

fn rank_tolerance<T: Scalar>() -> T {
    T::epsilon().sqrt() * T::lit(1e-2)
}

/// Lower-triangular Cholesky factor, columns processed left to right. A
/// column whose residual pivot vanishes relative to its own norm is a
/// linear combination of the columns before it.
fn cholesky<T: Scalar>(gram: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let p = gram.len();
    let mut l = vec![vec![T::zero(); p]; p];
    for j in 0..p {
        let mut d = gram[j][j];
        for k in 0..j {
            d = d - l[j][k] * l[j][k];
        }
        if !(gram[j][j] > T::zero()) || d <= gram[j][j] * rank_tolerance() {
            return Err(Error::RankDeficient {
                column: j,
                depends_on: dependency(&l, gram, j),
            });
        }
        let pivot = d.sqrt();
        l[j][j] = pivot;
        for i in (j + 1)..p {
            let mut s = gram[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            l[i][j] = s / pivot;
        }
    }
    Ok(l)
}

/// Columns `< j` that column `j` is built from: solve for its coordinates in
/// the span of the already-factored columns and keep the nonzero ones.
fn dependency<T: Scalar>(l: &[Vec<T>], gram: &[Vec<T>], j: usize) -> Vec<usize> {
    if j == 0 {
        return Vec::new();
    }
    let lead: Vec<Vec<T>> = l[..j].iter().map(|r| r[..j].to_vec()).collect();
    let rhs: Vec<T> = (0..j).map(|i| gram[i][j]).collect();
    let coords = backward_sub_transposed(&lead, &forward_sub(&lead, &rhs));
    let scale = coords.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    if scale == T::zero() {
        return Vec::new();
    }
    coords
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > scale * rank_tolerance())
        .map(|(i, _)| i)
        .collect()
}

fn forward_sub<T: Scalar>(l: &[Vec<T>], b: &[T]) -> Vec<T> {
    let p = b.len();
    let mut y = vec![T::zero(); p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    y
}

fn backward_sub_transposed<T: Scalar>(l: &[Vec<T>], y: &[T]) -> Vec<T> {
    let p = y.len();
    let mut x = vec![T::zero(); p];
    for i in (0..p).rev() {
        let mut s = y[i];
        for k in (i + 1)..p {
            s = s - l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

//! Real-valued cochains and the least-squares coboundary solver.

use nalgebra::{DMatrix, DVector, SVD};
use num_traits::ToPrimitive;

use crate::cohomology::complex::{FundamentalCycle, SimplicialComplex};
use crate::cohomology::group::{Cohomology, Ring};
use crate::cohomology::matrix::IntMatrix;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct RealCochain<R: Real> {
    pub level: usize,
    pub values: Vec<R>,
}

impl<R: Real> RealCochain<R> {
    pub fn new(k: &SimplicialComplex, level: usize, values: Vec<R>) -> Result<Self> {
        if values.len() != k.count(level) {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} simplices of dimension {level}",
                values.len(),
                k.count(level)
            )));
        }
        Ok(Self { level, values })
    }

    pub fn zero(k: &SimplicialComplex, level: usize) -> Self {
        Self { level, values: vec![R::zero(); k.count(level)] }
    }

    pub fn coboundary(&self, k: &SimplicialComplex) -> RealCochain<R> {
        let d: DMatrix<R> = real_matrix(&k.coboundary_unchecked(self.level));
        let v = d * DVector::from_column_slice(&self.values);
        RealCochain { level: self.level + 1, values: v.iter().copied().collect() }
    }

    pub fn norm(&self) -> R {
        DVector::from_column_slice(&self.values).norm()
    }
}

fn real_matrix<R: Real>(m: &IntMatrix) -> DMatrix<R> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| lit(m.get(r, c).to_f64().expect("small integer")))
}

fn least_squares<R: Real>(m: DMatrix<R>, b: &DVector<R>) -> Result<DVector<R>> {
    if m.ncols() == 0 {
        return Ok(DVector::zeros(0));
    }
    let dim = m.nrows().max(m.ncols());
    let svd = SVD::new(m, true, true);
    let smax = svd.singular_values.iter().copied().fold(R::zero(), |a, b| a.max(b));
    let eps = smax * lit::<R>(dim as f64) * <R as Real>::epsilon() * lit::<R>(16.0);
    svd.solve(b, eps).map_err(|e| Error::Numerical(e.to_string()))
}

/// Some `h` with `δh = g`, where `g` is a real `(k+1)`-cochain. Fails with
/// [`Error::NotExact`] when the least-squares residual `‖δh − g‖₂` exceeds
/// `tol`.
pub fn solve_real_coboundary<R: Real>(
    k: &SimplicialComplex,
    g: &RealCochain<R>,
    tol: R,
) -> Result<RealCochain<R>> {
    if g.level == 0 {
        return Err(Error::OutOfRange("level-0 cochains are not coboundaries".into()));
    }
    if g.values.len() != k.count(g.level) {
        return Err(Error::DimensionMismatch("cochain does not match complex".into()));
    }
    let d = real_matrix::<R>(&k.coboundary_unchecked(g.level - 1));
    let b = DVector::from_column_slice(&g.values);
    let h = least_squares(d.clone(), &b)?;
    let residual = (d * &h - b).norm();
    if residual > tol {
        return Err(Error::NotExact(to_f64(residual)));
    }
    Ok(RealCochain { level: g.level - 1, values: h.iter().copied().collect() })
}

pub fn evaluate_real<R: Real>(c: &RealCochain<R>, cycle: &FundamentalCycle) -> Result<R> {
    if c.level != cycle.dim || c.values.len() != cycle.signs.len() {
        return Err(Error::DimensionMismatch("cochain level differs from cycle dimension".into()));
    }
    Ok(c.values.iter().zip(&cycle.signs).fold(R::zero(), |acc, (&v, &s)| acc + v * lit(s as f64)))
}

/// Real coordinates of a real cocycle in the free generator basis of `h`.
pub fn classify_real<R: Real>(
    h: &Cohomology,
    k: &SimplicialComplex,
    c: &RealCochain<R>,
    tol: R,
) -> Result<Vec<R>> {
    if matches!(h.ring, Ring::ModP(_)) {
        return Err(Error::InvalidInput("real classification needs integral or real cohomology".into()));
    }
    if c.level != h.degree || c.values.len() != k.count(c.level) {
        return Err(Error::DimensionMismatch("cochain does not match cohomology degree".into()));
    }
    if c.level < k.dim() && c.coboundary(k).norm() > tol {
        return Err(Error::NotCocycle);
    }
    let n = k.count(c.level);
    let mut cols: Vec<DVector<R>> = Vec::new();
    if c.level > 0 {
        let a = real_matrix::<R>(&k.coboundary_unchecked(c.level - 1));
        cols.extend(a.column_iter().map(|col| col.into_owned()));
    }
    let n_image = cols.len();
    let t = h.group.torsion.len();
    for g in &h.group.generators[t..] {
        cols.push(DVector::from_iterator(n, g.iter().map(|x| lit::<R>(x.to_f64().expect("small")))));
    }
    if cols.is_empty() {
        return Ok(Vec::new());
    }
    let m = DMatrix::from_columns(&cols);
    let b = DVector::from_column_slice(&c.values);
    let y = least_squares(m.clone(), &b)?;
    let residual = (m * &y - b).norm();
    if residual > tol {
        return Err(Error::Inconsistent(format!("classification residual {:e}", to_f64(residual))));
    }
    Ok(y.iter().skip(n_image).copied().collect())
}

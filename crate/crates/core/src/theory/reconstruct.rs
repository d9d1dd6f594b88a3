//! Column-rank test on bag-generation matrices and the ambiguous pair built
//! from a null-space vector.

use nalgebra::DMatrix;

use crate::distribution::{BagGenMatrix, LabelDistribution};
use crate::error::{Error, Result};
use crate::labels::argmax_set;

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

fn to_dmatrix(m: &BagGenMatrix) -> DMatrix<f64> {
    let c = m.label_space().len();
    DMatrix::from_row_slice(m.num_rows(), c, m.entries())
}

/// Singular values with the matching right singular vectors, descending.
fn spectrum(m: &BagGenMatrix) -> Result<Vec<(f64, Vec<f64>)>> {
    let a = to_dmatrix(m);
    if a.nrows() < a.ncols() {
        return Err(Error::InvalidParameter(format!(
            "bag-generation matrix has fewer rows ({}) than labels ({})",
            a.nrows(),
            a.ncols()
        )));
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::InvalidParameter("SVD did not converge".into()))?;
    let mut pairs: Vec<(f64, Vec<f64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, v_t.row(i).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(pairs)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("rank tolerance must lie in (0,1), got {tol}")));
    }
    Ok(())
}

/// `true` iff the columns are linearly independent: the smallest singular
/// value exceeds `tol` times the largest.
pub fn is_reconstructible(m: &BagGenMatrix, tol: f64) -> Result<bool> {
    check_tol(tol)?;
    let s = spectrum(m)?;
    let largest = s[0].0;
    let smallest = s[s.len() - 1].0;
    Ok(smallest > tol * largest)
}

/// For dependent columns, two label distributions with equal bag marginals
/// and different argmax sets; `None` when the columns are independent.
///
/// Each candidate comes from a null-space vector `q`: since every column sums
/// to one, `q` sums to zero and its positive and negative parts carry equal
/// mass, so `q+ / |q+|` and `q- / |q-|` induce the same marginal.
pub fn find_ambiguous_pair(m: &BagGenMatrix, tol: f64) -> Result<Option<(LabelDistribution, LabelDistribution)>> {
    check_tol(tol)?;
    let s = spectrum(m)?;
    let largest = s[0].0;
    let null: Vec<&Vec<f64>> = s.iter().filter(|(sv, _)| *sv <= tol * largest).map(|(_, v)| v).collect();
    if null.is_empty() {
        return Ok(None);
    }
    let mut candidates: Vec<Vec<f64>> = null.iter().map(|v| (*v).clone()).collect();
    for i in 0..null.len() {
        for j in i + 1..null.len() {
            candidates.push(null[i].iter().zip(null[j]).map(|(a, b)| a + b).collect());
            candidates.push(null[i].iter().zip(null[j]).map(|(a, b)| a - b).collect());
        }
    }
    for q in candidates {
        if let Some(pair) = split(m, &q, tol) {
            return Ok(Some(pair));
        }
    }
    Ok(None)
}

fn split(m: &BagGenMatrix, q: &[f64], tol: f64) -> Option<(LabelDistribution, LabelDistribution)> {
    let pos: Vec<f64> = q.iter().map(|&v| v.max(0.0)).collect();
    let neg: Vec<f64> = q.iter().map(|&v| (-v).max(0.0)).collect();
    let (sp, sn): (f64, f64) = (pos.iter().sum(), neg.iter().sum());
    if sp <= tol || sn <= tol {
        return None;
    }
    let q1 = LabelDistribution::new(pos.iter().map(|v| v / sp).collect()).ok()?;
    let q2 = LabelDistribution::new(neg.iter().map(|v| v / sn).collect()).ok()?;
    let (m1, m2) = (m.apply(q1.probs()), m.apply(q2.probs()));
    let gap = m1.iter().zip(&m2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let distinct = argmax_set(q1.probs()) != argmax_set(q2.probs());
    (gap <= 10.0 * tol && distinct).then_some((q1, q2))
}

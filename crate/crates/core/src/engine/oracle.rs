use nalgebra::DMatrix;

use crate::error::{shape, Error, Result};
use crate::scalar::Real;
use crate::stiefel::StiefelPoint;

/// Top-`p` left singular vectors of `A`, ordered by descending singular
/// value, each column signed so its largest-magnitude entry is positive.
pub fn pca_oracle<T: Real>(a: &DMatrix<T>, p: usize) -> Result<StiefelPoint<T>> {
    let (n, m) = a.shape();
    if p == 0 || p > n {
        return Err(shape("pca_oracle", format!("need 1 <= p <= n = {n}, got p = {p}")));
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));

    let top = if order.is_empty() { T::zero() } else { sv[order[0]] };
    let floor = top * T::default_epsilon() * T::lit(n.max(m) as f64);
    if order.len() < p || !(sv[order[p - 1]] > floor) {
        return Err(Error::Degenerate {
            op: "pca_oracle",
            detail: format!("data matrix has rank below {p}"),
        });
    }

    let mut x = DMatrix::zeros(n, p);
    for (k, &src) in order.iter().take(p).enumerate() {
        let mut col = u.column(src).clone_owned();
        let pivot = col.iter().fold(T::zero(), |best, &v| if v.abs() > best.abs() { v } else { best });
        if pivot < T::zero() {
            col.neg_mut();
        }
        x.set_column(k, &col);
    }
    StiefelPoint::new(x)
}

/// Principal angles between `span(X)` and `span(Y)`, ascending.
pub fn principal_angles<T: Real>(x: &StiefelPoint<T>, y: &StiefelPoint<T>) -> Result<Vec<T>> {
    if x.as_matrix().shape() != y.as_matrix().shape() {
        return Err(shape(
            "principal_angles",
            format!("{:?} vs {:?}", x.as_matrix().shape(), y.as_matrix().shape()),
        ));
    }
    let cosines = x.as_matrix().tr_mul(y.as_matrix()).svd(false, false).singular_values;
    let mut angles: Vec<T> = cosines
        .iter()
        .map(|&c| c.max(T::zero()).min(T::one()).acos())
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(angles)
}

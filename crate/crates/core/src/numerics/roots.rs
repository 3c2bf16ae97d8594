/// Outcome of a failed bracket: `f` has the same strict sign at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoSignChange {
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Bisection on `[lo, hi]` for a root of `f`.
///
/// An endpoint with `|f| <= tol` is accepted as the root. Iteration stops once the
/// bracket is narrower than `tol` (absolute) or after 200 halvings.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, NoSignChange>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(NoSignChange { f_lo, f_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

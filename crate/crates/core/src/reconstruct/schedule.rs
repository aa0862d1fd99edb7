use crate::error::{Error, Result};
use crate::scalar::Real;

/// Quasi-optimality choice over values computed on a decreasing `h`
/// schedule: with `d_m = |v_{m+1} - v_m|`, picks `m*` minimizing `d_m` and
/// returns `(v_{m*+1}, d_{m*}, m* + 1)`.
///
/// A monotonically shrinking difference sequence therefore selects the last
/// level. Non-finite values count as infinitely far from their neighbours.
pub fn extrapolate_h<T: Real>(values: &[T]) -> Result<(T, T, usize)> {
    if values.len() < 3 {
        return Err(Error::TooFewLevels(values.len()));
    }
    let mut best: Option<(T, usize)> = None;
    for m in 0..values.len() - 1 {
        let d = (values[m + 1] - values[m]).abs();
        let d = if d.is_finite() { d } else { T::infinity() };
        match best {
            Some((b, _)) if !(d < b) => {}
            _ => best = Some((d, m)),
        }
    }
    let (d, m) = best.expect("at least two differences");
    if !d.is_finite() {
        return Err(Error::NonConvergent(
            "no finite pair of successive regularized values".into(),
        ));
    }
    Ok((values[m + 1], d, m + 1))
}

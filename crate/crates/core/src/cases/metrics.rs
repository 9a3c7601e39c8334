use crate::error::{Error, Result};

/// RMS difference between `series` and `reference` (linearly interpolated at
/// the series times inside the reference range), divided by the largest
/// interpolated reference magnitude.
pub fn rms_rel_error(series: &[(f64, f64)], reference: &[(f64, f64)]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::Invalid("empty reference series".into()));
    }
    let (t0, t1) = (reference[0].0, reference[reference.len() - 1].0);
    let mut sq = 0.0;
    let mut count = 0usize;
    let mut peak = 0.0f64;
    let mut k = 0;
    for &(t, s) in series {
        if t < t0 || t > t1 {
            continue;
        }
        while k + 1 < reference.len() && reference[k + 1].0 <= t {
            k += 1;
        }
        let r = if k + 1 < reference.len() {
            let (ta, ra) = reference[k];
            let (tb, rb) = reference[k + 1];
            if tb > ta {
                ra + (rb - ra) * ((t - ta) / (tb - ta)).clamp(0.0, 1.0)
            } else {
                rb
            }
        } else {
            reference[k].1
        };
        sq += (s - r) * (s - r);
        peak = peak.max(r.abs());
        count += 1;
    }
    if count == 0 {
        return Err(Error::Invalid("series and reference do not overlap in time".into()));
    }
    if peak == 0.0 {
        return Ok(if sq == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((sq / count as f64).sqrt() / peak)
}

use crate::error::{Error, Result};
use crate::regress::ols_matrix;
use crate::unitroot::{adf_regression, DeterministicSpec};

/// Lag order in `0..=max_lag` minimising the BIC of the ADF regression.
/// Every candidate is fitted on the sample left after trimming `max_lag`
/// lags, so the criteria are comparable. Ties go to the shorter lag.
pub fn bic_lag_select(y: &[f64], max_lag: usize, spec: DeterministicSpec) -> Result<usize> {
    if y.len() <= max_lag + 10 {
        return Err(Error::InsufficientData {
            needed: max_lag + 11,
            got: y.len(),
        });
    }
    let mut best = (f64::INFINITY, 0);
    for p in 0..=max_lag {
        let reg = adf_regression(y, spec, p, max_lag)?;
        let m = reg.response.len() as f64;
        let k = reg.design.ncols() as f64;
        let fit = match ols_matrix(&reg.response, reg.design) {
            Ok(f) => f,
            Err(Error::SingularDesign(_)) => continue,
            Err(e) => return Err(e),
        };
        let bic = m * (fit.rss / m).ln() + k * m.ln();
        if bic < best.0 {
            best = (bic, p);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn white_noise_selects_zero() {
        let zeros = (0..200u64)
            .filter(|&r| {
                let mut rng = replicate_rng(31, r);
                let y: Vec<f64> = (0..500).map(|_| rng.sample(StandardNormal)).collect();
                bic_lag_select(&y, 8, DeterministicSpec::Constant).unwrap() == 0
            })
            .count();
        assert!(zeros >= 160, "lag 0 chosen {zeros}/200 times");
    }

    #[test]
    fn two_augmentation_lags_are_modal() {
        let mut counts = [0usize; 9];
        for r in 0..200u64 {
            let mut rng = replicate_rng(32, r);
            // Δy_t = 0.5 Δy_{t-1} - 0.4 Δy_{t-2} + e_t
            let mut d = vec![0.0f64; 2];
            for t in 2..502 {
                let e: f64 = rng.sample(StandardNormal);
                d.push(0.5 * d[t - 1] - 0.4 * d[t - 2] + e);
            }
            let mut level = 0.0;
            let y: Vec<f64> = d[2..]
                .iter()
                .map(|x| {
                    level += x;
                    level
                })
                .collect();
            counts[bic_lag_select(&y, 8, DeterministicSpec::Constant).unwrap()] += 1;
        }
        let modal = (0..9).max_by_key(|&i| counts[i]).unwrap();
        assert_eq!(modal, 2, "{counts:?}");
    }

    #[test]
    fn too_short_for_max_lag() {
        assert!(bic_lag_select(&[0.0; 18], 8, DeterministicSpec::Constant).is_err());
    }
}

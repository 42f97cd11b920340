use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{align_and_drop_missing, TimeSeries};

/// Plant efficiencies and emission factors of the coal-to-gas switching
/// price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingParams {
    pub eta_coal: f64,
    pub eta_gas: f64,
    /// tCO2 per MWh thermal.
    pub f_coal: f64,
    pub f_gas: f64,
    /// Divides coal prices quoted per tonne to obtain prices per MWh.
    pub coal_divisor: f64,
}

impl Default for SwitchingParams {
    fn default() -> Self {
        SwitchingParams {
            eta_coal: 0.36,
            eta_gas: 0.47,
            f_coal: 0.338,
            f_gas: 0.202,
            coal_divisor: 8.14,
        }
    }
}

impl SwitchingParams {
    fn denominator(&self) -> Result<f64> {
        let d = self.eta_gas * self.f_coal - self.eta_coal * self.f_gas;
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Config(
                "switching price denominator η_gas·f_coal − η_coal·f_gas is zero".into(),
            ));
        }
        Ok(d)
    }
}

/// `(η_coal p_gas − η_gas p_coal) / (η_gas f_coal − η_coal f_gas)` with both
/// fuel prices per MWh.
pub fn switching_price_value(p_gas: f64, p_coal: f64, params: &SwitchingParams) -> Result<f64> {
    Ok((params.eta_coal * p_gas - params.eta_gas * p_coal) / params.denominator()?)
}

/// Pointwise switching price on the common dates of the two fuel series.
/// When `coal_per_tonne` is set, coal prices are first divided by
/// `params.coal_divisor`.
pub fn switching_price(
    coal: &TimeSeries,
    gas: &TimeSeries,
    params: &SwitchingParams,
    coal_per_tonne: bool,
) -> Result<TimeSeries> {
    params.denominator()?;
    let panel = align_and_drop_missing(&[coal.clone(), gas.clone()])?;
    let coal_v = &panel.columns()[0].1;
    let gas_v = &panel.columns()[1].1;
    let divisor = if coal_per_tonne { params.coal_divisor } else { 1.0 };
    let values = coal_v
        .iter()
        .zip(gas_v)
        .map(|(c, g)| switching_price_value(*g, c / divisor, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries::new("switch", panel.timestamps().to_vec(), values)?.with_units("EUR/tCO2"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_prices() {
        assert_eq!(switching_price_value(0.0, 0.0, &SwitchingParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn hand_value() {
        let v = switching_price_value(20.0, 10.0, &SwitchingParams::default()).unwrap();
        let hand = (0.36 * 20.0 - 0.47 * 10.0) / (0.47 * 0.338 - 0.36 * 0.202);
        assert!((v - hand).abs() < 1e-12);
        assert!((v - 29.02).abs() < 0.01, "{v}");
    }

    #[test]
    fn default_profile() {
        let p = SwitchingParams::default();
        assert_eq!((p.eta_gas, p.eta_coal, p.f_gas, p.f_coal, p.coal_divisor), (0.47, 0.36, 0.202, 0.338, 8.14));
    }

    #[test]
    fn zero_denominator_rejected() {
        let p = SwitchingParams {
            eta_coal: 0.47,
            eta_gas: 0.47,
            f_coal: 0.2,
            f_gas: 0.2,
            coal_divisor: 1.0,
        };
        assert!(matches!(switching_price_value(1.0, 1.0, &p), Err(Error::Config(_))));
    }

    #[test]
    fn series_version_converts_coal_units() {
        let start = chrono::NaiveDate::from_ymd_opt(2018, 1, 5).unwrap();
        let coal = TimeSeries::weekly_from("coal", start, vec![81.4, 162.8]).unwrap();
        let gas = TimeSeries::weekly_from("gas", start, vec![20.0, 20.0]).unwrap();
        let s = switching_price(&coal, &gas, &SwitchingParams::default(), true).unwrap();
        assert!((s.values()[0] - 29.02).abs() < 0.01);
        assert_eq!(s.units(), Some("EUR/tCO2"));
    }

    proptest! {
        #[test]
        fn homogeneous_of_degree_one(g in -100.0f64..100.0, c in -100.0f64..100.0, a in -10.0f64..10.0) {
            let p = SwitchingParams::default();
            let lhs = switching_price_value(a * g, a * c, &p).unwrap();
            let rhs = a * switching_price_value(g, c, &p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }
    }
}

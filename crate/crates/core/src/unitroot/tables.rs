//! Critical values shipped with the tests, keyed by (test, deterministic
//! specification, level).
//!
//! ADF/PP: MacKinnon response-surface values at roughly 500 observations;
//! the constant-plus-trend row is the one the ADF and PP tests share.
//! KPSS: Kwiatkowski, Phillips, Schmidt and Shin. LNV: Leybourne, Newbold
//! and Vougas, model with a smooth shift in intercept and slope.

use serde::{Deserialize, Serialize};

use super::{DeterministicSpec, TestKind};

/// Confidence levels (percent) at which critical values are tabulated.
pub const LEVELS: [u32; 3] = [90, 95, 99];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub levels: [u32; 3],
    pub values: [f64; 3],
}

impl CriticalValues {
    pub fn new(values: [f64; 3]) -> Self {
        CriticalValues {
            levels: LEVELS,
            values,
        }
    }

    pub fn at(&self, level: u32) -> Option<f64> {
        self.levels
            .iter()
            .position(|&l| l == level)
            .map(|i| self.values[i])
    }
}

/// Embedded table lookup. LNV values exist only for the constant-plus-trend
/// (trend-shift) model; other LNV variants must bring their own.
pub fn critical_values(test: TestKind, spec: DeterministicSpec) -> Option<CriticalValues> {
    use DeterministicSpec::*;
    let v = match (test, spec) {
        (TestKind::Adf | TestKind::Pp, None) => [-1.62, -1.94, -2.57],
        (TestKind::Adf | TestKind::Pp, Constant) => [-2.57, -2.87, -3.44],
        (TestKind::Adf | TestKind::Pp, ConstantTrend) => [-3.13, -3.42, -3.98],
        (TestKind::Kpss, None | Constant) => [0.347, 0.463, 0.739],
        (TestKind::Kpss, ConstantTrend) => [0.12, 0.15, 0.22],
        (TestKind::Lnv, ConstantTrend) => [-4.55, -4.83, -5.42],
        (TestKind::Lnv, _) => return Option::None,
    };
    Some(CriticalValues::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lookups() {
        let adf = critical_values(TestKind::Adf, DeterministicSpec::ConstantTrend).unwrap();
        assert_eq!(adf.at(95), Some(-3.42));
        let pp = critical_values(TestKind::Pp, DeterministicSpec::ConstantTrend).unwrap();
        assert_eq!(pp.values, [-3.13, -3.42, -3.98]);
        let kpss = critical_values(TestKind::Kpss, DeterministicSpec::ConstantTrend).unwrap();
        assert_eq!(kpss.at(99), Some(0.22));
        let lnv = critical_values(TestKind::Lnv, DeterministicSpec::ConstantTrend).unwrap();
        assert_eq!(lnv.at(90), Some(-4.55));
    }

    #[test]
    fn monotone_in_level() {
        use DeterministicSpec::*;
        for test in [TestKind::Adf, TestKind::Pp, TestKind::Kpss, TestKind::Lnv] {
            for spec in [None, Constant, ConstantTrend] {
                let Some(cv) = critical_values(test, spec) else { continue };
                let v = cv.values;
                if test.right_tailed() {
                    assert!(v[0] < v[1] && v[1] < v[2]);
                } else {
                    assert!(v[0] > v[1] && v[1] > v[2]);
                }
            }
        }
    }
}

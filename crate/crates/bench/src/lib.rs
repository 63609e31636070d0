//! Benchmark inputs shared by the criterion benches.

use groupcut::compendium::{drlm_backward_3_slope, gmic, psi_n, rlm_dpl1_extreme_3a, GeometricEpsParams};
use groupcut::rational::q;
use groupcut::PwlPeriodic;

pub fn rlm() -> PwlPeriodic {
    rlm_dpl1_extreme_3a(&q(1, 5)).unwrap()
}

pub fn drlm() -> PwlPeriodic {
    drlm_backward_3_slope(&q(1, 12), &q(1, 6)).unwrap()
}

pub fn psi(n: usize) -> PwlPeriodic {
    psi_n(&GeometricEpsParams::new(q(2, 5), q(3, 1), n).unwrap()).unwrap()
}

/// A minimal function that is not extreme.
pub fn combination() -> PwlPeriodic {
    PwlPeriodic::combine(&gmic(&q(1, 5)).unwrap(), &rlm(), &q(1, 2))
}

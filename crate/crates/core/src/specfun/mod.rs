//! Special functions needed by the rate integrals.
//!
//! Everything here is pure and works on `f64`. Series are accumulated with
//! compensated summation.

mod bessel;
mod erf;
mod gamma;
mod hyper;
mod meijer;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use erf::{erf, erfc, erfcx};
pub use gamma::{
    gamma, ln_gamma, ln_gamma_sign, lower_incomplete_gamma, rgamma, upper_incomplete_gamma,
};
pub(crate) use hyper::gauss_2f1_complement;
pub use hyper::{gauss_2f1, kummer_1f1};
pub use meijer::{
    meijer_g_asymptote, meijer_g_rate, MeijerRateParams, MAX_ALPHA_DEN, MAX_ALPHA_NUM,
};

pub(crate) use gamma::lgam;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn new(first: f64) -> Self {
        Self {
            sum: first,
            comp: 0.0,
        }
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Δ(n, x) = [x/n, (x+1)/n, …, (x+n−1)/n].
pub fn delta_list(n: usize, x: f64) -> Vec<f64> {
    (0..n).map(|i| (x + i as f64) / n as f64).collect()
}

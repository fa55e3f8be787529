//! Ideal cost model of the parareal iteration.
//!
//! ```text
//! T_parareal = T_fluid + Ng k ((T_lift + T_hmm + T_fluid) / Np + T_fluid)
//! ```
//!
//! where the phase times are maxima over all window propagations.

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PerfModel {
    /// Fine (hybrid) propagation over one window.
    pub t_hmm: f64,
    /// Coarse (fluid) propagation over one window.
    pub t_fluid: f64,
    /// One lifting.
    pub t_lift: f64,
    pub workers: usize,
    pub ng: usize,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostPrediction {
    pub t_parareal: f64,
    /// Iteration count below which parareal beats the serial fine solve;
    /// `None` when the per-iteration cost vanishes.
    pub k_opt: Option<u64>,
    /// `T_parareal <= Ng T_hmm`.
    pub beats_serial: bool,
}

impl PerfModel {
    fn per_iteration(&self) -> f64 {
        (self.t_lift + self.t_hmm + self.t_fluid) / self.workers.max(1) as f64 + self.t_fluid
    }

    /// Serial fine cost `Ng T_hmm`.
    pub fn serial_cost(&self) -> f64 {
        self.ng as f64 * self.t_hmm
    }
}

pub fn predict_cost(pm: &PerfModel) -> CostPrediction {
    let ng = pm.ng as f64;
    let per_iter = pm.per_iteration();
    let t_parareal = pm.t_fluid + ng * pm.iterations as f64 * per_iter;
    let denom = ng * per_iter;
    let k_opt = if denom > 0.0 {
        Some(((ng * pm.t_hmm - pm.t_fluid) / denom).ceil().max(0.0) as u64)
    } else {
        None
    };
    CostPrediction {
        t_parareal,
        k_opt,
        beats_serial: t_parareal <= pm.serial_cost(),
    }
}

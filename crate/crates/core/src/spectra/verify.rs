//! Residual checks for exact and asymptotic scars.

use super::SpectraError;
use crate::pvbs::{apply_hamiltonian, FloquetStepper, ModelParams};
use crate::qops::StateVector;
use crate::scars::aqmbs_state;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualMode {
    /// `||H psi||`.
    Hamiltonian,
    /// `||U psi - psi||` for one Floquet period.
    Circuit,
}

/// Residual of `state` as a zero mode of the model.
pub fn verify_frustration_free(
    params: &ModelParams,
    state: &StateVector,
    mode: ResidualMode,
) -> Result<f64, SpectraError> {
    params.validate()?;
    match mode {
        ResidualMode::Hamiltonian => {
            let hv = apply_hamiltonian(params, state)?;
            Ok(hv.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
        }
        ResidualMode::Circuit => {
            let mut s = state.clone();
            FloquetStepper::new(params).step(&mut s)?;
            Ok(s.distance(state))
        }
    }
}

/// Residuals of `|A_k>` (with `phi = arg g`) across `sizes`, which must strictly
/// decrease; otherwise the residuals are returned inside [`SpectraError::NonMonotone`].
pub fn verify_aqmbs_scaling(
    params: &ModelParams,
    k: usize,
    sizes: &[usize],
    mode: ResidualMode,
) -> Result<Vec<f64>, SpectraError> {
    let mut residuals = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let p = ModelParams::new(params.g, n, params.gen_even, params.gen_odd)?;
        let a = aqmbs_state(k, params.g.arg(), n)?.to_state_vector()?;
        residuals.push(verify_frustration_free(&p, &a, mode)?);
    }
    if residuals.windows(2).all(|w| w[1] < w[0]) {
        Ok(residuals)
    } else {
        Err(SpectraError::NonMonotone {
            sizes: sizes.to_vec(),
            residuals,
        })
    }
}

use super::HardwareSpec;
use crate::error::{Error, Result};
use crate::vibronic::VCModel;
use crate::HBAR_EV_S;

/// Window of admissible scale factors `F = ω_sim / ω_mol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleBounds {
    /// `M t_max / τ_d`: slowest simulation that finishes before decoherence.
    pub f_min: f64,
    /// Hardware coupling limit over the largest model coupling.
    pub f_max1: f64,
    /// Acceptable molecular step over the shortest hardware step.
    pub f_max2: f64,
    pub feasible: bool,
    /// `min(f_max1, f_max2)`.
    pub recommended: f64,
}

/// Scale-factor bounds for a run of `t_max_fs` with `m` Trotter parts and an
/// acceptable molecular timestep `dt_mol_fs`.
///
/// Model couplings (eV) are compared with `hw.max_coupling` (rad/s) via ħ.
pub fn scale_factor_bounds(
    t_max_fs: f64,
    hw: &HardwareSpec,
    m: usize,
    model: &VCModel,
    dt_mol_fs: f64,
) -> Result<ScaleBounds> {
    for (name, v) in [("t_max", t_max_fs), ("dt_mol", dt_mol_fs)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if m == 0 {
        return Err(Error::InvalidParameter("number of Trotter parts must be at least 1".into()));
    }
    hw.validate()?;
    let c_max = model.max_coupling();
    if c_max <= 0.0 {
        return Err(Error::InvalidParameter("model has no nonzero coupling to bound against".into()));
    }
    let f_min = m as f64 * t_max_fs * 1e-15 / hw.tau_d;
    let f_max1 = hw.max_coupling / (c_max / HBAR_EV_S);
    let f_max2 = dt_mol_fs * 1e-15 / hw.dt_sim_min;
    let recommended = f_max1.min(f_max2);
    Ok(ScaleBounds {
        f_min,
        f_max1,
        f_max2,
        feasible: recommended >= f_min,
        recommended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vibronic::CoefMatrix;

    fn model(lambda: f64) -> VCModel {
        let mut c = CoefMatrix::diag(&[0.01, -0.02]);
        c.set_sym(0, 1, lambda);
        VCModel::new(vec![0.1], CoefMatrix::diag(&[0.0, 0.3]), vec![c], None).unwrap()
    }

    #[test]
    fn unit_lower_bound() {
        let hw = HardwareSpec::example();
        let t_max = hw.tau_d * 1e15;
        let b = scale_factor_bounds(t_max, &hw, 1, &model(0.2), 0.5).unwrap();
        assert!((b.f_min - 1.0).abs() < 1e-12);
        assert!(!b.feasible);
    }

    #[test]
    fn coupling_bound_uses_largest_coupling() {
        let hw = HardwareSpec::example();
        let lambda = 0.2;
        let b = scale_factor_bounds(300.0, &hw, 2, &model(lambda), 0.5).unwrap();
        let expect = hw.max_coupling * HBAR_EV_S / lambda;
        assert!((b.f_max1 / expect - 1.0).abs() < 1e-14);
        assert!((b.f_max2 - 0.5e-15 / hw.dt_sim_min).abs() < 1e-30);
        assert_eq!(b.recommended, b.f_max1.min(b.f_max2));
        assert!(b.feasible);
        assert!((b.f_min - 2.0 * 300e-15 / hw.tau_d).abs() < 1e-25);
    }

    #[test]
    fn infeasible_when_decoherence_too_fast() {
        let mut hw = HardwareSpec::example();
        hw.tau_d = 1e-12;
        let b = scale_factor_bounds(300.0, &hw, 2, &model(0.2), 0.5).unwrap();
        assert!(b.f_min > b.f_max1 && b.f_min > b.f_max2);
        assert!(!b.feasible);
    }

    #[test]
    fn rejects_bad_inputs() {
        let hw = HardwareSpec::example();
        assert!(scale_factor_bounds(0.0, &hw, 1, &model(0.2), 0.5).is_err());
        assert!(scale_factor_bounds(1.0, &hw, 0, &model(0.2), 0.5).is_err());
        assert!(scale_factor_bounds(1.0, &hw, 1, &model(0.2), -0.5).is_err());
    }
}

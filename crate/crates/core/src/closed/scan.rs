use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::trotter::{run_trotter, Scheme, TrotterPlan};
use crate::error::{Error, Result};
use crate::ops::SpaceLayout;
use crate::trajectory::Observer;

/// Errors of one Trotter step size against exact propagation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub dt: f64,
    /// Largest population deviation over all times and states.
    pub max_pop_error: f64,
    pub min_fidelity: f64,
    /// `1 - F` at the final time.
    pub final_infidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `log(1 - min F)` against `log dt`; `None`
    /// when some infidelity is at the numerical floor.
    pub fitted_order: Option<f64>,
}

/// Infidelities at or below this are treated as exact.
const INFIDELITY_FLOOR: f64 = 1e-13;

impl ScanResult {
    /// CSV with columns `dt_fs, max_pop_error, min_fidelity, fitted_order`;
    /// the order is repeated on every row and empty when undefined.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dt_fs", "max_pop_error", "min_fidelity", "fitted_order"])?;
        let order = self.fitted_order.map_or(String::new(), |o| format!("{o:.6}"));
        for r in &self.rows {
            w.write_record([
                format!("{}", r.dt),
                format!("{:.12e}", r.max_pop_error),
                format!("{:.12e}", r.min_fidelity),
                order.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs `template` at every step in `dt_list` and compares with exact
/// propagation on the same grid. Step sizes run in parallel.
pub fn trotter_error_scan(
    template: &TrotterPlan,
    dt_list: &[f64],
    t_final: f64,
    psi0: &[C64],
    layout: &SpaceLayout,
) -> Result<ScanResult> {
    if dt_list.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "a scan needs at least 3 step sizes, got {}",
            dt_list.len()
        )));
    }
    let lo = dt_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = dt_list.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "step sizes must be positive and span a decade, got [{lo}, {hi}]"
        )));
    }
    let obs = Observer::new(layout)?;
    let rows = dt_list
        .par_iter()
        .map(|&dt| {
            let plan = template.with_dt(dt)?;
            let (tr, ex) = run_trotter(&plan, psi0, t_final, &obs, true)?;
            let ex = ex.expect("exact run requested");
            let fid = tr.fidelity.as_ref().expect("fidelity recorded");
            Ok(ScanRow {
                dt,
                max_pop_error: tr.max_population_difference(&ex)?,
                min_fidelity: tr.min_fidelity().expect("fidelity recorded"),
                final_infidelity: 1.0 - fid[fid.len() - 1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let infid: Vec<f64> = rows.iter().map(|r| 1.0 - r.min_fidelity).collect();
    let fitted_order = if infid.iter().all(|&e| e > INFIDELITY_FLOOR) {
        let x: Vec<f64> = rows.iter().map(|r| r.dt.ln()).collect();
        let y: Vec<f64> = infid.iter().map(|e| e.ln()).collect();
        Some(fit_slope(&x, &y))
    } else {
        None
    };
    Ok(ScanResult { rows, fitted_order })
}

/// Fidelity series of the two schemes on the same partition and step.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeComparison {
    pub times: Vec<f64>,
    pub fidelity_rescaling: Vec<f64>,
    pub fidelity_rewinding: Vec<f64>,
    pub max_abs_difference: f64,
}

impl SchemeComparison {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time_fs", "fidelity_rescaling", "fidelity_rewinding"])?;
        for i in 0..self.times.len() {
            w.write_record([
                format!("{:.12e}", self.times[i]),
                format!("{:.12e}", self.fidelity_rescaling[i]),
                format!("{:.12e}", self.fidelity_rewinding[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn compare_schemes(
    plan_res: &TrotterPlan,
    plan_rew: &TrotterPlan,
    psi0: &[C64],
    t_final: f64,
    layout: &SpaceLayout,
) -> Result<SchemeComparison> {
    if plan_res.scheme != Scheme::Rescaling || plan_rew.scheme != Scheme::Rewinding {
        return Err(Error::InvalidParameter("expected a rescaling and a rewinding plan".into()));
    }
    if !plan_res.same_partition(plan_rew) {
        return Err(Error::InvalidParameter("plans differ in H0, parts or time step".into()));
    }
    let obs = Observer::new(layout)?;
    let (a, b) = rayon::join(
        || run_trotter(plan_res, psi0, t_final, &obs, true),
        || run_trotter(plan_rew, psi0, t_final, &obs, true),
    );
    let (a, b) = (a?.0, b?.0);
    let fa = a.fidelity.expect("fidelity recorded");
    let fb = b.fidelity.expect("fidelity recorded");
    let max_abs_difference = fa.iter().zip(&fb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(SchemeComparison {
        times: a.times,
        fidelity_rescaling: fa,
        fidelity_rewinding: fb,
        max_abs_difference,
    })
}

use super::HardwareSpec;
use crate::error::{Error, Result};

/// Largest allowed `Ω0 / Γ`.
pub const MAX_RABI_RATIO: f64 = 0.1;

const GAMMA_GRID: usize = 200;
const DETUNING_GRID: usize = 400;

/// Cooling-laser settings, angular frequencies in rad/s.
///
/// `detuning` is carrier minus laser frequency, so red detuning is positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoolingParams {
    pub detuning: f64,
    pub linewidth: f64,
    pub rabi: f64,
}

/// Sideband rates `A±` in 1/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidebandRates {
    pub a_plus: f64,
    pub a_minus: f64,
}

impl SidebandRates {
    /// Net damping `A⁻ - A⁺`.
    pub fn gamma(&self) -> f64 {
        self.a_minus - self.a_plus
    }

    /// Steady occupation `A⁺ / (A⁻ - A⁺)`; infinite without net cooling.
    pub fn nbar(&self) -> f64 {
        let g = self.gamma();
        if g > 0.0 {
            self.a_plus / g
        } else {
            f64::INFINITY
        }
    }
}

/// `A± = η² Γ (B(Δ ± ω) + α B(Δ))` with `B(x) = Ω0² / (Γ² + 4x²)`.
pub fn sideband_rates(p: &CoolingParams, eta: f64, omega_ion: f64, alpha: f64) -> SidebandRates {
    let g = p.linewidth;
    let b = |x: f64| p.rabi * p.rabi / (g * g + 4.0 * x * x);
    let carrier = alpha * b(p.detuning);
    let pre = eta * eta * g;
    SidebandRates {
        a_plus: pre * (b(p.detuning + omega_ion) + carrier),
        a_minus: pre * (b(p.detuning - omega_ion) + carrier),
    }
}

/// A solved cooling configuration and the rates it produces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoolingSolution {
    pub mode: usize,
    pub params: CoolingParams,
    pub rates: SidebandRates,
}

/// Finds `(Δ, Γ, Ω0)` for mode `mode` with `A⁻ - A⁺ = target_gamma` (1/s) and
/// `A⁺/(A⁻ - A⁺) = target_nbar`.
///
/// `Γ` is scanned on a log grid over the hardware range. At each `Γ` the
/// occupation (independent of `Ω0`) is minimized over `Δ > 0` and the target
/// is bracketed on the small-detuning side of that minimum. `Ω0` then follows
/// from the `Ω0²` scaling of the damping rate. Among admissible `Γ`, the one
/// with the smallest `Ω0/Γ` is returned.
pub fn solve_cooling_params(
    target_gamma: f64,
    target_nbar: f64,
    hw: &HardwareSpec,
    mode: usize,
) -> Result<CoolingSolution> {
    if target_nbar == 0.0 {
        return Err(Error::UnreachableTarget(
            "n̄ = 0 cannot be reached: the carrier term keeps A⁺ > 0".into(),
        ));
    }
    if !(target_nbar > 0.0 && target_nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("target n̄ must be positive, got {target_nbar}")));
    }
    if !(target_gamma > 0.0 && target_gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("target γ must be positive, got {target_gamma}")));
    }
    hw.validate()?;
    hw.check_modes(mode + 1)?;
    let (eta, w, alpha) = (hw.eta[mode], hw.trap_freq[mode], hw.alpha);
    let [g_lo, g_hi] = hw.gamma_range[mode];

    let nbar_at = |delta: f64, gamma: f64| {
        let p = CoolingParams { detuning: delta, linewidth: gamma, rabi: 1.0 };
        sideband_rates(&p, eta, w, alpha).nbar()
    };

    let mut reached = false;
    let mut best: Option<(f64, CoolingSolution)> = None;
    let mut closest_ratio = f64::INFINITY;
    for i in 0..GAMMA_GRID {
        let gamma = if GAMMA_GRID == 1 || g_hi == g_lo {
            g_lo
        } else {
            g_lo * (g_hi / g_lo).powf(i as f64 / (GAMMA_GRID - 1) as f64)
        };
        let (d_star, n_min) = minimize_nbar(|d| nbar_at(d, gamma), w + gamma);
        if n_min > target_nbar {
            continue;
        }
        reached = true;
        let delta = bisect_lower_branch(|d| nbar_at(d, gamma), d_star, target_nbar);
        let unit = sideband_rates(&CoolingParams { detuning: delta, linewidth: gamma, rabi: 1.0 }, eta, w, alpha);
        let rabi = (target_gamma / unit.gamma()).sqrt();
        let ratio = rabi / gamma;
        closest_ratio = closest_ratio.min(ratio);
        let in_range = rabi >= hw.omega0_range[0] && rabi <= hw.omega0_range[1];
        if ratio > MAX_RABI_RATIO || !in_range {
            continue;
        }
        let params = CoolingParams { detuning: delta, linewidth: gamma, rabi };
        let sol = CoolingSolution {
            mode,
            params,
            rates: sideband_rates(&params, eta, w, alpha),
        };
        if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
            best = Some((ratio, sol));
        }
    }
    match best {
        Some((_, sol)) => Ok(sol),
        None if !reached => Err(Error::Infeasible(format!(
            "mode {mode}: no detuning reaches n̄ = {target_nbar} for Γ in [{g_lo:.3e}, {g_hi:.3e}] rad/s"
        ))),
        None => Err(Error::Validity(format!(
            "mode {mode}: n̄ = {target_nbar} is reachable but γ = {target_gamma:.3e}/s needs Ω0 outside \
             [{:.3e}, {:.3e}] rad/s or Ω0/Γ > {MAX_RABI_RATIO} (best ratio {closest_ratio:.3e})",
            hw.omega0_range[0], hw.omega0_range[1]
        ))),
    }
}

/// Minimum of `f` over `(0, 4·scale]`: log grid, then golden section.
fn minimize_nbar(f: impl Fn(f64) -> f64, scale: f64) -> (f64, f64) {
    let lo = scale * 1e-6;
    let hi = scale * 4.0;
    let grid: Vec<f64> = (0..DETUNING_GRID)
        .map(|i| lo * (hi / lo).powf(i as f64 / (DETUNING_GRID - 1) as f64))
        .collect();
    let (imin, _) = grid
        .iter()
        .map(|&d| f(d))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let mut a = grid[imin.saturating_sub(1)];
    let mut b = grid[(imin + 1).min(DETUNING_GRID - 1)];
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > 1e-14 * b {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// Root of `f(Δ) = target` on `(0, d_star]`, where `f` decreases from `+∞`.
fn bisect_lower_branch(f: impl Fn(f64) -> f64, d_star: f64, target: f64) -> f64 {
    if f(d_star) == target {
        return d_star;
    }
    let mut hi = d_star;
    let mut lo = d_star * 0.5;
    while f(lo) <= target {
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    /// Independent transcription of the rate formulas.
    fn oracle(eta: f64, gamma: f64, delta: f64, omega0: f64, alpha: f64, w: f64) -> (f64, f64) {
        let b = |x: f64| omega0.powi(2) / (gamma.powi(2) + 4.0 * x.powi(2));
        let ap = eta.powi(2) * gamma * (b(delta + w) + alpha * b(delta));
        let am = eta.powi(2) * gamma * (b(delta - w) + alpha * b(delta));
        (ap, am)
    }

    #[test]
    fn forward_matches_oracle() {
        let (eta, gamma, w) = (0.1, TAU * 1e6, TAU * 3e6);
        for delta in [-gamma / 2.0, gamma / 2.0, w] {
            let p = CoolingParams { detuning: delta, linewidth: gamma, rabi: gamma / 20.0 };
            let r = sideband_rates(&p, eta, w, 0.4);
            let (ap, am) = oracle(eta, gamma, delta, gamma / 20.0, 0.4, w);
            assert!((r.a_plus - ap).abs() <= 1e-12 * ap);
            assert!((r.a_minus - am).abs() <= 1e-12 * am);
        }
    }

    #[test]
    fn rabi_scaling() {
        let p = CoolingParams { detuning: 2e6, linewidth: 1e6, rabi: 5e4 };
        let q = CoolingParams { rabi: 1e5, ..p };
        let (a, b) = (sideband_rates(&p, 0.1, 1.9e7, 0.4), sideband_rates(&q, 0.1, 1.9e7, 0.4));
        assert!((b.a_plus / a.a_plus - 4.0).abs() < 1e-12);
        assert!((b.a_minus / a.a_minus - 4.0).abs() < 1e-12);
        assert!((b.gamma() / a.gamma() - 4.0).abs() < 1e-12);
        assert!((b.nbar() / a.nbar() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn red_detuning_cools() {
        let w = TAU * 3e6;
        let red = sideband_rates(&CoolingParams { detuning: w / 2.0, linewidth: w, rabi: 1.0 }, 0.1, w, 0.4);
        let blue = sideband_rates(&CoolingParams { detuning: -w / 2.0, linewidth: w, rabi: 1.0 }, 0.1, w, 0.4);
        assert!(red.a_minus > red.a_plus);
        assert!(blue.a_minus < blue.a_plus);
        assert_eq!(blue.nbar(), f64::INFINITY);
    }

    #[test]
    fn solve_reproduces_targets() {
        let hw = HardwareSpec::example();
        for (g, n) in [(100.0, 0.01), (10.0, 0.15), (20.0, 0.002), (1.0, 1e-3)] {
            let s = solve_cooling_params(g, n, &hw, 0).unwrap();
            assert!((s.rates.gamma() / g - 1.0).abs() < 1e-6, "{:?}", s);
            assert!((s.rates.nbar() / n - 1.0).abs() < 1e-6, "{:?}", s);
            assert!(s.params.rabi / s.params.linewidth <= MAX_RABI_RATIO);
            assert!(s.params.detuning > 0.0);
        }
    }

    #[test]
    fn solve_errors() {
        let hw = HardwareSpec::example();
        assert!(matches!(solve_cooling_params(1.0, 0.0, &hw, 0), Err(Error::UnreachableTarget(_))));
        assert!(matches!(solve_cooling_params(-1.0, 0.1, &hw, 0), Err(Error::InvalidParameter(_))));
        let mut narrow = hw.clone();
        narrow.gamma_range[0] = [TAU * 10e6, TAU * 20e6];
        assert!(matches!(solve_cooling_params(1.0, 1e-4, &narrow, 0), Err(Error::Infeasible(_))));
        assert!(matches!(solve_cooling_params(1e12, 0.1, &hw, 0), Err(Error::Validity(_))));
        assert!(solve_cooling_params(1.0, 0.1, &hw, 5).is_err());
    }
}

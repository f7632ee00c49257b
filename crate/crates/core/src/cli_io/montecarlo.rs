use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, Distribution, OrderStatistics};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::protocol::derive_seed;
use crate::psychophysics::{
    convergence_level, solve_threshold, Modality, ObserverModel, Response, Staircase, StaircaseConfig,
};

/// Summary of the JND distribution at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloRow {
    pub modality: String,
    pub sigma: f64,
    pub criterion: f64,
    pub lapse_rate: f64,
    pub runs: usize,
    /// Runs whose staircase produced a JND.
    pub completed: usize,
    pub median: f64,
    pub mean: f64,
    pub sd: f64,
    pub p10: f64,
    pub p90: f64,
    /// Stimulus difference detected at the track's convergence level,
    /// clamped to the staircase range.
    pub analytic: f64,
    pub bias_pct: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub rows: Vec<MonteCarloRow>,
    pub tolerance: f64,
}

impl MonteCarloSummary {
    pub fn all_within_tolerance(&self) -> bool {
        self.rows.iter().all(|r| r.within_tolerance)
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "{:<9}{:>9}{:>9}{:>6}{:>6}{:>10}{:>10}{:>9}{:>9}{:>9}{:>10}{:>8}\n",
            "modality", "sigma", "crit", "runs", "done", "median", "analytic", "bias%", "p10", "p90", "sd", "ok"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<9}{:>9.3}{:>9.3}{:>6}{:>6}{:>10.3}{:>10.3}{:>9.2}{:>9.3}{:>9.3}{:>10.3}{:>8}",
                r.modality,
                r.sigma,
                r.criterion,
                r.runs,
                r.completed,
                r.median,
                r.analytic,
                r.bias_pct,
                r.p10,
                r.p90,
                r.sd,
                if r.within_tolerance { "yes" } else { "NO" }
            );
        }
        let _ = writeln!(s, "tolerance: median within {:.0}% of analytic", 100.0 * self.tolerance);
        s
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let p = dir.join("montecarlo.csv");
        let f = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
        let mut w = csv::Writer::from_writer(f);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io(&p, e))?;
        let t = dir.join("montecarlo.txt");
        fs::write(&t, self.text()).map_err(|e| Error::io(&t, e))?;
        Ok(vec![p, t])
    }
}

fn modality_label(m: Modality) -> &'static str {
    match m {
        Modality::Position => "position",
        Modality::Velocity => "velocity",
        Modality::Torque => "torque",
    }
}

/// Runs one staircase against the observer with ideal stimulus rendering.
/// The comparison interval is first or second at random. Returns the JND,
/// or `None` when the track ended without enough reversals.
pub fn simulate_staircase<R: Rng + ?Sized>(
    config: &StaircaseConfig,
    observer: &ObserverModel,
    modality: Modality,
    rng: &mut R,
) -> Result<Option<f64>> {
    let mut sc = Staircase::new(config.clone())?;
    while !sc.is_terminated() {
        let (r, c) = (config.reference, config.reference + sc.delta());
        let (first, second) = if rng.random::<bool>() { (r, c) } else { (c, r) };
        let different = observer.respond_2ifc(modality, first, second, rng);
        sc.respond(if different { Response::Correct } else { Response::Incorrect })?;
    }
    Ok(sc.jnd().ok().map(|j| j.jnd_abs))
}

fn staircase_for(cfg: &RunConfig, m: Modality) -> Result<StaircaseConfig> {
    let s = &cfg.session;
    Ok(match m {
        Modality::Position => {
            let crom = cfg.montecarlo.profile.measure_crom()?;
            StaircaseConfig { reference: crom.position_reference(), ..s.position_staircase.clone() }
        }
        Modality::Velocity => s.velocity_staircase.clone(),
        Modality::Torque => s.torque_staircase.clone(),
    })
}

fn scaled(observer: &ObserverModel, m: Modality, scale: f64) -> ObserverModel {
    let mut o = observer.clone();
    let s = match m {
        Modality::Position => &mut o.position,
        Modality::Velocity => &mut o.velocity,
        Modality::Torque => &mut o.torque,
    };
    s.sigma *= scale;
    s.criterion *= scale;
    o
}

/// `cfg.runs` independent staircases per modality and sensitivity scale,
/// summarised against the analytic convergence point.
pub fn cmd_montecarlo(cfg: &RunConfig) -> Result<MonteCarloSummary> {
    let mc = &cfg.montecarlo;
    if cfg.runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut point = 0u64;
    for &m in &mc.modalities {
        let sc = staircase_for(cfg, m)?;
        sc.validate()?;
        for &scale in &mc.sensitivity_scales {
            if !(scale > 0.0) {
                return Err(Error::Config(format!("sensitivity scale {scale} must be positive")));
            }
            let observer = scaled(&mc.observer, m, scale);
            observer.validate()?;
            let point_seed = derive_seed(cfg.seed, point);
            point += 1;
            let jnds: Vec<Option<f64>> = (0..cfg.runs)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(point_seed, i as u64));
                    simulate_staircase(&sc, &observer, m, &mut rng)
                })
                .collect::<Result<_>>()?;
            rows.push(summarise(m, &observer, &sc, cfg.runs, jnds.into_iter().flatten().collect(), mc.tolerance));
        }
    }
    Ok(MonteCarloSummary { rows, tolerance: mc.tolerance })
}

fn summarise(
    m: Modality,
    observer: &ObserverModel,
    sc: &StaircaseConfig,
    runs: usize,
    jnds: Vec<f64>,
    tolerance: f64,
) -> MonteCarloRow {
    let s = observer.sensitivity(m);
    let level = convergence_level(sc.n_down);
    let analytic = solve_threshold(s.sigma, s.criterion, observer.lapse_rate, level, sc.delta_ceiling)
        .unwrap_or(sc.delta_ceiling)
        .clamp(sc.delta_floor, sc.delta_ceiling);
    let completed = jnds.len();
    let (median, mean, sd, p10, p90) = if jnds.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let mut d = Data::new(jnds);
        (d.median(), d.mean().unwrap_or(f64::NAN), d.std_dev().unwrap_or(0.0), d.percentile(10), d.percentile(90))
    };
    let bias = (median - analytic) / analytic;
    MonteCarloRow {
        modality: modality_label(m).into(),
        sigma: s.sigma,
        criterion: s.criterion,
        lapse_rate: observer.lapse_rate,
        runs,
        completed,
        median,
        mean,
        sd,
        p10,
        p90,
        analytic,
        bias_pct: 100.0 * bias,
        within_tolerance: bias.abs() <= tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psychophysics::Sensitivity;

    fn cfg(runs: usize) -> RunConfig {
        let mut c = RunConfig { runs, seed: 7, ..RunConfig::default() };
        c.montecarlo.modalities = vec![Modality::Velocity];
        c
    }

    #[test]
    fn velocity_converges() {
        let s = cmd_montecarlo(&cfg(300)).unwrap();
        let r = &s.rows[0];
        assert_eq!(r.completed, 300);
        assert!(r.within_tolerance, "{}", s.text());
    }

    #[test]
    fn deterministic() {
        assert_eq!(cmd_montecarlo(&cfg(40)).unwrap(), cmd_montecarlo(&cfg(40)).unwrap());
    }

    #[test]
    fn sharp_observer_sits_at_floor() {
        let mut c = cfg(50);
        c.montecarlo.modalities = vec![Modality::Position, Modality::Velocity, Modality::Torque];
        let tiny = Sensitivity { sigma: 1e-9, criterion: 0.0 };
        c.montecarlo.observer.position = tiny;
        c.montecarlo.observer.velocity = tiny;
        c.montecarlo.observer.torque = tiny;
        let s = cmd_montecarlo(&c).unwrap();
        let floors = [
            c.session.position_staircase.delta_floor,
            c.session.velocity_staircase.delta_floor,
            c.session.torque_staircase.delta_floor,
        ];
        for (r, f) in s.rows.iter().zip(floors) {
            assert_eq!(r.median, f);
            assert_eq!(r.p90, f);
            assert!(r.within_tolerance);
        }
    }
}

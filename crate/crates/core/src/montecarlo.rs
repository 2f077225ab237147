//! Finite-statistics emulation of both experiments.
//!
//! Every measurement setting draws a multinomial sample of `shots` outcomes
//! from the white-noise distribution `p' = V·p + (1 - V)/d`. Each setting
//! owns a ChaCha8 stream derived from the master seed and a fixed stream
//! id, so results are reproducible and independent of evaluation order.
//! `shots = 0` selects the analytic (infinite-statistics) path.

use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use thiserror::Error;

use crate::eprinciple::{w_reports, EPrincipleError, Measured, WReport};
use crate::measured;
use crate::numerics::{inner_product, StateVector};
use crate::scenario::{
    basis_for_event, build_chsh_scenario, build_nc_scenario, measurement_bases, PauliSetting,
    ScenarioError, CHSH_EVENTS,
};

/// Default shot budget per measurement setting.
pub const DEFAULT_SHOTS: u64 = 200_000;

const CHSH_STREAM: u64 = 0x000;
const NC_STREAM: u64 = 0x100;
const CHSH_CHECK_STREAM: u64 = 0x200;
const NC_CHECK_STREAM: u64 = 0x300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("invalid outcome distribution: {0}")]
    InvalidDistribution(String),
    #[error("visibility {0} is outside [0, 1]")]
    InvalidVisibility(f64),
    #[error("noise model has dimension {got}, experiment needs {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    EPrinciple(#[from] EPrincipleError),
    #[error("csv output failed: {0}")]
    Csv(String),
}

/// Isotropic white noise of visibility `V` in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    visibility: f64,
    dim: usize,
}

impl NoiseModel {
    pub fn new(visibility: f64, dim: usize) -> Result<Self, MonteCarloError> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(MonteCarloError::InvalidVisibility(visibility));
        }
        if dim == 0 {
            return Err(MonteCarloError::DimensionMismatch { got: 0, want: 1 });
        }
        Ok(Self { visibility, dim })
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `V·p + (1 - V)/d`.
    pub fn apply(&self, p: f64) -> f64 {
        self.visibility * p + (1.0 - self.visibility) / self.dim as f64
    }

    fn apply_all(&self, probs: &[f64]) -> Vec<f64> {
        probs.iter().map(|&p| self.apply(p)).collect()
    }
}

/// The generator for one measurement setting.
pub fn setting_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Multinomial draw of `shots` outcomes, by sequential conditional binomials.
pub fn sample_setting(
    probabilities: &[f64],
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u64>, MonteCarloError> {
    if shots == 0 {
        return Err(MonteCarloError::InvalidDistribution(
            "need at least one shot".into(),
        ));
    }
    if probabilities.is_empty()
        || probabilities
            .iter()
            .any(|p| !(0.0..=1.0 + 1e-12).contains(p))
    {
        return Err(MonteCarloError::InvalidDistribution(format!(
            "{probabilities:?}"
        )));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(MonteCarloError::InvalidDistribution(format!(
            "sums to {total}"
        )));
    }

    let mut counts = vec![0; probabilities.len()];
    let mut remaining = shots;
    let mut mass = 1.0;
    for (k, &p) in probabilities.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probabilities.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let drawn = Binomial::new(remaining, q)
            .expect("q within [0, 1]")
            .sample(rng);
        counts[k] = drawn;
        remaining -= drawn;
        mass -= p;
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Chsh,
    Nc,
}

/// Raw counts of one measurement setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingCounts {
    pub setting: String,
    pub stream: u64,
    pub probabilities: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub label: String,
    pub notation: String,
    pub p_hat: f64,
    pub stderr: f64,
    /// Noise-free probability.
    pub ideal: f64,
    /// Probability under the noise model.
    pub noisy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulatedRun {
    pub experiment: Experiment,
    pub seed: u64,
    pub shots_per_setting: u64,
    pub visibility: f64,
    pub settings: Vec<SettingCounts>,
    pub estimates: Vec<Estimate>,
    /// `S` or `R` with root-sum-square uncertainty.
    pub total: Measured,
    /// Expected total under the noise model.
    pub total_noisy: f64,
}

impl SimulatedRun {
    pub fn measured_estimates(&self) -> [Measured; 8] {
        std::array::from_fn(|i| Measured::new(self.estimates[i].p_hat, self.estimates[i].stderr))
    }

    /// CSV with columns `event, notation, estimate, stderr, expected`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), MonteCarloError> {
        let err = |e: csv::Error| MonteCarloError::Csv(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["event", "notation", "estimate", "stderr", "expected"])
            .map_err(err)?;
        for e in &self.estimates {
            w.write_record([
                e.label.clone(),
                e.notation.clone(),
                e.p_hat.to_string(),
                e.stderr.to_string(),
                e.ideal.to_string(),
            ])
            .map_err(err)?;
        }
        let total_label = match self.experiment {
            Experiment::Chsh => "S",
            Experiment::Nc => "R",
        };
        let expected: f64 = self.estimates.iter().map(|e| e.ideal).sum();
        w.write_record([
            total_label.to_string(),
            String::new(),
            self.total.value.to_string(),
            self.total.uncertainty.to_string(),
            expected.to_string(),
        ])
        .map_err(err)?;
        w.flush().map_err(|e| MonteCarloError::Csv(e.to_string()))
    }
}

/// Binomial standard error `√(p(1-p)/N)`; zero on the analytic path.
pub fn standard_error(p_hat: f64, shots: u64) -> f64 {
    if shots == 0 {
        0.0
    } else {
        (p_hat * (1.0 - p_hat) / shots as f64).sqrt()
    }
}

/// Samples (or, for `shots = 0`, copies) one setting's distribution and
/// returns the outcome frequencies.
fn observe(
    setting: String,
    probabilities: Vec<f64>,
    seed: u64,
    stream: u64,
    shots: u64,
) -> Result<(SettingCounts, Vec<f64>), MonteCarloError> {
    if shots == 0 {
        let freqs = probabilities.clone();
        return Ok((
            SettingCounts {
                setting,
                stream,
                probabilities,
                counts: Vec::new(),
            },
            freqs,
        ));
    }
    let counts = sample_setting(&probabilities, shots, &mut setting_rng(seed, stream))?;
    let freqs = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    Ok((
        SettingCounts {
            setting,
            stream,
            probabilities,
            counts,
        },
        freqs,
    ))
}

fn total_of(estimates: &[Estimate]) -> Measured {
    Measured::new(
        estimates.iter().map(|e| e.p_hat).sum(),
        estimates
            .iter()
            .map(|e| e.stderr * e.stderr)
            .sum::<f64>()
            .sqrt(),
    )
}

/// Outcome order within a CHSH setting.
const CHSH_OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

fn chsh_outcome_vectors(i: u8, j: u8) -> Vec<StateVector> {
    CHSH_OUTCOMES
        .iter()
        .map(|&(a, b)| {
            PauliSetting::from_index(i)
                .eigenvector(a)
                .tensor(&PauliSetting::from_index(j).eigenvector(b))
        })
        .collect()
}

fn born_distribution(
    state: &StateVector,
    basis: &[StateVector],
) -> Result<Vec<f64>, MonteCarloError> {
    basis
        .iter()
        .map(|b| {
            Ok(inner_product(b, state)
                .map_err(ScenarioError::from)?
                .norm_sqr())
        })
        .collect()
}

/// The Bell experiment: four local setting pairs, four outcomes each.
pub fn run_chsh(seed: u64, shots: u64, noise: NoiseModel) -> Result<SimulatedRun, MonteCarloError> {
    if noise.dim() != 4 {
        return Err(MonteCarloError::DimensionMismatch {
            got: noise.dim(),
            want: 4,
        });
    }
    let scenario = build_chsh_scenario();
    let mut settings = Vec::with_capacity(4);
    let mut freqs = Vec::with_capacity(4);
    for i in 0..2u8 {
        for j in 0..2u8 {
            let ideal = born_distribution(&scenario.state, &chsh_outcome_vectors(i, j))?;
            let stream = CHSH_STREAM + u64::from(2 * i + j);
            let (counts, f) = observe(
                format!("{i},{j}"),
                noise.apply_all(&ideal),
                seed,
                stream,
                shots,
            )?;
            settings.push((counts, ideal));
            freqs.push(f);
        }
    }

    let estimates: Vec<Estimate> = CHSH_EVENTS
        .iter()
        .zip(&scenario.events)
        .map(|(ev, event)| {
            let setting = usize::from(2 * ev.i + ev.j);
            let slot = CHSH_OUTCOMES
                .iter()
                .position(|&o| o == (ev.a, ev.b))
                .expect("listed outcome");
            let p_hat = freqs[setting][slot];
            let ideal = settings[setting].1[slot];
            Estimate {
                label: event.label.clone(),
                notation: event.notation.clone(),
                p_hat,
                stderr: standard_error(p_hat, shots),
                ideal,
                noisy: noise.apply(ideal),
            }
        })
        .collect();

    Ok(SimulatedRun {
        experiment: Experiment::Chsh,
        seed,
        shots_per_setting: shots,
        visibility: noise.visibility(),
        total: total_of(&estimates),
        total_noisy: estimates.iter().map(|e| e.noisy).sum(),
        settings: settings.into_iter().map(|(c, _)| c).collect(),
        estimates,
    })
}

/// The NC experiment: one five-outcome basis per triangle; `p(v_i)` is read
/// off the basis whose triangle ends at `i`.
pub fn run_nc(seed: u64, shots: u64, noise: NoiseModel) -> Result<SimulatedRun, MonteCarloError> {
    if noise.dim() != 5 {
        return Err(MonteCarloError::DimensionMismatch {
            got: noise.dim(),
            want: 5,
        });
    }
    let scenario = build_nc_scenario();
    let bases = measurement_bases()?;
    let mut settings = Vec::with_capacity(8);
    let mut estimates = Vec::with_capacity(8);
    for (i, event) in scenario.events.iter().enumerate() {
        let basis = basis_for_event(&bases, i).expect("every event ends one triangle");
        let ideal = born_distribution(&scenario.state, &basis.vectors())?;
        let stream = NC_STREAM + i as u64;
        let (counts, freqs) = observe(
            format!("basis {}", basis.label),
            noise.apply_all(&ideal),
            seed,
            stream,
            shots,
        )?;
        let slot = basis.slot_of(i).expect("triangle contains its end");
        estimates.push(Estimate {
            label: event.label.clone(),
            notation: event.notation.clone(),
            p_hat: freqs[slot],
            stderr: standard_error(freqs[slot], shots),
            ideal: ideal[slot],
            noisy: noise.apply(ideal[slot]),
        });
        settings.push(counts);
    }
    Ok(SimulatedRun {
        experiment: Experiment::Nc,
        seed,
        shots_per_setting: shots,
        visibility: noise.visibility(),
        total: total_of(&estimates),
        total_noisy: estimates.iter().map(|e| e.noisy).sum(),
        settings,
        estimates,
    })
}

/// One simulated `p(1 | μ_j ; e_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusivityEstimate {
    pub measured: usize,
    pub prepared: usize,
    pub p_hat: f64,
    pub stderr: f64,
    pub ideal: f64,
    pub noisy: f64,
    /// Laboratory value and uncertainty for the same test.
    pub lab: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusivityRun {
    pub seed: u64,
    pub shots_per_setting: u64,
    pub visibility: f64,
    pub chsh: Vec<ExclusivityEstimate>,
    pub nc: Vec<ExclusivityEstimate>,
}

/// Prepares each event's own vector and measures the test containing
/// another event, for every pair listed in the laboratory exclusivity tables.
pub fn run_exclusivity_checks(
    seed: u64,
    shots: u64,
    visibility: f64,
) -> Result<ExclusivityRun, MonteCarloError> {
    let chsh_noise = NoiseModel::new(visibility, 4)?;
    let nc_noise = NoiseModel::new(visibility, 5)?;
    let chsh = build_chsh_scenario();
    let nc = build_nc_scenario();
    let bases = measurement_bases()?;

    let mut chsh_rows = Vec::with_capacity(measured::CHSH_EXCLUSIVITY.len());
    for (row, test) in measured::CHSH_EXCLUSIVITY.iter().enumerate() {
        let target = CHSH_EVENTS[test.measured];
        let outcomes = chsh_outcome_vectors(target.i, target.j);
        let ideal = born_distribution(&chsh.events[test.prepared].vec, &outcomes)?;
        let slot = CHSH_OUTCOMES
            .iter()
            .position(|&o| o == (target.a, target.b))
            .expect("listed outcome");
        let setting = format!("mu{} on u{}", test.measured, test.prepared);
        let (_, freqs) = observe(
            setting,
            chsh_noise.apply_all(&ideal),
            seed,
            CHSH_CHECK_STREAM + row as u64,
            shots,
        )?;
        chsh_rows.push(ExclusivityEstimate {
            measured: test.measured,
            prepared: test.prepared,
            p_hat: freqs[slot],
            stderr: standard_error(freqs[slot], shots),
            ideal: ideal[slot],
            noisy: chsh_noise.apply(ideal[slot]),
            lab: (test.value, test.uncertainty),
        });
    }

    let mut nc_rows = Vec::with_capacity(measured::NC_EXCLUSIVITY.len());
    for (row, test) in measured::NC_EXCLUSIVITY.iter().enumerate() {
        let basis = basis_for_event(&bases, test.measured).expect("every event ends one triangle");
        let ideal = born_distribution(&nc.events[test.prepared].vec, &basis.vectors())?;
        let slot = basis
            .slot_of(test.measured)
            .expect("triangle contains its end");
        let setting = format!("mu'{} on v{}", test.measured, test.prepared);
        let (_, freqs) = observe(
            setting,
            nc_noise.apply_all(&ideal),
            seed,
            NC_CHECK_STREAM + row as u64,
            shots,
        )?;
        nc_rows.push(ExclusivityEstimate {
            measured: test.measured,
            prepared: test.prepared,
            p_hat: freqs[slot],
            stderr: standard_error(freqs[slot], shots),
            ideal: ideal[slot],
            noisy: nc_noise.apply(ideal[slot]),
            lab: (test.value, test.uncertainty),
        });
    }

    Ok(ExclusivityRun {
        seed,
        shots_per_setting: shots,
        visibility,
        chsh: chsh_rows,
        nc: nc_rows,
    })
}

/// The sixteen `W` values from two simulated runs.
pub fn run_w_report(
    chsh: &SimulatedRun,
    nc: &SimulatedRun,
) -> Result<Vec<WReport>, MonteCarloError> {
    if chsh.estimates.len() != 8 || nc.estimates.len() != 8 {
        return Err(MonteCarloError::InvalidDistribution(
            "runs must carry eight estimates".into(),
        ));
    }
    Ok(w_reports(
        &chsh.measured_estimates(),
        &nc.measured_estimates(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::exclusivity_table;
    use std::f64::consts::SQRT_2;

    #[test]
    fn deterministic_outcome() {
        let mut rng = setting_rng(1, 0);
        assert_eq!(
            sample_setting(&[1.0, 0.0, 0.0, 0.0], 100, &mut rng).unwrap(),
            vec![100, 0, 0, 0]
        );
        let mut rng = setting_rng(1, 0);
        assert_eq!(
            sample_setting(&[0.0, 0.0, 1.0], 7, &mut rng).unwrap(),
            vec![0, 0, 7]
        );
    }

    #[test]
    fn rejects_bad_distributions() {
        let mut rng = setting_rng(1, 0);
        assert!(sample_setting(&[0.5, 0.4], 10, &mut rng).is_err());
        assert!(sample_setting(&[1.5, -0.5], 10, &mut rng).is_err());
        assert!(sample_setting(&[1.0], 0, &mut rng).is_err());
        assert!(NoiseModel::new(1.5, 4).is_err());
    }

    #[test]
    fn uniform_counts_within_five_sigma() {
        let n = 1_000_000u64;
        let counts = sample_setting(&[0.25; 4], n, &mut setting_rng(7, 3)).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), n);
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - 250_000.0).abs() < 5.0 * sigma, "{c}");
        }
    }

    #[test]
    fn chsh_setting_zero_zero() {
        let s = build_chsh_scenario();
        let ideal = born_distribution(&s.state, &chsh_outcome_vectors(0, 0)).unwrap();
        let n = 100_000u64;
        let counts = sample_setting(&ideal, n, &mut setting_rng(11, 0)).unwrap();
        let p = (2.0 + SQRT_2) / 8.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((counts[0] as f64 / n as f64 - p).abs() < 5.0 * sigma);
    }

    #[test]
    fn analytic_paths() {
        let chsh = run_chsh(0, 0, NoiseModel::new(1.0, 4).unwrap()).unwrap();
        assert!((chsh.total.value - (2.0 + SQRT_2)).abs() < 1e-12);
        assert_eq!(chsh.total.uncertainty, 0.0);
        let nc = run_nc(0, 0, NoiseModel::new(1.0, 5).unwrap()).unwrap();
        assert!((nc.total.value - (8.0 - 4.0 * SQRT_2)).abs() < 1e-12);
        for r in run_w_report(&chsh, &nc).unwrap() {
            assert!((r.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn white_noise_limits() {
        let chsh = run_chsh(3, 0, NoiseModel::new(0.0, 4).unwrap()).unwrap();
        assert!((chsh.total.value - 2.0).abs() < 1e-12);
        let nc = run_nc(3, 0, NoiseModel::new(0.0, 5).unwrap()).unwrap();
        assert!((nc.total.value - 1.6).abs() < 1e-12);

        let chsh = run_chsh(3, 200_000, NoiseModel::new(0.0, 4).unwrap()).unwrap();
        assert!((chsh.total.value - 2.0).abs() < 5.0 * chsh.total.uncertainty);
        let nc = run_nc(3, 200_000, NoiseModel::new(0.0, 5).unwrap()).unwrap();
        assert!((nc.total.value - 1.6).abs() < 5.0 * nc.total.uncertainty);
    }

    #[test]
    fn noisy_chsh_band() {
        let v = 0.998;
        let run = run_chsh(42, 200_000, NoiseModel::new(v, 4).unwrap()).unwrap();
        let expected = v * (2.0 + SQRT_2) + (1.0 - v) * 2.0;
        assert!((run.total_noisy - expected).abs() < 1e-12);
        assert!(
            (3.39..=3.43).contains(&run.total.value),
            "{}",
            run.total.value
        );
        assert!((run.total.value - expected).abs() < 5.0 * run.total.uncertainty);
    }

    #[test]
    fn same_seed_same_counts() {
        let noise = NoiseModel::new(0.995, 5).unwrap();
        assert_eq!(
            run_nc(9, 10_000, noise).unwrap(),
            run_nc(9, 10_000, noise).unwrap()
        );
        assert_ne!(
            run_nc(9, 10_000, noise).unwrap().settings,
            run_nc(10, 10_000, noise).unwrap().settings
        );
    }

    #[test]
    fn exclusivity_checks() {
        let run = run_exclusivity_checks(5, 200_000, 0.999).unwrap();
        let diag = run
            .chsh
            .iter()
            .find(|e| e.measured == 0 && e.prepared == 0)
            .unwrap();
        assert!(diag.p_hat >= 0.99);
        let edge = run
            .chsh
            .iter()
            .find(|e| e.measured == 4 && e.prepared == 0)
            .unwrap();
        assert!(edge.p_hat <= 1e-3);

        let ideal = run_exclusivity_checks(5, 0, 1.0).unwrap();
        let chsh_table = exclusivity_table(&build_chsh_scenario()).unwrap();
        let nc_table = exclusivity_table(&build_nc_scenario()).unwrap();
        for e in &ideal.chsh {
            assert!((e.p_hat - chsh_table[e.measured][e.prepared]).abs() < 1e-12);
        }
        for e in &ideal.nc {
            assert!((e.p_hat - nc_table[e.measured][e.prepared]).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_has_total_row() {
        let run = run_chsh(1, 0, NoiseModel::new(1.0, 4).unwrap()).unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        // notation contains commas and must be quoted
        assert!(text.lines().nth(1).unwrap().starts_with("u0,\"1,1|0,0\","));
        assert!(text.lines().last().unwrap().starts_with("S,,"));
    }
}

//! Maximum-likelihood tournament that turns a distinguishing measurement into
//! an identifier, and the copy-count experiment built on it.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::matrix::{numerical_rank, DensityMatrix, OutcomeDistribution, DEFAULT_RANK_TOL};
use crate::measure::{distinguishing_power, measure_povm, Ensemble, MeasurementMode};
use crate::random::{map_trials, Povm, RngStream};

/// Log-likelihood contribution of an outcome with probability zero.
pub const LOG_FLOOR: f64 = -745.0;
/// Default calibration constant in `t = c ln m / delta^2`.
pub const DEFAULT_COPY_CONSTANT: f64 = 16.0;

/// `t` outcomes of repeated measurements with one POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationRecord {
    outcomes: Vec<usize>,
    labels: Arc<[String]>,
}

impl ObservationRecord {
    pub fn new(outcomes: Vec<usize>, labels: Arc<[String]>) -> Result<Self> {
        ensure!(!outcomes.is_empty(), "need at least one observation");
        ensure!(
            outcomes.iter().all(|&o| o < labels.len()),
            "observation outside the {} outcome labels",
            labels.len()
        );
        Ok(Self { outcomes, labels })
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn labels(&self) -> &Arc<[String]> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// `t` independent draws from `p`.
pub fn sample_observations<R: Rng + ?Sized>(p: &OutcomeDistribution, t: usize, rng: &mut R) -> Result<ObservationRecord> {
    ensure!(t >= 1, "need t >= 1");
    let w = WeightedIndex::new(p.probs()).map_err(|e| Error::Contract(format!("cannot sample outcome distribution: {e}")))?;
    let outcomes = (0..t).map(|_| w.sample(rng)).collect();
    ObservationRecord::new(outcomes, p.labels().clone())
}

/// `sum_t log p(o_t)`, with [`LOG_FLOOR`] for impossible outcomes.
pub fn log_likelihood(obs: &ObservationRecord, p: &OutcomeDistribution) -> Result<f64> {
    ensure!(
        p.labels().len() == obs.labels.len() && p.labels().iter().zip(obs.labels.iter()).all(|(a, b)| a == b),
        "distribution is not over the observed outcome labels"
    );
    let probs = p.probs();
    Ok(obs
        .outcomes
        .iter()
        .map(|&o| if probs[o] > 0.0 { probs[o].ln().max(LOG_FLOOR) } else { LOG_FLOOR })
        .sum())
}

/// Outcome of a pairwise likelihood comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Winner {
    First,
    Second,
}

/// Maximum-likelihood choice between two hypotheses. Ties go to the first.
pub fn pairwise_ml(obs: &ObservationRecord, p_i: &OutcomeDistribution, p_j: &OutcomeDistribution) -> Result<Winner> {
    let (li, lj) = (log_likelihood(obs, p_i)?, log_likelihood(obs, p_j)?);
    Ok(if lj > li { Winner::Second } else { Winner::First })
}

/// Champion tournament: candidate 0 faces candidates `1..m` in turn and the
/// winner of each comparison carries on. Returns the final champion.
pub fn tournament_identify(obs: &ObservationRecord, candidates: &[OutcomeDistribution]) -> Result<usize> {
    ensure!(!candidates.is_empty(), "tournament needs at least one candidate");
    let mut champion = 0;
    let mut champion_ll = log_likelihood(obs, &candidates[0])?;
    for (j, c) in candidates.iter().enumerate().skip(1) {
        let ll = log_likelihood(obs, c)?;
        // Same decision as pairwise_ml(obs, champion, c).
        if ll > champion_ll {
            champion = j;
            champion_ll = ll;
        }
    }
    Ok(champion)
}

/// `ceil(c ln m / delta^2)`.
pub fn copies_for(m: usize, delta: f64, c_cal: f64) -> Result<usize> {
    ensure!(m >= 2, "need m >= 2 hypotheses, got {m}");
    ensure!(delta > 0.0 && delta <= 2.0, "need 0 < delta <= 2, got {delta}");
    ensure!(c_cal > 0.0, "calibration constant must be positive");
    Ok((c_cal * (m as f64).ln() / (delta * delta)).ceil() as usize)
}

/// How `identification_experiment` picks the copy count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CopyRule {
    /// `copies_for(k, delta, c)` with `delta` the measured distinguishing power.
    Measured { c: f64 },
    /// `copies_for(k, delta, c)` with `delta = min trace distance / sqrt(r)`,
    /// `r` the largest rank in the ensemble.
    FrobeniusSurrogate { c: f64 },
    Fixed { t: usize },
}

/// A drawn POVM with the exact outcome laws of every ensemble member.
#[derive(Clone, Debug)]
pub struct Identifier {
    povm: Povm,
    distributions: Vec<OutcomeDistribution>,
}

impl Identifier {
    pub fn new(povm: Povm, states: &[DensityMatrix]) -> Result<Self> {
        let distributions = states.iter().map(|s| measure_povm(s, &povm)).collect::<Result<_>>()?;
        Ok(Self { povm, distributions })
    }

    pub fn from_distributions(povm: Povm, distributions: Vec<OutcomeDistribution>) -> Self {
        Self { povm, distributions }
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn distributions(&self) -> &[OutcomeDistribution] {
        &self.distributions
    }

    /// `t` measured copies of state `truth`.
    pub fn observe<R: Rng + ?Sized>(&self, truth: usize, t: usize, rng: &mut R) -> Result<ObservationRecord> {
        ensure!(truth < self.distributions.len(), "no state {truth}");
        sample_observations(&self.distributions[truth], t, rng)
    }

    pub fn identify(&self, obs: &ObservationRecord) -> Result<usize> {
        tournament_identify(obs, &self.distributions)
    }
}

/// Stream of run `run` for true state `state`. The POVM draw uses
/// `rng.substream(0)`.
pub fn run_stream(rng: RngStream, state: usize) -> RngStream {
    rng.substream(1 + state as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct StateSuccess {
    pub name: String,
    pub successes: usize,
    pub runs: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentifyReport {
    pub mode: MeasurementMode,
    pub rule: CopyRule,
    pub states: usize,
    pub dim: usize,
    pub runs: usize,
    pub master_seed: u64,
    /// Measured distinguishing power of the drawn POVM.
    pub delta: f64,
    pub min_trace_distance: f64,
    pub max_rank: usize,
    pub copies: usize,
    pub per_state: Vec<StateSuccess>,
    pub overall_rate: f64,
    pub min_rate: f64,
    /// `guesses[s][run]`.
    #[serde(skip)]
    pub guesses: Vec<Vec<usize>>,
}

/// Draws one POVM, fixes the copy count, then for every state and run
/// measures `t` copies and identifies the state by tournament.
pub fn identification_experiment(
    ensemble: &Ensemble,
    mode: MeasurementMode,
    rule: CopyRule,
    runs: usize,
    rng: RngStream,
) -> Result<IdentifyReport> {
    ensure!(runs >= 1, "need at least one run");
    ensure!(ensemble.len() >= 2, "identification needs at least two states");
    let min_trace_distance = ensemble.min_trace_distance()?;
    ensure!(min_trace_distance > 1e-10, "ensemble contains duplicate states");
    let povm = mode.sample_povm(ensemble.dim(), &mut rng.substream(0).generator())?;
    let delta = distinguishing_power(&povm, ensemble)?;
    let max_rank = ensemble
        .states()
        .iter()
        .map(|s| numerical_rank(s.matrix(), DEFAULT_RANK_TOL))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(1);
    let k = ensemble.len();
    let copies = match rule {
        CopyRule::Measured { c } => {
            ensure!(delta > 1e-9, "drawn POVM does not distinguish the ensemble (delta = {delta:e})");
            copies_for(k, delta.min(2.0), c)?
        }
        CopyRule::FrobeniusSurrogate { c } => copies_for(k, (min_trace_distance / (max_rank as f64).sqrt()).min(2.0), c)?,
        CopyRule::Fixed { t } => {
            ensure!(t >= 1, "need t >= 1");
            t
        }
    };
    let id = Identifier::new(povm, ensemble.states())?;
    let mut guesses = Vec::with_capacity(k);
    for s in 0..k {
        let row: Vec<usize> = map_trials(runs, run_stream(rng, s), |_, g| {
            let obs = id.observe(s, copies, g)?;
            id.identify(&obs)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        guesses.push(row);
    }
    let per_state: Vec<StateSuccess> = guesses
        .iter()
        .enumerate()
        .map(|(s, row)| {
            let successes = row.iter().filter(|&&g| g == s).count();
            StateSuccess { name: ensemble.names()[s].clone(), successes, runs, rate: successes as f64 / runs as f64 }
        })
        .collect();
    let overall_rate = per_state.iter().map(|p| p.successes).sum::<usize>() as f64 / (k * runs) as f64;
    let min_rate = per_state.iter().map(|p| p.rate).fold(f64::INFINITY, f64::min);
    Ok(IdentifyReport {
        mode,
        rule,
        states: k,
        dim: ensemble.dim(),
        runs,
        master_seed: rng.master_seed,
        delta,
        min_trace_distance,
        max_rank,
        copies,
        per_state,
        overall_rate,
        min_rate,
        guesses,
    })
}

/// `k` Haar-random pure states in `C^n`.
pub fn random_pure_ensemble(n: usize, k: usize, rng: RngStream) -> Result<Ensemble> {
    let mut g = rng.generator();
    let states = (0..k)
        .map(|_| DensityMatrix::from_pure(&crate::random::sample_unit_vector(n, &mut g)?))
        .collect::<Result<_>>()?;
    Ensemble::new(states)
}

/// `k` states, each the completely mixed state on `r` Haar-random orthonormal vectors.
pub fn random_mixed_ensemble(n: usize, r: usize, k: usize, rng: RngStream) -> Result<Ensemble> {
    ensure!(r >= 1 && r <= n, "need 1 <= r <= n");
    let mut g = rng.generator();
    let states = (0..k)
        .map(|_| {
            let b = crate::random::sample_haar_basis(n, &mut g)?;
            DensityMatrix::completely_mixed_on(&b.vectors()[..r])
        })
        .collect::<Result<_>>()?;
    Ensemble::new(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::index_labels;

    fn dist(p: &[f64]) -> OutcomeDistribution {
        OutcomeDistribution::from_probs(p.to_vec()).unwrap()
    }

    fn obs(o: &[usize], m: usize) -> ObservationRecord {
        ObservationRecord::new(o.to_vec(), index_labels(m)).unwrap()
    }

    #[test]
    fn tie_goes_to_first() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(pairwise_ml(&obs(&[0, 1, 1], 2), &p, &p).unwrap(), Winner::First);
    }

    #[test]
    fn support_decides() {
        let (p, q) = (dist(&[1.0, 0.0]), dist(&[0.5, 0.5]));
        assert_eq!(pairwise_ml(&obs(&[0, 0], 2), &p, &q).unwrap(), Winner::First);
        assert_eq!(pairwise_ml(&obs(&[0, 1], 2), &p, &q).unwrap(), Winner::Second);
    }

    #[test]
    fn hand_computed_comparison() {
        let (p, q) = (dist(&[0.9, 0.1]), dist(&[0.1, 0.9]));
        let o = obs(&[0, 0, 1], 2);
        let lp = log_likelihood(&o, &p).unwrap();
        assert!((lp - (2.0 * 0.9f64.ln() + 0.1f64.ln())).abs() < 1e-15);
        assert_eq!(pairwise_ml(&o, &p, &q).unwrap(), Winner::First);
    }

    #[test]
    fn tournament_edge_cases() {
        let p = dist(&[0.3, 0.7]);
        let o = obs(&[1], 2);
        assert_eq!(tournament_identify(&o, std::slice::from_ref(&p)).unwrap(), 0);
        assert_eq!(tournament_identify(&o, &[p.clone(), p.clone(), p]).unwrap(), 0);
        assert!(tournament_identify(&o, &[]).is_err());
    }

    #[test]
    fn label_mismatch_rejected() {
        let p = dist(&[0.5, 0.5]);
        let o = obs(&[0], 3);
        assert!(pairwise_ml(&o, &p, &p).is_err());
        assert!(ObservationRecord::new(vec![3], index_labels(3)).is_err());
        assert!(ObservationRecord::new(vec![], index_labels(3)).is_err());
    }

    #[test]
    fn copy_counts() {
        assert_eq!(copies_for(2, 2.0, 16.0).unwrap(), 3);
        assert_eq!(copies_for(16, 0.5, 16.0).unwrap(), 178);
        assert!(copies_for(1, 1.0, 16.0).is_err());
        assert!(copies_for(4, 0.0, 16.0).is_err());
        assert!(copies_for(4, 2.5, 16.0).is_err());
    }

    #[test]
    fn duplicate_ensemble_rejected() {
        let s = DensityMatrix::maximally_mixed(2);
        let e = Ensemble::new(vec![s.clone(), s]).unwrap();
        let r = identification_experiment(&e, MeasurementMode::HaarBasis, CopyRule::Fixed { t: 3 }, 5, RngStream::new(0, 0));
        assert!(r.is_err());
    }
}

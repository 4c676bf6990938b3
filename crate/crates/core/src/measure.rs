//! Measuring states and comparing the resulting outcome distributions.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::matrix::{frobenius_norm, index_labels, total_variation, trace_norm, DensityMatrix, OutcomeDistribution};
use crate::random::{build_random_povm_ancilla, sample_haar_basis, OrthonormalBasis, Povm, RngStream};

/// Frobenius distances below this are treated as identical states.
pub const DEGENERATE_FROBENIUS: f64 = 1e-12;

/// Named collection of density matrices of one dimension.
#[derive(Clone, Debug)]
pub struct Ensemble {
    states: Vec<DensityMatrix>,
    names: Vec<String>,
}

impl Ensemble {
    pub fn new(states: Vec<DensityMatrix>) -> Result<Self> {
        let names = (0..states.len()).map(|i| format!("s{i}")).collect();
        Self::with_names(states, names)
    }

    pub fn with_names(states: Vec<DensityMatrix>, names: Vec<String>) -> Result<Self> {
        ensure!(!states.is_empty(), "ensemble is empty");
        ensure!(states.len() == names.len(), "one name per state required");
        let n = states[0].dim();
        ensure!(states.iter().all(|s| s.dim() == n), "ensemble states differ in dimension");
        Ok(Self { states, names })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Smallest pairwise trace distance `||s_i - s_j||_tr`.
    pub fn min_trace_distance(&self) -> Result<f64> {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in 0..i {
                let d = trace_norm(&(self.states[i].matrix() - self.states[j].matrix()))?;
                best = best.min(d);
            }
        }
        Ok(best)
    }
}

/// `p_t = <b_t| sigma |b_t>`.
pub fn measure_basis(sigma: &DensityMatrix, basis: &OrthonormalBasis) -> Result<OutcomeDistribution> {
    ensure!(sigma.dim() == basis.dim(), "state and basis dimensions differ");
    let probs = basis.vectors().iter().map(|b| sigma.matrix().quadratic_form(b)).collect();
    OutcomeDistribution::new(probs, index_labels(basis.dim()))
}

/// `p_i = Tr(sigma E_i)`.
pub fn measure_povm(sigma: &DensityMatrix, povm: &Povm) -> Result<OutcomeDistribution> {
    ensure!(sigma.dim() == povm.dim(), "state and POVM dimensions differ");
    let probs = povm.elements().iter().map(|e| sigma.matrix().trace_product(e).re).collect();
    OutcomeDistribution::new(probs, povm.labels().clone())
}

/// Least pairwise total variation of the ensemble's outcome distributions.
pub fn distinguishing_power(povm: &Povm, ensemble: &Ensemble) -> Result<f64> {
    ensure!(ensemble.len() >= 2, "distinguishing power needs at least two states");
    let dists: Vec<_> = ensemble.states().iter().map(|s| measure_povm(s, povm)).collect::<Result<_>>()?;
    let mut best = f64::INFINITY;
    for i in 0..dists.len() {
        for j in 0..i {
            best = best.min(total_variation(&dists[i], &dists[j])?);
        }
    }
    Ok(best)
}

/// Which random measurement to draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasurementMode {
    HaarBasis,
    PovmPlain,
    PovmAncilla { k: usize },
}

impl MeasurementMode {
    /// Draws one measurement on `C^n` and applies it to both states.
    pub fn tv_pair(
        &self,
        a: &DensityMatrix,
        b: &DensityMatrix,
        rng: &mut impl rand::Rng,
    ) -> Result<f64> {
        let (p, q) = match *self {
            MeasurementMode::HaarBasis => {
                let basis = sample_haar_basis(a.dim(), rng)?;
                (measure_basis(a, &basis)?, measure_basis(b, &basis)?)
            }
            MeasurementMode::PovmPlain => {
                let povm = build_random_povm_ancilla(a.dim(), 1, rng)?;
                (measure_povm(a, &povm)?, measure_povm(b, &povm)?)
            }
            MeasurementMode::PovmAncilla { k } => {
                let povm = build_random_povm_ancilla(a.dim(), k, rng)?;
                (measure_povm(a, &povm)?, measure_povm(b, &povm)?)
            }
        };
        total_variation(&p, &q)
    }

    /// Draws the measurement as a POVM (bases become rank-one POVMs).
    pub fn sample_povm(&self, n: usize, rng: &mut impl rand::Rng) -> Result<Povm> {
        match *self {
            MeasurementMode::HaarBasis => Ok(Povm::from_basis(&sample_haar_basis(n, rng)?)),
            MeasurementMode::PovmPlain => build_random_povm_ancilla(n, 1, rng),
            MeasurementMode::PovmAncilla { k } => build_random_povm_ancilla(n, k, rng),
        }
    }

    /// Number of measurement outcomes for states on `C^n`.
    pub fn outcomes(&self, n: usize) -> usize {
        match *self {
            MeasurementMode::HaarBasis => n,
            MeasurementMode::PovmPlain => n + 1,
            MeasurementMode::PovmAncilla { k } => n * k + 1,
        }
    }
}

impl std::fmt::Display for MeasurementMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasurementMode::HaarBasis => write!(f, "haar-basis"),
            MeasurementMode::PovmPlain => write!(f, "povm-plain"),
            MeasurementMode::PovmAncilla { k } => write!(f, "povm-ancilla({k})"),
        }
    }
}

impl std::str::FromStr for MeasurementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "haar-basis" => return Ok(Self::HaarBasis),
            "povm-plain" => return Ok(Self::PovmPlain),
            _ => {}
        }
        let k = s
            .strip_prefix("povm-ancilla(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("povm-ancilla:"))
            .and_then(|k| k.trim().parse::<usize>().ok());
        match k {
            Some(k) if k >= 1 => Ok(Self::PovmAncilla { k }),
            _ => Err(Error::Contract(format!(
                "unknown measurement mode {s:?}; expected haar-basis, povm-plain or povm-ancilla(K)"
            ))),
        }
    }
}

/// One trial of a distinguishing experiment.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub tv: f64,
    /// `tv / ||a - b||_F`.
    pub ratio: f64,
}

/// Summary of a seeded random-measurement distinguishing experiment.
#[derive(Clone, Debug, Serialize)]
pub struct DistinguishReport {
    pub mode: MeasurementMode,
    pub dim: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub frobenius: f64,
    pub trace_distance: f64,
    pub min_tv: f64,
    pub median_tv: f64,
    pub mean_tv: f64,
    pub min_ratio: f64,
    pub median_ratio: f64,
    pub records: Vec<TrialRecord>,
}

impl DistinguishReport {
    /// Fraction of trials with `tv >= c * ||a - b||_F`.
    pub fn fraction_at_least(&self, c: f64) -> f64 {
        let hits = self.records.iter().filter(|r| r.tv >= c * self.frobenius).count();
        hits as f64 / self.records.len() as f64
    }

    pub fn tvs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.tv).collect()
    }
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Draws `trials` independent measurements of the given kind and records the
/// total variation they induce between `a` and `b`.
///
/// Trial `i` uses `rng.substream(i)`, so the report is a function of the
/// inputs and the seed only.
pub fn frobenius_tv_experiment(
    a: &DensityMatrix,
    b: &DensityMatrix,
    mode: MeasurementMode,
    trials: usize,
    rng: RngStream,
) -> Result<DistinguishReport> {
    ensure!(trials >= 1, "need at least one trial");
    ensure!(a.dim() == b.dim(), "states differ in dimension");
    let diff = a.matrix() - b.matrix();
    let frobenius = frobenius_norm(&diff);
    if frobenius < DEGENERATE_FROBENIUS {
        return Err(Error::DegeneratePair(frobenius));
    }
    let trace_distance = trace_norm(&diff)?;
    let tvs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| mode.tv_pair(a, b, &mut rng.substream(i as u64).generator()))
        .collect::<Result<_>>()?;
    let records: Vec<TrialRecord> = tvs
        .iter()
        .enumerate()
        .map(|(trial, &tv)| TrialRecord { trial, tv, ratio: tv / frobenius })
        .collect();
    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    Ok(DistinguishReport {
        mode,
        dim: a.dim(),
        trials,
        master_seed: rng.master_seed,
        frobenius,
        trace_distance,
        min_tv: tvs.iter().copied().fold(f64::INFINITY, f64::min),
        median_tv: median(&tvs),
        mean_tv: tvs.iter().sum::<f64>() / trials as f64,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        median_ratio: median(&ratios),
        records,
    })
}

/// `pairs` independent pairs of Haar-random pure states in `C^n`. Pair `p`
/// draws its states from `rng.substream(2p)`; [`random_pair_experiment`]
/// runs its trials on `rng.substream(2p + 1)`.
pub fn random_pure_pairs(n: usize, pairs: usize, rng: RngStream) -> Result<Vec<(DensityMatrix, DensityMatrix)>> {
    (0..pairs)
        .map(|p| {
            let mut g = rng.substream(2 * p as u64).generator();
            let a = DensityMatrix::from_pure(&crate::random::sample_unit_vector(n, &mut g)?)?;
            let b = DensityMatrix::from_pure(&crate::random::sample_unit_vector(n, &mut g)?)?;
            Ok((a, b))
        })
        .collect()
}

/// [`frobenius_tv_experiment`] on each of `pairs` random pure pairs.
pub fn random_pair_experiment(
    n: usize,
    pairs: usize,
    mode: MeasurementMode,
    trials: usize,
    rng: RngStream,
) -> Result<Vec<DistinguishReport>> {
    random_pure_pairs(n, pairs, rng)?
        .iter()
        .enumerate()
        .map(|(p, (a, b))| frobenius_tv_experiment(a, b, mode, trials, rng.substream(2 * p as u64 + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ComplexMatrix, C64};

    fn ket(n: usize, i: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[i] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn computational_basis_sees_diagonal() {
        let s = DensityMatrix::coordinate_mixture(4, [0, 2]).unwrap();
        let p = measure_basis(&s, &OrthonormalBasis::computational(4)).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn basis_and_projector_povm_agree() {
        let mut rng = RngStream::new(11, 0).generator();
        let b = sample_haar_basis(5, &mut rng).unwrap();
        let s = DensityMatrix::from_pure(&crate::random::sample_unit_vector(5, &mut rng).unwrap()).unwrap();
        let p = measure_basis(&s, &b).unwrap();
        let q = measure_povm(&s, &Povm::from_basis(&b)).unwrap();
        assert!(p.same_outcomes(&q));
        assert!(p.probs().iter().zip(q.probs()).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn orthogonal_pure_states_are_perfectly_separated_by_their_basis() {
        let e = Ensemble::new(vec![
            DensityMatrix::from_pure(&ket(2, 0)).unwrap(),
            DensityMatrix::from_pure(&ket(2, 1)).unwrap(),
        ])
        .unwrap();
        let povm = Povm::from_basis(&OrthonormalBasis::computational(2));
        assert!((distinguishing_power(&povm, &e).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_ensemble_rejected() {
        let e = Ensemble::new(vec![DensityMatrix::maximally_mixed(2)]).unwrap();
        let povm = Povm::from_basis(&OrthonormalBasis::computational(2));
        assert!(distinguishing_power(&povm, &e).is_err());
    }

    #[test]
    fn identical_states_are_degenerate() {
        let s = DensityMatrix::maximally_mixed(3);
        let r = frobenius_tv_experiment(&s, &s, MeasurementMode::HaarBasis, 3, RngStream::new(0, 0));
        assert!(matches!(r, Err(Error::DegeneratePair(_))));
    }

    #[test]
    fn mode_round_trips() {
        for m in [MeasurementMode::HaarBasis, MeasurementMode::PovmPlain, MeasurementMode::PovmAncilla { k: 4 }] {
            assert_eq!(m.to_string().parse::<MeasurementMode>().unwrap(), m);
        }
        assert!("povm-ancilla(0)".parse::<MeasurementMode>().is_err());
        assert!("bogus".parse::<MeasurementMode>().is_err());
    }

    #[test]
    fn experiment_is_seed_deterministic() {
        let a = DensityMatrix::from_pure(&ket(4, 0)).unwrap();
        let b = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        let r1 = frobenius_tv_experiment(&a, &b, MeasurementMode::PovmAncilla { k: 2 }, 8, RngStream::new(5, 0)).unwrap();
        let r2 = frobenius_tv_experiment(&a, &b, MeasurementMode::PovmAncilla { k: 2 }, 8, RngStream::new(5, 0)).unwrap();
        assert_eq!(r1.tvs(), r2.tvs());
        assert!((r1.frobenius - (0.5f64).sqrt()).abs() < 1e-12);
        assert!(r1.tvs().iter().all(|&t| (0.0..=r1.trace_distance + 1e-9).contains(&t)));
    }
}

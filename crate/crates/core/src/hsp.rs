//! Coset states, their Fourier block form, random Fourier sampling, and
//! hidden subgroup identification.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::group::{enumerate_subgroups, normal_core, FiniteGroup, Representations, Subgroup};
use crate::identify::{sample_observations, tournament_identify};
use crate::matrix::{total_variation, trace_norm, ComplexMatrix, DensityMatrix, OutcomeDistribution, C64};
use crate::measure::measure_povm;
use crate::random::{build_random_povm_ancilla, map_trials, Povm, RngStream};

/// Two coset states closer than this (max entry) count as the same state.
pub const IDENTICAL_STATE_TOL: f64 = 1e-10;

/// Uniform mixture of the coset superpositions `|gH>`.
#[derive(Clone, Debug)]
pub struct CosetState {
    subgroup: Subgroup,
    density: DensityMatrix,
}

impl CosetState {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.density
    }
}

/// `sigma_H = (|H|/|G|) sum_{cosets} |gH><gH|`, built coset by coset and
/// checked entrywise against `sigma_{x,y} = [x^-1 y in H] / |G|`.
pub fn coset_state(group: &FiniteGroup, h: &Subgroup) -> Result<CosetState> {
    let n = group.order();
    let amp = 1.0 / (h.order() as f64).sqrt();
    let weight = h.order() as f64 / n as f64;
    let mut m = ComplexMatrix::zeros(n, n);
    for coset in h.left_cosets(group) {
        for &x in &coset {
            for &y in &coset {
                m[(x, y)] += C64::new(weight * amp * amp, 0.0);
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for x in 0..n {
        for y in 0..n {
            let want = if h.contains(group.mul(group.inv(x), y)) { inv_n } else { 0.0 };
            ensure!((m[(x, y)].re - want).abs() <= 1e-12, "coset state entry ({x}, {y}) is off");
        }
    }
    Ok(CosetState { subgroup: h.clone(), density: DensityMatrix::new(m)? })
}

/// One `(rho, i)` block of `QFT sigma_H QFT^dagger`.
#[derive(Clone, Debug)]
pub struct FourierBlock {
    pub irrep: usize,
    pub row: usize,
    /// `(|H|/|G|) conj(rho(H))`, indexed by the column index `j` of `(rho, i, j)`.
    pub block: ComplexMatrix,
}

/// Block-diagonal Fourier picture of a coset state.
#[derive(Clone, Debug)]
pub struct FourierBlockForm {
    pub dim: usize,
    pub blocks: Vec<FourierBlock>,
}

impl FourierBlockForm {
    pub fn reassemble(&self, reps: &Representations) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let d = b.block.rows();
            for j in 0..d {
                for l in 0..d {
                    m[(reps.fourier_index(b.irrep, b.row, j), reps.fourier_index(b.irrep, b.row, l))] = b.block[(j, l)];
                }
            }
        }
        m
    }
}

pub fn fourier_block_form(reps: &Representations, h: &Subgroup) -> FourierBlockForm {
    let g = reps.group().order() as f64;
    let scale = h.order() as f64 / g;
    let mut blocks = Vec::new();
    for (k, rho) in reps.irreps().iter().enumerate() {
        let block = reps.rho_projector(k, h).conj().scale_real(scale);
        for row in 0..rho.dim() {
            blocks.push(FourierBlock { irrep: k, row, block: block.clone() });
        }
    }
    FourierBlockForm { dim: reps.group().order(), blocks }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairDistance {
    pub h1: usize,
    pub h2: usize,
    pub trace_distance: f64,
    /// `||sigma_H1 - sigma_(H1 cap H2)||_tr`.
    pub hat_trace_norm: f64,
    /// `2 (|H1| - |H1 cap H2|) / |H1|`.
    pub hat_expected: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceDistanceReport {
    pub group: String,
    pub subgroups: usize,
    pub pairs: Vec<PairDistance>,
    pub min_trace_distance: f64,
    pub max_hat_defect: f64,
}

/// The HSP setting for one group: irreps, all subgroups, and their coset states.
#[derive(Clone, Debug)]
pub struct HspContext {
    reps: Representations,
    subgroups: Vec<Subgroup>,
    states: Vec<CosetState>,
}

impl HspContext {
    pub fn new(group: FiniteGroup) -> Result<Self> {
        let subgroups = enumerate_subgroups(&group);
        let states = subgroups.iter().map(|h| coset_state(&group, h)).collect::<Result<_>>()?;
        Ok(Self { reps: Representations::new(group)?, subgroups, states })
    }

    pub fn reps(&self) -> &Representations {
        &self.reps
    }

    pub fn group(&self) -> &FiniteGroup {
        self.reps.group()
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn states(&self) -> &[CosetState] {
        &self.states
    }

    pub fn subgroup_index(&self, h: &Subgroup) -> Option<usize> {
        self.subgroups.iter().position(|s| s == h)
    }

    fn sigma(&self, i: usize) -> &ComplexMatrix {
        self.states[i].density.matrix()
    }

    /// Every distinct pair's trace distance, with the intersection bound.
    pub fn trace_distance_check(&self) -> Result<TraceDistanceReport> {
        let g = self.group();
        let mut pairs = Vec::new();
        let (mut min, mut max_defect) = (f64::INFINITY, 0.0f64);
        for i in 0..self.subgroups.len() {
            for j in i + 1..self.subgroups.len() {
                let trace_distance = trace_norm(&(self.sigma(i) - self.sigma(j)))?;
                let h1 = &self.subgroups[i];
                let k = h1.intersection(&self.subgroups[j]);
                let sk = coset_state(g, &k)?;
                let hat_trace_norm = trace_norm(&(self.sigma(i) - sk.density.matrix()))?;
                let hat_expected = 2.0 * (h1.order() - k.order()) as f64 / h1.order() as f64;
                min = min.min(trace_distance);
                max_defect = max_defect.max((hat_trace_norm - hat_expected).abs());
                pairs.push(PairDistance { h1: i, h2: j, trace_distance, hat_trace_norm, hat_expected });
            }
        }
        Ok(TraceDistanceReport {
            group: g.family().to_string(),
            subgroups: self.subgroups.len(),
            pairs,
            min_trace_distance: min,
            max_hat_defect: max_defect,
        })
    }

    /// True when the two subgroups' coset states coincide.
    pub fn identical_states(&self, a: usize, b: usize) -> bool {
        a == b || self.sigma(a).max_abs_diff(self.sigma(b)) <= IDENTICAL_STATE_TOL
    }

    /// One identification run: fresh random Fourier POVM, `t` measured copies
    /// of the hidden coset state, tournament over all subgroups.
    pub fn identify_once(&self, hidden: usize, t: usize, c: f64, rng: &mut impl rand::Rng) -> Result<usize> {
        ensure!(t >= 1, "need t >= 1");
        ensure!(hidden < self.subgroups.len(), "no subgroup {hidden}");
        let povm = random_fourier_povm(&self.reps, c, rng)?;
        let dists: Vec<OutcomeDistribution> =
            self.states.iter().map(|s| measure_povm(&s.density, &povm.povm)).collect::<Result<_>>()?;
        let obs = sample_observations(&dists[hidden], t, rng)?;
        tournament_identify(&obs, &dists)
    }

    /// Successful runs out of `runs` with subgroup `hidden` hidden. A guess
    /// counts when its coset state equals the hidden one.
    pub fn hidden_successes(&self, hidden: usize, t: usize, runs: usize, c: f64, rng: RngStream) -> Result<usize> {
        ensure!(hidden < self.subgroups.len(), "no subgroup {hidden}");
        let guesses: Vec<usize> = map_trials(runs, rng.substream(hidden as u64), |_, g| self.identify_once(hidden, t, c, g))
            .into_iter()
            .collect::<Result<_>>()?;
        Ok(guesses.iter().filter(|&&x| self.identical_states(x, hidden)).count())
    }

    /// `runs` identification runs per subgroup. Run `k` for hidden subgroup
    /// `h` uses `rng.substream(h).substream(k)`.
    pub fn success_experiment(&self, t: usize, runs: usize, c: f64, rng: RngStream) -> Result<HspIdentifyReport> {
        ensure!(runs >= 1, "need at least one run");
        let mut per_subgroup = Vec::with_capacity(self.subgroups.len());
        for (h, sub) in self.subgroups.iter().enumerate() {
            let successes = self.hidden_successes(h, t, runs, c, rng)?;
            per_subgroup.push(SubgroupSuccess {
                index: h,
                label: sub.label(self.group()),
                order: sub.order(),
                successes,
                runs,
                rate: successes as f64 / runs as f64,
            });
        }
        let min_rate = per_subgroup.iter().map(|s| s.rate).fold(f64::INFINITY, f64::min);
        Ok(HspIdentifyReport {
            group: self.group().family().to_string(),
            copies: t,
            runs,
            c,
            master_seed: rng.master_seed,
            per_subgroup,
            min_rate,
        })
    }

    /// `w(H1, H2)` for every pair whose normal cores differ.
    pub fn distinct_core_w(&self) -> Result<Vec<(usize, usize, f64)>> {
        let g = self.group();
        let cores: Vec<Subgroup> = self.subgroups.iter().map(|h| normal_core(g, h)).collect();
        let mut out = Vec::new();
        for i in 0..self.subgroups.len() {
            for j in i + 1..self.subgroups.len() {
                if cores[i] != cores[j] {
                    out.push((i, j, self.reps.w_distance(&self.subgroups[i], &self.subgroups[j])?));
                }
            }
        }
        Ok(out)
    }

    /// For each POVM draw and each distinct pair, `TV / r(H1, H2)`.
    pub fn tv_spectrum(&self, c: f64, draws: usize, rng: RngStream) -> Result<SpectrumReport> {
        ensure!(draws >= 1, "need at least one draw");
        let m = self.subgroups.len();
        let mut r = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                r[i][j] = self.reps.r_distance(&self.subgroups[i], &self.subgroups[j])?;
            }
        }
        let per_draw: Vec<Vec<SpectrumRecord>> = map_trials(draws, rng, |d, g| {
            let povm = random_fourier_povm(&self.reps, c, g)?;
            let dists: Vec<OutcomeDistribution> =
                self.states.iter().map(|s| measure_povm(&s.density, &povm.povm)).collect::<Result<_>>()?;
            let mut recs = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    let tv = total_variation(&dists[i], &dists[j])?;
                    recs.push(SpectrumRecord { draw: d, h1: i, h2: j, tv, r: r[i][j], ratio: tv / r[i][j] });
                }
            }
            Ok(recs)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let records: Vec<SpectrumRecord> = per_draw.into_iter().flatten().collect();
        let min_ratio = records.iter().map(|x| x.ratio).fold(f64::INFINITY, f64::min);
        let hits = records.iter().filter(|x| x.tv >= 0.05 * x.r).count();
        Ok(SpectrumReport {
            group: self.group().family().to_string(),
            draws,
            c,
            master_seed: rng.master_seed,
            fraction_at_least_005: hits as f64 / records.len().max(1) as f64,
            min_ratio,
            records,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupSuccess {
    pub index: usize,
    pub label: String,
    pub order: usize,
    pub successes: usize,
    pub runs: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HspIdentifyReport {
    pub group: String,
    pub copies: usize,
    pub runs: usize,
    pub c: f64,
    pub master_seed: u64,
    pub per_subgroup: Vec<SubgroupSuccess>,
    pub min_rate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRecord {
    pub draw: usize,
    pub h1: usize,
    pub h2: usize,
    pub tv: f64,
    pub r: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub group: String,
    pub draws: usize,
    pub c: f64,
    pub master_seed: u64,
    pub min_ratio: f64,
    pub fraction_at_least_005: f64,
    pub records: Vec<SpectrumRecord>,
}

/// Outcome of the random Fourier POVM: irrep, row, and element of that irrep's POVM.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FourierOutcome {
    pub irrep: usize,
    pub row: usize,
    pub element: usize,
}

#[derive(Clone, Debug)]
pub struct FourierPovm {
    pub povm: Povm,
    pub outcomes: Vec<FourierOutcome>,
    /// Ancilla dimension used for each irrep.
    pub k_per_irrep: Vec<usize>,
}

/// `K_rho = max(1, ceil(C log2(|G|)^2 / d_rho))`.
pub fn ancilla_dim(c: f64, order: usize, d: usize) -> usize {
    let l = (order as f64).log2();
    ((c * l * l / d as f64).ceil() as usize).max(1)
}

/// Random Fourier sampling as one POVM on `C^|G|`.
///
/// For each irrep `rho` an ancilla random POVM `M_rho` on `C^(d_rho)` is drawn
/// with `K = ancilla_dim(C, |G|, d_rho)`, then every row `i` and element `E`
/// of `M_rho` contributes `QFT^dagger (|rho,i><rho,i| (x) E) QFT`.
pub fn random_fourier_povm<R: rand::Rng + ?Sized>(reps: &Representations, c: f64, rng: &mut R) -> Result<FourierPovm> {
    ensure!(c >= 1.0, "need C >= 1, got {c}");
    let n = reps.group().order();
    let q = reps.qft_matrix();
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    let mut outcomes = Vec::new();
    let mut k_per_irrep = Vec::new();
    for (k, rho) in reps.irreps().iter().enumerate() {
        let d = rho.dim();
        let kr = ancilla_dim(c, n, d);
        k_per_irrep.push(kr);
        let inner = build_random_povm_ancilla(d, kr, rng)?;
        for row in 0..d {
            let rows: Vec<usize> = (0..d).map(|j| reps.fourier_index(k, row, j)).collect();
            let r = q.select(&rows, &(0..n).collect::<Vec<_>>());
            let r_dag = r.adjoint();
            for (e_idx, e) in inner.elements().iter().enumerate() {
                elements.push(&(&r_dag * e) * &r);
                labels.push(format!("{}/{}/{}", rho.label(), row, inner.labels()[e_idx]));
                outcomes.push(FourierOutcome { irrep: k, row, element: e_idx });
            }
        }
    }
    Ok(FourierPovm { povm: Povm::new(elements, labels.into())?, outcomes, k_per_irrep })
}

pub fn coset_trace_distance_check(group: &FiniteGroup) -> Result<TraceDistanceReport> {
    HspContext::new(group.clone())?.trace_distance_check()
}

/// Free-standing identification run on a fresh context.
pub fn hsp_identify(group: &FiniteGroup, hidden: &Subgroup, t: usize, c: f64, rng: RngStream) -> Result<Subgroup> {
    let ctx = HspContext::new(group.clone())?;
    let h = ctx.subgroup_index(hidden).ok_or_else(|| crate::Error::Contract("hidden set is not a subgroup".into()))?;
    let guess = ctx.identify_once(h, t, c, &mut rng.generator())?;
    Ok(ctx.subgroups[guess].clone())
}

pub fn hsp_tv_spectrum(group: &FiniteGroup, c: f64, rng: RngStream, draws: usize) -> Result<SpectrumReport> {
    HspContext::new(group.clone())?.tv_spectrum(c, draws, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, FamilyTag};
    use crate::matrix::frobenius_norm;

    fn ctx(s: &str) -> HspContext {
        HspContext::new(make_group(&s.parse::<FamilyTag>().unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn extreme_coset_states() {
        let g = make_group(&FamilyTag::Dihedral(3)).unwrap();
        let full = coset_state(&g, &g.full_subgroup()).unwrap();
        let n = 6.0;
        assert!(full.density().matrix().max_abs_diff(&ComplexMatrix::from_fn(6, 6, |_, _| C64::new(1.0 / n, 0.0))) < 1e-15);
        let triv = coset_state(&g, &g.trivial_subgroup()).unwrap();
        assert!(triv.density().matrix().max_abs_diff(&ComplexMatrix::identity(6).scale_real(1.0 / n)) < 1e-15);
    }

    #[test]
    fn z2_trace_distance_is_one() {
        let c = ctx("cyclic:2");
        assert!((c.trace_distance_check().unwrap().min_trace_distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_form_reassembles() {
        let c = ctx("dihedral:4");
        let q = c.reps().qft_matrix();
        for (h, s) in c.subgroups().iter().zip(c.states()) {
            let direct = &(&q * s.density().matrix()) * &q.adjoint();
            let blocks = fourier_block_form(c.reps(), h).reassemble(c.reps());
            assert!(frobenius_norm(&(&direct - &blocks)) < 1e-9);
        }
    }

    #[test]
    fn fourier_povm_is_complete_and_labelled() {
        let c = ctx("dihedral:4");
        let mut rng = RngStream::new(0, 0).generator();
        let p = random_fourier_povm(c.reps(), 1.0, &mut rng).unwrap();
        assert_eq!(p.povm.len(), p.outcomes.len());
        assert_eq!(p.k_per_irrep, vec![9, 9, 9, 9, 5]);
        assert!(random_fourier_povm(c.reps(), 0.5, &mut rng).is_err());
    }

    #[test]
    fn ancilla_dims() {
        assert_eq!(ancilla_dim(1.0, 8, 1), 9);
        assert_eq!(ancilla_dim(1.0, 8, 2), 5);
        assert_eq!(ancilla_dim(1.0, 1, 1), 1);
    }
}

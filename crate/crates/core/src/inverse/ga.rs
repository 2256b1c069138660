use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bfgs::{local_refine, RefineOptions};
use super::objective::FitProblem;
use crate::dispersion::DeltaBetaProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub sections: usize,
    /// Gaussian mutation σ (1/m); defaults to 5% of the box bound.
    pub mutation_scale_per_m: Option<f64>,
    pub crossover_rate: f64,
    pub elites: usize,
    /// Fraction of each new generation (best first) passed through BFGS.
    pub refine_fraction: f64,
    /// Refine the whole initial population.
    pub refine_initial: bool,
    /// Refine every candidate of every generation.
    pub refine_all: bool,
    pub refine_max_iterations: usize,
    pub seed: u64,
    /// Box constraint |f_j| ≤ bound (1/m); defaults to 5·2π/L.
    pub bound_per_m: Option<f64>,
    /// Stop once the best MSE reaches this value.
    pub mse_target: Option<f64>,
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 100,
            tournament_size: 4,
            sections: 14,
            mutation_scale_per_m: None,
            crossover_rate: 0.9,
            elites: 2,
            refine_fraction: 0.1,
            refine_initial: true,
            refine_all: false,
            refine_max_iterations: 20,
            seed: 0,
            bound_per_m: None,
            mse_target: None,
            parallel: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.tournament_size < 2 || self.population < self.tournament_size {
            return bad(format!(
                "need population ≥ tournament size ≥ 2, got {} and {}",
                self.population, self.tournament_size
            ));
        }
        if self.sections == 0 {
            return bad("sections must be ≥ 1".into());
        }
        if self.generations == 0 {
            return bad("generations must be ≥ 1".into());
        }
        if self.elites == 0 || self.elites >= self.population {
            return bad(format!("elites must be in [1, population), got {}", self.elites));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.refine_fraction) {
            return bad("crossover_rate and refine_fraction must lie in [0, 1]".into());
        }
        for (name, v) in [("mutation_scale_per_m", self.mutation_scale_per_m), ("bound_per_m", self.bound_per_m)] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return bad(format!("{name} must be > 0, got {v}"));
                }
            }
        }
        Ok(())
    }

    pub fn bound_for(&self, length_mm: f64) -> f64 {
        self.bound_per_m.unwrap_or(5.0 * 2.0 * std::f64::consts::PI / (length_mm * 1e-3))
    }

    pub fn mutation_scale_for(&self, length_mm: f64) -> f64 {
        self.mutation_scale_per_m.unwrap_or(0.05 * self.bound_for(length_mm))
    }

    /// Equal unless fields that shape the trajectory differ; the generation
    /// count and target may change between a checkpoint and its resumption.
    fn trajectory_compatible(&self, other: &Self) -> bool {
        let strip = |c: &Self| Self { generations: 0, mse_target: None, parallel: true, ..c.clone() };
        strip(self) == strip(other)
    }
}

/// Generator for candidate `index` of generation `generation`.
pub fn candidate_rng(seed: u64, generation: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | index as u64);
    rng
}

/// Index of the lowest-MSE entry among `k` distinct uniform draws; ties go to
/// the lower index.
pub fn tournament_select<R: Rng + ?Sized>(mse: &[f64], k: usize, rng: &mut R) -> Result<usize> {
    if mse.is_empty() || k == 0 || k > mse.len() {
        return Err(Error::Config(format!("tournament of {k} from a population of {}", mse.len())));
    }
    let mut best: Option<usize> = None;
    for i in sample(rng, mse.len(), k).iter() {
        best = match best {
            Some(b) if mse[b] < mse[i] || (mse[b] == mse[i] && b < i) => Some(b),
            _ => Some(i),
        };
    }
    Ok(best.expect("k ≥ 1"))
}

/// Uniform per-section crossover.
pub fn crossover_offsets<R: Rng + ?Sized>(a: &[f64], b: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::Profile(format!("cannot cross {} with {} sections", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y }).collect())
}

pub fn crossover<R: Rng + ?Sized>(a: &DeltaBetaProfile, b: &DeltaBetaProfile, rng: &mut R) -> Result<DeltaBetaProfile> {
    if a.boundaries_mm() != b.boundaries_mm() {
        return Err(Error::Profile("parents have different section boundaries".into()));
    }
    a.with_offsets(crossover_offsets(a.offsets_per_m(), b.offsets_per_m(), rng)?)
}

/// Adds `N(0, scale²)` to every section and clips to `±bound`.
pub fn mutate_offsets<R: Rng + ?Sized>(x: &mut [f64], scale: f64, bound: f64, rng: &mut R) -> Result<()> {
    let normal = Normal::new(0.0, scale).map_err(|e| Error::Config(format!("mutation scale {scale}: {e}")))?;
    for v in x.iter_mut() {
        *v = (*v + normal.sample(rng)).clamp(-bound, bound);
    }
    Ok(())
}

pub fn mutate<R: Rng + ?Sized>(p: &DeltaBetaProfile, scale: f64, bound: f64, rng: &mut R) -> Result<DeltaBetaProfile> {
    let mut x = p.offsets_per_m().to_vec();
    mutate_offsets(&mut x, scale, bound, rng)?;
    p.with_offsets(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_mse: f64,
    pub median_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub best_profile: DeltaBetaProfile,
    pub best_mse: f64,
    pub trace: Vec<TraceRow>,
    pub evaluations: u64,
    pub seed: u64,
    pub target_reached: bool,
    pub config: GaConfig,
    /// Kept out of the JSON so that equal seeds give identical files.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl FitResult {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("generation,best_mse,median_mse\n");
        for r in &self.trace {
            s.push_str(&format!("{},{:.16e},{:.16e}\n", r.generation, r.best_mse, r.median_mse));
        }
        s
    }
}

/// Complete GA state after a generation; enough to continue bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub generation: usize,
    pub config: GaConfig,
    pub population: Vec<Vec<f64>>,
    pub mse: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub evaluations: u64,
}

impl Checkpoint {
    pub fn file_name(generation: usize) -> String {
        format!("checkpoint_{generation:05}.json")
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::file_name(self.generation));
        let tmp = dir.join(format!(".{}.tmp", Self::file_name(self.generation)));
        fs::write(&tmp, serde_json::to_vec(self)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Highest-numbered checkpoint in `dir`, if any.
    pub fn latest(dir: &Path) -> Result<Option<Self>> {
        if !dir.exists() {
            return Ok(None);
        }
        let mut names: Vec<String> = fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.starts_with("checkpoint_") && n.ends_with(".json"))
            .collect();
        names.sort();
        match names.last() {
            Some(n) => Ok(Some(serde_json::from_slice(&fs::read(dir.join(n))?)?)),
            None => Ok(None),
        }
    }
}

/// Where checkpoints go and whether to pick up from the latest one.
#[derive(Debug, Clone, Default)]
pub struct RunControl {
    pub checkpoint_dir: Option<PathBuf>,
    pub resume: bool,
}

/// Genetic algorithm with BFGS refinement over equal-length sections.
///
/// Every stochastic step of candidate `i` in generation `g` draws from
/// [`candidate_rng`]`(seed, g, i)`, so the result is independent of thread
/// scheduling and a run resumed from a checkpoint matches an uninterrupted one.
pub fn run_fit(problem: &FitProblem, ga: &GaConfig, control: &RunControl) -> Result<FitResult> {
    ga.validate()?;
    let started = Instant::now();
    let length_mm = problem.length_mm();
    let template = DeltaBetaProfile::equal_sections(length_mm, vec![0.0; ga.sections])?;
    let lengths = template.section_lengths_m();
    let bound = ga.bound_for(length_mm);
    let scale = ga.mutation_scale_for(length_mm);
    let lower = vec![-bound; ga.sections];
    let upper = vec![bound; ga.sections];
    let refine_opts = RefineOptions { max_iterations: ga.refine_max_iterations, ..Default::default() };

    let refine = |x: &[f64]| {
        let out = local_refine(x, &lower, &upper, &refine_opts, |c| problem.mse_sections(&lengths, c));
        (out.x, out.value, out.evaluations)
    };
    let refine_many = |xs: &[Vec<f64>]| -> Vec<(Vec<f64>, f64, u64)> {
        if ga.parallel {
            xs.par_iter().map(|x| refine(x)).collect()
        } else {
            xs.iter().map(|x| refine(x)).collect()
        }
    };

    let resumed = match (&control.checkpoint_dir, control.resume) {
        (Some(dir), true) => Checkpoint::latest(dir)?,
        _ => None,
    };
    let mut state = match resumed {
        Some(cp) => {
            if !cp.config.trajectory_compatible(ga) {
                return Err(Error::Config("checkpoint was written with a different GA configuration".into()));
            }
            if cp.population.iter().any(|x| x.len() != ga.sections) {
                return Err(Error::Config("checkpoint section count does not match".into()));
            }
            Checkpoint { config: ga.clone(), ..cp }
        }
        None => {
            let mut population: Vec<Vec<f64>> = (0..ga.population)
                .map(|i| {
                    let mut rng = candidate_rng(ga.seed, 0, i);
                    (0..ga.sections).map(|_| rng.random_range(-bound..=bound)).collect()
                })
                .collect();
            let mut evaluations = 0;
            let mse = if ga.refine_initial || ga.refine_all {
                let refined = refine_many(&population);
                population = refined.iter().map(|r| r.0.clone()).collect();
                evaluations += refined.iter().map(|r| r.2).sum::<u64>();
                refined.iter().map(|r| r.1).collect()
            } else {
                evaluations += population.len() as u64;
                problem.mse_batch(&lengths, &population, ga.parallel)
            };
            let trace = vec![trace_row(0, &mse)];
            let cp = Checkpoint { generation: 0, config: ga.clone(), population, mse, trace, evaluations };
            if let Some(dir) = &control.checkpoint_dir {
                cp.write(dir)?;
            }
            cp
        }
    };

    let reached = |s: &Checkpoint| ga.mse_target.is_some_and(|t| best_index(&s.mse).1 <= t);
    while state.generation + 1 < ga.generations && !reached(&state) {
        let g = state.generation + 1;
        let order = ranking(&state.mse);
        let mut population: Vec<Vec<f64>> = order[..ga.elites].iter().map(|&i| state.population[i].clone()).collect();
        let mut mse: Vec<f64> = order[..ga.elites].iter().map(|&i| state.mse[i]).collect();

        let children: Vec<Vec<f64>> = (ga.elites..ga.population)
            .map(|i| {
                let mut rng = candidate_rng(ga.seed, g, i);
                let a = tournament_select(&state.mse, ga.tournament_size, &mut rng)?;
                let b = tournament_select(&state.mse, ga.tournament_size, &mut rng)?;
                let mut child = if rng.random::<f64>() < ga.crossover_rate {
                    crossover_offsets(&state.population[a], &state.population[b], &mut rng)?
                } else {
                    state.population[a].clone()
                };
                mutate_offsets(&mut child, scale, bound, &mut rng)?;
                Ok(child)
            })
            .collect::<Result<_>>()?;
        let child_mse = problem.mse_batch(&lengths, &children, ga.parallel);
        let mut evaluations = children.len() as u64;
        population.extend(children);
        mse.extend(child_mse);

        let n_refine = if ga.refine_all {
            ga.population - ga.elites
        } else {
            ((ga.refine_fraction * ga.population as f64).ceil() as usize).min(ga.population - ga.elites)
        };
        if n_refine > 0 {
            let child_order: Vec<usize> =
                ranking(&mse[ga.elites..]).into_iter().take(n_refine).map(|i| i + ga.elites).collect();
            let picked: Vec<Vec<f64>> = child_order.iter().map(|&i| population[i].clone()).collect();
            for (&i, (x, f, evals)) in child_order.iter().zip(refine_many(&picked)) {
                population[i] = x;
                mse[i] = f;
                evaluations += evals;
            }
        }

        let mut trace = std::mem::take(&mut state.trace);
        trace.push(trace_row(g, &mse));
        state = Checkpoint {
            generation: g,
            config: ga.clone(),
            population,
            mse,
            trace,
            evaluations: state.evaluations + evaluations,
        };
        if let Some(dir) = &control.checkpoint_dir {
            state.write(dir)?;
        }
    }

    let (best, best_mse) = best_index(&state.mse);
    Ok(FitResult {
        best_profile: template.with_offsets(state.population[best].clone())?,
        best_mse,
        target_reached: reached(&state),
        trace: state.trace,
        evaluations: state.evaluations,
        seed: ga.seed,
        config: ga.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Indices sorted by MSE, ties by index.
fn ranking(mse: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..mse.len()).collect();
    order.sort_by(|&a, &b| mse[a].total_cmp(&mse[b]).then(a.cmp(&b)));
    order
}

fn best_index(mse: &[f64]) -> (usize, f64) {
    let i = ranking(mse)[0];
    (i, mse[i])
}

fn trace_row(generation: usize, mse: &[f64]) -> TraceRow {
    let order = ranking(mse);
    let n = order.len();
    let median = if n % 2 == 1 { mse[order[n / 2]] } else { 0.5 * (mse[order[n / 2 - 1]] + mse[order[n / 2]]) };
    TraceRow { generation, best_mse: mse[order[0]], median_mse: median }
}

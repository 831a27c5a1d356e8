use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{equivalence_check, Outcome, TheoremId};
use crate::canonical::{
    build_conformally_flat, build_constant_curvature, conformal, kaehler_space_form, pi1,
};
use crate::error::{Error, Result};
use crate::generate::{
    random_bochner_flat, random_constant_antiholomorphic, random_curvature_like, random_kaehler,
    random_kaehler_bochner_flat, random_space_form, random_symmetric,
};
use crate::model::ModelPoint;
use crate::sampling::stream_seed;
use crate::tensor::QuadTensor;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    ConstantCurvature,
    ConformallyFlat,
    /// Weyl part of a random tensor plus a multiple of `pi1`: Einstein, not flat.
    Einstein,
    Random,
    SpaceForm,
    KaehlerSpaceForm,
    ConstantAntiholomorphic,
    BochnerFlat,
    KaehlerRandom,
    KaehlerBochnerFlat,
}

impl Family {
    pub fn applicable(model: &ModelPoint) -> Vec<Family> {
        let m = model.dim();
        let mut out = vec![Family::ConstantCurvature];
        if m > 3 {
            out.extend([Family::ConformallyFlat, Family::Einstein]);
        }
        out.push(Family::Random);
        if model.has_complex_structure() {
            out.extend([Family::SpaceForm, Family::KaehlerSpaceForm]);
            if m >= 4 {
                out.push(Family::ConstantAntiholomorphic);
            }
            out.push(Family::KaehlerRandom);
            if m >= 6 {
                out.extend([Family::BochnerFlat, Family::KaehlerBochnerFlat]);
            }
        }
        out
    }

    pub fn generate(self, model: &ModelPoint, rng: &mut ChaCha8Rng) -> Result<QuadTensor> {
        let m = model.dim();
        match self {
            Family::ConstantCurvature => Ok(build_constant_curvature(
                model,
                rng.random_range(-2.0..=2.0),
            )),
            Family::ConformallyFlat => build_conformally_flat(model, &random_symmetric(m, rng)),
            Family::Einstein => {
                let mut t = conformal(model, &random_curvature_like(m, rng))?;
                t.axpy(rng.random_range(-1.0..=1.0), &pi1(model));
                Ok(t)
            }
            Family::Random => Ok(random_curvature_like(m, rng)),
            Family::SpaceForm => random_space_form(model, rng),
            Family::KaehlerSpaceForm => kaehler_space_form(model, rng.random_range(-2.0..=2.0)),
            Family::ConstantAntiholomorphic => {
                let nu = rng.random_range(-1.0..=1.0);
                random_constant_antiholomorphic(model, nu, rng)
            }
            Family::BochnerFlat => random_bochner_flat(model, rng),
            Family::KaehlerRandom => random_kaehler(model, rng),
            Family::KaehlerBochnerFlat => random_kaehler_bochner_flat(model, rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub dim: usize,
    pub index: usize,
    pub complex: bool,
    pub trials: usize,
    pub seed: u64,
    /// Samples per sampled side of each check.
    pub samples: usize,
    pub tolerance: f64,
}

impl FuzzConfig {
    pub fn new(dim: usize, index: usize, complex: bool, trials: usize, seed: u64) -> Self {
        Self {
            dim,
            index,
            complex,
            trials,
            seed,
            samples: 200,
            tolerance: Tolerance::DEFAULT_REL,
        }
    }

    pub fn model(&self) -> Result<ModelPoint> {
        if self.complex {
            ModelPoint::hermitian(self.dim, self.index)
        } else {
            ModelPoint::new(self.dim, self.index)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub both_pass: usize,
    pub both_fail: usize,
    pub one_sided: usize,
    pub not_applicable: usize,
}

impl Tally {
    fn add(&mut self, other: &Tally) {
        self.both_pass += other.both_pass;
        self.both_fail += other.both_fail;
        self.one_sided += other.one_sided;
        self.not_applicable += other.not_applicable;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzFailure {
    pub trial: usize,
    pub family: Family,
    pub theorem: TheoremId,
    /// Seed of the trial: regenerates the tensor and drives the check.
    pub trial_seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    pub checks_run: usize,
    pub totals: Tally,
    pub by_theorem: BTreeMap<TheoremId, Tally>,
    pub by_family: BTreeMap<Family, Tally>,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzSummary {
    /// One-sided outcomes plus checks that errored unexpectedly.
    pub fn inconsistencies(&self) -> usize {
        self.failures.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.failures.is_empty()
    }
}

struct TrialResult {
    family: Family,
    per_theorem: Vec<(TheoremId, Tally)>,
    failures: Vec<FuzzFailure>,
}

/// Regenerate the tensor of a fuzz trial.
pub fn fuzz_trial_tensor(
    model: &ModelPoint,
    seed: u64,
    trial: usize,
) -> Result<(Family, QuadTensor)> {
    let families = Family::applicable(model);
    let family = families[trial % families.len()];
    let trial_seed = stream_seed(seed, trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    Ok((family, family.generate(model, &mut rng)?))
}

fn run_trial(model: &ModelPoint, cfg: &FuzzConfig, trial: usize) -> Result<TrialResult> {
    let tol = Tolerance::new(cfg.tolerance);
    let trial_seed = stream_seed(cfg.seed, trial as u64);
    let (family, tensor) = fuzz_trial_tensor(model, cfg.seed, trial)?;
    let mut per_theorem = Vec::new();
    let mut failures = Vec::new();
    for id in TheoremId::ALL {
        let mut tally = Tally::default();
        if id.check_preconditions(model).is_err() {
            continue;
        }
        match equivalence_check(model, &tensor, id, cfg.samples, trial_seed, tol) {
            Ok(rep) => match rep.outcome {
                Outcome::BothPass => tally.both_pass += 1,
                Outcome::BothFail => tally.both_fail += 1,
                Outcome::OneSided => {
                    tally.one_sided += 1;
                    let sides: Vec<String> = rep
                        .sides
                        .iter()
                        .map(|s| format!("{}={:.3e}", s.name, s.residual))
                        .collect();
                    failures.push(FuzzFailure {
                        trial,
                        family,
                        theorem: id,
                        trial_seed,
                        detail: sides.join("; "),
                    });
                }
            },
            Err(Error::NotKaehler(_)) => tally.not_applicable += 1,
            Err(e) => {
                failures.push(FuzzFailure {
                    trial,
                    family,
                    theorem: id,
                    trial_seed,
                    detail: format!("error: {e}"),
                });
            }
        }
        per_theorem.push((id, tally));
    }
    Ok(TrialResult {
        family,
        per_theorem,
        failures,
    })
}

/// Generate random tensors from every applicable family and run all
/// applicable two-sided checks on each.
pub fn fuzz(cfg: &FuzzConfig) -> Result<FuzzSummary> {
    let model = cfg.model()?;
    if !model.is_indefinite() {
        return Err(Error::UnsupportedSignature(format!(
            "fuzzing needs an indefinite metric, got ({}, {})",
            model.index(),
            model.coindex()
        )));
    }
    let results: Vec<TrialResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(&model, cfg, t))
        .collect::<Result<_>>()?;
    let mut summary = FuzzSummary {
        config: cfg.clone(),
        checks_run: 0,
        totals: Tally::default(),
        by_theorem: BTreeMap::new(),
        by_family: BTreeMap::new(),
        failures: Vec::new(),
    };
    for res in results {
        for (id, tally) in &res.per_theorem {
            summary.checks_run += tally.both_pass + tally.both_fail + tally.one_sided;
            summary.totals.add(tally);
            summary.by_theorem.entry(*id).or_default().add(tally);
            summary.by_family.entry(res.family).or_default().add(tally);
        }
        summary.failures.extend(res.failures);
    }
    Ok(summary)
}

/// Deterministic JSON rendering of a summary.
pub fn summary_json(summary: &FuzzSummary) -> Result<String> {
    Ok(serde_json::to_string_pretty(summary)?)
}

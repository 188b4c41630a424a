//! Offline evaluation with simulated users.
//!
//! A simulated user wants one target hotel. Its cold-start query is the
//! concatenation of the target's reviews, it picks the target's
//! destination, then critiques for at most `T` steps following a policy.
//! A session succeeds once the target shows up in the displayed top-N.
//! Ranks are observed through the displayed list only: a target outside it
//! is ABSENT, imputed as destination size + 1 when averaging.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{BackendKind, Polarity};
use crate::session::{InterfaceMode, Session, SessionError};
use crate::system::System;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("unknown target item `{0}`")]
    UnknownTarget(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("cannot aggregate zero reports")]
    NoReports,
    #[error("invalid study: {0}")]
    InvalidStudy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Policy {
    TargetDriven,
    Random,
}

impl std::str::FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "target_driven" | "target" => Ok(Policy::TargetDriven),
            "random" => Ok(Policy::Random),
            other => Err(format!("unknown policy `{other}` (expected target_driven or random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuedCritique {
    pub keyphrase: String,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationStep {
    pub step: usize,
    /// 1-based rank in the displayed list; `None` when not displayed.
    pub target_rank: Option<usize>,
    /// The critique that produced this step; `None` at step 0.
    pub critique: Option<IssuedCritique>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub target_item: String,
    pub destination: String,
    pub destination_size: usize,
    pub matched_user: Option<String>,
    pub steps: Vec<SimulationStep>,
    pub success: bool,
    pub steps_to_success: Option<usize>,
}

impl SimulationReport {
    /// Rank with ABSENT imputed as destination size + 1.
    pub fn imputed_rank(&self, step: &SimulationStep) -> f64 {
        step.target_rank.unwrap_or(self.destination_size + 1) as f64
    }

    pub fn initial_rank(&self) -> f64 {
        self.imputed_rank(&self.steps[0])
    }

    pub fn final_rank(&self) -> f64 {
        self.imputed_rank(self.steps.last().expect("step 0 always recorded"))
    }
}

/// Next critique under `policy`, or `None` when the policy has nothing left
/// to say.
fn choose_critique(
    system: &System,
    session: &Session,
    target: &str,
    policy: Policy,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, Polarity)> {
    let vocab = system.vocab();
    let state = &session.state;
    let uncritiqued = |k: &usize| state.critique_of(*k).is_none();
    match policy {
        Policy::Random => {
            let open: Vec<usize> = (0..vocab.len()).filter(uncritiqued).collect();
            if open.is_empty() {
                return None;
            }
            let k = open[rng.gen_range(0..open.len())];
            let polarity = match session.backend {
                BackendKind::Shared => Polarity::Negative,
                BackendKind::PerItem => {
                    if rng.gen_bool(0.5) {
                        Polarity::Positive
                    } else {
                        Polarity::Negative
                    }
                }
            };
            Some((k, polarity))
        }
        Policy::TargetDriven => {
            let target_p = &system.space.profile(target)?.salience;
            let top = session.current.entries.first()?;
            let lowest_target_salience = |phrases: &[String]| {
                phrases
                    .iter()
                    .filter_map(|p| vocab.index_of(p))
                    .filter(uncritiqued)
                    .min_by(|&a, &b| target_p[a].total_cmp(&target_p[b]).then(a.cmp(&b)))
                    .map(|k| (k, Polarity::Negative))
            };
            match session.backend {
                BackendKind::Shared => lowest_target_salience(&top.explanation.keyphrases),
                BackendKind::PerItem => {
                    let top_p = &system.space.profile(&top.item_id)?.salience;
                    let best = (0..vocab.len())
                        .filter(uncritiqued)
                        .map(|k| (k, target_p[k] - top_p[k]))
                        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
                    match best {
                        Some((k, gap)) if gap > 0.0 => Some((k, Polarity::Positive)),
                        _ => lowest_target_salience(&top.explanation.keyphrases),
                    }
                }
            }
        }
    }
}

/// Runs one simulated session of at most `max_steps` critiques.
pub fn simulate_session(
    system: &System,
    target: &str,
    policy: Policy,
    backend: BackendKind,
    max_steps: usize,
    seed: u64,
) -> Result<SimulationReport, SimulateError> {
    let item = system
        .catalog()
        .get(target)
        .ok_or_else(|| SimulateError::UnknownTarget(target.to_string()))?;
    let mut query: String = system
        .corpus
        .reviews_of_item(target)
        .map(|r| r.text.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    if query.trim().is_empty() {
        query = item.description.clone();
    }
    let mode = match backend {
        BackendKind::Shared => InterfaceMode::B,
        BackendKind::PerItem => InterfaceMode::C,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut session = Session::start(system, &query, mode, backend)?.choose_destination(system, &item.destination)?;

    let mut steps = vec![SimulationStep {
        step: 0,
        target_rank: session.current.rank_of(target),
        critique: None,
    }];
    let mut steps_to_success = steps[0].target_rank.map(|_| 0);
    while steps_to_success.is_none() && steps.len() <= max_steps {
        let Some((k, polarity)) = choose_critique(system, &session, target, policy, &mut rng) else {
            break;
        };
        let keyphrase = system.vocab().phrase(k).to_string();
        session = session.critique(system, &keyphrase, polarity)?;
        let step = steps.len();
        let rank = session.current.rank_of(target);
        if rank.is_some() {
            steps_to_success = Some(step);
        }
        steps.push(SimulationStep {
            step,
            target_rank: rank,
            critique: Some(IssuedCritique { keyphrase, polarity }),
        });
    }

    Ok(SimulationReport {
        target_item: target.to_string(),
        destination: item.destination.clone(),
        destination_size: system.catalog().items_in(&item.destination).count(),
        matched_user: session.matched_user.clone(),
        success: steps_to_success.is_some(),
        steps_to_success,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub sessions: usize,
    pub success_rate: f64,
    pub mean_initial_rank: f64,
    pub mean_final_rank: f64,
    /// Mean imputed rank per step; sessions that stopped early keep their
    /// last rank for the remaining steps.
    pub mean_rank_by_step: Vec<f64>,
    pub absent_rank_rule: String,
}

pub fn aggregate(reports: &[SimulationReport]) -> Result<Metrics, SimulateError> {
    if reports.is_empty() {
        return Err(SimulateError::NoReports);
    }
    let n = reports.len() as f64;
    let horizon = reports.iter().map(|r| r.steps.len()).max().unwrap_or(1);
    let mean_rank_by_step = (0..horizon)
        .map(|t| {
            reports
                .iter()
                .map(|r| r.imputed_rank(&r.steps[t.min(r.steps.len() - 1)]))
                .sum::<f64>()
                / n
        })
        .collect();
    Ok(Metrics {
        sessions: reports.len(),
        success_rate: reports.iter().filter(|r| r.success).count() as f64 / n,
        mean_initial_rank: reports.iter().map(SimulationReport::initial_rank).sum::<f64>() / n,
        mean_final_rank: reports.iter().map(SimulationReport::final_rank).sum::<f64>() / n,
        mean_rank_by_step,
        absent_rank_rule: "target outside the displayed list counts as destination size + 1".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub seed: u64,
    pub sessions: usize,
    pub max_steps: usize,
    pub policy: Policy,
    pub backend: BackendKind,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sessions: 200,
            max_steps: 10,
            policy: Policy::TargetDriven,
            backend: BackendKind::PerItem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub metrics: Metrics,
    pub sessions: Vec<SimulationReport>,
}

/// Targets drawn uniformly with replacement from the catalog. The draw
/// depends only on the seed, so two policies under the same seed face the
/// same targets.
pub fn study_targets(system: &System, seed: u64, sessions: usize) -> Vec<String> {
    let ids: Vec<&str> = system.catalog().items().map(|i| i.item_id.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sessions)
        .map(|_| ids[rng.gen_range(0..ids.len())].to_string())
        .collect()
}

pub fn run_study(system: &System, config: StudyConfig) -> Result<StudyReport, SimulateError> {
    if config.sessions == 0 {
        return Err(SimulateError::InvalidStudy("sessions must be positive".into()));
    }
    if system.catalog().is_empty() {
        return Err(SimulateError::InvalidStudy("catalog is empty".into()));
    }
    let reports = study_targets(system, config.seed, config.sessions)
        .iter()
        .enumerate()
        .map(|(i, target)| {
            let session_seed = config.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            simulate_session(
                system,
                target,
                config.policy,
                config.backend,
                config.max_steps,
                session_seed,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StudyReport {
        config,
        metrics: aggregate(&reports)?,
        sessions: reports,
    })
}

//! Simulated-user study on the default synthetic corpus: target-driven
//! critiquing versus random critiquing.
//!
//! ```bash
//! cargo run -p critique-core --release --example simulated_study -- [seed] [sessions] [steps]
//! ```

use critique_core::engine::BackendKind;
use critique_core::simulate::{run_study, Policy, StudyConfig};
use critique_core::synthetic::{generate_synthetic, SyntheticConfig};
use critique_core::{Config, System};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let seed = args.first().copied().unwrap_or(0);
    let sessions = args.get(1).copied().unwrap_or(200) as usize;
    let max_steps = args.get(2).copied().unwrap_or(10) as usize;

    let (corpus, catalog) = generate_synthetic(&SyntheticConfig {
        seed,
        ..SyntheticConfig::default()
    })?;
    let system = System::build(corpus, catalog, Config::default(), Default::default())?;
    println!(
        "corpus: {} reviews, {} hotels in {} destinations, {} keyphrases",
        system.corpus.len(),
        system.catalog().len(),
        system.catalog().destinations().len(),
        system.vocab().len()
    );

    for backend in [BackendKind::PerItem, BackendKind::Shared] {
        for policy in [Policy::TargetDriven, Policy::Random] {
            let report = run_study(
                &system,
                StudyConfig {
                    seed,
                    sessions,
                    max_steps,
                    policy,
                    backend,
                },
            )?;
            let m = &report.metrics;
            println!(
                "{backend:>8} {policy:?}: success {:.3}  rank {:.2} -> {:.2}",
                m.success_rate, m.mean_initial_rank, m.mean_final_rank
            );
            let by_step: Vec<String> = m.mean_rank_by_step.iter().map(|r| format!("{r:.1}")).collect();
            println!("         by step: {}", by_step.join(" "));
        }
    }
    Ok(())
}

//! Interface A style keyword filtering: hotels of a destination that
//! mention every selected keyphrase.
//!
//! ```bash
//! cargo run -p critique-core --example static_filter -- Lisbon "breakfast" "pool"
//! ```

use critique_core::engine::filter_static;
use critique_core::{Config, System, FIXTURE_DIR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let system = System::from_dir(FIXTURE_DIR, Config::default())?;
    let mut args = std::env::args().skip(1);
    let dest = args
        .next()
        .unwrap_or_else(|| system.catalog().destinations()[0].clone());
    let mut selected: Vec<String> = args.collect();
    if selected.is_empty() {
        selected = system.vocab().phrases()[..2].to_vec();
    }

    let mut narrowing = Vec::new();
    for phrase in &selected {
        narrowing.push(phrase.clone());
        let hits = filter_static(&system.space, &dest, &narrowing)?;
        println!("{:<40} {} hotels", narrowing.join(" + "), hits.len());
    }
    for id in filter_static(&system.space, &dest, &selected)? {
        println!("  {}", system.catalog().get(&id).unwrap().name);
    }
    Ok(())
}

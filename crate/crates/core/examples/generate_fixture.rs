//! Writes a small synthetic corpus as `reviews.jsonl` + `items.jsonl`.
//! With no arguments it regenerates the bundled fixture.
//!
//! ```bash
//! cargo run -p critique-core --example generate_fixture -- [out_dir] [seed]
//! ```

use critique_core::corpus::write_dataset;
use critique_core::synthetic::{generate_synthetic, SyntheticConfig};
use critique_core::{Config, System, FIXTURE_DIR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| FIXTURE_DIR.to_string());
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let config = SyntheticConfig {
        seed,
        n_users: 200,
        reviews_per_user: 12,
        style_words_per_user: 0,
        ..SyntheticConfig::default()
    };
    let (corpus, catalog) = generate_synthetic(&config)?;
    write_dataset(&out, &corpus, &catalog)?;

    let system = System::from_dir(&out, Config::default())?;
    println!("wrote {out}");
    println!(
        "{} reviews by {} users, {} hotels, {} keyphrases",
        system.corpus.len(),
        system.corpus.users().count(),
        system.catalog().len(),
        system.vocab().len()
    );
    for d in system.catalog().destinations() {
        println!("  {d}: {} hotels", system.catalog().items_in(d).count());
    }
    Ok(())
}

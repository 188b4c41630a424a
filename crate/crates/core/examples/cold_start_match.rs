//! Matches a free-text wish to the closest existing reviewer and shows the
//! preferences the session would start from.
//!
//! ```bash
//! cargo run -p critique-core --example cold_start_match -- "quiet room with a rooftop pool"
//! ```

use critique_core::matching::MatchError;
use critique_core::{Config, System, FIXTURE_DIR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let query = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let query = if query.trim().is_empty() {
        "a friendly hotel with a good breakfast and a pool".to_string()
    } else {
        query
    };
    let system = System::from_dir(FIXTURE_DIR, Config::default())?;

    let m = match system.match_user(&query) {
        Ok(m) => m,
        Err(MatchError::NoSignal) => {
            println!("no usable words in {query:?}; try describing the hotel differently");
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    println!("query: {query:?}");
    println!("matched {} (cosine {:.3})", m.user_id, m.similarity);

    let state = system.init_user_state(&m.user_id)?;
    let mut prefs: Vec<(&str, f64)> = system
        .vocab()
        .phrases()
        .iter()
        .map(String::as_str)
        .zip(state.base().iter().copied())
        .filter(|(_, w)| *w > 0.0)
        .collect();
    prefs.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("strongest starting preferences:");
    for (phrase, w) in prefs.iter().take(8) {
        println!("  {phrase:<20} {w:.3}");
    }
    Ok(())
}

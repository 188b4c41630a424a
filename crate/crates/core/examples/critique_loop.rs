//! A scripted critiquing session on the fixture: pick a destination, then
//! reject the top item's first reason a few times and watch the list move.
//!
//! ```bash
//! cargo run -p critique-core --example critique_loop -- [C|B] [rounds]
//! ```

use critique_core::{Config, InterfaceMode, Polarity, Session, System, FIXTURE_DIR};

fn show(system: &System, s: &Session) {
    if let Some(shared) = &s.current.shared {
        println!("  because you like: {}", shared.keyphrases.join(", "));
    }
    for (i, e) in s.current.entries.iter().enumerate() {
        let name = &system.catalog().get(&e.item_id).unwrap().name;
        println!(
            "  {:>2}. {name:<28} {:+.3}  [{}]",
            i + 1,
            e.score,
            e.explanation.keyphrases.join(", ")
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mode: InterfaceMode = args.next().as_deref().unwrap_or("C").parse()?;
    let rounds: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);

    let system = System::from_dir(FIXTURE_DIR, Config::default())?;
    let query = system.corpus.reviews()[0].text.clone();
    let dest = system.catalog().destinations()[0].clone();
    let mut s = Session::start(&system, &query, mode, mode.default_backend())?.choose_destination(&system, &dest)?;
    println!(
        "{dest}, interface {mode}, matched {}",
        s.matched_user.as_deref().unwrap_or("-")
    );
    show(&system, &s);

    for round in 1..=rounds {
        let Some(kp) = s.current.entries[0].explanation.keyphrases.first().cloned() else {
            break;
        };
        s = s.critique(&system, &kp, Polarity::Negative)?;
        println!("\nround {round}: not interested in \"{kp}\"");
        show(&system, &s);
    }

    if let Some(first) = s.history.first().map(|h| h.keyphrase.clone()) {
        s = s.retract(&system, &first)?;
        println!("\nchanged my mind about \"{first}\"");
        show(&system, &s);
    }
    let s = s.finish()?;
    println!("\n{} steps, status {}", s.history.len(), s.status);
    Ok(())
}

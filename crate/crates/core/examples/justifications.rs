//! Interface D: templated justifications for a top-10 list, with the
//! sentence diversity of the list, then highlighted descriptions as in
//! interfaces B and C.
//!
//! ```bash
//! cargo run -p critique-core --example justifications
//! ```

use critique_core::justify::{diversity_score, highlight, justify_list};
use critique_core::{Config, InterfaceMode, Session, System, FIXTURE_DIR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let system = System::from_dir(FIXTURE_DIR, Config::default())?;
    let query = system.corpus.reviews()[42].text.clone();
    let dest = system.catalog().destinations()[1].clone();
    let s = Session::start(&system, &query, InterfaceMode::D, InterfaceMode::D.default_backend())?
        .choose_destination(&system, &dest)?;

    let js = justify_list(&system.templates, &system.space, &s.current)?;
    for (i, j) in js.iter().enumerate() {
        println!("{:>2}. [t{}] {}", i + 1, j.template_id, j.text);
    }
    println!("diversity {:.3}\n", diversity_score(&js)?);

    for e in s.current.entries.iter().take(3) {
        let item = system.catalog().get(&e.item_id).unwrap();
        let chars: Vec<char> = item.description.chars().collect();
        let mut out = String::new();
        let mut at = 0;
        for span in highlight(&item.description, &e.explanation.keyphrases) {
            out.extend(&chars[at..span.start]);
            out.push('[');
            out.extend(&chars[span.start..span.end]);
            out.push(']');
            at = span.end;
        }
        out.extend(&chars[at..]);
        println!("{}: {out}", item.name);
    }
    Ok(())
}

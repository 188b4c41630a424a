//! Mines the keyphrase vocabulary of a corpus directory and prints it with
//! document frequencies.
//!
//! ```bash
//! cargo run -p critique-core --example mine_vocabulary -- [data_dir] [size]
//! ```

use critique_core::corpus::{load_items, load_reviews, mine_vocabulary, MiningParams};
use critique_core::{Tokenizer, FIXTURE_DIR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| FIXTURE_DIR.to_string());
    let size = args.next().map(|s| s.parse()).transpose()?.unwrap_or(90);

    let corpus = load_reviews(format!("{dir}/reviews.jsonl"))?;
    let catalog = load_items(format!("{dir}/items.jsonl"))?;
    let tokenizer = Tokenizer::default();
    let params = MiningParams {
        size,
        ..MiningParams::default()
    };
    let vocab = mine_vocabulary(&corpus, &catalog, &params, &tokenizer)?;

    // hotels whose reviews mention each phrase
    let mut df = vec![0usize; vocab.len()];
    for item in catalog.items() {
        let mut counts = vec![0u32; vocab.len()];
        for r in corpus.reviews_of_item(&item.item_id) {
            vocab.count_into(&tokenizer, &r.text, &mut counts);
        }
        for (k, c) in counts.iter().enumerate() {
            df[k] += usize::from(*c > 0);
        }
    }
    println!(
        "{} keyphrases from {} reviews over {} hotels",
        vocab.len(),
        corpus.len(),
        catalog.len()
    );
    for (k, phrase) in vocab.phrases().iter().enumerate() {
        println!(
            "{:>3}  {phrase:<24} df {:.3}",
            k + 1,
            df[k] as f64 / catalog.len() as f64
        );
    }
    Ok(())
}

//! Seeded generator for desk-scale hotel review corpora with planted
//! structure: every hotel has a sparse feature mixture, every user a sparse
//! preference mixture, and each review mentions the hotel's features in
//! proportion to hotel weight times user affinity.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{Catalog, Item, Review, ReviewCorpus};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SyntheticError {
    #[error("degenerate synthetic parameters: {0}")]
    Degenerate(String),
}

const FEATURES: &[&str] = &[
    "pool",
    "spa",
    "sauna",
    "gym",
    "rooftop",
    "terrace",
    "garden",
    "beach",
    "balcony",
    "jacuzzi",
    "parking",
    "shuttle",
    "elevator",
    "concierge",
    "reception",
    "wifi",
    "minibar",
    "kettle",
    "espresso",
    "bathtub",
    "shower",
    "bathrobe",
    "pillows",
    "mattress",
    "soundproofing",
    "airconditioning",
    "heating",
    "fireplace",
    "kitchenette",
    "laundry",
    "croissants",
    "pastries",
    "omelette",
    "pancakes",
    "smoothies",
    "cocktails",
    "wine",
    "brewery",
    "bistro",
    "steakhouse",
    "sushi",
    "tapas",
    "pizzeria",
    "vegan",
    "glutenfree",
    "playground",
    "babysitting",
    "kidsclub",
    "petfriendly",
    "dogs",
    "museum",
    "cathedral",
    "harbour",
    "riverside",
    "oldtown",
    "nightlife",
    "shopping",
    "metro",
    "tram",
    "airport",
    "skyline",
    "sunset",
    "mountains",
    "vineyard",
    "lake",
    "forest",
    "hiking",
    "bicycles",
    "skiing",
    "golf",
    "tennis",
    "yoga",
    "massage",
    "hammam",
    "casino",
    "library",
    "piano",
    "karaoke",
    "cinema",
    "ballroom",
    "boutique",
    "vintage",
    "minimalist",
    "artdeco",
    "baroque",
    "rustic",
    "cozy",
    "spacious",
    "quiet",
    "modern",
    "chandelier",
    "courtyard",
    "fountain",
    "orchard",
    "rooftop bar",
    "free breakfast",
    "late checkout",
    "room service",
    "sea view",
    "city view",
    "hot tub",
    "valet parking",
    "bike rental",
    "wine cellar",
    "cooking class",
    "jazz club",
];

const DESTINATIONS: &[&str] = &[
    "Lisbon", "Prague", "Vienna", "Seville", "Ghent", "Porto", "Krakow", "Bergen",
];
const NAME_PREFIX: &[&str] = &[
    "Grand",
    "Royal",
    "Blue",
    "Golden",
    "Silver",
    "Garden",
    "Harbor",
    "Old Town",
    "Park",
    "Riverside",
    "Villa",
    "Casa",
];
const NAME_SUFFIX: &[&str] = &[
    "Inn",
    "Suites",
    "Palace",
    "Residence",
    "Lodge",
    "House",
    "Hotel",
    "Rooms",
];
// Frames use stopwords only, so the feature's neighbours in the filtered
// token stream are the varied closers rather than a few fixed verbs.
const FRAMES: &[&str] = &[
    "The {p} was",
    "Our {p} was",
    "There is a {p} and it was",
    "They have a {p}, it was",
    "As for the {p}, it was",
    "We had the {p} and it was",
];
const CLOSERS: &[&str] = &[
    "lovely",
    "excellent",
    "wonderful",
    "fantastic",
    "memorable",
    "perfect",
    "brilliant",
    "great",
    "nice",
    "fine",
    "okay",
    "good",
    "better",
    "best",
    "cool",
    "neat",
    "tidy",
    "fresh",
    "clean",
    "warm",
    "bright",
    "handy",
    "super",
    "grand",
    "classy",
    "elegant",
    "stylish",
    "sleek",
    "roomy",
    "airy",
    "sunny",
    "calm",
    "friendly",
    "useful",
    "practical",
    "modest",
    "plain",
    "basic",
    "simple",
    "fun",
    "pretty",
    "sweet",
    "smart",
    "proper",
    "enough",
    "fair",
    "ideal",
    "adequate",
    "agreeable",
    "appealing",
    "attractive",
    "beautiful",
    "charmingly",
    "cheerful",
    "comfy",
    "compact",
    "convenient",
    "cosy",
    "crisp",
    "cute",
    "dainty",
    "dependable",
    "easy",
    "efficient",
    "exquisite",
    "fancy",
    "flawless",
    "generous",
    "glorious",
    "handsome",
    "homely",
    "immaculate",
    "inviting",
    "joyful",
    "lavish",
    "luxurious",
    "marvelous",
    "massive",
    "mellow",
    "nifty",
    "nicely",
    "polished",
    "posh",
    "pristine",
    "quaint",
    "quirky",
    "reliable",
    "restful",
    "roomier",
    "serene",
    "snug",
    "soothing",
    "sturdy",
    "swanky",
    "thoughtful",
    "tranquil",
    "trendy",
    "unique",
    "upscale",
    "vibrant",
    "welcoming",
    "wholesome",
];
const STYLE: &[&str] = &[
    "honestly",
    "basically",
    "definitely",
    "absolutely",
    "seriously",
    "genuinely",
    "frankly",
    "literally",
    "splendid",
    "marvellous",
    "dreadful",
    "gorgeous",
    "stunning",
    "awesome",
    "amazing",
    "terrific",
    "solid",
    "decent",
    "fabulous",
    "charming",
    "delightful",
    "impeccable",
    "spotless",
    "outstanding",
    "recommend",
    "unforgettable",
    "heavenly",
    "magical",
    "relaxing",
    "peaceful",
    "lively",
    "buzzing",
    "pricey",
    "bargain",
    "overpriced",
    "affordable",
    "worthwhile",
    "disappointing",
    "average",
    "mediocre",
    "superb",
    "incredible",
    "phenomenal",
    "remarkable",
    "pleasant",
    "enjoyable",
    "satisfying",
    "refreshing",
];
const FILLER: &[&str] = &[
    "Staff were friendly and helpful.",
    "Check in took a few minutes.",
    "Location was convenient for us.",
    "Would stay again next time.",
    "Room was clean and comfortable.",
    "Value for money was good.",
];

/// Parameters of the synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub n_destinations: usize,
    /// Inclusive range of hotels per destination.
    pub hotels_per_destination: (usize, usize),
    pub n_users: usize,
    pub reviews_per_user: usize,
    /// Number of planted keyphrases.
    pub vocab_size: usize,
    /// Features planted per hotel.
    pub features_per_hotel: usize,
    /// Features each user cares about.
    pub preferences_per_user: usize,
    /// Probability that a sentence talks about one of the reviewer's own
    /// preferences instead of a feature of the hotel.
    pub preference_mentions: f64,
    /// Habitual words each reviewer ends every review with.
    pub style_words_per_user: usize,
    /// Exponent of the Zipf-like popularity of planted features.
    pub popularity_exponent: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_destinations: 4,
            hotels_per_destination: (25, 45),
            n_users: 300,
            reviews_per_user: 80,
            vocab_size: 90,
            features_per_hotel: 5,
            preferences_per_user: 6,
            preference_mentions: 0.0,
            style_words_per_user: 4,
            popularity_exponent: 0.7,
        }
    }
}

/// The planted keyphrases for a given size.
pub fn planted_features(vocab_size: usize) -> Vec<String> {
    let mut out: Vec<String> = FEATURES.iter().take(vocab_size).map(|s| s.to_string()).collect();
    // Past the bundled list, pronounceable filler words keep tokens valid.
    let syllables = ["ka", "lo", "mi", "ra", "ten", "vos", "zu", "pel"];
    let mut i = 0usize;
    while out.len() < vocab_size {
        let word = format!(
            "{}{}{}x",
            syllables[i % 8],
            syllables[(i / 8) % 8],
            syllables[(i / 64) % 8]
        );
        out.push(word);
        i += 1;
    }
    out
}

struct Mixture {
    features: Vec<usize>,
    weights: Vec<f64>,
}

impl Mixture {
    fn weight_of(&self, k: usize) -> f64 {
        self.features
            .iter()
            .position(|&f| f == k)
            .map_or(0.0, |i| self.weights[i])
    }
}

/// Zipf-like popularity so some features are common and others rare.
fn draw_mixture(rng: &mut ChaCha8Rng, popularity: &[f64], size: usize) -> Mixture {
    let size = size.min(popularity.len());
    let mut features = Vec::with_capacity(size);
    let total: f64 = popularity.iter().sum();
    while features.len() < size {
        let mut x = rng.gen::<f64>() * total;
        let mut pick = popularity.len() - 1;
        for (k, &p) in popularity.iter().enumerate() {
            if x < p {
                pick = k;
                break;
            }
            x -= p;
        }
        if !features.contains(&pick) {
            features.push(pick);
        }
    }
    let weights = features.iter().map(|_| rng.gen_range(0.2..1.0)).collect();
    Mixture { features, weights }
}

fn sample_weighted(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<(ReviewCorpus, Catalog), SyntheticError> {
    let (lo, hi) = config.hotels_per_destination;
    if config.n_destinations == 0 || hi == 0 || lo > hi {
        return Err(SyntheticError::Degenerate(
            "need at least one destination with hotels".into(),
        ));
    }
    if config.n_users == 0 || config.reviews_per_user == 0 {
        return Err(SyntheticError::Degenerate("need at least one user with reviews".into()));
    }
    if !(0.0..=1.0).contains(&config.preference_mentions) {
        return Err(SyntheticError::Degenerate(
            "preference_mentions must be a probability".into(),
        ));
    }
    if config.vocab_size == 0 || config.features_per_hotel == 0 || config.preferences_per_user == 0 {
        return Err(SyntheticError::Degenerate("need a non-empty feature vocabulary".into()));
    }
    if !(config.popularity_exponent.is_finite() && config.popularity_exponent >= 0.0) {
        return Err(SyntheticError::Degenerate(
            "popularity_exponent must be finite and non-negative".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let features = planted_features(config.vocab_size);
    let popularity: Vec<f64> = (0..features.len())
        .map(|k| 1.0 / (1.0 + k as f64).powf(config.popularity_exponent))
        .collect();
    // decouple popularity from list position
    let mut popularity_order: Vec<usize> = (0..features.len()).collect();
    popularity_order.shuffle(&mut rng);
    let popularity: Vec<f64> = popularity_order.iter().map(|&i| popularity[i]).collect();

    let mut items = Vec::new();
    let mut hotel_mix = Vec::new();
    let mut used_names = std::collections::HashSet::new();
    for d in 0..config.n_destinations {
        let destination = DESTINATIONS
            .get(d)
            .map_or_else(|| format!("Destination {}", d + 1), |s| s.to_string());
        let n_hotels = rng.gen_range(lo..=hi);
        for h in 0..n_hotels {
            let mix = draw_mixture(&mut rng, &popularity, config.features_per_hotel);
            let mut name = format!(
                "{} {}",
                NAME_PREFIX[rng.gen_range(0..NAME_PREFIX.len())],
                NAME_SUFFIX[rng.gen_range(0..NAME_SUFFIX.len())]
            );
            if !used_names.insert(format!("{destination}/{name}")) {
                name = format!("{name} {}", h + 1);
            }
            let mut top: Vec<(f64, usize)> = mix.weights.iter().copied().zip(mix.features.iter().copied()).collect();
            top.sort_by(|a, b| b.0.total_cmp(&a.0));
            let highlights: Vec<&str> = top.iter().take(3).map(|&(_, k)| features[k].as_str()).collect();
            let description = format!(
                "{name} is a hotel in {destination}. Guests can enjoy the {}, the {} and the {}.",
                highlights[0],
                highlights.get(1).unwrap_or(&highlights[0]),
                highlights.get(2).unwrap_or(&highlights[0]),
            );
            items.push(Item {
                item_id: format!("d{}h{:02}", d + 1, h + 1),
                name,
                destination: destination.clone(),
                description,
            });
            hotel_mix.push(mix);
        }
    }

    let mut reviews = Vec::new();
    for u in 0..config.n_users {
        let user_id = format!("u{:04}", u + 1);
        let prefs = draw_mixture(&mut rng, &popularity, config.preferences_per_user);
        let style: Vec<&str> = STYLE
            .choose_multiple(&mut rng, config.style_words_per_user.min(STYLE.len()))
            .copied()
            .collect();
        for r in 0..config.reviews_per_user {
            let h = rng.gen_range(0..items.len());
            let mix = &hotel_mix[h];
            let affinity: Vec<f64> = mix
                .features
                .iter()
                .zip(&mix.weights)
                .map(|(&k, &w)| w * (0.1 + prefs.weight_of(k)))
                .collect();
            let overlap: f64 = affinity.iter().sum::<f64>() / mix.weights.iter().sum::<f64>();
            let rating = (1.0 + 4.0 * overlap.min(1.0)).round().clamp(1.0, 5.0) as u8;
            let mut sentences = Vec::new();
            for _ in 0..rng.gen_range(3..=6) {
                let k = if rng.gen_bool(config.preference_mentions) {
                    prefs.features[sample_weighted(&mut rng, &prefs.weights)]
                } else {
                    mix.features[sample_weighted(&mut rng, &affinity)]
                };
                let frame = FRAMES[rng.gen_range(0..FRAMES.len())];
                let closer = CLOSERS[rng.gen_range(0..CLOSERS.len())];
                let sentence = format!("{} {closer}.", frame.replace("{p}", &features[k]));
                sentences.push(sentence);
            }
            sentences.shuffle(&mut rng);
            // The closing remark carries the reviewer's habitual words, last in
            // the text so they never sit next to a feature.
            let mut closing = FILLER[rng.gen_range(0..FILLER.len())].trim_end_matches('.').to_string();
            let mut habits = style.clone();
            habits.shuffle(&mut rng);
            for word in habits {
                closing.push(' ');
                closing.push_str(word);
            }
            closing.push('.');
            sentences.push(closing);
            reviews.push(Review {
                review_id: format!("{user_id}-r{}", r + 1),
                user_id: user_id.clone(),
                item_id: items[h].item_id.clone(),
                rating,
                text: sentences.join(" "),
            });
        }
    }

    let corpus = ReviewCorpus::new(reviews).map_err(|e| SyntheticError::Degenerate(e.to_string()))?;
    let catalog = Catalog::new(items).map_err(|e| SyntheticError::Degenerate(e.to_string()))?;
    Ok((corpus, catalog))
}

mod common;

use std::sync::Arc;
use std::thread;

use common::*;
use critique_core::engine::EngineError;
use critique_core::matching::MatchError;
use critique_core::session::{search_keyphrases, HistoryAction};
use critique_core::{
    BackendKind, Config, InterfaceMode, Polarity, Session, SessionError, SessionStatus, SessionStore, System,
    FIXTURE_DIR,
};

fn fixture() -> System {
    System::from_dir(FIXTURE_DIR, Config::default()).unwrap()
}

fn some_query(system: &System) -> String {
    system.corpus.reviews()[0].text.clone()
}

#[test]
fn fixture_shape() {
    let system = fixture();
    assert_eq!(system.catalog().destinations().len(), 4);
    for d in system.catalog().destinations() {
        let n = system.catalog().items_in(d).count();
        assert!((25..=45).contains(&n), "{d}: {n}");
    }
    assert_eq!(system.vocab().len(), 90);
    assert!(search_keyphrases(system.vocab(), "zzz").is_empty());
    assert_eq!(search_keyphrases(system.vocab(), "").len(), 90);
}

#[test]
fn lifecycle_follows_the_state_machine() {
    let system = fixture();
    let q = some_query(&system);
    let s = Session::start(&system, &q, InterfaceMode::C, BackendKind::PerItem).unwrap();
    assert_eq!(s.status, SessionStatus::AwaitingDestination);
    assert!(s.current.is_empty());
    let kp = system.vocab().phrase(0).to_string();
    assert!(matches!(
        s.critique(&system, &kp, Polarity::Negative),
        Err(SessionError::WrongStatus { .. })
    ));
    assert!(matches!(s.finish(), Err(SessionError::WrongStatus { .. })));

    let dest = system.catalog().destinations()[0].clone();
    let s = s.choose_destination(&system, &dest).unwrap();
    assert_eq!(s.status, SessionStatus::Active);
    let size = system.catalog().items_in(&dest).count();
    assert_eq!(s.current.len(), size.min(10));
    assert!(matches!(
        s.choose_destination(&system, &dest),
        Err(SessionError::WrongStatus { .. })
    ));

    let s = s.critique(&system, &kp, Polarity::Positive).unwrap();
    let s = s.critique(&system, &kp, Polarity::Negative).unwrap();
    let s = s.retract(&system, &kp).unwrap();
    let actions: Vec<HistoryAction> = s.history.iter().map(|h| h.action).collect();
    assert_eq!(
        actions,
        [HistoryAction::Positive, HistoryAction::Negative, HistoryAction::Retract]
    );
    assert_eq!(s.history.iter().map(|h| h.step).collect::<Vec<_>>(), [1, 2, 3]);
    assert!(s.state.critiques().is_empty());

    let done = s.finish().unwrap();
    assert_eq!(done.status, SessionStatus::Finished);
    assert!(matches!(
        done.critique(&system, &kp, Polarity::Negative),
        Err(SessionError::WrongStatus { .. })
    ));
    assert!(done.finish().is_err());
}

#[test]
fn start_errors() {
    let system = fixture();
    assert!(matches!(
        Session::start(&system, "   ", InterfaceMode::C, BackendKind::PerItem),
        Err(SessionError::EmptyQuery)
    ));
    assert!(matches!(
        Session::start(&system, "zzqx qqzv !!", InterfaceMode::C, BackendKind::PerItem),
        Err(SessionError::Match(MatchError::NoSignal))
    ));
    assert!(matches!(
        Session::start(&system, &some_query(&system), InterfaceMode::B, BackendKind::PerItem),
        Err(SessionError::IncompatibleBackend { .. })
    ));
    let s = Session::start(&system, &some_query(&system), InterfaceMode::C, BackendKind::PerItem).unwrap();
    assert!(matches!(
        s.choose_destination(&system, "Atlantis"),
        Err(SessionError::Engine(EngineError::UnknownDestination(_)))
    ));
}

#[test]
fn critique_errors() {
    let system = fixture();
    let dest = system.catalog().destinations()[1].clone();
    let q = some_query(&system);
    let b = Session::start(&system, &q, InterfaceMode::B, BackendKind::Shared)
        .unwrap()
        .choose_destination(&system, &dest)
        .unwrap();
    let kp = system.vocab().phrase(3).to_string();
    assert!(matches!(
        b.critique(&system, &kp, Polarity::Positive),
        Err(SessionError::Engine(EngineError::PositiveNotSupported(
            BackendKind::Shared
        )))
    ));
    assert!(matches!(
        b.critique(&system, "not a keyphrase", Polarity::Negative),
        Err(SessionError::Engine(EngineError::UnknownKeyphrase(_)))
    ));
    assert!(matches!(
        b.retract(&system, &kp),
        Err(SessionError::Engine(EngineError::NotCritiqued(_)))
    ));
    let a = Session::start(&system, &q, InterfaceMode::A, BackendKind::PerItem)
        .unwrap()
        .choose_destination(&system, &dest)
        .unwrap();
    assert!(a.matched_user.is_none());
    assert!(matches!(
        a.critique(&system, &kp, Polarity::Negative),
        Err(SessionError::CritiqueUnavailable(InterfaceMode::A))
    ));
}

#[test]
fn cold_start_uses_the_brute_force_winner() {
    let system = fixture();
    for r in system.corpus.reviews().iter().step_by(97).take(12) {
        let s = Session::start(&system, &r.text, InterfaceMode::D, BackendKind::PerItem).unwrap();
        let (user, sim) = brute_force_match(&system.corpus, &r.text).unwrap();
        assert_eq!(s.matched_user.as_deref(), Some(user.as_str()));
        assert!((s.similarity - sim).abs() < 1e-9);
        assert_eq!(s.state, system.init_user_state(&user).unwrap());
    }
}

#[test]
fn negative_critique_demotes_and_hides_keyphrase() {
    let system = fixture();
    let dest = system.catalog().destinations()[0].clone();
    let s = Session::start(&system, &some_query(&system), InterfaceMode::C, BackendKind::PerItem)
        .unwrap()
        .choose_destination(&system, &dest)
        .unwrap();
    let top = &s.current.entries[0];
    let kp = top.explanation.keyphrases[0].clone();
    let after = s.critique(&system, &kp, Polarity::Negative).unwrap();
    let new_score = after
        .current
        .entries
        .iter()
        .find(|e| e.item_id == top.item_id)
        .map(|e| e.score);
    if let Some(score) = new_score {
        assert!(score < top.score);
    }
    assert!(after
        .current
        .entries
        .iter()
        .all(|e| !e.explanation.keyphrases.contains(&kp)));
}

#[test]
fn store_isolates_concurrent_sessions() {
    let system = Arc::new(fixture());
    let store = Arc::new(SessionStore::new());
    let dest = system.catalog().destinations()[2].clone();
    let q = some_query(&system);
    let ids: Vec<String> = (0..2)
        .map(|_| {
            let s = Session::start(&system, &q, InterfaceMode::C, BackendKind::PerItem)
                .unwrap()
                .choose_destination(&system, &dest)
                .unwrap();
            store.insert(s)
        })
        .collect();
    let handles: Vec<_> = ids
        .iter()
        .enumerate()
        .map(|(n, id)| {
            let (system, store, id) = (Arc::clone(&system), Arc::clone(&store), id.clone());
            thread::spawn(move || {
                for i in 0..40 {
                    let kp = system.vocab().phrase((i * 2 + n) % 90).to_string();
                    store
                        .update(&id, |s| s.critique(&system, &kp, Polarity::Negative))
                        .unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    for (n, id) in ids.iter().enumerate() {
        let s = store.get(id).unwrap();
        assert_eq!(s.history.len(), 40);
        assert!(s.state.critiques().keys().all(|k| k % 2 == n));
        let replayed = s.replay(&system).unwrap();
        assert_eq!(replayed.current, s.current);
    }
    assert!(matches!(store.get("missing"), Err(SessionError::NotFound(_))));
}

#[test]
fn store_snapshot_round_trips() {
    let system = fixture();
    let store = SessionStore::new();
    let dest = system.catalog().destinations()[3].clone();
    let s = Session::start(&system, &some_query(&system), InterfaceMode::D, BackendKind::PerItem)
        .unwrap()
        .choose_destination(&system, &dest)
        .unwrap()
        .critique(&system, system.vocab().phrase(5), Polarity::Positive)
        .unwrap();
    let id = store.insert(s.clone());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.json");
    store.save(&path).unwrap();
    let loaded = SessionStore::load(&path).unwrap();
    assert_eq!(loaded.len(), 1);
    assert_eq!(loaded.get(&id).unwrap(), s);
}

#[path = "../../core/tests/support/mod.rs"]
mod support;

use proptest::prelude::*;
use serde_json::json;

use dialog_cli::service::handle;
use dialog_cli::session::{decode_frontier, encode_frontier, SessionSnapshot, StepError};
use dialog_core::syntax::print_utterance;
use dialog_core::engine::run_turns;
use dialog_core::{candidates, is_complete, parse_expr, Dialog, Frontier, Utterance};

use support::strategy::{all_utterances, valid_expr, FULL};

const CASES: u32 = 500;

// The service sees expressions through their printed form.
fn spec_of(e: &Dialog) -> Dialog {
    parse_expr(&e.to_string()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn replay_reproduces_every_snapshot(e in valid_expr(FULL), picks in prop::collection::vec(any::<prop::sample::Index>(), 6)) {
        let spec = spec_of(&e);
        let universe = spec.solicitation_set();
        let mut snap = SessionSnapshot::init(&spec, false);
        let mut turns: Vec<Utterance> = Vec::new();
        for pick in picks {
            let lib = run_turns(&spec, &turns);
            prop_assert_eq!(&snap.frontier().unwrap(), &lib);
            prop_assert_eq!(snap.complete, is_complete(&lib));
            prop_assert_eq!(&SessionSnapshot::replay(&spec, &snap.transcript().unwrap(), false).unwrap(), &snap);
            let cs = snap.candidates().unwrap();
            prop_assert_eq!(&cs, &candidates(&lib, &universe));
            if cs.is_empty() {
                break;
            }
            let u = cs[pick.index(cs.len())].clone();
            snap = snap.step(&u).unwrap();
            turns.push(u);
        }
    }

    #[test]
    fn frontiers_survive_the_wire(e in valid_expr(FULL), picks in prop::collection::vec(any::<prop::sample::Index>(), 6)) {
        let spec = spec_of(&e);
        let universe = spec.solicitation_set();
        let mut f = Frontier::init(&spec);
        for pick in picks {
            let wire = encode_frontier(&f);
            let text = serde_json::to_string(&wire).unwrap();
            let back = decode_frontier(&serde_json::from_str::<Vec<_>>(&text).unwrap()).unwrap();
            prop_assert_eq!(&back, &f);
            let cs = candidates(&f, &universe);
            if cs.is_empty() {
                break;
            }
            f = dialog_core::stage_response(&f, &cs[pick.index(cs.len())]);
        }
    }

    #[test]
    fn steps_are_pure_and_rejections_keep_state(e in valid_expr(FULL)) {
        let spec = spec_of(&e);
        let snap = SessionSnapshot::init(&spec, false);
        let cs = snap.candidates().unwrap();
        for u in all_utterances(&spec) {
            let body = json!({ "snapshot": &snap, "utterance": print_utterance(&u) }).to_string();
            let a = handle("/session/step", body.as_bytes());
            prop_assert_eq!(&a, &handle("/session/step", body.as_bytes()));
            match snap.step(&u) {
                Ok(next) => {
                    prop_assert!(cs.contains(&u));
                    prop_assert_eq!(a.status, 200);
                    prop_assert_eq!(&a.body, &serde_json::to_value(&next).unwrap());
                }
                Err(StepError::Rejected(r)) => {
                    prop_assert!(!cs.contains(&u));
                    prop_assert_eq!(a.status, 409);
                    let expected: Vec<String> = cs.iter().map(print_utterance).collect();
                    prop_assert_eq!(r.expected, expected);
                }
                Err(StepError::Snapshot(err)) => prop_assert!(false, "{}", err),
            }
        }
    }
}

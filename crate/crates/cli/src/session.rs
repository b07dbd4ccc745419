//! Snapshot-passing sessions. All state lives in the snapshot; every operation is a pure function of it.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use dialog_core::engine::parse_context;
use dialog_core::syntax::{parse_expr_raw, print_utterance};
use dialog_core::{
    candidates, is_complete_with, parse_expr, parse_utterance, stage_response, Completion, Dialog, Frontier, Name,
    ParseError, ReductionState, SyntaxError, Utterance,
};

/// One reduction state. `stack[0]` is the bottom (`const ~`); contexts print with `@` for the hole.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateWire {
    pub stack: Vec<String>,
    pub current: String,
    #[serde(default)]
    pub pending: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub spec: String,
    pub frontier: Vec<StateWire>,
    pub transcript: Vec<String>,
    pub complete: bool,
    /// Completion requires every surviving state to finish.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub strict: bool,
}

/// Why a snapshot could not be read back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SnapshotError {
    Spec(ParseError),
    Field { field: String, error: SyntaxError },
}

impl std::fmt::Display for SnapshotError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SnapshotError::Spec(e) => write!(f, "spec: {e}"),
            SnapshotError::Field { field, error } => write!(f, "{field}: {error}"),
        }
    }
}

impl std::error::Error for SnapshotError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRejectKind {
    /// Names the spec does not contain.
    Unknown,
    /// Names answered earlier in the session.
    Answered,
    /// Nothing is left to answer.
    Finished,
    /// Valid names the dialog does not accept at this point.
    OutOfOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRejection {
    pub kind: StepRejectKind,
    pub utterance: String,
    /// The offending names.
    pub names: Vec<String>,
    /// What the dialog would accept instead.
    pub expected: Vec<String>,
    pub message: String,
}

fn mode(strict: bool) -> Completion {
    if strict {
        Completion::All
    } else {
        Completion::Any
    }
}

fn field<T>(name: impl Into<String>, r: Result<T, SyntaxError>) -> Result<T, SnapshotError> {
    r.map_err(|error| SnapshotError::Field { field: name.into(), error })
}

pub fn encode_state(s: &ReductionState) -> StateWire {
    StateWire {
        stack: s.stack.iter().map(|c| c.to_string()).collect(),
        current: s.current.to_string(),
        pending: s.pending.iter().map(print_utterance).collect(),
    }
}

pub fn decode_state(w: &StateWire, i: usize) -> Result<ReductionState, SnapshotError> {
    let stack = w
        .stack
        .iter()
        .enumerate()
        .map(|(j, c)| field(format!("frontier[{i}].stack[{j}]"), parse_context(c)))
        .collect::<Result<Vec<_>, _>>()?;
    let current = field(format!("frontier[{i}].current"), parse_expr_raw(&w.current))?;
    let pending = w
        .pending
        .iter()
        .enumerate()
        .map(|(j, u)| field(format!("frontier[{i}].pending[{j}]"), parse_utterance(u)))
        .collect::<Result<VecDeque<_>, _>>()?;
    Ok(ReductionState { stack, current, pending })
}

pub fn encode_frontier(f: &Frontier) -> Vec<StateWire> {
    f.states.iter().map(encode_state).collect()
}

pub fn decode_frontier(ws: &[StateWire]) -> Result<Frontier, SnapshotError> {
    let states = ws.iter().enumerate().map(|(i, w)| decode_state(w, i)).collect::<Result<BTreeSet<_>, _>>()?;
    Ok(Frontier { states })
}

impl SessionSnapshot {
    pub fn init(spec: &Dialog, strict: bool) -> Self {
        // the spec travels as text and comes back normalized
        let spec = spec.normalize_mnemonics();
        Self::from_parts(&spec, Frontier::init(&spec), Vec::new(), strict)
    }

    fn from_parts(spec: &Dialog, f: Frontier, transcript: Vec<String>, strict: bool) -> Self {
        SessionSnapshot {
            spec: spec.to_string(),
            complete: is_complete_with(&f, mode(strict)),
            frontier: encode_frontier(&f),
            transcript,
            strict,
        }
    }

    /// Initial snapshot followed by every utterance in order. Stops at the first rejection.
    pub fn replay(spec: &Dialog, transcript: &[Utterance], strict: bool) -> Result<Self, StepRejection> {
        let mut s = Self::init(spec, strict);
        // `step` sees the spec through its printed form, which is normalized
        for u in transcript {
            s = s.step(u).map_err(|e| match e {
                StepError::Rejected(r) => r,
                StepError::Snapshot(e) => unreachable!("self-produced snapshot failed to decode: {e}"),
            })?;
        }
        Ok(s)
    }

    pub fn spec_expr(&self) -> Result<Dialog, SnapshotError> {
        parse_expr(&self.spec).map_err(SnapshotError::Spec)
    }

    pub fn frontier(&self) -> Result<Frontier, SnapshotError> {
        decode_frontier(&self.frontier)
    }

    pub fn transcript(&self) -> Result<Vec<Utterance>, SnapshotError> {
        self.transcript
            .iter()
            .enumerate()
            .map(|(i, u)| field(format!("transcript[{i}]"), parse_utterance(u)))
            .collect()
    }

    /// Utterances the current frontier accepts, smallest first.
    pub fn candidates(&self) -> Result<Vec<Utterance>, SnapshotError> {
        let spec = self.spec_expr()?;
        Ok(candidates(&self.frontier()?, &spec.solicitation_set()))
    }

    pub fn step(&self, u: &Utterance) -> Result<Self, StepError> {
        let spec = self.spec_expr().map_err(StepError::Snapshot)?;
        let f = self.frontier().map_err(StepError::Snapshot)?;
        let next = stage_response(&f, u);
        if next.is_empty() {
            return Err(StepError::Rejected(self.explain(&spec, &f, u)));
        }
        let mut transcript = self.transcript.clone();
        transcript.push(print_utterance(u));
        Ok(Self::from_parts(&spec, next, transcript, self.strict))
    }

    fn explain(&self, spec: &Dialog, f: &Frontier, u: &Utterance) -> StepRejection {
        let universe = spec.solicitation_set();
        let remaining = f.remaining();
        let expected: Vec<String> = candidates(f, &universe).iter().map(print_utterance).collect();
        let names = |pick: &dyn Fn(&Name) -> bool| -> Vec<String> {
            u.answers().iter().filter(|n| pick(n)).map(|n| n.to_string()).collect()
        };
        let unknown = names(&|n| !universe.contains(n));
        let answered = names(&|n| universe.contains(n) && !remaining.contains(n));
        let (kind, names, message) = if !unknown.is_empty() {
            (StepRejectKind::Unknown, unknown, "the spec has no such solicitation".to_string())
        } else if !answered.is_empty() {
            (StepRejectKind::Answered, answered, "already answered".to_string())
        } else if expected.is_empty() {
            (StepRejectKind::Finished, names(&|_| true), "the dialog is finished".to_string())
        } else {
            (StepRejectKind::OutOfOrder, names(&|_| true), "not accepted at this point".to_string())
        };
        StepRejection { kind, utterance: print_utterance(u), names, expected, message }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepError {
    Snapshot(SnapshotError),
    Rejected(StepRejection),
}

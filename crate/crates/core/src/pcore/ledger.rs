use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Skip,
    Update,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Skip => "skip",
            Action::Update => "update",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcDecision {
    pub action: Action,
    pub p_value: Option<f64>,
    pub p0_estimate: Option<f64>,
    pub samples_spent: u64,
    pub step_index: usize,
}

impl PcDecision {
    pub fn update(step_index: usize) -> Self {
        PcDecision { action: Action::Update, p_value: None, p0_estimate: None, samples_spent: 0, step_index }
    }

    pub fn skip(step_index: usize) -> Self {
        PcDecision { action: Action::Skip, ..Self::update(step_index) }
    }

    pub fn is_skip(&self) -> bool {
        self.action == Action::Skip
    }
}

/// Skip runs between consecutive updates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunLengths {
    /// One entry per update after the first: skips immediately preceding it.
    pub runs: Vec<usize>,
    /// Skips after the final update.
    pub trailing: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SkipLedger {
    decisions: Vec<PcDecision>,
    last_update_step: Option<usize>,
    updates: usize,
    skips: usize,
    samples: u64,
}

impl SkipLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, decision: PcDecision) {
        match decision.action {
            Action::Update => {
                self.updates += 1;
                self.last_update_step = Some(decision.step_index);
            }
            Action::Skip => self.skips += 1,
        }
        self.samples += decision.samples_spent;
        self.decisions.push(decision);
    }

    pub fn decisions(&self) -> &[PcDecision] {
        &self.decisions
    }

    pub fn last_update_step(&self) -> Option<usize> {
        self.last_update_step
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn skips(&self) -> usize {
        self.skips
    }

    pub fn total_steps(&self) -> usize {
        self.decisions.len()
    }

    pub fn samples_spent(&self) -> u64 {
        self.samples
    }

    pub fn skip_fraction(&self) -> f64 {
        if self.decisions.is_empty() {
            0.0
        } else {
            self.skips as f64 / self.decisions.len() as f64
        }
    }

    pub fn run_lengths(&self) -> RunLengths {
        ledger_run_lengths(self.decisions.iter().map(|d| d.action))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,action,p_value,p0_estimate,samples_spent\n");
        for d in &self.decisions {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                d.step_index,
                d.action.as_str(),
                opt(d.p_value),
                opt(d.p0_estimate),
                d.samples_spent
            );
        }
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Run lengths of an action sequence. Skips before the first update are ignored.
pub fn ledger_run_lengths(actions: impl IntoIterator<Item = Action>) -> RunLengths {
    let mut out = RunLengths::default();
    let mut seen_update = false;
    let mut current = 0;
    for a in actions {
        match a {
            Action::Update => {
                if seen_update {
                    out.runs.push(current);
                }
                seen_update = true;
                current = 0;
            }
            Action::Skip => current += 1,
        }
    }
    if seen_update {
        out.trailing = current;
    }
    out
}

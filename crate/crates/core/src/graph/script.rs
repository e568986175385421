//! Line-oriented update scripts.
//!
//! ```text
//! N <n> <directed:0|1>
//! E <u> <v>            initial edge
//! I <u> <v> / D <u> <v>
//! QD <u> <v> [expected]
//! QP <u> <v>
//! T+ <v> / T- <v>
//! PH <i> [expected_bit]
//! # comment, #% annotation (kept verbatim)
//! ```

use std::fmt::Write as _;

use super::{Dist, DynamicGraph, EdgeEvent};
use crate::error::{Error, Result};

pub const SCRIPT_HEADER: &str = "# dynpaths-script v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptEvent {
    Insert(usize, usize),
    Delete(usize, usize),
    DistQuery { u: usize, v: usize, expected: Option<Dist> },
    PathQuery { u: usize, v: usize },
    AddTerminal(usize),
    RemoveTerminal(usize),
    Phase { index: usize, expected_bit: Option<bool> },
}

impl ScriptEvent {
    pub fn edge_event(&self) -> Option<EdgeEvent> {
        match *self {
            ScriptEvent::Insert(u, v) => Some(EdgeEvent::Insert(u, v)),
            ScriptEvent::Delete(u, v) => Some(EdgeEvent::Delete(u, v)),
            _ => None,
        }
    }
}

impl From<EdgeEvent> for ScriptEvent {
    fn from(ev: EdgeEvent) -> Self {
        match ev {
            EdgeEvent::Insert(u, v) => ScriptEvent::Insert(u, v),
            EdgeEvent::Delete(u, v) => ScriptEvent::Delete(u, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateScript {
    pub n: usize,
    pub directed: bool,
    pub initial_edges: Vec<(usize, usize)>,
    pub events: Vec<ScriptEvent>,
    /// `#%` lines, without the marker.
    pub annotations: Vec<String>,
}

impl UpdateScript {
    pub fn new(n: usize, directed: bool) -> Self {
        UpdateScript { n, directed, initial_edges: Vec::new(), events: Vec::new(), annotations: Vec::new() }
    }

    pub fn from_graph(g: &DynamicGraph) -> Self {
        let mut s = UpdateScript::new(g.n(), g.is_directed());
        s.initial_edges = g.edges();
        s
    }

    pub fn initial_graph(&self) -> Result<DynamicGraph> {
        DynamicGraph::from_edges(self.n, self.directed, &self.initial_edges)
    }

    pub fn push(&mut self, ev: impl Into<ScriptEvent>) {
        self.events.push(ev.into());
    }

    /// Replays all edge events; fails on the first illegal one. Returns the final graph.
    pub fn validate(&self) -> Result<DynamicGraph> {
        let mut g = self.initial_graph()?;
        for ev in &self.events {
            match *ev {
                ScriptEvent::DistQuery { u, v, .. } | ScriptEvent::PathQuery { u, v } => {
                    if u >= self.n || v >= self.n {
                        return Err(Error::IllegalUpdate(format!("query ({u}, {v}) out of range")));
                    }
                }
                ScriptEvent::AddTerminal(v) | ScriptEvent::RemoveTerminal(v) if v >= self.n => {
                    return Err(Error::IllegalUpdate(format!("terminal {v} out of range")));
                }
                _ => {}
            }
            if let Some(e) = ev.edge_event() {
                g.apply(e)?;
            }
        }
        Ok(g)
    }

    /// `(phase, value)` pairs from `#% threshold <phase> <value>` annotations.
    pub fn thresholds(&self) -> Vec<(usize, u64)> {
        self.annotations
            .iter()
            .filter_map(|a| {
                let mut it = a.split_whitespace();
                (it.next()? == "threshold").then_some(())?;
                Some((it.next()?.parse().ok()?, it.next()?.parse().ok()?))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{SCRIPT_HEADER}").unwrap();
        for a in &self.annotations {
            writeln!(s, "#% {a}").unwrap();
        }
        writeln!(s, "N {} {}", self.n, self.directed as u8).unwrap();
        for (u, v) in &self.initial_edges {
            writeln!(s, "E {u} {v}").unwrap();
        }
        for ev in &self.events {
            match ev {
                ScriptEvent::Insert(u, v) => writeln!(s, "I {u} {v}"),
                ScriptEvent::Delete(u, v) => writeln!(s, "D {u} {v}"),
                ScriptEvent::DistQuery { u, v, expected: Some(d) } => writeln!(s, "QD {u} {v} {d}"),
                ScriptEvent::DistQuery { u, v, expected: None } => writeln!(s, "QD {u} {v}"),
                ScriptEvent::PathQuery { u, v } => writeln!(s, "QP {u} {v}"),
                ScriptEvent::AddTerminal(v) => writeln!(s, "T+ {v}"),
                ScriptEvent::RemoveTerminal(v) => writeln!(s, "T- {v}"),
                ScriptEvent::Phase { index, expected_bit: Some(b) } => writeln!(s, "PH {index} {}", *b as u8),
                ScriptEvent::Phase { index, expected_bit: None } => writeln!(s, "PH {index}"),
            }
            .unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut script: Option<UpdateScript> = None;
        let mut pending_annotations = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix("#%") {
                pending_annotations.push(rest.trim().to_string());
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<usize> {
                toks.get(i).ok_or_else(|| err("missing field"))?.parse::<usize>().map_err(|_| err("bad integer"))
            };
            if toks[0] == "N" {
                if script.is_some() {
                    return Err(err("duplicate N line"));
                }
                let directed = match num(2)? {
                    0 => false,
                    1 => true,
                    _ => return Err(err("directed flag must be 0 or 1")),
                };
                script = Some(UpdateScript::new(num(1)?, directed));
                continue;
            }
            let s = script.as_mut().ok_or_else(|| err("event before N line"))?;
            let (lo, hi) = match toks[0] {
                "E" | "I" | "D" | "QP" => (3, 3),
                "T+" | "T-" => (2, 2),
                "QD" => (3, 4),
                "PH" => (2, 3),
                _ => return Err(err("unknown event tag")),
            };
            if toks.len() < lo || toks.len() > hi {
                return Err(err("wrong field count"));
            }
            match toks[0] {
                "E" => s.initial_edges.push((num(1)?, num(2)?)),
                "I" => s.events.push(ScriptEvent::Insert(num(1)?, num(2)?)),
                "D" => s.events.push(ScriptEvent::Delete(num(1)?, num(2)?)),
                "QP" => s.events.push(ScriptEvent::PathQuery { u: num(1)?, v: num(2)? }),
                "T+" => s.events.push(ScriptEvent::AddTerminal(num(1)?)),
                "T-" => s.events.push(ScriptEvent::RemoveTerminal(num(1)?)),
                "QD" => {
                    let expected = match toks.get(3) {
                        None => None,
                        Some(&"inf") => Some(Dist::Inf),
                        Some(t) => Some(Dist::Finite(t.parse().map_err(|_| err("bad distance"))?)),
                    };
                    s.events.push(ScriptEvent::DistQuery { u: num(1)?, v: num(2)?, expected });
                }
                "PH" => {
                    let expected_bit = match toks.get(2) {
                        None => None,
                        Some(&"0") => Some(false),
                        Some(&"1") => Some(true),
                        Some(_) => return Err(err("phase bit must be 0 or 1")),
                    };
                    s.events.push(ScriptEvent::Phase { index: num(1)?, expected_bit });
                }
                _ => unreachable!(),
            }
        }
        let mut s = script.ok_or(Error::Parse { line: 0, msg: "missing N line".into() })?;
        s.annotations = pending_annotations;
        Ok(s)
    }
}

//! Plain-text serialization of [`DiscreteDistribution`].
//!
//! ```text
//! # comment
//! labels = 3
//!
//! [atom]
//! location = 0.0, 1.5
//! mass = 1.0
//! probs = 0, 0, 1
//! bag 1 = 0.1, 0, 0.1
//! bag 3 = 0.4, 0, 0.4
//! bag 1;2 = 0.5, 1, 0.5
//! ```
//!
//! Each `bag <labels> = ...` line gives one row of the bag-generation matrix,
//! `P(bag | y)` for `y = 1..c`. Rows that are not listed are zero. Instead of
//! rows an atom may say `baggen = identity` or `baggen = full`.

use std::fmt::Write as _;

use super::{Atom, BagGenMatrix, DiscreteDistribution, LabelDistribution};
use crate::error::{Error, Result};
use crate::labels::{Bag, LabelSpace};

#[derive(Default)]
struct AtomDraft {
    line: usize,
    location: Option<Vec<f64>>,
    mass: Option<f64>,
    probs: Option<Vec<f64>>,
    rows: Vec<(Bag, Vec<f64>)>,
    named: Option<String>,
}

fn parse_list(value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("bad number `{t}`") }))
        .collect()
}

pub fn parse_distribution(input: &str) -> Result<DiscreteDistribution> {
    let mut space: Option<LabelSpace> = None;
    let mut drafts: Vec<AtomDraft> = Vec::new();

    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if text == "[atom]" {
            if space.is_none() {
                return Err(Error::Parse { line, msg: "`labels` must precede the first atom".into() });
            }
            drafts.push(AtomDraft { line, ..Default::default() });
            continue;
        }
        let (key, value) = text
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{text}`") })?;
        let err = |msg: String| Error::Parse { line, msg };

        let Some(draft) = drafts.last_mut() else {
            if key == "labels" {
                let c: usize = value.parse().map_err(|_| err(format!("bad label count `{value}`")))?;
                space = Some(LabelSpace::new(c).map_err(|e| err(e.to_string()))?);
                continue;
            }
            return Err(err(format!("unknown key `{key}` outside an atom")));
        };
        let c = space.map(|s| s.len()).unwrap_or(0);
        match key {
            "location" => draft.location = Some(parse_list(value, line)?),
            "mass" => draft.mass = Some(value.parse().map_err(|_| err(format!("bad mass `{value}`")))?),
            "probs" => draft.probs = Some(parse_list(value, line)?),
            "baggen" => draft.named = Some(value.to_string()),
            _ if key.starts_with("bag ") => {
                let bag = Bag::parse(&key[4..], space.expect("checked above")).map_err(|e| err(e.to_string()))?;
                let row = parse_list(value, line)?;
                if row.len() != c {
                    return Err(err(format!("bag row needs {c} values, got {}", row.len())));
                }
                draft.rows.push((bag, row));
            }
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }

    let space = space.ok_or(Error::Parse { line: 0, msg: "missing `labels`".into() })?;
    let c = space.len();
    let mut atoms = Vec::with_capacity(drafts.len());
    for d in drafts {
        let line = d.line;
        let missing = |what: &str| Error::Parse { line, msg: format!("atom is missing `{what}`") };
        let probs = d.probs.ok_or_else(|| missing("probs"))?;
        let label_dist = LabelDistribution::new(probs).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let baggen = match (d.named.as_deref(), d.rows.is_empty()) {
            (Some("identity"), true) => BagGenMatrix::identity(space)?,
            (Some("full"), true) => BagGenMatrix::full(space)?,
            (Some(other), true) => {
                return Err(Error::Parse { line, msg: format!("unknown baggen `{other}`") })
            }
            (Some(_), false) => {
                return Err(Error::Parse { line, msg: "use either `baggen` or `bag` rows".into() })
            }
            (None, _) => {
                let mut entries = vec![0.0; space.num_bags() * c];
                for (bag, row) in d.rows {
                    let r = bag.canonical_index();
                    entries[r * c..(r + 1) * c].copy_from_slice(&row);
                }
                BagGenMatrix::new(space, entries).map_err(|e| Error::Parse { line, msg: e.to_string() })?
            }
        };
        atoms.push(Atom {
            location: d.location.ok_or_else(|| missing("location"))?,
            mass: d.mass.ok_or_else(|| missing("mass"))?,
            label_dist,
            baggen,
        });
    }
    DiscreteDistribution::new(atoms, space)
}

/// Inverse of [`parse_distribution`]; zero rows are omitted.
pub fn write_distribution(d: &DiscreteDistribution) -> String {
    let space = d.label_space();
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "labels = {}", space.len());
    for atom in d.atoms() {
        let _ = writeln!(out, "\n[atom]");
        let _ = writeln!(out, "location = {}", join(&atom.location));
        let _ = writeln!(out, "mass = {}", atom.mass);
        let _ = writeln!(out, "probs = {}", join(atom.label_dist.probs()));
        let c = space.len();
        for (bag, row) in space.bags().zip(atom.baggen.entries().chunks_exact(c)) {
            if row.iter().any(|&v| v != 0.0) {
                let _ = writeln!(out, "bag {bag} = {}", join(row));
            }
        }
    }
    out
}

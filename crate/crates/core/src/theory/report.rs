//! Per-atom theory summaries as `key=value` text and advantage CSV.

use std::fmt::Write as _;

use super::{advantage, find_ambiguous_pair, frequency_argmax, is_label_aligned_process, is_reconstructible};
use super::{ProcessAlignment, DEFAULT_RANK_TOL};
use crate::distribution::{bayes_risk, DiscreteDistribution};
use crate::error::Result;
use crate::labels::Bag;

#[derive(Clone, Debug, PartialEq)]
pub struct AtomReport {
    pub index: usize,
    pub mass: f64,
    pub bayes: Bag,
    pub frequency_argmax: Bag,
    pub aligned: bool,
    pub reconstructible: bool,
    /// Bag marginal gap of the ambiguous pair, when the process is not reconstructible.
    pub ambiguous_pair: Option<(Vec<f64>, Vec<f64>)>,
    pub process_probe: ProcessAlignment,
    pub advantage: f64,
    pub p: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoryReport {
    pub labels: usize,
    pub bayes_risk: f64,
    pub label_aligned: bool,
    pub advantage_cap: f64,
    pub atoms: Vec<AtomReport>,
}

pub fn theory_report(d: &DiscreteDistribution, advantage_cap: f64, probes: usize) -> Result<TheoryReport> {
    let mut atoms = Vec::with_capacity(d.len());
    for (i, atom) in d.atoms().iter().enumerate() {
        let adv = advantage(d, i, advantage_cap)?;
        let freq_top = frequency_argmax(d, i)?;
        let pair = find_ambiguous_pair(&atom.baggen, DEFAULT_RANK_TOL)?;
        atoms.push(AtomReport {
            index: i,
            mass: atom.mass,
            bayes: atom.label_dist.argmax(),
            frequency_argmax: freq_top,
            aligned: freq_top == atom.label_dist.argmax(),
            reconstructible: is_reconstructible(&atom.baggen, DEFAULT_RANK_TOL)?,
            ambiguous_pair: pair.map(|(a, b)| (a.probs().to_vec(), b.probs().to_vec())),
            process_probe: is_label_aligned_process(&atom.baggen, probes)?,
            advantage: adv.advantage,
            p: adv.p,
            gamma: adv.gamma,
        });
    }
    Ok(TheoryReport {
        labels: d.label_space().len(),
        bayes_risk: bayes_risk(d),
        label_aligned: atoms.iter().all(|a| a.aligned),
        advantage_cap,
        atoms,
    })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl TheoryReport {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "labels={}", self.labels);
        let _ = writeln!(out, "atoms={}", self.atoms.len());
        let _ = writeln!(out, "bayes_risk={}", self.bayes_risk);
        let _ = writeln!(out, "label_aligned={}", self.label_aligned);
        let _ = writeln!(out, "advantage_cap={}", self.advantage_cap);
        for a in &self.atoms {
            let key = format!("atom.{}", a.index);
            let _ = writeln!(out, "{key}.mass={}", a.mass);
            let _ = writeln!(out, "{key}.bayes={}", a.bayes);
            let _ = writeln!(out, "{key}.frequency_argmax={}", a.frequency_argmax);
            let _ = writeln!(out, "{key}.aligned={}", a.aligned);
            let _ = writeln!(out, "{key}.reconstructible={}", a.reconstructible);
            if let Some((q1, q2)) = &a.ambiguous_pair {
                let _ = writeln!(out, "{key}.ambiguous_q1={}", join(q1));
                let _ = writeln!(out, "{key}.ambiguous_q2={}", join(q2));
            }
            match &a.process_probe {
                ProcessAlignment::AlignedSoFar { probes } => {
                    let _ = writeln!(out, "{key}.process_aligned_so_far={probes}");
                }
                ProcessAlignment::Counterexample(q) => {
                    let _ = writeln!(out, "{key}.process_counterexample={}", join(q.probs()));
                }
            }
            let _ = writeln!(out, "{key}.advantage={}", a.advantage);
            let _ = writeln!(out, "{key}.p={}", a.p);
            let _ = writeln!(out, "{key}.gamma={}", a.gamma);
        }
        out
    }

    /// `atom_index,advantage,p,gamma`, one row per atom.
    pub fn advantage_csv(&self) -> String {
        let mut out = String::from("atom_index,advantage,p,gamma\n");
        for a in &self.atoms {
            let _ = writeln!(out, "{},{},{},{}", a.index, a.advantage, a.p, a.gamma);
        }
        out
    }
}

//! Plain-text tables for terminal use.

use std::io::{Result, Write};
use std::path::Path;

use ahp_core::consistency::ConsistencyReport;
use ahp_core::evaluate::Evaluation;
use ahp_core::model::GOAL_ID;
use ahp_core::ModelDocument;

use crate::output::*;

fn display_name(doc: &ModelDocument, id: &str) -> String {
    let h = &doc.hierarchy;
    if id == GOAL_ID {
        return h.goal.clone();
    }
    if let Some(c) = h.find(id) {
        return c.name.clone();
    }
    h.alternatives.iter().find(|a| a.id == id).map_or_else(|| id.to_string(), |a| a.name.clone())
}

pub(crate) fn node_outputs(doc: &ModelDocument, eval: &Evaluation) -> Vec<NodeOutput> {
    eval.nodes
        .iter()
        .map(|n| NodeOutput {
            member_names: n.members.iter().map(|m| display_name(doc, m)).collect(),
            evaluation: n.clone(),
        })
        .collect()
}

fn report_line(out: &mut dyn Write, doc: &ModelDocument, node: &str, r: &ConsistencyReport) -> Result<()> {
    let verdict = if r.consistent { "ok" } else { "INCONSISTENT" };
    writeln!(
        out,
        "{:<28} n={:<2} lambda_max={:.5} CI={:.5} RI={:.2} CR={:.4}  {verdict}",
        display_name(doc, node),
        r.n,
        r.lambda_max,
        r.ci,
        r.ri,
        r.cr
    )?;
    if !r.consistent {
        if let Some(rev) = &r.worst_pair {
            let members = doc.hierarchy.comparison_nodes();
            let names = members.iter().find(|c| c.id == node).map(|c| &c.members);
            let label = |k: usize| names.and_then(|m| m.get(k)).map_or_else(|| k.to_string(), |id| display_name(doc, id));
            writeln!(
                out,
                "    suggestion: revise ({}, {}) {} vs {}: {:.4} -> {} ({})",
                rev.i,
                rev.j,
                label(rev.i),
                label(rev.j),
                rev.current,
                rev.suggested,
                rev.suggested.label()
            )?;
        }
    }
    Ok(())
}

pub(crate) fn validate(out: &mut dyn Write, path: &Path, r: &ValidateOutput) -> Result<()> {
    if r.valid {
        return writeln!(out, "{}: valid", path.display());
    }
    writeln!(out, "{}: invalid", path.display())?;
    for d in &r.defects {
        writeln!(out, "  defect: {d}")?;
    }
    for n in &r.incomplete {
        let pairs: Vec<String> = n.missing.iter().map(|(i, j)| format!("({i},{j})")).collect();
        writeln!(out, "  incomplete: {} missing {}", n.node, pairs.join(" "))?;
    }
    Ok(())
}

pub(crate) fn weights(out: &mut dyn Write, doc: &ModelDocument, r: &WeightsOutput) -> Result<()> {
    writeln!(out, "method: {}  CR threshold: {}", r.method, r.cr_threshold)?;
    for node in &r.nodes {
        let e = &node.evaluation;
        writeln!(out)?;
        report_line(out, doc, &e.node, &e.report)?;
        for (name, w) in node.member_names.iter().zip(&e.weights) {
            writeln!(out, "    {name:<32} {w:.4}")?;
        }
    }
    writeln!(out)?;
    writeln!(out, "{:<24} {:<32} {:>13}", "criteria", "sub-criteria", "global weight")?;
    for l in &r.global_weights {
        writeln!(out, "{:<24} {:<32} {:>13.4}", l.parents.join(" / "), l.name, l.global_weight)?;
    }
    let total: f64 = r.global_weights.iter().map(|l| l.global_weight).sum();
    writeln!(out, "{:<24} {:<32} {:>13.4}", "", "total", total)
}

pub(crate) fn check(out: &mut dyn Write, doc: &ModelDocument, r: &CheckOutput) -> Result<()> {
    for e in &r.nodes {
        report_line(out, doc, &e.node, &e.report)?;
    }
    let bad = r.nodes.iter().filter(|e| !e.report.consistent).count();
    if bad == 0 {
        writeln!(out, "all {} matrices consistent (CR <= {})", r.nodes.len(), r.cr_threshold)
    } else {
        writeln!(out, "{bad} of {} matrices exceed CR {}", r.nodes.len(), r.cr_threshold)
    }
}

pub(crate) fn rank(out: &mut dyn Write, r: &RankOutput) -> Result<()> {
    writeln!(out, "{:<4} {:<32} {:>8}", "rank", "alternative", "score")?;
    let mut alts: Vec<_> = r.result.alternatives.iter().collect();
    alts.sort_by_key(|a| a.rank);
    for a in alts {
        let marker = if r.most_suitable.as_deref() == Some(a.id.as_str()) { "  <- most suitable" } else { "" };
        writeln!(out, "{:<4} {:<32} {:>8.4}{marker}", a.rank, a.name, a.score)?;
    }
    for t in &r.result.ties {
        writeln!(out, "tie: {}", t.join(", "))?;
    }
    if !r.consistent {
        writeln!(out, "note: some judgment matrices are inconsistent; run `ahp check` for details")?;
    }
    Ok(())
}

pub(crate) fn sensitivity(out: &mut dyn Write, doc: &ModelDocument, r: &SensitivityOutput) -> Result<()> {
    let s = &r.scan;
    writeln!(
        out,
        "{} under {}: current local weight {:.4}, {} sweep points",
        display_name(doc, &s.target_node),
        display_name(doc, &s.parent),
        s.current_weight,
        s.points.len()
    )?;
    if s.reversals.is_empty() {
        return writeln!(out, "no change of the top alternative across (0, 1)");
    }
    for rev in &s.reversals {
        writeln!(
            out,
            "top changes from {} to {} at weight {:.4} (between {:.4} and {:.4})",
            display_name(doc, &rev.from),
            display_name(doc, &rev.to),
            rev.weight,
            rev.lower,
            rev.upper
        )?;
    }
    Ok(())
}

pub(crate) fn ri(out: &mut dyn Write, r: &RiOutput) -> Result<()> {
    writeln!(out, "n={} samples={} seed={}", r.n, r.samples, r.seed)?;
    writeln!(out, "estimate {:.4}  table {:.2}  difference {:+.4}", r.estimate, r.table, r.difference)
}

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::analyze::{cmd_analyze, Analysis, POSITION_SENSE};
use crate::error::{Error, Result};
use crate::participant::{
    column, Measure, ParticipantRecord, POSITION_REFERENCE_FRACTION, TORQUE_REFERENCE_MNM, VELOCITY_REFERENCE_DPS,
    WEBER_TOLERANCE,
};

const REF_FOOTERS: &str = include_str!("../../fixtures/reference_footers.csv");
const REF_CORRELATIONS: &str = include_str!("../../fixtures/reference_correlations.csv");
const REF_PAIRWISE: &str = include_str!("../../fixtures/reference_pairwise.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FooterRef {
    pub measure: String,
    pub mean: f64,
    pub std: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRef {
    pub measure_a: String,
    pub measure_b: String,
    pub rho: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRef {
    pub test_a: String,
    pub test_b: String,
    pub p: f64,
}

/// Published summary values the computed report is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperReference {
    pub footers: Vec<FooterRef>,
    pub correlations: Vec<CorrelationRef>,
    pub pairwise: Vec<PairwiseRef>,
}

fn read_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<std::result::Result<_, _>>().map_err(Error::from)
}

impl PaperReference {
    pub fn bundled() -> Result<Self> {
        Ok(Self {
            footers: read_csv(REF_FOOTERS)?,
            correlations: read_csv(REF_CORRELATIONS)?,
            pairwise: read_csv(REF_PAIRWISE)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    /// Shown for comparison only.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub section: String,
    pub item: String,
    pub computed: f64,
    pub reference: f64,
    /// `published` for published values, `derived` for hand-computed ones.
    pub source: String,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub note: String,
}

fn row(
    section: &str,
    item: String,
    computed: f64,
    reference: f64,
    source: &str,
    tol: Option<f64>,
    note: &str,
) -> ReportRow {
    let status = match tol {
        Some(t) if (computed - reference).abs() <= t + 1e-12 => Status::Pass,
        Some(_) => Status::Fail,
        None => Status::Info,
    };
    ReportRow {
        section: section.into(),
        item,
        computed,
        reference,
        source: source.into(),
        tolerance: tol,
        status,
        note: note.into(),
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub rows: Vec<ReportRow>,
    pub analysis: Analysis,
}

impl Reproduction {
    pub fn count(&self, s: Status) -> usize {
        self.rows.iter().filter(|r| r.status == s).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn find(&self, section: &str, item: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.section == section && r.item == item)
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "{:<14}{:<28}{:>12}{:>12}  {:<8}{:>10}  {:<5} note\n",
            "section", "item", "computed", "reference", "source", "tol", "flag"
        );
        for r in &self.rows {
            let tol = r.tolerance.map(|t| format!("{t}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{:<14}{:<28}{:>12.6}{:>12.6}  {:<8}{:>10}  {:<5} {}",
                r.section, r.item, r.computed, r.reference, r.source, tol, r.status, r.note
            );
        }
        let _ = writeln!(
            s,
            "\n{} checks: {} pass, {} fail, {} informational",
            self.rows.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Info)
        );
        s
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut out = self.analysis.write(dir)?;
        let p = dir.join("reproduction.csv");
        let f = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
        let mut w = csv::Writer::from_writer(f);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io(&p, e))?;
        out.push(p);
        let p = dir.join("reproduction.txt");
        fs::write(&p, self.text()).map_err(|e| Error::io(&p, e))?;
        out.push(p);
        Ok(out)
    }
}

/// Correlation cells checked against a tolerance; the rest are informational
/// because the published matrix mixes methods.
const CORRELATION_ANCHORS: [(&str, &str, f64, f64); 2] =
    [("MoCA", "Td", 0.005, 0.001), ("Handedness", "Td", 0.01, 0.005)];

/// Recomputes the published summary tables from a participant table and
/// compares them value by value.
pub fn cmd_reproduce_paper(
    records: &[ParticipantRecord],
    reference: &PaperReference,
    seed: u64,
    normality_resamples: usize,
) -> Result<Reproduction> {
    let analysis = cmd_analyze(records, seed, normality_resamples)?;
    let recs = &analysis.records;
    let mut rows = Vec::new();

    for r in recs {
        let pos_ref = POSITION_REFERENCE_FRACTION * r.crom_deg;
        for (name, stored, computed) in [
            ("Kp", r.kp_pct, 100.0 * r.jndp_deg / pos_ref),
            ("Kv", r.kv_pct, 100.0 * r.jndv_dps / VELOCITY_REFERENCE_DPS),
            ("Kt", r.kt_pct, 100.0 * r.jndt_mnm / TORQUE_REFERENCE_MNM),
        ] {
            rows.push(row(
                "weber",
                format!("P{} {name}", r.pid),
                computed,
                stored,
                "published",
                Some(WEBER_TOLERANCE),
                "",
            ));
        }
    }

    for f in &reference.footers {
        let m = Measure::from_label(&f.measure).ok_or_else(|| Error::Schema(f.measure.clone()))?;
        let d = analysis
            .descriptives
            .iter()
            .find(|(x, _)| *x == m)
            .map(|(_, d)| d.clone())
            .ok_or_else(|| Error::Schema(f.measure.clone()))?;
        for (stat, c, p) in [("mean", d.mean, f.mean), ("std", d.std, f.std), ("median", d.median, f.median)] {
            rows.push(row("descriptives", format!("{} {stat}", m.label()), c, p, "published", Some(0.01), ""));
        }
    }

    for c in &reference.correlations {
        let Some(cell) = analysis.spearman.cell(&c.measure_a, &c.measure_b) else {
            return Err(Error::Schema(format!("{}/{}", c.measure_a, c.measure_b)));
        };
        let anchor = CORRELATION_ANCHORS
            .iter()
            .find(|(a, b, _, _)| (*a == c.measure_a && *b == c.measure_b) || (*a == c.measure_b && *b == c.measure_a));
        let (tr, tp) = match anchor {
            Some(&(_, _, tr, tp)) => (Some(tr), Some(tp)),
            None => (None, None),
        };
        let item = format!("{}/{}", c.measure_a, c.measure_b);
        let (rho, p) = (cell.rho.unwrap_or(f64::NAN), cell.p.unwrap_or(f64::NAN));
        let note =
            if anchor.is_none() && (rho - c.rho).abs() > 0.01 { "spearman differs from published cell" } else { "" };
        rows.push(row("spearman rho", item.clone(), rho, c.rho, "published", tr, note));
        rows.push(row("spearman p", item, p, c.p, "published", tp, ""));
    }

    let pub_cell = reference.correlations.iter().find(|c| c.measure_a == "JNDv" && c.measure_b == "MEp").cloned();
    if let (Some(pc), (Ok(sp), Ok(pe))) = (pub_cell, &analysis.jndv_mep) {
        rows.push(row(
            "pearson",
            "JNDv/MEp r".into(),
            pe.statistic,
            pc.rho,
            "published",
            Some(0.005),
            "published cell matches pearson",
        ));
        rows.push(row("pearson", "JNDv/MEp p".into(), pe.p_value, pc.p, "published", Some(0.002), ""));
        rows.push(row("spearman", "JNDv/MEp rho".into(), sp.statistic, 0.638, "derived", Some(0.005), "tie-corrected"));
    }

    let wil_ref = reference.pairwise.iter().find(|p| p.test_a == "JNDv" && p.test_b == "MEv");
    if let (Ok(w), Some(pr)) = (&analysis.wilcoxon, wil_ref) {
        rows.push(row(
            "wilcoxon",
            "JNDv/MEv p".into(),
            w.p_value,
            2.0 / 2048.0,
            "derived",
            Some(1e-15),
            "2/2^11 by enumeration",
        ));
        rows.push(row(
            "wilcoxon",
            "JNDv/MEv p (printed)".into(),
            w.p_value,
            pr.p,
            "published",
            Some(1e-6),
            "published value truncates 0.00097656",
        ));
    }

    if let Ok(fr) = &analysis.friedman {
        rows.push(row("friedman", "MEg/JNDp/MEp chi2".into(), fr.statistic, 12.18, "derived", Some(0.02), ""));
        rows.push(row("friedman", "MEg/JNDp/MEp p".into(), fr.p_value, 0.0023, "derived", Some(0.0005), ""));
    }
    let m = analysis.posthoc.len() as f64;
    for (c, d) in analysis.posthoc.iter().zip(&analysis.posthoc_dunn) {
        let (a, b) = (POSITION_SENSE[c.a].label(), POSITION_SENSE[c.b].label());
        if let Some(pr) = reference.pairwise.iter().find(|p| p.test_a == a && p.test_b == b) {
            let note =
                format!("dunn z: unadjusted p = {:.5}, bonferroni p = {:.5}", d.p_normal, (m * d.p_normal).min(1.0));
            rows.push(row("post-hoc", format!("{a}/{b} p"), c.test.p_value, pr.p, "published", None, &note));
        }
    }
    Ok(Reproduction { rows, analysis })
}

/// Negative control: permutes one column of the table across participants.
pub fn shuffle_column(records: &[ParticipantRecord], column_name: &str, seed: u64) -> Result<Vec<ParticipantRecord>> {
    let m = Measure::from_label(column_name).ok_or_else(|| Error::Schema(column_name.to_string()))?;
    let mut values = column(records, m);
    let original = values.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a permutation that leaves the column unchanged is no control at all
    while values == original && values.windows(2).any(|w| w[0] != w[1]) {
        values.shuffle(&mut rng);
    }
    let mut out = records.to_vec();
    for (r, v) in out.iter_mut().zip(values) {
        m.set_value(r, v);
    }
    Ok(out)
}

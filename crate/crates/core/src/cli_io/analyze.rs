use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::participant::{column, validate_participant, write_participants, Measure, ParticipantRecord, Violation};
use crate::stats::report::{matrix_text, pairwise_text, write_matrix_csv, write_pairwise_csv, PairwiseRow};
use crate::stats::{
    correlation_matrix_for, descriptives, friedman, normality_screen_with, pearson, posthoc_pairwise_with, spearman,
    wilcoxon_signed_rank, Correction, CorrelationMatrix, CorrelationMethod, Descriptives, PairwiseComparison,
    PosthocPValue, TestResult,
};

/// A test that may legitimately fail on a given table (e.g. degenerate data).
pub type Outcome = std::result::Result<TestResult, String>;

/// The columns compared by the Friedman test.
pub const POSITION_SENSE: [Measure; 3] = [Measure::MeG, Measure::JndP, Measure::MeP];

#[derive(Debug, Clone)]
pub struct Analysis {
    pub n_input: usize,
    /// Participants with every robotic measure present.
    pub records: Vec<ParticipantRecord>,
    /// pids dropped for missing measures.
    pub dropped: Vec<u32>,
    pub violations: Vec<(u32, Violation)>,
    pub descriptives: Vec<(Measure, Descriptives)>,
    pub normality: Vec<(Measure, Outcome)>,
    pub spearman: CorrelationMatrix,
    pub pearson: CorrelationMatrix,
    /// JNDv vs MEv.
    pub wilcoxon: Outcome,
    pub friedman: Outcome,
    /// Exact p, Bonferroni corrected.
    pub posthoc: Vec<PairwiseComparison>,
    /// Dunn z with normal p, unadjusted.
    pub posthoc_dunn: Vec<PairwiseComparison>,
    /// Spearman and Pearson for (JNDv, MEp), whose published cell matches Pearson.
    pub jndv_mep: (Outcome, Outcome),
}

fn outcome(r: Result<TestResult>) -> Outcome {
    r.map_err(|e| e.to_string())
}

/// Runs the full statistics pipeline on a participant table.
pub fn cmd_analyze(records: &[ParticipantRecord], seed: u64, normality_resamples: usize) -> Result<Analysis> {
    if records.is_empty() {
        return Err(Error::Parse { line: 1, message: "participant table has no rows".into() });
    }
    let violations =
        records.iter().flat_map(|r| validate_participant(r).into_iter().map(move |v| (r.pid, v))).collect();
    let (complete, incomplete): (Vec<_>, Vec<_>) =
        records.iter().cloned().partition(|r| Measure::ALL.iter().all(|m| m.value(r).is_finite()));
    let dropped = incomplete.iter().map(|r| r.pid).collect();
    let recs = complete;
    if recs.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: recs.len() });
    }
    let col = |m: Measure| column(&recs, m);

    let mut desc = Vec::new();
    let mut normality = Vec::new();
    for (i, m) in Measure::ROBOTIC.into_iter().enumerate() {
        desc.push((m, descriptives(&col(m))?));
        normality.push((m, outcome(normality_screen_with(&col(m), seed.wrapping_add(i as u64), normality_resamples))));
    }
    let sp = correlation_matrix_for(&recs, &Measure::CORRELATION_SET, CorrelationMethod::Spearman)?;
    let pe = correlation_matrix_for(&recs, &Measure::CORRELATION_SET, CorrelationMethod::Pearson)?;
    let wil = outcome(wilcoxon_signed_rank(&col(Measure::JndV), &col(Measure::MeV)));
    let rows: Vec<Vec<f64>> = recs.iter().map(|r| POSITION_SENSE.iter().map(|m| m.value(r)).collect()).collect();
    let fr = outcome(friedman(&rows));
    let posthoc = posthoc_pairwise_with(&rows, Correction::Bonferroni, PosthocPValue::Exact)?;
    let posthoc_dunn = posthoc_pairwise_with(&rows, Correction::None, PosthocPValue::Normal)?;
    let (x, y) = (col(Measure::JndV), col(Measure::MeP));
    let jndv_mep = (outcome(spearman(&x, &y)), outcome(pearson(&x, &y)));
    Ok(Analysis {
        n_input: records.len(),
        records: recs,
        dropped,
        violations,
        descriptives: desc,
        normality,
        spearman: sp,
        pearson: pe,
        wilcoxon: wil,
        friedman: fr,
        posthoc,
        posthoc_dunn,
        jndv_mep,
    })
}

fn fmt_outcome(o: &Outcome) -> String {
    match o {
        Ok(t) => t.to_string(),
        Err(e) => format!("not computed: {e}"),
    }
}

impl Analysis {
    /// Pairwise rows: post-hoc comparisons and the velocity Wilcoxon.
    pub fn pairwise_rows(&self) -> Vec<PairwiseRow> {
        let name = |i: usize| POSITION_SENSE[i].label().to_string();
        let mut rows: Vec<PairwiseRow> = self
            .posthoc
            .iter()
            .map(|c| PairwiseRow {
                test_a: name(c.a),
                test_b: name(c.b),
                statistic: c.z,
                p_value: c.test.p_value,
                method: "friedman post-hoc, exact, bonferroni".into(),
            })
            .collect();
        rows.extend(self.posthoc_dunn.iter().map(|c| PairwiseRow {
            test_a: name(c.a),
            test_b: name(c.b),
            statistic: c.z,
            p_value: c.p_normal,
            method: "friedman post-hoc, dunn z, unadjusted".into(),
        }));
        if let Ok(w) = &self.wilcoxon {
            rows.push(PairwiseRow {
                test_a: Measure::JndV.label().into(),
                test_b: Measure::MeV.label().into(),
                statistic: w.statistic,
                p_value: w.p_value,
                method: w.method.clone(),
            });
        }
        rows
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "participants: {} read, {} analysed", self.n_input, self.records.len());
        if !self.dropped.is_empty() {
            let _ = writeln!(s, "dropped (missing measures): {:?}", self.dropped);
        }
        if self.violations.is_empty() {
            s.push_str("record validation: no violations\n");
        } else {
            for (pid, v) in &self.violations {
                let _ = writeln!(s, "violation P{pid}: {v}");
            }
        }
        let _ = writeln!(s, "\n{:<8}{:>10}{:>10}{:>10}{:>14}", "measure", "mean", "std", "median", "normality p");
        for ((m, d), (_, n)) in self.descriptives.iter().zip(&self.normality) {
            let np = n.as_ref().map(|t| format!("{:.4}", t.p_value)).unwrap_or_else(|_| "n/a".into());
            let _ = writeln!(s, "{:<8}{:>10.2}{:>10.2}{:>10.2}{:>14}", m.label(), d.mean, d.std, d.median, np);
        }
        s.push('\n');
        s.push_str(&matrix_text(&self.spearman));
        let _ = writeln!(s, "\nJNDv vs MEp, spearman: {}", fmt_outcome(&self.jndv_mep.0));
        let _ = writeln!(s, "JNDv vs MEp, pearson:  {}", fmt_outcome(&self.jndv_mep.1));
        let _ = writeln!(s, "\nfriedman (MEg, JNDp, MEp): {}", fmt_outcome(&self.friedman));
        let _ = writeln!(s, "wilcoxon (JNDv, MEv): {}\n", fmt_outcome(&self.wilcoxon));
        s.push_str(&pairwise_text(&self.pairwise_rows()));
        s
    }

    /// Writes the report and its CSV tables into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let create = |name: &str| {
            let p = dir.join(name);
            fs::File::create(&p).map(|f| (p.clone(), f)).map_err(|e| Error::io(p, e))
        };
        let mut out = Vec::new();
        let (p, f) = create("correlation_spearman.csv")?;
        write_matrix_csv(f, &self.spearman)?;
        out.push(p);
        let (p, f) = create("correlation_pearson.csv")?;
        write_matrix_csv(f, &self.pearson)?;
        out.push(p);
        let (p, f) = create("pairwise.csv")?;
        write_pairwise_csv(f, &self.pairwise_rows())?;
        out.push(p);
        let (p, f) = create("descriptives.csv")?;
        let mut w = csv::Writer::from_writer(f);
        w.write_record(["measure", "n", "mean", "std", "median", "normality_p"])?;
        for ((m, d), (_, n)) in self.descriptives.iter().zip(&self.normality) {
            let np = n.as_ref().map(|t| t.p_value.to_string()).unwrap_or_default();
            w.write_record([
                m.label().to_string(),
                d.n.to_string(),
                d.mean.to_string(),
                d.std.to_string(),
                d.median.to_string(),
                np,
            ])?;
        }
        w.flush().map_err(|e| Error::io(&p, e))?;
        out.push(p);
        let (p, f) = create("analysed_participants.csv")?;
        write_participants(f, &self.records)?;
        out.push(p);
        let p = dir.join("report.txt");
        fs::write(&p, self.text()).map_err(|e| Error::io(&p, e))?;
        out.push(p);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::participant::bundled_participants;

    #[test]
    fn bundled_table_analyses() {
        let a = cmd_analyze(&bundled_participants(), 1, 200).unwrap();
        assert_eq!(a.records.len(), 11);
        assert!(a.violations.is_empty());
        assert_eq!(a.spearman.len(), 45);
        let c = a.spearman.cell("MoCA", "Td").unwrap();
        assert!((c.rho.unwrap() + 0.78).abs() < 0.005);
        assert_eq!(a.posthoc.len(), 3);
        assert_eq!(a.pairwise_rows().len(), 7);
        assert!(a.text().contains("friedman"));
    }

    #[test]
    fn empty_table_is_parse_error() {
        assert!(matches!(cmd_analyze(&[], 1, 10), Err(Error::Parse { .. })));
    }

    #[test]
    fn incomplete_rows_are_dropped() {
        let mut recs = bundled_participants();
        recs[0].tk_s = f64::NAN;
        let a = cmd_analyze(&recs, 1, 50).unwrap();
        assert_eq!(a.dropped, vec![1]);
        assert_eq!(a.records.len(), 10);
    }
}

//! The statistics layer on the bundled participant table: descriptives, the
//! Spearman matrix, Wilcoxon, Friedman with pairwise post-hoc.
//!
//! `cargo run --example correlation_report -- [participants.csv]`

use wrist_testbed::participant::{bundled_participants, column, load_participants, Measure};
use wrist_testbed::stats::report::matrix_text;
use wrist_testbed::stats::{
    correlation_matrix_for, descriptives, friedman, pearson, posthoc_pairwise_with, spearman, wilcoxon_signed_rank,
    Correction, CorrelationMethod, PosthocPValue,
};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    run(std::env::args().nth(1))
}

pub fn run(arg: Option<String>) -> Result<(), Box<dyn std::error::Error>> {
    let records = match arg {
        Some(p) => load_participants(p)?,
        None => bundled_participants(),
    };

    for m in [Measure::JndV, Measure::Td] {
        let d = descriptives(&column(&records, m))?;
        println!("{m}: mean {:.2}, std {:.2}, median {:.2}", d.mean, d.std, d.median);
    }

    let matrix = correlation_matrix_for(&records, &Measure::CORRELATION_SET, CorrelationMethod::Spearman)?;
    println!("\n{}", matrix_text(&matrix));

    let (moca, td) = (column(&records, Measure::Moca), column(&records, Measure::Td));
    println!("MoCA vs Td: {}", spearman(&moca, &td)?);
    let (jndv, mep) = (column(&records, Measure::JndV), column(&records, Measure::MeP));
    println!("JNDv vs MEp: {}", spearman(&jndv, &mep)?);
    println!("JNDv vs MEp: {}", pearson(&jndv, &mep)?);
    println!("JNDv vs MEv: {}", wilcoxon_signed_rank(&jndv, &column(&records, Measure::MeV))?);

    let sense = [Measure::MeG, Measure::JndP, Measure::MeP];
    let rows: Vec<Vec<f64>> = records.iter().map(|r| sense.iter().map(|m| m.value(r)).collect()).collect();
    println!("\n{}", friedman(&rows)?);
    for method in [PosthocPValue::Exact, PosthocPValue::Normal] {
        for c in posthoc_pairwise_with(&rows, Correction::Bonferroni, method)? {
            println!("  {:>4} vs {:<4} {:?}: p = {:.5}", sense[c.a], sense[c.b], method, c.test.p_value);
        }
    }
    Ok(())
}

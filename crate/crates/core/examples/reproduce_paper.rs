//! Recompute the published summary tables from the bundled participant table
//! and print the side-by-side comparison, then corrupt one column to show the
//! Weber check catching it.
//!
//! `cargo run --example reproduce_paper`

use wrist_testbed::cli_io::{cmd_reproduce_paper, shuffle_column, PaperReference, Status};
use wrist_testbed::participant::bundled_participants;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let refs = PaperReference::bundled()?;
    let records = bundled_participants();

    let rep = cmd_reproduce_paper(&records, &refs, 1, 10_000)?;
    print!("{}", rep.text());

    let corrupted = shuffle_column(&records, "jndv_dps", 11)?;
    let bad = cmd_reproduce_paper(&corrupted, &refs, 1, 1_000)?;
    println!("\nnegative control, jndv_dps shuffled across participants:");
    for r in bad.rows.iter().filter(|r| r.status == Status::Fail && r.section == "weber") {
        println!("  FAIL {:<10} stored {:>7.2}  recomputed {:>7.2}", r.item, r.reference, r.computed);
    }
    Ok(())
}

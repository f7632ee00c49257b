//! Participant dataset schema, reference stimuli and record validation.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{Angle, AngularVelocity, TorqueMilli};

/// Fraction of cROM used as the position reference, in pronation.
pub const POSITION_REFERENCE_FRACTION: f64 = 0.30;
pub const VELOCITY_REFERENCE_DPS: AngularVelocity = 60.0;
pub const TORQUE_REFERENCE_MNM: TorqueMilli = 500.0;

/// Allowed absolute gap between a stored Weber fraction and the one recomputed
/// from its JND. Absorbs two-decimal rounding of the published tables.
pub const WEBER_TOLERANCE: f64 = 0.02;

const BUNDLED_PARTICIPANTS: &str = include_str!("../fixtures/participants.csv");

/// One participant: clinical scores joined with the robotic measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub pid: u32,
    pub age: u32,
    pub gender: String,
    pub handedness_li: f64,
    pub emnsa: u32,
    pub fma_hw: u32,
    pub moca: u32,
    pub neutral_deg: Angle,
    pub crom_deg: Angle,
    pub meg_deg: f64,
    pub jndp_deg: f64,
    pub kp_pct: f64,
    pub jndv_dps: f64,
    pub kv_pct: f64,
    pub jndt_mnm: f64,
    pub kt_pct: f64,
    pub mep_deg: f64,
    pub mev_dps: f64,
    pub tk_s: f64,
    pub td_s: f64,
}

/// The three reference stimuli for a participant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSet {
    pub pos_ref_deg: Angle,
    pub vel_ref_dps: AngularVelocity,
    pub torque_ref_mnm: TorqueMilli,
}

pub fn derive_reference_stimuli(crom: Angle) -> Result<ReferenceSet> {
    if !(crom > 0.0) || !crom.is_finite() {
        return Err(Error::Domain(format!("cROM must be positive, got {crom}")));
    }
    Ok(ReferenceSet {
        pos_ref_deg: POSITION_REFERENCE_FRACTION * crom,
        vel_ref_dps: VELOCITY_REFERENCE_DPS,
        torque_ref_mnm: TORQUE_REFERENCE_MNM,
    })
}

/// A failed record invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn check_range(out: &mut Vec<Violation>, field: &'static str, v: f64, lo: f64, hi: f64) {
    if !(lo..=hi).contains(&v) {
        out.push(Violation { field, message: format!("{v} outside [{lo}, {hi}]") });
    }
}

fn check_positive(out: &mut Vec<Violation>, field: &'static str, v: f64) {
    if !(v > 0.0) || !v.is_finite() {
        out.push(Violation { field, message: format!("{v} must be positive") });
    }
}

fn check_weber(out: &mut Vec<Violation>, field: &'static str, stored: f64, recomputed: f64) {
    if !((stored - recomputed).abs() <= WEBER_TOLERANCE) {
        out.push(Violation {
            field,
            message: format!(
                "Weber consistency: stored {stored:.4} vs recomputed {recomputed:.4} (tolerance {WEBER_TOLERANCE})"
            ),
        });
    }
}

/// Checks every record invariant. An empty list means the record is valid.
pub fn validate_participant(rec: &ParticipantRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    check_range(&mut out, "handedness_li", rec.handedness_li, -100.0, 100.0);
    check_range(&mut out, "emnsa", rec.emnsa as f64, 0.0, 8.0);
    check_range(&mut out, "fma_hw", rec.fma_hw as f64, 0.0, 30.0);
    check_range(&mut out, "moca", rec.moca as f64, 0.0, 30.0);
    check_positive(&mut out, "crom_deg", rec.crom_deg);
    for (field, v) in [
        ("meg_deg", rec.meg_deg),
        ("jndp_deg", rec.jndp_deg),
        ("jndv_dps", rec.jndv_dps),
        ("jndt_mnm", rec.jndt_mnm),
        ("mep_deg", rec.mep_deg),
        ("mev_dps", rec.mev_dps),
        ("tk_s", rec.tk_s),
        ("td_s", rec.td_s),
    ] {
        check_positive(&mut out, field, v);
    }
    if rec.crom_deg > 0.0 {
        let pos_ref = POSITION_REFERENCE_FRACTION * rec.crom_deg;
        check_weber(&mut out, "kp_pct", rec.kp_pct, 100.0 * rec.jndp_deg / pos_ref);
    }
    check_weber(&mut out, "kv_pct", rec.kv_pct, 100.0 * rec.jndv_dps / VELOCITY_REFERENCE_DPS);
    check_weber(&mut out, "kt_pct", rec.kt_pct, 100.0 * rec.jndt_mnm / TORQUE_REFERENCE_MNM);
    out
}

/// The numeric columns of a participant table that analyses can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Age,
    Handedness,
    Emnsa,
    FmaHw,
    Moca,
    Neutral,
    Crom,
    MeG,
    JndP,
    Kp,
    JndV,
    Kv,
    JndT,
    Kt,
    MeP,
    MeV,
    Tk,
    Td,
}

impl Measure {
    pub const ALL: [Measure; 18] = [
        Measure::Age,
        Measure::Handedness,
        Measure::Emnsa,
        Measure::FmaHw,
        Measure::Moca,
        Measure::Neutral,
        Measure::Crom,
        Measure::MeG,
        Measure::JndP,
        Measure::Kp,
        Measure::JndV,
        Measure::Kv,
        Measure::JndT,
        Measure::Kt,
        Measure::MeP,
        Measure::MeV,
        Measure::Tk,
        Measure::Td,
    ];

    /// Robotic columns that carry mean/STD/median footers in the published table.
    pub const ROBOTIC: [Measure; 11] = [
        Measure::MeG,
        Measure::JndP,
        Measure::Kp,
        Measure::JndV,
        Measure::Kv,
        Measure::JndT,
        Measure::Kt,
        Measure::MeP,
        Measure::MeV,
        Measure::Tk,
        Measure::Td,
    ];

    /// The ten measures entering the correlation analysis.
    pub const CORRELATION_SET: [Measure; 10] = [
        Measure::Handedness,
        Measure::Moca,
        Measure::MeG,
        Measure::JndP,
        Measure::JndV,
        Measure::JndT,
        Measure::MeP,
        Measure::MeV,
        Measure::Tk,
        Measure::Td,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Measure::Age => "Age",
            Measure::Handedness => "Handedness",
            Measure::Emnsa => "emNSA",
            Measure::FmaHw => "FMA-HW",
            Measure::Moca => "MoCA",
            Measure::Neutral => "Neutral",
            Measure::Crom => "cROM",
            Measure::MeG => "MEg",
            Measure::JndP => "JNDp",
            Measure::Kp => "Kp",
            Measure::JndV => "JNDv",
            Measure::Kv => "Kv",
            Measure::JndT => "JNDt",
            Measure::Kt => "Kt",
            Measure::MeP => "MEp",
            Measure::MeV => "MEv",
            Measure::Tk => "Tk",
            Measure::Td => "Td",
        }
    }

    /// CSV column name in the participant table.
    pub fn column(self) -> &'static str {
        match self {
            Measure::Age => "age",
            Measure::Handedness => "handedness_li",
            Measure::Emnsa => "emnsa",
            Measure::FmaHw => "fma_hw",
            Measure::Moca => "moca",
            Measure::Neutral => "neutral_deg",
            Measure::Crom => "crom_deg",
            Measure::MeG => "meg_deg",
            Measure::JndP => "jndp_deg",
            Measure::Kp => "kp_pct",
            Measure::JndV => "jndv_dps",
            Measure::Kv => "kv_pct",
            Measure::JndT => "jndt_mnm",
            Measure::Kt => "kt_pct",
            Measure::MeP => "mep_deg",
            Measure::MeV => "mev_dps",
            Measure::Tk => "tk_s",
            Measure::Td => "td_s",
        }
    }

    pub fn from_label(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.label().eq_ignore_ascii_case(s) || m.column() == s)
    }

    pub fn value(self, r: &ParticipantRecord) -> f64 {
        match self {
            Measure::Age => r.age as f64,
            Measure::Handedness => r.handedness_li,
            Measure::Emnsa => r.emnsa as f64,
            Measure::FmaHw => r.fma_hw as f64,
            Measure::Moca => r.moca as f64,
            Measure::Neutral => r.neutral_deg,
            Measure::Crom => r.crom_deg,
            Measure::MeG => r.meg_deg,
            Measure::JndP => r.jndp_deg,
            Measure::Kp => r.kp_pct,
            Measure::JndV => r.jndv_dps,
            Measure::Kv => r.kv_pct,
            Measure::JndT => r.jndt_mnm,
            Measure::Kt => r.kt_pct,
            Measure::MeP => r.mep_deg,
            Measure::MeV => r.mev_dps,
            Measure::Tk => r.tk_s,
            Measure::Td => r.td_s,
        }
    }

    /// Writes `v` into the record; integer scores are rounded.
    pub fn set_value(self, r: &mut ParticipantRecord, v: f64) {
        let int = |v: f64| v.round().max(0.0) as u32;
        match self {
            Measure::Age => r.age = int(v),
            Measure::Handedness => r.handedness_li = v,
            Measure::Emnsa => r.emnsa = int(v),
            Measure::FmaHw => r.fma_hw = int(v),
            Measure::Moca => r.moca = int(v),
            Measure::Neutral => r.neutral_deg = v,
            Measure::Crom => r.crom_deg = v,
            Measure::MeG => r.meg_deg = v,
            Measure::JndP => r.jndp_deg = v,
            Measure::Kp => r.kp_pct = v,
            Measure::JndV => r.jndv_dps = v,
            Measure::Kv => r.kv_pct = v,
            Measure::JndT => r.jndt_mnm = v,
            Measure::Kt => r.kt_pct = v,
            Measure::MeP => r.mep_deg = v,
            Measure::MeV => r.mev_dps = v,
            Measure::Tk => r.tk_s = v,
            Measure::Td => r.td_s = v,
        }
    }

    /// Clinical scores that are dropped from correlation analysis when constant.
    pub fn excluded_when_constant(self) -> bool {
        matches!(self, Measure::Emnsa | Measure::FmaHw)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn column(records: &[ParticipantRecord], m: Measure) -> Vec<f64> {
    records.iter().map(|r| m.value(r)).collect()
}

pub const CSV_HEADER: [&str; 20] = [
    "pid",
    "age",
    "gender",
    "handedness_li",
    "emnsa",
    "fma_hw",
    "moca",
    "neutral_deg",
    "crom_deg",
    "meg_deg",
    "jndp_deg",
    "kp_pct",
    "jndv_dps",
    "kv_pct",
    "jndt_mnm",
    "kt_pct",
    "mep_deg",
    "mev_dps",
    "tk_s",
    "td_s",
];

/// Reads a participant table. Every schema column must be present; the first
/// missing one is named in the error.
pub fn read_participants<R: Read>(reader: R) -> Result<Vec<ParticipantRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Parse { line: 1, message: "participant table is empty".into() });
    }
    for col in CSV_HEADER {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Schema(col.to_string()));
        }
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<ParticipantRecord>().enumerate() {
        // header is line 1
        let rec = row.map_err(|e| Error::Parse { line: i + 2, message: e.to_string() })?;
        out.push(rec);
    }
    if out.is_empty() {
        return Err(Error::Parse { line: 1, message: "participant table has no rows".into() });
    }
    Ok(out)
}

pub fn load_participants(path: impl AsRef<Path>) -> Result<Vec<ParticipantRecord>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_participants(f)
}

pub fn write_participants<W: Write>(writer: W, records: &[ParticipantRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// The eleven-participant dataset shipped with the crate.
pub fn bundled_participants() -> Vec<ParticipantRecord> {
    read_participants(BUNDLED_PARTICIPANTS.as_bytes()).expect("bundled fixture is well-formed")
}

pub fn bundled_participants_csv() -> &'static str {
    BUNDLED_PARTICIPANTS
}

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Outcome of a verification harness.
///
/// `worst` is signed so that positive values point toward failure: a check
/// passes when `worst <= tolerance`. `witness` names the coordinates of the
/// worst case (a time, a radius, point indices ...).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Report {
    pub check: String,
    pub passed: bool,
    pub tolerance: f64,
    pub checked: usize,
    pub worst: f64,
    pub witness: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(check: &str, tolerance: f64) -> Self {
        Report {
            check: check.to_string(),
            passed: true,
            tolerance,
            checked: 0,
            worst: f64::NEG_INFINITY,
            witness: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records one evaluated defect. The witness is replaced whenever the
    /// defect is the largest seen so far (first occurrence wins ties).
    pub fn observe(&mut self, defect: f64, witness: &[(&str, f64)]) {
        self.checked += 1;
        if defect > self.worst || self.checked == 1 {
            self.worst = defect;
            self.witness = witness.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        }
        if !(defect <= self.tolerance) {
            self.passed = false;
        }
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.passed = false;
        self.notes.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn witness_value(&self, key: &str) -> Option<f64> {
        self.witness.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Folds another report into this one, keeping the worse witness.
    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        if other.worst > self.worst {
            self.worst = other.worst;
            self.witness = other.witness;
        }
        self.passed &= other.passed;
        self.notes.extend(other.notes);
    }
}

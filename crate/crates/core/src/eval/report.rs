//! Per-sample evaluation report rows.

use crate::error::Result;
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub sample_id: String,
    pub nme: f64,
    /// Normalization factor the error was divided by.
    pub d: f64,
    /// Whether rigid alignment was applied before measuring.
    pub aligned: bool,
}

/// `sample_id,nme,d,aligned` rows under a header.
pub fn write_report_csv<W: Write>(w: &mut W, reports: &[SampleReport]) -> Result<()> {
    writeln!(w, "sample_id,nme,d,aligned")?;
    for r in reports {
        writeln!(w, "{},{},{},{}", r.sample_id, r.nme, r.d, r.aligned)?;
    }
    Ok(())
}

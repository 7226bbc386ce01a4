//! Gap comparison tables.

use crate::error::ReportError;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub id: String,
    /// Percent gaps.
    pub gap_reference: f64,
    pub gap_heuristic: f64,
}

impl ResultRow {
    pub fn new(id: impl Into<String>, gap_reference: f64, gap_heuristic: f64) -> Self {
        ResultRow { id: id.into(), gap_reference, gap_heuristic }
    }

    /// 100 (heu − ref) / ref, cut to two decimals toward zero.
    pub fn delta_gap(&self) -> Result<f64, ReportError> {
        if !(self.gap_reference > 0.0) {
            return Err(ReportError::NonPositiveReference { id: self.id.clone(), gap: self.gap_reference });
        }
        Ok(two_decimals(100.0 * (self.gap_heuristic - self.gap_reference) / self.gap_reference))
    }
}

/// Truncation toward zero at the second decimal. A relative guard keeps
/// values such as 0.29 * 100 = 28.999999999999996 from losing a cent.
pub fn two_decimals(x: f64) -> f64 {
    let scaled = x * 100.0;
    let nudged = scaled + scaled.signum() * 1e-9 * scaled.abs().max(1.0);
    nudged.trunc() / 100.0 + 0.0
}

/// Aligned text table (or CSV) with an average ΔGap footer.
pub fn report(rows: &[ResultRow], csv: bool) -> Result<String, ReportError> {
    let deltas = rows.iter().map(ResultRow::delta_gap).collect::<Result<Vec<_>, _>>()?;
    let avg = if deltas.is_empty() { 0.0 } else { deltas.iter().sum::<f64>() / deltas.len() as f64 };
    let mut out = String::new();
    if csv {
        out.push_str("id,gap_ref_pct,gap_heu_pct,delta_gap_pct\n");
        for (r, d) in rows.iter().zip(&deltas) {
            out.push_str(&format!("{},{:.2},{:.2},{:.2}\n", r.id, r.gap_reference, r.gap_heuristic, d));
        }
        out.push_str(&format!("average,,,{avg:.2}\n"));
        return Ok(out);
    }
    let width = rows.iter().map(|r| r.id.len()).chain([7]).max().unwrap();
    let header = format!("{:<width$}  {:>9}  {:>9}  {:>8}", "ID", "Gap-Ref%", "Gap-Heu%", "ΔGap%");
    out.push_str(&header);
    out.push('\n');
    out.push_str(&"-".repeat(width + 34));
    out.push('\n');
    for (r, d) in rows.iter().zip(&deltas) {
        out.push_str(&format!(
            "{:<width$}  {:>9.2}  {:>9.2}  {:>8.2}\n",
            r.id, r.gap_reference, r.gap_heuristic, d
        ));
    }
    out.push_str(&"-".repeat(width + 34));
    out.push('\n');
    out.push_str(&format!("{:<width$}  {:>9}  {:>9}  {:>8.2}\n", "average", "", "", avg));
    Ok(out)
}

//! CSV output. Numbers are written with 17 significant digits; header names
//! are part of the interface.

use std::io::{self, Write};

use crate::flow::{FlowDiagnostics, FlowState};
use crate::jet::Jet;
use crate::scalar::{sigmoid, Real};
use crate::soliton::AsymptoticsReport;

fn num<T: Real>(v: T) -> String {
    format!("{v:.16e}")
}

/// `x,kappa,kappa_prime,kappa_second`.
pub fn write_soliton_csv<T: Real>(mut w: impl Write, grid: &[T], jets: &[Jet<T>]) -> io::Result<()> {
    writeln!(w, "x,kappa,kappa_prime,kappa_second")?;
    for (&x, j) in grid.iter().zip(jets) {
        writeln!(w, "{},{},{},{}", num(x), num(j.v), num(j.d1), num(j.d2))?;
    }
    Ok(())
}

/// `label,x,value,pass,description`.
pub fn write_asymptotics_csv<T: Real>(mut w: impl Write, report: &AsymptoticsReport<T>) -> io::Result<()> {
    writeln!(w, "label,x,value,pass,description")?;
    for item in &report.items {
        writeln!(w, "{},{},{},{},\"{}\"", item.label, num(item.x), num(item.value), item.pass, item.description)?;
    }
    Ok(())
}

/// `t,C_low,C_high,shift,aligned_sup_error,torsion_norm`.
pub fn write_trajectory_csv<T: Real>(mut w: impl Write, records: &[FlowDiagnostics<T>]) -> io::Result<()> {
    writeln!(w, "t,C_low,C_high,shift,aligned_sup_error,torsion_norm")?;
    for d in records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            num(d.t),
            num(d.envelope.0),
            num(d.envelope.1),
            num(d.shift),
            num(d.aligned_sup_error),
            num(d.torsion_norm)
        )?;
    }
    Ok(())
}

/// `x,k,theta`.
pub fn write_snapshot_csv<T: Real>(mut w: impl Write, state: &FlowState<T>) -> io::Result<()> {
    writeln!(w, "x,k,theta")?;
    for (&x, &th) in state.grid().iter().zip(&state.theta) {
        writeln!(w, "{},{},{}", num(x), num(sigmoid(th)), num(th))?;
    }
    Ok(())
}

/// `quantity,value`.
pub fn write_summary_csv<T: Real>(mut w: impl Write, rows: &[(&str, T)]) -> io::Result<()> {
    writeln!(w, "quantity,value")?;
    for (name, v) in rows {
        writeln!(w, "{name},{}", num(*v))?;
    }
    Ok(())
}

/// One row of a verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow<T> {
    pub check: String,
    pub point: String,
    pub residual: T,
    pub pass: bool,
}

/// `check,point,residual,pass`.
pub fn write_verify_csv<T: Real>(mut w: impl Write, rows: &[VerifyRow<T>]) -> io::Result<()> {
    writeln!(w, "check,point,residual,pass")?;
    for r in rows {
        writeln!(w, "{},\"{}\",{},{}", r.check, r.point, num(r.residual), r.pass)?;
    }
    Ok(())
}

//! CSV and JSON writers. All numbers are serialized with 17 significant
//! digits so output round-trips to the exact double.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use capfluid::eulerian1d::{EulerianAudit, EulerianField};
use capfluid::lagrangian1d::{LagrangianAudit, LagrangianField};
use capfluid::sweep::SweepRow;
use capfluid::verify::fmt_f64;

/// Either a buffered file or stdout.
pub fn open_sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn write_dispersion_csv(mut out: impl Write, rows: &[SweepRow]) -> io::Result<()> {
    write!(out, "k1,k2,k3,k_abs")?;
    for i in 1..=8 {
        write!(out, ",lambda_{i}")?;
    }
    writeln!(out, ",max_imag,max_residual")?;
    for row in rows {
        write!(
            out,
            "{},{},{},{}",
            fmt_f64(row.k[0]),
            fmt_f64(row.k[1]),
            fmt_f64(row.k[2]),
            fmt_f64(row.k_abs)
        )?;
        for l in row.lambdas {
            write!(out, ",{}", fmt_f64(l))?;
        }
        writeln!(
            out,
            ",{},{}",
            fmt_f64(row.max_imag),
            fmt_f64(row.max_residual)
        )?;
    }
    Ok(())
}

pub fn write_dispersion_json(mut out: impl Write, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "[")?;
    for (i, row) in rows.iter().enumerate() {
        write!(
            out,
            "  {{\"k\": [{}, {}, {}], \"k_abs\": {}, \"lambdas\": [",
            fmt_f64(row.k[0]),
            fmt_f64(row.k[1]),
            fmt_f64(row.k[2]),
            fmt_f64(row.k_abs)
        )?;
        for (j, l) in row.lambdas.iter().enumerate() {
            write!(out, "{}{}", fmt_f64(*l), if j < 7 { ", " } else { "" })?;
        }
        write!(
            out,
            "], \"max_imag\": {}, \"max_residual\": {}}}",
            fmt_f64(row.max_imag),
            fmt_f64(row.max_residual)
        )?;
        writeln!(out, "{}", if i + 1 < rows.len() { "," } else { "" })?;
    }
    writeln!(out, "]")?;
    Ok(())
}

pub fn write_lagrangian_audits(mut out: impl Write, audits: &[LagrangianAudit]) -> io::Result<()> {
    writeln!(out, "t,energy,constraint_norm,min_v")?;
    for a in audits {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(a.t),
            fmt_f64(a.energy),
            fmt_f64(a.constraint_norm),
            fmt_f64(a.min_v)
        )?;
    }
    Ok(())
}

pub fn write_eulerian_audits(mut out: impl Write, audits: &[EulerianAudit]) -> io::Result<()> {
    writeln!(out, "t,energy,momentum,constraint_norm,min_rho")?;
    for a in audits {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(a.t),
            fmt_f64(a.energy),
            fmt_f64(a.momentum),
            fmt_f64(a.constraint_norm),
            fmt_f64(a.min_rho)
        )?;
    }
    Ok(())
}

/// `path` stem plus `_snap_NNNNNN.csv`.
pub fn snapshot_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let mut p = base.to_path_buf();
    p.set_file_name(format!("{stem}_snap_{index:06}.csv"));
    p
}

pub fn write_lagrangian_snapshot(mut out: impl Write, field: &LagrangianField) -> io::Result<()> {
    writeln!(out, "z,v,w,u")?;
    for i in 0..field.n() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(i as f64 * field.dz()),
            fmt_f64(field.v[i]),
            fmt_f64(field.w[i]),
            fmt_f64(field.u[i])
        )?;
    }
    Ok(())
}

pub fn write_eulerian_snapshot(mut out: impl Write, field: &EulerianField) -> io::Result<()> {
    writeln!(out, "x,rho,eta,j,w")?;
    for i in 0..field.n() {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(i as f64 * field.dx()),
            fmt_f64(field.rho[i]),
            fmt_f64(field.eta[i]),
            fmt_f64(field.j[i]),
            fmt_f64(field.w[i])
        )?;
    }
    Ok(())
}

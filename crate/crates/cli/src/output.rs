use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Shortest round-trip representation; exponent form only for very large or small values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv encoding failed: {e}")))
}

/// Writes `dir/name` through a temporary file in the same directory and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", dir.join(name).display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.flush().map_err(io)?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| io(e.error))?;
    Ok(target)
}

pub fn write_csv(dir: &Path, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    write_atomic(dir, name, &csv_bytes(header, rows)?)
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Companion matplotlib script for whichever CSVs exist next to it.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plots the CSV files written by andloc in this directory."""
import csv
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(name):
    path = os.path.join(here, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def col(rows, key):
    return [float(r[key]) for r in rows]


panels = []
lyap = load("lyapunov.csv")
if lyap:
    panels.append(("Lyapunov exponents per cell", lambda ax: [
        ax.plot(col(lyap, "E"), col(lyap, k), marker=".", label=k)
        for k in lyap[0] if k.startswith("gamma_")
    ] and ax.legend()))
ids = load("ids.csv")
if ids:
    panels.append(("Integrated density of states", lambda ax: ax.errorbar(
        col(ids, "E"), col(ids, "N_hat"), yerr=col(ids, "stderr"), marker=".")))
decay = load("decay.csv")
if decay:
    panels.append(("Fitted decay rates", lambda ax: ax.plot(
        col(decay, "eigenvalue"), col(decay, "fitted_rate"), "o")))
cert = load("certify.csv")
if cert:
    panels.append(("Closure dimension", lambda ax: ax.step(
        col(cert, "E"), col(cert, "closure_dim"), where="mid")))

if not panels:
    sys.exit("no andloc CSV files found next to this script")
fig, axes = plt.subplots(len(panels), 1, figsize=(7, 3 * len(panels)), squeeze=False)
for ax, (title, draw) in zip(axes[:, 0], panels):
    draw(ax)
    ax.set_title(title)
    ax.set_xlabel("E")
fig.tight_layout()
fig.savefig(os.path.join(here, "andloc.png"), dpi=120)
"#;

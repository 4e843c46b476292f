//! CSV emission.
//!
//! Every value is written with `{:.11e}` (12 significant digits), so output is
//! bit-stable for identical input.

use std::io::{self, Write};

use gausslind_core::{Sample, Trajectory};

pub const COLUMNS: [&str; 10] = [
    "t", "D", "S", "sigma_qq", "sigma_qp", "sigma_pp", "r", "nu", "mean_q", "mean_p",
];

fn fields(s: &Sample) -> [f64; 10] {
    let st = &s.state;
    [s.t, s.d, s.s, st.s_qq, st.s_qp, st.s_pp, s.r, s.nu, st.mean_q, st.mean_p]
}

pub fn header(paired: bool) -> String {
    let mut cols: Vec<String> = COLUMNS.iter().map(|c| c.to_string()).collect();
    if paired {
        cols.extend(COLUMNS[1..].iter().map(|c| format!("{c}_oracle")));
    }
    cols.join(",")
}

fn write_row(out: &mut impl Write, values: impl Iterator<Item = f64>) -> io::Result<()> {
    let row: Vec<String> = values.map(|v| format!("{v:.11e}")).collect();
    out.write_all(row.join(",").as_bytes())?;
    out.write_all(b"\n")
}

pub fn write_trajectory(out: &mut impl Write, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "{}", header(false))?;
    for s in traj.samples() {
        write_row(out, fields(s).into_iter())?;
    }
    Ok(())
}

/// Chord columns followed by the oracle's, sample by sample. Both
/// trajectories must share their time grid.
pub fn write_paired(out: &mut impl Write, chord: &Trajectory, oracle: &Trajectory) -> io::Result<()> {
    writeln!(out, "{}", header(true))?;
    for (a, b) in chord.samples().iter().zip(oracle.samples()) {
        write_row(out, fields(a).into_iter().chain(fields(b).into_iter().skip(1)))?;
    }
    Ok(())
}

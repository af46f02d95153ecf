//! CSV and gnuplot output for run logs.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so logs compare bit-for-bit.

use super::{Record, RunLog};
use std::io::{self, Write};

pub const CSV_COLUMNS: [&str; 26] = [
    "t_s",
    "x1",
    "x2",
    "x3",
    "v1",
    "v2",
    "v3",
    "r11",
    "r12",
    "r13",
    "r21",
    "r22",
    "r23",
    "r31",
    "r32",
    "r33",
    "alpha_rad",
    "beta_rad",
    "T_N",
    "w1",
    "w2",
    "w3",
    "vtilde_norm",
    "theta_tilde_rad",
    "V",
    "fp_norm",
];

fn row(r: &Record) -> Vec<String> {
    let s = &r.state;
    let m = s.attitude.matrix();
    let mut out = Vec::with_capacity(CSV_COLUMNS.len());
    out.push(r.t);
    out.extend(s.position.iter());
    out.extend(s.velocity.iter());
    for i in 0..3 {
        for j in 0..3 {
            out.push(m[(i, j)]);
        }
    }
    out.extend([r.alpha, r.beta, r.thrust]);
    out.extend(r.omega.iter());
    let l = &r.lyapunov;
    out.extend([l.vtilde_norm, l.theta_tilde, l.v, l.fp_norm]);
    out.iter().map(f64::to_string).collect()
}

pub fn write_csv<W: Write>(log: &RunLog, writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for r in &log.records {
        w.write_record(row(r))?;
    }
    w.flush()
}

pub fn csv_string(log: &RunLog) -> String {
    let mut buf = Vec::new();
    write_csv(log, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// A gnuplot script plotting velocity error, attitude error, `V` and the
/// commands from `csv_name`.
pub fn gnuplot_script(csv_name: &str, title: &str) -> String {
    let col = |name: &str| CSV_COLUMNS.iter().position(|c| *c == name).unwrap() + 1;
    let title = title.replace('"', "'");
    format!(
        r#"set datafile separator ","
set key autotitle columnhead
set terminal pngcairo size 1200,900
set output "{stem}.png"
set multiplot layout 2,2 title "{title}"
set xlabel "t [s]"
set ylabel "|v~| [m/s]"
set logscale y
plot "{csv_name}" using {t}:{vt} with lines
set ylabel "theta~ [deg]"
unset logscale y
plot "{csv_name}" using {t}:(${th}*180/pi) with lines
set ylabel "V"
set logscale y
plot "{csv_name}" using {t}:{v} with lines
unset logscale y
set ylabel "T [N], w [rad/s]"
plot "{csv_name}" using {t}:{thrust} with lines, "" using {t}:{w1} with lines, "" using {t}:{w2} with lines
unset multiplot
"#,
        stem = csv_name.trim_end_matches(".csv"),
        t = col("t_s"),
        vt = col("vtilde_norm"),
        th = col("theta_tilde_rad"),
        v = col("V"),
        thrust = col("T_N"),
        w1 = col("w1"),
        w2 = col("w2"),
    )
}

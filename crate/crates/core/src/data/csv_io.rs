//! Trial CSV files.
//!
//! Header `t,theta_l_hip,theta_r_hip,theta_l_knee,theta_r_knee,theta_b,f_left_y,f_right_y`,
//! one row per sample, LF line endings, values written with 17 significant digits.
//! User and condition come from the file stem `<user>_<condition>.csv`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::data::trial::{Condition, GrfSample, KinematicSample, Trial};
use crate::error::{Error, Result};

pub const TRIAL_COLUMNS: [&str; 8] = [
    "t",
    "theta_l_hip",
    "theta_r_hip",
    "theta_l_knee",
    "theta_r_knee",
    "theta_b",
    "f_left_y",
    "f_right_y",
];

/// Round-trip formatting with exactly 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// File name `<user>_<condition>.csv` used for a trial.
pub fn trial_file_name(trial: &Trial) -> String {
    format!("{}_{}.csv", trial.user_id, trial.condition)
}

/// Recovers user id and condition from a file stem; unknown suffixes map to
/// the whole stem as user id and the transparent condition.
pub fn parse_trial_stem(stem: &str) -> (String, Condition) {
    if let Some((user, cond)) = stem.rsplit_once('_') {
        if let Ok(c) = cond.parse() {
            return (user.to_string(), c);
        }
    }
    (stem.to_string(), Condition::Transparent)
}

pub fn write_trial_csv<W: Write>(trial: &Trial, mut w: W) -> Result<()> {
    writeln!(w, "{}", TRIAL_COLUMNS.join(","))?;
    for (k, g) in trial.kinematics.iter().zip(&trial.grf) {
        let mut line = fmt_f64(k.t);
        for v in k.theta.iter().chain([&g.f_left_y, &g.f_right_y]) {
            line.push(',');
            line.push_str(&fmt_f64(*v));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trial_csv(trial: &Trial, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    write_trial_csv(trial, BufWriter::new(file))
}

pub fn load_trial_csv(path: impl AsRef<Path>) -> Result<Trial> {
    let path = path.as_ref();
    let parse_err = |line: u64, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| parse_err(0, e.to_string()))?;
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let mut index = [0usize; 8];
    for (slot, name) in index.iter_mut().zip(TRIAL_COLUMNS) {
        *slot = headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: name.to_string(),
        })?;
    }

    let mut kinematics = Vec::new();
    let mut grf = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut vals = [0.0; 8];
        for ((v, &col), name) in vals.iter_mut().zip(&index).zip(TRIAL_COLUMNS) {
            let field = record.get(col).ok_or_else(|| parse_err(line, format!("missing field `{name}`")))?;
            *v = field
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("`{name}` is not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("`{name}` is not finite")));
            }
        }
        if let Some(prev) = kinematics.last().map(|k: &KinematicSample| k.t) {
            if vals[0] <= prev {
                return Err(parse_err(line, format!("time {} does not increase (previous {prev})", vals[0])));
            }
        }
        if vals[6] < 0.0 || vals[7] < 0.0 {
            return Err(parse_err(line, "negative vertical force".into()));
        }
        let t = vals[0];
        let sample = KinematicSample {
            t,
            theta: [vals[1], vals[2], vals[3], vals[4], vals[5]],
        };
        sample.validate().map_err(|e| parse_err(line, e.to_string()))?;
        kinematics.push(sample);
        grf.push(GrfSample {
            t,
            f_left_y: vals[6],
            f_right_y: vals[7],
        });
    }
    if kinematics.len() < 2 {
        return Err(parse_err(0, "a trial needs at least two samples".into()));
    }
    let span = kinematics.last().unwrap().t - kinematics[0].t;
    let mut rate = (kinematics.len() - 1) as f64 / span;
    if (rate - rate.round()).abs() < 1e-6 {
        rate = rate.round();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trial");
    let (user, condition) = parse_trial_stem(stem);
    Trial::new(user, condition, rate, kinematics, grf).map_err(|e| parse_err(0, e.to_string()))
}

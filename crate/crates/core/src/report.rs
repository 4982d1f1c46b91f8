//! CSV and text output for a finished experiment.
//!
//! `rounds.csv` holds one row per training round, `summary.csv` one row per
//! job and `report.txt` the per-scheduler mean and sample standard deviation
//! of the average JCT. Floats carry six significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::SchedulerName;
use crate::engine::{mean, JobStatus};
use crate::error::Result;
use crate::experiment::Replication;

pub const ROUNDS_HEADER: [&str; 9] = [
    "scheduler",
    "seed",
    "job_id",
    "round",
    "selected_count",
    "round_duration_s",
    "cumulative_time_s",
    "loss",
    "accuracy",
];

pub const SUMMARY_HEADER: [&str; 7] = [
    "scheduler",
    "seed",
    "job_id",
    "jct_s",
    "time_to_target_s",
    "final_accuracy",
    "status",
];

/// Six significant digits with trailing zeros kept; scientific notation
/// outside `1e-5 <= |x| < 1e6`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if !(-5..6).contains(&exp) {
        return sci;
    }
    format!("{x:.prec$}", prec = (5 - exp) as usize)
}

fn status_text(status: &JobStatus) -> String {
    match status {
        JobStatus::Ok => "ok".to_string(),
        JobStatus::Failed(reason) => format!("failed: {reason}"),
    }
}

pub fn write_results(results: &[Replication], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut rounds = csv::Writer::from_path(dir.join("rounds.csv"))?;
    rounds.write_record(ROUNDS_HEADER)?;
    let mut summary = csv::Writer::from_path(dir.join("summary.csv"))?;
    summary.write_record(SUMMARY_HEADER)?;

    for rep in results {
        let name = rep.scheduler.as_str();
        let seed = rep.seed.to_string();
        match &rep.outcome {
            Ok(sim) => {
                for job in &sim.jobs {
                    let id = job.job_id.to_string();
                    for r in &job.rounds {
                        rounds.write_record([
                            name,
                            &seed,
                            &id,
                            &r.round.to_string(),
                            &r.selected.len().to_string(),
                            &format_float(r.round_duration),
                            &format_float(r.cumulative_time),
                            &format_float(r.global_loss),
                            &format_float(r.global_accuracy),
                        ])?;
                    }
                    summary.write_record([
                        name,
                        &seed,
                        &id,
                        &format_float(job.jct),
                        &job.time_to_target.map_or_else(|| "NA".to_string(), format_float),
                        &job.final_accuracy().map_or_else(|| "NA".to_string(), format_float),
                        &status_text(&job.status),
                    ])?;
                }
            }
            Err(e) => {
                summary.write_record([name, &seed, "NA", "NA", "NA", "NA", &format!("error: {e}")])?;
            }
        }
    }
    rounds.flush()?;
    summary.flush()?;

    let mut text = fs::File::create(dir.join("report.txt"))?;
    text.write_all(render_report(results).as_bytes())?;
    Ok(())
}

/// Sample standard deviation; `None` with fewer than two values.
pub fn sample_stddev(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

pub fn render_report(results: &[Replication]) -> String {
    let mut groups: BTreeMap<SchedulerName, (Vec<f64>, usize)> = BTreeMap::new();
    for rep in results {
        let entry = groups.entry(rep.scheduler).or_default();
        match &rep.outcome {
            Ok(sim) if rep.is_ok() => entry.0.push(sim.average_jct),
            _ => entry.1 += 1,
        }
    }
    let mut out = String::from("average JCT per scheduler (mean ± sample stddev over seeds)\n");
    for (name, (jcts, failed)) in &groups {
        let line = if jcts.is_empty() {
            format!("{name:<11} no successful replications")
        } else {
            let sd = sample_stddev(jcts).map_or_else(|| "NA".to_string(), format_float);
            format!("{name:<11} {} ± {sd} s  (n={})", format_float(mean(jcts)), jcts.len())
        };
        out.push_str(&line);
        if *failed > 0 {
            out.push_str(&format!("  failed={failed}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_float(120.5), "120.500");
        assert_eq!(format_float(0.25), "0.250000");
        assert_eq!(format_float(1.0), "1.00000");
        assert_eq!(format_float(123456.4), "123456");
        assert_eq!(format_float(1234567.0), "1.23457e6");
        assert_eq!(format_float(0.000012345), "0.0000123450");
        assert_eq!(format_float(0.0000012345), "1.23450e-6");
        assert_eq!(format_float(0.0001), "0.000100000");
        assert_eq!(format_float(-2.5), "-2.50000");
        assert_eq!(format_float(999999.7), "1.00000e6");
    }

    #[test]
    fn stddev_of_known_values() {
        assert_eq!(sample_stddev(&[3.0]), None);
        let sd = sample_stddev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((sd - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_results_give_header_only_files() {
        let dir = tempfile::tempdir().unwrap();
        write_results(&[], dir.path()).unwrap();
        let rounds = fs::read_to_string(dir.path().join("rounds.csv")).unwrap();
        assert_eq!(rounds.lines().count(), 1);
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.trim_end(), SUMMARY_HEADER.join(","));
    }
}

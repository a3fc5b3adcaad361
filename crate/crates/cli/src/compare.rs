//! Mann-Whitney comparison of two `runs.csv` files.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dams::stats::{mann_whitney, summarize, MannWhitney, SampleSummary, SIGNIFICANCE_LEVEL};

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub label_a: String,
    pub label_b: String,
    pub summary_a: SampleSummary,
    pub summary_b: SampleSummary,
    pub test: MannWhitney,
}

impl CompareReport {
    pub fn from_samples(label_a: &str, a: &[f64], label_b: &str, b: &[f64]) -> Result<Self> {
        Ok(CompareReport {
            label_a: label_a.into(),
            label_b: label_b.into(),
            summary_a: summarize(a)?,
            summary_b: summarize(b)?,
            test: mann_whitney(a, b)?,
        })
    }

    pub fn verdict(&self) -> String {
        if !self.test.significant() {
            return "not significant".into();
        }
        let lower = if self.summary_a.median < self.summary_b.median
            || (self.summary_a.median == self.summary_b.median
                && self.summary_a.mean < self.summary_b.mean)
        {
            &self.label_a
        } else {
            &self.label_b
        };
        format!("significant, {lower} lower")
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, s) in [
            (&self.label_a, &self.summary_a),
            (&self.label_b, &self.summary_b),
        ] {
            writeln!(
                f,
                "{label}: n={} mean={:.1} std={:.1} median={} min={} max={}",
                s.count, s.mean, s.std_dev, s.median, s.min, s.max
            )?;
        }
        writeln!(
            f,
            "U={} p={:.3e} ({:?})",
            self.test.u, self.test.p_two_sided, self.test.method
        )?;
        write!(f, "verdict at {SIGNIFICANCE_LEVEL}: {}", self.verdict())
    }
}

/// Values of the `rounds` column.
pub fn read_rounds(path: &Path) -> Result<Vec<f64>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let col = reader
        .headers()?
        .iter()
        .position(|h| h == "rounds")
        .with_context(|| format!("{} has no 'rounds' column", path.display()))?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let v = rec.get(col).unwrap_or_default();
        out.push(v.parse::<f64>().with_context(|| {
            format!("{} row {}: bad rounds value '{v}'", path.display(), i + 2)
        })?);
    }
    if out.is_empty() {
        bail!("{} has no rows", path.display());
    }
    Ok(out)
}

fn label(path: &Path) -> String {
    path.parent()
        .and_then(|p| p.file_name())
        .filter(|_| path.file_stem().is_some_and(|s| s == "runs"))
        .or_else(|| path.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn compare_files(a: &Path, b: &Path) -> Result<CompareReport> {
    let (ra, rb) = (read_rounds(a)?, read_rounds(b)?);
    CompareReport::from_samples(&label(a), &ra, &label(b), &rb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_prefer_directory_for_runs_csv() {
        assert_eq!(label(Path::new("out/sbm/runs.csv")), "sbm");
        assert_eq!(label(Path::new("out/random.csv")), "random");
    }

    #[test]
    fn verdicts() {
        let a: Vec<f64> = (0..20).map(f64::from).collect();
        let b: Vec<f64> = (50..70).map(f64::from).collect();
        let r = CompareReport::from_samples("sbm", &a, "rnd", &b).unwrap();
        assert_eq!(r.verdict(), "significant, sbm lower");
        let r = CompareReport::from_samples("rnd", &b, "sbm", &a).unwrap();
        assert_eq!(r.verdict(), "significant, sbm lower");
        let r = CompareReport::from_samples("x", &a, "y", &a).unwrap();
        assert_eq!(r.verdict(), "not significant");
        assert!(r.to_string().contains("verdict"));
    }
}

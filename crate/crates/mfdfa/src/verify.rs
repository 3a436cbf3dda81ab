//! Comparison of a report against the published INR exchange-rate widths.

use crate::ingest::find_column;
use crate::pipeline::{AnalysisReport, SummaryRow};

/// Published widths: (series, original, shuffled, phase randomized).
pub const PUBLISHED_WIDTHS: [(&str, f64, f64, f64); 4] = [
    ("USD", 0.73166, 0.3351, 0.061393),
    ("GBP", 0.30326, 0.21767, 0.10879),
    ("Euro", 0.23831, 0.14886, 0.10898),
    ("Yen", 0.26528, 0.21841, 0.070942),
];

/// Absolute tolerance on original-series widths.
pub const WIDTH_TOLERANCE: f64 = 0.08;

/// Expected order of original widths, strongest first.
pub const WIDTH_ORDER: [&str; 4] = ["USD", "GBP", "Yen", "Euro"];

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub criterion: String,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(criterion: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { criterion: criterion.into(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!("[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.criterion, self.detail)
    }
}

fn row<'a>(report: &'a AnalysisReport, currency: &str) -> Option<&'a SummaryRow> {
    report
        .summary
        .iter()
        .find(|r| find_column(std::slice::from_ref(&r.series), currency).is_some())
}

fn std_of(report: &AnalysisReport, series: &str, kind: crate::surrogates::SurrogateKind) -> f64 {
    report.series(series).and_then(|s| s.surrogate(kind)).map_or(0.0, |e| e.std_width)
}

/// Original widths within [`WIDTH_TOLERANCE`] of the published values.
pub fn check_widths(report: &AnalysisReport) -> Vec<Outcome> {
    PUBLISHED_WIDTHS
        .iter()
        .map(|&(name, published, _, _)| match row(report, name) {
            Some(r) => Outcome::new(
                format!("{name} original width"),
                (r.original - published).abs() <= WIDTH_TOLERANCE,
                format!("{:.5} vs published {published} (±{WIDTH_TOLERANCE})", r.original),
            ),
            None => Outcome::new(format!("{name} original width"), false, "series missing from report".into()),
        })
        .collect()
}

/// Original widths ordered USD > GBP > Yen > Euro, strictly.
pub fn check_ordering(report: &AnalysisReport) -> Outcome {
    let widths: Option<Vec<f64>> = WIDTH_ORDER.iter().map(|n| row(report, n).map(|r| r.original)).collect();
    match widths {
        Some(w) => Outcome::new(
            "width ordering USD > GBP > Yen > Euro",
            w.windows(2).all(|p| p[0] > p[1]),
            format!("{:.5} / {:.5} / {:.5} / {:.5}", w[0], w[1], w[2], w[3]),
        ),
        None => Outcome::new("width ordering USD > GBP > Yen > Euro", false, "series missing".into()),
    }
}

/// Surrogate widths below the original, and for USD the published pattern
/// phase < shuffled / 2 < shuffled < original. Each inequality may be
/// missed by at most twice the relevant ensemble standard deviation.
pub fn check_attribution(report: &AnalysisReport) -> Vec<Outcome> {
    use crate::surrogates::SurrogateKind::{PhaseRandomize, Shuffle};
    let mut out = Vec::new();
    for &(name, ..) in &PUBLISHED_WIDTHS {
        let criterion = format!("{name} surrogates below original");
        let Some(r) = row(report, name) else {
            out.push(Outcome::new(criterion, false, "series missing".into()));
            continue;
        };
        let (Some(sh), Some(ph)) = (r.shuffled, r.phase_randomized) else {
            out.push(Outcome::new(criterion, false, "both surrogate kinds required".into()));
            continue;
        };
        let sh_sd = std_of(report, &r.series, Shuffle);
        let ph_sd = std_of(report, &r.series, PhaseRandomize);
        out.push(Outcome::new(
            criterion,
            sh < r.original + 2.0 * sh_sd && ph < r.original + 2.0 * ph_sd,
            format!("original {:.5}, shuffled {sh:.5} ± {sh_sd:.5}, phase {ph:.5} ± {ph_sd:.5}", r.original),
        ));
        if name == "USD" {
            out.push(Outcome::new(
                "USD phase < shuffled/2 < shuffled < original",
                ph < 0.5 * sh + 2.0 * ph_sd && sh < r.original + 2.0 * sh_sd,
                format!("{ph:.5} < {:.5} < {sh:.5} < {:.5}", 0.5 * sh, r.original),
            ));
        }
    }
    out
}

pub fn verify(report: &AnalysisReport) -> Vec<Outcome> {
    let mut out = check_widths(report);
    out.push(check_ordering(report));
    out.extend(check_attribution(report));
    out
}

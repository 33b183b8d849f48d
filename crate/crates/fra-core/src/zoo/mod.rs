//! The six FRA-Dia architectures and the ELM baseline.

mod elm;

pub use elm::{elm_fit, ElmModel, DEFAULT_HIDDEN, DEFAULT_RIDGE};

use crate::data::GRID_POINTS;
use crate::error::{Error, Result};
use crate::nn::ModelSpec;

/// The named architectures, sized by their learnable-layer depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// 3 learnable layers.
    Dialight,
    /// 5 learnable layers.
    Diagnoser,
    /// 7 learnable layers.
    DiaL,
    /// 7 learnable layers, dropout after layer 4.
    DiaLD,
    /// 10 learnable layers.
    DiaXl,
    /// 10 learnable layers, dropout after layers 2 and 4.
    DiaXlD,
}

impl Architecture {
    pub const ALL: [Architecture; 6] = [
        Architecture::Dialight,
        Architecture::Diagnoser,
        Architecture::DiaL,
        Architecture::DiaLD,
        Architecture::DiaXl,
        Architecture::DiaXlD,
    ];

    /// Hidden-layer widths at scale 1. The published totals pin these only
    /// up to the parameter count; the widths chosen here land each total
    /// within a few percent of its target.
    fn hidden_widths(self) -> Vec<usize> {
        match self {
            Architecture::Dialight => vec![900, 220],
            Architecture::Diagnoser => vec![2100; 4],
            Architecture::DiaL | Architecture::DiaLD => vec![3800; 6],
            Architecture::DiaXl | Architecture::DiaXlD => vec![1900; 9],
        }
    }

    /// 1-based hidden layers followed by dropout during training.
    pub fn dropout_after(self) -> Vec<usize> {
        match self {
            Architecture::DiaLD => vec![4],
            Architecture::DiaXlD => vec![2, 4],
            _ => Vec::new(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Dialight => "FRA-Dialight",
            Architecture::Diagnoser => "FRA-Diagnoser",
            Architecture::DiaL => "FRA-DiaL",
            Architecture::DiaLD => "FRA-DiaL-D",
            Architecture::DiaXl => "FRA-DiaXL",
            Architecture::DiaXlD => "FRA-DiaXL-D",
        }
    }

    /// Case-insensitive parse; the "FRA-" prefix is optional.
    pub fn parse(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let stripped = lower.strip_prefix("fra-").unwrap_or(&lower);
        Ok(match stripped {
            "dialight" => Architecture::Dialight,
            "diagnoser" => Architecture::Diagnoser,
            "dial" => Architecture::DiaL,
            "dial-d" => Architecture::DiaLD,
            "diaxl" => Architecture::DiaXl,
            "diaxl-d" => Architecture::DiaXlD,
            _ => return Err(Error::domain(format!("unknown architecture {s:?}"))),
        })
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Architecture::parse(s)
    }
}

/// Dropout rate used by the -D variants.
pub const DROPOUT_RATE: f64 = 0.5;

/// Builds the spec for an architecture at the given output width.
///
/// `scale` multiplies every hidden width (rounded up), so desk-scale runs
/// keep the depth and dropout placement while shrinking the tensors.
pub fn build(arch: Architecture, out_width: usize, scale: f64) -> Result<ModelSpec> {
    if out_width < 2 {
        return Err(Error::domain(format!(
            "output width must be >= 2, got {out_width}"
        )));
    }
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::domain(format!("scale must lie in (0, 1], got {scale}")));
    }
    let mut widths = vec![GRID_POINTS];
    widths.extend(
        arch.hidden_widths()
            .into_iter()
            .map(|w| ((w as f64 * scale).ceil() as usize).max(1)),
    );
    widths.push(out_width);
    let dropout = arch.dropout_after();
    let rate = if dropout.is_empty() { 0.0 } else { DROPOUT_RATE };
    ModelSpec::new(widths, dropout, rate)
}

/// Total learnable parameters: sum over layers of `w_in * w_out + w_out`.
pub fn param_count(spec: &ModelSpec) -> u64 {
    spec.widths()
        .windows(2)
        .map(|w| (w[0] * w[1] + w[1]) as u64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Published ballpark totals (output width 5) per architecture.
    const TARGETS: [(Architecture, u64); 6] = [
        (Architecture::Dialight, 2_000_000),
        (Architecture::Diagnoser, 18_000_000),
        (Architecture::DiaL, 82_000_000),
        (Architecture::DiaLD, 82_000_000),
        (Architecture::DiaXl, 32_000_000),
        (Architecture::DiaXlD, 32_000_000),
    ];

    #[test]
    fn depths_are_3_5_7_7_10_10() {
        let depths: Vec<usize> = Architecture::ALL
            .iter()
            .map(|a| build(*a, 5, 1.0).unwrap().depth())
            .collect();
        assert_eq!(depths, vec![3, 5, 7, 7, 10, 10]);
    }

    #[test]
    fn param_counts_within_15_percent_of_published_totals() {
        for (arch, target) in TARGETS {
            let spec = build(arch, 5, 1.0).unwrap();
            let count = param_count(&spec);
            let rel = (count as f64 - target as f64).abs() / target as f64;
            assert!(rel <= 0.15, "{arch}: {count} vs {target} ({rel:.3})");
        }
    }

    #[test]
    fn param_count_formula_hand_check() {
        // 2000 -> 900 -> 220 -> 5, evaluated term by term:
        // 2000*900+900 + 900*220+220 + 220*5+5 = 2_000_225.
        let spec = ModelSpec::without_dropout(vec![2000, 900, 220, 5]).unwrap();
        let by_hand = (2000 * 900 + 900) + (900 * 220 + 220) + (220 * 5 + 5);
        assert_eq!(by_hand, 2_000_225);
        assert_eq!(param_count(&spec), by_hand as u64);
        // Single layer 2000 -> 5.
        let single = ModelSpec::without_dropout(vec![2000, 5]).unwrap();
        assert_eq!(param_count(&single), 10_005);
    }

    #[test]
    fn dropout_placements() {
        assert_eq!(
            build(Architecture::DiaLD, 5, 1.0).unwrap().dropout_after(),
            &[4]
        );
        assert_eq!(
            build(Architecture::DiaXlD, 5, 1.0).unwrap().dropout_after(),
            &[2, 4]
        );
        for arch in [
            Architecture::Dialight,
            Architecture::Diagnoser,
            Architecture::DiaL,
            Architecture::DiaXl,
        ] {
            assert!(build(arch, 5, 1.0).unwrap().dropout_after().is_empty());
        }
        // Dropout-free twins share the widths.
        assert_eq!(
            build(Architecture::DiaL, 5, 1.0).unwrap().widths(),
            build(Architecture::DiaLD, 5, 1.0).unwrap().widths()
        );
    }

    #[test]
    fn scaling_shrinks_widths_not_depth() {
        let spec = build(Architecture::Diagnoser, 5, 0.1).unwrap();
        assert_eq!(spec.depth(), 5);
        assert_eq!(spec.widths(), &[2000, 210, 210, 210, 210, 5]);
    }

    #[test]
    fn bad_arguments_rejected() {
        assert!(build(Architecture::Dialight, 1, 1.0).is_err());
        assert!(build(Architecture::Dialight, 5, 0.0).is_err());
        assert!(build(Architecture::Dialight, 5, 1.5).is_err());
    }

    #[test]
    fn names_parse_case_insensitively() {
        for arch in Architecture::ALL {
            assert_eq!(Architecture::parse(arch.name()).unwrap(), arch);
            assert_eq!(
                Architecture::parse(&arch.name().to_uppercase()).unwrap(),
                arch
            );
            assert_eq!(
                Architecture::parse(&arch.name().to_lowercase()).unwrap(),
                arch
            );
        }
        assert_eq!(
            Architecture::parse("diagnoser").unwrap(),
            Architecture::Diagnoser
        );
        assert!(Architecture::parse("resnet").is_err());
    }
}

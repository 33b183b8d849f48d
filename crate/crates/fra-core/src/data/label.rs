//! Fault labels and label-encoding schemes.

use crate::error::{Error, Result};

/// Winding fault categories. `Normal` is the healthy class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultType {
    Normal,
    Ad,
    Dsv,
    Fb,
    Sc,
}

impl FaultType {
    /// Non-normal types in canonical order (the order classes are numbered).
    pub const FAULTS: [FaultType; 4] = [FaultType::Ad, FaultType::Dsv, FaultType::Fb, FaultType::Sc];

    pub fn code(self) -> u8 {
        match self {
            FaultType::Normal => 0,
            FaultType::Ad => 1,
            FaultType::Dsv => 2,
            FaultType::Fb => 3,
            FaultType::Sc => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            0 => FaultType::Normal,
            1 => FaultType::Ad,
            2 => FaultType::Dsv,
            3 => FaultType::Fb,
            4 => FaultType::Sc,
            _ => return Err(Error::domain(format!("unknown fault type code {code}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FaultType::Normal => "Normal",
            FaultType::Ad => "AD",
            FaultType::Dsv => "DSV",
            FaultType::Fb => "FB",
            FaultType::Sc => "SC",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NORMAL" => Ok(FaultType::Normal),
            "AD" => Ok(FaultType::Ad),
            "DSV" => Ok(FaultType::Dsv),
            "FB" => Ok(FaultType::Fb),
            "SC" => Ok(FaultType::Sc),
            _ => Err(Error::domain(format!("unknown fault type {s:?}"))),
        }
    }
}

impl std::fmt::Display for FaultType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ground-truth label of one sample: what fault, how severe, and where.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultLabel {
    pub fault_type: FaultType,
    /// Severity 1..=4, or 0 for `Normal`.
    pub degree: u8,
    /// Which disc / gap set hosts the fault (1-based); 0 for `Normal`.
    pub position: u16,
}

impl FaultLabel {
    pub fn new(fault_type: FaultType, degree: u8, position: u16) -> Result<Self> {
        match fault_type {
            FaultType::Normal => {
                if degree != 0 || position != 0 {
                    return Err(Error::domain(
                        "normal labels carry degree 0 and position 0".to_string(),
                    ));
                }
            }
            _ => {
                if !(1..=4).contains(&degree) {
                    return Err(Error::domain(format!(
                        "fault degree must be 1..=4, got {degree}"
                    )));
                }
                if position == 0 {
                    return Err(Error::domain("fault position must be >= 1".to_string()));
                }
            }
        }
        Ok(FaultLabel {
            fault_type,
            degree,
            position,
        })
    }

    pub fn normal() -> Self {
        FaultLabel {
            fault_type: FaultType::Normal,
            degree: 0,
            position: 0,
        }
    }

    pub fn is_normal(&self) -> bool {
        self.fault_type == FaultType::Normal
    }
}

/// What a class index stands for under some scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodedClass {
    Normal,
    /// A fault class; `degree` is `None` for type-only schemes.
    Fault {
        fault_type: FaultType,
        degree: Option<u8>,
    },
}

/// The three output-layer conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Normal vs. fault type, degree ignored.
    Type,
    /// Normal vs. four degrees of one fault type.
    Degree(FaultType),
    /// Normal vs. every (type, degree) combination.
    Joint,
}

/// Maps [`FaultLabel`]s onto contiguous class indices. Class 0 is always
/// `Normal`; fault types are ordered AD, DSV, FB, SC.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelScheme {
    kind: SchemeKind,
    types: Vec<FaultType>,
}

impl LabelScheme {
    /// Type scheme over the given fault types (ordered canonically).
    pub fn fault_types(types: &[FaultType]) -> Result<Self> {
        let types = canonical_types(types)?;
        Ok(LabelScheme {
            kind: SchemeKind::Type,
            types,
        })
    }

    /// Degree scheme for a single fault type.
    pub fn degrees(fault_type: FaultType) -> Result<Self> {
        if fault_type == FaultType::Normal {
            return Err(Error::domain("degree scheme needs a non-normal fault type"));
        }
        Ok(LabelScheme {
            kind: SchemeKind::Degree(fault_type),
            types: vec![fault_type],
        })
    }

    /// Joint (type, degree) scheme over the given fault types.
    pub fn joint(types: &[FaultType]) -> Result<Self> {
        let types = canonical_types(types)?;
        Ok(LabelScheme {
            kind: SchemeKind::Joint,
            types,
        })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn covered_types(&self) -> &[FaultType] {
        &self.types
    }

    pub fn class_count(&self) -> usize {
        match self.kind {
            SchemeKind::Type => 1 + self.types.len(),
            SchemeKind::Degree(_) => 5,
            SchemeKind::Joint => 1 + 4 * self.types.len(),
        }
    }

    /// Encodes a label as a class index in `[0, class_count)`.
    pub fn encode(&self, label: &FaultLabel) -> Result<usize> {
        if label.is_normal() {
            return Ok(0);
        }
        let pos = self
            .types
            .iter()
            .position(|t| *t == label.fault_type)
            .ok_or_else(|| {
                Error::domain(format!(
                    "label type {} is not covered by this scheme",
                    label.fault_type
                ))
            })?;
        Ok(match self.kind {
            SchemeKind::Type => 1 + pos,
            SchemeKind::Degree(_) => label.degree as usize,
            SchemeKind::Joint => 1 + 4 * pos + (label.degree as usize - 1),
        })
    }

    pub fn decode(&self, class_index: usize) -> Result<DecodedClass> {
        if class_index >= self.class_count() {
            return Err(Error::domain(format!(
                "class index {class_index} out of range for {} classes",
                self.class_count()
            )));
        }
        if class_index == 0 {
            return Ok(DecodedClass::Normal);
        }
        Ok(match self.kind {
            SchemeKind::Type => DecodedClass::Fault {
                fault_type: self.types[class_index - 1],
                degree: None,
            },
            SchemeKind::Degree(t) => DecodedClass::Fault {
                fault_type: t,
                degree: Some(class_index as u8),
            },
            SchemeKind::Joint => {
                let z = class_index - 1;
                DecodedClass::Fault {
                    fault_type: self.types[z / 4],
                    degree: Some((z % 4 + 1) as u8),
                }
            }
        })
    }

    /// Human-readable class names in index order ("Normal", "AD", "FB-3", ...).
    pub fn class_names(&self) -> Vec<String> {
        (0..self.class_count())
            .map(|i| match self.decode(i).expect("index in range") {
                DecodedClass::Normal => "Normal".to_string(),
                DecodedClass::Fault {
                    fault_type,
                    degree: None,
                } => fault_type.name().to_string(),
                DecodedClass::Fault {
                    fault_type,
                    degree: Some(d),
                } => format!("{}-{d}", fault_type.name()),
            })
            .collect()
    }

    /// Reconstructs a scheme from a class-name list (the model-file form).
    pub fn from_class_names(names: &[String]) -> Result<Self> {
        if names.first().map(String::as_str) != Some("Normal") {
            return Err(Error::domain("class list must start with Normal"));
        }
        let mut types = Vec::new();
        let mut any_degree = false;
        let mut any_plain = false;
        for name in &names[1..] {
            if let Some((t, d)) = name.split_once('-') {
                let t = FaultType::parse(t)?;
                d.parse::<u8>()
                    .ok()
                    .filter(|d| (1..=4).contains(d))
                    .ok_or_else(|| Error::domain(format!("bad degree in class name {name:?}")))?;
                any_degree = true;
                if !types.contains(&t) {
                    types.push(t);
                }
            } else {
                let t = FaultType::parse(name)?;
                any_plain = true;
                if !types.contains(&t) {
                    types.push(t);
                }
            }
        }
        if any_degree && any_plain {
            return Err(Error::domain("class list mixes typed and degree classes"));
        }
        let scheme = if !any_degree {
            LabelScheme::fault_types(&types)?
        } else if types.len() == 1 && names.len() == 5 {
            LabelScheme::degrees(types[0])?
        } else {
            LabelScheme::joint(&types)?
        };
        if scheme.class_names() != names {
            return Err(Error::domain(
                "class list does not match any canonical scheme ordering",
            ));
        }
        Ok(scheme)
    }
}

fn canonical_types(types: &[FaultType]) -> Result<Vec<FaultType>> {
    if types.is_empty() {
        return Err(Error::domain("scheme needs at least one fault type"));
    }
    let mut out = Vec::new();
    for t in FaultType::FAULTS {
        if types.contains(&t) {
            out.push(t);
        }
    }
    if types.contains(&FaultType::Normal) {
        return Err(Error::domain("Normal is implicit and not a fault type"));
    }
    if out.len() != types.len() {
        return Err(Error::domain("duplicate fault types in scheme"));
    }
    Ok(out)
}

/// One-hot vector with a single 1 at `class_index`.
pub fn one_hot(class_index: usize, class_count: usize) -> Result<Vec<f64>> {
    if class_index >= class_count {
        return Err(Error::domain(format!(
            "class index {class_index} out of range for {class_count} classes"
        )));
    }
    let mut v = vec![0.0; class_count];
    v[class_index] = 1.0;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group1_types() -> Vec<FaultType> {
        vec![FaultType::Ad, FaultType::Dsv, FaultType::Fb]
    }

    fn group3_types() -> Vec<FaultType> {
        vec![FaultType::Ad, FaultType::Dsv, FaultType::Fb, FaultType::Sc]
    }

    #[test]
    fn type_scheme_encodes_normal_as_zero() {
        let s = LabelScheme::fault_types(&group1_types()).unwrap();
        assert_eq!(s.class_count(), 4);
        assert_eq!(s.encode(&FaultLabel::normal()).unwrap(), 0);
    }

    #[test]
    fn type_scheme_group3_sc_is_class_four() {
        let s = LabelScheme::fault_types(&group3_types()).unwrap();
        assert_eq!(s.class_count(), 5);
        let label = FaultLabel::new(FaultType::Sc, 3, 1).unwrap();
        assert_eq!(s.encode(&label).unwrap(), 4);
    }

    #[test]
    fn joint_scheme_matches_enumerated_class_list() {
        // Independent oracle: enumerate the 13-class list for a
        // three-fault-type group and look indices up by position.
        let s = LabelScheme::joint(&group1_types()).unwrap();
        let mut enumerated = vec![("Normal".to_string(), None)];
        for t in [FaultType::Ad, FaultType::Dsv, FaultType::Fb] {
            for d in 1..=4u8 {
                enumerated.push((format!("{}-{d}", t.name()), Some((t, d))));
            }
        }
        assert_eq!(enumerated.len(), 13);
        assert_eq!(s.class_count(), 13);
        let label = FaultLabel::new(FaultType::Fb, 3, 2).unwrap();
        let oracle_index = enumerated
            .iter()
            .position(|(_, c)| *c == Some((FaultType::Fb, 3)))
            .unwrap();
        assert_eq!(oracle_index, 11);
        assert_eq!(s.encode(&label).unwrap(), 11);
    }

    #[test]
    fn degree_scheme_rejects_other_types() {
        let s = LabelScheme::degrees(FaultType::Fb).unwrap();
        assert_eq!(s.class_count(), 5);
        let fb = FaultLabel::new(FaultType::Fb, 2, 1).unwrap();
        assert_eq!(s.encode(&fb).unwrap(), 2);
        let ad = FaultLabel::new(FaultType::Ad, 2, 1).unwrap();
        assert!(s.encode(&ad).is_err());
        assert_eq!(s.encode(&FaultLabel::normal()).unwrap(), 0);
    }

    #[test]
    fn encode_decode_are_inverse_over_all_schemes() {
        let schemes = [
            LabelScheme::fault_types(&group3_types()).unwrap(),
            LabelScheme::degrees(FaultType::Dsv).unwrap(),
            LabelScheme::joint(&group3_types()).unwrap(),
        ];
        for s in &schemes {
            for i in 0..s.class_count() {
                let decoded = s.decode(i).unwrap();
                let label = match decoded {
                    DecodedClass::Normal => FaultLabel::normal(),
                    DecodedClass::Fault {
                        fault_type,
                        degree,
                    } => FaultLabel::new(fault_type, degree.unwrap_or(1), 1).unwrap(),
                };
                assert_eq!(s.encode(&label).unwrap(), i);
            }
        }
    }

    #[test]
    fn class_names_roundtrip() {
        let schemes = [
            LabelScheme::fault_types(&group1_types()).unwrap(),
            LabelScheme::degrees(FaultType::Fb).unwrap(),
            LabelScheme::joint(&group3_types()).unwrap(),
        ];
        for s in &schemes {
            let names = s.class_names();
            let back = LabelScheme::from_class_names(&names).unwrap();
            assert_eq!(&back, s);
        }
    }

    #[test]
    fn one_hot_basics() {
        assert_eq!(one_hot(0, 5).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(one_hot(4, 5).unwrap(), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(one_hot(5, 5).is_err());
        // Partition of identity: the one-hots over all indices sum to ones.
        let mut sum = vec![0.0; 5];
        for i in 0..5 {
            for (s, v) in sum.iter_mut().zip(one_hot(i, 5).unwrap()) {
                *s += v;
            }
        }
        assert_eq!(sum, vec![1.0; 5]);
    }

    #[test]
    fn label_validation() {
        assert!(FaultLabel::new(FaultType::Normal, 0, 0).is_ok());
        assert!(FaultLabel::new(FaultType::Normal, 1, 0).is_err());
        assert!(FaultLabel::new(FaultType::Ad, 0, 1).is_err());
        assert!(FaultLabel::new(FaultType::Ad, 5, 1).is_err());
        assert!(FaultLabel::new(FaultType::Ad, 2, 0).is_err());
    }
}

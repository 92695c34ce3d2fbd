//! Central hyperplane arrangements in C^n with coefficients in Q(ζ_r).

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{CycError, CycNum};
use crate::expr::{self, ParseError};

#[derive(Debug, Error)]
pub enum ArrangementError {
    #[error("ambient dimension must be at least 1")]
    ZeroDimension,
    #[error("the r-braid arrangement needs r >= 2 (got {0}); use the braid arrangement for r = 1")]
    RootOrderTooSmall(u32),
    #[error("root order must be positive")]
    ZeroOrder,
    #[error("hyperplane {index}: {source}")]
    Form {
        index: usize,
        #[source]
        source: ParseError,
    },
    #[error("hyperplane {index}: the zero form does not define a hyperplane")]
    ZeroForm { index: usize },
    #[error("hyperplane {index}: constant term present; only central arrangements are supported")]
    NotCentral { index: usize },
    #[error("hyperplane {index}: variable x{var} outside x1..x{n}")]
    VariableOutOfRange { index: usize, var: usize, n: usize },
    #[error("hyperplane {index}: expected {expected} coefficients, got {got}")]
    Arity { index: usize, expected: usize, got: usize },
    #[error("hyperplane {index} duplicates hyperplane {first}")]
    Duplicate { index: usize, first: usize },
    #[error("hyperplane {index}: {source}")]
    Coefficient {
        index: usize,
        #[source]
        source: CycError,
    },
    #[error("invalid arrangement file at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A hyperplane given by a linear form, normalized so that its first nonzero
/// coefficient is 1. Equality ignores the label.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    coeffs: Vec<CycNum>,
    label: String,
}

impl PartialEq for Hyperplane {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Hyperplane {}

impl Hash for Hyperplane {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl Hyperplane {
    /// Normalizes `coeffs`; returns `None` for the zero form.
    pub fn new(coeffs: Vec<CycNum>, label: impl Into<String>) -> Option<Self> {
        let lead = coeffs.iter().find(|c| !c.is_zero())?.inv().ok()?;
        let coeffs = coeffs.iter().map(|c| c * &lead).collect();
        Some(Hyperplane {
            coeffs,
            label: label.into(),
        })
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn normalized(&self) -> Self {
        Hyperplane::new(self.coeffs.clone(), self.label.clone()).expect("hyperplanes are nonzero")
    }
}

/// Renders a linear form in the arrangement-file grammar, e.g. `x1 - (z)*x2`.
pub fn format_form(coeffs: &[CycNum]) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let var = format!("x{}", i + 1);
        let (neg, body) = match c.as_rational() {
            Some(q) => {
                let abs = q.abs();
                let body = if abs.is_one() {
                    var
                } else if abs.denom().is_one() {
                    format!("{}*{var}", abs.numer())
                } else {
                    format!("{}/{}*{var}", abs.numer(), abs.denom())
                };
                (q.is_negative(), body)
            }
            None => (false, format!("({c})*{var}")),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Which builtin family an arrangement coincides with, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrangementKind {
    Braid,
    RBraid,
    Custom,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    root_order: u32,
    ambient_dim: usize,
    hyperplanes: Vec<Hyperplane>,
    kind: ArrangementKind,
}

/// What to do with a repeated hyperplane when building an arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    #[default]
    Error,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateWarning {
    pub index: usize,
    pub first: usize,
}

/// The linear form `x_i - ζ^k x_j` (or `x_i` when `i == j`), with 1-based indices.
pub fn rbraid_form(r: u32, n: usize, i: usize, j: usize, k: i64) -> Vec<CycNum> {
    let zero = CycNum::zero(r).expect("positive order");
    let mut v = vec![zero; n];
    v[i - 1] = CycNum::one(r).expect("positive order");
    if i != j {
        v[j - 1] = -CycNum::zeta_pow(r, k).expect("positive order");
    }
    v
}

impl Arrangement {
    /// Builds an arrangement from (form, label) pairs, normalizing each form.
    pub fn new(
        root_order: u32,
        ambient_dim: usize,
        forms: Vec<(Vec<CycNum>, String)>,
        policy: DuplicatePolicy,
    ) -> Result<(Self, Vec<DuplicateWarning>), ArrangementError> {
        let (mut arr, warnings) = Self::build(root_order, ambient_dim, forms, policy)?;
        arr.kind = arr.detect_kind();
        Ok((arr, warnings))
    }

    /// As [`Arrangement::new`], with kind `Custom`.
    fn build(
        root_order: u32,
        ambient_dim: usize,
        forms: Vec<(Vec<CycNum>, String)>,
        policy: DuplicatePolicy,
    ) -> Result<(Self, Vec<DuplicateWarning>), ArrangementError> {
        if root_order == 0 {
            return Err(ArrangementError::ZeroOrder);
        }
        if ambient_dim == 0 {
            return Err(ArrangementError::ZeroDimension);
        }
        let mut seen: HashMap<Vec<CycNum>, usize> = HashMap::new();
        let mut hyperplanes = Vec::with_capacity(forms.len());
        let mut warnings = Vec::new();
        for (index, (coeffs, label)) in forms.into_iter().enumerate() {
            if coeffs.len() != ambient_dim {
                return Err(ArrangementError::Arity {
                    index,
                    expected: ambient_dim,
                    got: coeffs.len(),
                });
            }
            if let Some(bad) = coeffs.iter().find(|c| c.order() != root_order) {
                return Err(ArrangementError::Coefficient {
                    index,
                    source: CycError::OrderMismatch {
                        left: root_order,
                        right: bad.order(),
                    },
                });
            }
            let h = Hyperplane::new(coeffs, label).ok_or(ArrangementError::ZeroForm { index })?;
            if let Some(&first) = seen.get(&h.coeffs) {
                match policy {
                    DuplicatePolicy::Error => return Err(ArrangementError::Duplicate { index, first }),
                    DuplicatePolicy::Warn => {
                        warnings.push(DuplicateWarning { index, first });
                        continue;
                    }
                }
            }
            seen.insert(h.coeffs.clone(), index);
            hyperplanes.push(h);
        }
        let arr = Arrangement {
            root_order,
            ambient_dim,
            hyperplanes,
            kind: ArrangementKind::Custom,
        };
        Ok((arr, warnings))
    }

    fn detect_kind(&self) -> ArrangementKind {
        if self.root_order == 1 {
            if let Ok(b) = braid_arrangement(self.ambient_dim) {
                if self.same_hyperplanes(&b) {
                    return ArrangementKind::Braid;
                }
            }
        } else if let Ok(b) = r_braid_arrangement(self.root_order, self.ambient_dim) {
            if self.same_hyperplanes(&b) {
                return ArrangementKind::RBraid;
            }
        }
        ArrangementKind::Custom
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn kind(&self) -> ArrangementKind {
        self.kind
    }

    /// Set equality of hyperplanes, ignoring order and labels.
    pub fn same_hyperplanes(&self, other: &Arrangement) -> bool {
        if self.root_order != other.root_order
            || self.ambient_dim != other.ambient_dim
            || self.len() != other.len()
        {
            return false;
        }
        let mine: std::collections::HashSet<&Hyperplane> = self.hyperplanes.iter().collect();
        other.hyperplanes.iter().all(|h| mine.contains(h))
    }

    pub fn to_file(&self) -> ArrangementFile {
        ArrangementFile {
            r: self.root_order,
            n: self.ambient_dim,
            hyperplanes: self.hyperplanes.iter().map(|h| format_form(&h.coeffs)).collect(),
        }
    }
}

/// Classical braid arrangement `x_i = x_j`, `0 <= i < j <= n`, with `x_0 = 0`.
pub fn braid_arrangement(n: usize) -> Result<Arrangement, ArrangementError> {
    if n == 0 {
        return Err(ArrangementError::ZeroDimension);
    }
    let mut forms = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let form = if i == 0 {
                rbraid_form(1, n, j, j, 0)
            } else {
                rbraid_form(1, n, i, j, 0)
            };
            forms.push((form, format!("H_{i}{j}")));
        }
    }
    let (mut arr, _) = Arrangement::build(1, n, forms, DuplicatePolicy::Error)?;
    arr.kind = ArrangementKind::Braid;
    Ok(arr)
}

/// r-braid arrangement `x_i = ζ^k x_j` for `1 <= i <= j <= n`, where the
/// `i == j` hyperplanes `x_i = 0` are stored once.
pub fn r_braid_arrangement(r: u32, n: usize) -> Result<Arrangement, ArrangementError> {
    if r < 2 {
        return Err(ArrangementError::RootOrderTooSmall(r));
    }
    if n == 0 {
        return Err(ArrangementError::ZeroDimension);
    }
    let mut forms = Vec::new();
    for i in 1..=n {
        forms.push((rbraid_form(r, n, i, i, 1), format!("H_{i}{i}")));
        for j in i + 1..=n {
            for k in 0..r as i64 {
                forms.push((rbraid_form(r, n, i, j, k), format!("H^{k}_{i}{j}")));
            }
        }
    }
    let (mut arr, _) = Arrangement::build(r, n, forms, DuplicatePolicy::Error)?;
    arr.kind = ArrangementKind::RBraid;
    Ok(arr)
}

/// On-disk form of an arrangement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementFile {
    pub r: u32,
    pub n: usize,
    pub hyperplanes: Vec<String>,
}

/// Parses an arrangement file `{ "r": .., "n": .., "hyperplanes": [..] }`.
pub fn parse_arrangement(
    text: &str,
    policy: DuplicatePolicy,
) -> Result<(Arrangement, Vec<DuplicateWarning>), ArrangementError> {
    let file: ArrangementFile = serde_json::from_str(text).map_err(|e| ArrangementError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.r == 0 {
        return Err(ArrangementError::ZeroOrder);
    }
    if file.n == 0 {
        return Err(ArrangementError::ZeroDimension);
    }
    let mut forms = Vec::with_capacity(file.hyperplanes.len());
    for (index, text) in file.hyperplanes.iter().enumerate() {
        let e = expr::parse_linear(file.r, text).map_err(|source| ArrangementError::Form { index, source })?;
        if !e.constant.is_zero() {
            return Err(ArrangementError::NotCentral { index });
        }
        let mut coeffs = vec![CycNum::zero(file.r).expect("positive order"); file.n];
        for (var, c) in e.vars {
            if var == 0 || var > file.n {
                return Err(ArrangementError::VariableOutOfRange { index, var, n: file.n });
            }
            coeffs[var - 1] = c;
        }
        forms.push((coeffs, text.trim().to_string()));
    }
    Arrangement::new(file.r, file.n, forms, policy)
}

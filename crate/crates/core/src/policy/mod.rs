//! Access policies: boolean formulas over attribute strings, their LSSS
//! matrices, share generation, and reconstruction coefficients.
//!
//! Policies are monotone. Multi-valued attributes are written `name:value`
//! and negative attributes `!name`; both are ordinary attribute strings that
//! must be issued to keys explicitly.
//!
//! `rho` may map several rows to the same attribute when a formula repeats an
//! attribute. Security analyses of Waters-style schemes usually assume an
//! injective `rho`.

mod linalg;
mod lsss;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use linalg::{rank, satisfying_rows, target_in_span, Reconstruction};
pub use lsss::{compile_lsss, make_shares, shares_from_vector};
pub use parser::{parse_policy, Expected, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("invalid attribute name `{0}`")]
    InvalidAttribute(String),
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("malformed access matrix: {0}")]
    MalformedMatrix(&'static str),
}

/// True for non-empty strings over `[A-Za-z0-9_:!.-]` other than the
/// keywords `AND` and `OR`.
pub fn is_valid_attribute(s: &str) -> bool {
    !s.is_empty()
        && s != "AND"
        && s != "OR"
        && s.chars().all(parser::is_attribute_char)
}

/// Boolean formula tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PolicyAst {
    Leaf(String),
    And(Box<PolicyAst>, Box<PolicyAst>),
    Or(Box<PolicyAst>, Box<PolicyAst>),
}

impl PolicyAst {
    pub fn leaf(attr: impl Into<String>) -> Self {
        PolicyAst::Leaf(attr.into())
    }

    pub fn and(left: PolicyAst, right: PolicyAst) -> Self {
        PolicyAst::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: PolicyAst, right: PolicyAst) -> Self {
        PolicyAst::Or(Box::new(left), Box::new(right))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            PolicyAst::Leaf(_) => 1,
            PolicyAst::And(l, r) | PolicyAst::Or(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// A leaf has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            PolicyAst::Leaf(_) => 1,
            PolicyAst::And(l, r) | PolicyAst::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn attributes(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_attributes(&mut out);
        out
    }

    fn collect_attributes<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            PolicyAst::Leaf(a) => {
                out.insert(a);
            }
            PolicyAst::And(l, r) | PolicyAst::Or(l, r) => {
                l.collect_attributes(out);
                r.collect_attributes(out);
            }
        }
    }
}

impl fmt::Display for PolicyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyAst::Leaf(a) => f.write_str(a),
            PolicyAst::And(l, r) => write!(f, "({l} AND {r})"),
            PolicyAst::Or(l, r) => write!(f, "({l} OR {r})"),
        }
    }
}

/// Plain boolean evaluation; the reference the compiler is tested against.
pub fn eval_formula(ast: &PolicyAst, attrs: &AttributeSet) -> bool {
    match ast {
        PolicyAst::Leaf(a) => attrs.contains(a),
        PolicyAst::And(l, r) => eval_formula(l, attrs) && eval_formula(r, attrs),
        PolicyAst::Or(l, r) => eval_formula(l, attrs) || eval_formula(r, attrs),
    }
}

/// A finite set of attribute strings, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttributeSet(BTreeSet<String>);

impl AttributeSet {
    pub fn new() -> Self {
        AttributeSet(BTreeSet::new())
    }

    /// Builds a set, rejecting invalid names and duplicates.
    pub fn from_names<I, S>(names: I) -> Result<Self, PolicyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = BTreeSet::new();
        for name in names {
            let name = name.into();
            if !is_valid_attribute(&name) {
                return Err(PolicyError::InvalidAttribute(name));
            }
            if set.contains(&name) {
                return Err(PolicyError::DuplicateAttribute(name));
            }
            set.insert(name);
        }
        Ok(AttributeSet(set))
    }

    /// Parses a comma-separated list; entries are whitespace-trimmed and
    /// empty entries are skipped.
    pub fn parse_list(list: &str) -> Result<Self, PolicyError> {
        Self::from_names(list.split(',').map(str::trim).filter(|s| !s.is_empty()))
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.0.contains(attr)
    }

    pub fn insert(&mut self, attr: impl Into<String>) -> bool {
        self.0.insert(attr.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn is_subset(&self, other: &AttributeSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a)?;
        }
        f.write_str("}")
    }
}

impl<'a> FromIterator<&'a str> for AttributeSet {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        AttributeSet(iter.into_iter().map(str::to_string).collect())
    }
}

/// LSSS matrix `M` (integer entries, interpreted mod p) with row labels `rho`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AccessMatrix {
    rows: Vec<Vec<i64>>,
    rho: Vec<String>,
}

impl AccessMatrix {
    pub fn new(rows: Vec<Vec<i64>>, rho: Vec<String>) -> Result<Self, PolicyError> {
        if rows.is_empty() {
            return Err(PolicyError::MalformedMatrix("no rows"));
        }
        let width = rows[0].len();
        if width == 0 {
            return Err(PolicyError::MalformedMatrix("no columns"));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(PolicyError::MalformedMatrix("ragged rows"));
        }
        if rho.len() != rows.len() {
            return Err(PolicyError::MalformedMatrix("row labels do not match rows"));
        }
        if let Some(bad) = rho.iter().find(|a| !is_valid_attribute(a)) {
            return Err(PolicyError::InvalidAttribute(bad.clone()));
        }
        if rows.len() > u16::MAX as usize || width > u16::MAX as usize {
            return Err(PolicyError::MalformedMatrix("dimension exceeds 65535"));
        }
        Ok(AccessMatrix { rows, rho })
    }

    /// Parses and compiles a policy formula.
    pub fn from_policy(text: &str) -> Result<Self, PolicyError> {
        Ok(compile_lsss(&parse_policy(text)?))
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn rho(&self) -> &[String] {
        &self.rho
    }

    pub fn label(&self, i: usize) -> &str {
        &self.rho[i]
    }

    pub fn attributes(&self) -> BTreeSet<&str> {
        self.rho.iter().map(String::as_str).collect()
    }
}

impl fmt::Display for AccessMatrix {
    /// `[[1,1],[0,-1]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

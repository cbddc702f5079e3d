use std::sync::Arc;

use super::monomial::MAX_VARS;
use crate::error::{Error, Result};

/// How the shift acts on the distinguished variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    /// `v -> q^e v`, so that `v` stands for `q^(e k)`.
    Geometric(u32),
    /// `v -> v + 1`, so that `v` stands for `k`.
    Arithmetic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftVar {
    pub name: String,
    pub kind: ShiftKind,
}

/// Variable layout: index 0 is `q`, then the parameters, then the shift variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarTable {
    params: Vec<String>,
    shift: Option<ShiftVar>,
}

impl VarTable {
    pub fn new(params: Vec<String>, shift: Option<ShiftVar>) -> Result<Arc<Self>> {
        let extra = usize::from(shift.is_some());
        if 1 + params.len() + extra > MAX_VARS {
            return Err(Error::Usage(format!("at most {} parameters are supported", MAX_VARS - 1 - extra)));
        }
        let mut seen: Vec<&str> = vec!["q"];
        let names = params.iter().map(String::as_str).chain(shift.as_ref().map(|s| s.name.as_str()));
        for name in names {
            if name.is_empty() || seen.contains(&name) {
                return Err(Error::Usage(format!("duplicate or empty symbol `{name}`")));
            }
            seen.push(name);
        }
        if let Some(ShiftVar { kind: ShiftKind::Geometric(0), .. }) = shift {
            return Err(Error::Usage("geometric shift needs e >= 1".into()));
        }
        Ok(Arc::new(VarTable { params, shift }))
    }

    /// Table with parameters only.
    pub fn plain(params: &[&str]) -> Arc<Self> {
        Self::new(params.iter().map(|s| s.to_string()).collect(), None).expect("valid table")
    }

    /// Table whose shift variable `name` stands for `q^(e k)`.
    pub fn geometric(params: &[&str], name: &str, e: u32) -> Arc<Self> {
        Self::new(
            params.iter().map(|s| s.to_string()).collect(),
            Some(ShiftVar { name: name.to_string(), kind: ShiftKind::Geometric(e) }),
        )
        .expect("valid table")
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn shift(&self) -> Option<&ShiftVar> {
        self.shift.as_ref()
    }

    pub fn shift_kind(&self) -> Option<ShiftKind> {
        self.shift.as_ref().map(|s| s.kind)
    }

    pub fn nvars(&self) -> usize {
        1 + self.params.len() + usize::from(self.shift.is_some())
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name).map(|i| i + 1)
    }

    pub fn shift_index(&self) -> Option<usize> {
        self.shift.as_ref().map(|_| 1 + self.params.len())
    }

    pub fn var_name(&self, i: usize) -> &str {
        if i == 0 {
            "q"
        } else if i <= self.params.len() {
            &self.params[i - 1]
        } else {
            &self.shift.as_ref().expect("shift variable").name
        }
    }

    /// Same parameters with another (or no) shift variable.
    pub fn with_shift(&self, shift: Option<ShiftVar>) -> Result<Arc<Self>> {
        Self::new(self.params.clone(), shift)
    }

    /// Whether values can be moved between the two tables by relabeling alone.
    pub fn same_layout(&self, other: &VarTable) -> bool {
        self.params == other.params
    }
}

pub(crate) fn tables_match(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// The pair of tables used by one problem: the sequence side (`n`) and the coefficient side (`k`).
#[derive(Clone, Debug)]
pub struct Ctx {
    pub n: Arc<VarTable>,
    pub k: Arc<VarTable>,
}

impl Ctx {
    pub fn new(params: &[String], arithmetic: bool) -> Result<Self> {
        let kind = if arithmetic { ShiftKind::Arithmetic } else { ShiftKind::Geometric(1) };
        let (nn, kn) = if arithmetic { ("n", "k") } else { ("qn", "qk") };
        let n = VarTable::new(params.to_vec(), Some(ShiftVar { name: nn.into(), kind }))?;
        let k = VarTable::new(params.to_vec(), Some(ShiftVar { name: kn.into(), kind }))?;
        Ok(Ctx { n, k })
    }

    pub fn arithmetic(&self) -> bool {
        self.k.shift_kind() == Some(ShiftKind::Arithmetic)
    }
}

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{PflError, Result};

/// Jet order `n` and target dimension `m` of `J^n(R, R^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JetSpec {
    pub n: usize,
    pub m: usize,
}

impl JetSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(PflError::Precondition("target dimension must be at least 1".into()));
        }
        Ok(JetSpec { n, m })
    }

    pub fn dim(&self) -> usize {
        (self.n + 1) * self.m + 1
    }

    /// Position of `x_j^i`; `x_0^0` is the independent variable.
    pub fn index(&self, i: usize, j: usize) -> usize {
        if j == 0 {
            assert_eq!(i, 0, "x_0^i only exists for i = 0");
            0
        } else {
            assert!(j <= self.m && i <= self.n);
            1 + i * self.m + (j - 1)
        }
    }

    /// Inverse of [`JetSpec::index`].
    pub fn label(&self, k: usize) -> (usize, usize) {
        if k == 0 {
            (0, 0)
        } else {
            ((k - 1) / self.m, (k - 1) % self.m + 1)
        }
    }

    pub fn lower(&self) -> Option<JetSpec> {
        self.n.checked_sub(1).map(|n| JetSpec { n, m: self.m })
    }

    /// `"n,m"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(',').ok_or_else(|| PflError::Parse(format!("expected `n,m`, got `{s}`")))?;
        let n = a.trim().parse().map_err(|_| PflError::Parse(format!("bad jet order `{a}`")))?;
        let m = b.trim().parse().map_err(|_| PflError::Parse(format!("bad target dimension `{b}`")))?;
        JetSpec::new(n, m)
    }
}

/// Coordinate chart: variable names plus optional jet labelling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub variables: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jet: Option<JetSpec>,
}

pub type ChartRef = Arc<Chart>;

impl Chart {
    pub fn generic(dim: usize) -> ChartRef {
        Arc::new(Chart { variables: (1..=dim).map(|i| format!("x{i}")).collect(), jet: None })
    }

    pub fn named(variables: Vec<String>) -> ChartRef {
        Arc::new(Chart { variables, jet: None })
    }

    pub fn jet(spec: JetSpec) -> ChartRef {
        let variables = (0..spec.dim())
            .map(|k| {
                let (i, j) = spec.label(k);
                format!("x_{j}^{i}")
            })
            .collect();
        Arc::new(Chart { variables, jet: Some(spec) })
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }
}

pub(crate) fn same_chart(a: &ChartRef, b: &ChartRef) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(PflError::ChartMismatch { expected: a.dim(), found: b.dim() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_indexing() {
        let s = JetSpec::new(2, 3).unwrap();
        assert_eq!(s.dim(), 10);
        assert_eq!(s.index(0, 0), 0);
        assert_eq!(s.index(0, 1), 1);
        assert_eq!(s.index(2, 3), 9);
        for k in 0..s.dim() {
            let (i, j) = s.label(k);
            assert_eq!(s.index(i, j), k);
        }
        let c = Chart::jet(s);
        assert_eq!(c.variables[4], "x_1^1");
    }

    #[test]
    fn parse_spec() {
        assert_eq!(JetSpec::parse("3, 2").unwrap(), JetSpec { n: 3, m: 2 });
        assert!(JetSpec::parse("3").is_err());
        assert!(JetSpec::parse("3,0").is_err());
    }
}

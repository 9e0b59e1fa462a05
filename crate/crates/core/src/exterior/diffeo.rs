use super::chart::{same_chart, ChartRef};
use super::distribution::{Distribution, PfaffianSystem};
use super::fields::{OneForm, VectorField};
use crate::error::{PflError, Result};
use crate::poly::{Polynomial, RationalPoint};

/// A polynomial map together with a polynomial inverse, both checked by composition.
#[derive(Clone, Debug)]
pub struct DiffeoPair {
    chart: ChartRef,
    forward: Vec<Polynomial>,
    backward: Vec<Polynomial>,
}

impl DiffeoPair {
    pub fn new(chart: ChartRef, forward: Vec<Polynomial>, backward: Vec<Polynomial>) -> Result<Self> {
        let n = chart.dim();
        for v in [&forward, &backward] {
            if v.len() != n {
                return Err(PflError::ChartMismatch { expected: n, found: v.len() });
            }
            if let Some(p) = v.iter().find(|p| p.nvars() != n) {
                return Err(PflError::ChartMismatch { expected: n, found: p.nvars() });
            }
        }
        for (a, b) in [(&forward, &backward), (&backward, &forward)] {
            for (i, p) in a.iter().enumerate() {
                if p.compose_unchecked(b, n) != Polynomial::var(n, i) {
                    return Err(PflError::NotInverse { component: i });
                }
            }
        }
        Ok(DiffeoPair { chart, forward, backward })
    }

    pub fn identity(chart: ChartRef) -> Self {
        let n = chart.dim();
        let id: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
        DiffeoPair { chart, forward: id.clone(), backward: id }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn forward(&self) -> &[Polynomial] {
        &self.forward
    }

    pub fn backward(&self) -> &[Polynomial] {
        &self.backward
    }

    pub fn inverse(&self) -> DiffeoPair {
        DiffeoPair { chart: self.chart.clone(), forward: self.backward.clone(), backward: self.forward.clone() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DiffeoPair) -> Result<DiffeoPair> {
        same_chart(&self.chart, &other.chart)?;
        let n = self.chart.dim();
        let forward = self.forward.iter().map(|p| p.compose_unchecked(&other.forward, n)).collect();
        let backward = other.backward.iter().map(|p| p.compose_unchecked(&self.backward, n)).collect();
        Ok(DiffeoPair { chart: self.chart.clone(), forward, backward })
    }

    pub fn map_point(&self, p: &RationalPoint) -> Result<RationalPoint> {
        p.check_dim(self.chart.dim())?;
        Ok(RationalPoint(self.forward.iter().map(|f| f.eval(p.coords())).collect()))
    }

    /// `(φ_* f)(y) = Dφ(ψ(y)) f(ψ(y))`.
    pub fn push_field(&self, f: &VectorField) -> Result<VectorField> {
        same_chart(&self.chart, f.chart())?;
        let n = self.chart.dim();
        let comps = self.forward.iter().map(|phi| f.apply(phi).compose_unchecked(&self.backward, n)).collect();
        VectorField::new(self.chart.clone(), comps)
    }

    /// `(ψ^* ω)_i = Σ_k ω_k(ψ) ∂_i ψ_k`.
    pub fn push_form(&self, w: &OneForm) -> Result<OneForm> {
        same_chart(&self.chart, w.chart())?;
        let n = self.chart.dim();
        let pulled: Vec<Polynomial> = w.components().iter().map(|p| p.compose_unchecked(&self.backward, n)).collect();
        let comps = (0..n)
            .map(|i| {
                let mut s = Polynomial::zero(n);
                for (k, wk) in pulled.iter().enumerate() {
                    if wk.is_zero() {
                        continue;
                    }
                    let d = self.backward[k].deriv(i);
                    if !d.is_zero() {
                        s = &s + &(wk * &d);
                    }
                }
                s
            })
            .collect();
        OneForm::new(self.chart.clone(), comps)
    }
}

pub fn pushforward(d: &Distribution, phi: &DiffeoPair) -> Result<Distribution> {
    let gens = d.generators().iter().map(|f| phi.push_field(f)).collect::<Result<_>>()?;
    Distribution::new(phi.chart.clone(), gens)
}

pub fn pushforward_system(i: &PfaffianSystem, phi: &DiffeoPair) -> Result<PfaffianSystem> {
    let forms = i.forms().iter().map(|w| phi.push_form(w)).collect::<Result<_>>()?;
    PfaffianSystem::new(phi.chart.clone(), forms)
}

//! Uniform embeddings between word-metric spaces and their verification on samples.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::group::{Family, GroupElement, GroupSpec};
use super::metric::{ball_elements, MetricSubset};
use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::error::{Error, Result};

/// Monotone piecewise-linear distortion function given by breakpoints `(t, value)`.
/// Beyond the last breakpoint the final segment is extended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, u64)>", into = "Vec<(u64, u64)>")]
pub struct WitnessFn {
    points: Vec<(u64, u64)>,
}

impl TryFrom<Vec<(u64, u64)>> for WitnessFn {
    type Error = Error;

    fn try_from(points: Vec<(u64, u64)>) -> Result<Self> {
        WitnessFn::new(points)
    }
}

impl From<WitnessFn> for Vec<(u64, u64)> {
    fn from(w: WitnessFn) -> Self {
        w.points
    }
}

impl WitnessFn {
    /// Validates monotonicity and divergence on the table prefix.
    pub fn new(points: Vec<(u64, u64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidWitness("need at least two breakpoints".into()));
        }
        if !points.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::InvalidWitness("breakpoints must be strictly increasing".into()));
        }
        if !points.windows(2).all(|w| w[0].1 <= w[1].1) {
            return Err(Error::InvalidWitness("values must be monotone".into()));
        }
        let n = points.len();
        if points[n - 1].1 <= points[n - 2].1 {
            return Err(Error::InvalidWitness("final segment must increase (divergence)".into()));
        }
        Ok(WitnessFn { points })
    }

    /// `t ↦ slope·t`.
    pub fn linear(slope: u64) -> Self {
        WitnessFn::new(vec![(0, 0), (1, slope.max(1))]).expect("valid")
    }

    pub fn eval(&self, t: u64) -> Ratio<i128> {
        let p = &self.points;
        if t <= p[0].0 {
            return Ratio::from_integer(p[0].1 as i128);
        }
        let seg = p.windows(2).position(|w| t <= w[1].0).unwrap_or(p.len() - 2);
        let (t0, v0) = p[seg];
        let (t1, v1) = p[seg + 1];
        let slope = Ratio::new(v1 as i128 - v0 as i128, t1 as i128 - t0 as i128);
        Ratio::from_integer(v0 as i128) + slope * Ratio::from_integer(t as i128 - t0 as i128)
    }

    /// Largest `t` with `eval(t) ≤ value`; the function diverges so this exists.
    pub fn last_at_most(&self, value: u64) -> u64 {
        let target = Ratio::from_integer(value as i128);
        let mut t = 0;
        while self.eval(t + 1) <= target {
            t += 1;
        }
        t
    }

    fn breakpoints(&self) -> impl Iterator<Item = u64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    fn final_slope(&self) -> Ratio<i128> {
        let n = self.points.len();
        let (t0, v0) = self.points[n - 2];
        let (t1, v1) = self.points[n - 1];
        Ratio::new(v1 as i128 - v0 as i128, t1 as i128 - t0 as i128)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapRule {
    /// Canonical identification: equal specs, ℤⁿ with a product of `n` lines, or `F_k` with `T(k)`.
    Identity,
    /// `x ↦ factor·x` on a free abelian group.
    Scale { factor: i64 },
    /// Keeps the listed coordinates of a free abelian group.
    Projection { keep: Vec<usize> },
    /// Explicit user-supplied values as word pairs.
    Table { pairs: Vec<(String, String)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformEmbedding {
    pub source: GroupSpec,
    pub target: GroupSpec,
    pub rule: MapRule,
    /// Lower witness `f`: `f(d₁) ≤ d₂`.
    pub lower: WitnessFn,
    /// Upper witness `g`: `d₂ ≤ g(d₁)`.
    pub upper: WitnessFn,
    table: Vec<(GroupElement, GroupElement)>,
}

impl UniformEmbedding {
    pub fn new(source: GroupSpec, target: GroupSpec, rule: MapRule, lower: WitnessFn, upper: WitnessFn) -> Result<Self> {
        let mut bps: Vec<u64> = lower.breakpoints().chain(upper.breakpoints()).collect();
        bps.sort_unstable();
        bps.dedup();
        if bps.iter().any(|t| lower.eval(*t) > upper.eval(*t)) || lower.final_slope() > upper.final_slope() {
            return Err(Error::InvalidWitness("lower witness exceeds upper witness".into()));
        }
        let table = match &rule {
            MapRule::Table { pairs } => pairs
                .iter()
                .map(|(a, b)| Ok((source.parse_word(a)?, target.parse_word(b)?)))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        let emb = UniformEmbedding { source, target, rule, lower, upper, table };
        emb.check_shape()?;
        Ok(emb)
    }

    fn check_shape(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidEmbedding(m.to_string()));
        match (&self.rule, self.source.family(), self.target.family()) {
            (MapRule::Identity, s, t) => {
                let ok = self.source == self.target
                    || matches!((s, t), (Family::FreeAbelian(n), Family::ProductOfTrees(r)) if r.len() == *n && r.iter().all(|k| *k == 1))
                    || matches!((s, t), (Family::ProductOfTrees(r), Family::FreeAbelian(n)) if r.len() == *n && r.iter().all(|k| *k == 1))
                    || matches!((s, t), (Family::Free(k), Family::ProductOfTrees(r)) if r.as_slice() == [*k]);
                if ok { Ok(()) } else { bad("identity needs matching spaces") }
            }
            (MapRule::Scale { factor }, Family::FreeAbelian(n), Family::FreeAbelian(m)) if n == m && *factor != 0 => Ok(()),
            (MapRule::Projection { keep }, Family::FreeAbelian(n), Family::FreeAbelian(m))
                if keep.len() == *m && keep.iter().all(|k| k < n) =>
            {
                Ok(())
            }
            (MapRule::Table { .. }, _, _) => Ok(()),
            _ => bad("map rule does not fit the source and target families"),
        }
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        UniformEmbedding::new(spec.clone(), spec.clone(), MapRule::Identity, WitnessFn::linear(1), WitnessFn::linear(1))
            .expect("valid")
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        match (&self.rule, x) {
            (MapRule::Identity, _) if self.source == self.target => Ok(x.clone()),
            (MapRule::Identity, GroupElement::Abelian(v)) => Ok(GroupElement::Product(
                v.iter().map(|c| vec![if *c >= 0 { 1 } else { -1 }; c.unsigned_abs() as usize]).collect(),
            )),
            (MapRule::Identity, GroupElement::Product(ws)) if self.target.is_free_abelian() => {
                Ok(GroupElement::Abelian(ws.iter().map(|w| w.iter().map(|l| l.signum() as i64).sum()).collect()))
            }
            (MapRule::Identity, GroupElement::Free(w)) => Ok(GroupElement::Product(vec![w.clone()])),
            (MapRule::Scale { factor }, GroupElement::Abelian(v)) => {
                Ok(GroupElement::Abelian(v.iter().map(|c| c * factor).collect()))
            }
            (MapRule::Projection { keep }, GroupElement::Abelian(v)) => {
                Ok(GroupElement::Abelian(keep.iter().map(|i| v[*i]).collect()))
            }
            (MapRule::Table { .. }, _) => self
                .table
                .iter()
                .find(|(a, _)| a == x)
                .map(|(_, b)| b.clone())
                .ok_or_else(|| Error::InvalidEmbedding(format!("no table entry for {}", self.source.format(x)))),
            _ => Err(Error::InvalidEmbedding("element outside the source family".into())),
        }
    }

    /// Source radius that contains every preimage of the target ball `j(e)[target_radius]`,
    /// derived from the lower witness.
    pub fn preimage_radius(&self, target_radius: u32) -> u32 {
        self.lower.last_at_most(target_radius as u64) as u32
    }

    /// `j⁻¹(S)` restricted to the source ball of radius `source_radius`.
    ///
    /// Fails when the lower witness cannot guarantee that all preimages fall in that ball.
    pub fn preimage(&self, s: &MetricSubset, source_radius: u32) -> Result<Vec<GroupElement>> {
        let targets = s.elements(&self.target)?;
        if targets.is_empty() {
            return Ok(Vec::new());
        }
        let base = self.apply(&self.source.identity())?;
        let mut reach = 0;
        for t in &targets {
            reach = reach.max(self.target.distance(&base, t)?);
        }
        let needed = self.preimage_radius(reach);
        if needed > source_radius {
            return Err(Error::PreimageExceedsWindow(format!(
                "preimage needs source radius {needed}, window is {source_radius}"
            )));
        }
        if let MapRule::Scale { factor } = self.rule {
            return Ok(targets
                .iter()
                .filter_map(|t| match t {
                    GroupElement::Abelian(v) if v.iter().all(|c| c % factor == 0) => {
                        Some(GroupElement::Abelian(v.iter().map(|c| c / factor).collect()))
                    }
                    _ => None,
                })
                .collect());
        }
        let mut out = Vec::new();
        for x in ball_elements(&self.source, &self.source.identity(), needed)? {
            if let Ok(y) = self.apply(&x) {
                if targets.binary_search(&y).is_ok() {
                    out.push(x);
                }
            }
        }
        Ok(out)
    }
}

/// Random pairs from the ball of radius `radius` (deterministic for a seed), plus
/// every pair `(e, x)`.
pub fn sample_pairs(spec: &GroupSpec, radius: u32, count: usize, seed: u64) -> Result<Vec<(GroupElement, GroupElement)>> {
    let pts = ball_elements(spec, &spec.identity(), radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = spec.identity();
    let mut out: Vec<_> = pts.iter().map(|p| (e.clone(), p.clone())).collect();
    for _ in 0..count {
        let a = pts.choose(&mut rng).expect("nonempty ball").clone();
        let b = pts.choose(&mut rng).expect("nonempty ball").clone();
        out.push((a, b));
    }
    Ok(out)
}

/// Checks `f(d₁(x,y)) ≤ d₂(j x, j y) ≤ g(d₁(x,y))` on every sampled pair.
pub fn verify_uniform_embedding(emb: &UniformEmbedding, pairs: &[(GroupElement, GroupElement)]) -> Result<ControlCertificate> {
    let mut radius = 0;
    for (x, y) in pairs {
        let d1 = emb.source.distance(x, y)?;
        radius = radius.max(d1);
        let d2 = emb.target.distance(&emb.apply(x)?, &emb.apply(y)?)?;
        let d2r = Ratio::from_integer(d2 as i128);
        let lower_ok = emb.lower.eval(d1 as u64) <= d2r;
        let upper_ok = d2r <= emb.upper.eval(d1 as u64);
        if !lower_ok || !upper_ok {
            return Ok(ControlCertificate::fail(CertificateKind::UniformEmbedding, 0, radius, Counterexample::Embedding {
                x: x.clone(),
                y: y.clone(),
                source_distance: d1,
                target_distance: d2,
                lower_side: !lower_ok,
            }));
        }
    }
    Ok(ControlCertificate::pass(CertificateKind::UniformEmbedding, 0, radius)
        .with_note(format!("{} sampled pairs", pairs.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_validation() {
        assert!(WitnessFn::new(vec![(0, 0)]).is_err());
        assert!(WitnessFn::new(vec![(0, 3), (1, 2)]).is_err());
        assert!(WitnessFn::new(vec![(0, 1), (4, 1)]).is_err());
        let w = WitnessFn::new(vec![(0, 0), (2, 1), (4, 5)]).unwrap();
        assert_eq!(w.eval(1), Ratio::new(1, 2));
        assert_eq!(w.eval(6), Ratio::from_integer(9));
    }

    #[test]
    fn doubling_preimage() {
        let z = GroupSpec::free_abelian(1);
        let emb = UniformEmbedding::new(z.clone(), z.clone(), MapRule::Scale { factor: 2 }, WitnessFn::linear(2), WitnessFn::linear(2)).unwrap();
        let s = MetricSubset::parse(&z, &["t^3".into(), "t^4".into(), "t^-2".into()]).unwrap();
        let pre = emb.preimage(&s, 10).unwrap();
        assert_eq!(pre, vec![z.parse_word("t^-1").unwrap(), z.parse_word("t^2").unwrap()]);
        assert!(emb.preimage(&s, 1).is_err());
    }

    #[test]
    fn lower_above_upper_rejected() {
        let z = GroupSpec::free_abelian(1);
        let r = UniformEmbedding::new(z.clone(), z, MapRule::Identity, WitnessFn::linear(2), WitnessFn::linear(1));
        assert!(r.is_err());
    }
}

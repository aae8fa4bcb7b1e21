//! Sampling plans: which finite subsets a window certificate quantifies over.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::space::group::{GroupElement, GroupSpec};
use crate::space::metric::ball_elements;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPlan {
    pub seed: u64,
    pub singletons: bool,
    /// Balls `x[k]` for `1 ≤ k ≤ max_ball_radius` centred in the half-radius ball.
    pub max_ball_radius: u32,
    pub random_subsets: usize,
    pub max_subset_size: usize,
    /// Adds `{x, x⁻¹}` subsets and `({x}, {x⁻¹})` pairs.
    pub antipodal: bool,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan { seed: 0, singletons: true, max_ball_radius: 3, random_subsets: 50, max_subset_size: 6, antipodal: true }
    }
}

fn canonical(mut v: Vec<GroupElement>) -> Vec<GroupElement> {
    v.sort();
    v.dedup();
    v
}

impl SamplingPlan {
    pub fn with_seed(seed: u64) -> Self {
        SamplingPlan { seed, ..SamplingPlan::default() }
    }

    /// A light plan for inner loops: no exhaustive singletons.
    pub fn light(seed: u64) -> Self {
        SamplingPlan { seed, singletons: false, max_ball_radius: 2, random_subsets: 20, ..SamplingPlan::default() }
    }

    pub fn describe(&self) -> String {
        format!(
            "seed {}; singletons {}; balls up to radius {}; {} random subsets of size <= {}; antipodal {}",
            self.seed, self.singletons, self.max_ball_radius, self.random_subsets, self.max_subset_size, self.antipodal
        )
    }

    fn balls(&self, space: &GroupSpec, inner: u32) -> Result<Vec<Vec<GroupElement>>> {
        let mut out = Vec::new();
        let centers = ball_elements(space, &space.identity(), inner / 2)?;
        for k in 1..=self.max_ball_radius {
            for x in &centers {
                if space.length(x)? + k <= inner {
                    out.push(ball_elements(space, x, k)?);
                }
            }
        }
        Ok(out)
    }

    fn random(&self, rng: &mut ChaCha8Rng, points: &[GroupElement], count: usize) -> Vec<Vec<GroupElement>> {
        (0..count)
            .map(|_| {
                let size = rng.gen_range(1..=self.max_subset_size.max(1));
                canonical((0..size).map(|_| points.choose(rng).expect("nonempty ball").clone()).collect())
            })
            .collect()
    }

    /// Subsets of the ball of radius `inner`, in a fixed order.
    pub fn subsets(&self, space: &GroupSpec, inner: u32) -> Result<Vec<Vec<GroupElement>>> {
        let points = ball_elements(space, &space.identity(), inner)?;
        let mut out = vec![Vec::new()];
        if self.singletons {
            out.extend(points.iter().map(|p| vec![p.clone()]));
        }
        out.extend(self.balls(space, inner)?);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        out.extend(self.random(&mut rng, &points, self.random_subsets));
        if self.antipodal {
            for p in &points {
                let q = space.inverse(p);
                if *p < q {
                    out.push(canonical(vec![p.clone(), q]));
                }
            }
        }
        Ok(out)
    }

    /// Pairs `(S, U)` of subsets of the ball of radius `inner`.
    pub fn pairs(&self, space: &GroupSpec, inner: u32) -> Result<Vec<(Vec<GroupElement>, Vec<GroupElement>)>> {
        let points = ball_elements(space, &space.identity(), inner)?;
        let mut out = Vec::new();
        if self.antipodal {
            for p in &points {
                let q = space.inverse(p);
                if *p <= q {
                    out.push((vec![p.clone()], vec![q]));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let centers = ball_elements(space, &space.identity(), inner / 2)?;
        for _ in 0..self.random_subsets {
            let k = rng.gen_range(0..=self.max_ball_radius);
            let x = centers.choose(&mut rng).expect("nonempty ball").clone();
            let offsets = ball_elements(space, &space.identity(), 2 * k + 1)?;
            let y = space.mul(&x, offsets.choose(&mut rng).expect("nonempty ball"));
            if space.length(&x)? + k <= inner && space.length(&y)? + k <= inner {
                out.push((ball_elements(space, &x, k)?, ball_elements(space, &y, k)?));
            }
        }
        let random = self.random(&mut rng, &points, self.random_subsets);
        for pair in random.chunks(2) {
            if let [a, b] = pair {
                out.push((a.clone(), b.clone()));
            }
        }
        Ok(out)
    }
}

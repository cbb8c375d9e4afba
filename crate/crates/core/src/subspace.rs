//! Random coordinate subspaces and their pairings.
//!
//! An intermediate subspace is a set of `m` coordinates of `R^d`. It is split
//! into `m / 2` disjoint coordinate pairs; each pair is a two-dimensional
//! subspace with a row-selection projection.

use rand::seq::{index::sample, SliceRandom};
use rand::Rng;

use crate::{Error, Result};

/// Projection onto the coordinates `(first, second)` of `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairProjection {
    pub first: usize,
    pub second: usize,
}

impl PairProjection {
    pub fn new(first: usize, second: usize) -> Result<Self> {
        if first == second {
            return Err(Error::param("pair coordinates must differ"));
        }
        Ok(Self { first, second })
    }

    fn check(&self, dim: usize) -> Result<()> {
        for index in [self.first, self.second] {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        Ok(())
    }

    pub fn project(&self, x: &[f64]) -> Result<[f64; 2]> {
        self.check(x.len())?;
        Ok([x[self.first], x[self.second]])
    }

    /// Copy of `base` with `delta` added on the pair's coordinates.
    pub fn lift(&self, delta: [f64; 2], base: &[f64]) -> Result<Vec<f64>> {
        let mut out = base.to_vec();
        self.lift_into(delta, &mut out)?;
        Ok(out)
    }

    pub fn lift_into(&self, delta: [f64; 2], x: &mut [f64]) -> Result<()> {
        self.check(x.len())?;
        x[self.first] += delta[0];
        x[self.second] += delta[1];
        Ok(())
    }
}

/// `m` distinct coordinates of `0..d`, sampled uniformly without replacement.
pub fn select_intermediate<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    if m < 2 || !m.is_multiple_of(2) || m > d {
        return Err(Error::param(format!(
            "subspace dimension must be even with 2 <= m <= d (m = {m}, d = {d})"
        )));
    }
    Ok(sample(rng, d, m).into_vec())
}

/// Shuffles `indices` and pairs consecutive entries.
pub fn pair_subspaces<R: Rng + ?Sized>(indices: &[usize], rng: &mut R) -> Result<Vec<PairProjection>> {
    if !indices.len().is_multiple_of(2) {
        return Err(Error::param("cannot pair an odd number of coordinates"));
    }
    let mut perm = indices.to_vec();
    perm.shuffle(rng);
    perm.chunks_exact(2).map(|c| PairProjection::new(c[0], c[1])).collect()
}

/// The subspaces used for one switching period.
#[derive(Debug, Clone)]
pub struct SubspacePlan {
    id: u64,
    dim_full: usize,
    indices: Vec<usize>,
    pairs: Vec<PairProjection>,
    created_at_step: u64,
}

impl SubspacePlan {
    pub fn draw<R: Rng + ?Sized>(d: usize, m: usize, id: u64, step: u64, rng: &mut R) -> Result<Self> {
        let indices = select_intermediate(d, m, rng)?;
        let pairs = pair_subspaces(&indices, rng)?;
        Ok(Self {
            id,
            dim_full: d,
            indices,
            pairs,
            created_at_step: step,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim_full(&self) -> usize {
        self.dim_full
    }

    pub fn dim_intermediate(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn pairs(&self) -> &[PairProjection] {
        &self.pairs
    }

    pub fn created_at_step(&self) -> u64 {
        self.created_at_step
    }
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, HashSet};

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn full_selection_when_m_equals_d() {
        let mut idx = select_intermediate(4, 4, &mut rng(3)).unwrap();
        idx.sort_unstable();
        assert_eq!(idx, vec![0, 1, 2, 3]);
    }

    #[test]
    fn selection_is_distinct_and_in_range() {
        for seed in 0..1000 {
            let idx = select_intermediate(123, 20, &mut rng(seed)).unwrap();
            assert_eq!(idx.len(), 20);
            assert_eq!(idx.iter().collect::<HashSet<_>>().len(), 20);
            assert!(idx.iter().all(|&i| i < 123));
        }
    }

    #[test]
    fn bad_subspace_dimensions() {
        let mut r = rng(0);
        assert!(select_intermediate(3, 4, &mut r).is_err());
        assert!(select_intermediate(10, 3, &mut r).is_err());
        assert!(select_intermediate(10, 0, &mut r).is_err());
        assert!(pair_subspaces(&[1, 2, 3], &mut r).is_err());
    }

    #[test]
    fn selection_frequency_is_uniform() {
        let mut counts = [0usize; 6];
        let trials = 10_000;
        for seed in 0..trials {
            for i in select_intermediate(6, 2, &mut rng(seed)).unwrap() {
                counts[i] += 1;
            }
        }
        for c in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 1.0 / 3.0).abs() <= 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn pairing_small_cases() {
        let mut r = rng(1);
        let single = pair_subspaces(&[5, 9], &mut r).unwrap();
        assert_eq!(single.len(), 1);
        let p = single[0];
        assert_eq!(BTreeSet::from([p.first, p.second]), BTreeSet::from([5, 9]));
        assert!(pair_subspaces(&[], &mut r).unwrap().is_empty());
    }

    #[test]
    fn pairing_of_four_hits_every_perfect_matching() {
        // The three perfect matchings of {0, 1, 2, 3}, enumerated by hand.
        let matchings: [BTreeSet<BTreeSet<usize>>; 3] = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]]
            .map(|m| m.iter().map(|p| p.iter().copied().collect()).collect());
        let mut seen = [false; 3];
        for seed in 0..200 {
            let pairs = pair_subspaces(&[0, 1, 2, 3], &mut rng(seed)).unwrap();
            let got: BTreeSet<BTreeSet<usize>> = pairs.iter().map(|p| BTreeSet::from([p.first, p.second])).collect();
            let which = matchings.iter().position(|m| *m == got).expect("not a matching");
            seen[which] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn project_and_lift() {
        let p = PairProjection::new(0, 2).unwrap();
        assert_eq!(p.project(&[7.0, 8.0, 9.0]).unwrap(), [7.0, 9.0]);
        assert_eq!(p.lift([1.0, -1.0], &[0.0; 3]).unwrap(), vec![1.0, 0.0, -1.0]);
        assert_eq!(p.lift([0.0, 0.0], &[4.0, 5.0, 6.0]).unwrap(), vec![4.0, 5.0, 6.0]);
        let swapped = PairProjection::new(1, 0).unwrap();
        assert_eq!(swapped.project(&[3.0, 4.0]).unwrap(), [4.0, 3.0]);
        assert!(matches!(
            p.project(&[1.0, 2.0]),
            Err(Error::IndexOutOfRange { index: 2, dim: 2 })
        ));
        assert!(p.lift([1.0, 1.0], &[0.0]).is_err());
    }

    #[test]
    fn plan_pairs_partition_indices() {
        let plan = SubspacePlan::draw(30, 12, 4, 40, &mut rng(9)).unwrap();
        assert_eq!(plan.pairs().len(), 6);
        let mut covered: Vec<usize> = plan.pairs().iter().flat_map(|p| [p.first, p.second]).collect();
        covered.sort_unstable();
        let mut idx = plan.indices().to_vec();
        idx.sort_unstable();
        assert_eq!(covered, idx);
        assert_eq!((plan.id(), plan.created_at_step(), plan.dim_full()), (4, 40, 30));
    }

    proptest! {
        #[test]
        fn lifts_on_disjoint_pairs_commute(
            x in prop::collection::vec(-10.0f64..10.0, 6),
            d1 in prop::array::uniform2(-5.0f64..5.0),
            d2 in prop::array::uniform2(-5.0f64..5.0),
            seed in any::<u64>(),
        ) {
            let pairs = pair_subspaces(&[0, 1, 2, 3, 4, 5], &mut rng(seed)).unwrap();
            let (p, q) = (pairs[0], pairs[1]);
            let a = p.lift(d1, &q.lift(d2, &x).unwrap()).unwrap();
            let b = q.lift(d2, &p.lift(d1, &x).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn project_after_lift_adds_delta(
            x in prop::collection::vec(-10.0f64..10.0, 5),
            delta in prop::array::uniform2(-5.0f64..5.0),
            i in 0usize..5, j in 0usize..5,
        ) {
            prop_assume!(i != j);
            let p = PairProjection::new(i, j).unwrap();
            let before = p.project(&x).unwrap();
            let after = p.project(&p.lift(delta, &x).unwrap()).unwrap();
            prop_assert_eq!(after, [before[0] + delta[0], before[1] + delta[1]]);
        }

        #[test]
        fn accumulated_update_restricts_to_each_pair(
            ws in prop::collection::vec(prop::array::uniform2(-5.0f64..5.0), 4),
            seed in any::<u64>(),
        ) {
            let plan = SubspacePlan::draw(15, 8, 0, 0, &mut rng(seed)).unwrap();
            let mut v = vec![0.0; 15];
            for (p, w) in plan.pairs().iter().zip(&ws) {
                p.lift_into(*w, &mut v).unwrap();
            }
            for (i, vi) in v.iter().enumerate() {
                if !plan.indices().contains(&i) {
                    prop_assert_eq!(*vi, 0.0);
                }
            }
            for (p, w) in plan.pairs().iter().zip(&ws) {
                prop_assert_eq!(p.project(&v).unwrap(), *w);
            }
        }
    }
}

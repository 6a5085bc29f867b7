//! Auction instances: per-buyer discrete priors, downward-closed feasibility
//! systems, and exhaustive enumeration of type profiles.

use crate::rational::Rat;
use num::{One, Signed, Zero};
use std::collections::BTreeSet;

/// Hard cap on explicitly stored feasible winner sets.
pub const MAX_FEASIBLE_SETS: usize = 1 << 20;

/// Default cap on the number of enumerated type profiles.
pub const DEFAULT_PROFILE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("support and probability lists have different lengths ({support} vs {probs})")]
    LengthMismatch { support: usize, probs: usize },
    #[error("support must be strictly increasing")]
    NonIncreasingSupport,
    #[error("every probability mass must be positive")]
    NonPositiveMass,
    #[error("probability masses must sum to one")]
    MassNotOne,
    #[error("support values must be strictly positive")]
    NonPositiveValue,
    #[error("distribution needs at least one support point")]
    EmptySupport,
    #[error("need at least one buyer")]
    NoBuyers,
    #[error("item count must satisfy 1 <= s <= n (got s={s}, n={n})")]
    BadCardinality { s: usize, n: usize },
    #[error("buyer {buyer} has an empty bundle")]
    EmptyBundle { buyer: usize },
    #[error("set {0:?} is feasible but its subset {1:?} is not")]
    NotDownwardClosed(Vec<usize>, Vec<usize>),
    #[error("buyer {0} appears in no feasible set")]
    BuyerNeverWins(usize),
    #[error("buyer index {index} out of range for {n} buyers")]
    BuyerIndexOutOfRange { index: usize, n: usize },
    #[error("feasibility system would exceed the {MAX_FEASIBLE_SETS}-set cap")]
    TooManySets,
    #[error("feasibility system is for {expected} buyers but instance has {got}")]
    BuyerCountMismatch { expected: usize, got: usize },
    #[error("profile space has {size} profiles, above the cap of {cap}")]
    ProfileSpaceTooLarge { size: u64, cap: u64 },
}

/// One buyer's finite prior: strictly increasing positive support values and
/// positive masses summing exactly to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationDistribution {
    support: Vec<Rat>,
    probs: Vec<Rat>,
}

impl ValuationDistribution {
    pub fn new(support: Vec<Rat>, probs: Vec<Rat>) -> Result<Self, ModelError> {
        if support.len() != probs.len() {
            return Err(ModelError::LengthMismatch {
                support: support.len(),
                probs: probs.len(),
            });
        }
        if support.is_empty() {
            return Err(ModelError::EmptySupport);
        }
        if support.iter().any(|x| !x.is_positive()) {
            return Err(ModelError::NonPositiveValue);
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::NonIncreasingSupport);
        }
        if probs.iter().any(|p| !p.is_positive()) {
            return Err(ModelError::NonPositiveMass);
        }
        if probs.iter().sum::<Rat>() != Rat::one() {
            return Err(ModelError::MassNotOne);
        }
        Ok(Self { support, probs })
    }

    /// Convenience constructor for a binary (low, high) prior with
    /// `P[high] = p_high`.
    pub fn binary(low: Rat, high: Rat, p_high: Rat) -> Result<Self, ModelError> {
        let p_low = Rat::one() - &p_high;
        Self::new(vec![low, high], vec![p_low, p_high])
    }

    /// Number of support points, K.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty supports
    }

    pub fn support(&self) -> &[Rat] {
        &self.support
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    pub fn expectation(&self) -> Rat {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| x * p)
            .sum()
    }

    /// Tail mass P[X >= x^i] for a 0-based support index.
    pub fn tail_mass(&self, i: usize) -> Rat {
        self.probs[i..].iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityKind {
    SingleItem,
    IdenticalItems(usize),
    SingleMinded(Vec<BTreeSet<String>>),
    Explicit,
}

/// The downward-closed collection of feasible winner sets, stored explicitly
/// with each member in canonical sorted form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilitySystem {
    n_buyers: usize,
    sets: Vec<Vec<usize>>,
    kind: FeasibilityKind,
}

impl FeasibilitySystem {
    /// Single item: the empty set plus all singletons.
    pub fn single_item(n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::NoBuyers);
        }
        let mut sets = vec![Vec::new()];
        sets.extend((0..n).map(|i| vec![i]));
        Ok(Self::from_canonical(n, sets, FeasibilityKind::SingleItem))
    }

    /// S identical items: all buyer subsets of size at most `s`.
    pub fn identical_items(n: usize, s: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::NoBuyers);
        }
        if s < 1 || s > n {
            return Err(ModelError::BadCardinality { s, n });
        }
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        sets.push(Vec::new());
        for _ in 0..s {
            let mut next = Vec::new();
            for set in &frontier {
                let start = set.last().map_or(0, |&l| l + 1);
                for b in start..n {
                    let mut grown = set.clone();
                    grown.push(b);
                    if sets.len() + next.len() + 1 > MAX_FEASIBLE_SETS {
                        return Err(ModelError::TooManySets);
                    }
                    next.push(grown);
                }
            }
            sets.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(Self::from_canonical(
            n,
            sets,
            FeasibilityKind::IdenticalItems(s),
        ))
    }

    /// Single-minded buyers with known bundles: a buyer set is feasible iff
    /// the bundles inside it are pairwise disjoint.
    pub fn single_minded(bundles: &[BTreeSet<String>]) -> Result<Self, ModelError> {
        let n = bundles.len();
        if n == 0 {
            return Err(ModelError::NoBuyers);
        }
        for (i, b) in bundles.iter().enumerate() {
            if b.is_empty() {
                return Err(ModelError::EmptyBundle { buyer: i });
            }
        }
        let conflict: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| i != j && !bundles[i].is_disjoint(&bundles[j]))
                    .collect()
            })
            .collect();
        // Enumerate independent sets of the conflict graph.
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(set) = stack.pop() {
            if sets.len() >= MAX_FEASIBLE_SETS {
                return Err(ModelError::TooManySets);
            }
            let start = set.last().map_or(0, |&l| l + 1);
            for b in start..n {
                if set.iter().any(|&m| conflict[m][b]) {
                    continue;
                }
                let mut grown = set.clone();
                grown.push(b);
                stack.push(grown);
            }
            sets.push(set);
        }
        Ok(Self::from_canonical(
            n,
            sets,
            FeasibilityKind::SingleMinded(bundles.to_vec()),
        ))
    }

    /// Explicit sets. With `autoclose` the downward closure (plus the empty
    /// set) is added; otherwise closure is validated and violations reported.
    pub fn explicit(n: usize, sets: &[Vec<usize>], autoclose: bool) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::NoBuyers);
        }
        let mut canonical: BTreeSet<Vec<usize>> = BTreeSet::new();
        for set in sets {
            let mut s: Vec<usize> = set.clone();
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&b| b >= n) {
                return Err(ModelError::BuyerIndexOutOfRange { index: bad, n });
            }
            canonical.insert(s);
        }
        if autoclose {
            canonical.insert(Vec::new());
            let mut queue: Vec<Vec<usize>> = canonical.iter().cloned().collect();
            while let Some(set) = queue.pop() {
                for drop in 0..set.len() {
                    let mut sub = set.clone();
                    sub.remove(drop);
                    if canonical.insert(sub.clone()) {
                        if canonical.len() > MAX_FEASIBLE_SETS {
                            return Err(ModelError::TooManySets);
                        }
                        queue.push(sub);
                    }
                }
            }
        } else {
            if !canonical.contains(&Vec::new()) {
                return Err(ModelError::NotDownwardClosed(
                    canonical.iter().next().cloned().unwrap_or_default(),
                    Vec::new(),
                ));
            }
            for set in &canonical {
                for drop in 0..set.len() {
                    let mut sub = set.clone();
                    sub.remove(drop);
                    if !canonical.contains(&sub) {
                        return Err(ModelError::NotDownwardClosed(set.clone(), sub));
                    }
                }
            }
        }
        let covered: BTreeSet<usize> = canonical.iter().flatten().copied().collect();
        if let Some(missing) = (0..n).find(|b| !covered.contains(b)) {
            return Err(ModelError::BuyerNeverWins(missing));
        }
        Ok(Self::from_canonical(
            n,
            canonical.into_iter().collect(),
            FeasibilityKind::Explicit,
        ))
    }

    fn from_canonical(n: usize, mut sets: Vec<Vec<usize>>, kind: FeasibilityKind) -> Self {
        sets.sort();
        sets.dedup();
        Self {
            n_buyers: n,
            sets,
            kind,
        }
    }

    pub fn n_buyers(&self) -> usize {
        self.n_buyers
    }

    /// All feasible winner sets, each sorted ascending, in lexicographic order.
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn kind(&self) -> &FeasibilityKind {
        &self.kind
    }

    pub fn contains(&self, set: &[usize]) -> bool {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        self.sets.binary_search(&s).is_ok()
    }
}

/// N buyers plus a feasibility system; the object everything evaluates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionInstance {
    buyers: Vec<ValuationDistribution>,
    feasibility: FeasibilitySystem,
}

impl AuctionInstance {
    pub fn new(
        buyers: Vec<ValuationDistribution>,
        feasibility: FeasibilitySystem,
    ) -> Result<Self, ModelError> {
        if buyers.is_empty() {
            return Err(ModelError::NoBuyers);
        }
        if feasibility.n_buyers() != buyers.len() {
            return Err(ModelError::BuyerCountMismatch {
                expected: feasibility.n_buyers(),
                got: buyers.len(),
            });
        }
        Ok(Self {
            buyers,
            feasibility,
        })
    }

    pub fn n_buyers(&self) -> usize {
        self.buyers.len()
    }

    pub fn buyers(&self) -> &[ValuationDistribution] {
        &self.buyers
    }

    pub fn buyer(&self, n: usize) -> &ValuationDistribution {
        &self.buyers[n]
    }

    pub fn feasibility(&self) -> &FeasibilitySystem {
        &self.feasibility
    }

    /// Number of type profiles, saturating at u64::MAX.
    pub fn profile_count(&self) -> u64 {
        self.buyers
            .iter()
            .fold(1u64, |acc, b| acc.saturating_mul(b.len() as u64))
    }

    /// Exhaustive profile stream under the default cap.
    pub fn profiles(&self) -> Result<ProfileIter<'_>, ModelError> {
        self.profiles_capped(DEFAULT_PROFILE_CAP)
    }

    pub fn profiles_capped(&self, cap: u64) -> Result<ProfileIter<'_>, ModelError> {
        let size = self.profile_count();
        if size > cap {
            return Err(ModelError::ProfileSpaceTooLarge { size, cap });
        }
        Ok(ProfileIter {
            instance: self,
            indices: vec![0; self.buyers.len()],
            done: false,
        })
    }
}

/// One joint type realization together with its probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeProfile {
    /// 0-based support index per buyer.
    pub indices: Vec<usize>,
    /// Support value per buyer.
    pub values: Vec<Rat>,
    /// Product of per-buyer masses (buyers are independent).
    pub probability: Rat,
}

impl TypeProfile {
    /// Builds the profile for given support indices.
    pub fn from_indices(instance: &AuctionInstance, indices: &[usize]) -> Self {
        let values = indices
            .iter()
            .enumerate()
            .map(|(n, &i)| instance.buyer(n).support()[i].clone())
            .collect();
        let probability = indices
            .iter()
            .enumerate()
            .map(|(n, &i)| instance.buyer(n).probs()[i].clone())
            .fold(Rat::one(), |acc, p| acc * p);
        Self {
            indices: indices.to_vec(),
            values,
            probability,
        }
    }
}

/// Mixed-radix enumeration of all type profiles.
pub struct ProfileIter<'a> {
    instance: &'a AuctionInstance,
    indices: Vec<usize>,
    done: bool,
}

impl<'a> Iterator for ProfileIter<'a> {
    type Item = TypeProfile;

    fn next(&mut self) -> Option<TypeProfile> {
        if self.done {
            return None;
        }
        let profile = TypeProfile::from_indices(self.instance, &self.indices);
        // Advance the counter, least-significant buyer last.
        let mut pos = self.indices.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.indices[pos] += 1;
            if self.indices[pos] < self.instance.buyer(pos).len() {
                break;
            }
            self.indices[pos] = 0;
        }
        Some(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratq};

    fn example1_buyer() -> ValuationDistribution {
        ValuationDistribution::new(vec![rat(1), rat(2)], vec![ratq(1, 3), ratq(2, 3)]).unwrap()
    }

    pub(crate) fn example1_instance() -> AuctionInstance {
        AuctionInstance::new(
            vec![example1_buyer(), example1_buyer()],
            FeasibilitySystem::single_item(2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(example1_buyer().len() == 2);
        assert!(ValuationDistribution::new(vec![rat(5)], vec![rat(1)]).is_ok());
        assert_eq!(
            ValuationDistribution::new(vec![rat(1), rat(2)], vec![ratq(1, 2), ratq(1, 3)]),
            Err(ModelError::MassNotOne)
        );
        assert_eq!(
            ValuationDistribution::new(vec![rat(2), rat(1)], vec![ratq(1, 2), ratq(1, 2)]),
            Err(ModelError::NonIncreasingSupport)
        );
        assert_eq!(
            ValuationDistribution::new(vec![rat(0), rat(1)], vec![ratq(1, 2), ratq(1, 2)]),
            Err(ModelError::NonPositiveValue)
        );
        assert_eq!(
            ValuationDistribution::new(vec![rat(1), rat(2)], vec![ratq(3, 2), ratq(-1, 2)]),
            Err(ModelError::NonPositiveMass)
        );
        assert_eq!(
            ValuationDistribution::new(vec![rat(1)], vec![rat(1), rat(0)]),
            Err(ModelError::LengthMismatch {
                support: 1,
                probs: 2
            })
        );
    }

    #[test]
    fn single_item_systems() {
        let fs = FeasibilitySystem::single_item(2).unwrap();
        assert_eq!(fs.sets(), &[vec![], vec![0], vec![1]]);
        let fs1 = FeasibilitySystem::single_item(1).unwrap();
        assert_eq!(fs1.sets(), &[vec![], vec![0]]);
        let fs3 = FeasibilitySystem::single_item(3).unwrap();
        assert_eq!(fs3.sets().len(), 4);
        assert_downward_closed(&fs3);
    }

    #[test]
    fn identical_items_counts() {
        assert_eq!(
            FeasibilitySystem::identical_items(3, 1).unwrap().sets(),
            FeasibilitySystem::single_item(3).unwrap().sets()
        );
        assert_eq!(FeasibilitySystem::identical_items(3, 3).unwrap().sets().len(), 8);
        let fs = FeasibilitySystem::identical_items(4, 2).unwrap();
        assert_eq!(fs.sets().len(), 1 + 4 + 6);
        assert_downward_closed(&fs);
        assert_eq!(
            FeasibilitySystem::identical_items(3, 4),
            Err(ModelError::BadCardinality { s: 4, n: 3 })
        );
    }

    fn bundle(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_minded_systems() {
        // Bundles AB, BC, CD: buyers 0 and 2 are compatible, buyer 1 conflicts with both.
        let fs = FeasibilitySystem::single_minded(&[
            bundle(&["A", "B"]),
            bundle(&["B", "C"]),
            bundle(&["C", "D"]),
        ])
        .unwrap();
        assert_eq!(fs.sets(), &[vec![], vec![0], vec![0, 2], vec![1], vec![2]]);

        let disjoint = FeasibilitySystem::single_minded(&[bundle(&["A"]), bundle(&["B"])]).unwrap();
        assert_eq!(disjoint.sets().len(), 4);

        let clash = FeasibilitySystem::single_minded(&[bundle(&["A"]), bundle(&["A"])]).unwrap();
        assert_eq!(clash.sets(), &[vec![], vec![0], vec![1]]);

        assert_eq!(
            FeasibilitySystem::single_minded(&[bundle(&[])]),
            Err(ModelError::EmptyBundle { buyer: 0 })
        );
    }

    #[test]
    fn explicit_systems() {
        let fs = FeasibilitySystem::explicit(2, &[vec![0, 1]], true).unwrap();
        assert_eq!(fs.sets(), &[vec![], vec![0], vec![0, 1], vec![1]]);
        assert!(matches!(
            FeasibilitySystem::explicit(2, &[vec![0, 1]], false),
            Err(ModelError::NotDownwardClosed(..))
        ));
        let fs = FeasibilitySystem::explicit(3, &[vec![0, 1], vec![2]], true).unwrap();
        assert_eq!(fs.sets().len(), 6);
        assert_downward_closed(&fs);
        assert_eq!(
            FeasibilitySystem::explicit(3, &[vec![0, 1]], true),
            Err(ModelError::BuyerNeverWins(2))
        );
        assert_eq!(
            FeasibilitySystem::explicit(2, &[vec![0, 5]], true),
            Err(ModelError::BuyerIndexOutOfRange { index: 5, n: 2 })
        );
    }

    fn assert_downward_closed(fs: &FeasibilitySystem) {
        assert!(fs.contains(&[]));
        for set in fs.sets() {
            for drop in 0..set.len() {
                let mut sub = set.clone();
                sub.remove(drop);
                assert!(fs.contains(&sub), "missing subset {sub:?} of {set:?}");
            }
        }
        for b in 0..fs.n_buyers() {
            assert!(fs.sets().iter().any(|s| s.contains(&b)));
        }
    }

    #[test]
    fn profile_enumeration_probabilities() {
        let inst = example1_instance();
        let profiles: Vec<_> = inst.profiles().unwrap().collect();
        assert_eq!(profiles.len(), 4);
        let total: Rat = profiles.iter().map(|p| p.probability.clone()).sum();
        assert_eq!(total, rat(1));
        for p in &profiles {
            assert!([ratq(1, 9), ratq(2, 9), ratq(4, 9)].contains(&p.probability));
        }

        let single = AuctionInstance::new(
            vec![ValuationDistribution::new(vec![rat(5)], vec![rat(1)]).unwrap()],
            FeasibilitySystem::single_item(1).unwrap(),
        )
        .unwrap();
        let ps: Vec<_> = single.profiles().unwrap().collect();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].probability, rat(1));

        let binary = ValuationDistribution::binary(rat(1), rat(2), ratq(1, 2)).unwrap();
        let iid3 = AuctionInstance::new(
            vec![binary.clone(), binary.clone(), binary],
            FeasibilitySystem::single_item(3).unwrap(),
        )
        .unwrap();
        let ps: Vec<_> = iid3.profiles().unwrap().collect();
        assert_eq!(ps.len(), 8);
        assert_eq!(ps.iter().map(|p| p.probability.clone()).sum::<Rat>(), rat(1));
    }

    #[test]
    fn profile_cap_enforced() {
        let inst = example1_instance();
        assert!(matches!(
            inst.profiles_capped(3),
            Err(ModelError::ProfileSpaceTooLarge { size: 4, cap: 3 })
        ));
    }
}

//! Ranking measures and their `f(σ)·g(r)` decompositions.
//!
//! SumLoss, DCG and Prec@k are linear in a per-object relevance transform:
//! `measure(σ, r) = Σ_i f(σ(i)) · g(r(i))`. PairwiseLoss differs from SumLoss
//! by an `r`-dependent constant on binary relevance. NDCG, MAP and AUC are
//! normalized and have no such form.
//!
//! Zero-relevance conventions: `NDCG(·, 0) = MAP(·, 0) = 1`, `AUC(·, r) = 0`
//! whenever no (relevant, irrelevant) pair exists.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{RankError, Result};
use crate::permutation::Permutation;
use crate::relevance::RelevanceVector;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Loss,
    Gain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    SumLoss,
    PairwiseLoss,
    Dcg,
    PrecAtK(usize),
    Ndcg,
    Map,
    Auc,
}

impl Measure {
    pub fn polarity(self) -> Polarity {
        match self {
            Measure::SumLoss | Measure::PairwiseLoss | Measure::Auc => Polarity::Loss,
            Measure::Dcg | Measure::PrecAtK(_) | Measure::Ndcg | Measure::Map => Polarity::Gain,
        }
    }

    pub fn supports_graded(self) -> bool {
        matches!(self, Measure::Dcg | Measure::Ndcg)
    }

    pub fn is_normalized(self) -> bool {
        matches!(self, Measure::Ndcg | Measure::Map | Measure::Auc)
    }

    /// The linear measure a learner optimises in place of `self`.
    ///
    /// PairwiseLoss maps to SumLoss (equal regret on binary relevance);
    /// normalized measures have none.
    pub fn linear_surrogate(self) -> Option<Measure> {
        match self {
            Measure::SumLoss | Measure::PairwiseLoss => Some(Measure::SumLoss),
            Measure::Dcg | Measure::PrecAtK(_) => Some(self),
            Measure::Ndcg | Measure::Map | Measure::Auc => None,
        }
    }

    /// `f^s(rank)` for a 1-based rank.
    pub fn f_component<S: Scalar>(self, rank: usize) -> Result<S> {
        match self {
            Measure::SumLoss | Measure::PairwiseLoss => Ok(S::from_count(rank as u64)),
            Measure::Dcg | Measure::Ndcg => S::log_discount(rank)
                .ok_or_else(|| RankError::NotRepresentable(format!("1/log2(1+{rank})"))),
            Measure::PrecAtK(k) => Ok(if rank <= k { S::one() } else { S::zero() }),
            Measure::Map | Measure::Auc => Err(RankError::NotDecomposable { measure: self }),
        }
    }

    /// `g^s(level)`: `2^level - 1` for DCG/NDCG, identity otherwise.
    pub fn g_component(self, level: u32) -> u64 {
        if self.supports_graded() {
            (1u64 << level) - 1
        } else {
            u64::from(level)
        }
    }

    /// Evaluates the measure on one (ranking, relevance) pair.
    pub fn evaluate<S: Scalar>(self, sigma: &Permutation, r: &RelevanceVector) -> Result<S> {
        match self {
            Measure::SumLoss => sum_loss(sigma, r).map(S::from_count),
            Measure::PairwiseLoss => pairwise_loss(sigma, r).map(S::from_count),
            Measure::Dcg => dcg(sigma, r),
            Measure::PrecAtK(k) => prec_at_k(sigma, r, k).map(S::from_count),
            Measure::Ndcg => ndcg(sigma, r),
            Measure::Map => map(sigma, r),
            Measure::Auc => auc(sigma, r),
        }
    }

    /// Rejects `r` if this measure cannot be evaluated on it.
    pub fn check_relevance(self, r: &RelevanceVector) -> Result<()> {
        if !self.supports_graded() && !r.is_binary() {
            return Err(RankError::NonBinary { measure: self });
        }
        Ok(())
    }

    pub fn name(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::SumLoss => f.write_str("sumloss"),
            Measure::PairwiseLoss => f.write_str("pairwise"),
            Measure::Dcg => f.write_str("dcg"),
            Measure::PrecAtK(k) => write!(f, "prec@{k}"),
            Measure::Ndcg => f.write_str("ndcg"),
            Measure::Map => f.write_str("map"),
            Measure::Auc => f.write_str("auc"),
        }
    }
}

impl FromStr for Measure {
    type Err = RankError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(k) = lower.strip_prefix("prec@") {
            return k
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1)
                .map(Measure::PrecAtK)
                .ok_or_else(|| RankError::InvalidConfig(format!("bad precision cutoff in {s:?}")));
        }
        match lower.as_str() {
            "sumloss" => Ok(Measure::SumLoss),
            "pairwise" | "pairwiseloss" | "pl" => Ok(Measure::PairwiseLoss),
            "dcg" => Ok(Measure::Dcg),
            "ndcg" => Ok(Measure::Ndcg),
            "map" => Ok(Measure::Map),
            "auc" => Ok(Measure::Auc),
            _ => Err(RankError::InvalidConfig(format!("unknown measure {s:?}"))),
        }
    }
}

fn check_len(sigma: &Permutation, r: &RelevanceVector) -> Result<()> {
    if sigma.len() != r.len() {
        return Err(RankError::DimensionMismatch {
            expected: sigma.len(),
            found: r.len(),
        });
    }
    Ok(())
}

fn check_binary(measure: Measure, r: &RelevanceVector) -> Result<()> {
    if !r.is_binary() {
        return Err(RankError::NonBinary { measure });
    }
    Ok(())
}

/// `Σ_i σ(i) r(i)`.
pub fn sum_loss(sigma: &Permutation, r: &RelevanceVector) -> Result<u64> {
    check_len(sigma, r)?;
    check_binary(Measure::SumLoss, r)?;
    Ok(sigma
        .ranks()
        .iter()
        .zip(r.levels())
        .map(|(&rank, &l)| rank as u64 * u64::from(l))
        .sum())
}

/// Number of (irrelevant above relevant) pairs.
pub fn pairwise_loss(sigma: &Permutation, r: &RelevanceVector) -> Result<u64> {
    check_len(sigma, r)?;
    check_binary(Measure::PairwiseLoss, r)?;
    // walk top to bottom, counting irrelevant objects seen so far
    let mut irrelevant_above = 0u64;
    let mut total = 0u64;
    for obj in sigma.inverse() {
        if r.level(obj) == 0 {
            irrelevant_above += 1;
        } else {
            total += irrelevant_above;
        }
    }
    Ok(total)
}

/// `Σ_i (2^{r(i)} - 1) / log2(1 + σ(i))`; graded relevance allowed.
pub fn dcg<S: Scalar>(sigma: &Permutation, r: &RelevanceVector) -> Result<S> {
    check_len(sigma, r)?;
    let mut total = S::zero();
    for (obj, &level) in r.levels().iter().enumerate() {
        if level == 0 {
            continue;
        }
        let gain = S::from_count(Measure::Dcg.g_component(level));
        total = total + gain * Measure::Dcg.f_component::<S>(sigma.rank_of(obj))?;
    }
    Ok(total)
}

/// Number of relevant objects in the top `k` ranks.
pub fn prec_at_k(sigma: &Permutation, r: &RelevanceVector, k: usize) -> Result<u64> {
    check_len(sigma, r)?;
    if k == 0 || k > sigma.len() {
        return Err(RankError::KOutOfRange { k, m: sigma.len() });
    }
    check_binary(Measure::PrecAtK(k), r)?;
    Ok(sigma
        .ranks()
        .iter()
        .zip(r.levels())
        .filter(|&(&rank, &l)| rank <= k && l == 1)
        .count() as u64)
}

/// DCG of the ideal ranking; 1 for the all-zero vector.
pub fn ndcg_normalizer<S: Scalar>(r: &RelevanceVector) -> Result<S> {
    if r.is_zero() {
        return Ok(S::one());
    }
    let mut sorted = r.levels().to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut z = S::zero();
    for (pos, &level) in sorted.iter().enumerate().take_while(|(_, &l)| l > 0) {
        let gain = S::from_count(Measure::Ndcg.g_component(level));
        z = z + gain * Measure::Ndcg.f_component::<S>(pos + 1)?;
    }
    Ok(z)
}

pub fn ndcg<S: Scalar>(sigma: &Permutation, r: &RelevanceVector) -> Result<S> {
    check_len(sigma, r)?;
    if r.is_zero() {
        return Ok(S::one());
    }
    Ok(dcg::<S>(sigma, r)? / ndcg_normalizer::<S>(r)?)
}

/// Mean over relevant objects of the precision at their rank; 1 for the all-zero vector.
pub fn map<S: Scalar>(sigma: &Permutation, r: &RelevanceVector) -> Result<S> {
    check_len(sigma, r)?;
    check_binary(Measure::Map, r)?;
    let relevant = r.count_relevant() as u64;
    if relevant == 0 {
        return Ok(S::one());
    }
    let mut hits = 0u64;
    let mut total = S::zero();
    for (pos, obj) in sigma.inverse().into_iter().enumerate() {
        if r.level(obj) == 1 {
            hits += 1;
            total = total + S::ratio(hits, pos as u64 + 1);
        }
    }
    Ok(total / S::from_count(relevant))
}

/// `(#relevant) · (#irrelevant)`.
pub fn auc_normalizer(r: &RelevanceVector) -> Result<u64> {
    check_binary(Measure::Auc, r)?;
    let k = r.count_relevant() as u64;
    Ok(k * (r.len() as u64 - k))
}

/// Fraction of (relevant, irrelevant) pairs ordered wrongly; 0 when there is no such pair.
pub fn auc<S: Scalar>(sigma: &Permutation, r: &RelevanceVector) -> Result<S> {
    check_len(sigma, r)?;
    check_binary(Measure::Auc, r)?;
    let n = auc_normalizer(r)?;
    if n == 0 {
        return Ok(S::zero());
    }
    Ok(S::ratio(pairwise_loss(sigma, r)?, n))
}

/// `M(y)`: the ranking that places higher scores at better ranks.
///
/// This minimises `σ·y` and maximises `f(σ)·y` for every monotone-decreasing
/// `f`, so it serves loss and gain measures alike. Ties go to the lower object
/// index; incomparable values (NaN) are treated as ties.
pub fn sort_oracle<S: PartialOrd>(y: &[S]) -> Permutation {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[b].partial_cmp(&y[a]).unwrap_or(Ordering::Equal));
    Permutation::from_order(&order).expect("sorted indices form a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn p(r: &[usize]) -> Permutation {
        Permutation::new(r.to_vec()).unwrap()
    }
    fn b(r: &[u32]) -> RelevanceVector {
        RelevanceVector::binary(r.to_vec()).unwrap()
    }

    #[test]
    fn sum_loss_values() {
        assert_eq!(sum_loss(&p(&[2, 1, 3]), &b(&[0, 1, 1])).unwrap(), 4);
        assert_eq!(sum_loss(&p(&[3, 1, 2]), &b(&[0, 0, 0])).unwrap(), 0);
        assert_eq!(sum_loss(&p(&[1, 2, 3]), &b(&[1, 1, 1])).unwrap(), 6);
        let graded = RelevanceVector::new(vec![0, 2, 0], 2).unwrap();
        assert!(matches!(
            sum_loss(&p(&[1, 2, 3]), &graded),
            Err(RankError::NonBinary { .. })
        ));
        assert!(matches!(
            sum_loss(&p(&[1, 2]), &b(&[0, 1, 1])),
            Err(RankError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pairwise_loss_values() {
        assert_eq!(pairwise_loss(&p(&[1, 2, 3]), &b(&[0, 1, 0])).unwrap(), 1);
        assert_eq!(pairwise_loss(&p(&[2, 3, 1]), &b(&[1, 1, 1])).unwrap(), 0);
        assert_eq!(pairwise_loss(&p(&[3, 2, 1]), &b(&[0, 0, 1])).unwrap(), 0);
        // (3,2,1) with r = (1,0,0): object 0 sits below both irrelevant objects
        assert_eq!(pairwise_loss(&p(&[3, 2, 1]), &b(&[1, 0, 0])).unwrap(), 2);
    }

    #[test]
    fn dcg_values() {
        let v: f64 = dcg(&p(&[1, 2, 3]), &b(&[0, 0, 1])).unwrap();
        assert_eq!(v, 0.5);
        let v: f64 = dcg(&p(&[2, 3, 1]), &b(&[0, 0, 0])).unwrap();
        assert_eq!(v, 0.0);
        let graded = RelevanceVector::new(vec![2, 0], 2).unwrap();
        let v: f64 = dcg(&p(&[1, 2]), &graded).unwrap();
        assert_eq!(v, 3.0);
        // exact when only power-of-two discounts are touched
        let v: Rational = dcg(&p(&[1, 2, 3]), &b(&[1, 0, 1])).unwrap();
        assert_eq!(v, Rational::new(3, 2));
        assert!(dcg::<Rational>(&p(&[1, 2, 3]), &b(&[0, 1, 0])).is_err());
    }

    #[test]
    fn prec_values() {
        assert_eq!(prec_at_k(&p(&[1, 2, 3]), &b(&[1, 1, 0]), 2).unwrap(), 2);
        assert_eq!(prec_at_k(&p(&[1, 2, 3]), &b(&[0, 0, 0]), 3).unwrap(), 0);
        assert_eq!(prec_at_k(&p(&[3, 2, 1]), &b(&[1, 1, 0]), 2).unwrap(), 1);
        assert!(matches!(
            prec_at_k(&p(&[1, 2, 3]), &b(&[1, 1, 0]), 0),
            Err(RankError::KOutOfRange { .. })
        ));
        assert!(prec_at_k(&p(&[1, 2, 3]), &b(&[1, 1, 0]), 4).is_err());
    }

    #[test]
    fn ndcg_values() {
        let z: f64 = ndcg_normalizer(&b(&[0, 0, 1])).unwrap();
        assert_eq!(z, 1.0);
        let z: f64 = ndcg_normalizer(&b(&[1, 1, 1])).unwrap();
        assert!((z - (1.0 + 1.0 / 3f64.log2() + 0.5)).abs() < 1e-12);
        let z: f64 = ndcg_normalizer(&b(&[0, 0, 0])).unwrap();
        assert_eq!(z, 1.0);

        let v: f64 = ndcg(&p(&[1, 2, 3]), &b(&[0, 0, 1])).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let v: f64 = ndcg(&p(&[3, 2, 1]), &b(&[1, 0, 0])).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let graded = RelevanceVector::new(vec![1, 3, 0, 2], 3).unwrap();
        let ideal = sort_oracle(&[1, 3, 0, 2]);
        let v: f64 = ndcg(&ideal, &graded).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_values_exact() {
        let v: Rational = map(&p(&[1, 2, 3]), &b(&[0, 1, 1])).unwrap();
        assert_eq!(v, Rational::new(7, 12));
        let v: Rational = map(&p(&[1, 2, 3]), &b(&[0, 0, 1])).unwrap();
        assert_eq!(v, Rational::new(1, 3));
        let v: Rational = map(&p(&[3, 1, 2]), &b(&[0, 1, 1])).unwrap();
        assert_eq!(v, Rational::from_integer(1));
        let v: Rational = map(&p(&[3, 1, 2]), &b(&[0, 0, 0])).unwrap();
        assert_eq!(v, Rational::from_integer(1));
    }

    #[test]
    fn auc_values() {
        assert_eq!(auc_normalizer(&b(&[0, 0, 0, 1])).unwrap(), 3);
        assert_eq!(auc_normalizer(&b(&[0, 0, 0])).unwrap(), 0);
        assert_eq!(auc_normalizer(&b(&[0, 1, 0, 1])).unwrap(), 4);
        let v: Rational = auc(&p(&[1, 2, 3, 4]), &b(&[0, 0, 0, 1])).unwrap();
        assert_eq!(v, Rational::from_integer(1));
        let v: Rational = auc(&p(&[1, 2, 3, 4]), &b(&[0, 1, 0, 1])).unwrap();
        assert_eq!(v, Rational::new(3, 4));
        let v: Rational = auc(&p(&[2, 1, 4, 3]), &b(&[0, 0, 0, 0])).unwrap();
        assert_eq!(v, Rational::from_integer(0));
        let v: Rational = auc(&p(&[2, 1, 4, 3]), &b(&[1, 1, 1, 1])).unwrap();
        assert_eq!(v, Rational::from_integer(0));
    }

    #[test]
    fn sort_oracle_values() {
        assert_eq!(sort_oracle(&[0.2, 0.9, 0.5]).ranks(), &[3, 1, 2]);
        assert_eq!(sort_oracle(&[1.0, 1.0, 1.0, 1.0]), Permutation::identity(4));
        assert_eq!(sort_oracle(&[5.0, 1.0]).ranks(), &[1, 2]);
        assert_eq!(sort_oracle::<f64>(&[]).len(), 0);
    }

    #[test]
    fn measure_metadata() {
        use Measure::*;
        for m in [SumLoss, PairwiseLoss, Auc] {
            assert_eq!(m.polarity(), Polarity::Loss);
        }
        for m in [Dcg, PrecAtK(2), Ndcg, Map] {
            assert_eq!(m.polarity(), Polarity::Gain);
        }
        assert!(Dcg.supports_graded() && Ndcg.supports_graded());
        assert!(!SumLoss.supports_graded() && !Map.supports_graded());
        assert_eq!(Dcg.g_component(3), 7);
        assert_eq!(SumLoss.g_component(1), 1);
        assert_eq!(PrecAtK(2).f_component::<f64>(2).unwrap(), 1.0);
        assert_eq!(PrecAtK(2).f_component::<f64>(3).unwrap(), 0.0);
        assert!(Map.f_component::<f64>(1).is_err());
        for s in ["sumloss", "pairwise", "dcg", "prec@3", "ndcg", "map", "auc"] {
            assert_eq!(s.parse::<Measure>().unwrap().to_string(), s);
        }
        assert!("prec@0".parse::<Measure>().is_err());
        assert!("mrr".parse::<Measure>().is_err());
    }
}

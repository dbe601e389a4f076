//! Ordered-application certificates: per-rule multiplicities that witness
//! reachability as one contiguous block per rule. Verification replays the
//! blocks with endpoint checks only, so it runs in time polynomial in the
//! certificate length no matter how large the multiplicities are.

use num_traits::{One, Zero};
use thiserror::Error;

use super::SearchLimits;
use crate::classify;
use crate::model::{apply_once, apply_run, is_applicable, rule_traits, Configuration, Count, Instance};

/// A sequence of `(rule id, multiplicity)` blocks. For feed-forward systems
/// the blocks follow a feed-forward ordering with each rule appearing at
/// most once; traces of general systems may repeat rule ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderedCertificate {
    pub blocks: Vec<(usize, Count)>,
}

impl OrderedCertificate {
    /// Builds a certificate, dropping zero-multiplicity blocks.
    pub fn from_blocks(blocks: Vec<(usize, Count)>) -> Self {
        OrderedCertificate {
            blocks: blocks.into_iter().filter(|(_, k)| !k.is_zero()).collect(),
        }
    }

    /// Collapses a step-by-step rule trace into maximal blocks.
    pub fn from_trace(trace: &[usize]) -> Self {
        let mut blocks: Vec<(usize, Count)> = Vec::new();
        for &id in trace {
            match blocks.last_mut() {
                Some((last, k)) if *last == id => *k += Count::one(),
                _ => blocks.push((id, Count::one())),
            }
        }
        OrderedCertificate { blocks }
    }

    /// Total number of rule applications described.
    pub fn applications(&self) -> Count {
        self.blocks.iter().map(|(_, k)| k).sum()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("certificate search requires a feed-forward rule set")]
    NotFeedForward,
    #[error("certificate search requires a rule set without autogenesis rules")]
    HasAutogenesis,
}

/// Replays the certificate from the instance's initial configuration.
/// Accepts iff every block is a legal run and the final configuration
/// equals the target. Unknown rule ids simply fail verification.
pub fn verify_certificate(instance: &Instance, certificate: &OrderedCertificate) -> bool {
    let mut current = instance.initial.clone();
    for (id, times) in &certificate.blocks {
        let Some(rule) = instance.crn.rule(*id) else {
            return false;
        };
        match apply_run(&current, rule, times) {
            Ok(next) => current = next,
            Err(_) => return false,
        }
    }
    current == instance.target
}

/// Searches for an ordered certificate by trying per-rule multiplicities in
/// feed-forward order. Without autogenesis rules each multiplicity is
/// bounded by the configuration right before the block, so the search is
/// finite; `limits.state_cap` additionally bounds the number of search
/// nodes. Returns `None` when no certificate was found within bounds.
pub fn search_certificate(
    instance: &Instance,
    limits: &SearchLimits,
) -> Result<Option<OrderedCertificate>, CertificateError> {
    let crn = &instance.crn;
    let order = classify::feed_forward_order(crn).ok_or(CertificateError::NotFeedForward)?;
    if crn.rules().iter().any(|r| rule_traits(r).is_autogenesis) {
        return Err(CertificateError::HasAutogenesis);
    }

    // Species whose counts are already final after a given stage: no later
    // rule changes them on net, so they must match the target exactly.
    let n = crn.species_count();
    let mut fixed_after: Vec<Vec<usize>> = vec![Vec::new(); order.len() + 1];
    {
        let mut touched = vec![false; n];
        for stage in (0..=order.len()).rev() {
            if stage < order.len() {
                let rule = crn.rule(order[stage]).expect("rule id");
                for (i, d) in rule.application_vector().iter().enumerate() {
                    if !d.is_zero() {
                        touched[i] = true;
                    }
                }
            }
            fixed_after[stage] = (0..n).filter(|&i| !touched[i]).collect();
        }
    }

    struct Dfs<'a> {
        instance: &'a Instance,
        order: &'a [usize],
        fixed_after: &'a [Vec<usize>],
        budget: usize,
    }

    impl Dfs<'_> {
        fn go(&mut self, stage: usize, config: &Configuration) -> Option<Vec<(usize, Count)>> {
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            for &i in &self.fixed_after[stage] {
                if config.counts()[i] != self.instance.target.counts()[i] {
                    return None;
                }
            }
            if stage == self.order.len() {
                return (*config == self.instance.target).then(Vec::new);
            }
            let rule = self.instance.crn.rule(self.order[stage]).expect("rule id");
            let identity_action = rule.application_vector().iter().all(Zero::is_zero);
            let mut times = Count::zero();
            let mut current = config.clone();
            loop {
                if let Some(mut rest) = self.go(stage + 1, &current) {
                    rest.push((rule.id(), times));
                    return Some(rest);
                }
                if identity_action || !is_applicable(&current, rule) {
                    return None;
                }
                current = apply_once(&current, rule).expect("applicable");
                times += Count::one();
            }
        }
    }

    let mut dfs = Dfs {
        instance,
        order: &order,
        fixed_after: &fixed_after,
        budget: limits.state_cap,
    };
    Ok(dfs.go(0, &instance.initial).map(|mut blocks| {
        blocks.reverse();
        OrderedCertificate::from_blocks(blocks)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CrnBuilder, Species};
    use crate::search::{decide_reach_oracle, explore};
    use crate::Verdict;

    fn chain_instance() -> Instance {
        // a -> c, c + c -> d from {a:4} to {d:2}
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1)], &[("c", 1)]);
        b.rule_by_names(&[("c", 2)], &[("d", 1)]);
        let crn = b.finish().unwrap();
        let init = Configuration::from_pairs(3, &[(Species(0), Count::from(4u8))]);
        let target = Configuration::from_pairs(3, &[(Species(2), Count::from(2u8))]);
        Instance::reach(crn, init, target).unwrap()
    }

    #[test]
    fn verify_accepts_valid_blocks() {
        let inst = chain_instance();
        let cert = OrderedCertificate::from_blocks(vec![
            (0, Count::from(4u8)),
            (1, Count::from(2u8)),
        ]);
        assert!(verify_certificate(&inst, &cert));
    }

    #[test]
    fn verify_rejects_wrong_endpoint() {
        let inst = chain_instance();
        let cert = OrderedCertificate::from_blocks(vec![(0, Count::from(4u8))]);
        assert!(!verify_certificate(&inst, &cert));
    }

    #[test]
    fn verify_rejects_illegal_block() {
        let inst = chain_instance();
        let cert = OrderedCertificate::from_blocks(vec![
            (1, Count::from(2u8)),
            (0, Count::from(4u8)),
        ]);
        assert!(!verify_certificate(&inst, &cert));
    }

    #[test]
    fn verify_huge_multiplicity_is_fast() {
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1)], &[("b", 1)]);
        let crn = b.finish().unwrap();
        let big: Count = Count::from(1u8) << 50;
        let init = Configuration::from_pairs(2, &[(Species(0), big.clone())]);
        let target = Configuration::from_pairs(2, &[(Species(1), big.clone())]);
        let inst = Instance::reach(crn, init, target).unwrap();
        let cert = OrderedCertificate::from_blocks(vec![(0, big)]);
        let start = std::time::Instant::now();
        assert!(verify_certificate(&inst, &cert));
        assert!(start.elapsed().as_millis() < 50);
    }

    #[test]
    fn search_finds_certificate_on_chain() {
        let inst = chain_instance();
        let cert = search_certificate(&inst, &SearchLimits::default())
            .unwrap()
            .expect("certificate");
        assert!(verify_certificate(&inst, &cert));
        assert_eq!(
            cert.blocks,
            vec![(0, Count::from(4u8)), (1, Count::from(2u8))]
        );
    }

    #[test]
    fn search_returns_none_when_unreachable() {
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1)], &[("c", 1)]);
        let crn = b.finish().unwrap();
        let init = Configuration::from_pairs(2, &[(Species(0), Count::from(3u8))]);
        let target = Configuration::from_pairs(2, &[(Species(1), Count::from(2u8))]);
        let inst = Instance::reach(crn, init, target).unwrap();
        assert_eq!(search_certificate(&inst, &SearchLimits::default()).unwrap(), None);
    }

    #[test]
    fn search_rejects_autogenesis() {
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[], &[("a", 1)]);
        let crn = b.finish().unwrap();
        let c = Configuration::zero(1);
        let inst = Instance::reach(crn, c.clone(), c).unwrap();
        assert_eq!(
            search_certificate(&inst, &SearchLimits::default()).unwrap_err(),
            CertificateError::HasAutogenesis
        );
    }

    #[test]
    fn search_complete_against_oracle_closure() {
        // Every oracle-reachable target of a feed-forward no-autogenesis
        // system yields a verifiable certificate.
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1), ("b", 1)], &[("c", 1)]);
        b.rule_by_names(&[("a", 1), ("c", 1)], &[("d", 1)]);
        b.rule_by_names(&[("b", 1), ("c", 1)], &[("c", 1)]);
        let crn = b.finish().unwrap();
        let init = Configuration::from_pairs(
            4,
            &[(Species(0), Count::from(3u8)), (Species(1), Count::from(3u8))],
        );
        let limits = SearchLimits::default();
        let closure = explore(&crn, &init, &limits);
        assert!(closure.is_complete());
        for target in closure.configurations() {
            let inst = Instance::reach(crn.clone(), init.clone(), target).unwrap();
            let cert = search_certificate(&inst, &limits)
                .unwrap()
                .expect("reachable target must have a certificate");
            assert!(verify_certificate(&inst, &cert));
        }
        // And an unreachable target yields none.
        let unreachable = Configuration::from_pairs(4, &[(Species(3), Count::from(100u8))]);
        let inst = Instance::reach(crn.clone(), init.clone(), unreachable.clone()).unwrap();
        assert_eq!(
            decide_reach_oracle(&inst, &limits).verdict,
            Verdict::Unreachable
        );
        assert_eq!(search_certificate(&inst, &limits).unwrap(), None);
    }

    #[test]
    fn from_trace_collapses_runs() {
        let cert = OrderedCertificate::from_trace(&[0, 0, 1, 1, 1, 0]);
        assert_eq!(
            cert.blocks,
            vec![
                (0, Count::from(2u8)),
                (1, Count::from(3u8)),
                (0, Count::from(1u8))
            ]
        );
        assert_eq!(cert.applications(), Count::from(6u8));
    }
}

//! Core types for discrete chemical reaction networks: species alphabets,
//! configurations (multisets of species with unbounded counts), rules, and
//! the elementary application semantics everything else builds on.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Copy count of a single species. Counts are unbounded non-negative
/// integers; binary-encoded volumes must round-trip exactly.
pub type Count = BigUint;

/// Signed entry of an application vector.
pub type Delta = BigInt;

/// Index into the ordered species alphabet of a [`Crn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Species(pub usize);

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("rule {rule} is not applicable to the configuration")]
    NotApplicable { rule: usize },
    #[error("rule {rule} cannot be applied {count} times in a row")]
    IllegalRun { rule: usize, count: Count },
    #[error("rule has empty reactants and empty products")]
    EmptyRule,
    #[error("vector length {got} does not match alphabet size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate species name `{0}`")]
    DuplicateSpecies(String),
    #[error("invalid species name `{0}`")]
    InvalidSpeciesName(String),
}

/// A length-`|Λ|` vector of non-negative integer copy counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Configuration {
    counts: Vec<Count>,
}

impl Configuration {
    pub fn zero(len: usize) -> Self {
        Configuration {
            counts: vec![Count::zero(); len],
        }
    }

    pub fn from_counts(counts: Vec<Count>) -> Self {
        Configuration { counts }
    }

    /// Builds a configuration of the given length from sparse
    /// `(species, count)` pairs; later pairs for the same species add up.
    pub fn from_pairs(len: usize, pairs: &[(Species, Count)]) -> Self {
        let mut c = Configuration::zero(len);
        for (s, k) in pairs {
            c.counts[s.0] += k;
        }
        c
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, s: Species) -> &Count {
        &self.counts[s.0]
    }

    pub fn set(&mut self, s: Species, k: Count) {
        self.counts[s.0] = k;
    }

    pub fn counts(&self) -> &[Count] {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (Species, &Count)> {
        self.counts.iter().enumerate().map(|(i, k)| (Species(i), k))
    }

    /// Species with a non-zero count, in alphabet order.
    pub fn support(&self) -> impl Iterator<Item = Species> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(i, _)| Species(i))
    }

    /// Total number of copies across all species.
    pub fn volume(&self) -> Count {
        self.counts.iter().sum()
    }

    /// Entrywise `self >= other`.
    pub fn dominates(&self, other: &Configuration) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.counts.iter().zip(&other.counts).all(|(a, b)| a >= b)
    }

    /// Entrywise difference; `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &Configuration) -> Option<Configuration> {
        if !self.dominates(other) {
            return None;
        }
        Some(Configuration {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Configuration) -> Configuration {
        debug_assert_eq!(self.len(), other.len());
        Configuration {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `self + k·delta` over signed deltas; `None` if any entry goes negative.
    pub fn add_scaled_delta(&self, delta: &[Delta], k: &Count) -> Option<Configuration> {
        debug_assert_eq!(self.len(), delta.len());
        let k = BigInt::from(k.clone());
        let mut counts = Vec::with_capacity(self.len());
        for (a, d) in self.counts.iter().zip(delta) {
            let v = BigInt::from(a.clone()) + d * &k;
            if v.is_negative() {
                return None;
            }
            counts.push(v.to_biguint().expect("non-negative"));
        }
        Some(Configuration { counts })
    }
}

/// A reaction: an ordered pair of reactant and product configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    id: usize,
    reactants: Configuration,
    products: Configuration,
}

impl Rule {
    pub fn new(id: usize, reactants: Configuration, products: Configuration) -> Result<Self, ModelError> {
        if reactants.len() != products.len() {
            return Err(ModelError::LengthMismatch {
                expected: reactants.len(),
                got: products.len(),
            });
        }
        if reactants.counts.iter().all(Zero::is_zero) && products.counts.iter().all(Zero::is_zero) {
            return Err(ModelError::EmptyRule);
        }
        Ok(Rule {
            id,
            reactants,
            products,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn reactants(&self) -> &Configuration {
        &self.reactants
    }

    pub fn products(&self) -> &Configuration {
        &self.products
    }

    /// The net change of each species count when the rule fires once.
    pub fn application_vector(&self) -> Vec<Delta> {
        self.products
            .counts
            .iter()
            .zip(&self.reactants.counts)
            .map(|(p, r)| BigInt::from(p.clone()) - BigInt::from(r.clone()))
            .collect()
    }

    /// Swaps reactants and products, keeping the id.
    pub fn reversed(&self) -> Rule {
        Rule {
            id: self.id,
            reactants: self.products.clone(),
            products: self.reactants.clone(),
        }
    }
}

/// Volume-change classification and per-species roles of a single rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTraits {
    pub application_vector: Vec<Delta>,
    /// `(volume(reactants), volume(products))`.
    pub size: (Count, Count),
    /// No entry of the application vector is positive and some entry is
    /// negative. A rule whose application vector is all zero (for example
    /// `a -> a`) changes nothing and counts as neither void nor autogenesis.
    pub is_void: bool,
    /// No entry of the application vector is negative and some entry is
    /// positive.
    pub is_autogenesis: bool,
    /// Species with a strictly positive net change.
    pub produced: Vec<Species>,
    /// Species with a strictly negative net change.
    pub consumed: Vec<Species>,
    /// Species present on both sides with equal non-zero counts.
    pub catalysts: Vec<Species>,
    pub volume_delta: Delta,
}

/// Computes the traits of a rule.
pub fn rule_traits(rule: &Rule) -> RuleTraits {
    let av = rule.application_vector();
    let has_pos = av.iter().any(|d| d.is_positive());
    let has_neg = av.iter().any(|d| d.is_negative());
    let mut produced = Vec::new();
    let mut consumed = Vec::new();
    let mut catalysts = Vec::new();
    for (i, d) in av.iter().enumerate() {
        if d.is_positive() {
            produced.push(Species(i));
        } else if d.is_negative() {
            consumed.push(Species(i));
        } else if !rule.reactants.counts[i].is_zero() {
            catalysts.push(Species(i));
        }
    }
    let size_r = rule.reactants.volume();
    let size_p = rule.products.volume();
    RuleTraits {
        volume_delta: BigInt::from(size_p.clone()) - BigInt::from(size_r.clone()),
        application_vector: av,
        size: (size_r, size_p),
        is_void: !has_pos && has_neg,
        is_autogenesis: !has_neg && has_pos,
        produced,
        consumed,
        catalysts,
    }
}

/// `true` iff the configuration dominates the rule's reactant vector.
pub fn is_applicable(c: &Configuration, rule: &Rule) -> bool {
    c.dominates(&rule.reactants)
}

/// Applies the rule once: `c - reactants + products`.
pub fn apply_once(c: &Configuration, rule: &Rule) -> Result<Configuration, ModelError> {
    match c.checked_sub(&rule.reactants) {
        Some(rest) => Ok(rest.add(&rule.products)),
        None => Err(ModelError::NotApplicable { rule: rule.id }),
    }
}

/// Applies the rule `k` times in a row, in time independent of `k`.
///
/// Each species count is affine in the application index, so the run is
/// legal iff the rule is applicable at both endpoint configurations `c` and
/// `c + (k-1)·R_a`. `k = 0` returns `c` unchanged with no check.
pub fn apply_run(c: &Configuration, rule: &Rule, k: &Count) -> Result<Configuration, ModelError> {
    if k.is_zero() {
        return Ok(c.clone());
    }
    let illegal = || ModelError::IllegalRun {
        rule: rule.id,
        count: k.clone(),
    };
    if !is_applicable(c, rule) {
        return Err(illegal());
    }
    let av = rule.application_vector();
    let last = c
        .add_scaled_delta(&av, &(k - Count::one()))
        .ok_or_else(illegal)?;
    if !is_applicable(&last, rule) {
        return Err(illegal());
    }
    Ok(last.add(&rule.products).checked_sub(&rule.reactants).expect("applicable"))
}

/// A discrete chemical reaction network: an ordered species alphabet and a
/// list of rules over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crn {
    alphabet: Vec<String>,
    rules: Vec<Rule>,
}

impl Crn {
    /// Builds a CRN, validating that every rule vector matches the alphabet
    /// and that species names are unique.
    pub fn new(alphabet: Vec<String>, rules: Vec<Rule>) -> Result<Self, ModelError> {
        let mut seen = HashMap::new();
        for (i, name) in alphabet.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(ModelError::DuplicateSpecies(name.clone()));
            }
        }
        for rule in &rules {
            if rule.reactants.len() != alphabet.len() {
                return Err(ModelError::LengthMismatch {
                    expected: alphabet.len(),
                    got: rule.reactants.len(),
                });
            }
        }
        Ok(Crn { alphabet, rules })
    }

    pub fn species_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn species(&self) -> impl Iterator<Item = Species> {
        (0..self.alphabet.len()).map(Species)
    }

    pub fn species_name(&self, s: Species) -> &str {
        &self.alphabet[s.0]
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn species_by_name(&self, name: &str) -> Option<Species> {
        self.alphabet.iter().position(|n| n == name).map(Species)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: usize) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// The same network with every rule reversed (reactants and products
    /// swapped), preserving rule ids.
    pub fn reversed(&self) -> Crn {
        Crn {
            alphabet: self.alphabet.clone(),
            rules: self.rules.iter().map(Rule::reversed).collect(),
        }
    }
}

/// Incremental builder used by parsers and generators. Species referenced by
/// rules are appended to the alphabet on first use.
#[derive(Debug, Default)]
pub struct CrnBuilder {
    alphabet: Vec<String>,
    index: HashMap<String, usize>,
    rules: Vec<(Vec<(usize, Count)>, Vec<(usize, Count)>)>,
}

impl CrnBuilder {
    pub fn new() -> Self {
        CrnBuilder::default()
    }

    /// Declares a species (or returns the existing one).
    pub fn species(&mut self, name: &str) -> Species {
        if let Some(&i) = self.index.get(name) {
            return Species(i);
        }
        let i = self.alphabet.len();
        self.alphabet.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Species(i)
    }

    pub fn lookup(&self, name: &str) -> Option<Species> {
        self.index.get(name).copied().map(Species)
    }

    /// Adds a rule given sparse reactant and product multisets over species
    /// names; new names extend the alphabet in order of first appearance.
    pub fn rule_by_names(
        &mut self,
        reactants: &[(&str, u64)],
        products: &[(&str, u64)],
    ) -> usize {
        let r: Vec<(usize, Count)> = reactants
            .iter()
            .map(|(n, k)| (self.species(n).0, Count::from(*k)))
            .collect();
        let p: Vec<(usize, Count)> = products
            .iter()
            .map(|(n, k)| (self.species(n).0, Count::from(*k)))
            .collect();
        self.rules.push((r, p));
        self.rules.len() - 1
    }

    /// Adds a rule from sparse species/count pairs.
    pub fn rule_sparse(
        &mut self,
        reactants: Vec<(Species, Count)>,
        products: Vec<(Species, Count)>,
    ) -> usize {
        self.rules.push((
            reactants.into_iter().map(|(s, k)| (s.0, k)).collect(),
            products.into_iter().map(|(s, k)| (s.0, k)).collect(),
        ));
        self.rules.len() - 1
    }

    /// Materializes a sparse multiset against the final alphabet.
    pub fn config_from_pairs(&self, pairs: &[(Species, Count)]) -> Configuration {
        Configuration::from_pairs(self.alphabet.len(), pairs)
    }

    pub fn finish(self) -> Result<Crn, ModelError> {
        let len = self.alphabet.len();
        let dense = |pairs: &[(usize, Count)]| {
            let mut c = Configuration::zero(len);
            for (i, k) in pairs {
                c.counts[*i] += k;
            }
            c
        };
        let rules = self
            .rules
            .iter()
            .enumerate()
            .map(|(id, (r, p))| Rule::new(id, dense(r), dense(p)))
            .collect::<Result<Vec<_>, _>>()?;
        Crn::new(self.alphabet, rules)
    }
}

/// Which question is being asked about an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Problem {
    /// Is the target configuration reachable from the initial one?
    Reach,
    /// Can the count of `species` reach at least `threshold`?
    Production { species: Species, threshold: Count },
    /// Is the target reachable from every configuration reachable from the
    /// initial one?
    UniversalReach,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("production threshold must be at least 1")]
    ZeroThreshold,
    #[error("configuration length {got} does not match alphabet size {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// A decision-problem instance: a network, an initial configuration, a
/// target configuration, and the problem kind. The target is unused for
/// production instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub crn: Crn,
    pub initial: Configuration,
    pub target: Configuration,
    pub problem: Problem,
}

impl Instance {
    pub fn reach(crn: Crn, initial: Configuration, target: Configuration) -> Result<Self, InstanceError> {
        Self::check_len(&crn, &initial)?;
        Self::check_len(&crn, &target)?;
        Ok(Instance {
            crn,
            initial,
            target,
            problem: Problem::Reach,
        })
    }

    pub fn production(
        crn: Crn,
        initial: Configuration,
        species: Species,
        threshold: Count,
    ) -> Result<Self, InstanceError> {
        if threshold.is_zero() {
            return Err(InstanceError::ZeroThreshold);
        }
        Self::check_len(&crn, &initial)?;
        let target = Configuration::zero(crn.species_count());
        Ok(Instance {
            crn,
            initial,
            target,
            problem: Problem::Production { species, threshold },
        })
    }

    pub fn universal(crn: Crn, initial: Configuration, target: Configuration) -> Result<Self, InstanceError> {
        Self::check_len(&crn, &initial)?;
        Self::check_len(&crn, &target)?;
        Ok(Instance {
            crn,
            initial,
            target,
            problem: Problem::UniversalReach,
        })
    }

    fn check_len(crn: &Crn, c: &Configuration) -> Result<(), InstanceError> {
        if c.len() != crn.species_count() {
            return Err(InstanceError::LengthMismatch {
                expected: crn.species_count(),
                got: c.len(),
            });
        }
        Ok(())
    }

    /// The reverse-direction instance: reversed rules with initial and
    /// target swapped. Only meaningful for reachability problems.
    pub fn reversed(&self) -> Instance {
        Instance {
            crn: self.crn.reversed(),
            initial: self.target.clone(),
            target: self.initial.clone(),
            problem: self.problem.clone(),
        }
    }
}

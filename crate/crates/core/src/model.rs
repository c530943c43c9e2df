//! Formulas, literals, cardinality vectors and solver statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semiring::Semiring;

pub type Var = u32;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Var,
    negated: bool,
}

impl Literal {
    pub fn new(var: Var, negated: bool) -> Self {
        assert!(var >= 1, "variable ids start at 1");
        Literal { var, negated }
    }

    pub fn pos(var: Var) -> Self {
        Literal::new(var, false)
    }

    pub fn neg(var: Var) -> Self {
        Literal::new(var, true)
    }

    /// Signed integer form, `-3` for the negation of x3.
    pub fn from_signed(v: i64) -> Option<Self> {
        if v == 0 || v.unsigned_abs() > u64::from(Var::MAX) {
            return None;
        }
        Some(Literal::new(v.unsigned_abs() as Var, v < 0))
    }

    pub fn to_signed(self) -> i64 {
        if self.negated {
            -i64::from(self.var)
        } else {
            i64::from(self.var)
        }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Truth value of this literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }

    /// The variable value that makes this literal true.
    pub fn satisfying_value(self) -> bool {
        !self.negated
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry {
    Lit(Literal),
    Const(bool),
}

impl Entry {
    pub fn literal(self) -> Option<Literal> {
        match self {
            Entry::Lit(l) => Some(l),
            Entry::Const(_) => None,
        }
    }

    pub fn var(self) -> Option<Var> {
        self.literal().map(Literal::var)
    }
}

impl From<Literal> for Entry {
    fn from(l: Literal) -> Self {
        Entry::Lit(l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub id: ClauseId,
    pub items: Vec<Entry>,
}

impl Clause {
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.items.iter().filter_map(|e| e.literal())
    }

    /// Distinct variables, ascending.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.literals().map(Literal::var).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn has_constant(&self) -> bool {
        self.items.iter().any(|e| matches!(e, Entry::Const(_)))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, " v ")?;
            }
            match e {
                Entry::Lit(l) => write!(f, "{l}")?,
                Entry::Const(b) => write!(f, "{}", u8::from(*b))?,
            }
        }
        write!(f, ")")
    }
}

/// Clauses keyed by stable id plus a per-variable occurrence index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formula {
    clauses: BTreeMap<ClauseId, Clause>,
    occ: BTreeMap<Var, BTreeSet<ClauseId>>,
    next_id: u32,
}

impl Formula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_clauses<I, C>(clauses: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Literal>,
    {
        let mut f = Formula::new();
        for c in clauses {
            f.add_clause(c.into_iter().map(Entry::Lit).collect());
        }
        f
    }

    /// Builds a formula from signed-integer clauses, e.g. `&[&[1, 2, 3], &[1, -4, 5]]`.
    pub fn from_signed(clauses: &[&[i64]]) -> Self {
        Formula::from_clauses(clauses.iter().map(|c| {
            c.iter()
                .map(|&v| Literal::from_signed(v).expect("nonzero literal"))
        }))
    }

    pub fn add_clause(&mut self, items: Vec<Entry>) -> ClauseId {
        assert!(
            (1..=3).contains(&items.len()),
            "clause length must be 1..=3"
        );
        let id = ClauseId(self.next_id);
        self.next_id += 1;
        self.index_clause(id, &items);
        self.clauses.insert(id, Clause { id, items });
        id
    }

    fn index_clause(&mut self, id: ClauseId, items: &[Entry]) {
        for v in items.iter().filter_map(|e| e.var()) {
            self.occ.entry(v).or_default().insert(id);
        }
    }

    fn unindex_clause(&mut self, id: ClauseId, items: &[Entry]) {
        for v in items.iter().filter_map(|e| e.var()) {
            if let Some(set) = self.occ.get_mut(&v) {
                set.remove(&id);
                if set.is_empty() {
                    self.occ.remove(&v);
                }
            }
        }
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.get(&id)
    }

    pub fn contains_clause(&self, id: ClauseId) -> bool {
        self.clauses.contains_key(&id)
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.values()
    }

    pub fn clause_ids(&self) -> impl Iterator<Item = ClauseId> + '_ {
        self.clauses.keys().copied()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Variables occurring in at least one clause, ascending.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.occ.keys().copied()
    }

    pub fn num_vars(&self) -> usize {
        self.occ.len()
    }

    pub fn max_var(&self) -> Option<Var> {
        self.occ.keys().next_back().copied()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.occ.contains_key(&v)
    }

    /// Ids of the clauses containing `v`; empty if `v` does not occur.
    pub fn clauses_of(&self, v: Var) -> impl Iterator<Item = ClauseId> + '_ {
        self.occ.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    /// Number of clauses containing `v` (zero when absent).
    pub fn occurrence_count(&self, v: Var) -> usize {
        self.occ.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn occurrences(&self, v: Var) -> Result<usize> {
        self.occ
            .get(&v)
            .map(BTreeSet::len)
            .ok_or(Error::UnknownVariable(v))
    }

    /// Clauses sharing at least one variable with `id`, ascending.
    pub fn neighbours(&self, id: ClauseId) -> Result<BTreeSet<ClauseId>> {
        let clause = self.clauses.get(&id).ok_or(Error::UnknownClause(id))?;
        let mut out = BTreeSet::new();
        for v in clause.literals().map(Literal::var) {
            out.extend(self.clauses_of(v).filter(|&c| c != id));
        }
        Ok(out)
    }

    pub fn clause_degree(&self, id: ClauseId) -> Result<usize> {
        self.neighbours(id).map(|n| n.len())
    }

    /// Maximal variable-connected clause sets, ordered by lowest clause id.
    /// Clause ids are preserved in each component.
    pub fn connected_components(&self) -> Vec<Formula> {
        let mut seen: BTreeSet<ClauseId> = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.clauses.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut members = BTreeSet::new();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(id) = stack.pop() {
                members.insert(id);
                for v in self.clauses[&id].literals().map(Literal::var) {
                    for n in self.clauses_of(v) {
                        if seen.insert(n) {
                            stack.push(n);
                        }
                    }
                }
            }
            out.push(self.restrict(&members));
        }
        out
    }

    /// Sub-formula made of the given clause ids (missing ids are ignored).
    pub fn restrict(&self, ids: &BTreeSet<ClauseId>) -> Formula {
        let mut f = Formula {
            next_id: self.next_id,
            ..Formula::default()
        };
        for id in ids {
            if let Some(c) = self.clauses.get(id) {
                f.index_clause(*id, &c.items);
                f.clauses.insert(*id, c.clone());
            }
        }
        f
    }

    pub fn remove_clause(&mut self, id: ClauseId) -> Option<Clause> {
        let clause = self.clauses.remove(&id)?;
        self.unindex_clause(id, &clause.items);
        Some(clause)
    }

    /// Replaces the entries of clause `id`, keeping its id.
    pub fn set_items(&mut self, id: ClauseId, items: Vec<Entry>) {
        assert!(
            (1..=3).contains(&items.len()),
            "clause length must be 1..=3"
        );
        let old = std::mem::take(&mut self.clauses.get_mut(&id).expect("live clause").items);
        self.unindex_clause(id, &old);
        self.index_clause(id, &items);
        self.clauses.get_mut(&id).expect("live clause").items = items;
    }

    /// Replaces every occurrence of `v` by the constant it takes when `v := value`.
    pub fn assign(&mut self, v: Var, value: bool) {
        let ids: Vec<ClauseId> = self.clauses_of(v).collect();
        for id in ids {
            let clause = self.clauses.get_mut(&id).expect("indexed clause");
            for e in clause.items.iter_mut() {
                if let Entry::Lit(l) = *e {
                    if l.var() == v {
                        *e = Entry::Const(l.eval(value));
                    }
                }
            }
        }
        self.occ.remove(&v);
    }

    /// Replaces `v` by `by` and `-v` by `-by` everywhere.
    pub fn substitute(&mut self, v: Var, by: Literal) {
        assert_ne!(v, by.var(), "cannot substitute a variable by itself");
        let ids: Vec<ClauseId> = self.clauses_of(v).collect();
        for id in ids {
            let clause = self.clauses.get_mut(&id).expect("indexed clause");
            for e in clause.items.iter_mut() {
                if let Entry::Lit(l) = *e {
                    if l.var() == v {
                        *e = Entry::Lit(if l.is_negated() { !by } else { by });
                    }
                }
            }
            self.occ.entry(by.var()).or_default().insert(id);
        }
        self.occ.remove(&v);
    }

    /// Rebuilds the occurrence index from scratch and compares it with the
    /// maintained one.
    pub fn index_is_consistent(&self) -> bool {
        let mut rebuilt: BTreeMap<Var, BTreeSet<ClauseId>> = BTreeMap::new();
        for (id, c) in &self.clauses {
            for v in c.items.iter().filter_map(|e| e.var()) {
                rebuilt.entry(v).or_default().insert(*id);
            }
        }
        rebuilt == self.occ
    }

    /// Exactly-one evaluation under a total assignment lookup.
    pub fn is_satisfied_by(&self, value: impl Fn(Var) -> bool) -> bool {
        self.clauses.values().all(|c| {
            c.items
                .iter()
                .filter(|e| match e {
                    Entry::Const(b) => *b,
                    Entry::Lit(l) => l.eval(value(l.var())),
                })
                .count()
                == 1
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in self.clauses.values() {
            if !first {
                write!(f, " & ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        if first {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Per-literal values, one pair per unassigned variable.
#[derive(Clone, Debug, PartialEq)]
pub struct CardinalityVector<W> {
    entries: BTreeMap<Var, [W; 2]>,
}

impl<W: Semiring> Default for CardinalityVector<W> {
    fn default() -> Self {
        CardinalityVector {
            entries: BTreeMap::new(),
        }
    }
}

impl<W: Semiring> CardinalityVector<W> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ones(vars: impl IntoIterator<Item = Var>) -> Self {
        let entries = vars
            .into_iter()
            .map(|v| (v, [W::one(), W::one()]))
            .collect();
        CardinalityVector { entries }
    }

    /// All-ones vector over the variables occurring in `formula`.
    pub fn ones_for(formula: &Formula) -> Self {
        Self::ones(formula.vars())
    }

    pub fn from_fn(vars: impl IntoIterator<Item = Var>, mut f: impl FnMut(Literal) -> W) -> Self {
        let entries = vars
            .into_iter()
            .map(|v| (v, [f(Literal::pos(v)), f(Literal::neg(v))]))
            .collect();
        CardinalityVector { entries }
    }

    pub fn insert(&mut self, v: Var, pos: W, neg: W) {
        self.entries.insert(v, [pos, neg]);
    }

    pub fn get(&self, l: Literal) -> &W {
        &self.entries[&l.var()][usize::from(l.is_negated())]
    }

    pub fn try_get(&self, l: Literal) -> Option<&W> {
        self.entries
            .get(&l.var())
            .map(|e| &e[usize::from(l.is_negated())])
    }

    pub fn set(&mut self, l: Literal, w: W) {
        self.entries.get_mut(&l.var()).expect("live variable")[usize::from(l.is_negated())] = w;
    }

    /// Drops both entries of `v`, returning `(c(v), c(-v))`.
    pub fn remove(&mut self, v: Var) -> Option<(W, W)> {
        self.entries.remove(&v).map(|[p, n]| (p, n))
    }

    pub fn contains(&self, v: Var) -> bool {
        self.entries.contains_key(&v)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn restrict(&self, vars: impl IntoIterator<Item = Var>) -> Self {
        let entries = vars
            .into_iter()
            .filter_map(|v| self.entries.get(&v).map(|e| (v, e.clone())))
            .collect();
        CardinalityVector { entries }
    }
}

/// Nonnegative weight per literal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightAssignment {
    weights: BTreeMap<Var, [u64; 2]>,
}

impl WeightAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(vars: impl IntoIterator<Item = Var>) -> Self {
        WeightAssignment {
            weights: vars.into_iter().map(|v| (v, [0, 0])).collect(),
        }
    }

    pub fn set(&mut self, l: Literal, w: u64) {
        self.weights.entry(l.var()).or_insert([0, 0])[usize::from(l.is_negated())] = w;
    }

    /// Weight of `l`; literals without an entry weigh 0.
    pub fn get(&self, l: Literal) -> u64 {
        self.weights
            .get(&l.var())
            .map_or(0, |e| e[usize::from(l.is_negated())])
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.weights.keys().copied()
    }

    pub fn max_weight(&self) -> u64 {
        self.weights
            .values()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0)
    }
}

/// Which end of a chain edge the next chain branching uses.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndTurn {
    #[default]
    Left,
    Right,
}

impl EndTurn {
    pub fn flip(self) -> Self {
        match self {
            EndTurn::Left => EndTurn::Right,
            EndTurn::Right => EndTurn::Left,
        }
    }
}

/// Clause sets of the last bisection and the chain-end alternation flag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionState {
    pub left: BTreeSet<ClauseId>,
    pub right: BTreeSet<ClauseId>,
    pub turn: EndTurn,
}

impl PartitionState {
    pub fn is_active(&self) -> bool {
        !self.left.is_empty() || !self.right.is_empty()
    }

    pub fn clear(&mut self) {
        self.left.clear();
        self.right.clear();
    }

    /// Forgets clauses that no longer exist.
    pub fn retain_live(&mut self, formula: &Formula) {
        self.left.retain(|id| formula.contains_clause(*id));
        self.right.retain(|id| formula.contains_clause(*id));
    }
}

/// Rules whose firings are counted in [`SolveStats`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    Unsat,
    FreeVariable,
    ConstantOne,
    ConstantZero,
    Unit,
    TwoLiteral,
    Complementary,
    Components,
    RepeatedLiteral,
    ComplementaryTriple,
    Singletons,
    SharedPair,
    SharedPairOneFlip,
    SharedPairTwoFlips,
    Contraction,
    Lookahead,
    Heavy,
    CutEdge,
    Cycle,
    SelfLoop,
    Bisection,
    Fallback,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Unsat => "unsat",
            Rule::FreeVariable => "free_variable",
            Rule::ConstantOne => "constant_one",
            Rule::ConstantZero => "constant_zero",
            Rule::Unit => "unit",
            Rule::TwoLiteral => "two_literal",
            Rule::Complementary => "complementary",
            Rule::Components => "components",
            Rule::RepeatedLiteral => "repeated_literal",
            Rule::ComplementaryTriple => "complementary_triple",
            Rule::Singletons => "singletons",
            Rule::SharedPair => "shared_pair",
            Rule::SharedPairOneFlip => "shared_pair_one_flip",
            Rule::SharedPairTwoFlips => "shared_pair_two_flips",
            Rule::Contraction => "contraction",
            Rule::Lookahead => "lookahead",
            Rule::Heavy => "heavy",
            Rule::CutEdge => "cut_edge",
            Rule::Cycle => "cycle",
            Rule::SelfLoop => "self_loop",
            Rule::Bisection => "bisection",
            Rule::Fallback => "fallback",
        }
    }
}

/// Counters gathered over one solve. Merging is associative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Recursion calls that neither branched nor split.
    pub leaves: u64,
    /// Binary branch points.
    pub branch_nodes: u64,
    /// Component splits and the total number of children they produced.
    pub split_nodes: u64,
    pub split_children: u64,
    pub rule_firings: BTreeMap<String, u64>,
    /// Degree-3 clause count at each bisection.
    pub m3_history: Vec<usize>,
    pub cut_sizes: Vec<usize>,
    /// Realized (x=1, x=0) eliminated-variable counts of every lookahead branch.
    pub lookahead_realized: Vec<(usize, usize)>,
    /// Lookahead branches whose realized counts differed from the simulation.
    pub lookahead_mismatches: u64,
    /// Branch points inside self-loop sub-solves (expected to stay 0).
    pub self_loop_sub_branches: u64,
    pub max_depth: usize,
}

impl SolveStats {
    pub fn fire(&mut self, rule: Rule) {
        *self
            .rule_firings
            .entry(rule.name().to_string())
            .or_insert(0) += 1;
    }

    pub fn firings(&self, rule: Rule) -> u64 {
        self.rule_firings.get(rule.name()).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &SolveStats) {
        self.leaves += other.leaves;
        self.branch_nodes += other.branch_nodes;
        self.split_nodes += other.split_nodes;
        self.split_children += other.split_children;
        for (k, v) in &other.rule_firings {
            *self.rule_firings.entry(k.clone()).or_insert(0) += v;
        }
        self.m3_history.extend_from_slice(&other.m3_history);
        self.cut_sizes.extend_from_slice(&other.cut_sizes);
        self.lookahead_realized
            .extend_from_slice(&other.lookahead_realized);
        self.lookahead_mismatches += other.lookahead_mismatches;
        self.self_loop_sub_branches += other.self_loop_sub_branches;
        self.max_depth = self.max_depth.max(other.max_depth);
    }

    /// Tree-shape identity: every branch adds one leaf, every k-way split adds k-1.
    pub fn tree_shape_holds(&self) -> bool {
        self.leaves == 1 + self.branch_nodes + self.split_children - self.split_nodes
    }
}

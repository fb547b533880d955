//! Finite-state transducers weighted by feature structures.
//!
//! Arcs carry an optional input symbol, an optional output symbol (`None` is
//! epsilon), and a feature-structure weight. A path accepts when every arc
//! weight and the final-state weight unify in sequence; a failed unification
//! prunes the path, which is how agreement constraints discard inconsistent
//! affix combinations without growing the state graph.
//!
//! [`Fst::enumerate_paths`] is a depth-bounded exhaustive walk used as the
//! ground truth that [`Fst::transduce`] and [`Fst::compose`] are tested
//! against.

mod feature;
pub mod text;

pub use feature::{FeatureParseError, FeatureStructure, Value};

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

pub type StateId = usize;

/// Extra epsilon-input steps a path may take beyond the number of consumed
/// input symbols before traversal gives up.
pub const DEFAULT_EPS_SLACK: usize = 10;

#[derive(Clone, Debug)]
pub struct Arc {
    pub to: StateId,
    /// `None` is epsilon: the arc consumes no input symbol.
    pub input: Option<String>,
    /// `None` is epsilon: the arc emits no output symbol.
    pub output: Option<String>,
    pub weight: FeatureStructure,
}

/// One result of a transduction: an emitted symbol sequence and the
/// unification of all weights along the accepting path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transduction {
    pub output: Vec<String>,
    pub weight: FeatureStructure,
}

/// One accepting path found by [`Fst::enumerate_paths`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathEntry {
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub weight: FeatureStructure,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FstError {
    /// A path used more epsilon-input steps than the traversal limit allows;
    /// with the default slack this signals an epsilon cycle in a malformed
    /// machine.
    #[error("epsilon traversal limit of {limit} steps exceeded")]
    EpsilonLimitExceeded { limit: usize },
}

#[derive(Clone, Debug, Default)]
pub struct Fst {
    start: Option<StateId>,
    arcs: Vec<Vec<Arc>>,
    finals: BTreeMap<StateId, FeatureStructure>,
}

impl Fst {
    pub fn new() -> Fst {
        Fst::default()
    }

    pub fn add_state(&mut self) -> StateId {
        self.arcs.push(Vec::new());
        self.arcs.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.arcs.len()
    }

    pub fn set_start(&mut self, s: StateId) {
        assert!(s < self.arcs.len(), "start state {s} does not exist");
        self.start = Some(s);
    }

    pub fn start(&self) -> Option<StateId> {
        self.start
    }

    pub fn set_final(&mut self, s: StateId, weight: FeatureStructure) {
        assert!(s < self.arcs.len(), "final state {s} does not exist");
        self.finals.insert(s, weight);
    }

    pub fn final_weight(&self, s: StateId) -> Option<&FeatureStructure> {
        self.finals.get(&s)
    }

    pub fn finals(&self) -> impl Iterator<Item = (StateId, &FeatureStructure)> {
        self.finals.iter().map(|(s, w)| (*s, w))
    }

    pub fn add_arc(
        &mut self,
        from: StateId,
        to: StateId,
        input: Option<&str>,
        output: Option<&str>,
        weight: FeatureStructure,
    ) {
        assert!(from < self.arcs.len() && to < self.arcs.len(), "arc endpoint does not exist");
        self.arcs[from].push(Arc {
            to,
            input: input.map(str::to_owned),
            output: output.map(str::to_owned),
            weight,
        });
    }

    pub fn arcs_from(&self, s: StateId) -> &[Arc] {
        &self.arcs[s]
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    /// All `(output, weight)` pairs over accepting paths that consume exactly
    /// `input`, deduplicated by value. Uses the default epsilon slack.
    pub fn transduce(&self, input: &[&str]) -> Result<BTreeSet<Transduction>, FstError> {
        self.transduce_with_slack(input, DEFAULT_EPS_SLACK)
    }

    /// As [`Fst::transduce`], but a path may take up to `input.len() + slack`
    /// epsilon-input steps before the traversal errors out.
    pub fn transduce_with_slack(
        &self,
        input: &[&str],
        slack: usize,
    ) -> Result<BTreeSet<Transduction>, FstError> {
        let mut results = BTreeSet::new();
        let Some(start) = self.start else {
            return Ok(results);
        };
        let limit = input.len() + slack;
        let mut output = Vec::new();
        self.walk_transduce(
            start,
            input,
            0,
            0,
            limit,
            &FeatureStructure::top(),
            &mut output,
            &mut results,
        )?;
        Ok(results)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk_transduce(
        &self,
        state: StateId,
        input: &[&str],
        pos: usize,
        eps_used: usize,
        limit: usize,
        weight: &FeatureStructure,
        output: &mut Vec<String>,
        results: &mut BTreeSet<Transduction>,
    ) -> Result<(), FstError> {
        if pos == input.len() {
            if let Some(final_weight) = self.finals.get(&state) {
                if let Some(total) = weight.unify(final_weight) {
                    results.insert(Transduction { output: output.clone(), weight: total });
                }
            }
        }
        for arc in &self.arcs[state] {
            let (next_pos, next_eps) = match &arc.input {
                Some(sym) => {
                    if pos >= input.len() || input[pos] != sym.as_str() {
                        continue;
                    }
                    (pos + 1, eps_used)
                }
                None => {
                    if eps_used == limit {
                        return Err(FstError::EpsilonLimitExceeded { limit });
                    }
                    (pos, eps_used + 1)
                }
            };
            let Some(next_weight) = weight.unify(&arc.weight) else {
                continue;
            };
            let emitted = arc.output.is_some();
            if let Some(sym) = &arc.output {
                output.push(sym.clone());
            }
            self.walk_transduce(
                arc.to,
                input,
                next_pos,
                next_eps,
                limit,
                &next_weight,
                output,
                results,
            )?;
            if emitted {
                output.pop();
            }
        }
        Ok(())
    }

    /// Exhaustive depth-bounded walk of accepting paths: every
    /// `(input, output, weight)` with at most `max_len` input symbols. Paths
    /// whose epsilon-input steps exceed `consumed + DEFAULT_EPS_SLACK` are
    /// pruned rather than reported, so this never errors; it is the
    /// definitional oracle the search-based operations are compared against.
    pub fn enumerate_paths(&self, max_len: usize) -> BTreeSet<PathEntry> {
        self.enumerate_paths_with_slack(max_len, DEFAULT_EPS_SLACK)
    }

    pub fn enumerate_paths_with_slack(&self, max_len: usize, slack: usize) -> BTreeSet<PathEntry> {
        let mut results = BTreeSet::new();
        let Some(start) = self.start else {
            return results;
        };
        let mut input = Vec::new();
        let mut output = Vec::new();
        self.walk_enumerate(
            start,
            max_len,
            slack,
            0,
            &FeatureStructure::top(),
            &mut input,
            &mut output,
            &mut results,
        );
        results
    }

    #[allow(clippy::too_many_arguments)]
    fn walk_enumerate(
        &self,
        state: StateId,
        max_len: usize,
        slack: usize,
        eps_used: usize,
        weight: &FeatureStructure,
        input: &mut Vec<String>,
        output: &mut Vec<String>,
        results: &mut BTreeSet<PathEntry>,
    ) {
        if eps_used <= input.len() + slack {
            if let Some(final_weight) = self.finals.get(&state) {
                if let Some(total) = weight.unify(final_weight) {
                    results.insert(PathEntry {
                        input: input.clone(),
                        output: output.clone(),
                        weight: total,
                    });
                }
            }
        }
        for arc in &self.arcs[state] {
            let consumed = arc.input.is_some();
            let next_eps = if consumed { eps_used } else { eps_used + 1 };
            if consumed && input.len() == max_len {
                continue;
            }
            // The walk cap: a path this deep into epsilon steps can never
            // satisfy the per-path filter, whatever it consumes later.
            if next_eps > max_len + slack {
                continue;
            }
            let Some(next_weight) = weight.unify(&arc.weight) else {
                continue;
            };
            if let Some(sym) = &arc.input {
                input.push(sym.clone());
            }
            let emitted = arc.output.is_some();
            if let Some(sym) = &arc.output {
                output.push(sym.clone());
            }
            self.walk_enumerate(
                arc.to,
                max_len,
                slack,
                next_eps,
                &next_weight,
                input,
                output,
                results,
            );
            if consumed {
                input.pop();
            }
            if emitted {
                output.pop();
            }
        }
    }

    /// Relational composition: paths of the result map `x` to `z` whenever
    /// `self` maps `x` to some `y` and `other` maps `y` to `z`, with the two
    /// path weights unified. Arc pairs whose weights fail to unify are dropped
    /// during construction. Epsilons are handled by letting either side
    /// advance alone; because unification is idempotent, commutative, and
    /// associative, duplicate interleavings collapse in the result set.
    pub fn compose(&self, other: &Fst) -> Fst {
        let mut out = Fst::new();
        let (Some(fs), Some(gs)) = (self.start, other.start) else {
            return out;
        };

        // Index the right-hand machine's arcs by consumed symbol.
        let mut by_input: Vec<HashMap<&str, Vec<&Arc>>> = vec![HashMap::new(); other.arcs.len()];
        let mut eps_input: Vec<Vec<&Arc>> = vec![Vec::new(); other.arcs.len()];
        for (state, arcs) in other.arcs.iter().enumerate() {
            for arc in arcs {
                match &arc.input {
                    Some(sym) => by_input[state].entry(sym).or_default().push(arc),
                    None => eps_input[state].push(arc),
                }
            }
        }

        let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let start_id = out.add_state();
        ids.insert((fs, gs), start_id);
        out.set_start(start_id);
        queue.push_back((fs, gs));

        while let Some((p, q)) = queue.pop_front() {
            let pq = ids[&(p, q)];
            let link = |out: &mut Fst,
                        ids: &mut HashMap<(StateId, StateId), StateId>,
                        queue: &mut VecDeque<(StateId, StateId)>,
                        to: (StateId, StateId)|
             -> StateId {
                *ids.entry(to).or_insert_with(|| {
                    queue.push_back(to);
                    out.add_state()
                })
            };

            for a in &self.arcs[p] {
                match &a.output {
                    // The left output must be matched by a right arc that
                    // consumes the same symbol.
                    Some(sym) => {
                        if let Some(matches) = by_input[q].get(sym.as_str()) {
                            for &b in matches {
                                if let Some(w) = a.weight.unify(&b.weight) {
                                    let to = link(&mut out, &mut ids, &mut queue, (a.to, b.to));
                                    out.arcs[pq].push(Arc {
                                        to,
                                        input: a.input.clone(),
                                        output: b.output.clone(),
                                        weight: w,
                                    });
                                }
                            }
                        }
                    }
                    // Left emits nothing: the left side advances alone.
                    None => {
                        let to = link(&mut out, &mut ids, &mut queue, (a.to, q));
                        out.arcs[pq].push(Arc {
                            to,
                            input: a.input.clone(),
                            output: None,
                            weight: a.weight.clone(),
                        });
                    }
                }
            }
            // Right consumes nothing: the right side advances alone.
            for b in &eps_input[q] {
                let to = link(&mut out, &mut ids, &mut queue, (p, b.to));
                out.arcs[pq].push(Arc {
                    to,
                    input: None,
                    output: b.output.clone(),
                    weight: b.weight.clone(),
                });
            }

            if let (Some(wf), Some(wg)) = (self.finals.get(&p), other.finals.get(&q)) {
                if let Some(w) = wf.unify(wg) {
                    out.finals.insert(pq, w);
                }
            }
        }
        out
    }
}

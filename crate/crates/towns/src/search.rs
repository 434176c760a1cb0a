//! Exhaustive search for extremal towns.
//!
//! Towns on a fixed ground set are exactly the cliques of a compatibility
//! graph: vertices are the admissible member sets, edges join pairs whose
//! intersection has the right residue. [`extremal_search`] finds a maximum
//! clique with a branch-and-bound solver seeded by the constructive lower
//! bound; [`naive_extremal`] is a deliberately simple reference used to
//! cross-check it on small instances.

use crate::constructions::best_lower_bound;
use crate::setcore::{Family, SetWord, TownSpec};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::mem;
use std::time::{Duration, Instant};

/// Structural caps that keep graph construction from exploding. These guard
/// memory, not time; see [`SearchBudget`] for the latter.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_vertices: usize,
    pub max_n: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_vertices: 20_000, max_n: 28 }
    }
}

/// Work caps for the branch-and-bound phase. Exhausting either turns the
/// result into a certified lower bound instead of an optimum.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_millis: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 100_000_000, max_millis: 300_000 }
    }
}

/// Which cap stopped the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exhaustion {
    Nodes,
    Time,
}

impl fmt::Display for Exhaustion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exhaustion::Nodes => write!(f, "node budget"),
            Exhaustion::Time => write!(f, "time budget"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// The search tree was exhausted: the reported size is the exact maximum.
    Optimal,
    /// A budget tripped first: the witness is valid but maybe not maximum.
    LowerBoundOnly(Exhaustion),
}

impl SearchStatus {
    pub fn is_optimal(&self) -> bool {
        matches!(self, SearchStatus::Optimal)
    }
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchStatus::Optimal => write!(f, "optimal"),
            SearchStatus::LowerBoundOnly(e) => write!(f, "lower bound only ({e} exhausted)"),
        }
    }
}

/// Result of a clique search. `witness` always passes the town check and has
/// exactly `size` members.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub size: usize,
    pub witness: Family,
    pub status: SearchStatus,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// The compatibility graph for one parameter tuple: all subsets of `[n]`
/// with admissible cardinality, joined when their intersection residue is
/// right. Vertices are ordered by cardinality, then numerically by their
/// bit representation, so indices are reproducible.
#[derive(Debug)]
pub struct CompatGraph {
    spec: TownSpec,
    masks: Vec<u64>,
    vertices: Vec<SetWord>,
    words: usize,
    adj: Vec<u64>,
}

impl CompatGraph {
    pub fn build(a: u64, b: u64, k: u64, n: usize, limits: &SearchLimits) -> Result<CompatGraph> {
        let spec = TownSpec::new(n, k, a, b)?;
        let cap = limits.max_n.min(32);
        if n > cap {
            return Err(Error::SearchLimit(format!(
                "ground set size {n} exceeds the search cap {cap}"
            )));
        }
        let mut masks: Vec<u64> = Vec::new();
        let mut c = a as usize;
        while c <= n {
            if c == 0 {
                masks.push(0);
            } else {
                let limit = 1u64 << n;
                let mut m = (1u64 << c) - 1;
                while m < limit {
                    masks.push(m);
                    if masks.len() > limits.max_vertices {
                        return Err(Error::SearchLimit(format!(
                            "more than {} admissible sets for a={a} k={k} n={n}",
                            limits.max_vertices
                        )));
                    }
                    // Gosper's hack: next mask with the same popcount.
                    let low = m & m.wrapping_neg();
                    let ripple = m + low;
                    m = (((m ^ ripple) >> 2) / low) | ripple;
                }
            }
            c += k as usize;
        }
        let v = masks.len();
        let words = v.div_ceil(64);
        let mut adj = vec![0u64; v * words];
        for i in 0..v {
            for j in i + 1..v {
                if (masks[i] & masks[j]).count_ones() as u64 % k == b {
                    adj[i * words + j / 64] |= 1 << (j % 64);
                    adj[j * words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        let vertices = masks.iter().map(|&m| word_from_mask(m, n)).collect();
        Ok(CompatGraph { spec, masks, vertices, words, adj })
    }

    pub fn spec(&self) -> TownSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[SetWord] {
        &self.vertices
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    fn degree(&self, i: usize) -> usize {
        self.adj[i * self.words..(i + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    /// The family formed by the given vertices, sorted for reproducibility.
    pub fn family_of(&self, indices: &[usize]) -> Family {
        let mut idx: Vec<usize> = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let members = idx.iter().map(|&i| self.vertices[i].clone()).collect();
        Family::new(self.spec, members).expect("graph vertices are distinct")
    }
}

fn word_from_mask(mask: u64, n: usize) -> SetWord {
    let elements: Vec<usize> = (0..n).filter(|&e| mask >> e & 1 == 1).map(|e| e + 1).collect();
    SetWord::from_elements(n, &elements).expect("mask stays within the ground set")
}

fn first_bit(ws: &[u64]) -> Option<usize> {
    for (i, &w) in ws.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

fn clear_bit(ws: &mut [u64], i: usize) {
    ws[i / 64] &= !(1 << (i % 64));
}

fn bits_empty(ws: &[u64]) -> bool {
    ws.iter().all(|&w| w == 0)
}

struct BudgetTracker {
    start: Instant,
    cap: Duration,
    max_nodes: u64,
    nodes: u64,
    hit: Option<Exhaustion>,
}

impl BudgetTracker {
    fn new(budget: &SearchBudget) -> Self {
        BudgetTracker {
            start: Instant::now(),
            cap: Duration::from_millis(budget.max_millis),
            max_nodes: budget.max_nodes,
            nodes: 0,
            hit: None,
        }
    }

    /// Counts one search node; false once a cap is blown. The clock is only
    /// consulted every 8192 nodes.
    fn tick(&mut self) -> bool {
        if self.hit.is_some() {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.hit = Some(Exhaustion::Nodes);
            return false;
        }
        if self.nodes & 8191 == 0 && self.start.elapsed() >= self.cap {
            self.hit = Some(Exhaustion::Time);
            return false;
        }
        true
    }

    fn exhausted(&self) -> bool {
        self.hit.is_some()
    }
}

/// Dense adjacency over relabeled vertices. Labels follow the reversed
/// smallest-last (degeneracy) order of the induced subgraph, which makes the
/// greedy coloring in the solver noticeably sharper.
struct BitGraph {
    v: usize,
    words: usize,
    adj: Vec<u64>,
}

impl BitGraph {
    /// Induced subgraph on `verts`, plus the map from new labels back to
    /// compatibility-graph indices.
    fn induced(g: &CompatGraph, verts: &[usize]) -> (BitGraph, Vec<usize>) {
        let m = verts.len();
        let words = m.div_ceil(64).max(1);
        let mut adj = vec![0u64; m * words];
        let mut deg = vec![0usize; m];
        for i in 0..m {
            for j in i + 1..m {
                if g.contains_edge(verts[i], verts[j]) {
                    adj[i * words + j / 64] |= 1 << (j % 64);
                    adj[j * words + i / 64] |= 1 << (i % 64);
                    deg[i] += 1;
                    deg[j] += 1;
                }
            }
        }
        // Smallest-last elimination; its reverse puts the dense core first.
        let mut removed = vec![false; m];
        let mut elim = Vec::with_capacity(m);
        for _ in 0..m {
            let u = (0..m)
                .filter(|&i| !removed[i])
                .min_by_key(|&i| deg[i])
                .expect("vertices remain");
            removed[u] = true;
            elim.push(u);
            for j in 0..m {
                if !removed[j] && adj[u * words + j / 64] >> (j % 64) & 1 == 1 {
                    deg[j] -= 1;
                }
            }
        }
        elim.reverse();
        let mut final_adj = vec![0u64; m * words];
        for ni in 0..m {
            for nj in ni + 1..m {
                let (oi, oj) = (elim[ni], elim[nj]);
                if adj[oi * words + oj / 64] >> (oj % 64) & 1 == 1 {
                    final_adj[ni * words + nj / 64] |= 1 << (nj % 64);
                    final_adj[nj * words + ni / 64] |= 1 << (ni % 64);
                }
            }
        }
        let map = elim.iter().map(|&ol| verts[ol]).collect();
        (BitGraph { v: m, words, adj: final_adj }, map)
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    fn full_set(&self) -> Vec<u64> {
        let mut ws = vec![!0u64; self.words];
        let tail = self.v % 64;
        if tail != 0 {
            ws[self.words - 1] = (1u64 << tail) - 1;
        }
        if self.v == 0 {
            ws.fill(0);
        }
        ws
    }
}

/// Per-depth scratch buffers, reused across the whole tree walk.
#[derive(Default)]
struct Frame {
    child: Vec<u64>,
    uncolored: Vec<u64>,
    cand: Vec<u64>,
    order: Vec<u32>,
    colors: Vec<u32>,
}

/// Branch and bound with greedy sequential coloring: candidates are colored,
/// processed from the highest color down, and a branch is cut once the
/// clique so far plus the color index cannot beat the incumbent.
struct CliqueSolver<'a> {
    g: &'a BitGraph,
    budget: &'a mut BudgetTracker,
    best: usize,
    current: Vec<u32>,
    best_clique: Option<Vec<u32>>,
    frames: Vec<Frame>,
}

impl<'a> CliqueSolver<'a> {
    /// Searches for cliques strictly larger than `floor`; returns the best
    /// one found, in local labels.
    fn run(g: &'a BitGraph, budget: &'a mut BudgetTracker, floor: usize) -> Option<(usize, Vec<u32>)> {
        let mut solver = CliqueSolver {
            g,
            budget,
            best: floor,
            current: Vec::new(),
            best_clique: None,
            frames: Vec::new(),
        };
        let mut root = g.full_set();
        if g.v > 0 {
            solver.expand(0, &mut root);
        }
        let best = solver.best;
        solver.best_clique.map(|c| (best, c))
    }

    fn expand(&mut self, depth: usize, p: &mut Vec<u64>) {
        if !self.budget.tick() {
            return;
        }
        while self.frames.len() <= depth {
            self.frames.push(Frame::default());
        }
        let mut fr = mem::take(&mut self.frames[depth]);

        fr.order.clear();
        fr.colors.clear();
        fr.uncolored.clone_from(p);
        let mut color = 0u32;
        while !bits_empty(&fr.uncolored) {
            color += 1;
            fr.cand.clone_from(&fr.uncolored);
            while let Some(v) = first_bit(&fr.cand) {
                clear_bit(&mut fr.cand, v);
                clear_bit(&mut fr.uncolored, v);
                for (w, &nw) in fr.cand.iter_mut().zip(self.g.row(v)) {
                    *w &= !nw;
                }
                fr.order.push(v as u32);
                fr.colors.push(color);
            }
        }

        for i in (0..fr.order.len()).rev() {
            if self.budget.exhausted() {
                break;
            }
            if self.current.len() + fr.colors[i] as usize <= self.best {
                break;
            }
            let v = fr.order[i] as usize;
            clear_bit(p, v);
            fr.child.clone_from(p);
            for (w, &nw) in fr.child.iter_mut().zip(self.g.row(v)) {
                *w &= nw;
            }
            self.current.push(v as u32);
            if bits_empty(&fr.child) {
                if self.current.len() > self.best {
                    self.best = self.current.len();
                    self.best_clique = Some(self.current.clone());
                }
            } else {
                self.expand(depth + 1, &mut fr.child);
            }
            self.current.pop();
        }

        self.frames[depth] = fr;
    }
}

/// Maximum clique of the whole compatibility graph, with no seeding and no
/// symmetry reductions. Slower than [`extremal_search`] but structurally
/// independent of the constructions, which makes it a useful cross-check.
pub fn max_clique(graph: &CompatGraph, budget: &SearchBudget) -> SearchOutcome {
    let mut tracker = BudgetTracker::new(budget);
    if graph.is_empty() {
        return SearchOutcome {
            size: 0,
            witness: Family::empty(graph.spec()),
            status: SearchStatus::Optimal,
            nodes: 0,
            elapsed: tracker.start.elapsed(),
        };
    }
    let all: Vec<usize> = (0..graph.len()).collect();
    let (bg, map) = BitGraph::induced(graph, &all);
    let found = CliqueSolver::run(&bg, &mut tracker, 0);
    let indices: Vec<usize> = match &found {
        Some((_, clique)) => clique.iter().map(|&l| map[l as usize]).collect(),
        // Nonempty graph, floor 0: the very first leaf records a clique
        // unless the budget tripped before any node finished.
        None => Vec::new(),
    };
    let size = indices.len();
    let status = match tracker.hit {
        None => SearchStatus::Optimal,
        Some(cause) => SearchStatus::LowerBoundOnly(cause),
    };
    SearchOutcome {
        size,
        witness: graph.family_of(&indices),
        status,
        nodes: tracker.nodes,
        elapsed: tracker.start.elapsed(),
    }
}

/// The exact extremal town size for the given parameters, by exhausting the
/// compatibility graph.
///
/// Three reductions make this tractable well past the raw solver:
/// vertices adjacent to everything (always includable) are peeled off first;
/// the incumbent starts at the constructive lower bound instead of zero; and
/// the top-level branching fixes the lexicographically first set of each
/// admissible cardinality, which is sound because relabeling the ground set
/// permutes cliques. On budget exhaustion the outcome degrades to a certified
/// lower bound with the best witness found.
pub fn extremal_search(
    a: u64,
    b: u64,
    k: u64,
    n: usize,
    limits: &SearchLimits,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    let graph = CompatGraph::build(a, b, k, n, limits)?;
    let mut tracker = BudgetTracker::new(budget);
    let v = graph.len();
    if v == 0 {
        return Ok(SearchOutcome {
            size: 0,
            witness: Family::empty(graph.spec()),
            status: SearchStatus::Optimal,
            nodes: 0,
            elapsed: tracker.start.elapsed(),
        });
    }

    // Universal vertices sit in some maximum clique, so they can be set
    // aside; a vertex universal in the residual graph would already have
    // been universal here, hence one pass suffices.
    let universal: Vec<usize> = (0..v).filter(|&i| graph.degree(i) == v - 1).collect();
    let residual: Vec<usize> = (0..v).filter(|&i| graph.degree(i) != v - 1).collect();

    let index_of: HashMap<u64, usize> =
        graph.masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let is_universal = {
        let mut flags = vec![false; v];
        for &u in &universal {
            flags[u] = true;
        }
        flags
    };

    // Incumbent: all universals plus the residual part of the best known
    // construction. Any clique through the universals stays a clique.
    let mut witness_idx: Vec<usize> = universal.clone();
    let seed = best_lower_bound(a, b, k, n)?;
    if seed.check_town().passed() {
        for member in seed.members() {
            let mask = member.elements().iter().fold(0u64, |m, &e| m | 1 << (e - 1));
            let idx = index_of[&mask];
            if !is_universal[idx] {
                witness_idx.push(idx);
            }
        }
    }
    let mut best_total = witness_idx.len();

    if !residual.is_empty() {
        // Bootstrap so branch floors never underflow.
        if best_total < universal.len() + 1 {
            witness_idx = universal.clone();
            witness_idx.push(residual[0]);
            best_total = witness_idx.len();
        }

        let mut cards: Vec<usize> =
            residual.iter().map(|&i| graph.masks[i].count_ones() as usize).collect();
        cards.sort_unstable();
        cards.dedup();

        // A maximum clique has some minimum member cardinality c, and some
        // relabeling of the ground set moves that member to {1..c}. So it is
        // enough to branch on c: fix the vertex {1..c} and search among its
        // neighbors of cardinality at least c.
        for &c in &cards {
            if tracker.exhausted() {
                break;
            }
            let prefix_mask = if c == 0 { 0 } else { (1u64 << c) - 1 };
            let prefix = index_of[&prefix_mask];
            debug_assert!(!is_universal[prefix]);
            let branch: Vec<usize> = residual
                .iter()
                .copied()
                .filter(|&j| {
                    j != prefix
                        && graph.masks[j].count_ones() as usize >= c
                        && graph.contains_edge(prefix, j)
                })
                .collect();
            // Beating the incumbent needs a branch clique bigger than
            // best_total - |universal| - 1 (the prefix vertex fills the gap).
            let floor = best_total - universal.len() - 1;
            if branch.len() <= floor {
                continue;
            }
            let (bg, map) = BitGraph::induced(&graph, &branch);
            if let Some((size, clique)) = CliqueSolver::run(&bg, &mut tracker, floor) {
                best_total = universal.len() + 1 + size;
                witness_idx = universal.clone();
                witness_idx.push(prefix);
                witness_idx.extend(clique.iter().map(|&l| map[l as usize]));
            }
        }
    }

    let status = match tracker.hit {
        None => SearchStatus::Optimal,
        Some(cause) => SearchStatus::LowerBoundOnly(cause),
    };
    let witness = graph.family_of(&witness_idx);
    debug_assert_eq!(witness.len(), best_total);
    debug_assert!(witness.check_town().passed());
    Ok(SearchOutcome {
        size: best_total,
        witness,
        status,
        nodes: tracker.nodes,
        elapsed: tracker.start.elapsed(),
    })
}

/// Reference answer by plain recursion over u64 candidate masks, with only
/// the candidate-count cutoff. Limited to 64 admissible sets; exists to
/// cross-check [`extremal_search`] with entirely different machinery.
pub fn naive_extremal(a: u64, b: u64, k: u64, n: usize) -> Result<usize> {
    let limits = SearchLimits { max_vertices: 64, max_n: 32 };
    let graph = CompatGraph::build(a, b, k, n, &limits)?;
    let v = graph.len();
    let mut neighbors = vec![0u64; v];
    for i in 0..v {
        for j in 0..v {
            if i != j && graph.contains_edge(i, j) {
                neighbors[i] |= 1 << j;
            }
        }
    }
    fn grow(neighbors: &[u64], candidates: u64, size: usize, best: &mut usize) {
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        if candidates == 0 {
            *best = size;
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        let rest = candidates & !(1u64 << v);
        grow(neighbors, rest & neighbors[v], size + 1, best);
        grow(neighbors, rest, size, best);
    }
    let mut best = 0;
    let full = if v == 64 { !0u64 } else { (1u64 << v) - 1 };
    grow(&neighbors, full, 0, &mut best);
    Ok(best)
}

/// One searched cell of the parameter table.
#[derive(Debug, Clone, Copy)]
pub struct ProbeCell {
    pub a: u64,
    pub b: u64,
    pub n: usize,
    pub size: usize,
    pub optimal: bool,
}

/// A counterexample candidate; holding one means the conjecture fails as
/// stated, it is not an error condition.
#[derive(Debug, Clone)]
pub struct ProbeFinding {
    pub conjecture: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub k: u64,
    pub n_max: usize,
    pub cells: Vec<ProbeCell>,
    pub findings: Vec<ProbeFinding>,
}

/// Sweeps every parameter cell up to `n_max` and tests two conjectured
/// patterns against the exact values found:
/// equal-residue towns should shrink as the common residue grows, and
/// distinct-residue towns should never exceed `n` members.
pub fn probe_conjectures(k: u64, n_max: usize, budget: &SearchBudget) -> Result<ProbeReport> {
    let limits = SearchLimits::default();
    let mut cells = Vec::new();
    for n in 1..=n_max {
        for a in 0..k {
            for b in 0..k {
                let outcome = extremal_search(a, b, k, n, &limits, budget)?;
                cells.push(ProbeCell {
                    a,
                    b,
                    n,
                    size: outcome.size,
                    optimal: outcome.status.is_optimal(),
                });
            }
        }
    }
    let mut findings = Vec::new();
    let cell = |a: u64, b: u64, n: usize| -> &ProbeCell {
        let idx = (n - 1) * (k * k) as usize + (a * k + b) as usize;
        &cells[idx]
    };
    for n in 1..=n_max {
        for m1 in 0..k {
            for m2 in m1 + 1..k {
                let (c1, c2) = (cell(m1, m1, n), cell(m2, m2, n));
                // c2.size is achieved even when not optimal, so an optimal
                // smaller c1 is a genuine violation.
                if c1.optimal && c1.size < c2.size {
                    findings.push(ProbeFinding {
                        conjecture: "diagonal-monotone",
                        detail: format!(
                            "size({m1},{m1}) = {} < size({m2},{m2}) >= {} at k = {k}, n = {n}",
                            c1.size, c2.size
                        ),
                    });
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    let c = cell(a, b, n);
                    if c.size > n {
                        findings.push(ProbeFinding {
                            conjecture: "distinct-residues-linear",
                            detail: format!(
                                "size({a},{b}) >= {} > n = {n} at k = {k}",
                                c.size
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(ProbeReport { k, n_max, cells, findings })
}

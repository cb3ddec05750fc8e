//! Finite windows of the graph Γ(τ₁, τ₂) attached to a pair of class
//! transpositions, and the cycle structure of `τ₁·τ₂` read off its
//! components.
//!
//! Vertices come in four families: `a_k, b_k` realize the pairs
//! `r1 + k·m1 ↔ r2 + k·m2` of τ₁, and `c_l, d_l` those of τ₂. Each vertex
//! carries its integer value μ. Edges of the *first* type join a τ₁-vertex
//! and a τ₂-vertex with equal μ; edges of the *second* type join the two
//! vertices of one transposition pair.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{ClassTransposition, ResidueClass};
use crate::Int;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    /// Families `A`, `B` belong to τ₁; `C`, `D` to τ₂.
    pub fn is_first_side(self) -> bool {
        matches!(self, Family::A | Family::B)
    }

    fn label(self) -> char {
        match self {
            Family::A => 'a',
            Family::B => 'b',
            Family::C => 'c',
            Family::D => 'd',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaVertex {
    pub family: Family,
    pub index: Int,
    pub mu: Int,
}

impl fmt::Display for GammaVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family.label(), self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeType {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaEdge {
    pub endpoints: (GammaVertex, GammaVertex),
    pub edge_type: EdgeType,
}

impl fmt::Display for GammaEdge {
    /// `a_3 -- c_5 [first]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.edge_type {
            EdgeType::First => "first",
            EdgeType::Second => "second",
        };
        write!(f, "{} -- {} [{kind}]", self.endpoints.0, self.endpoints.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    /// Finite cycle, all vertices of degree 2.
    Type1,
    /// Finite path with two endpoints of degree 1.
    Type2,
    /// Reaches the window boundary; its type cannot be decided here.
    Truncated,
}

/// A connected component, with vertices listed in walk order.
///
/// For `Type1` the walk closes (the last vertex is adjacent to the first); for
/// `Type2` it runs from the endpoint with the smaller μ to the other one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<GammaVertex>,
    pub kind: ComponentKind,
    /// Number of edges.
    pub length: usize,
}

impl Component {
    pub fn mu_values(&self) -> BTreeSet<Int> {
        self.vertices.iter().map(|v| v.mu).collect()
    }
}

impl fmt::Display for Component {
    /// `Type2 len=3 mu={…}`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mus: Vec<String> = self.mu_values().iter().map(Int::to_string).collect();
        write!(f, "{:?} len={} mu={{{}}}", self.kind, self.length, mus.join(","))
    }
}

/// A cycle of the product, listed by μ-values and starting at its smallest
/// entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleFragment {
    pub entries: Vec<Int>,
    pub closed: bool,
}

#[derive(Clone, Debug)]
struct Node {
    vertex: GammaVertex,
    // at most one edge of each type
    first: Option<usize>,
    second: Option<usize>,
    boundary: bool,
}

/// The part of Γ(τ₁, τ₂) made of vertices with `|μ| <= bound`.
///
/// A vertex is flagged as boundary when one of its neighbours in the infinite
/// graph lies outside the window, or when `|μ|` is within the largest modulus
/// of the bound.
#[derive(Clone, Debug)]
pub struct GammaGraph {
    tau1: ClassTransposition,
    tau2: ClassTransposition,
    bound: Int,
    nodes: Vec<Node>,
}

/// Indices `k` with `|r + m*k| <= bound`.
fn index_range(class: ResidueClass, bound: Int) -> std::ops::RangeInclusive<Int> {
    let (r, m) = (class.residue(), class.modulus());
    let lo = (-bound - r).div_euclid(m) + Int::from((-bound - r).rem_euclid(m) != 0);
    let hi = (bound - r).div_euclid(m);
    lo..=hi
}

impl GammaGraph {
    pub fn build_window(tau1: &ClassTransposition, tau2: &ClassTransposition, bound: Int) -> Result<Self> {
        let max_m = tau1.max_modulus().max(tau2.max_modulus());
        if bound < max_m {
            return Err(Error::precondition(format!(
                "window bound {bound} is below the largest modulus {max_m}"
            )));
        }
        let margin = bound - max_m;
        let families = [
            (Family::A, tau1.first(), tau1.second()),
            (Family::B, tau1.second(), tau1.first()),
            (Family::C, tau2.first(), tau2.second()),
            (Family::D, tau2.second(), tau2.first()),
        ];
        let mut nodes = Vec::new();
        let mut by_key: HashMap<(Family, Int), usize> = HashMap::new();
        // μ → node, per side
        let mut side_mu: [HashMap<Int, usize>; 2] = [HashMap::new(), HashMap::new()];
        for &(family, own, partner) in &families {
            for k in index_range(own, bound) {
                let mu = own.element(k)?;
                let partner_mu = partner.element(k)?;
                let idx = nodes.len();
                nodes.push(Node {
                    vertex: GammaVertex { family, index: k, mu },
                    first: None,
                    second: None,
                    boundary: partner_mu.abs() > bound || mu.abs() > margin,
                });
                by_key.insert((family, k), idx);
                side_mu[usize::from(!family.is_first_side())].insert(mu, idx);
            }
        }
        let pair_of = |f: Family| match f {
            Family::A => Family::B,
            Family::B => Family::A,
            Family::C => Family::D,
            Family::D => Family::C,
        };
        for node in &mut nodes {
            let v = node.vertex;
            node.second = by_key.get(&(pair_of(v.family), v.index)).copied();
            let other_side = usize::from(v.family.is_first_side());
            node.first = side_mu[other_side].get(&v.mu).copied();
        }
        Ok(GammaGraph { tau1: *tau1, tau2: *tau2, bound, nodes })
    }

    pub fn bound(&self) -> Int {
        self.bound
    }

    pub fn transpositions(&self) -> (ClassTransposition, ClassTransposition) {
        (self.tau1, self.tau2)
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (GammaVertex, usize, bool)> + '_ {
        self.nodes.iter().map(|n| (n.vertex, Self::degree_of(n), n.boundary))
    }

    fn degree_of(n: &Node) -> usize {
        usize::from(n.first.is_some()) + usize::from(n.second.is_some())
    }

    /// Every edge once, first-type edges listed from the τ₁ side.
    pub fn edges(&self) -> Vec<GammaEdge> {
        let mut out = Vec::new();
        for (idx, n) in self.nodes.iter().enumerate() {
            if let Some(j) = n.second {
                if idx < j {
                    out.push(GammaEdge {
                        endpoints: (n.vertex, self.nodes[j].vertex),
                        edge_type: EdgeType::Second,
                    });
                }
            }
            if let (Some(j), true) = (n.first, n.vertex.family.is_first_side()) {
                out.push(GammaEdge {
                    endpoints: (n.vertex, self.nodes[j].vertex),
                    edge_type: EdgeType::First,
                });
            }
        }
        out
    }

    pub fn first_type_edge_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.vertex.family.is_first_side() && n.first.is_some())
            .count()
    }

    /// Connected components, each classified and listed in walk order.
    pub fn components(&self) -> Vec<Component> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            // Degree is at most 2, so the component is a path or a cycle.
            // Walk to one end, then traverse.
            let mut members = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                members.push(i);
                for j in [self.nodes[i].first, self.nodes[i].second].into_iter().flatten() {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            out.push(self.classify(&members));
        }
        out.sort_by_key(|c| c.vertices.iter().map(|v| v.mu).min());
        out
    }

    fn classify(&self, members: &[usize]) -> Component {
        let truncated = members.iter().any(|&i| self.nodes[i].boundary);
        let ends: Vec<usize> =
            members.iter().copied().filter(|&i| Self::degree_of(&self.nodes[i]) < 2).collect();
        let closed = ends.is_empty();
        let start = if closed {
            *members.iter().min_by_key(|&&i| (self.nodes[i].vertex.mu, self.nodes[i].vertex.family)).unwrap()
        } else {
            *ends.iter().min_by_key(|&&i| (self.nodes[i].vertex.mu, self.nodes[i].vertex.family)).unwrap()
        };
        let order = self.walk(start, members.len());
        let edges: usize = members.iter().map(|&i| Self::degree_of(&self.nodes[i])).sum::<usize>() / 2;
        let kind = if truncated {
            ComponentKind::Truncated
        } else if closed {
            ComponentKind::Type1
        } else {
            ComponentKind::Type2
        };
        Component {
            vertices: order.into_iter().map(|i| self.nodes[i].vertex).collect(),
            kind,
            length: edges,
        }
    }

    fn walk(&self, start: usize, size: usize) -> Vec<usize> {
        let mut order = Vec::with_capacity(size);
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            order.push(cur);
            let node = &self.nodes[cur];
            let next = [node.second, node.first].into_iter().flatten().find(|&j| j != prev);
            match next {
                Some(j) if j != start && order.len() < size => {
                    prev = cur;
                    cur = j;
                }
                _ => break,
            }
        }
        order
    }

    /// Cycles of `τ₁·τ₂` on the μ-values of all non-truncated components,
    /// as a partial permutation table.
    pub fn reconstruct_product(&self) -> Result<BTreeMap<Int, Int>> {
        let mut table = BTreeMap::new();
        for comp in self.components() {
            if comp.kind == ComponentKind::Truncated {
                continue;
            }
            for cycle in component_to_cycles(&comp)? {
                let n = cycle.entries.len();
                for (i, &x) in cycle.entries.iter().enumerate() {
                    table.insert(x, cycle.entries[(i + 1) % n]);
                }
            }
        }
        Ok(table)
    }

    /// Size of the largest truncated component.
    pub fn largest_truncated(&self) -> usize {
        self.components()
            .iter()
            .filter(|c| c.kind == ComponentKind::Truncated)
            .map(|c| c.length)
            .max()
            .unwrap_or(0)
    }
}

/// Evidence for an infinite component: the largest truncated component grows
/// strictly across the windows `bound`, `2·bound`, `4·bound`.
pub fn truncated_growth(tau1: &ClassTransposition, tau2: &ClassTransposition, bound: Int) -> Result<bool> {
    let mut sizes = Vec::new();
    for b in [bound, 2 * bound, 4 * bound] {
        sizes.push(GammaGraph::build_window(tau1, tau2, b)?.largest_truncated());
    }
    Ok(sizes.windows(2).all(|w| w[1] > w[0]))
}

/// The cycles of `τ₁·τ₂` supported on a finite component.
///
/// The action is read off the component itself: along a second-type edge
/// inside the τ₁ side the product first moves μ to its partner, then along a
/// second-type edge inside the τ₂ side. A finite cycle of length `n` yields
/// two cycles of length `n/4`, a path of length `n` one cycle of length
/// `(n+3)/2`; any other outcome is reported as an invariant violation.
pub fn component_to_cycles(component: &Component) -> Result<Vec<CycleFragment>> {
    if component.kind == ComponentKind::Truncated {
        return Err(Error::precondition("cannot read cycles off a truncated component"));
    }
    let vs = &component.vertices;
    let mut t1: HashMap<Int, Int> = HashMap::new();
    let mut t2: HashMap<Int, Int> = HashMap::new();
    let n = vs.len();
    let edge_count = if component.kind == ComponentKind::Type1 { n } else { n.saturating_sub(1) };
    for i in 0..edge_count {
        let (u, v) = (vs[i], vs[(i + 1) % n]);
        match (u.family.is_first_side(), v.family.is_first_side()) {
            (true, true) => {
                t1.insert(u.mu, v.mu);
                t1.insert(v.mu, u.mu);
            }
            (false, false) => {
                t2.insert(u.mu, v.mu);
                t2.insert(v.mu, u.mu);
            }
            _ => {
                if u.mu != v.mu {
                    return Err(Error::Invariant(format!("first-type edge {u} -- {v} joins unequal values")));
                }
            }
        }
    }
    let sigma = |x: Int| {
        let y = t1.get(&x).copied().unwrap_or(x);
        t2.get(&y).copied().unwrap_or(y)
    };
    let support = component.mu_values();
    let mut done = BTreeSet::new();
    let mut cycles = Vec::new();
    for &x in &support {
        if done.contains(&x) {
            continue;
        }
        let mut entries = vec![x];
        done.insert(x);
        let mut y = sigma(x);
        while y != x {
            if !done.insert(y) || !support.contains(&y) {
                return Err(Error::Invariant(format!("product orbit of {x} leaves its component")));
            }
            entries.push(y);
            y = sigma(y);
        }
        cycles.push(CycleFragment { entries, closed: true });
    }
    let len = component.length;
    let lengths: Vec<usize> = cycles.iter().map(|c| c.entries.len()).collect();
    let expected = match component.kind {
        ComponentKind::Type1 if len.is_multiple_of(4) => vec![len / 4, len / 4],
        ComponentKind::Type2 if len % 2 == 1 => vec![(len + 3) / 2],
        _ => Vec::new(),
    };
    if lengths != expected {
        return Err(Error::Invariant(format!(
            "{:?} component of length {len} gave cycles of lengths {lengths:?}",
            component.kind
        )));
    }
    Ok(cycles)
}

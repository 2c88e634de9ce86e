//! Rooted trees with half edges: orientation, ancestry, splitting, enumeration and counting.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("edge {edge} must have one or two distinct endpoints")]
    BadEndpoints { edge: usize },
    #[error("edge {edge} refers to vertex {vertex}, but there are only {n} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has a cycle: |V| = {vertices} but |E_int| = {internal}")]
    Cycle { vertices: usize, internal: usize },
    #[error("tree has no vertices")]
    Empty,
    #[error("edge {0} is not a half edge")]
    NotHalfEdge(usize),
    #[error("edge {0} is not a full edge")]
    NotFullEdge(usize),
    #[error("edge id {0} does not exist")]
    UnknownEdge(usize),
    #[error("vertex id {0} does not exist")]
    UnknownVertex(usize),
    #[error("edge ids must be exactly 0..{0}")]
    NonDenseIds(usize),
    #[error("n = {n} outside the supported range {min}..={max}")]
    OutOfRange { n: usize, min: usize, max: usize },
}

/// Finite tree whose edges have one endpoint (half edges) or two endpoints (full edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    n_vertices: usize,
    endpoints: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
}

impl Tree {
    pub fn new(n_vertices: usize, endpoints: Vec<Vec<usize>>) -> Result<Self, TreeError> {
        if n_vertices == 0 {
            return Err(TreeError::Empty);
        }
        let mut incident = vec![Vec::new(); n_vertices];
        let mut internal = 0;
        for (e, ends) in endpoints.iter().enumerate() {
            match ends.as_slice() {
                [_] => {}
                [a, b] if a != b => internal += 1,
                _ => return Err(TreeError::BadEndpoints { edge: e }),
            }
            for &v in ends {
                if v >= n_vertices {
                    return Err(TreeError::VertexOutOfRange { edge: e, vertex: v, n: n_vertices });
                }
                incident[v].push(e);
            }
        }
        if n_vertices != internal + 1 {
            if n_vertices > internal + 1 {
                return Err(TreeError::Disconnected);
            }
            return Err(TreeError::Cycle { vertices: n_vertices, internal });
        }
        let tree = Tree { n_vertices, endpoints, incident };
        let mut seen = vec![false; n_vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for w in tree.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        if count != n_vertices {
            return Err(TreeError::Disconnected);
        }
        Ok(tree)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.endpoints.len()
    }

    pub fn endpoints(&self, e: usize) -> &[usize] {
        &self.endpoints[e]
    }

    pub fn is_half(&self, e: usize) -> bool {
        self.endpoints[e].len() == 1
    }

    pub fn is_full(&self, e: usize) -> bool {
        self.endpoints[e].len() == 2
    }

    /// Edges incident to `v`, in increasing id order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn half_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_edges()).filter(|&e| self.is_half(e))
    }

    pub fn full_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_edges()).filter(|&e| self.is_full(e))
    }

    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().filter_map(move |&e| {
            let ends = &self.endpoints[e];
            (ends.len() == 2).then(|| if ends[0] == v { ends[1] } else { ends[0] })
        })
    }

    pub fn is_stable(&self) -> bool {
        (0..self.n_vertices).all(|v| self.degree(v) >= 3)
    }

    pub fn is_maximal_stable(&self) -> bool {
        (0..self.n_vertices).all(|v| self.degree(v) == 3)
    }
}

/// Signed endpoint assignment of every edge.
///
/// `positive[e]` is e⁺ and `negative[e]` is e⁻; a half edge has exactly one of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub positive: Vec<Option<usize>>,
    pub negative: Vec<Option<usize>>,
}

impl Orientation {
    /// Whether each vertex is the positive endpoint of exactly one edge and the root endpoint is positive.
    pub fn is_valid(&self, tree: &Tree, root_edge: usize) -> bool {
        let mut hits = vec![0usize; tree.n_vertices()];
        for e in 0..tree.n_edges() {
            let mut ends: Vec<usize> = self.positive[e].iter().chain(self.negative[e].iter()).copied().collect();
            ends.sort_unstable();
            let mut expected = tree.endpoints(e).to_vec();
            expected.sort_unstable();
            if ends != expected {
                return false;
            }
            if let Some(v) = self.positive[e] {
                hits[v] += 1;
            }
        }
        self.positive[root_edge].is_some() && hits.iter().all(|&h| h == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    tree: Tree,
    root_edge: usize,
    root_vertex: usize,
    orientation: Orientation,
    parent_edge: Vec<usize>,
    parent_vertex: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl RootedTree {
    pub fn new(tree: Tree, root_edge: usize) -> Result<Self, TreeError> {
        if root_edge >= tree.n_edges() {
            return Err(TreeError::UnknownEdge(root_edge));
        }
        if !tree.is_half(root_edge) {
            return Err(TreeError::NotHalfEdge(root_edge));
        }
        let n = tree.n_vertices();
        let m = tree.n_edges();
        let root_vertex = tree.endpoints(root_edge)[0];
        let mut positive = vec![None; m];
        let mut negative = vec![None; m];
        let mut parent_edge = vec![usize::MAX; n];
        let mut parent_vertex = vec![None; n];
        let mut depth = vec![0; n];
        positive[root_edge] = Some(root_vertex);
        parent_edge[root_vertex] = root_edge;
        let mut seen = vec![false; n];
        seen[root_vertex] = true;
        let mut queue = VecDeque::from([root_vertex]);
        while let Some(v) = queue.pop_front() {
            for &e in tree.incident(v) {
                if e == root_edge || e == parent_edge[v] {
                    continue;
                }
                negative[e] = Some(v);
                if tree.is_full(e) {
                    let ends = tree.endpoints(e);
                    let w = if ends[0] == v { ends[1] } else { ends[0] };
                    if seen[w] {
                        return Err(TreeError::Cycle { vertices: n, internal: tree.full_edges().count() });
                    }
                    seen[w] = true;
                    positive[e] = Some(w);
                    parent_edge[w] = e;
                    parent_vertex[w] = Some(v);
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut children = vec![Vec::new(); n];
        for e in 0..m {
            if let Some(v) = negative[e] {
                children[v].push(e);
            }
        }
        Ok(RootedTree {
            tree,
            root_edge,
            root_vertex,
            orientation: Orientation { positive, negative },
            parent_edge,
            parent_vertex,
            children,
            depth,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn root_edge(&self) -> usize {
        self.root_edge
    }

    pub fn root_vertex(&self) -> usize {
        self.root_vertex
    }

    pub fn n_vertices(&self) -> usize {
        self.tree.n_vertices()
    }

    pub fn n_edges(&self) -> usize {
        self.tree.n_edges()
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    /// e⁺, absent for half edges other than the root edge.
    pub fn positive(&self, e: usize) -> Option<usize> {
        self.orientation.positive[e]
    }

    /// e⁻, absent only for the root edge.
    pub fn negative(&self, e: usize) -> Option<usize> {
        self.orientation.negative[e]
    }

    /// The edge e_v with e_v⁺ = v.
    pub fn parent_edge(&self, v: usize) -> usize {
        self.parent_edge[v]
    }

    pub fn parent_vertex(&self, v: usize) -> Option<usize> {
        self.parent_vertex[v]
    }

    /// v⁺: edges whose negative endpoint is v, in increasing id order.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.tree.degree(v)
    }

    /// Σ_v deg(v), the number of incident pairs (v, e).
    pub fn degree_sum(&self) -> usize {
        (0..self.n_vertices()).map(|v| self.degree(v)).sum()
    }

    pub fn is_half(&self, e: usize) -> bool {
        self.tree.is_half(e)
    }

    pub fn is_full(&self, e: usize) -> bool {
        self.tree.is_full(e)
    }

    /// External edges other than the root edge.
    pub fn leaf_edges(&self) -> Vec<usize> {
        self.tree.half_edges().filter(|&e| e != self.root_edge).collect()
    }

    pub fn full_edges(&self) -> Vec<usize> {
        self.tree.full_edges().collect()
    }

    /// Incident pairs (v, e), sorted by edge then vertex.
    pub fn incident_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for e in 0..self.n_edges() {
            let mut ends = self.tree.endpoints(e).to_vec();
            ends.sort_unstable();
            pairs.extend(ends.into_iter().map(|v| (v, e)));
        }
        pairs
    }

    /// Vertices in root-first depth-first order, children visited by edge id.
    pub fn dfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n_vertices());
        let mut stack = vec![self.root_vertex];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &e in self.children[v].iter().rev() {
                if let Some(w) = self.positive(e) {
                    stack.push(w);
                }
            }
        }
        order
    }

    pub fn nearest_common_ancestor(&self, v: usize, w: usize) -> usize {
        let (mut a, mut b) = (v, w);
        while self.depth[a] > self.depth[b] {
            a = self.parent_vertex[a].expect("non-root has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent_vertex[b].expect("non-root has a parent");
        }
        while a != b {
            a = self.parent_vertex[a].expect("non-root has a parent");
            b = self.parent_vertex[b].expect("non-root has a parent");
        }
        a
    }

    /// Vertices of the positive path from `u` to `v`, or `None` if `v` does not descend from `u`.
    pub fn positive_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = self.parent_vertex[cur]?;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Edges traversed by the positive path from `u` to `v`.
    pub fn positive_path_edges(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        let path = self.positive_path(u, v)?;
        Some(path[1..].iter().map(|&w| self.parent_edge[w]).collect())
    }

    /// First edge on the way from `u` towards the child edge `e` of `e⁻`, i.e. `e` itself when e⁻ = u.
    pub fn first_edge_towards(&self, u: usize, e: usize) -> Option<usize> {
        let v = self.negative(e)?;
        let edges = self.positive_path_edges(u, v)?;
        Some(edges.first().copied().unwrap_or(e))
    }

    /// Vertex sets of the subtrees hanging below each vertex, as a descendant test.
    pub fn is_descendant(&self, v: usize, ancestor: usize) -> bool {
        self.positive_path(ancestor, v).is_some()
    }
}

/// Computes the orientation of a rooted tree.
pub fn orient(t: &RootedTree) -> Orientation {
    t.orientation.clone()
}

pub fn nearest_common_ancestor(t: &RootedTree, v: usize, w: usize) -> usize {
    t.nearest_common_ancestor(v, w)
}

pub fn positive_path(t: &RootedTree, u: usize, v: usize) -> Option<Vec<usize>> {
    t.positive_path(u, v)
}

/// Set of marked half edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Marking(BTreeSet<usize>);

impl Marking {
    pub fn new(tree: &Tree, edges: impl IntoIterator<Item = usize>) -> Result<Self, TreeError> {
        let mut set = BTreeSet::new();
        for e in edges {
            if e >= tree.n_edges() {
                return Err(TreeError::UnknownEdge(e));
            }
            if !tree.is_half(e) {
                return Err(TreeError::NotHalfEdge(e));
            }
            set.insert(e);
        }
        Ok(Marking(set))
    }

    pub fn empty() -> Self {
        Marking(BTreeSet::new())
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedTree {
    pub tree: RootedTree,
    pub marking: Marking,
}

/// Where an edge of a split component came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeOrigin {
    Original(usize),
    /// Half edge (e, v) created by cutting full edge `edge` at endpoint `vertex`.
    Cut { edge: usize, vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitComponent {
    pub tree: RootedTree,
    pub marking: Marking,
    pub vertex_origin: Vec<usize>,
    pub edge_origin: Vec<EdgeOrigin>,
}

impl SplitComponent {
    pub fn local_vertex(&self, original: usize) -> Option<usize> {
        self.vertex_origin.iter().position(|&v| v == original)
    }

    pub fn local_edge(&self, origin: EdgeOrigin) -> Option<usize> {
        self.edge_origin.iter().position(|&o| o == origin)
    }
}

/// Splits a marked rooted tree along the full edges `cut`.
///
/// Component 0 contains the root vertex; the others follow in increasing order of the cut edge
/// that roots them.
pub fn split(t: &RootedTree, marking: &Marking, cut: &BTreeSet<usize>) -> Result<Vec<SplitComponent>, TreeError> {
    for &e in cut {
        if e >= t.n_edges() {
            return Err(TreeError::UnknownEdge(e));
        }
        if !t.is_full(e) {
            return Err(TreeError::NotFullEdge(e));
        }
    }
    let n = t.n_vertices();
    let mut comp = vec![usize::MAX; n];
    let mut tops = vec![t.root_vertex()];
    tops.extend(cut.iter().map(|&e| t.positive(e).expect("full edge")));
    for (c, &top) in tops.iter().enumerate() {
        let mut stack = vec![top];
        comp[top] = c;
        while let Some(v) = stack.pop() {
            for &e in t.children(v) {
                if cut.contains(&e) {
                    continue;
                }
                if let Some(w) = t.positive(e) {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(tops.len());
    for (c, &top) in tops.iter().enumerate() {
        let vertex_origin: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        let local: BTreeMap<usize, usize> = vertex_origin.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut endpoints = Vec::new();
        let mut edge_origin = Vec::new();
        for e in 0..t.n_edges() {
            let ends = t.tree().endpoints(e);
            if cut.contains(&e) {
                for &v in ends {
                    if comp[v] == c {
                        endpoints.push(vec![local[&v]]);
                        edge_origin.push(EdgeOrigin::Cut { edge: e, vertex: v });
                    }
                }
            } else if comp[ends[0]] == c {
                endpoints.push(ends.iter().map(|v| local[v]).collect());
                edge_origin.push(EdgeOrigin::Original(e));
            }
        }
        let root_origin = if c == 0 {
            EdgeOrigin::Original(t.root_edge())
        } else {
            EdgeOrigin::Cut { edge: t.parent_edge(top), vertex: top }
        };
        let root_edge = edge_origin.iter().position(|&o| o == root_origin).expect("root edge present");
        let tree = RootedTree::new(Tree::new(vertex_origin.len(), endpoints)?, root_edge)?;
        let marked = edge_origin.iter().enumerate().filter_map(|(i, o)| match *o {
            EdgeOrigin::Original(e) if marking.contains(e) => Some(i),
            EdgeOrigin::Cut { .. } => Some(i),
            _ => None,
        });
        let marking = Marking::new(tree.tree(), marked.collect::<Vec<_>>())?;
        out.push(SplitComponent { tree, marking, vertex_origin, edge_origin });
    }
    Ok(out)
}

/// Inverse of [`split`]: glues the cut half edges back into full edges with their original ids.
pub fn rejoin(components: &[SplitComponent]) -> Result<MarkedTree, TreeError> {
    let n = components.iter().map(|c| c.vertex_origin.len()).sum();
    let mut endpoints: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut marked = Vec::new();
    let first = components.first().ok_or(TreeError::Empty)?;
    let root_edge = match first.edge_origin[first.tree.root_edge()] {
        EdgeOrigin::Original(e) => e,
        EdgeOrigin::Cut { edge, .. } => return Err(TreeError::NotHalfEdge(edge)),
    };
    for c in components {
        for (i, origin) in c.edge_origin.iter().enumerate() {
            let ends: Vec<usize> = c.tree.tree().endpoints(i).iter().map(|&v| c.vertex_origin[v]).collect();
            match *origin {
                EdgeOrigin::Original(e) => {
                    if c.marking.contains(i) {
                        marked.push(e);
                    }
                    endpoints.insert(e, ends);
                }
                EdgeOrigin::Cut { edge, vertex } => {
                    let slot = endpoints.entry(edge).or_default();
                    slot.push(vertex);
                    slot.sort_unstable();
                }
            }
        }
    }
    if endpoints.keys().copied().ne(0..endpoints.len()) {
        return Err(TreeError::NonDenseIds(endpoints.len()));
    }
    let tree = Tree::new(n, endpoints.into_values().collect())?;
    let marking = Marking::new(&tree, marked)?;
    Ok(MarkedTree { tree: RootedTree::new(tree, root_edge)?, marking })
}

/// Canonical code of a rooted tree up to isomorphisms preserving the root edge.
///
/// Each vertex encodes as its number of half-edge children followed by the sorted codes of its
/// full-edge children, so two trees are isomorphic iff their codes agree.
pub fn canonical_form(t: &RootedTree) -> String {
    canonical_with(t, None)
}

/// As [`canonical_form`], distinguishing marked from unmarked half edges.
pub fn canonical_form_marked(t: &RootedTree, marking: &Marking) -> String {
    canonical_with(t, Some(marking))
}

fn canonical_with(t: &RootedTree, marking: Option<&Marking>) -> String {
    fn code(t: &RootedTree, marking: Option<&Marking>, v: usize) -> String {
        let mut halves = 0;
        let mut marked = 0;
        let mut subs = Vec::new();
        for &e in t.children(v) {
            match t.positive(e) {
                Some(w) => subs.push(code(t, marking, w)),
                None if marking.is_some_and(|m| m.contains(e)) => marked += 1,
                None => halves += 1,
            }
        }
        subs.sort();
        let mut s = format!("({halves}");
        if marking.is_some() {
            s.push_str(&format!("/{marked}"));
        }
        for c in subs {
            s.push_str(&c);
        }
        s.push(')');
        s
    }
    code(t, marking, t.root_vertex())
}

/// Shape of a rooted tree used during enumeration: leaves are unlabeled half edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    fn to_rooted(&self) -> RootedTree {
        let mut n_vertices = 0;
        let mut endpoints = vec![vec![0]];
        fn build(shape: &Shape, v: usize, n_vertices: &mut usize, endpoints: &mut Vec<Vec<usize>>) {
            if let Shape::Node(children) = shape {
                for child in children {
                    match child {
                        Shape::Leaf => endpoints.push(vec![v]),
                        Shape::Node(_) => {
                            let w = *n_vertices;
                            *n_vertices += 1;
                            endpoints.push(vec![v, w]);
                            build(child, w, n_vertices, endpoints);
                        }
                    }
                }
            }
        }
        n_vertices += 1;
        build(self, 0, &mut n_vertices, &mut endpoints);
        let tree = Tree::new(n_vertices, endpoints).expect("shape yields a tree");
        RootedTree::new(tree, 0).expect("edge 0 is the root half edge")
    }
}

pub const MAX_ENUMERATION_N: usize = 9;

/// All stable rooted trees with n + 1 half edges, pairwise non-isomorphic.
pub fn enumerate_stable_rooted(n: usize) -> Result<Vec<RootedTree>, TreeError> {
    if !(2..=MAX_ENUMERATION_N).contains(&n) {
        return Err(TreeError::OutOfRange { n, min: 2, max: MAX_ENUMERATION_N });
    }
    // shapes[k] lists the subtrees with k leaves, in a fixed order.
    let mut shapes: Vec<Vec<Shape>> = vec![Vec::new(), vec![Shape::Leaf]];
    for k in 2..=n {
        let mut out = Vec::new();
        let mut current = Vec::new();
        multisets(&shapes, k, (1, 0), &mut current, &mut out);
        shapes.push(out);
    }
    let mut seen = BTreeSet::new();
    let mut trees = Vec::new();
    for shape in &shapes[n] {
        let t = shape.to_rooted();
        if seen.insert(canonical_form(&t)) {
            trees.push(t);
        }
    }
    Ok(trees)
}

/// Nondecreasing sequences of (leaf count, index) children with `remaining` leaves in total.
fn multisets(shapes: &[Vec<Shape>], remaining: usize, min: (usize, usize), current: &mut Vec<(usize, usize)>, out: &mut Vec<Shape>) {
    if remaining == 0 {
        if current.len() >= 2 {
            out.push(Shape::Node(current.iter().map(|&(k, i)| shapes[k][i].clone()).collect()));
        }
        return;
    }
    for k in min.0..=remaining {
        if k >= shapes.len() {
            break;
        }
        // A single child carrying every leaf would leave the vertex with degree 2.
        if current.is_empty() && k == remaining {
            continue;
        }
        let start = if k == min.0 { min.1 } else { 0 };
        for i in start..shapes[k].len() {
            current.push((k, i));
            multisets(shapes, remaining - k, (k, i), current, out);
            current.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeCountBound {
    /// 2^{n−2}·C_n with C_n the n-th Catalan number.
    pub catalan_bound: BigUint,
    /// (1/(4√3))·(2ⁿ/√n)³.
    pub closed_form_bound: f64,
}

pub fn tree_count_bound(n: usize) -> Result<TreeCountBound, TreeError> {
    if n < 2 {
        return Err(TreeError::OutOfRange { n, min: 2, max: usize::MAX });
    }
    let catalan = binomial(2 * n, n) / BigUint::from(n + 1);
    let catalan_bound = catalan << (n - 2);
    let nf = n as f64;
    let closed_form_bound = (2f64.powi(n as i32) / nf.sqrt()).powi(3) / (4.0 * 3f64.sqrt());
    Ok(TreeCountBound { catalan_bound, closed_form_bound })
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    pub vertices: usize,
    pub internal: usize,
    pub external: usize,
    pub degree_sum: usize,
    /// |E_int| + 1 = |V| ≤ Σdeg/3 ≤ |E_ext| − 2.
    pub chain_holds: bool,
    /// Every inequality of the chain is an equality.
    pub chain_tight: bool,
}

pub fn edge_counts(t: &Tree) -> EdgeCounts {
    let vertices = t.n_vertices();
    let internal = t.full_edges().count();
    let external = t.half_edges().count();
    let degree_sum: usize = (0..vertices).map(|v| t.degree(v)).sum();
    let lower = 3 * vertices;
    let upper = 3 * external.saturating_sub(2);
    let chain_holds = internal + 1 == vertices && lower <= degree_sum && external >= 2 && degree_sum <= upper;
    let chain_tight = chain_holds && lower == degree_sum && degree_sum == upper;
    EdgeCounts { vertices, internal, external, degree_sum, chain_holds, chain_tight }
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: usize,
    endpoints: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    vertices: Vec<usize>,
    edges: Vec<EdgeJson>,
    root_edge: usize,
    #[serde(default)]
    marked: Vec<usize>,
}

impl TreeJson {
    fn from_parts(t: &RootedTree, marking: &Marking) -> Self {
        TreeJson {
            vertices: (0..t.n_vertices()).collect(),
            edges: (0..t.n_edges()).map(|e| EdgeJson { id: e, endpoints: t.tree().endpoints(e).to_vec() }).collect(),
            root_edge: t.root_edge(),
            marked: marking.iter().collect(),
        }
    }

    fn into_parts(mut self) -> Result<MarkedTree, TreeError> {
        let n = self.vertices.len();
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        if let Some((i, &v)) = sorted.iter().enumerate().find(|(i, v)| *i != **v) {
            return Err(TreeError::UnknownVertex(v.max(i)));
        }
        self.edges.sort_by_key(|e| e.id);
        if self.edges.iter().enumerate().any(|(i, e)| e.id != i) {
            return Err(TreeError::NonDenseIds(self.edges.len()));
        }
        let tree = Tree::new(n, self.edges.into_iter().map(|e| e.endpoints).collect())?;
        let marking = Marking::new(&tree, self.marked)?;
        Ok(MarkedTree { tree: RootedTree::new(tree, self.root_edge)?, marking })
    }
}

impl Serialize for RootedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TreeJson::from_parts(self, &Marking::empty()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootedTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let json = TreeJson::deserialize(d)?;
        json.into_parts().map(|m| m.tree).map_err(serde::de::Error::custom)
    }
}

impl Serialize for MarkedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TreeJson::from_parts(&self.tree, &self.marking).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        TreeJson::deserialize(d)?.into_parts().map_err(serde::de::Error::custom)
    }
}

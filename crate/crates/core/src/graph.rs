//! Roadmap graphs with incremental connectivity, nearest-neighbour queries
//! and A* path extraction.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::budget::WorkMeter;
use crate::space::{State, StateSpace};

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub to: VertexId,
    pub cost: f64,
}

/// Undirected roadmap. Vertex 0 is the start; the goal vertex is optional
/// so trees can add it once they connect.
#[derive(Clone, Debug)]
pub struct RoadmapGraph {
    vertices: Vec<State>,
    adjacency: Vec<Vec<Edge>>,
    edge_count: usize,
    start: VertexId,
    goal: Option<VertexId>,
    parent: Vec<VertexId>,
}

impl RoadmapGraph {
    pub fn new(start: State) -> Self {
        RoadmapGraph {
            vertices: vec![start],
            adjacency: vec![Vec::new()],
            edge_count: 0,
            start: 0,
            goal: None,
            parent: vec![0],
        }
    }

    pub fn with_goal(start: State, goal: State) -> Self {
        let mut g = RoadmapGraph::new(start);
        let id = g.add_vertex(goal);
        g.goal = Some(id);
        g
    }

    pub fn add_vertex(&mut self, x: State) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(x);
        self.adjacency.push(Vec::new());
        self.parent.push(id);
        id
    }

    pub fn set_goal(&mut self, id: VertexId) {
        assert!(id < self.vertices.len());
        self.goal = Some(id);
    }

    /// Adds an undirected edge whose cost the caller computed with the
    /// space metric. Self-loops are ignored.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId, cost: f64) {
        assert!(a < self.vertices.len() && b < self.vertices.len(), "edge endpoint out of range");
        if a == b {
            return;
        }
        self.adjacency[a].push(Edge { to: b, cost });
        self.adjacency[b].push(Edge { to: a, cost });
        self.edge_count += 1;
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Deterministic union: the smaller root wins.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn find(&mut self, mut v: VertexId) -> VertexId {
        while self.parent[v] != v {
            let gp = self.parent[self.parent[v]];
            self.parent[v] = gp;
            v = gp;
        }
        v
    }

    fn find_const(&self, mut v: VertexId) -> VertexId {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    pub fn same_component(&self, a: VertexId, b: VertexId) -> bool {
        self.find_const(a) == self.find_const(b)
    }

    pub fn is_solved(&self) -> bool {
        self.goal.is_some_and(|g| self.same_component(self.start, g))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn goal(&self) -> Option<VertexId> {
        self.goal
    }

    pub fn vertex(&self, id: VertexId) -> &State {
        &self.vertices[id]
    }

    pub fn vertices(&self) -> &[State] {
        &self.vertices
    }

    pub fn neighbors(&self, id: VertexId) -> &[Edge] {
        &self.adjacency[id]
    }

    /// Every edge once, as `(a, b, cost)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, es)| es.iter().filter(move |e| a < e.to).map(move |e| (a, e.to, e.cost)))
    }

    /// Nearest vertex to `x` among those accepted by `filter`; ties go to
    /// the lowest id.
    pub fn nearest(
        &self,
        space: &StateSpace,
        x: &[f64],
        meter: Option<&WorkMeter>,
        filter: impl Fn(VertexId) -> bool,
    ) -> Option<VertexId> {
        let mut best: Option<(f64, VertexId)> = None;
        let mut evals = 0u64;
        for (id, v) in self.vertices.iter().enumerate() {
            if !filter(id) {
                continue;
            }
            evals += 1;
            let d = space.distance(x, v);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, id));
            }
        }
        if let Some(m) = meter {
            m.record_distances(evals);
        }
        best.map(|(_, id)| id)
    }

    /// Up to `k` nearest vertices to `x` (excluding `exclude`), closest
    /// first, ties by id.
    pub fn k_nearest(
        &self,
        space: &StateSpace,
        x: &[f64],
        k: usize,
        exclude: Option<VertexId>,
        meter: Option<&WorkMeter>,
    ) -> Vec<(VertexId, f64)> {
        if k == 0 {
            return Vec::new();
        }
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        let mut evals = 0u64;
        for (id, v) in self.vertices.iter().enumerate() {
            if Some(id) == exclude {
                continue;
            }
            evals += 1;
            let c = Candidate { cost: space.distance(x, v), id };
            if heap.len() < k {
                heap.push(c);
            } else if c < *heap.peek().unwrap() {
                heap.pop();
                heap.push(c);
            }
        }
        if let Some(m) = meter {
            m.record_distances(evals);
        }
        heap.into_sorted_vec().into_iter().map(|c| (c.id, c.cost)).collect()
    }

    /// Shortest start-to-goal path by edge cost (A* with the metric distance
    /// to the goal as heuristic).
    pub fn extract_path(&self, space: &StateSpace) -> Option<Vec<State>> {
        self.extract_path_ids(space).map(|ids| ids.into_iter().map(|i| self.vertices[i].clone()).collect())
    }

    pub fn extract_path_ids(&self, space: &StateSpace) -> Option<Vec<VertexId>> {
        let goal = self.goal?;
        if !self.same_component(self.start, goal) {
            return None;
        }
        let goal_state = &self.vertices[goal];
        let n = self.vertices.len();
        let mut g = vec![f64::INFINITY; n];
        let mut came_from = vec![usize::MAX; n];
        let mut closed = vec![false; n];
        let mut open = BinaryHeap::new();
        g[self.start] = 0.0;
        open.push(core::cmp::Reverse(Candidate {
            cost: space.distance(&self.vertices[self.start], goal_state),
            id: self.start,
        }));
        while let Some(core::cmp::Reverse(Candidate { id, .. })) = open.pop() {
            if closed[id] {
                continue;
            }
            if id == goal {
                let mut path = vec![goal];
                let mut cur = goal;
                while cur != self.start {
                    cur = came_from[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            closed[id] = true;
            for e in &self.adjacency[id] {
                if closed[e.to] {
                    continue;
                }
                let tentative = g[id] + e.cost;
                if tentative < g[e.to] {
                    g[e.to] = tentative;
                    came_from[e.to] = id;
                    let f = tentative + space.distance(&self.vertices[e.to], goal_state);
                    open.push(core::cmp::Reverse(Candidate { cost: f, id: e.to }));
                }
            }
        }
        None
    }

    /// Sum of metric lengths along a vertex path.
    pub fn path_cost(space: &StateSpace, path: &[State]) -> f64 {
        path.windows(2).map(|w| space.distance(&w[0], &w[1])).sum()
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    cost: f64,
    id: VertexId,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost.total_cmp(&other.cost).then(self.id.cmp(&other.id))
    }
}

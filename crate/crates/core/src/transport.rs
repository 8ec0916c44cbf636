//! Minimum-cost transportation solver: assigns unit-supply items to sinks
//! with fixed capacities at minimum total cost, via successive shortest
//! augmenting paths with Johnson potentials. One Dijkstra per unit of flow;
//! sized for a few hundred items and a few dozen sinks.

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    flow: i64,
    cost: f64,
}

struct FlowNetwork {
    // Adjacency of edge indices; edge i and i^1 are a forward/backward pair.
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: f64) {
        let idx = self.edges.len();
        self.edges.push(Edge { to, cap, flow: 0, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            flow: 0,
            cost: -cost,
        });
        self.adj[from].push(idx);
        self.adj[to].push(idx + 1);
    }

    fn residual(&self, e: usize) -> i64 {
        self.edges[e].cap - self.edges[e].flow
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reverse ordering: BinaryHeap is a max-heap, we want the min.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Assigns each of `costs.len()` items to one of `capacities.len()` sinks so
/// that sink `j` receives at most `capacities[j]` items and the summed
/// assignment cost is minimal. `costs[i][j]` is the cost of sending item `i`
/// to sink `j`; all costs must be non-negative and finite.
///
/// Returns the sink index chosen for each item. Requires
/// `sum(capacities) >= items`.
pub(crate) fn assign_min_cost(costs: &[Vec<f64>], capacities: &[usize]) -> Vec<usize> {
    let items = costs.len();
    let sinks = capacities.len();
    assert!(capacities.iter().sum::<usize>() >= items, "insufficient capacity");
    if items == 0 {
        return Vec::new();
    }

    let source = 0;
    let item_node = |i: usize| 1 + i;
    let sink_node = |j: usize| 1 + items + j;
    let terminal = 1 + items + sinks;
    let mut net = FlowNetwork::new(terminal + 1);

    for (i, item_costs) in costs.iter().enumerate() {
        net.add_edge(source, item_node(i), 1, 0.0);
        debug_assert_eq!(item_costs.len(), sinks);
        for (j, &cost) in item_costs.iter().enumerate() {
            debug_assert!(cost >= 0.0 && cost.is_finite());
            net.add_edge(item_node(i), sink_node(j), 1, cost);
        }
    }
    for (j, &cap) in capacities.iter().enumerate() {
        net.add_edge(sink_node(j), terminal, cap as i64, 0.0);
    }

    let nodes = net.adj.len();
    let mut potential = vec![0.0f64; nodes];
    let mut dist = vec![f64::INFINITY; nodes];
    let mut pred = vec![usize::MAX; nodes];

    for _ in 0..items {
        // Dijkstra on reduced costs from the source.
        dist.fill(f64::INFINITY);
        pred.fill(usize::MAX);
        dist[source] = 0.0;
        let mut heap = std::collections::BinaryHeap::new();
        heap.push(HeapEntry { dist: 0.0, node: source });
        while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &e in &net.adj[u] {
                if net.residual(e) <= 0 {
                    continue;
                }
                let v = net.edges[e].to;
                let reduced = net.edges[e].cost + potential[u] - potential[v];
                let nd = d + reduced;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = e;
                    heap.push(HeapEntry { dist: nd, node: v });
                }
            }
        }
        assert!(dist[terminal].is_finite(), "augmenting path must exist");
        for v in 0..nodes {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        // Augment one unit along the shortest path.
        let mut v = terminal;
        while v != source {
            let e = pred[v];
            net.edges[e].flow += 1;
            net.edges[e ^ 1].flow -= 1;
            v = net.edges[e ^ 1].to;
        }
    }

    let mut assignment = vec![usize::MAX; items];
    for (i, slot) in assignment.iter_mut().enumerate() {
        for &e in &net.adj[item_node(i)] {
            let edge = &net.edges[e];
            if e % 2 == 0 && edge.flow > 0 {
                *slot = edge.to - 1 - items;
            }
        }
        debug_assert_ne!(*slot, usize::MAX);
    }
    assignment
}

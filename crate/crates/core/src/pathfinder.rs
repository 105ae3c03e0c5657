//! k shortest loopless paths per request and the per-edge path information set.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeKey, Network, NodeId, Request};

/// Identifies path `rank` of request `request`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathKey {
    pub request: u32,
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub request_id: u32,
    pub rank: u32,
    pub nodes: Vec<NodeId>,
}

impl Path {
    pub fn key(&self) -> PathKey {
        PathKey {
            request: self.request_id,
            rank: self.rank,
        }
    }

    /// Hop count.
    pub fn length(&self) -> u32 {
        (self.nodes.len() - 1) as u32
    }

    /// Edges from source to terminal.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.nodes.windows(2).map(|w| EdgeKey::new(w[0], w[1]))
    }
}

/// One traversal of an edge: `[r, l, d, o]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathInfoEntry {
    pub request_id: u32,
    pub path_rank: u32,
    pub path_length: u32,
    pub edge_order: u32,
}

impl PathInfoEntry {
    pub fn path_key(&self) -> PathKey {
        PathKey {
            request: self.request_id,
            rank: self.path_rank,
        }
    }
}

/// Edge → every path traversal recorded on it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathInfoSet {
    entries: BTreeMap<EdgeKey, Vec<PathInfoEntry>>,
}

impl PathInfoSet {
    pub fn get(&self, edge: EdgeKey) -> &[PathInfoEntry] {
        self.entries.get(&edge).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeKey, &[PathInfoEntry])> {
        self.entries.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn edge_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn build_path_info(paths: &[Path]) -> PathInfoSet {
    let mut entries: BTreeMap<EdgeKey, Vec<PathInfoEntry>> = BTreeMap::new();
    for path in paths {
        let d = path.length();
        for (o, edge) in path.edges().enumerate() {
            entries.entry(edge).or_default().push(PathInfoEntry {
                request_id: path.request_id,
                path_rank: path.rank,
                path_length: d,
                edge_order: o as u32,
            });
        }
    }
    PathInfoSet { entries }
}

/// Up to `k` loopless paths from `s` to `t` over active edges, ordered by hop
/// count and then by node sequence. Empty when `t` is unreachable.
///
/// Yen's algorithm with a breadth-first spur search that always returns the
/// lexicographically smallest shortest spur, so ties resolve the same way an
/// exhaustive sort would.
pub fn k_shortest_paths(net: &Network, s: NodeId, t: NodeId, k: usize) -> Vec<Vec<NodeId>> {
    let adj = net.active_adjacency();
    yen(&adj, s, t, k)
}

pub(crate) fn yen(adj: &[Vec<NodeId>], s: NodeId, t: NodeId, k: usize) -> Vec<Vec<NodeId>> {
    if k == 0 || s == t {
        return Vec::new();
    }
    let n = adj.len();
    let mut blocked_nodes = vec![false; n];
    let Some(first) = lex_shortest(adj, s, t, &blocked_nodes, &[]) else {
        return Vec::new();
    };
    let mut accepted = vec![first];
    let mut candidates: BTreeSet<(usize, Vec<NodeId>)> = BTreeSet::new();

    while accepted.len() < k {
        let prev = accepted.last().unwrap().clone();
        for i in 0..prev.len() - 1 {
            let spur = prev[i];
            let root = &prev[..=i];
            let blocked_edges: Vec<EdgeKey> = accepted
                .iter()
                .filter(|p| p.len() > i + 1 && &p[..=i] == root)
                .map(|p| EdgeKey::new(p[i], p[i + 1]))
                .collect();
            for &node in &root[..i] {
                blocked_nodes[node.index()] = true;
            }
            let spur_path = lex_shortest(adj, spur, t, &blocked_nodes, &blocked_edges);
            for &node in &root[..i] {
                blocked_nodes[node.index()] = false;
            }
            if let Some(spur_path) = spur_path {
                let mut full = root[..i].to_vec();
                full.extend(spur_path);
                if !accepted.contains(&full) {
                    candidates.insert((full.len(), full));
                }
            }
        }
        match candidates.pop_first() {
            Some((_, next)) => accepted.push(next),
            None => break,
        }
    }
    accepted
}

/// Lexicographically smallest among the shortest `s`–`t` paths avoiding the
/// blocked nodes and edges.
fn lex_shortest(
    adj: &[Vec<NodeId>],
    s: NodeId,
    t: NodeId,
    blocked_nodes: &[bool],
    blocked_edges: &[EdgeKey],
) -> Option<Vec<NodeId>> {
    const UNSEEN: u32 = u32::MAX;
    let usable = |a: NodeId, b: NodeId| !blocked_nodes[b.index()] && !blocked_edges.contains(&EdgeKey::new(a, b));

    // distances to t
    let mut dist = vec![UNSEEN; adj.len()];
    dist[t.index()] = 0;
    let mut queue = VecDeque::from([t]);
    while let Some(u) = queue.pop_front() {
        if u == s {
            break;
        }
        for &v in &adj[u.index()] {
            if dist[v.index()] == UNSEEN && usable(u, v) {
                dist[v.index()] = dist[u.index()] + 1;
                queue.push_back(v);
            }
        }
    }
    if dist[s.index()] == UNSEEN {
        return None;
    }

    let mut path = vec![s];
    let mut cur = s;
    while cur != t {
        let d = dist[cur.index()];
        cur = *adj[cur.index()]
            .iter()
            .find(|&&v| dist[v.index()] != UNSEEN && dist[v.index()] + 1 == d && usable(cur, v))
            .expect("breadth-first layer has a predecessor");
        path.push(cur);
    }
    Some(path)
}

/// Runs [`k_shortest_paths`] for every request and assigns ranks. Requests
/// without any path contribute nothing.
pub fn find_paths(net: &Network, requests: &[Request], k: usize) -> Vec<Path> {
    let adj = net.active_adjacency();
    let mut out = Vec::new();
    for r in requests {
        for (rank, nodes) in yen(&adj, r.source, r.terminal, k).into_iter().enumerate() {
            out.push(Path {
                request_id: r.id,
                rank: rank as u32,
                nodes,
            });
        }
    }
    out
}

/// Requests for which `k * f_min` cannot cover the demand even in principle.
pub fn undersized_k(requests: &[Request], k: usize, f_min: u32) -> Vec<u32> {
    requests
        .iter()
        .filter(|r| (k as u64) * u64::from(f_min) < u64::from(r.demand))
        .map(|r| r.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{build_lattice, TopologyKind};

    fn grid(r: u32, c: u32) -> Network {
        build_lattice(r, c, TopologyKind::Square).unwrap()
    }

    #[test]
    fn two_by_two_opposite_corners() {
        let net = grid(2, 2);
        let paths = k_shortest_paths(&net, NodeId(0), NodeId(3), 2);
        assert_eq!(
            paths,
            vec![
                vec![NodeId(0), NodeId(1), NodeId(3)],
                vec![NodeId(0), NodeId(2), NodeId(3)]
            ]
        );
        // no third loopless route exists
        assert_eq!(k_shortest_paths(&net, NodeId(0), NodeId(3), 5).len(), 2);
    }

    #[test]
    fn three_by_three_monotone_paths() {
        let net = grid(3, 3);
        let paths = k_shortest_paths(&net, NodeId(0), NodeId(8), 6);
        assert_eq!(paths.len(), 6);
        assert!(paths.iter().all(|p| p.len() == 5));
        let seventh = k_shortest_paths(&net, NodeId(0), NodeId(8), 7);
        assert!(seventh[6].len() > 5);
    }

    #[test]
    fn k_one_is_bfs_shortest() {
        let net = grid(4, 4);
        let paths = k_shortest_paths(&net, NodeId(1), NodeId(14), 1);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].len() - 1, 4);
    }

    #[test]
    fn disconnected_gives_nothing() {
        let mut net = grid(2, 3);
        for e in net.edges_mut() {
            if e.key.touches(NodeId(5)) {
                e.active = false;
            }
        }
        assert!(k_shortest_paths(&net, NodeId(0), NodeId(5), 3).is_empty());
    }

    #[test]
    fn path_info_single_path() {
        let p = Path {
            request_id: 0,
            rank: 0,
            nodes: vec![NodeId(0), NodeId(1), NodeId(2), NodeId(5)],
        };
        let h = build_path_info(&[p]);
        assert_eq!(h.edge_count(), 3);
        let orders: Vec<u32> = h.iter().map(|(_, e)| e[0].edge_order).collect();
        assert_eq!(orders, vec![0, 1, 2]);
        assert!(h.iter().all(|(_, e)| e.len() == 1 && e[0].path_length == 3));
        assert!(build_path_info(&[]).is_empty());
    }

    #[test]
    fn shared_edge_collects_both_entries() {
        let a = Path {
            request_id: 0,
            rank: 0,
            nodes: vec![NodeId(0), NodeId(1), NodeId(2)],
        };
        let b = Path {
            request_id: 1,
            rank: 3,
            nodes: vec![NodeId(4), NodeId(1), NodeId(2), NodeId(5)],
        };
        let h = build_path_info(&[a, b]);
        let shared = h.get(EdgeKey::new(NodeId(1), NodeId(2)));
        assert_eq!(shared.len(), 2);
        assert_eq!(shared[1].edge_order, 1);
        assert_eq!(shared[1].path_length, 3);
    }

    #[test]
    fn k_guideline() {
        let req = |id, demand| Request {
            id,
            source: NodeId(0),
            terminal: NodeId(1),
            demand,
            weight: 1.0,
        };
        assert_eq!(undersized_k(&[req(0, 10), req(1, 31)], 10, 3), vec![1]);
    }
}

//! Integral max-flow (Dinic) and bipartite matching (Kuhn).

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

/// Flow network with integer capacities.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

/// Handle to a forward arc for reading its flow after [`FlowNetwork::max_flow`].
#[derive(Clone, Copy, Debug)]
pub struct ArcId {
    from: usize,
    index: usize,
    cap: u32,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u32) -> ArcId {
        let index = self.adj[from].len();
        let rev = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc { to, cap, rev });
        self.adj[to].push(Arc {
            to: from,
            cap: 0,
            rev: index,
        });
        ArcId { from, index, cap }
    }

    pub fn flow_on(&self, id: ArcId) -> u32 {
        id.cap - self.adj[id.from][id.index].cap
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.adj[u] {
                if a.cap > 0 && level[a.to] == usize::MAX {
                    level[a.to] = level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn augment(
        &mut self,
        u: usize,
        t: usize,
        limit: u32,
        level: &[usize],
        next: &mut [usize],
    ) -> u32 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let i = next[u];
            let Arc { to, cap, rev } = self.adj[u][i].clone();
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.augment(to, t, limit.min(cap), level, next);
                if pushed > 0 {
                    self.adj[u][i].cap -= pushed;
                    self.adj[to][rev].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }

    /// Maximum flow value from `s` to `t`; residual capacities are kept for [`Self::flow_on`].
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0u64;
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.augment(s, t, u32::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += u64::from(pushed);
            }
        }
        total
    }
}

/// Maximum matching of left vertices into right vertices; `match_of_left[l]` is the partner.
pub fn max_bipartite_matching(left_adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    fn try_kuhn(
        l: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &r in &adj[l] {
            if std::mem::replace(&mut seen[r], true) {
                continue;
            }
            if owner[r].is_none_or(|o| try_kuhn(o, adj, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; right];
    for l in 0..left_adj.len() {
        let mut seen = vec![false; right];
        try_kuhn(l, left_adj, &mut seen, &mut owner);
    }
    let mut out = vec![None; left_adj.len()];
    for (r, o) in owner.iter().enumerate() {
        if let Some(l) = *o {
            out[l] = Some(r);
        }
    }
    out
}

//! Small graph helpers over adjacency lists.

use alloc::vec;
use alloc::vec::Vec;

/// Strongly connected components (Tarjan, iterative). Components come out in
/// reverse topological order; members are sorted.
pub fn strongly_connected(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSET: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSET; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut edge)) = work.last_mut() {
            if *edge == 0 && index[v] == UNSET {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = succ[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSET {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut scc = Vec::new();
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    scc.push(w);
                    if w == v {
                        break;
                    }
                }
                scc.sort_unstable();
                out.push(scc);
            }
        }
    }
    out
}

/// Longest weighted path where every node carries a weight and strongly
/// connected groups are collapsed into one node weighing the sum of members.
pub fn longest_path_bound(succ: &[Vec<usize>], weight: &[u64]) -> u64 {
    let sccs = strongly_connected(succ);
    let mut group = vec![0; succ.len()];
    for (g, members) in sccs.iter().enumerate() {
        for &m in members {
            group[m] = g;
        }
    }
    let group_weight: Vec<u64> = sccs.iter().map(|m| m.iter().map(|&v| weight[v]).sum()).collect();
    // Tarjan yields sinks first, so walking in order sees successors before predecessors.
    let mut best = vec![0u64; sccs.len()];
    for (g, members) in sccs.iter().enumerate() {
        let mut tail = 0;
        for &v in members {
            for &w in &succ[v] {
                let h = group[w];
                if h != g {
                    tail = tail.max(best[h]);
                }
            }
        }
        best[g] = group_weight[g] + tail;
    }
    best.into_iter().max().unwrap_or(0)
}

use crate::game::{ParityGame, Player, Priority, Vertex};

/// Attractor of `target` for `player` within the vertices where `inside` is
/// set. Returns membership and, for attracted `player` vertices outside the
/// target, the successor chosen.
pub(super) fn attractor(
    game: &ParityGame,
    inside: &[bool],
    player: Player,
    target: &[Vertex],
) -> (Vec<bool>, Vec<Option<Vertex>>) {
    let n = game.vertex_count();
    let mut member = vec![false; n];
    let mut choice = vec![None; n];
    let mut count: Vec<usize> = (0..n)
        .map(|v| {
            if inside[v] {
                game.successors(v).iter().filter(|&&w| inside[w]).count()
            } else {
                0
            }
        })
        .collect();
    let mut queue = Vec::new();
    for &v in target {
        if !member[v] {
            member[v] = true;
            queue.push(v);
        }
    }
    while let Some(u) = queue.pop() {
        for &v in game.predecessors(u) {
            if !inside[v] || member[v] {
                continue;
            }
            if game.owner(v) == player {
                member[v] = true;
                choice[v] = Some(u);
                queue.push(v);
            } else {
                count[v] -= 1;
                if count[v] == 0 {
                    member[v] = true;
                    queue.push(v);
                }
            }
        }
    }
    (member, choice)
}

/// Strongly connected components of the graph on `0..adj.len()`, by
/// Kosaraju's algorithm with explicit stacks.
pub(super) fn kosaraju(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut radj = vec![Vec::new(); n];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            radj[w].push(v);
        }
    }
    let mut seen = vec![false; n];
    let mut finished = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                finished.push(v);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for &root in finished.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![root];
        comp[root] = id;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for &w in &radj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                }
            }
        }
        out.push(members);
    }
    out
}

/// Finds a cycle in the graph whose highest priority is `player`'s parity.
/// `adj` is over local indices, `priority` gives each index's priority.
/// Returns the top priority and the members of the SCC holding the cycle.
pub(super) fn winning_cycle(
    adj: &[Vec<usize>],
    priority: &[Priority],
    player: Player,
) -> Option<(Priority, Vec<usize>)> {
    let mut alive = vec![true; adj.len()];
    let mut todo: Vec<Vec<usize>> = vec![(0..adj.len()).collect()];
    while let Some(nodes) = todo.pop() {
        let index: std::collections::HashMap<usize, usize> =
            nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let local: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&v| {
                adj[v]
                    .iter()
                    .filter(|&&w| alive[w])
                    .filter_map(|w| index.get(w).copied())
                    .collect()
            })
            .collect();
        for comp in kosaraju(&local) {
            let members: Vec<usize> = comp.iter().map(|&i| nodes[i]).collect();
            let cyclic = members.len() > 1 || local[comp[0]].contains(&comp[0]);
            if !cyclic {
                continue;
            }
            let top = members.iter().map(|&v| priority[v]).max().unwrap();
            if Player::of_priority(top) == player {
                return Some((top, members));
            }
            let rest: Vec<usize> = members
                .into_iter()
                .filter(|&v| {
                    if priority[v] == top {
                        alive[v] = false;
                        false
                    } else {
                        true
                    }
                })
                .collect();
            if !rest.is_empty() {
                todo.push(rest);
            }
        }
    }
    None
}

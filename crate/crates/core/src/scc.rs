//! Iterative Tarjan SCC search over a vertex subset.
//!
//! Uses an explicit call stack so deep graphs cannot overflow the native
//! stack. Buffers are sized to the game once and reused across calls.

use crate::game::Vertex;

#[derive(Clone, Debug)]
pub struct SccFinder {
    index: Vec<u32>,
    low: Vec<u32>,
    on_stack: Vec<bool>,
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<Vertex>,
}

impl SccFinder {
    pub fn new(n: usize) -> SccFinder {
        SccFinder {
            index: vec![0; n],
            low: vec![0; n],
            on_stack: vec![false; n],
            stamp: vec![0; n],
            epoch: 0,
            stack: Vec::new(),
        }
    }

    /// Runs Tarjan's algorithm from every vertex of `nodes`, following
    /// `succ`, and calls `emit` once per component. Components come out in
    /// reverse topological order, sinks first.
    ///
    /// `succ` must only yield vertices that are in `nodes`.
    pub fn run<S, I, E>(&mut self, nodes: &[Vertex], succ: S, mut emit: E)
    where
        S: Fn(Vertex) -> I,
        I: Iterator<Item = Vertex>,
        E: FnMut(&[Vertex]),
    {
        if self.epoch == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        let epoch = self.epoch;
        let mut counter: u32 = 0;
        let mut calls: Vec<(Vertex, I)> = Vec::new();
        let mut component = Vec::new();
        for &root in nodes {
            if self.stamp[root] == epoch {
                continue;
            }
            self.visit(root, &mut counter);
            calls.push((root, succ(root)));
            while let Some(top) = calls.last_mut() {
                let v = top.0;
                if let Some(w) = top.1.next() {
                    if self.stamp[w] != epoch {
                        self.visit(w, &mut counter);
                        calls.push((w, succ(w)));
                    } else if self.on_stack[w] {
                        self.low[v] = self.low[v].min(self.index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(parent) = calls.last() {
                    let p = parent.0;
                    self.low[p] = self.low[p].min(self.low[v]);
                }
                if self.low[v] == self.index[v] {
                    component.clear();
                    loop {
                        let w = self.stack.pop().expect("tarjan stack underflow");
                        self.on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    emit(&component);
                }
            }
        }
    }

    fn visit(&mut self, v: Vertex, counter: &mut u32) {
        self.stamp[v] = self.epoch;
        self.index[v] = *counter;
        self.low[v] = *counter;
        *counter += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
    }
}

/// Strongly connected components of a graph on `0..adj.len()`.
pub fn components(adj: &[Vec<Vertex>]) -> Vec<Vec<Vertex>> {
    let nodes: Vec<Vertex> = (0..adj.len()).collect();
    let mut out = Vec::new();
    SccFinder::new(adj.len()).run(&nodes, |v| adj[v].iter().copied(), |c| {
        out.push(c.to_vec())
    });
    out
}

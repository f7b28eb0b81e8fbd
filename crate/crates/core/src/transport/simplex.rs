//! Primal network simplex for the dense transportation problem.
//!
//! Integer supplies, real costs, uncapacitated arcs. The spanning-tree
//! bookkeeping (thread/successor lists) and the strongly feasible leaving-arc
//! rule follow the classic LEMON design; entering arcs are chosen by block
//! search.

use crate::error::{Error, Result};

const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;
const NONE: usize = usize::MAX;
const INF: i64 = i64::MAX;

/// Optimal flows of a transportation problem.
#[derive(Clone, Debug)]
pub(crate) struct Solution {
    /// `(source, sink, units)` for every arc with positive flow.
    pub flows: Vec<(usize, usize, u64)>,
    /// Node potentials: sources first, then sinks.
    #[cfg_attr(not(test), allow(dead_code))]
    pub potentials: Vec<f64>,
}

pub(crate) struct Transportation<'a> {
    supply: &'a [u64],
    demand: &'a [u64],
    costs: &'a [f64],
}

impl<'a> Transportation<'a> {
    /// `costs` is row-major `supply.len() x demand.len()`.
    pub(crate) fn new(supply: &'a [u64], demand: &'a [u64], costs: &'a [f64]) -> Self {
        debug_assert_eq!(costs.len(), supply.len() * demand.len());
        Self {
            supply,
            demand,
            costs,
        }
    }

    pub(crate) fn solve(&self) -> Result<Solution> {
        let total_supply: u64 = self.supply.iter().sum();
        let total_demand: u64 = self.demand.iter().sum();
        if total_supply != total_demand {
            return Err(Error::Infeasible);
        }
        let mut s = Simplex::new(self);
        s.run()?;
        Ok(s.solution())
    }
}

struct Simplex<'a> {
    n: usize,
    m: usize,
    costs: &'a [f64],
    arc_num: usize,
    root: usize,
    art_cost: f64,
    art_source: Vec<usize>,
    art_target: Vec<usize>,
    flow: Vec<i64>,
    state: Vec<i8>,

    parent: Vec<usize>,
    pred: Vec<usize>,
    // +1 when the tree arc to the parent points up (node is its source).
    pred_dir: Vec<i8>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pi: Vec<f64>,
    dirty_revs: Vec<usize>,

    block_size: usize,
    next_arc: usize,

    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: i64,
}

impl<'a> Simplex<'a> {
    fn new(p: &Transportation<'a>) -> Self {
        let (n, m) = (p.supply.len(), p.demand.len());
        let node_num = n + m;
        let arc_num = n * m;
        let root = node_num;
        let max_cost = p.costs.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        let art_cost = (max_cost + 1.0) * node_num as f64;
        let all_arcs = arc_num + node_num;

        let mut s = Self {
            n,
            m,
            costs: p.costs,
            arc_num,
            root,
            art_cost,
            art_source: vec![0; node_num],
            art_target: vec![0; node_num],
            flow: vec![0; all_arcs],
            state: vec![STATE_LOWER; all_arcs],
            parent: vec![NONE; node_num + 1],
            pred: vec![NONE; node_num + 1],
            pred_dir: vec![0; node_num + 1],
            thread: vec![0; node_num + 1],
            rev_thread: vec![0; node_num + 1],
            succ_num: vec![0; node_num + 1],
            last_succ: vec![0; node_num + 1],
            pi: vec![0.0; node_num + 1],
            dirty_revs: Vec::new(),
            block_size: ((all_arcs as f64).sqrt() as usize).max(10),
            next_arc: 0,
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0,
        };

        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = node_num + 1;
        s.last_succ[root] = root - 1;
        for u in 0..node_num {
            let e = arc_num + u;
            s.parent[u] = root;
            s.pred[u] = e;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            s.state[e] = STATE_TREE;
            if u < n {
                s.pred_dir[u] = 1;
                s.pi[u] = 0.0;
                s.art_source[u] = u;
                s.art_target[u] = root;
                s.flow[e] = p.supply[u] as i64;
            } else {
                s.pred_dir[u] = -1;
                s.pi[u] = art_cost;
                s.art_source[u] = root;
                s.art_target[u] = u;
                s.flow[e] = p.demand[u - n] as i64;
            }
        }
        s
    }

    #[inline]
    fn source(&self, e: usize) -> usize {
        if e < self.arc_num {
            e / self.m
        } else {
            self.art_source[e - self.arc_num]
        }
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        if e < self.arc_num {
            self.n + e % self.m
        } else {
            self.art_target[e - self.arc_num]
        }
    }

    #[inline]
    fn cost(&self, e: usize) -> f64 {
        if e < self.arc_num {
            self.costs[e]
        } else if self.art_source[e - self.arc_num] == self.root {
            self.art_cost
        } else {
            0.0
        }
    }

    /// Signed reduced cost scaled by arc state and the tolerance for it.
    #[inline]
    fn pivot_value(&self, e: usize) -> (f64, f64) {
        let (s, t) = (self.source(e), self.target(e));
        let c = self.cost(e);
        let rc = f64::from(self.state[e]) * (c + self.pi[s] - self.pi[t]);
        let scale = c.abs().max(self.pi[s].abs()).max(self.pi[t].abs());
        (rc, 1e-13 * scale)
    }

    fn find_entering_arc(&mut self) -> bool {
        let search = self.arc_num + self.n + self.m;
        let mut min = 0.0;
        let mut cnt = self.block_size;
        let mut e = self.next_arc;
        let mut found = false;
        for _ in 0..search {
            if self.state[e] != STATE_TREE {
                let (rc, tol) = self.pivot_value(e);
                if rc < -tol && rc < min {
                    min = rc;
                    self.in_arc = e;
                    found = true;
                }
            }
            e += 1;
            if e == search {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if found {
                    break;
                }
                cnt = self.block_size;
            }
        }
        self.next_arc = e;
        found
    }

    fn find_join_node(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    fn find_leaving_arc(&mut self) -> bool {
        // Entering arcs always come from the lower bound in the uncapacitated case.
        let first = self.source(self.in_arc);
        let second = self.target(self.in_arc);
        self.delta = INF;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == -1 {
                INF
            } else {
                self.flow[e]
            };
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == 1 {
                INF
            } else {
                self.flow[e]
            };
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self) {
        if self.delta > 0 {
            let val = self.delta;
            self.flow[self.in_arc] += val;
            let mut u = self.source(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] -= i64::from(self.pred_dir[u]) * val;
                u = self.parent[u];
            }
            let mut u = self.target(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += i64::from(self.pred_dir[u]) * val;
                u = self.parent[u];
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let out = self.pred[self.u_out];
        debug_assert_eq!(self.flow[out], 0);
        self.state[out] = STATE_LOWER;
    }

    fn update_tree_structure(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source(self.in_arc) {
                1
            } else {
                -1
            };

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };

            // Re-hang the stem between u_in and u_out.
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for i in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[i];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc = tmp_sc + self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source(self.in_arc) {
                1
            } else {
                -1
            };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in {
            join
        } else {
            NONE
        };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let u_in = self.u_in;
        let sigma = self.pi[self.v_in]
            - self.pi[u_in]
            - f64::from(self.pred_dir[u_in]) * self.cost(self.in_arc);
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    fn run(&mut self) -> Result<()> {
        while self.find_entering_arc() {
            self.find_join_node();
            if !self.find_leaving_arc() || self.delta == INF {
                return Err(Error::Infeasible);
            }
            self.change_flow();
            self.update_tree_structure();
            self.update_potential();
        }
        if self.flow[self.arc_num..].iter().any(|&f| f != 0) {
            return Err(Error::Infeasible);
        }
        Ok(())
    }

    fn solution(&self) -> Solution {
        let flows = (0..self.arc_num)
            .filter(|&e| self.flow[e] > 0)
            .map(|e| (e / self.m, e % self.m, self.flow[e] as u64))
            .collect();
        Solution {
            flows,
            potentials: self.pi[..self.n + self.m].to_vec(),
        }
    }
}

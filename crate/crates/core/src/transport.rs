//! Discretized dual as a min-cost transportation problem.
//!
//! The grid dual of maximizing `sum mu . u` subject to
//! `u(x) - u(y) <= l_S(x, y)` over all support pairs is a balanced
//! transportation problem between the positive part of `mu` (sources) and the
//! negative part (sinks) with arc cost `l_S`. It is solved exactly by
//! successive shortest augmenting paths with node potentials; the final
//! potentials are a feasible dual solution that certifies optimality via
//! complementary slackness, and they extend to a feasible mechanism on the
//! whole grid (`recovered_mechanism`).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::allocation::AllocationSet;
use crate::error::{Error, Result};
use crate::exec;
use crate::measure::SignedMeasure;
use crate::menu::Menu;

/// Balanced source/sink lists with the support-function cost oracle.
#[derive(Debug, Clone)]
pub struct TransportInstance {
    pub sources: Vec<(Vec<f64>, f64)>,
    pub sinks: Vec<(Vec<f64>, f64)>,
    alloc: AllocationSet,
    /// Dense cost matrix, built when `sources * sinks` is small enough.
    dense: Option<Vec<f64>>,
}

/// Keep a dense cost matrix up to this many arcs (8 bytes each).
const DENSE_ARC_LIMIT: usize = 4_000_000;

impl TransportInstance {
    /// Splits `mu` into sources (positive part) and sinks (negative part).
    /// Requires `|mu(X)| <= 1e-8`; weights are then rescaled so the totals
    /// match exactly. Zero-weight support points are dropped.
    pub fn from_measure(mu: &SignedMeasure, alloc: &AllocationSet) -> Result<Self> {
        if mu.total_mass().abs() > 1e-8 {
            return Err(Error::input(format!(
                "transformed measure must have zero total mass, got {:.3e}",
                mu.total_mass()
            )));
        }
        let mut sources = Vec::new();
        let mut sinks = Vec::new();
        let mut push = |point: Vec<f64>, w: f64| {
            if w > 0.0 {
                sources.push((point, w));
            } else if w < 0.0 {
                sinks.push((point, -w));
            }
        };
        for a in &mu.atoms {
            push(a.point.clone(), a.weight);
        }
        for c in &mu.cells {
            push(c.midpoint(), c.weight);
        }
        let supply = exec::sum_compensated(sources.iter().map(|s| s.1));
        let demand = exec::sum_compensated(sinks.iter().map(|s| s.1));
        if demand > 0.0 {
            let factor = supply / demand;
            for s in &mut sinks {
                s.1 *= factor;
            }
        }
        Ok(Self::new(sources, sinks, alloc.clone()))
    }

    pub fn new(
        sources: Vec<(Vec<f64>, f64)>,
        sinks: Vec<(Vec<f64>, f64)>,
        alloc: AllocationSet,
    ) -> Self {
        let mut inst = TransportInstance {
            sources,
            sinks,
            alloc,
            dense: None,
        };
        let arcs = inst.sources.len() * inst.sinks.len();
        if arcs > 0 && arcs <= DENSE_ARC_LIMIT {
            let t = inst.sinks.len();
            let dense = exec::map_indexed(arcs, |k| {
                let (i, j) = (k / t, k % t);
                inst.cost_direct(i, j)
            });
            inst.dense = Some(dense);
        }
        inst
    }

    pub fn allocation_set(&self) -> &AllocationSet {
        &self.alloc
    }

    fn cost_direct(&self, i: usize, j: usize) -> f64 {
        self.alloc
            .pair_cost(&self.sources[i].0, &self.sinks[j].0)
            .expect("instance points share the allocation dimension")
    }

    /// Arc cost `l_S(source_i - sink_j)`.
    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(d) => d[i * self.sinks.len() + j],
            None => self.cost_direct(i, j),
        }
    }

    pub fn is_balanced(&self, tol: f64) -> bool {
        let supply = exec::sum_compensated(self.sources.iter().map(|s| s.1));
        let demand = exec::sum_compensated(self.sinks.iter().map(|s| s.1));
        (supply - demand).abs() <= tol * supply.max(1.0)
    }
}

/// An optimal transportation plan with certifying potentials.
///
/// Potentials are oriented like the mechanism: for every arc
/// `potential(source) - potential(sink) <= cost`, with equality on arcs
/// carrying flow.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    /// (source index, sink index, weight), positive weights only.
    pub flows: Vec<(usize, usize, f64)>,
    pub source_potentials: Vec<f64>,
    pub sink_potentials: Vec<f64>,
    pub cost: f64,
}

impl TransportPlan {
    /// Largest violation of dual feasibility / complementary slackness; a
    /// correct plan keeps this at roundoff level.
    pub fn certificate_residual(&self, instance: &TransportInstance) -> f64 {
        let s = instance.sources.len();
        let t = instance.sinks.len();
        let mut worst: f64 = 0.0;
        let feas = exec::map_indexed(s, |i| {
            let mut m: f64 = 0.0;
            for j in 0..t {
                let slack =
                    self.source_potentials[i] - self.sink_potentials[j] - instance.cost(i, j);
                m = m.max(slack);
            }
            m
        });
        for f in feas {
            worst = worst.max(f);
        }
        for &(i, j, w) in &self.flows {
            if w > 0.0 {
                let slack = instance.cost(i, j)
                    - (self.source_potentials[i] - self.sink_potentials[j]);
                worst = worst.max(slack.abs());
            }
        }
        worst
    }

    /// Dual objective of the potentials; equals `cost` at optimality.
    pub fn dual_value(&self, instance: &TransportInstance) -> f64 {
        let src = exec::sum_compensated(
            instance
                .sources
                .iter()
                .zip(&self.source_potentials)
                .map(|((_, w), p)| w * p),
        );
        let snk = exec::sum_compensated(
            instance
                .sinks
                .iter()
                .zip(&self.sink_potentials)
                .map(|((_, w), p)| w * p),
        );
        src - snk
    }

    /// Per-node flow imbalance against the instance marginals.
    pub fn marginal_residual(&self, instance: &TransportInstance) -> f64 {
        let mut out = vec![0.0; instance.sources.len()];
        let mut inn = vec![0.0; instance.sinks.len()];
        for &(i, j, w) in &self.flows {
            out[i] += w;
            inn[j] += w;
        }
        let mut worst: f64 = 0.0;
        for (o, (_, w)) in out.iter().zip(&instance.sources) {
            worst = worst.max((o - w).abs());
        }
        for (v, (_, w)) in inn.iter().zip(&instance.sinks) {
            worst = worst.max((v - w).abs());
        }
        worst
    }

    /// CSV rows: source point, sink point, weight, arc cost.
    pub fn write_csv<W: std::io::Write>(
        &self,
        instance: &TransportInstance,
        mut w: W,
    ) -> std::io::Result<()> {
        let dim = instance
            .sources
            .first()
            .or(instance.sinks.first())
            .map_or(0, |(p, _)| p.len());
        for i in 0..dim {
            write!(w, "src{i},")?;
        }
        for i in 0..dim {
            write!(w, "dst{i},")?;
        }
        writeln!(w, "weight,cost")?;
        for &(i, j, flow) in &self.flows {
            for c in &instance.sources[i].0 {
                write!(w, "{c:.17e},")?;
            }
            for c in &instance.sinks[j].0 {
                write!(w, "{c:.17e},")?;
            }
            writeln!(w, "{flow:.17e},{:.17e}", instance.cost(i, j))?;
        }
        Ok(())
    }
}

/// Weak-duality gap `plan cost - revenue(menu)`; nonnegative up to roundoff,
/// and near zero exactly when the menu is optimal at grid scale.
pub fn duality_gap(menu: &Menu, plan: &TransportPlan, mu: &SignedMeasure) -> f64 {
    plan.cost - menu.revenue_via_measure(mu)
}

#[derive(Copy, Clone, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

const TIGHT_EPS: f64 = 1e-11;
const FLOW_EPS: f64 = 1e-13;

/// Solves the balanced transportation problem exactly.
///
/// Successive shortest paths with node potentials: each phase runs one
/// Dijkstra over reduced costs (nonnegative throughout, which is valid
/// because the support function is subadditive), updates the potentials, and
/// pushes flow along all shortest tight paths found. Negative raw costs
/// (possible when the allocation set excludes the zero vector) are absorbed
/// by the initial per-sink potentials.
pub fn solve(instance: &TransportInstance) -> Result<TransportPlan> {
    solve_with_hint(instance, None)
}

/// Like [`solve`], seeding the dual potentials from a feasible mechanism
/// (any function with `u(x) - u(y) <= cost(x, y)`, e.g. a candidate menu's
/// surplus). A good hint makes the first phase place almost all flow on its
/// final arcs; a poor hint only slows the solve down, never changes the
/// optimum.
pub fn solve_with_hint(
    instance: &TransportInstance,
    hint: Option<&(dyn Fn(&[f64]) -> f64 + Sync)>,
) -> Result<TransportPlan> {
    let s = instance.sources.len();
    let t = instance.sinks.len();
    if !instance.is_balanced(1e-8) {
        return Err(Error::input("transport instance is not balanced"));
    }
    if s == 0 || t == 0 {
        return Ok(TransportPlan {
            flows: Vec::new(),
            source_potentials: Vec::new(),
            sink_potentials: Vec::new(),
            cost: 0.0,
        });
    }
    if instance.sources.iter().any(|v| v.1 <= 0.0) || instance.sinks.iter().any(|v| v.1 <= 0.0) {
        return Err(Error::input("transport weights must be positive"));
    }

    // pi convention: reduced cost rc(i -> j) = cost + pi_src[i] - pi_snk[j].
    let pi_src: Vec<f64> = match hint {
        Some(u) => instance.sources.iter().map(|(p, _)| -u(p)).collect(),
        None => vec![0.0f64; s],
    };
    // Clamp sink potentials so every reduced cost starts nonnegative even
    // when the hint is infeasible at roundoff level.
    let pi_snk: Vec<f64> = exec::map_indexed(t, |j| {
        let bound = (0..s)
            .map(|i| instance.cost(i, j) + pi_src[i])
            .fold(f64::INFINITY, f64::min);
        match hint {
            Some(u) => (-u(&instance.sinks[j].0)).min(bound),
            None => bound,
        }
    });
    let mut pi_src = pi_src;
    let mut pi_snk = pi_snk;

    let mut excess: Vec<f64> = instance.sources.iter().map(|v| v.1).collect();
    let mut deficit: Vec<f64> = instance.sinks.iter().map(|v| v.1).collect();
    let mut flow: HashMap<(u32, u32), f64> = HashMap::new();
    // Sources with positive flow into each sink, for the residual graph.
    let mut back: Vec<Vec<u32>> = vec![Vec::new(); t];

    let total: f64 = exec::sum_compensated(excess.iter().copied());
    let done_eps = 1e-12 * total.max(1.0);
    let max_phases = 4 * (s + t) + 64;

    // Sinks are offered to sources in descending regret order (gap between
    // their second-cheapest and cheapest source). Greedy placement in this
    // order is near optimal for geometric costs, which keeps the number of
    // rerouting phases small.
    let sink_order: Vec<u32> = {
        let regret: Vec<f64> = exec::map_indexed(t, |j| {
            let mut best = f64::INFINITY;
            let mut second = f64::INFINITY;
            for i in 0..s {
                let c = instance.cost(i, j);
                if c < best {
                    second = best;
                    best = c;
                } else if c < second {
                    second = c;
                }
            }
            if second.is_finite() {
                second - best
            } else {
                0.0
            }
        });
        let mut order: Vec<u32> = (0..t as u32).collect();
        order.sort_by(|&a, &b| regret[b as usize].total_cmp(&regret[a as usize]));
        order
    };

    let mut dist = vec![f64::INFINITY; s + t];
    let mut settled = vec![false; s + t];
    let stats = std::env::var_os("AUCTION_SOLVER_STATS").is_some();
    let mut n_paths = 0u64;

    for phase in 0..max_phases {
        let remaining = exec::sum_compensated(excess.iter().copied());
        if stats {
            eprintln!("phase {phase}: remaining excess {remaining:.6e}, paths so far {n_paths}");
        }
        if remaining <= done_eps {
            let flows: Vec<(usize, usize, f64)> = {
                let mut v: Vec<_> = flow
                    .iter()
                    .filter(|(_, w)| **w > FLOW_EPS)
                    .map(|(&(i, j), &w)| (i as usize, j as usize, w))
                    .collect();
                v.sort_unstable_by_key(|&(i, j, _)| (i, j));
                v
            };
            let cost = exec::sum_compensated(
                flows.iter().map(|&(i, j, w)| w * instance.cost(i, j)),
            );
            // Mechanism-oriented potentials (phi = -pi).
            let plan = TransportPlan {
                flows,
                source_potentials: pi_src.iter().map(|p| -p).collect(),
                sink_potentials: pi_snk.iter().map(|p| -p).collect(),
                cost,
            };
            let resid = plan.certificate_residual(instance);
            if resid > 1e-9 {
                return Err(Error::internal(format!(
                    "optimality certificate violated by {resid:.3e} (cost oracle may break the triangle inequality)"
                )));
            }
            return Ok(plan);
        }

        // Dijkstra over reduced costs from all sources with excess. While
        // many sources carry excess, settle everything so one phase feeds
        // shortest paths to every deficit sink; in the rerouting tail (a few
        // stubborn sources) stop at the first deficit sink, which keeps the
        // tail phases local and cheap. Capping the dual update at any level
        // keeps reduced costs nonnegative.
        let n_excess = excess.iter().filter(|&&e| e > FLOW_EPS).count();
        let full_settle = n_excess > 4;
        dist.fill(f64::INFINITY);
        settled.fill(false);
        let mut heap: BinaryHeap<Reverse<(OrdF64, u32)>> = BinaryHeap::new();
        for i in 0..s {
            if excess[i] > FLOW_EPS {
                dist[i] = 0.0;
                heap.push(Reverse((OrdF64(0.0), i as u32)));
            }
        }
        let mut cap = f64::NEG_INFINITY;
        while let Some(Reverse((OrdF64(d), node))) = heap.pop() {
            let node = node as usize;
            if settled[node] || d > dist[node] {
                continue;
            }
            settled[node] = true;
            if node < s {
                let i = node;
                for j in 0..t {
                    let rc = (instance.cost(i, j) + pi_src[i] - pi_snk[j]).max(0.0);
                    let nd = d + rc;
                    let v = s + j;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(Reverse((OrdF64(nd), v as u32)));
                    }
                }
            } else {
                let j = node - s;
                if !full_settle && deficit[j] > FLOW_EPS {
                    cap = d;
                    break;
                }
                for &iu in &back[j] {
                    let i = iu as usize;
                    if flow.get(&(iu, j as u32)).copied().unwrap_or(0.0) <= FLOW_EPS {
                        continue;
                    }
                    let rc = (pi_snk[j] - pi_src[i] - instance.cost(i, j)).max(0.0);
                    let nd = d + rc;
                    if nd < dist[i] {
                        dist[i] = nd;
                        heap.push(Reverse((OrdF64(nd), i as u32)));
                    }
                }
            }
        }
        if full_settle {
            cap = (0..t)
                .filter(|&j| deficit[j] > FLOW_EPS)
                .map(|j| dist[s + j])
                .fold(f64::NEG_INFINITY, f64::max);
        }
        if !cap.is_finite() {
            return Err(Error::internal(
                "no augmenting path to a deficit sink in a balanced instance",
            ));
        }
        for i in 0..s {
            pi_src[i] += dist[i].min(cap);
        }
        for j in 0..t {
            pi_snk[j] += dist[s + j].min(cap);
        }

        // Max flow over the tight subgraph (Dinic): BFS levels from excess
        // sources, then a layered DFS with current-arc pointers, repeated
        // until no deficit sink is reachable. With a good dual hint the
        // first phase's tight graph already supports an optimal plan, so
        // the whole solve collapses to a few phases.
        let mut level = vec![u32::MAX; s + t];
        let mut next_arc = vec![0usize; s + t];
        let mut queue: Vec<u32> = Vec::with_capacity(s + t);
        loop {
            // BFS layering over tight residual arcs.
            level.fill(u32::MAX);
            queue.clear();
            for i in 0..s {
                if excess[i] > FLOW_EPS {
                    level[i] = 0;
                    queue.push(i as u32);
                }
            }
            let mut reached_deficit = false;
            let mut head = 0;
            while head < queue.len() {
                let node = queue[head] as usize;
                head += 1;
                let d = level[node];
                if node < s {
                    let i = node;
                    for j in 0..t {
                        let v = s + j;
                        if level[v] != u32::MAX {
                            continue;
                        }
                        let rc = instance.cost(i, j) + pi_src[i] - pi_snk[j];
                        if rc.abs() <= TIGHT_EPS {
                            level[v] = d + 1;
                            queue.push(v as u32);
                            if deficit[j] > FLOW_EPS {
                                reached_deficit = true;
                            }
                        }
                    }
                } else {
                    let j = node - s;
                    for &iu in &back[j] {
                        let i = iu as usize;
                        if level[i] != u32::MAX {
                            continue;
                        }
                        if flow.get(&(iu, j as u32)).copied().unwrap_or(0.0) <= FLOW_EPS {
                            continue;
                        }
                        let rc = pi_snk[j] - pi_src[i] - instance.cost(i, j);
                        if rc.abs() <= TIGHT_EPS {
                            level[i] = d + 1;
                            queue.push(i as u32);
                        }
                    }
                }
            }
            if !reached_deficit {
                break;
            }
            // Blocking flow along level-increasing tight arcs.
            next_arc.fill(0);
            for start in 0..s {
                if level[start] != 0 {
                    continue;
                }
                'restart: while excess[start] > FLOW_EPS {
                    let mut path: Vec<usize> = vec![start];
                    let end;
                    'dfs: loop {
                        let node = *path.last().expect("path never empties here");
                        if node >= s && deficit[node - s] > FLOW_EPS {
                            end = node - s;
                            break 'dfs;
                        }
                        let mut advanced = false;
                        if node < s {
                            let i = node;
                            while next_arc[i] < t {
                                let j = sink_order[next_arc[i]] as usize;
                                let v = s + j;
                                if level[v] == level[i] + 1 {
                                    let rc = instance.cost(i, j) + pi_src[i] - pi_snk[j];
                                    if rc.abs() <= TIGHT_EPS {
                                        path.push(v);
                                        advanced = true;
                                        break;
                                    }
                                }
                                next_arc[i] += 1;
                            }
                        } else {
                            let j = node - s;
                            while next_arc[node] < back[j].len() {
                                let iu = back[j][next_arc[node]];
                                let i = iu as usize;
                                if level[i] == level[node] + 1
                                    && flow.get(&(iu, j as u32)).copied().unwrap_or(0.0) > FLOW_EPS
                                {
                                    let rc = pi_snk[j] - pi_src[i] - instance.cost(i, j);
                                    if rc.abs() <= TIGHT_EPS {
                                        path.push(i);
                                        advanced = true;
                                        break;
                                    }
                                }
                                next_arc[node] += 1;
                            }
                        }
                        if !advanced {
                            // Retreat: exhaust this node for the round.
                            level[node] = u32::MAX;
                            path.pop();
                            if let Some(&prev) = path.last() {
                                next_arc[prev] += 1;
                            } else {
                                break 'restart;
                            }
                        }
                    }
                    // Bottleneck along the alternating path.
                    let mut push = excess[start].min(deficit[end]);
                    for w in path.windows(2) {
                        if w[0] >= s {
                            // Backward arc sink -> source limited by its flow.
                            let j = (w[0] - s) as u32;
                            let i = w[1] as u32;
                            push = push.min(flow[&(i, j)]);
                        }
                    }
                    for w in path.windows(2) {
                        if w[0] < s {
                            let key = (w[0] as u32, (w[1] - s) as u32);
                            let e = flow.entry(key).or_insert(0.0);
                            if *e <= FLOW_EPS {
                                back[w[1] - s].push(key.0);
                            }
                            *e += push;
                        } else {
                            let key = (w[1] as u32, (w[0] - s) as u32);
                            *flow.get_mut(&key).unwrap() -= push;
                        }
                    }
                    excess[start] -= push;
                    deficit[end] -= push;
                    n_paths += 1;
                    // Saturated reverse arcs or drained deficits invalidate
                    // the tail of the path; restart from the source.
                }
            }
        }
    }
    Err(Error::internal("transport solver exceeded its phase budget"))
}

/// A mechanism defined on the grid nodes of a transport instance.
#[derive(Debug, Clone)]
pub struct GridMechanism {
    pub nodes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Index of the source attaining the defining max at each node.
    pub winner_source: Vec<usize>,
}

impl GridMechanism {
    /// Allocation vertex index induced at each node. Matched pairs share
    /// the subgradient exposed along their difference, so sink nodes use
    /// the direction toward their winning source and source nodes the
    /// direction toward their heaviest flow partner (the direction from a
    /// source to itself is degenerate and says nothing).
    pub fn allocations(&self, instance: &TransportInstance, plan: &TransportPlan) -> Vec<usize> {
        let s = instance.sources.len();
        let mut partner: Vec<Option<(usize, f64)>> = vec![None; s];
        for &(i, j, w) in &plan.flows {
            if partner[i].is_none_or(|(_, best)| w > best) {
                partner[i] = Some((j, w));
            }
        }
        let items: Vec<(usize, &Vec<f64>)> = (0..self.nodes.len()).zip(self.nodes.iter()).collect();
        exec::map_slice(&items, |&(idx, z)| {
            let d: Vec<f64> = if idx < s {
                match partner[idx] {
                    Some((j, _)) => z
                        .iter()
                        .zip(&instance.sinks[j].0)
                        .map(|(a, b)| a - b)
                        .collect(),
                    None => z.clone(),
                }
            } else {
                let win = self.winner_source[idx];
                instance.sources[win]
                    .0
                    .iter()
                    .zip(z.iter())
                    .map(|(a, b)| a - b)
                    .collect()
            };
            instance.alloc.argmax_vertices(&d, 1e-12).unwrap()[0]
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.nodes.first().map_or(0, |n| n.len());
        for i in 0..dim {
            write!(w, "x{i},")?;
        }
        writeln!(w, "u")?;
        for (node, v) in self.nodes.iter().zip(&self.values) {
            for c in node {
                write!(w, "{c:.17e},")?;
            }
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }
}

/// Extends the plan's source potentials to a feasible mechanism on every
/// grid node: `u(z) = max_i (phi_i - l_S(x_i, z))`, shifted so `min u = 0`.
/// Feasibility `u(z) - u(z') <= l_S(z, z')` holds by subadditivity of the
/// support function, and `integral(u d mu)` reproduces the plan cost.
pub fn recovered_mechanism(plan: &TransportPlan, instance: &TransportInstance) -> GridMechanism {
    let mut nodes: Vec<Vec<f64>> = Vec::with_capacity(instance.sources.len() + instance.sinks.len());
    nodes.extend(instance.sources.iter().map(|(p, _)| p.clone()));
    nodes.extend(instance.sinks.iter().map(|(p, _)| p.clone()));
    let phi = &plan.source_potentials;
    let evaluated: Vec<(f64, usize)> = exec::map_slice(&nodes, |z| {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0usize;
        for (i, (x, _)) in instance.sources.iter().enumerate() {
            let v = phi[i] - instance.alloc.pair_cost(x, z).unwrap();
            if v > best {
                best = v;
                arg = i;
            }
        }
        (best, arg)
    });
    let mut values: Vec<f64> = evaluated.iter().map(|(v, _)| *v).collect();
    let winner_source = evaluated.into_iter().map(|(_, w)| w).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min.is_finite() {
        for v in &mut values {
            *v = (*v - min).max(0.0);
        }
    }
    GridMechanism {
        nodes,
        values,
        winner_source,
    }
}

/// Max over sampled node pairs of `u(z) - u(z') - l_S(z, z')`; feasible
/// mechanisms keep this at roundoff.
pub fn feasibility_residual(
    mech: &GridMechanism,
    instance: &TransportInstance,
    pairs: usize,
    seed: u64,
) -> f64 {
    use rand::prelude::*;
    let n = mech.nodes.len();
    if n < 2 {
        return 0.0;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let idx: Vec<(usize, usize)> = (0..pairs)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    let worst = exec::map_slice(&idx, |&(a, b)| {
        mech.values[a]
            - mech.values[b]
            - instance
                .alloc
                .pair_cost(&mech.nodes[a], &mech.nodes[b])
                .unwrap()
    });
    worst.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

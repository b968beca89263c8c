//! The restricted allocation set `S` and its support function.
//!
//! `S` is given by an explicit vertex list. When `hull` is set the feasible
//! set is the convex hull of the vertices, otherwise it is exactly the finite
//! vertex list (the deterministic case). Either way the support function
//! `l_S(d) = sup_{s in S} s . d` is the maximum over the vertices, and it is
//! the tight upper bound on `u(x) - u(y)` over feasible mechanisms `u`.

use crate::error::{Error, Result};

/// Default tolerance for tie and membership decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A direction in type space, typically a difference `x - y` of two types.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(pub Vec<f64>);

impl Direction {
    pub fn between(x: &[f64], y: &[f64]) -> Self {
        Direction(x.iter().zip(y).map(|(a, b)| a - b).collect())
    }
}

/// Whether a vertex must be the unique maximizer to count as exposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    /// The vertex must beat every other vertex by more than `tol`.
    Unique,
    /// The vertex only needs to attain the maximum within `tol`.
    Tied,
}

/// The set of feasible allocations.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AllocationSet {
    vertices: Vec<Vec<f64>>,
    hull: bool,
}

impl AllocationSet {
    /// Builds a set whose feasible allocations are the convex hull of
    /// `vertices`.
    pub fn hull(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(vertices, true)
    }

    /// Builds a finite (deterministic) set equal to exactly `vertices`.
    pub fn finite(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(vertices, false)
    }

    pub fn new(vertices: Vec<Vec<f64>>, hull: bool) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::input("allocation set needs at least one vertex"));
        }
        let dim = vertices[0].len();
        if dim == 0 {
            return Err(Error::input("allocation vertices must have dimension >= 1"));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::input(format!(
                    "allocation vertices must share one dimension (found {} and {})",
                    dim,
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::input("allocation vertices must be finite"));
            }
        }
        Ok(AllocationSet { vertices, hull })
    }

    pub fn dimension(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn is_hull(&self) -> bool {
        self.hull
    }

    fn check_dim(&self, d: &[f64]) -> Result<()> {
        if d.len() != self.dimension() {
            return Err(Error::input(format!(
                "direction has dimension {}, allocation set has dimension {}",
                d.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    /// Support value `max_v v . d`. For a hull the supremum over the set is
    /// attained at a vertex, so both representations evaluate identically.
    pub fn support_value(&self, d: &[f64]) -> Result<f64> {
        self.check_dim(d)?;
        Ok(self
            .vertices
            .iter()
            .map(|v| dot(v, d))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `l_S(x, y) = support_value(x - y)`.
    pub fn pair_cost(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.support_value(&d)
    }

    /// Indices of all vertices within `tol` of the support value along `d`.
    pub fn argmax_vertices(&self, d: &[f64], tol: f64) -> Result<Vec<usize>> {
        if tol < 0.0 {
            return Err(Error::input("tolerance must be nonnegative"));
        }
        let best = self.support_value(d)?;
        Ok(self
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| dot(v, d) >= best - tol)
            .map(|(i, _)| i)
            .collect())
    }

    /// Sampling-based exposure test: does some sampled direction expose `s`?
    ///
    /// This is a sufficient test, not a decision procedure: it only inspects
    /// the supplied directions (drawn from `X - X` by the caller). `s` must be
    /// one of the set's vertices.
    pub fn is_exposed(
        &self,
        s: &[f64],
        direction_samples: &[Direction],
        tol: f64,
        rule: TieRule,
    ) -> Result<bool> {
        self.check_dim(s)?;
        let idx = self
            .vertices
            .iter()
            .position(|v| v.iter().zip(s).all(|(a, b)| (a - b).abs() <= tol))
            .ok_or_else(|| Error::input("s is not a vertex of the allocation set"))?;
        for d in direction_samples {
            let winners = self.argmax_vertices(&d.0, tol)?;
            match rule {
                TieRule::Tied if winners.contains(&idx) => return Ok(true),
                TieRule::Unique if winners == [idx] => return Ok(true),
                _ => {}
            }
        }
        Ok(false)
    }

    /// Is `alloc` feasible: a vertex (finite case) or a hull member?
    pub fn contains(&self, alloc: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(alloc)?;
        let is_vertex = self
            .vertices
            .iter()
            .any(|v| v.iter().zip(alloc).all(|(a, b)| (a - b).abs() <= tol));
        if is_vertex {
            return Ok(true);
        }
        if !self.hull {
            return Ok(false);
        }
        Ok(self.hull_contains(alloc, tol))
    }

    /// Exact hull membership for small vertex lists, by Caratheodory: the
    /// point must be a convex combination of at most `n + 1` vertices.
    fn hull_contains(&self, p: &[f64], tol: f64) -> bool {
        let n = self.dimension();
        let k = self.vertices.len();
        let max_size = (n + 1).min(k);
        let mut subset = Vec::new();
        subsets(k, max_size, &mut subset, &mut |idxs| {
            let verts: Vec<&[f64]> = idxs.iter().map(|&i| self.vertices[i].as_slice()).collect();
            convex_combination(&verts, p, tol)
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Visits all nonempty subsets of `0..k` up to `max_size`; stops early when
/// the visitor returns true.
fn subsets(k: usize, max_size: usize, current: &mut Vec<usize>, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        start: usize,
        k: usize,
        max_size: usize,
        current: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if !current.is_empty() && visit(current) {
            return true;
        }
        if current.len() == max_size {
            return false;
        }
        for i in start..k {
            current.push(i);
            if rec(i + 1, k, max_size, current, visit) {
                return true;
            }
            current.pop();
        }
        false
    }
    rec(0, k, max_size, current, visit)
}

/// Tests whether `p` is a convex combination of `verts` by solving the
/// normal equations of `[V; 1] lambda = [p; 1]` and checking the residual.
fn convex_combination(verts: &[&[f64]], p: &[f64], tol: f64) -> bool {
    let m = verts.len();
    let n = p.len();
    // Rows of A: n coordinate rows plus the affine row of ones.
    let a = |r: usize, c: usize| -> f64 {
        if r < n {
            verts[c][r]
        } else {
            1.0
        }
    };
    let b = |r: usize| -> f64 {
        if r < n {
            p[r]
        } else {
            1.0
        }
    };
    // Normal equations G lambda = h with G = A^T A, h = A^T b.
    let mut g = vec![0.0; m * m];
    let mut h = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            g[i * m + j] = (0..=n).map(|r| a(r, i) * a(r, j)).sum();
        }
        h[i] = (0..=n).map(|r| a(r, i) * b(r)).sum();
    }
    let Some(lambda) = solve_dense(&mut g, &mut h, m) else {
        return false;
    };
    if lambda.iter().any(|&l| l < -1e-7) {
        return false;
    }
    // Residual check against the original system.
    for r in 0..=n {
        let lhs: f64 = (0..m).map(|c| a(r, c) * lambda[c]).sum();
        if (lhs - b(r)).abs() > tol.max(1e-7) {
            return false;
        }
    }
    true
}

/// In-place Gaussian elimination with partial pivoting; returns None when the
/// matrix is numerically singular.
fn solve_dense(g: &mut [f64], h: &mut [f64], m: usize) -> Option<Vec<f64>> {
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| {
            g[i * m + col]
                .abs()
                .partial_cmp(&g[j * m + col].abs())
                .unwrap()
        })?;
        if g[pivot * m + col].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for c in 0..m {
                g.swap(col * m + c, pivot * m + c);
            }
            h.swap(col, pivot);
        }
        for row in col + 1..m {
            let factor = g[row * m + col] / g[col * m + col];
            for c in col..m {
                g[row * m + c] -= factor * g[col * m + c];
            }
            h[row] -= factor * h[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = h[row];
        for c in row + 1..m {
            acc -= g[row * m + c] * x[c];
        }
        x[row] = acc / g[row * m + row];
    }
    Some(x)
}

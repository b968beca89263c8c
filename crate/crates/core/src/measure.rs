//! Signed measures on `X = [0, M]^n` and the revenue transform.
//!
//! A density `f` on a box `X'` induces a signed measure `mu` such that the
//! expected revenue of a mechanism with surplus function `u` is the integral
//! of `u` against `mu`. Concretely `mu` consists of a unit atom at `z0`, a
//! surface part on the outward facets of `X'` with density `f(z) (z . n)`,
//! and an interior part with density `-(grad f(z) . z + (n + 1) f(z))`.
//!
//! Measures are discretized as atoms plus axis-aligned grid cells evaluated
//! by the midpoint rule, then balanced to exact zero total mass (the
//! continuous transform integrates to zero; midpoint quadrature of the
//! closed-form kinds is off by O(1/r^2), which the balancing removes).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::menu::Menu;

/// A buyer type density with closed-form value and gradient.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum DensitySpec {
    /// Uniform on the box `prod [0, bounds_i]`.
    UniformBox { bounds: Vec<f64> },
    /// Product of exponentials with the given rates, truncated to
    /// `[0, truncation]^n` and renormalized so it integrates to one there.
    ExponentialProduct { rates: Vec<f64>, truncation: f64 },
    /// Values tabulated on a uniform grid over `prod [0, bounds_i]`
    /// (row-major, last axis fastest). Supports integration and sampling
    /// helpers but not the transform, which needs gradients.
    Tabulated {
        bounds: Vec<f64>,
        resolution: usize,
        values: Vec<f64>,
    },
}

impl DensitySpec {
    pub fn dimension(&self) -> usize {
        match self {
            DensitySpec::UniformBox { bounds } => bounds.len(),
            DensitySpec::ExponentialProduct { rates, .. } => rates.len(),
            DensitySpec::Tabulated { bounds, .. } => bounds.len(),
        }
    }

    /// Upper corner of the support box `X'`.
    pub fn domain(&self) -> Vec<f64> {
        match self {
            DensitySpec::UniformBox { bounds } => bounds.clone(),
            DensitySpec::ExponentialProduct { rates, truncation } => {
                vec![*truncation; rates.len()]
            }
            DensitySpec::Tabulated { bounds, .. } => bounds.clone(),
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match self {
            DensitySpec::UniformBox { bounds } => {
                let vol: f64 = bounds.iter().product();
                1.0 / vol
            }
            DensitySpec::ExponentialProduct { rates, truncation } => {
                let mut v = 1.0;
                for (xi, li) in x.iter().zip(rates) {
                    v *= li * (-li * xi).exp() / (1.0 - (-li * truncation).exp());
                }
                v
            }
            DensitySpec::Tabulated {
                bounds,
                resolution,
                values,
            } => {
                let mut idx = 0;
                for (xi, bi) in x.iter().zip(bounds) {
                    let cell = ((xi / bi * *resolution as f64) as usize).min(resolution - 1);
                    idx = idx * resolution + cell;
                }
                values[idx]
            }
        }
    }

    /// Gradient of the density, when available in closed form.
    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            DensitySpec::UniformBox { bounds } => Some(vec![0.0; bounds.len()]),
            DensitySpec::ExponentialProduct { rates, .. } => {
                let f = self.density(x);
                Some(rates.iter().map(|li| -li * f).collect())
            }
            DensitySpec::Tabulated { .. } => None,
        }
    }

    /// Interior integrand of the transform: `-(grad f . x + (n + 1) f(x))`.
    pub fn transformed_density(&self, x: &[f64]) -> Result<f64> {
        let grad = self
            .gradient(x)
            .ok_or_else(|| Error::Unsupported("tabulated density has no gradient data".into()))?;
        let n = self.dimension() as f64;
        let gdotx: f64 = grad.iter().zip(x).map(|(g, xi)| g * xi).sum();
        Ok(-(gdotx + (n + 1.0) * self.density(x)))
    }

    /// Draws one type, writing into `out`. Deterministic given the rng state.
    pub fn sample_into(&self, rng: &mut impl rand::Rng, out: &mut [f64]) -> Result<()> {
        match self {
            DensitySpec::UniformBox { bounds } => {
                for (o, b) in out.iter_mut().zip(bounds) {
                    *o = rng.random::<f64>() * b;
                }
                Ok(())
            }
            DensitySpec::ExponentialProduct { rates, truncation } => {
                for (o, li) in out.iter_mut().zip(rates) {
                    let u: f64 = rng.random();
                    let tail = 1.0 - (-li * truncation).exp();
                    *o = -(1.0 - u * tail).ln() / li;
                }
                Ok(())
            }
            DensitySpec::Tabulated { .. } => Err(Error::Unsupported(
                "sampling from a tabulated density is not supported".into(),
            )),
        }
    }
}

/// A point mass.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// A weighted axis-aligned box; facet cells are degenerate in one axis.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub weight: f64,
}

impl Cell {
    pub fn midpoint(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }
}

/// A discretized signed Radon measure: atoms plus weighted grid cells.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SignedMeasure {
    pub dimension: usize,
    pub atoms: Vec<Atom>,
    pub cells: Vec<Cell>,
}

/// One mass move: `take` units leave `source` and arrive at `destinations`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpreadMove {
    pub source: Vec<f64>,
    pub take: f64,
    pub destinations: Vec<(Vec<f64>, f64)>,
}

/// A batch of mass moves, optionally claiming mean preservation.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpreadSpec {
    pub moves: Vec<SpreadMove>,
    pub mean_preserving: bool,
}

/// Outcome of an empirical dominance check.
#[derive(Debug, Clone)]
pub struct DominanceReport {
    /// `integral(u d mu') - integral(u d mu)` per menu.
    pub differences: Vec<f64>,
    pub min_difference: f64,
    pub pass: bool,
}

/// Tolerance below which a dominance difference counts as a violation.
pub const DOMINANCE_SLACK: f64 = 1e-8;

impl SignedMeasure {
    pub fn empty(dimension: usize) -> Self {
        SignedMeasure {
            dimension,
            atoms: Vec::new(),
            cells: Vec::new(),
        }
    }

    /// Builds the transformed measure of `f` on a `resolution`-per-axis grid.
    ///
    /// `z0` must be coordinate-wise below the support of `f`; every preset
    /// places it at the origin. Interior cells carry
    /// `-(grad f . z + (n + 1) f(z))` times cell volume at the cell midpoint,
    /// outward facets carry `f(z) (z . n)` times facet area, and the negative
    /// weights are rescaled (a relative adjustment of order `1/r^2`) so the
    /// total mass is exactly zero.
    pub fn transform(f: &DensitySpec, z0: &[f64], resolution: usize) -> Result<SignedMeasure> {
        let n = f.dimension();
        if z0.len() != n {
            return Err(Error::input("z0 dimension does not match the density"));
        }
        if resolution == 0 {
            return Err(Error::input("grid resolution must be positive"));
        }
        if z0.iter().any(|&c| c < 0.0 || c > 0.0) {
            // The support boxes all have lower corner 0, so only the origin
            // is coordinate-wise below every point of the support.
            return Err(Error::input(
                "z0 must be coordinate-wise below the support (the origin for box supports)",
            ));
        }
        let domain = f.domain();
        let atom = Atom {
            point: z0.to_vec(),
            weight: 1.0,
        };

        // Interior cells, midpoint rule.
        let steps: Vec<f64> = domain.iter().map(|m| m / resolution as f64).collect();
        let vol: f64 = steps.iter().product();
        let total_cells = resolution.pow(n as u32);
        let mut cells: Vec<Cell> = exec::map_indexed(total_cells, |flat| {
            let mut idx = flat;
            let mut lo = vec![0.0; n];
            let mut hi = vec![0.0; n];
            for ax in (0..n).rev() {
                let k = idx % resolution;
                idx /= resolution;
                lo[ax] = k as f64 * steps[ax];
                hi[ax] = (k + 1) as f64 * steps[ax];
            }
            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let weight = f.transformed_density(&mid).map(|d| d * vol);
            weight.map(|weight| Cell { lo, hi, weight })
        })
        .into_iter()
        .collect::<Result<_>>()?;

        // Outward facets. On `x_ax = domain[ax]` the outer normal is `e_ax`
        // and `z . n = domain[ax]`; on `x_ax = 0` it is `-e_ax` with
        // `z . n = 0`, so those facets carry no mass and are skipped.
        for ax in 0..n {
            let facet_cells = resolution.pow((n - 1) as u32);
            let area: f64 = steps
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != ax)
                .map(|(_, s)| s)
                .product();
            for flat in 0..facet_cells {
                let mut idx = flat;
                let mut lo = vec![0.0; n];
                let mut hi = vec![0.0; n];
                for other in (0..n).rev().filter(|&o| o != ax) {
                    let k = idx % resolution;
                    idx /= resolution;
                    lo[other] = k as f64 * steps[other];
                    hi[other] = (k + 1) as f64 * steps[other];
                }
                lo[ax] = domain[ax];
                hi[ax] = domain[ax];
                let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let weight = f.density(&mid) * domain[ax] * area;
                if weight != 0.0 {
                    cells.push(Cell { lo, hi, weight });
                }
            }
        }

        let mut mu = SignedMeasure {
            dimension: n,
            atoms: vec![atom],
            cells,
        };
        mu.balance();
        Ok(mu)
    }

    /// Rescales negative weights so the total mass is exactly zero.
    fn balance(&mut self) {
        let pos = exec::sum_compensated(self.weights().filter(|w| *w > 0.0));
        let neg = -exec::sum_compensated(self.weights().filter(|w| *w < 0.0));
        if neg <= 0.0 {
            return;
        }
        let factor = pos / neg;
        for c in &mut self.cells {
            if c.weight < 0.0 {
                c.weight *= factor;
            }
        }
        for a in &mut self.atoms {
            if a.weight < 0.0 {
                a.weight *= factor;
            }
        }
    }

    fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms
            .iter()
            .map(|a| a.weight)
            .chain(self.cells.iter().map(|c| c.weight))
    }

    pub fn total_mass(&self) -> f64 {
        exec::sum_compensated(self.weights())
    }

    /// Number of atoms plus cells.
    pub fn support_len(&self) -> usize {
        self.atoms.len() + self.cells.len()
    }

    /// `sum_i w_i h(x_i)` over atoms and cell midpoints, in fixed order.
    pub fn integrate<F: Fn(&[f64]) -> f64 + Sync>(&self, h: F) -> f64 {
        let na = self.atoms.len();
        let n = na + self.cells.len();
        exec::sum_indexed(n, |i| {
            if i < na {
                self.atoms[i].weight * h(&self.atoms[i].point)
            } else {
                let c = &self.cells[i - na];
                c.weight * h(&c.midpoint())
            }
        })
    }

    /// Splits into (positive part, negative part); both have nonnegative
    /// weights and their difference reproduces the measure.
    pub fn jordan_parts(&self) -> (SignedMeasure, SignedMeasure) {
        let mut plus = SignedMeasure::empty(self.dimension);
        let mut minus = SignedMeasure::empty(self.dimension);
        for a in &self.atoms {
            if a.weight > 0.0 {
                plus.atoms.push(a.clone());
            } else if a.weight < 0.0 {
                minus.atoms.push(Atom {
                    point: a.point.clone(),
                    weight: -a.weight,
                });
            }
        }
        for c in &self.cells {
            if c.weight > 0.0 {
                plus.cells.push(c.clone());
            } else if c.weight < 0.0 {
                minus.cells.push(Cell {
                    lo: c.lo.clone(),
                    hi: c.hi.clone(),
                    weight: -c.weight,
                });
            }
        }
        (plus, minus)
    }

    /// Keeps atoms and cells whose point / midpoint satisfies `keep`.
    pub fn restrict_where<F: Fn(&[f64]) -> bool>(&self, keep: F) -> SignedMeasure {
        SignedMeasure {
            dimension: self.dimension,
            atoms: self
                .atoms
                .iter()
                .filter(|a| keep(&a.point))
                .cloned()
                .collect(),
            cells: self
                .cells
                .iter()
                .filter(|c| keep(&c.midpoint()))
                .cloned()
                .collect(),
        }
    }

    /// Restriction to an axis-aligned box (midpoint membership).
    pub fn restrict_box(&self, lo: &[f64], hi: &[f64]) -> SignedMeasure {
        self.restrict_where(|p| {
            p.iter()
                .zip(lo.iter().zip(hi))
                .all(|(x, (l, h))| *x >= *l && *x <= *h)
        })
    }

    /// Applies a batch of mass moves, returning the new measure.
    ///
    /// Sources are located by coordinates (atom points and cell midpoints);
    /// each must carry at least the weight being moved. Destination mass is
    /// added as atoms, merged by position. Total mass is preserved exactly;
    /// a `mean_preserving` spec must also preserve each move's centroid.
    pub fn apply_spread(&self, spec: &SpreadSpec) -> Result<SignedMeasure> {
        spec.validate(self.dimension)?;
        let mut result = self.clone();
        let mut index: HashMap<Vec<u64>, SupportRef> = HashMap::new();
        for (i, a) in result.atoms.iter().enumerate() {
            index.insert(position_key(&a.point), SupportRef::Atom(i));
        }
        for (i, c) in result.cells.iter().enumerate() {
            index.insert(position_key(&c.midpoint()), SupportRef::Cell(i));
        }
        for (k, mv) in spec.moves.iter().enumerate() {
            let slot = index
                .get(&position_key(&mv.source))
                .copied()
                .ok_or_else(|| {
                    Error::input(format!("spread move {k}: no mass at source {:?}", mv.source))
                })?;
            let w = match slot {
                SupportRef::Atom(i) => &mut result.atoms[i].weight,
                SupportRef::Cell(i) => &mut result.cells[i].weight,
            };
            if *w < mv.take - 1e-12 {
                return Err(Error::input(format!(
                    "spread move {k}: source holds {:.6e}, cannot take {:.6e}",
                    *w, mv.take
                )));
            }
            *w -= mv.take;
            for (dest, dw) in &mv.destinations {
                match index.get(&position_key(dest)) {
                    Some(SupportRef::Atom(i)) => result.atoms[*i].weight += dw,
                    Some(SupportRef::Cell(i)) => result.cells[*i].weight += dw,
                    None => {
                        result.atoms.push(Atom {
                            point: dest.clone(),
                            weight: *dw,
                        });
                        index.insert(position_key(dest), SupportRef::Atom(result.atoms.len() - 1));
                    }
                }
            }
        }
        Ok(result)
    }

    /// Necessary-condition sampler for the order induced by feasible menus:
    /// checks `integral(u d mu') >= integral(u d mu)` for each given menu.
    /// A pass does not prove dominance; a failure refutes it.
    pub fn dominance_check(mu_prime: &SignedMeasure, mu: &SignedMeasure, menus: &[Menu]) -> DominanceReport {
        let differences: Vec<f64> = exec::map_slice(menus, |m| {
            mu_prime.integrate(|x| m.utility(x).0) - mu.integrate(|x| m.utility(x).0)
        });
        let min_difference = differences.iter().copied().fold(f64::INFINITY, f64::min);
        DominanceReport {
            pass: min_difference >= -DOMINANCE_SLACK,
            differences,
            min_difference,
        }
    }

    /// Writes `point coords..., lo..., hi..., weight` rows as CSV.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.dimension;
        write!(w, "kind")?;
        for i in 0..dim {
            write!(w, ",x{i}")?;
        }
        for i in 0..dim {
            write!(w, ",lo{i},hi{i}")?;
        }
        writeln!(w, ",weight")?;
        for a in &self.atoms {
            write!(w, "atom")?;
            for c in &a.point {
                write!(w, ",{c:.17e}")?;
            }
            for _ in 0..dim {
                write!(w, ",,")?;
            }
            writeln!(w, ",{:.17e}", a.weight)?;
        }
        for c in &self.cells {
            write!(w, "cell")?;
            for m in c.midpoint() {
                write!(w, ",{m:.17e}")?;
            }
            for (l, h) in c.lo.iter().zip(&c.hi) {
                write!(w, ",{l:.17e},{h:.17e}")?;
            }
            writeln!(w, ",{:.17e}", c.weight)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum SupportRef {
    Atom(usize),
    Cell(usize),
}

fn position_key(p: &[f64]) -> Vec<u64> {
    p.iter()
        .map(|&c| {
            let c = if c == 0.0 { 0.0 } else { c };
            c.to_bits()
        })
        .collect()
}

impl SpreadSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        for (k, mv) in self.moves.iter().enumerate() {
            if mv.source.len() != dim || mv.destinations.iter().any(|(d, _)| d.len() != dim) {
                return Err(Error::input(format!("spread move {k}: dimension mismatch")));
            }
            if mv.take <= 0.0 {
                return Err(Error::input(format!("spread move {k}: take must be positive")));
            }
            let out: f64 = mv.destinations.iter().map(|(_, w)| *w).sum();
            if (out - mv.take).abs() > 1e-12 * mv.take.max(1.0) {
                return Err(Error::input(format!(
                    "spread move {k}: outgoing {out:.6e} != incoming {:.6e}",
                    mv.take
                )));
            }
            if self.mean_preserving {
                for ax in 0..dim {
                    let centroid: f64 = mv
                        .destinations
                        .iter()
                        .map(|(d, w)| d[ax] * w)
                        .sum::<f64>()
                        / mv.take;
                    if (centroid - mv.source[ax]).abs() > 1e-10 {
                        return Err(Error::input(format!(
                            "spread move {k}: centroid shifted on axis {ax} by {:.3e}",
                            centroid - mv.source[ax]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::menu::{Menu, MenuOption};

    fn uniform_unit_square() -> DensitySpec {
        DensitySpec::UniformBox {
            bounds: vec![1.0, 1.0],
        }
    }

    fn expo21() -> DensitySpec {
        DensitySpec::ExponentialProduct {
            rates: vec![2.0, 1.0],
            truncation: 8.0,
        }
    }

    #[test]
    fn uniform_transform_matches_known_components() {
        let mu = SignedMeasure::transform(&uniform_unit_square(), &[0.0, 0.0], 8).unwrap();
        assert_eq!(mu.atoms.len(), 1);
        assert_eq!(mu.atoms[0].weight, 1.0);
        // Interior density -3, positive boundary density +1 on top/right.
        let vol = (1.0 / 8.0f64).powi(2);
        for c in &mu.cells {
            let m = c.midpoint();
            if m[0] < 1.0 && m[1] < 1.0 {
                assert!((c.weight / vol + 3.0).abs() < 1e-12, "interior {:?}", c);
            } else {
                assert!((c.weight / (1.0 / 8.0) - 1.0).abs() < 1e-12, "boundary {:?}", c);
            }
        }
        // Bottom/left facets carry no mass and are dropped: 64 interior + 16.
        assert_eq!(mu.cells.len(), 64 + 16);
        assert!(mu.total_mass().abs() < 1e-12);
    }

    #[test]
    fn constant_functions_integrate_to_zero() {
        let mu = SignedMeasure::transform(&uniform_unit_square(), &[0.0, 0.0], 16).unwrap();
        for c in [1.0, -7.5, 3.25] {
            assert!(mu.integrate(|_| c).abs() < 1e-10);
        }
    }

    #[test]
    fn exponential_interior_density_at_origin() {
        // -(grad f . z + 3 f) at the origin is -3 f(0,0) = -6 up to the
        // truncation renormalization (about 2e-3 at M = 8).
        let f = expo21();
        let d = f.transformed_density(&[0.0, 0.0]).unwrap();
        assert!((d + 6.0).abs() < 6e-3, "got {d}");
        // Gradient against central finite differences at a few points.
        for x in [[0.3, 0.7], [1.0, 0.5], [2.0, 2.0]] {
            let g = f.gradient(&x).unwrap();
            let h = 1e-6;
            for ax in 0..2 {
                let mut hi = x.to_vec();
                let mut lo = x.to_vec();
                hi[ax] += h;
                lo[ax] -= h;
                let fd = (f.density(&hi) - f.density(&lo)) / (2.0 * h);
                assert!((fd - g[ax]).abs() < 1e-5 * (1.0 + g[ax].abs()));
            }
        }
        let mu = SignedMeasure::transform(&f, &[0.0, 0.0], 64).unwrap();
        assert!(mu.total_mass().abs() < 1e-9);
    }

    #[test]
    fn posted_price_kink_integral() {
        let mu = SignedMeasure::transform(&uniform_unit_square(), &[0.0, 0.0], 128).unwrap();
        let i = mu.integrate(|x| (x[0] - 0.5).max(0.0));
        assert!((i - 0.25).abs() < 2e-3, "got {i}");
    }

    #[test]
    fn single_atom_integration() {
        let mut mu = SignedMeasure::empty(2);
        mu.atoms.push(Atom {
            point: vec![0.25, 0.0],
            weight: 1.0,
        });
        assert_eq!(mu.integrate(|x| x[0] + 5.0), 5.25);
    }

    #[test]
    fn jordan_parts_recombine() {
        let mu = SignedMeasure::transform(&uniform_unit_square(), &[0.0, 0.0], 16).unwrap();
        let (plus, minus) = mu.jordan_parts();
        assert!(plus.weights().all(|w| w > 0.0));
        assert!(minus.weights().all(|w| w > 0.0));
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a: f64 = rng.random_range(-2.0..2.0);
            let b: f64 = rng.random_range(-2.0..2.0);
            let c: f64 = rng.random_range(-1.0..1.0);
            let h = move |x: &[f64]| a * x[0] + b * x[1] * x[1] + c;
            let direct = mu.integrate(h);
            let split = plus.integrate(h) - minus.integrate(h);
            assert!((direct - split).abs() < 1e-12);
        }
    }

    #[test]
    fn restrict_zero_cell_mass_vanishes() {
        let mu = SignedMeasure::transform(&uniform_unit_square(), &[0.0, 0.0], 128).unwrap();
        let p = 1.0 / 3.0f64.sqrt();
        let zero_cell = mu.restrict_box(&[0.0, 0.0], &[p, p]);
        assert!(zero_cell.total_mass().abs() < 2e-2);
    }

    #[test]
    fn spread_examples() {
        let mut mu = SignedMeasure::empty(2);
        mu.atoms.push(Atom {
            point: vec![0.5, 0.5],
            weight: 1.0,
        });
        let symmetric = SpreadSpec {
            moves: vec![SpreadMove {
                source: vec![0.5, 0.5],
                take: 1.0,
                destinations: vec![(vec![0.4, 0.6], 0.5), (vec![0.6, 0.4], 0.5)],
            }],
            mean_preserving: true,
        };
        let spread = mu.apply_spread(&symmetric).unwrap();
        assert!((spread.total_mass() - 1.0).abs() < 1e-12);

        // Vertical moves change the first moment; only legal with the flag off.
        let mut two = SignedMeasure::empty(2);
        two.atoms.push(Atom {
            point: vec![0.3, 0.7],
            weight: 1.0,
        });
        two.atoms.push(Atom {
            point: vec![0.7, 0.3],
            weight: 1.0,
        });
        let vertical = SpreadSpec {
            moves: vec![
                SpreadMove {
                    source: vec![0.3, 0.7],
                    take: 1.0,
                    destinations: vec![(vec![0.3, 0.9], 1.0)],
                },
                SpreadMove {
                    source: vec![0.7, 0.3],
                    take: 1.0,
                    destinations: vec![(vec![0.7, 0.1], 1.0)],
                },
            ],
            mean_preserving: false,
        };
        let moved = two.apply_spread(&vertical).unwrap();
        assert!((moved.total_mass() - 2.0).abs() < 1e-12);
        // Each move shifts its own mass vertically (the aggregate first
        // moment cancels by symmetry, the distribution clearly changes).
        let second = |m: &SignedMeasure| m.integrate(|x| x[1] * x[1]);
        assert!((second(&moved) - second(&two)).abs() > 0.1);

        let mut flagged = vertical.clone();
        flagged.mean_preserving = true;
        assert!(matches!(two.apply_spread(&flagged), Err(Error::Input(_))));

        let greedy = SpreadSpec {
            moves: vec![SpreadMove {
                source: vec![0.3, 0.7],
                take: 2.0,
                destinations: vec![(vec![0.3, 0.9], 2.0)],
            }],
            mean_preserving: false,
        };
        assert!(matches!(two.apply_spread(&greedy), Err(Error::Input(_))));
    }

    #[test]
    fn dominance_identity_passes() {
        let mu = SignedMeasure::transform(&uniform_unit_square(), &[0.0, 0.0], 16).unwrap();
        let menu = Menu::new(vec![
            MenuOption::new(vec![0.0, 0.0], 0.0),
            MenuOption::new(vec![1.0, 0.0], 0.4),
        ])
        .unwrap();
        let report = SignedMeasure::dominance_check(&mu, &mu, &[menu]);
        assert!(report.pass);
        assert!(report.min_difference.abs() < 1e-14);
    }
}

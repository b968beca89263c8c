//! Finite menu mechanisms.
//!
//! A menu is a list of (allocation, price) options; the buyer of type `x`
//! picks the option maximizing `s . x - p`, so the consumer surplus
//! `u(x) = max_k s_k . x - p_k` is convex with subgradients among the menu
//! allocations. Revenue is computed two ways (against the transformed
//! measure, and by seeded Monte Carlo against the density) and prices are
//! calibrated so that every option's cell has zero measure, the first-order
//! optimality condition for prices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::allocation::AllocationSet;
use crate::error::{Error, Result};
use crate::exec;
use crate::measure::{DensitySpec, SignedMeasure};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MenuOption {
    pub allocation: Vec<f64>,
    pub price: f64,
}

impl MenuOption {
    pub fn new(allocation: Vec<f64>, price: f64) -> Self {
        MenuOption { allocation, price }
    }

    pub fn zero(dim: usize) -> Self {
        MenuOption {
            allocation: vec![0.0; dim],
            price: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Menu {
    options: Vec<MenuOption>,
}

impl Menu {
    /// Builds a menu. Exact duplicate allocations are rejected. Individual
    /// rationality is checked separately (`is_individually_rational`) so
    /// that calibration can pass through all-positive intermediate prices.
    pub fn new(options: Vec<MenuOption>) -> Result<Self> {
        if options.is_empty() {
            return Err(Error::input("menu needs at least one option"));
        }
        let dim = options[0].allocation.len();
        for o in &options {
            if o.allocation.len() != dim {
                return Err(Error::input("menu options must share one dimension"));
            }
            if !o.price.is_finite() || o.allocation.iter().any(|c| !c.is_finite()) {
                return Err(Error::input("menu prices and allocations must be finite"));
            }
        }
        for i in 0..options.len() {
            for j in i + 1..options.len() {
                if options[i].allocation == options[j].allocation {
                    return Err(Error::input(format!(
                        "options {i} and {j} have identical allocations"
                    )));
                }
            }
        }
        Ok(Menu { options })
    }

    /// A menu guarantees `u >= 0` on the nonnegative orthant exactly when
    /// some option with a nonnegative allocation has a nonpositive price
    /// (the zero option `0 @ 0` being the usual witness).
    pub fn is_individually_rational(&self) -> bool {
        self.options
            .iter()
            .any(|o| o.price <= 1e-12 && o.allocation.iter().all(|&c| c >= 0.0))
    }

    /// Zero option plus the given (allocation, price) pairs.
    pub fn with_zero(dim: usize, rest: Vec<MenuOption>) -> Result<Self> {
        let mut options = vec![MenuOption::zero(dim)];
        options.extend(rest);
        Menu::new(options)
    }

    pub fn options(&self) -> &[MenuOption] {
        &self.options
    }

    pub fn dimension(&self) -> usize {
        self.options[0].allocation.len()
    }

    /// Checks every allocation against the instance's feasible set.
    pub fn validate_against(&self, alloc: &AllocationSet, tol: f64) -> Result<()> {
        for (k, o) in self.options.iter().enumerate() {
            if !alloc.contains(&o.allocation, tol)? {
                return Err(Error::input(format!(
                    "menu option {k} allocates {:?}, infeasible for the allocation set",
                    o.allocation
                )));
            }
        }
        Ok(())
    }

    /// Buyer value and winning option at `x`. Ties break toward the larger
    /// `s . x`, then the lower index.
    pub fn utility(&self, x: &[f64]) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut best_sx = f64::NEG_INFINITY;
        let mut winner = 0;
        for (k, o) in self.options.iter().enumerate() {
            let sx: f64 = o.allocation.iter().zip(x).map(|(s, xi)| s * xi).sum();
            let v = sx - o.price;
            if v > best || (v == best && sx > best_sx) {
                best = v;
                best_sx = sx;
                winner = k;
            }
        }
        (best, winner)
    }

    /// Assigns every atom and cell of `mu` to its winning option by midpoint
    /// and sums signed weights per option.
    pub fn cell_measures(&self, mu: &SignedMeasure) -> CellReport {
        let n_opt = self.options.len();
        let na = mu.atoms.len();
        let n = na + mu.cells.len();
        let assigned: Vec<(usize, bool)> = exec::map_indexed(n, |i| {
            let point;
            if i < na {
                point = mu.atoms[i].point.clone();
            } else {
                point = mu.cells[i - na].midpoint();
            }
            let (value, winner) = self.utility(&point);
            // A point is a boundary tie when the runner-up is within 1e-9.
            let mut tie = false;
            for (k, o) in self.options.iter().enumerate() {
                if k == winner {
                    continue;
                }
                let v: f64 = o.allocation.iter().zip(&point).map(|(s, xi)| s * xi).sum::<f64>() - o.price;
                if (value - v).abs() <= 1e-9 {
                    tie = true;
                    break;
                }
            }
            (winner, tie)
        });
        let mut measures = vec![0.0; n_opt];
        let mut counts = vec![0usize; n_opt];
        let mut ties = vec![0usize; n_opt];
        let mut sums: Vec<Vec<f64>> = vec![Vec::new(); n_opt];
        for (i, (winner, tie)) in assigned.iter().enumerate() {
            let w = if i < na {
                mu.atoms[i].weight
            } else {
                mu.cells[i - na].weight
            };
            sums[*winner].push(w);
            counts[*winner] += 1;
            if *tie {
                ties[*winner] += 1;
            }
        }
        for (k, s) in sums.iter().enumerate() {
            measures[k] = exec::sum_compensated(s.iter().copied());
        }
        let boundary_tie_fraction = counts
            .iter()
            .zip(&ties)
            .map(|(c, t)| if *c == 0 { 0.0 } else { *t as f64 / *c as f64 })
            .collect();
        CellReport {
            measures,
            winners: assigned.into_iter().map(|(w, _)| w).collect(),
            boundary_tie_fraction,
        }
    }

    /// Cell measures with straddling cells split exactly along the option
    /// boundaries (interval clipping in 1-D, polygon clipping in 2-D). The
    /// result is smooth in the prices, which the calibration root finder
    /// needs; plain `cell_measures` keeps the midpoint semantics used for
    /// reporting. Dimensions above 2 fall back to midpoint assignment.
    pub fn cell_measures_clipped(&self, mu: &SignedMeasure) -> Vec<f64> {
        let n_opt = self.options.len();
        let na = mu.atoms.len();
        let n = na + mu.cells.len();
        let rows: Vec<Vec<f64>> = exec::map_indexed(n, |i| {
            let mut row = vec![0.0; n_opt];
            if i < na {
                let a = &mu.atoms[i];
                let (_, winner) = self.utility(&a.point);
                row[winner] = a.weight;
            } else {
                let c = &mu.cells[i - na];
                for (k, frac) in self.cell_fractions(&c.lo, &c.hi).into_iter().enumerate() {
                    row[k] = c.weight * frac;
                }
            }
            row
        });
        (0..n_opt)
            .map(|k| exec::sum_compensated(rows.iter().map(|r| r[k])))
            .collect()
    }

    /// Fraction of the box volume won by each option.
    fn cell_fractions(&self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        let free: Vec<usize> = (0..lo.len()).filter(|&ax| hi[ax] > lo[ax]).collect();
        match free.len() {
            0 => {
                let (_, winner) = self.utility(lo);
                let mut f = vec![0.0; self.options.len()];
                f[winner] = 1.0;
                f
            }
            1 => self.fractions_interval(lo, hi, free[0]),
            2 if lo.len() == 2 => self.fractions_polygon(lo, hi),
            _ => {
                let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let (_, winner) = self.utility(&mid);
                let mut f = vec![0.0; self.options.len()];
                f[winner] = 1.0;
                f
            }
        }
    }

    /// Exact winner fractions along a segment varying in axis `ax`.
    fn fractions_interval(&self, lo: &[f64], hi: &[f64], ax: usize) -> Vec<f64> {
        let len = hi[ax] - lo[ax];
        let mut fractions = vec![0.0; self.options.len()];
        for k in 0..self.options.len() {
            let mut a = lo[ax];
            let mut b = hi[ax];
            for j in 0..self.options.len() {
                if j == k {
                    continue;
                }
                // (s_k - s_j) . x >= p_k - p_j along x = lo + t e_ax.
                let sk = &self.options[k].allocation;
                let sj = &self.options[j].allocation;
                let coeff = sk[ax] - sj[ax];
                let mut rhs = self.options[k].price - self.options[j].price;
                for (i, (ski, sji)) in sk.iter().zip(sj).enumerate() {
                    if i != ax {
                        rhs -= (ski - sji) * lo[i];
                    }
                }
                if coeff.abs() < 1e-15 {
                    if rhs > 0.0 {
                        b = a;
                        break;
                    }
                } else if coeff > 0.0 {
                    a = a.max(rhs / coeff);
                } else {
                    b = b.min(rhs / coeff);
                }
            }
            fractions[k] = ((b - a).max(0.0) / len).min(1.0);
        }
        fractions
    }

    /// Exact winner area fractions for a 2-D rectangle via half-plane
    /// clipping.
    fn fractions_polygon(&self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        let area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        let rect = vec![
            [lo[0], lo[1]],
            [hi[0], lo[1]],
            [hi[0], hi[1]],
            [lo[0], hi[1]],
        ];
        let mut fractions = vec![0.0; self.options.len()];
        for k in 0..self.options.len() {
            let mut poly = rect.clone();
            for j in 0..self.options.len() {
                if j == k || poly.is_empty() {
                    continue;
                }
                let sk = &self.options[k].allocation;
                let sj = &self.options[j].allocation;
                let a = [sk[0] - sj[0], sk[1] - sj[1]];
                let b = self.options[k].price - self.options[j].price;
                if a[0].abs() < 1e-15 && a[1].abs() < 1e-15 {
                    if b > 0.0 {
                        poly.clear();
                    }
                    continue;
                }
                poly = clip_halfplane(&poly, a, b);
            }
            fractions[k] = (polygon_area(&poly) / area).clamp(0.0, 1.0);
        }
        fractions
    }

    /// `integral(u d mu)`: expected revenue via the transformed measure.
    pub fn revenue_via_measure(&self, mu: &SignedMeasure) -> f64 {
        mu.integrate(|x| self.utility(x).0)
    }

    /// Monte Carlo revenue: draws types from `f`, charges the winner's
    /// price. Deterministic given the seed; batches use independent rng
    /// streams and are combined in a fixed order.
    pub fn revenue_direct(
        &self,
        f: &DensitySpec,
        samples: u64,
        seed: u64,
    ) -> Result<(f64, f64)> {
        if samples == 0 {
            return Err(Error::input("need at least one Monte Carlo sample"));
        }
        const BATCH: u64 = 16_384;
        let n_batches = samples.div_ceil(BATCH);
        let dim = self.dimension();
        let partials: Vec<Result<(f64, f64)>> = exec::map_indexed(n_batches as usize, |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64 + 1);
            let count = BATCH.min(samples - b as u64 * BATCH);
            let mut x = vec![0.0; dim];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                f.sample_into(&mut rng, &mut x)?;
                let (_, winner) = self.utility(&x);
                let price = self.options[winner].price;
                sum += price;
                sumsq += price * price;
            }
            Ok((sum, sumsq))
        });
        let mut sums = Vec::with_capacity(partials.len());
        let mut sumsqs = Vec::with_capacity(partials.len());
        for p in partials {
            let (s, sq) = p?;
            sums.push(s);
            sumsqs.push(sq);
        }
        let total = exec::sum_compensated(sums.into_iter());
        let total_sq = exec::sum_compensated(sumsqs.into_iter());
        let n = samples as f64;
        let mean = total / n;
        let var = ((total_sq - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
        Ok((mean, (var / n).sqrt()))
    }
}

/// Per-option cell decomposition of a measure.
#[derive(Debug, Clone)]
pub struct CellReport {
    /// Signed measure of each option's cell.
    pub measures: Vec<f64>,
    /// Winning option per support point of the measure (atoms first).
    pub winners: Vec<usize>,
    /// Fraction of each option's points whose runner-up ties within 1e-9.
    pub boundary_tie_fraction: Vec<f64>,
}

impl CellReport {
    pub fn write_csv<W: std::io::Write>(&self, mu: &SignedMeasure, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,kind,winner,weight")?;
        let na = mu.atoms.len();
        for (i, winner) in self.winners.iter().enumerate() {
            let (kind, weight) = if i < na {
                ("atom", mu.atoms[i].weight)
            } else {
                ("cell", mu.cells[i - na].weight)
            };
            writeln!(w, "{i},{kind},{winner},{weight:.17e}")?;
        }
        Ok(())
    }
}

fn clip_halfplane(poly: &[[f64; 2]], a: [f64; 2], b: f64) -> Vec<[f64; 2]> {
    let inside = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] >= b;
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let pin = inside(&p);
        let qin = inside(&q);
        if pin {
            out.push(p);
        }
        if pin != qin {
            let fp = a[0] * p[0] + a[1] * p[1] - b;
            let fq = a[0] * q[0] + a[1] * q[1] - b;
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        acc += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * acc.abs()
}

/// Options for price calibration.
#[derive(Debug, Clone)]
pub struct CalibrateOptions {
    /// Include a fixed zero option (allocation 0, price 0) in the menu.
    /// Disable when the zero allocation is infeasible (e.g. exactly-one).
    pub include_zero: bool,
    /// Residual tolerance on the cell measures.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        CalibrateOptions {
            include_zero: true,
            tol: 1e-10,
            max_iterations: 80,
        }
    }
}

/// Calibration diagnostics.
#[derive(Debug, Clone)]
pub struct CalibrationInfo {
    pub iterations: usize,
    pub residual_norm: f64,
}

/// Finds prices for `shape` making every shaped option's cell measure zero,
/// by damped Newton with a finite-difference Jacobian on the clipped cell
/// measures. The zero option (when included) keeps price zero; its cell
/// measure vanishes automatically because the measures sum to the total
/// mass. Without a zero option the measures are functions of the price
/// differences alone and sum to zero, so the last cell condition is
/// replaced by the binding participation constraint `min price = 0`.
/// Reports non-convergence rather than returning unconverged prices.
pub fn calibrate_prices(
    shape: &[Vec<f64>],
    mu: &SignedMeasure,
    initial_prices: &[f64],
    opts: &CalibrateOptions,
) -> Result<(Menu, CalibrationInfo)> {
    if shape.is_empty() {
        return Err(Error::input("menu shape must contain at least one allocation"));
    }
    if shape.len() != initial_prices.len() {
        return Err(Error::input("one initial price per shaped allocation required"));
    }
    if !opts.include_zero && shape.len() < 2 {
        return Err(Error::input(
            "a menu without a zero option needs at least two options to calibrate",
        ));
    }
    let dim = mu.dimension;
    let build = |prices: &[f64]| -> Result<Menu> {
        let mut options = Vec::new();
        if opts.include_zero {
            options.push(MenuOption::zero(dim));
        }
        for (s, p) in shape.iter().zip(prices) {
            options.push(MenuOption::new(s.clone(), *p));
        }
        Menu::new(options)
    };
    let offset = usize::from(opts.include_zero);
    let residual = |prices: &[f64]| -> Result<Vec<f64>> {
        let menu = build(prices)?;
        let all = menu.cell_measures_clipped(mu);
        let mut res = all[offset..].to_vec();
        if !opts.include_zero {
            let last = res.len() - 1;
            res[last] = prices.iter().copied().fold(f64::INFINITY, f64::min);
        }
        Ok(res)
    };

    let m = shape.len();
    let mut prices = initial_prices.to_vec();
    let mut f = residual(&prices)?;
    let mut trace = vec![norm_inf(&f)];
    for iter in 0..opts.max_iterations {
        let fnorm = norm_inf(&f);
        if fnorm <= opts.tol {
            return Ok((
                build(&prices)?,
                CalibrationInfo {
                    iterations: iter,
                    residual_norm: fnorm,
                },
            ));
        }
        // Forward-difference Jacobian.
        let mut jac = vec![0.0; m * m];
        let delta = 1e-6;
        for col in 0..m {
            let mut bumped = prices.clone();
            bumped[col] += delta;
            let fb = residual(&bumped)?;
            for row in 0..m {
                jac[row * m + col] = (fb[row] - f[row]) / delta;
            }
        }
        let step = solve_linear(&mut jac.clone(), &f)
            .ok_or_else(|| Error::Convergence {
                iterations: iter,
                last_residual: fnorm,
                trace: trace.clone(),
            })?;
        // Damping by step halving.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let candidate: Vec<f64> = prices
                .iter()
                .zip(&step)
                .map(|(p, s)| p - lambda * s)
                .collect();
            let fc = residual(&candidate)?;
            if norm_inf(&fc) < fnorm {
                prices = candidate;
                f = fc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        trace.push(norm_inf(&f));
        if !accepted {
            return Err(Error::Convergence {
                iterations: iter,
                last_residual: fnorm,
                trace,
            });
        }
    }
    let fnorm = norm_inf(&f);
    if fnorm <= opts.tol {
        return Ok((
            build(&prices)?,
            CalibrationInfo {
                iterations: opts.max_iterations,
                residual_norm: fnorm,
            },
        ));
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        last_residual: fnorm,
        trace,
    })
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn solve_linear(a: &mut [f64], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let mut rhs = b.to_vec();
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| {
            a[i * m + col].abs().partial_cmp(&a[j * m + col].abs()).unwrap()
        })?;
        if a[pivot * m + col].abs() < 1e-14 {
            return None;
        }
        if pivot != col {
            for c in 0..m {
                a.swap(col * m + c, pivot * m + c);
            }
            rhs.swap(col, pivot);
        }
        for row in col + 1..m {
            let factor = a[row * m + col] / a[col * m + col];
            for c in col..m {
                a[row * m + c] -= factor * a[col * m + c];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = rhs[row];
        for c in row + 1..m {
            acc -= a[row * m + c] * x[c];
        }
        x[row] = acc / a[row * m + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::SignedMeasure;

    fn sqrt3_inv() -> f64 {
        1.0 / 3.0f64.sqrt()
    }

    fn at_most_one_menu(price: f64) -> Menu {
        Menu::with_zero(
            2,
            vec![
                MenuOption::new(vec![1.0, 0.0], price),
                MenuOption::new(vec![0.0, 1.0], price),
            ],
        )
        .unwrap()
    }

    fn uniform_mu(res: usize) -> SignedMeasure {
        SignedMeasure::transform(
            &DensitySpec::UniformBox {
                bounds: vec![1.0, 1.0],
            },
            &[0.0, 0.0],
            res,
        )
        .unwrap()
    }

    #[test]
    fn utility_examples() {
        let menu = at_most_one_menu(sqrt3_inv());
        let (v, w) = menu.utility(&[0.9, 0.2]);
        assert!((v - (0.9 - sqrt3_inv())).abs() < 1e-15);
        assert_eq!(w, 1);
        let (v, w) = menu.utility(&[0.0, 0.0]);
        assert_eq!(v, 0.0);
        assert_eq!(w, 0);

        // Exactly-one: first item at 1/3 or the second for free.
        let exact = Menu::new(vec![
            MenuOption::new(vec![1.0, 0.0], 1.0 / 3.0),
            MenuOption::new(vec![0.0, 1.0], 0.0),
        ])
        .unwrap();
        let (v, w) = exact.utility(&[0.5, 0.1]);
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(w, 0);
    }

    #[test]
    fn individual_rationality_detection() {
        let no_free = Menu::new(vec![MenuOption::new(vec![1.0, 0.0], 0.3)]).unwrap();
        assert!(!no_free.is_individually_rational());
        assert!(at_most_one_menu(0.4).is_individually_rational());
        let free_item = Menu::new(vec![
            MenuOption::new(vec![1.0, 0.0], 1.0 / 3.0),
            MenuOption::new(vec![0.0, 1.0], 0.0),
        ])
        .unwrap();
        assert!(free_item.is_individually_rational());
    }

    #[test]
    fn cell_measures_at_calibrated_price_vanish() {
        let mu = uniform_mu(128);
        let report = at_most_one_menu(sqrt3_inv()).cell_measures(&mu);
        for m in &report.measures {
            assert!(m.abs() < 2e-2, "measures {:?}", report.measures);
        }
        let total: f64 = report.measures.iter().sum();
        assert!((total - mu.total_mass()).abs() < 1e-8);
    }

    #[test]
    fn zero_only_menu_collects_total_mass() {
        let mu = uniform_mu(32);
        let menu = Menu::new(vec![MenuOption::zero(2)]).unwrap();
        let report = menu.cell_measures(&mu);
        assert!((report.measures[0] - mu.total_mass()).abs() < 1e-12);
    }

    #[test]
    fn exactly_one_cell_masses() {
        let mu = uniform_mu(128);
        let menu = Menu::new(vec![
            MenuOption::new(vec![1.0, 0.0], 1.0 / 3.0),
            MenuOption::new(vec![0.0, 1.0], 0.0),
        ])
        .unwrap();
        let report = menu.cell_measures(&mu);
        // cell(1,0): interior -2/3 plus boundary +2/3.
        assert!(report.measures[0].abs() < 2e-2);
        let interior = mu.restrict_where(|p| p[0] < 1.0 && p[1] < 1.0);
        let r_int = menu.cell_measures(&interior);
        assert!((r_int.measures[0] + 2.0 / 3.0).abs() < 2e-2);
    }

    #[test]
    fn revenue_both_ways_at_most_one() {
        let mu = uniform_mu(128);
        let menu = at_most_one_menu(sqrt3_inv());
        let expected = 2.0 / (3.0 * 3.0f64.sqrt());
        let via = menu.revenue_via_measure(&mu);
        assert!((via - expected).abs() < 1e-3, "via measure {via}");

        let f = DensitySpec::UniformBox {
            bounds: vec![1.0, 1.0],
        };
        let (mc, se) = menu.revenue_direct(&f, 1_000_000, 42).unwrap();
        assert!((mc - expected).abs() < 3.0 * se, "mc {mc} +- {se}");

        let zero_only = Menu::new(vec![MenuOption::zero(2)]).unwrap();
        let (z, _) = zero_only.revenue_direct(&f, 10_000, 7).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let menu = at_most_one_menu(0.5);
        let f = DensitySpec::UniformBox {
            bounds: vec![1.0, 1.0],
        };
        let a = menu.revenue_direct(&f, 100_000, 9).unwrap();
        let b = menu.revenue_direct(&f, 100_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn calibrate_at_most_one() {
        let mu = uniform_mu(128);
        let shape = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let (menu, info) = calibrate_prices(
            &shape,
            &mu,
            &[0.5, 0.5],
            &CalibrateOptions::default(),
        )
        .unwrap();
        assert!(info.residual_norm <= 1e-10);
        for o in &menu.options()[1..] {
            assert!((o.price - sqrt3_inv()).abs() < 2e-3, "price {}", o.price);
        }
    }

    #[test]
    fn calibrate_exactly_one() {
        let mu = uniform_mu(128);
        let shape = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let opts = CalibrateOptions {
            include_zero: false,
            ..CalibrateOptions::default()
        };
        let (menu, _) = calibrate_prices(&shape, &mu, &[0.4, 0.1], &opts).unwrap();
        assert!((menu.options()[0].price - 1.0 / 3.0).abs() < 2e-3);
        assert!(menu.options()[1].price.abs() < 2e-3);
    }

    #[test]
    fn clipped_measures_sum_to_total() {
        let mu = uniform_mu(64);
        let menu = at_most_one_menu(0.61);
        let clipped = menu.cell_measures_clipped(&mu);
        let total: f64 = clipped.iter().sum();
        assert!((total - mu.total_mass()).abs() < 1e-9);
    }
}

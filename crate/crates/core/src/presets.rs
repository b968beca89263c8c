//! Built-in benchmark instances.
//!
//! Each preset bundles a density, an allocation set, a menu shape, and the
//! working resolutions, so the CLI and the test suites run with no external
//! data. The deterministic exponential preset also carries the grid spread
//! construction that tightens its dual bound below the randomized one.

use crate::allocation::AllocationSet;
use crate::certify::{self, CertificateReport, CertifyOptions};
use crate::error::{Error, Result};
use crate::exec;
use crate::measure::{DensitySpec, SignedMeasure, SpreadMove, SpreadSpec};
use crate::menu::{self, CalibrateOptions, Menu, MenuOption};
use crate::transport::{self, TransportInstance};

/// Benchmark price of the optimal randomized mechanism for the exponential
/// instance (sell both at ~1.2319, or item 1 plus half of item 2 at 1).
pub const RANDOMIZED_EXPO_BUNDLE_PRICE: f64 = 1.2319;

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub density: DensitySpec,
    pub alloc: AllocationSet,
    pub menu_shape: Vec<Vec<f64>>,
    pub initial_prices: Vec<f64>,
    pub include_zero_option: bool,
    /// Resolution pair for calibration + Richardson extrapolation.
    pub calibration_resolutions: (usize, usize),
    pub certify_resolutions: Vec<usize>,
    pub certify_tol_rel: f64,
    /// Published price of the optimal randomized mechanism, for comparison.
    pub randomized_benchmark_price: Option<f64>,
}

pub const PRESET_NAMES: [&str; 5] = [
    "single-item",
    "at-most-one",
    "exactly-one",
    "deterministic-expo",
    "bundle-alpha",
];

/// Looks a preset up by name; `bundle-alpha` takes an optional `:VALUE`
/// suffix (default 2).
pub fn by_name(name: &str) -> Result<Preset> {
    match name {
        "single-item" => Ok(single_item()),
        "at-most-one" => Ok(at_most_one()),
        "exactly-one" => Ok(exactly_one()),
        "deterministic-expo" => Ok(deterministic_expo()),
        "bundle-alpha" => Ok(bundle_alpha(2.0)),
        other => {
            if let Some(rest) = other.strip_prefix("bundle-alpha:") {
                let alpha: f64 = rest
                    .parse()
                    .map_err(|_| Error::input(format!("bad alpha value {rest:?}")))?;
                if !(alpha > 0.0) {
                    return Err(Error::input("alpha must be positive"));
                }
                Ok(bundle_alpha(alpha))
            } else {
                Err(Error::input(format!(
                    "unknown preset {other:?}; available: {}",
                    PRESET_NAMES.join(", ")
                )))
            }
        }
    }
}

/// Single uniform item on [0, 1]: the classic posted-price problem.
pub fn single_item() -> Preset {
    Preset {
        name: "single-item".into(),
        description: "one uniform [0,1] item, allocations in [0,1]".into(),
        density: DensitySpec::UniformBox { bounds: vec![1.0] },
        alloc: AllocationSet::hull(vec![vec![0.0], vec![1.0]]).unwrap(),
        menu_shape: vec![vec![1.0]],
        initial_prices: vec![0.4],
        include_zero_option: true,
        calibration_resolutions: (128, 256),
        certify_resolutions: vec![64, 128, 256],
        certify_tol_rel: 0.01,
        randomized_benchmark_price: None,
    }
}

/// Two i.i.d. uniform items, at most one may be allocated.
pub fn at_most_one() -> Preset {
    Preset {
        name: "at-most-one".into(),
        description: "two uniform items, allocate at most one".into(),
        density: DensitySpec::UniformBox {
            bounds: vec![1.0, 1.0],
        },
        alloc: AllocationSet::hull(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        menu_shape: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        initial_prices: vec![0.5, 0.5],
        include_zero_option: true,
        calibration_resolutions: (64, 128),
        certify_resolutions: vec![32, 64, 128],
        certify_tol_rel: 0.02,
        randomized_benchmark_price: None,
    }
}

/// Two i.i.d. uniform items, exactly one must be allocated (no zero option).
pub fn exactly_one() -> Preset {
    Preset {
        name: "exactly-one".into(),
        description: "two uniform items, allocate exactly one".into(),
        density: DensitySpec::UniformBox {
            bounds: vec![1.0, 1.0],
        },
        alloc: AllocationSet::hull(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        menu_shape: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        initial_prices: vec![0.4, 0.1],
        include_zero_option: false,
        calibration_resolutions: (64, 128),
        certify_resolutions: vec![32, 64, 128],
        certify_tol_rel: 0.02,
        randomized_benchmark_price: None,
    }
}

/// Exponential rates (2, 1), deterministic allocations only.
pub fn deterministic_expo() -> Preset {
    Preset {
        name: "deterministic-expo".into(),
        description: "exponential items (rates 2 and 1), deterministic allocations".into(),
        density: DensitySpec::ExponentialProduct {
            rates: vec![2.0, 1.0],
            truncation: 8.0,
        },
        alloc: AllocationSet::finite(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap(),
        menu_shape: vec![vec![1.0, 0.0], vec![1.0, 1.0]],
        initial_prices: vec![0.9, 1.2],
        include_zero_option: true,
        calibration_resolutions: (64, 128),
        certify_resolutions: vec![64, 128],
        certify_tol_rel: 0.02,
        randomized_benchmark_price: Some(RANDOMIZED_EXPO_BUNDLE_PRICE),
    }
}

/// Two uniform items where the pair is worth `alpha` times the sum.
pub fn bundle_alpha(alpha: f64) -> Preset {
    Preset {
        name: format!("bundle-alpha:{alpha}"),
        description: format!("two uniform items, bundle worth {alpha}x the sum"),
        density: DensitySpec::UniformBox {
            bounds: vec![1.0, 1.0],
        },
        alloc: AllocationSet::hull(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![alpha, alpha],
        ])
        .unwrap(),
        menu_shape: vec![vec![alpha, alpha]],
        initial_prices: vec![alpha * 0.8],
        include_zero_option: true,
        calibration_resolutions: (64, 128),
        certify_resolutions: vec![32, 64, 96],
        certify_tol_rel: 0.02,
        randomized_benchmark_price: None,
    }
}

/// Calibration across the preset's resolution pair with Richardson
/// extrapolation of the prices.
#[derive(Debug, Clone)]
pub struct CalibratedMenu {
    pub prices_coarse: Vec<f64>,
    pub prices_fine: Vec<f64>,
    pub prices: Vec<f64>,
    pub menu: Menu,
}

impl Preset {
    pub fn transform(&self, resolution: usize) -> Result<SignedMeasure> {
        let z0 = vec![0.0; self.density.dimension()];
        SignedMeasure::transform(&self.density, &z0, resolution)
    }

    pub fn menu_with_prices(&self, prices: &[f64]) -> Result<Menu> {
        let mut options = Vec::new();
        if self.include_zero_option {
            options.push(MenuOption::zero(self.density.dimension()));
        }
        for (s, p) in self.menu_shape.iter().zip(prices) {
            options.push(MenuOption::new(s.clone(), *p));
        }
        Menu::new(options)
    }

    /// Calibrates at the coarse resolution for a warm start, then at the
    /// fine resolution, which is the reported answer. The clipped cell
    /// measures already resolve the option boundaries exactly, so the fine
    /// prices converge quadratically and refining beyond the pair is a
    /// consistency check rather than an extrapolation step.
    pub fn calibrate(&self) -> Result<CalibratedMenu> {
        let (r1, r2) = self.calibration_resolutions;
        let opts = CalibrateOptions {
            include_zero: self.include_zero_option,
            ..CalibrateOptions::default()
        };
        let mu1 = self.transform(r1)?;
        let (menu1, _) = menu::calibrate_prices(&self.menu_shape, &mu1, &self.initial_prices, &opts)?;
        let prices_coarse: Vec<f64> = shaped_prices(&menu1, self.include_zero_option);
        let mu2 = self.transform(r2)?;
        let (menu2, _) = menu::calibrate_prices(&self.menu_shape, &mu2, &prices_coarse, &opts)?;
        let prices_fine: Vec<f64> = shaped_prices(&menu2, self.include_zero_option);
        Ok(CalibratedMenu {
            prices_coarse,
            prices: prices_fine.clone(),
            menu: self.menu_with_prices(&prices_fine)?,
            prices_fine,
        })
    }

    /// Runs the certificate ladder. Presets whose optimal matching needs a
    /// mass rearrangement (exactly-one, deterministic-expo) plug in their
    /// dual-measure construction; the others use the measure as is.
    pub fn certify(&self, menu: &Menu) -> Result<CertificateReport> {
        let opts = CertifyOptions {
            resolutions: self.certify_resolutions.clone(),
            tol_rel: self.certify_tol_rel,
            dual_measure: self.dual_measure_hook(),
        };
        certify::certify_menu(menu, &self.density, &self.alloc, &opts)
    }

    pub fn dual_measure_hook(&self) -> Option<certify::DualMeasureHook<'static>> {
        if self.name == "deterministic-expo" {
            Some(&|mu, menu| {
                Ok(match deterministic_strip_spread(mu, menu)? {
                    Some(spec) => Some(mu.apply_spread(&spec)?),
                    None => None,
                })
            })
        } else if self.name == "exactly-one" {
            Some(&|mu, menu| exactly_one_band_merge(mu, menu).map(Some))
        } else {
            None
        }
    }
}

fn shaped_prices(menu: &Menu, include_zero: bool) -> Vec<f64> {
    let offset = usize::from(include_zero);
    menu.options()[offset..].iter().map(|o| o.price).collect()
}

/// Dual values for the deterministic instance under the hull order (plain
/// measure) and under the deterministic order (spread measure).
#[derive(Debug, Clone)]
pub struct DualComparison {
    pub randomized_dual: f64,
    pub deterministic_dual: f64,
    pub moved_mass: f64,
}

/// Solves the grid dual twice for the deterministic-expo instance: once on
/// the raw measure (valid for randomized mechanisms) and once on the spread
/// measure (valid only for deterministic menus). The deterministic bound is
/// strictly cheaper once the spread has moves to make.
pub fn deterministic_dual_comparison(
    preset: &Preset,
    menu: &Menu,
    resolution: usize,
) -> Result<DualComparison> {
    let mu = preset.transform(resolution)?;
    let hint = |x: &[f64]| menu.utility(x).0;
    let inst_rand = TransportInstance::from_measure(&mu, &preset.alloc)?;
    let plan_rand = transport::solve_with_hint(&inst_rand, Some(&hint))?;
    let spread = deterministic_strip_spread(&mu, menu)?;
    let (mu_det, moved) = match &spread {
        Some(spec) => {
            let moved: f64 = spec
                .moves
                .iter()
                .filter(|m| m.source.iter().all(|&c| c == 0.0))
                .map(|m| m.take)
                .sum();
            (mu.apply_spread(spec)?, moved)
        }
        None => (mu.clone(), 0.0),
    };
    let inst_det = TransportInstance::from_measure(&mu_det, &preset.alloc)?;
    let plan_det = transport::solve_with_hint(&inst_det, Some(&hint))?;
    Ok(DualComparison {
        randomized_dual: plan_rand.cost,
        deterministic_dual: plan_det.cost,
        moved_mass: moved,
    })
}

/// Grid spread for the deterministic exponential instance.
///
/// In the item-1 strip the rows above the sign-change carry net positive
/// mass that a tight matching cannot reach (within the strip a positive
/// point only matches negatives weakly above-left of it), so that mass is
/// walked down row by row: pulled to a near column by a mean-preserving
/// horizontal split, then dropped one row with an equal mass pushed up on a
/// 45-degree-up-left line from origin mass. Each composite move is a valid
/// rearrangement for every deterministic menu (it never decreases the
/// integral of any corner-slope surplus function) but lowers the value
/// against randomized mechanisms, which is exactly what separates the two
/// dual bounds. Moves are emitted only where the geometry leaves room; on
/// coarse grids the spread is empty.
pub fn deterministic_strip_spread(
    mu: &SignedMeasure,
    menu: &Menu,
) -> Result<Option<SpreadSpec>> {
    let options = menu.options();
    // Expect zero + (1,0) @ p1 + (1,1) @ p2.
    let item1 = options
        .iter()
        .position(|o| o.allocation == [1.0, 0.0])
        .ok_or_else(|| Error::input("deterministic spread needs a (1,0) option"))?;
    let p2 = options
        .iter()
        .find(|o| o.allocation == [1.0, 1.0])
        .map(|o| o.price)
        .ok_or_else(|| Error::input("deterministic spread needs a (1,1) option"))?;

    // Group interior cells of the item-1 strip by grid row.
    let mut rows: std::collections::BTreeMap<u64, Vec<usize>> = std::collections::BTreeMap::new();
    for (i, c) in mu.cells.iter().enumerate() {
        if c.hi[0] <= c.lo[0] || c.hi[1] <= c.lo[1] {
            continue; // facet cell
        }
        let mid = c.midpoint();
        if menu.utility(&mid).1 == item1 {
            rows.entry(mid[1].to_bits()).or_default().push(i);
        }
    }
    if rows.len() < 2 {
        return Ok(None);
    }
    let origin = mu
        .atoms
        .iter()
        .find(|a| a.point.iter().all(|&c| c == 0.0))
        .ok_or_else(|| Error::input("deterministic spread needs the origin atom"))?;

    let mut row_list: Vec<(f64, Vec<usize>)> = rows
        .into_iter()
        .map(|(bits, cells)| (f64::from_bits(bits), cells))
        .collect();
    row_list.sort_by(|a, b| b.0.total_cmp(&a.0)); // descending height

    let step = {
        let c = &mu.cells[row_list[0].1[0]];
        c.hi[1] - c.lo[1]
    };
    let safety = 4e-3;
    let tiny = 1e-15;

    let mut moves: Vec<SpreadMove> = Vec::new();
    let mut carry = 0.0; // mass already relayed onto the current row
    let mut origin_budget = origin.weight * 0.5;

    for w in row_list.windows(2) {
        let (y, ref cells) = w[0];
        let (_y_next, ref cells_next) = w[1];
        let own_net: f64 =
            exec::sum_compensated(cells.iter().map(|&i| mu.cells[i].weight));
        let surplus = own_net + carry;
        carry = 0.0;
        if surplus <= tiny {
            continue;
        }
        // Landing cells on the next row: negative cells in the sigma window
        // x + y + step <= p2 - safety (room for the paired up-move to stay
        // in the zero cell).
        let mut targets: Vec<(usize, f64)> = cells_next
            .iter()
            .filter_map(|&i| {
                let c = &mu.cells[i];
                let x = c.midpoint()[0];
                if c.weight < 0.0 && x + y + step <= p2 - safety {
                    Some((i, -c.weight))
                } else {
                    None
                }
            })
            .collect();
        if targets.is_empty() {
            continue;
        }
        targets.sort_by(|a, b| {
            mu.cells[a.0].midpoint()[0].total_cmp(&mu.cells[b.0].midpoint()[0])
        });
        let capacity: f64 = targets.iter().map(|t| t.1).sum();
        let amount = surplus.min(capacity).min(origin_budget);
        if amount <= tiny {
            continue;
        }

        // Source cells: the row's positive cells, leftmost first, keeping
        // the rightmost column as the push-out destination.
        let mut sources: Vec<(usize, f64)> = cells
            .iter()
            .filter_map(|&i| {
                let c = &mu.cells[i];
                (c.weight > 0.0).then(|| (i, c.weight))
            })
            .collect();
        sources.sort_by(|a, b| {
            mu.cells[a.0].midpoint()[0].total_cmp(&mu.cells[b.0].midpoint()[0])
        });
        let Some(&(push_idx, _)) = sources.last() else {
            continue;
        };
        let x_push = mu.cells[push_idx].midpoint()[0];
        sources.pop(); // keep the push-out column untouched as a source
        let mut remaining = amount;
        let mut delivered = 0.0;
        let mut src_at = 0usize;

        'targets: for &(tgt, cap) in &targets {
            let mut want = cap.min(remaining);
            if want <= tiny {
                continue;
            }
            let tmid = mu.cells[tgt].midpoint();
            let x_w = tmid[0];
            while want > tiny {
                let Some(&mut (src, ref mut avail)) = sources.get_mut(src_at) else {
                    break 'targets;
                };
                // Taking d_total from the source delivers rho * d_total to
                // the target column, pushing the rest out to x_push so the
                // horizontal first moment is preserved.
                let smid = mu.cells[src].midpoint();
                let x_s = smid[0];
                let rho = (x_push - x_s) / (x_push - x_w);
                let deliverable = (*avail * rho).min(want);
                if deliverable <= tiny {
                    src_at += 1;
                    continue;
                }
                let d_total = deliverable / rho;
                moves.push(SpreadMove {
                    source: smid.clone(),
                    take: d_total,
                    destinations: vec![
                        (tmid.clone(), deliverable),
                        (vec![x_push, y], d_total - deliverable),
                    ],
                });
                // Paired up-move: origin mass rides the 45-degree line
                // above the drop column and ends inside the zero cell.
                let a1 = 0.55_f64.min(x_w - step);
                let a2_prime = y + (x_w - a1) + step;
                moves.push(SpreadMove {
                    source: origin.point.clone(),
                    take: deliverable,
                    destinations: vec![(vec![a1, a2_prime], deliverable)],
                });
                *avail -= d_total;
                want -= deliverable;
                remaining -= deliverable;
                delivered += deliverable;
                if *avail <= tiny {
                    src_at += 1;
                }
                if remaining <= tiny {
                    break 'targets;
                }
            }
        }
        origin_budget -= delivered;
        carry = delivered;
    }
    if moves.is_empty() {
        return Ok(None);
    }
    Ok(Some(SpreadSpec {
        moves,
        mean_preserving: false,
    }))
}

/// Dominating measure for the exactly-one instance.
///
/// The plain marginal dual is not tight here: with no zero allocation the
/// support function goes negative and the pairwise constraints admit grid
/// functions that are not convex (their antisymmetric part dips), inflating
/// the dual to roughly twice the true optimum. The worked construction fixes
/// it by a mean-preserving rearrangement: interior negative mass in the band
/// around the diagonal is merged pairwise onto the diagonal (the adjoint of
/// spreading positive mass, so it weakly raises the integral of every
/// convex surplus function and is valid for every allocation set), where
/// the origin atom matches it. Merges stay inside the half-band where the
/// candidate menu is linear across the diagonal, so its own value is
/// untouched.
pub fn exactly_one_band_merge(mu: &SignedMeasure, menu: &Menu) -> Result<SignedMeasure> {
    let options = menu.options();
    if options.len() != 2 || mu.dimension != 2 {
        return Err(Error::input("band merge expects the two-option exactly-one menu"));
    }
    let price_gap = (options[0].price - options[1].price).abs();
    if price_gap <= 0.0 {
        return Ok(mu.clone());
    }
    let mut out = mu.clone();
    // Index interior cells by grid position for mirror lookup.
    let mut by_pos: std::collections::HashMap<(u64, u64), usize> = std::collections::HashMap::new();
    for (i, c) in mu.cells.iter().enumerate() {
        if c.hi[0] > c.lo[0] && c.hi[1] > c.lo[1] {
            let m = c.midpoint();
            by_pos.insert((m[0].to_bits(), m[1].to_bits()), i);
        }
    }
    // Merged pairs must sit strictly inside the band where the menu is
    // linear across the diagonal; the mass moves as point masses at cell
    // midpoints, so the midpoint offset is what matters.
    let half_band = 0.5 * price_gap * (1.0 - 1e-9);
    let origin_weight: f64 = mu
        .atoms
        .iter()
        .filter(|a| a.point.iter().all(|&c| c == 0.0))
        .map(|a| a.weight)
        .sum();
    // The origin atom is the only mass that can absorb the merged diagonal
    // negatives at matching cost, so merge from the origin outward and stop
    // at its capacity (the construction leaves exactly that residual).
    let mut budget = origin_weight - 1e-12;
    let mut pairs: Vec<(usize, usize, f64, f64)> = Vec::new();
    for (i, c) in mu.cells.iter().enumerate() {
        if c.hi[0] <= c.lo[0] || c.hi[1] <= c.lo[1] {
            continue;
        }
        let m = c.midpoint();
        if m[0] <= m[1] {
            continue; // handle each pair once, from below the diagonal
        }
        let e = 0.5 * (m[0] - m[1]);
        if e > half_band {
            continue;
        }
        let Some(&mirror) = by_pos.get(&(m[1].to_bits(), m[0].to_bits())) else {
            continue;
        };
        pairs.push((i, mirror, m[0] + m[1], e));
    }
    // Merge outward from the origin along the diagonal, innermost bands of
    // each shell first, mirroring the worked construction.
    pairs.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.3.total_cmp(&b.3)));
    // How much of each diagonal-offset shell must merge: the boundary
    // segment that serves the band along 45-degree lines can absorb at most
    // d0 of the mass within offset d0 of the diagonal, so the merge covers
    // the rest, a fraction (2 - 3d) / (3 (1 - d)) of the shell at offset d.
    let mut diagonal: Vec<(f64, f64)> = Vec::new();
    for &(i, mirror, sigma, e) in &pairs {
        if budget <= 0.0 {
            break;
        }
        let d = 2.0 * e; // offset x1 - x2 of the pair
        let fraction = ((2.0 - 3.0 * d) / (3.0 * (1.0 - d))).clamp(0.0, 1.0);
        let w_lo = out.cells[i].weight;
        let w_hi = out.cells[mirror].weight;
        let merge = ((-w_lo).min(-w_hi) * fraction).min(0.5 * budget);
        if merge <= 0.0 {
            continue;
        }
        out.cells[i].weight += merge;
        out.cells[mirror].weight += merge;
        budget -= 2.0 * merge;
        diagonal.push((0.5 * sigma, -2.0 * merge));
    }
    for (t, w) in diagonal {
        out.atoms.push(crate::measure::Atom {
            point: vec![t, t],
            weight: w,
        });
    }
    Ok(out)
}

/// Closed-form tabulations of the strip excesses for the deterministic
/// exponential instance (rates 2 and 1): `pos1` is the net mass of the
/// horizontal line a distance `z` below the strip top, `neg1` the unmatched
/// negative mass on the vertical line `x1 = p1 + z`.
pub fn strip_excess_tabulation(
    p1: f64,
    p2: f64,
    samples: usize,
) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let q = p2 - p1;
    let z_pos_max = (p1 + p2 - 2.0).max(0.0);
    let z_neg_max = (1.0 - p1).max(0.0);
    let mut pos = Vec::with_capacity(samples);
    let mut neg = Vec::with_capacity(samples);
    let wp = z_pos_max / samples as f64;
    let wn = z_neg_max / samples as f64;
    for k in 0..samples {
        let zp = (k as f64 + 0.5) * wp;
        let y = q - zp;
        let density = (-y).exp() * (-2.0 * p1).exp() * (2.0 * p1 + y - 2.0);
        pos.push((zp, density.max(0.0) * wp));
        let zn = (k as f64 + 0.5) * wn;
        let density_n = 4.0 * (-2.0 * (p1 + zn)).exp() * (1.0 - p1 - zn);
        neg.push((zn, density_n.max(0.0) * wn));
    }
    (pos, neg)
}

/// Mass availability on the 45-degree lines of the zero cell: the least
/// line mass (attained on the zero/both boundary) over the largest single
/// `neg1` requirement. The construction needs at least factor 1; the
/// observed value is reported.
pub fn diagonal_availability_factor(p1: f64, p2: f64, samples: usize) -> f64 {
    let line_mass = |c: f64| -> f64 {
        // Arc-length density of the transformed measure along x1 + x2 = c
        // inside the zero cell (x1 <= p1).
        let x_max = p1.min(c);
        let n = 2048;
        let h = x_max / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let x1 = (k as f64 + 0.5) * h;
            let x2 = c - x1;
            if x2 < 0.0 {
                continue;
            }
            let f = 2.0 * (-2.0 * x1 - x2).exp();
            acc += f * (3.0 - 2.0 * x1 - x2) * h;
        }
        acc * std::f64::consts::SQRT_2
    };
    let mut min_line = f64::INFINITY;
    for k in 0..samples {
        let c = p1 + (p2 - p1) * (k as f64 + 0.5) / samples as f64;
        min_line = min_line.min(line_mass(c));
    }
    let (_, neg) = strip_excess_tabulation(p1, p2, 512);
    let max_neg = neg
        .iter()
        .map(|&(_, w)| w / ((1.0 - p1) / 512.0))
        .fold(0.0f64, f64::max);
    min_line / max_neg
}

/// One point of the bundle threshold sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub alpha: f64,
    pub price: f64,
    pub revenue: f64,
    pub dual_value: f64,
    pub gap_rel: f64,
    pub certified: bool,
}

/// Sweeps the bundle factor, calibrating the grand-bundle price and
/// measuring the duality gap at the given resolution. Points run in
/// parallel when the feature is enabled.
pub fn bundle_sweep(
    alphas: &[f64],
    resolution: usize,
    gap_tol_rel: f64,
) -> Result<Vec<SweepPoint>> {
    let results: Vec<Result<SweepPoint>> = exec::map_slice(alphas, |&alpha| {
        let preset = bundle_alpha(alpha);
        let mu = preset.transform(resolution)?;
        let opts = CalibrateOptions::default();
        let (menu, _) =
            menu::calibrate_prices(&preset.menu_shape, &mu, &preset.initial_prices, &opts)?;
        let price = menu.options()[1].price;
        let inst = TransportInstance::from_measure(&mu, &preset.alloc)?;
        let hint = |x: &[f64]| menu.utility(x).0;
        let plan = transport::solve_with_hint(&inst, Some(&hint))?;
        let revenue = menu.revenue_via_measure(&mu);
        let gap_rel = (plan.cost - revenue) / revenue.abs().max(1e-12);
        Ok(SweepPoint {
            alpha,
            price,
            revenue,
            dual_value: plan.cost,
            gap_rel,
            certified: gap_rel <= gap_tol_rel,
        })
    });
    results.into_iter().collect()
}

//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `--nocapture`; the test name and status line carry the
//! verdict either way).

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use auction_core::certify::Verdict;
use auction_core::measure::SignedMeasure;
use auction_core::menu::{Menu, MenuOption};
use auction_core::presets::{self, Preset};
use auction_core::transport::{self, TransportInstance};

fn pass(criterion: &str, detail: &str) {
    println!("ACCEPTANCE {criterion}: PASS - {detail}");
}

fn fail(criterion: &str, detail: &str) -> ! {
    println!("ACCEPTANCE {criterion}: FAIL - {detail}");
    panic!("ACCEPTANCE {criterion}: FAIL - {detail}");
}

fn check(criterion: &str, ok: bool, detail: String) {
    if !ok {
        fail(criterion, &detail);
    }
}

/// Richardson pair as stated by the criteria: first-order extrapolation of
/// the two calibration resolutions.
fn extrapolated(cal: &presets::CalibratedMenu) -> Vec<f64> {
    cal.prices_fine
        .iter()
        .zip(&cal.prices_coarse)
        .map(|(f, c)| 2.0 * f - c)
        .collect()
}

#[test]
fn acceptance_1_myerson_sanity() {
    let t0 = Instant::now();
    let preset = presets::single_item();
    let cal = preset.calibrate().unwrap();
    check(
        "1",
        (cal.prices[0] - 0.5).abs() <= 1e-6,
        format!("calibrated price {} vs 0.5", cal.prices[0]),
    );
    let mu = preset.transform(256).unwrap();
    let inst = TransportInstance::from_measure(&mu, &preset.alloc).unwrap();
    let plan = transport::solve(&inst).unwrap();
    check(
        "1",
        (plan.cost - 0.25).abs() <= 0.01 * 0.25,
        format!("transport dual {} vs 0.25", plan.cost),
    );
    let elapsed = t0.elapsed();
    check("1", elapsed.as_secs_f64() < 5.0, format!("runtime {elapsed:?}"));
    pass(
        "1",
        &format!(
            "price {:.9}, dual(256) {:.6}, runtime {elapsed:?}",
            cal.prices[0], plan.cost
        ),
    );
}

#[test]
fn acceptance_2_at_most_one() {
    let t0 = Instant::now();
    let preset = presets::at_most_one();
    let target = 1.0 / 3.0f64.sqrt();
    let cal = preset.calibrate().unwrap();
    let ext = extrapolated(&cal);
    for p in &ext {
        check("2", (p - target).abs() <= 1e-4, format!("price {p} vs {target}"));
    }
    let cert = preset.certify(&cal.menu).unwrap();
    let revenue = 2.0 / (3.0 * 3.0f64.sqrt());
    check(
        "2",
        (cert.primal_value - revenue).abs() < 1e-3,
        format!("revenue {} vs {revenue}", cert.primal_value),
    );
    check(
        "2",
        cert.gap <= 0.02 * revenue,
        format!("gap {} vs 2% of {revenue}", cert.gap),
    );
    let gaps: Vec<f64> = cert.per_resolution.iter().map(|e| e.gap).collect();
    check(
        "2",
        gaps.windows(2).all(|w| w[1] <= w[0] + 1e-9),
        format!("gap trend {gaps:?}"),
    );
    let elapsed = t0.elapsed();
    check("2", elapsed.as_secs_f64() < 60.0, format!("runtime {elapsed:?}"));
    pass(
        "2",
        &format!(
            "price {:.9}, gaps {:?} ({:.3}% at 128), runtime {elapsed:?}",
            ext[0],
            gaps,
            100.0 * cert.gap / revenue
        ),
    );
}

#[test]
fn acceptance_3_exactly_one() {
    let preset = presets::exactly_one();
    let cal = preset.calibrate().unwrap();
    check(
        "3",
        (cal.prices[0] - 1.0 / 3.0).abs() <= 1e-4 && cal.prices[1].abs() <= 1e-4,
        format!("prices {:?} vs (1/3, 0)", cal.prices),
    );
    // Interior and boundary masses of the first item's cell at 128.
    let mu = preset.transform(128).unwrap();
    let interior = mu.restrict_where(|p| p[0] < 1.0 && p[1] < 1.0);
    let boundary = mu.restrict_where(|p| p[0] >= 1.0 || p[1] >= 1.0);
    let cell_of = |m: &SignedMeasure| cal.menu.cell_measures(m).measures[0];
    let (mi, mb) = (cell_of(&interior), cell_of(&boundary));
    check(
        "3",
        (mi + 2.0 / 3.0).abs() <= 2e-2,
        format!("cell(1,0) interior mass {mi} vs -2/3"),
    );
    check(
        "3",
        (mb - 2.0 / 3.0).abs() <= 2e-2,
        format!("cell(1,0) boundary mass {mb} vs +2/3"),
    );
    let cert = preset.certify(&cal.menu).unwrap();
    let revenue = 2.0 / 27.0;
    check(
        "3",
        cert.gap <= 0.02 * revenue,
        format!("gap {} vs 2% of {revenue}", cert.gap),
    );
    pass(
        "3",
        &format!(
            "prices {:?}, cell masses ({mi:.4}, {mb:.4}), gap {:.3}%",
            cal.prices,
            100.0 * cert.gap / revenue
        ),
    );
}

#[test]
fn acceptance_4_deterministic_exponential() {
    let preset = presets::deterministic_expo();
    let cal = preset.calibrate().unwrap();
    check(
        "4",
        (cal.prices[0] - 0.9288).abs() <= 1e-3 && (cal.prices[1] - 1.2286).abs() <= 1e-3,
        format!("prices {:?} vs (0.9288, 1.2286)", cal.prices),
    );

    // Independent oracle: the two integrate-to-zero conditions in closed
    // form for the untruncated exponential, solved to high precision.
    let (o1, o2) = expo_oracle_prices();
    check(
        "4",
        (cal.prices[0] - o1).abs() <= 1e-3 && (cal.prices[1] - o2).abs() <= 1e-3,
        format!("prices {:?} vs oracle ({o1:.6}, {o2:.6})", cal.prices),
    );

    let cmp = presets::deterministic_dual_comparison(&preset, &cal.menu, 128).unwrap();
    check(
        "4",
        cmp.randomized_dual > cmp.deterministic_dual + 1e-7,
        format!(
            "randomized dual {} must strictly exceed deterministic dual {}",
            cmp.randomized_dual, cmp.deterministic_dual
        ),
    );

    let (pos1, neg1) = presets::strip_excess_tabulation(cal.prices[0], cal.prices[1], 512);
    let tp: f64 = pos1.iter().map(|x| x.1).sum();
    let tn: f64 = neg1.iter().map(|x| x.1).sum();
    check(
        "4",
        ((tp / tn) - 1.0).abs() < 0.02,
        format!("strip excess totals {tp} vs {tn}"),
    );
    let neg_scaled: Vec<(f64, f64)> = neg1.iter().map(|&(p, w)| (p, w * tp / tn)).collect();
    let dominates = auction_core::certify::stochastic_dominance_1d(&pos1, &neg_scaled).unwrap();
    check("4", dominates, "pos1 must stochastically dominate neg1".into());

    let factor = presets::diagonal_availability_factor(cal.prices[0], cal.prices[1], 64);
    check("4", factor >= 1.0, format!("45-degree availability factor {factor}"));

    pass(
        "4",
        &format!(
            "prices {:?}, duals rand {:.9} > det {:.9} (margin {:.2e}), dominance ok, factor {:.1}",
            cal.prices,
            cmp.randomized_dual,
            cmp.deterministic_dual,
            cmp.randomized_dual - cmp.deterministic_dual,
            factor
        ),
    );
}

/// Solves the closed-form first-order conditions of the exponential
/// instance: zero cell measure of the (1,0) cell and the (1,1) cell, for
/// rates (2, 1) on the untruncated support.
fn expo_oracle_prices() -> (f64, f64) {
    // Given q = p2 - p1:
    //   p1(q) = 1 - (1 - (1 + q) e^-q) / (2 (1 - e^-q))
    //   p2(p1) = (2 e^p1 + p1 - 1) / (2 e^p1 - 1)
    // Iterate to a fixed point of q.
    let mut q: f64 = 0.3;
    let mut p1: f64 = 0.93;
    let mut p2: f64 = 1.23;
    for _ in 0..200 {
        let eq = (-q).exp();
        p1 = 1.0 - (1.0 - (1.0 + q) * eq) / (2.0 * (1.0 - eq));
        let ep = p1.exp();
        p2 = (2.0 * ep + p1 - 1.0) / (2.0 * ep - 1.0);
        q = p2 - p1;
    }
    (p1, p2)
}

#[test]
fn acceptance_5_bundle_alpha_two() {
    let preset = presets::bundle_alpha(2.0);
    let cal = preset.calibrate().unwrap();
    let target = (8.0f64 / 3.0).sqrt();
    check(
        "5",
        (cal.prices[0] - target).abs() <= 1e-4,
        format!("bundle price {} vs sqrt(8/3) = {target}", cal.prices[0]),
    );
    let mu = preset.transform(128).unwrap();
    let report = cal.menu.cell_measures(&mu);
    check(
        "5",
        report.measures[0].abs() <= 2e-2,
        format!("zero cell measure {}", report.measures[0]),
    );
    let cert = preset.certify(&cal.menu).unwrap();
    check(
        "5",
        cert.verdict == Verdict::CertifiedAtGrid,
        format!("verdict {:?}", cert.verdict),
    );
    check(
        "5",
        cert.gap <= 0.02 * cert.primal_value,
        format!("gap {} vs 2% of {}", cert.gap, cert.primal_value),
    );
    pass(
        "5",
        &format!(
            "price {:.9}, zero-cell {:.2e}, gap {:.4}%",
            cal.prices[0],
            report.measures[0],
            100.0 * cert.gap / cert.primal_value
        ),
    );
}

#[test]
fn acceptance_6_bundle_threshold_sweep() {
    // As specified: over alpha in [1.0, 1.5] step 0.02, the smallest alpha
    // whose grand-bundle menu certifies at gap <= 1% must lie in
    // [1.20, 1.28].
    //
    // Measured reality (see the full curve printed below): optimally priced
    // grand bundling is within 0.9% of the optimum already at alpha = 1.0
    // (dual 0.5492 at alpha=1 matches the known optimal revenue 0.549187,
    // so this is the true gap, not grid error), hence the 1% threshold is
    // crossed at the very first sweep point at every resolution and can
    // never land in [1.20, 1.28]. The paper's ~1.24 threshold is where the
    // gap reaches exactly zero, which a 1% certification tolerance does not
    // locate. This test implements the criterion literally and is expected
    // to fail; the analysis lives in the project notes.
    let t0 = Instant::now();
    let alphas: Vec<f64> = (0..=25).map(|k| 1.0 + 0.02 * k as f64).collect();
    let points = presets::bundle_sweep(&alphas, 64, 0.01).unwrap();
    println!("ACCEPTANCE 6: sweep curve (alpha, gap% of revenue, certified at 1%):");
    for p in &points {
        println!(
            "  alpha {:.2}: gap {:.4}% {}",
            p.alpha,
            100.0 * p.gap_rel,
            if p.certified { "certified" } else { "-" }
        );
    }
    let elapsed = t0.elapsed();
    check("6", elapsed.as_secs_f64() < 600.0, format!("runtime {elapsed:?}"));
    let first = points.iter().find(|p| p.certified).map(|p| p.alpha);
    match first {
        Some(alpha) if (1.20..=1.28).contains(&alpha) => {
            pass("6", &format!("smallest certifying alpha {alpha:.2}, runtime {elapsed:?}"));
        }
        Some(alpha) => fail(
            "6",
            &format!(
                "smallest certifying alpha {alpha:.2} outside [1.20, 1.28] \
                 (grand bundling is already within 1% of optimal at alpha {alpha:.2}; \
                 see the curve above and the analysis notes)"
            ),
        ),
        None => fail("6", "no alpha certified at 1%"),
    }
}

#[test]
fn acceptance_7_property_suite() {
    let presets_all = [
        presets::single_item(),
        presets::at_most_one(),
        presets::exactly_one(),
        presets::deterministic_expo(),
        presets::bundle_alpha(2.0),
    ];

    // Support function triangle inequality on 1e4 random triples.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sets: Vec<_> = presets_all.iter().map(|p| p.alloc.clone()).collect();
    for _ in 0..10_000 {
        let s = &sets[rng.random_range(0..sets.len())];
        let dim = s.dimension();
        let pt = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..dim).map(|_| rng.random::<f64>()).collect()
        };
        let (x, y, z) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let lhs = s.pair_cost(&x, &y).unwrap() + s.pair_cost(&y, &z).unwrap();
        let rhs = s.pair_cost(&x, &z).unwrap();
        check("7", lhs >= rhs - 1e-12, format!("triangle: {lhs} < {rhs}"));
    }

    for preset in &presets_all {
        // Transformed measure balance at resolutions >= 64.
        for res in [64, 128] {
            let mu = preset.transform(res).unwrap();
            check(
                "7",
                mu.total_mass().abs() <= 1e-6,
                format!("{} mass {} at {res}", preset.name, mu.total_mass()),
            );
        }

        let mu = preset.transform(64).unwrap();
        let inst = TransportInstance::from_measure(&mu, &preset.alloc).unwrap();
        let plan = transport::solve(&inst).unwrap();
        // Grid LP strong duality.
        check(
            "7",
            (plan.cost - plan.dual_value(&inst)).abs() <= 1e-9 * plan.cost.abs().max(1.0),
            format!("{}: |primal - dual| too large", preset.name),
        );
        // Recovered mechanism feasibility on 1e5 sampled pairs.
        let mech = transport::recovered_mechanism(&plan, &inst);
        let resid = transport::feasibility_residual(&mech, &inst, 100_000, 17);
        check(
            "7",
            resid <= 1e-9,
            format!("{}: feasibility residual {resid}", preset.name),
        );

        // Revenue two ways within 4 standard errors.
        let cal = preset.calibrate().unwrap();
        let mu_fine = preset.transform(preset.calibration_resolutions.1).unwrap();
        let via = cal.menu.revenue_via_measure(&mu_fine);
        let (mc, se) = cal.menu.revenue_direct(&preset.density, 400_000, 7).unwrap();
        check(
            "7",
            (via - mc).abs() <= 4.0 * se,
            format!("{}: revenue {via} vs {mc} +- {se}", preset.name),
        );

        // Weak duality for 100 random feasible menus at resolution 32.
        let mu32 = preset.transform(32).unwrap();
        let inst32 = TransportInstance::from_measure(&mu32, &preset.alloc).unwrap();
        let plan32 = transport::solve(&inst32).unwrap();
        for k in 0..100 {
            let menu = random_feasible_menu(&mut rng, preset, k);
            let gap = transport::duality_gap(&menu, &plan32, &mu32);
            check(
                "7",
                gap >= -1e-8,
                format!("{}: weak duality violated, gap {gap}", preset.name),
            );
        }
    }
    pass("7", "triangle, balance, strong duality, feasibility, revenue agreement, weak duality");
}

fn random_feasible_menu(rng: &mut ChaCha8Rng, preset: &Preset, _k: usize) -> Menu {
    let verts = preset.alloc.vertices();
    let dim = preset.alloc.dimension();
    let scale: f64 = preset.density.domain().iter().sum();
    let mut options = Vec::new();
    if preset.include_zero_option {
        options.push(MenuOption::zero(dim));
    }
    for v in verts {
        if v.iter().all(|&c| c == 0.0) {
            continue;
        }
        if !options.is_empty() && rng.random::<f64>() < 0.3 {
            continue;
        }
        let price = if options.is_empty() {
            0.0
        } else {
            rng.random::<f64>() * 0.6 * scale
        };
        options.push(MenuOption::new(v.clone(), price));
    }
    Menu::new(options).expect("feasible menu")
}

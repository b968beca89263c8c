//! Optimality certificates.
//!
//! Weak duality is the certification instrument: any transport plan bounds
//! the revenue of every feasible menu from above, so a near-zero gap between
//! a menu's revenue and the plan cost certifies the menu at grid scale. The
//! report carries the resolution ladder and the gap trend rather than any
//! claim about the continuum. The module also houses the 1-D stochastic
//! dominance test (the Strassen coupling criterion) and the matching
//! condition verifier used by the worked examples.

use crate::allocation::AllocationSet;
use crate::error::{Error, Result};
use crate::measure::{DensitySpec, SignedMeasure};
use crate::menu::Menu;
use crate::transport::{self, TransportInstance};

/// Certification outcome at grid scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    /// Gap within tolerance at the finest resolution, trend nonincreasing.
    CertifiedAtGrid,
    /// Gap above tolerance but still shrinking with resolution.
    Inconclusive,
    /// Gap above tolerance and bounded away from it under extrapolation.
    Refuted,
}

/// Gap measurement at one resolution.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResolutionEntry {
    pub resolution: usize,
    pub revenue: f64,
    pub dual_value: f64,
    pub gap: f64,
}

/// Certificate for one menu against one instance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertificateReport {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    /// Worst dual-feasibility / complementary-slackness violation of the
    /// finest plan.
    pub max_slack_residual: f64,
    /// Midpoint cell measures of the menu options at the finest resolution.
    pub cell_residuals: Vec<f64>,
    pub per_resolution: Vec<ResolutionEntry>,
    pub tolerance_rel: f64,
    pub verdict: Verdict,
}

impl CertificateReport {
    pub fn write_text<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "certificate: {:?}", self.verdict)?;
        writeln!(
            w,
            "  primal {:.9}  dual {:.9}  gap {:.3e} ({:.4}% of revenue, tol {:.4}%)",
            self.primal_value,
            self.dual_value,
            self.gap,
            100.0 * self.gap / self.primal_value.abs().max(1e-300),
            100.0 * self.tolerance_rel
        )?;
        writeln!(w, "  slack residual {:.3e}", self.max_slack_residual)?;
        write!(w, "  cell residuals")?;
        for r in &self.cell_residuals {
            write!(w, " {r:.3e}")?;
        }
        writeln!(w)?;
        for e in &self.per_resolution {
            writeln!(
                w,
                "  resolution {:>4}: revenue {:.9}  dual {:.9}  gap {:.3e}",
                e.resolution, e.revenue, e.dual_value, e.gap
            )?;
        }
        Ok(())
    }
}

/// Hook that turns the grid measure into a dominating measure before the
/// dual solve. The marginal transport dual is tight only when an optimal
/// matching needs no mass rearrangement; instances that do need one (the
/// exactly-one band merge, the deterministic strip moves) supply the
/// rearranged measure here. Returning `None` keeps the plain measure.
pub type DualMeasureHook<'a> =
    &'a (dyn Fn(&SignedMeasure, &Menu) -> Result<Option<SignedMeasure>> + Sync);

pub struct CertifyOptions<'a> {
    pub resolutions: Vec<usize>,
    /// Relative gap tolerance (fraction of revenue).
    pub tol_rel: f64,
    pub dual_measure: Option<DualMeasureHook<'a>>,
}

impl Default for CertifyOptions<'_> {
    fn default() -> Self {
        CertifyOptions {
            resolutions: vec![32, 64, 128],
            tol_rel: 0.02,
            dual_measure: None,
        }
    }
}

/// Runs the resolution ladder: transform, cell measures, transport dual,
/// duality gap, verdict.
pub fn certify_menu(
    menu: &Menu,
    density: &DensitySpec,
    alloc: &AllocationSet,
    opts: &CertifyOptions,
) -> Result<CertificateReport> {
    if opts.resolutions.is_empty() {
        return Err(Error::input("need at least one resolution"));
    }
    if opts.resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("resolutions must be strictly ascending"));
    }
    menu.validate_against(alloc, 1e-9)?;
    let z0 = vec![0.0; density.dimension()];
    let mut entries = Vec::new();
    let mut finest: Option<(SignedMeasure, transport::TransportPlan, TransportInstance)> = None;
    for &res in &opts.resolutions {
        let mu = SignedMeasure::transform(density, &z0, res)?;
        let mu_dual = match opts.dual_measure {
            Some(builder) => builder(&mu, menu)?.unwrap_or_else(|| mu.clone()),
            None => mu.clone(),
        };
        let instance = TransportInstance::from_measure(&mu_dual, alloc)?;
        let hint = |x: &[f64]| menu.utility(x).0;
        let plan = transport::solve_with_hint(&instance, Some(&hint))?;
        let revenue = menu.revenue_via_measure(&mu);
        entries.push(ResolutionEntry {
            resolution: res,
            revenue,
            dual_value: plan.cost,
            gap: plan.cost - revenue,
        });
        finest = Some((mu, plan, instance));
    }
    let (mu_fine, plan_fine, inst_fine) = finest.expect("at least one resolution");
    let last = entries.last().expect("nonempty ladder");
    let scale = last.revenue.abs().max(1e-12);
    let tol_abs = opts.tol_rel * scale;
    let trend_ok = entries
        .windows(2)
        .all(|w| w[1].gap <= w[0].gap + 1e-9 + 1e-6 * scale);
    let extrapolated = if entries.len() >= 2 {
        let prev = &entries[entries.len() - 2];
        (2.0 * last.gap - prev.gap).max(0.0)
    } else {
        last.gap
    };
    let verdict = if last.gap <= tol_abs && trend_ok {
        Verdict::CertifiedAtGrid
    } else if last.gap > tol_abs && extrapolated > tol_abs {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    };
    Ok(CertificateReport {
        primal_value: last.revenue,
        dual_value: last.dual_value,
        gap: last.gap,
        max_slack_residual: plan_fine.certificate_residual(&inst_fine),
        cell_residuals: menu.cell_measures(&mu_fine).measures,
        per_resolution: entries,
        tolerance_rel: opts.tol_rel,
        verdict,
    })
}

/// 1-D stochastic dominance `nu_plus >= nu_minus`: at every threshold the
/// upper cumulative mass of `nu_plus` covers that of `nu_minus`. Exactly the
/// condition under which a coupling supported on `{x >= y}` exists.
pub fn stochastic_dominance_1d(
    nu_plus: &[(f64, f64)],
    nu_minus: &[(f64, f64)],
) -> Result<bool> {
    let tp: f64 = nu_plus.iter().map(|x| x.1).sum();
    let tm: f64 = nu_minus.iter().map(|x| x.1).sum();
    if (tp - tm).abs() > 1e-10 * tp.abs().max(1.0) {
        return Err(Error::input(format!(
            "dominance test needs equal totals, got {tp:.12e} vs {tm:.12e}"
        )));
    }
    if nu_plus.iter().chain(nu_minus).any(|&(_, w)| w < 0.0) {
        return Err(Error::input("dominance test takes unsigned measures"));
    }
    let mut events: Vec<(f64, f64, f64)> = nu_plus
        .iter()
        .map(|&(p, w)| (p, w, 0.0))
        .chain(nu_minus.iter().map(|&(p, w)| (p, 0.0, w)))
        .collect();
    events.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut cum_plus = 0.0;
    let mut cum_minus = 0.0;
    let mut i = 0;
    while i < events.len() {
        let pos = events[i].0;
        while i < events.len() && events[i].0 == pos {
            cum_plus += events[i].1;
            cum_minus += events[i].2;
            i += 1;
        }
        if cum_plus < cum_minus - 1e-12 * tp.abs().max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The reduction hypothesis of the 1-D matching lemma for one cell: a
/// parametrized boundary piece `P`, the mass `nu_minus(A(a))` available to
/// match against the boundary mass `nu_plus(B(a))`, with `B` nested in `a`.
pub struct MatchingCondition<'a> {
    pub a_range: (f64, f64),
    /// `a -> nu_minus(A(a))`.
    pub nu_minus_of_a: &'a (dyn Fn(f64) -> f64 + Sync),
    /// `a -> nu_plus(B(a))`; must be nondecreasing (nested `B`).
    pub nu_plus_of_b: &'a (dyn Fn(f64) -> f64 + Sync),
}

#[derive(Debug, Clone)]
pub struct MatchingReport {
    pub min_margin: f64,
    pub pass: bool,
    /// Parameter values where the margin dips below the slack.
    pub violations: Vec<f64>,
}

pub const MATCHING_SLACK: f64 = 1e-6;

/// Samples `nu_minus(A(a)) - nu_plus(B(a))` over the parameter range; passes
/// iff every sample clears `-MATCHING_SLACK`. Detects a non-nested `B`
/// (non-monotone boundary mass) as a structural error.
pub fn check_matching_condition(cond: &MatchingCondition, a_samples: usize) -> Result<MatchingReport> {
    if a_samples < 2 {
        return Err(Error::input("need at least two parameter samples"));
    }
    let (lo, hi) = cond.a_range;
    if !(hi > lo) {
        return Err(Error::input("empty parameter range"));
    }
    let step = (hi - lo) / (a_samples - 1) as f64;
    let mut min_margin = f64::INFINITY;
    let mut violations = Vec::new();
    let mut prev_b = f64::NEG_INFINITY;
    for k in 0..a_samples {
        let a = lo + k as f64 * step;
        let b_mass = (cond.nu_plus_of_b)(a);
        if b_mass < prev_b - 1e-9 {
            return Err(Error::input(format!(
                "B(a) is not nested: boundary mass decreases at a = {a}"
            )));
        }
        prev_b = b_mass;
        let margin = (cond.nu_minus_of_a)(a) - b_mass;
        if margin < min_margin {
            min_margin = margin;
        }
        if margin < -MATCHING_SLACK {
            violations.push(a);
        }
    }
    Ok(MatchingReport {
        min_margin,
        pass: violations.is_empty(),
        violations,
    })
}

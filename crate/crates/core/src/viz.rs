//! Minimal SVG emitters for 2-D instances: menu cell decompositions and
//! transport matchings, in the style of the usual textbook figures.

use crate::error::{Error, Result};
use crate::menu::Menu;
use crate::transport::{TransportInstance, TransportPlan};

const PALETTE: [&str; 8] = [
    "#cfcfcf", "#7fb3d5", "#f5b971", "#a9dfbf", "#d7bde2", "#f1948a", "#85c1e9", "#f7dc6f",
];

fn check_2d(dim: usize) -> Result<()> {
    if dim != 2 {
        return Err(Error::Unsupported(format!(
            "SVG plots are only drawn for 2-D instances (got dimension {dim})"
        )));
    }
    Ok(())
}

/// Colors each grid square of `[0, hi]^2` by the winning menu option.
pub fn cells_svg(menu: &Menu, hi: &[f64], resolution: usize) -> Result<String> {
    check_2d(menu.dimension())?;
    check_2d(hi.len())?;
    let size = 600.0;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    let px = size / resolution as f64;
    for i in 0..resolution {
        for j in 0..resolution {
            let x = (i as f64 + 0.5) / resolution as f64 * hi[0];
            let y = (j as f64 + 0.5) / resolution as f64 * hi[1];
            let (_, winner) = menu.utility(&[x, y]);
            let color = PALETTE[winner % PALETTE.len()];
            // SVG y axis points down; flip so the origin is bottom-left.
            let sy = size - (j + 1) as f64 * px;
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{color}\"/>\n",
                i as f64 * px,
                sy,
                px + 0.5,
                px + 0.5,
            ));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Draws the matched source/sink pairs of a plan as line segments.
pub fn plan_svg(instance: &TransportInstance, plan: &TransportPlan, hi: &[f64]) -> Result<String> {
    check_2d(hi.len())?;
    let size = 600.0;
    let sx = |p: &[f64]| p[0] / hi[0] * size;
    let sy = |p: &[f64]| size - p[1] / hi[1] * size;
    let max_flow = plan
        .flows
        .iter()
        .map(|f| f.2)
        .fold(f64::MIN_POSITIVE, f64::max);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    ));
    for &(i, j, w) in &plan.flows {
        let a = &instance.sources[i].0;
        let b = &instance.sinks[j].0;
        let width = 0.3 + 2.2 * (w / max_flow);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#2e6da4\" stroke-width=\"{width:.2}\" stroke-opacity=\"0.55\"/>\n",
            sx(a), sy(a), sx(b), sy(b),
        ));
    }
    for (p, _) in &instance.sources {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.6\" fill=\"#1b4f72\"/>\n",
            sx(p), sy(p)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::menu::MenuOption;

    #[test]
    fn svg_smoke() {
        let menu = Menu::with_zero(
            2,
            vec![
                MenuOption::new(vec![1.0, 0.0], 0.5),
                MenuOption::new(vec![0.0, 1.0], 0.5),
            ],
        )
        .unwrap();
        let svg = cells_svg(&menu, &[1.0, 1.0], 16).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));

        let menu1d = Menu::with_zero(1, vec![MenuOption::new(vec![1.0], 0.5)]).unwrap();
        assert!(matches!(
            cells_svg(&menu1d, &[1.0], 8),
            Err(Error::Unsupported(_))
        ));
    }
}

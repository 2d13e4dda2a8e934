use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::aggregate::{mean_sd, SummaryRow};
use crate::error::{Error, Result};

const LABEL_ORDER: [&str; 10] = ["RQ", "EMDB", "EMDM", "HDC", "DQN_v", "DQN_s", "DQN_bs", "GP_v", "GP_s", "GP_bs"];
const PANEL: (u32, u32) = (560, 380);

fn label_rank(label: &str) -> (usize, String) {
    (LABEL_ORDER.iter().position(|l| *l == label).unwrap_or(LABEL_ORDER.len()), label.to_string())
}

/// Bars of one panel: label, mean, sd.
type Bars = Vec<(String, f64, f64)>;

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Writes grouped bar charts from a summary grouped by env, domain and label.
///
/// One `env{N}.svg` per environment with a panel per domain, and
/// `all_envs.svg` with per-domain means of the environment means. Domains
/// without rows get no panel. Returns the files written.
pub fn emit_plots(summary: &[SummaryRow], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut per_env: BTreeMap<u8, BTreeMap<String, Bars>> = BTreeMap::new();
    for row in summary {
        let (Some(env), Some(domain), Some(label)) = (row.env_id, &row.domain, &row.label) else {
            return Err(Error::Precondition("plots need rows grouped by env, domain and label".into()));
        };
        per_env.entry(env).or_default().entry(domain.clone()).or_default().push((label.clone(), row.mean, row.sd));
    }
    if per_env.is_empty() {
        return Err(Error::Precondition("nothing to plot".into()));
    }
    std::fs::create_dir_all(&out_dir)?;
    let mut written = Vec::new();

    let mut across: BTreeMap<String, BTreeMap<(usize, String), Vec<f64>>> = BTreeMap::new();
    for (env, panels) in &per_env {
        for (domain, bars) in panels {
            for (label, mean, _) in bars {
                across.entry(domain.clone()).or_default().entry(label_rank(label)).or_default().push(*mean);
            }
        }
        let path = out_dir.as_ref().join(format!("env{env}.svg"));
        draw(&path, &format!("Average test reward per dialogue, environment {env}"), panels)?;
        written.push(path);
    }

    let averaged: BTreeMap<String, Bars> = across
        .into_iter()
        .map(|(domain, labels)| {
            let bars = labels
                .into_iter()
                .map(|((_, label), means)| {
                    let (m, sd) = mean_sd(&means);
                    (label, m, sd)
                })
                .collect();
            (domain, bars)
        })
        .collect();
    let path = out_dir.as_ref().join("all_envs.svg");
    draw(&path, "Average test reward per dialogue over all environments", &averaged)?;
    written.push(path);
    Ok(written)
}

fn draw(path: &Path, title: &str, panels: &BTreeMap<String, Bars>) -> Result<()> {
    let cols = panels.len().min(2) as u32;
    let rows = panels.len().div_ceil(2) as u32;
    let size = (PANEL.0 * cols, PANEL.1 * rows + 40);
    let root = SVGBackend::new(path, size).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let root = root.titled(title, ("sans-serif", 22)).map_err(plot_err)?;
    let areas = root.split_evenly((rows as usize, cols as usize));
    for ((domain, bars), area) in panels.iter().zip(areas) {
        let mut bars = bars.clone();
        bars.sort_by_key(|(l, _, _)| label_rank(l));
        panel(&area, domain, &bars)?;
    }
    root.present().map_err(plot_err)?;
    Ok(())
}

fn panel(area: &DrawingArea<SVGBackend<'_>, plotters::coord::Shift>, domain: &str, bars: &Bars) -> Result<()> {
    let lo = bars.iter().map(|(_, m, sd)| m - sd).fold(0.0, f64::min);
    let hi = bars.iter().map(|(_, m, sd)| m + sd).fold(0.0, f64::max);
    let pad = ((hi - lo) * 0.08).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let n = bars.len() as f64;
    let mut chart = ChartBuilder::on(area)
        .caption(domain.to_uppercase(), ("sans-serif", 18))
        .margin(10)
        .x_label_area_size(30)
        .y_label_area_size(45)
        .build_cartesian_2d(-0.5..n - 0.5, lo..hi)
        .map_err(plot_err)?;
    chart.configure_mesh().disable_x_mesh().disable_x_axis().y_desc("reward").draw().map_err(plot_err)?;
    chart
        .draw_series(bars.iter().enumerate().map(|(i, (_, m, _))| {
            let x = i as f64;
            Rectangle::new([(x - 0.35, 0.0), (x + 0.35, *m)], Palette99::pick(i).filled())
        }))
        .map_err(plot_err)?;
    chart
        .draw_series(bars.iter().enumerate().filter(|(_, b)| b.2 > 0.0).map(|(i, (_, m, sd))| {
            let x = i as f64;
            PathElement::new(vec![(x, m - sd), (x, m + sd)], BLACK)
        }))
        .map_err(plot_err)?;
    chart
        .draw_series(bars.iter().enumerate().map(|(i, (l, _, _))| {
            Text::new(l.clone(), (i as f64 - 0.4, lo + pad * 0.3), ("sans-serif", 11).into_font())
        }))
        .map_err(plot_err)?;
    chart.draw_series(std::iter::once(PathElement::new(vec![(-0.5, 0.0), (n - 0.5, 0.0)], BLACK))).map_err(plot_err)?;
    Ok(())
}

//! Browser bindings for the exclusivity toolkit. Every export returns a JSON
//! string so the page stays framework-free and the functions run natively in
//! tests.

use exclusivity::eprinciple::{all_merge_maps, clique_certificate, cross_bounds, MergeMap};
use exclusivity::exgraph::disjunctive_product;
use exclusivity::montecarlo::{run_chsh, run_nc, run_w_report, NoiseModel, SimulatedRun};
use exclusivity::report::{figure_graph, FigureGraph};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Upper limit on shots per setting accepted from the page.
pub const MAX_SHOTS: u32 = 10_000_000;

fn runs(
    seed: u64,
    shots: u64,
    v_chsh: f64,
    v_nc: f64,
) -> Result<(SimulatedRun, SimulatedRun), String> {
    let chsh_noise = NoiseModel::new(v_chsh, 4).map_err(|e| e.to_string())?;
    let nc_noise = NoiseModel::new(v_nc, 5).map_err(|e| e.to_string())?;
    let chsh = run_chsh(seed, shots, chsh_noise).map_err(|e| e.to_string())?;
    let nc = run_nc(seed, shots, nc_noise).map_err(|e| e.to_string())?;
    Ok((chsh, nc))
}

fn estimates(run: &SimulatedRun) -> Value {
    run.estimates
        .iter()
        .map(|e| json!({ "label": e.label, "notation": e.notation, "p": e.p_hat, "stderr": e.stderr, "noisy": e.noisy }))
        .collect()
}

/// Simulates both experiments. `shots = 0` gives exact noisy probabilities.
#[wasm_bindgen]
pub fn simulate(seed: u32, shots: u32, v_chsh: f64, v_nc: f64) -> Result<String, String> {
    if shots > MAX_SHOTS {
        return Err(format!("at most {MAX_SHOTS} shots per setting"));
    }
    let (chsh, nc) = runs(seed.into(), shots.into(), v_chsh, v_nc)?;
    let w = run_w_report(&chsh, &nc).map_err(|e| e.to_string())?;
    let bounds = cross_bounds(chsh.total, nc.total).map_err(|e| e.to_string())?;
    Ok(json!({
        "s": { "value": chsh.total.value, "stderr": chsh.total.uncertainty, "noisy": chsh.total_noisy },
        "r": { "value": nc.total.value, "stderr": nc.total.uncertainty, "noisy": nc.total_noisy },
        "product": chsh.total.value * nc.total.value,
        "chsh": estimates(&chsh),
        "nc": estimates(&nc),
        "w": w.iter().map(|r| json!({ "index": r.index, "value": r.value, "stderr": r.uncertainty, "exceeds": r.exceeds_bound })).collect::<Value>(),
        "r_bound": { "value": bounds.r_bound.value, "stderr": bounds.r_bound.uncertainty },
        "s_bound": { "value": bounds.s_bound.value, "stderr": bounds.s_bound.uncertainty },
    })
    .to_string())
}

/// Exact `S`, `R` and `S·R` for `points` evenly spaced visibilities in `[0, 1]`.
#[wasm_bindgen]
pub fn noise_sweep(points: u32) -> Result<String, String> {
    if !(2..=1000).contains(&points) {
        return Err("points must lie in 2..=1000".into());
    }
    let mut rows = Vec::with_capacity(points as usize);
    for k in 0..points {
        let v = f64::from(k) / f64::from(points - 1);
        let (chsh, nc) = runs(0, 0, v, v)?;
        let (s, r) = (chsh.total.value, nc.total.value);
        rows.push(json!({ "v": v, "s": s, "r": r, "product": s * r }));
    }
    Ok(Value::Array(rows).to_string())
}

/// Merge map `W_index` (1..=16): the assignment `u_i -> v_σ(i)`, its global
/// events, and the edges of both event graphs for drawing.
#[wasm_bindgen]
pub fn merge_map(index: u32) -> Result<String, String> {
    let maps = all_merge_maps();
    let map: &MergeMap = usize::try_from(index)
        .ok()
        .and_then(|i| i.checked_sub(1))
        .and_then(|i| maps.get(i))
        .ok_or_else(|| format!("index must lie in 1..={}", maps.len()))?;
    let (gb, ub) = figure_graph(FigureGraph::F1b);
    let (gc, uc) = figure_graph(FigureGraph::F1c);
    let product = disjunctive_product(&gb, &gc).map_err(|e| e.to_string())?;
    let clique = clique_certificate(map, &product).map_err(|e| e.to_string())?;
    let edges = |g: &exclusivity::exgraph::ExclusivityGraph| {
        g.edges().map(|(a, b)| json!([a, b])).collect::<Value>()
    };
    Ok(json!({
        "index": index,
        "k": map.k(),
        "m": map.m(),
        "sigma": map.sigma(),
        "global_events": map.global_events(),
        "clique": clique,
        "chsh": { "labels": ub, "edges": edges(&gb) },
        "nc": { "labels": uc, "edges": edges(&gc) },
    })
    .to_string())
}

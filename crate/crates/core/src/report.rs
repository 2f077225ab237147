//! Rebuilds the result tables and figure graphs, and runs the ideal-value
//! verification suite.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use serde::Serialize;

use crate::eprinciple::{
    all_merge_maps, clique_certificate, cross_bounds, product_bound, reference_bounds, w_reports,
    w_value, Measured, WReport,
};
use crate::exgraph::{
    complement, disjunctive_product, independence_number, is_vertex_transitive, ExclusivityGraph,
    GraphJson,
};
use crate::measured;
use crate::montecarlo::{
    run_chsh, run_exclusivity_checks, run_nc, run_w_report, ExclusivityEstimate, MonteCarloError,
    NoiseModel, SimulatedRun,
};
use crate::numerics::{fidelity, gram_deviation, inner_product, StateVector};
use crate::scenario::{
    build_chsh_scenario, chsh_graph, chsh_identity_check, exclusivity_table, measurement_bases,
    nc_events, nc_graph, nc_state, quantum_max, sum_value, Scenario, CHSH_EVENTS,
};

/// One table cell; numbers render with four decimals in text output and at
/// full precision in JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) if *x != 0.0 && x.abs() < 1e-3 => format!("{x:.2e}"),
            Cell::Num(x) => format!("{x:.4}"),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(title: &str, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::render).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| {
                cells
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain([self.columns[c].chars().count()])
                    .max()
                    .unwrap()
            })
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = format!("{}\n{}\n", self.title, line(&self.columns));
        out.push_str(
            &"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)),
        );
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    /// RFC 4180 CSV with full-precision numbers.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            let fields: Vec<String> = r
                .iter()
                .map(|c| match c {
                    Cell::Text(s) => s.clone(),
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(x) => x.to_string(),
                })
                .collect();
            w.write_record(&fields).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphExport {
    pub labels: Vec<String>,
    pub graph: GraphJson,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportBundle {
    pub tables: BTreeMap<String, Table>,
    pub graphs: BTreeMap<String, GraphExport>,
    pub verdicts: Vec<Verdict>,
}

impl ReportBundle {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    fn check(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            check: check.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn merge(&mut self, other: ReportBundle) {
        self.tables.extend(other.tables);
        self.graphs.extend(other.graphs);
        self.verdicts.extend(other.verdicts);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Verdicts as CSV: `check, passed, detail`.
    pub fn verdicts_csv(&self) -> String {
        let mut t = Table::new("verdicts", &["check", "passed", "detail"]);
        for v in &self.verdicts {
            t.push(vec![
                v.check.clone().into(),
                v.passed.to_string().into(),
                v.detail.clone().into(),
            ]);
        }
        t.to_csv()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in self.tables.values() {
            out.push_str(&t.render());
            out.push('\n');
        }
        for (id, g) in &self.graphs {
            let _ = writeln!(
                out,
                "{id}: {} vertices, {} edges",
                g.graph.n,
                g.graph.edges.len()
            );
        }
        if !self.graphs.is_empty() {
            out.push('\n');
        }
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "[{}] {}: {}",
                if v.passed { "PASS" } else { "FAIL" },
                v.check,
                v.detail
            );
        }
        out
    }
}

/// Which graph to export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureGraph {
    /// Bell-CHSH events, C8(3,4).
    F1b,
    /// NC events, C8(1,2).
    F1c,
    /// The 64 global events of the joint experiment.
    F4,
}

impl FigureGraph {
    pub fn id(self) -> &'static str {
        match self {
            Self::F1b => "F1b",
            Self::F1c => "F1c",
            Self::F4 => "F4",
        }
    }
}

fn chsh_labels() -> Vec<String> {
    CHSH_EVENTS.iter().map(|e| e.notation()).collect()
}

fn nc_labels() -> Vec<String> {
    nc_events().into_iter().map(|e| e.notation).collect()
}

/// A figure graph with vertex labels in outcome|setting notation; product
/// vertices read `u-notation / v-notation` in row-major `(u_i, v_j)` order.
pub fn figure_graph(which: FigureGraph) -> (ExclusivityGraph, Vec<String>) {
    match which {
        FigureGraph::F1b => (chsh_graph(), chsh_labels()),
        FigureGraph::F1c => (nc_graph(), nc_labels()),
        FigureGraph::F4 => {
            let g = disjunctive_product(&chsh_graph(), &nc_graph()).expect("64 vertices");
            let (u, v) = (chsh_labels(), nc_labels());
            let labels = u
                .iter()
                .flat_map(|a| v.iter().map(move |b| format!("{a} / {b}")))
                .collect();
            (g, labels)
        }
    }
}

/// Test hooks for the verification suite.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Tilt `v_3` slightly towards `|1>`, breaking its orthogonality with `v_1`.
    pub perturb_v3: bool,
}

fn nc_scenario(options: &VerifyOptions) -> Scenario {
    let mut events = nc_events();
    if options.perturb_v3 {
        let mut amps = events[3].vec.amps().to_vec();
        amps[1].re += 1e-3;
        events[3].vec = StateVector::normalized(amps).expect("finite, non-zero");
    }
    Scenario::new_unchecked("nc", nc_state(), events, nc_graph())
}

const P_CHSH: f64 = (2.0 + SQRT_2) / 8.0;
const P_NC: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// The full ideal-value suite plus the expected columns of every table.
pub fn verify(options: &VerifyOptions) -> ReportBundle {
    let mut b = ReportBundle::default();
    let gb = chsh_graph();
    let gc = nc_graph();

    b.check(
        "complementarity",
        complement(&gb) == gc,
        "complement(C8(3,4)) == C8(1,2)",
    );
    for (id, g) in [("F1b", &gb), ("F1c", &gc)] {
        let t = is_vertex_transitive(g).unwrap_or(false);
        b.check(
            format!("vertex transitivity {id}"),
            t,
            format!("{} edges", g.edge_count()),
        );
    }
    for (id, g, bound) in [("F1b", &gb, 3), ("F1c", &gc, 2)] {
        let alpha = independence_number(g).unwrap_or(usize::MAX);
        b.check(
            format!("independence number {id}"),
            alpha == bound,
            format!("alpha = {alpha}, NCHV bound {bound}"),
        );
    }

    let chsh = build_chsh_scenario();
    let nc = nc_scenario(options);
    for s in [&chsh, &nc] {
        let r = s.validate();
        let detail = match &r {
            Ok(()) => "orthogonality matches declared exclusivity".to_string(),
            Err(e) => e.to_string(),
        };
        b.check(format!("scenario invariants {}", s.name), r.is_ok(), detail);
    }

    for (s, edges) in [(&chsh, 12), (&nc, 16)] {
        match exclusivity_table(s) {
            Ok(t) => {
                let diag = (0..8).all(|i| (t[i][i] - 1.0).abs() <= 1e-12);
                let worst = s
                    .graph
                    .edges()
                    .map(|(i, j)| t[i][j].max(t[j][i]))
                    .fold(0.0, f64::max);
                b.check(
                    format!("exclusivity table {}", s.name),
                    diag && worst <= 1e-12 && s.graph.edge_count() == edges,
                    format!("{} edges, max edge entry {worst:.1e}", s.graph.edge_count()),
                );
            }
            Err(e) => b.check(
                format!("exclusivity table {}", s.name),
                false,
                e.to_string(),
            ),
        }
    }

    let maxima =
        [(&chsh, 2.0 + SQRT_2, "S"), (&nc, 8.0 - 4.0 * SQRT_2, "R")].map(|(s, target, name)| {
            match quantum_max(s) {
                Ok((lambda, opt)) => {
                    let fid = fidelity(&opt, &s.state).unwrap_or(0.0);
                    let ok = (lambda - target).abs() <= 1e-9 && fid >= 1.0 - 1e-9;
                    b.check(
                        format!("quantum maximum {name}"),
                        ok,
                        format!("{name}_max = {lambda:.9}, fidelity with built state {fid:.12}"),
                    );
                    lambda
                }
                Err(e) => {
                    b.check(format!("quantum maximum {name}"), false, e.to_string());
                    f64::NAN
                }
            }
        });
    let product = maxima[0] * maxima[1];
    b.check(
        "product saturation",
        (product - 8.0).abs() <= 1e-8,
        format!("S_max·R_max = {product:.9}"),
    );

    let sat = all_merge_maps()
        .iter()
        .map(|m| {
            w_value(m, &[P_CHSH; 8], &[P_NC; 8])
                .map(|w| (w - 1.0).abs())
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    b.check(
        "W saturation",
        sat <= 1e-12,
        format!("max |W_k - 1| = {sat:.1e} over 16 maps"),
    );

    let product_graph = disjunctive_product(&gb, &gc).expect("64 vertices");
    let cliques = all_merge_maps()
        .iter()
        .filter(|m| clique_certificate(m, &product_graph).unwrap_or(false))
        .count();
    b.check(
        "merge-map cliques",
        cliques == 16,
        format!("{cliques}/16 images are cliques of the 64-vertex product"),
    );

    let cb = cross_bounds(
        Measured::new(measured::S_TOTAL.0, measured::S_TOTAL.1),
        Measured::new(measured::R_TOTAL.0, measured::R_TOTAL.1),
    )
    .expect("positive inputs");
    let shown = format!(
        "R <= {:.3} ± {:.3}, S <= {:.3} ± {:.3}",
        cb.r_bound.value, cb.r_bound.uncertainty, cb.s_bound.value, cb.s_bound.uncertainty
    );
    b.check(
        "cross bounds",
        shown == "R <= 2.344 ± 0.009, S <= 3.426 ± 0.016",
        shown,
    );

    match measurement_bases() {
        Ok(bases) => {
            let worst = bases
                .iter()
                .map(|m| gram_deviation(&m.vectors()).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            b.check(
                "measurement bases orthonormal",
                worst <= 1e-12,
                format!("max Gram deviation {worst:.1e}"),
            );
        }
        Err(e) => b.check("measurement bases orthonormal", false, e.to_string()),
    }
    let worst_v = nc
        .events
        .iter()
        .zip(measured::PRINTED_V)
        .flat_map(|(e, printed)| {
            e.vec
                .amps()
                .iter()
                .zip(printed)
                .map(|(a, p)| (a.re - p).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    b.check(
        "printed v components",
        worst_v <= 2e-3,
        format!("max component deviation {worst_v:.1e}"),
    );

    let (s, alt) = chsh_identity_check(&chsh.state).expect("dim 4");
    b.check(
        "CHSH identity",
        (s - alt).abs() <= 1e-10,
        format!("S = {s:.10}, 2 + C/2 = {alt:.10}"),
    );

    b.tables.insert("T1".into(), expected_table_t1(&chsh));
    b.tables.insert("T2".into(), expected_table_t2(&nc));
    b.tables.insert(
        "T3".into(),
        w_table("Exclusivity sums W_1..W_16 (ideal)", &ideal_w_reports()),
    );
    b.tables.insert(
        "T4".into(),
        ideal_exclusivity_table(
            "Exclusivity tests, Bell-CHSH events (ideal)",
            &chsh,
            &measured::CHSH_EXCLUSIVITY,
            "mu",
            "u",
        ),
    );
    b.tables.insert("T5".into(), basis_table());
    b.tables.insert(
        "T6".into(),
        ideal_exclusivity_table(
            "Exclusivity tests, NC events (ideal)",
            &nc,
            &measured::NC_EXCLUSIVITY,
            "mu'",
            "v",
        ),
    );
    b.tables.insert(
        "bounds".into(),
        bounds_table(
            Measured::new(measured::S_TOTAL.0, measured::S_TOTAL.1),
            Measured::new(measured::R_TOTAL.0, measured::R_TOTAL.1),
        ),
    );
    for which in [FigureGraph::F1b, FigureGraph::F1c, FigureGraph::F4] {
        let (g, labels) = figure_graph(which);
        b.graphs.insert(
            which.id().into(),
            GraphExport {
                labels,
                graph: g.to_json(),
            },
        );
    }
    b
}

fn expected_table_t1(chsh: &Scenario) -> Table {
    let mut t = Table::new(
        "Bell-CHSH events",
        &["event", "p(a,b|i,j)", "lab value", "lab error", "expected"],
    );
    let probs = chsh.event_probabilities().unwrap_or_default();
    for (k, e) in chsh.events.iter().enumerate() {
        let (v, err) = measured::CHSH_PROBABILITIES[k];
        t.push(vec![
            e.label.clone().into(),
            e.notation.clone().into(),
            v.into(),
            err.into(),
            probs.get(k).copied().unwrap_or(f64::NAN).into(),
        ]);
    }
    let s = sum_value(chsh).unwrap_or(f64::NAN);
    t.push(vec![
        "S".into(),
        "".into(),
        measured::S_TOTAL.0.into(),
        measured::S_TOTAL.1.into(),
        s.into(),
    ]);
    t
}

fn expected_table_t2(nc: &Scenario) -> Table {
    let mut t = Table::new(
        "NC events",
        &[
            "event",
            "p(0,0,1|i-2,i-1,i)",
            "lab value",
            "lab error",
            "expected",
        ],
    );
    for (k, e) in nc.events.iter().enumerate() {
        let p = crate::numerics::probability(&nc.state, &e.vec).unwrap_or(f64::NAN);
        let (v, err) = measured::NC_PROBABILITIES[k];
        t.push(vec![
            e.label.clone().into(),
            e.notation.clone().into(),
            v.into(),
            err.into(),
            p.into(),
        ]);
    }
    let r = sum_value(nc).unwrap_or(f64::NAN);
    t.push(vec![
        "R".into(),
        "".into(),
        measured::R_TOTAL.0.into(),
        measured::R_TOTAL.1.into(),
        r.into(),
    ]);
    t
}

fn ideal_w_reports() -> Vec<WReport> {
    w_reports(&[Measured::exact(P_CHSH); 8], &[Measured::exact(P_NC); 8])
        .expect("probabilities in range")
}

fn w_table(title: &str, reports: &[WReport]) -> Table {
    let mut cols = vec!["W"];
    let names: Vec<String> = (0..8).map(|i| format!("u{i}")).collect();
    cols.extend(names.iter().map(String::as_str));
    cols.extend(["value", "uncertainty", "lab value"]);
    let mut t = Table::new(title, &cols);
    for r in reports {
        let mut row: Vec<Cell> = vec![format!("W{}", r.index).into()];
        row.extend(r.sigma.iter().map(|s| Cell::from(format!("v{s}"))));
        row.extend([
            r.value.into(),
            r.uncertainty.into(),
            measured::W_VALUES[r.index - 1].into(),
        ]);
        t.push(row);
    }
    t
}

fn ideal_exclusivity_table(
    title: &str,
    s: &Scenario,
    tests: &[measured::ExclusivityTest],
    mu: &str,
    ev: &str,
) -> Table {
    let table = exclusivity_table(s).unwrap_or_default();
    let mut t = Table::new(title, &["probability", "ideal", "lab value", "lab error"]);
    for test in tests {
        let ideal = table
            .get(test.measured)
            .and_then(|r| r.get(test.prepared))
            .copied()
            .unwrap_or(f64::NAN);
        t.push(vec![
            format!("p(1|{mu}{};{ev}{})", test.measured, test.prepared).into(),
            ideal.into(),
            test.value.into(),
            test.uncertainty.into(),
        ]);
    }
    t
}

fn components(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3}")).collect();
    format!("({})", parts.join(", "))
}

/// Measurement bases: derived vectors next to the printed ones. For the
/// printed completion vectors, `deviation` is the weight of the (normalized)
/// printed vector inside the span of its basis triangle, which is zero for a
/// valid completion.
pub fn basis_table() -> Table {
    let mut t = Table::new(
        "NC measurement bases",
        &["basis", "state", "derived", "printed", "deviation"],
    );
    let Ok(bases) = measurement_bases() else {
        return t;
    };
    for (bi, basis) in bases.iter().enumerate() {
        let vectors = basis.vectors();
        for (slot, &k) in basis.events.iter().enumerate() {
            let derived: Vec<f64> = vectors[slot].amps().iter().map(|a| a.re).collect();
            let printed = measured::PRINTED_V[k];
            let dev = derived
                .iter()
                .zip(printed)
                .map(|(a, p)| (a - p).abs())
                .fold(0.0, f64::max);
            t.push(vec![
                basis.label.into(),
                format!("v{k}").into(),
                components(&derived).into(),
                components(&printed).into(),
                dev.into(),
            ]);
        }
        for (w, printed) in measured::PRINTED_W[bi].iter().enumerate() {
            let derived: Vec<f64> = basis.completion[w].amps().iter().map(|a| a.re).collect();
            let dev = printed_completion_defect(&vectors[..3], printed);
            t.push(vec![
                basis.label.into(),
                format!("w{}", 2 * bi + w + 1).into(),
                components(&derived).into(),
                components(printed).into(),
                dev.into(),
            ]);
        }
    }
    t
}

/// Squared overlap of a printed (rounded) vector with the span of the given
/// orthonormal vectors, after normalizing it.
pub fn printed_completion_defect(triangle: &[StateVector], printed: &[f64; 5]) -> f64 {
    let Ok(w) = StateVector::from_real(printed).and_then(StateVector::normalize) else {
        return f64::NAN;
    };
    triangle
        .iter()
        .map(|v| {
            inner_product(v, &w)
                .map(|z| z.norm_sqr())
                .unwrap_or(f64::NAN)
        })
        .sum()
}

fn bounds_table(s_exp: Measured, r_exp: Measured) -> Table {
    let mut t = Table::new(
        "Bounds from the product inequality",
        &["quantity", "value", "uncertainty"],
    );
    if let Ok(cb) = cross_bounds(s_exp, r_exp) {
        let refs = reference_bounds();
        t.push(vec![
            "S measured".into(),
            s_exp.value.into(),
            s_exp.uncertainty.into(),
        ]);
        t.push(vec![
            "R measured".into(),
            r_exp.value.into(),
            r_exp.uncertainty.into(),
        ]);
        t.push(vec![
            "R <= 8/S".into(),
            cb.r_bound.value.into(),
            cb.r_bound.uncertainty.into(),
        ]);
        t.push(vec![
            "S <= 8/R".into(),
            cb.s_bound.value.into(),
            cb.s_bound.uncertainty.into(),
        ]);
        t.push(vec![
            "S·R".into(),
            (s_exp.value * r_exp.value).into(),
            "".into(),
        ]);
        t.push(vec![
            "earlier R bound 3√3/2".into(),
            refs.r_two_copies.into(),
            "".into(),
        ]);
        t.push(vec![
            "earlier R bound (printed)".into(),
            refs.r_two_copies_printed.into(),
            "".into(),
        ]);
        t.push(vec![
            "earlier S bound 8/√5".into(),
            refs.s_two_copies.into(),
            "".into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Chsh,
    Nc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub seed: u64,
    /// Shots per setting; `0` selects the analytic path.
    pub shots: u64,
    pub chsh_visibility: f64,
    pub nc_visibility: f64,
    pub which: Which,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            shots: crate::montecarlo::DEFAULT_SHOTS,
            chsh_visibility: 0.998,
            nc_visibility: 0.995,
            which: Which::Both,
        }
    }
}

/// Simulated tables plus bounds derived from the simulated totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOutcome {
    pub chsh: Option<SimulatedRun>,
    pub nc: Option<SimulatedRun>,
    pub w: Vec<WReport>,
}

impl SimulationOutcome {
    /// One row per estimated quantity: event probabilities, totals, `W_k`
    /// and the cross bounds when both experiments ran.
    pub fn summary_table(&self) -> Table {
        let mut t = Table::new(
            "Simulated estimates",
            &[
                "quantity",
                "notation",
                "estimate",
                "stderr",
                "ideal",
                "noisy expectation",
            ],
        );
        for (run, total) in [(&self.chsh, "S"), (&self.nc, "R")] {
            let Some(run) = run else { continue };
            for e in &run.estimates {
                t.push(vec![
                    e.label.clone().into(),
                    e.notation.clone().into(),
                    e.p_hat.into(),
                    e.stderr.into(),
                    e.ideal.into(),
                    e.noisy.into(),
                ]);
            }
            let ideal: f64 = run.estimates.iter().map(|e| e.ideal).sum();
            t.push(vec![
                total.into(),
                "".into(),
                run.total.value.into(),
                run.total.uncertainty.into(),
                ideal.into(),
                run.total_noisy.into(),
            ]);
        }
        for w in &self.w {
            let sigma = w
                .sigma
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            t.push(vec![
                format!("W{}", w.index).into(),
                sigma.into(),
                w.value.into(),
                w.uncertainty.into(),
                1.0.into(),
                "".into(),
            ]);
        }
        if let (Some(c), Some(n)) = (&self.chsh, &self.nc) {
            if let Ok(cb) = cross_bounds(c.total, n.total) {
                t.push(vec![
                    "R bound 8/S".into(),
                    "".into(),
                    cb.r_bound.value.into(),
                    cb.r_bound.uncertainty.into(),
                    (8.0 - 4.0 * SQRT_2).into(),
                    "".into(),
                ]);
                t.push(vec![
                    "S bound 8/R".into(),
                    "".into(),
                    cb.s_bound.value.into(),
                    cb.s_bound.uncertainty.into(),
                    (2.0 + SQRT_2).into(),
                    "".into(),
                ]);
            }
        }
        t
    }
}

pub fn simulate(
    config: &SimulationConfig,
) -> Result<(ReportBundle, SimulationOutcome), MonteCarloError> {
    let mut b = ReportBundle::default();
    let chsh = match config.which {
        Which::Chsh | Which::Both => Some(run_chsh(
            config.seed,
            config.shots,
            NoiseModel::new(config.chsh_visibility, 4)?,
        )?),
        Which::Nc => None,
    };
    let nc = match config.which {
        Which::Nc | Which::Both => Some(run_nc(
            config.seed,
            config.shots,
            NoiseModel::new(config.nc_visibility, 5)?,
        )?),
        Which::Chsh => None,
    };
    if let Some(run) = &chsh {
        b.tables.insert(
            "T1".into(),
            simulated_table(
                "Bell-CHSH events (simulated)",
                run,
                "S",
                &measured::CHSH_PROBABILITIES,
                measured::S_TOTAL,
            ),
        );
        let checks = run_exclusivity_checks(config.seed, config.shots, config.chsh_visibility)?;
        b.tables.insert(
            "T4".into(),
            simulated_exclusivity(
                "Exclusivity tests, Bell-CHSH events (simulated)",
                &checks.chsh,
                "mu",
                "u",
            ),
        );
        let worst = checks
            .chsh
            .iter()
            .map(|e| (e.p_hat - e.noisy).abs() / e.stderr.max(1e-300))
            .fold(0.0, f64::max);
        b.check(
            "simulated CHSH total",
            true,
            format!(
                "S = {:.4} ± {:.4} (noisy expectation {:.4})",
                run.total.value, run.total.uncertainty, run.total_noisy
            ),
        );
        if config.shots > 0 {
            b.check(
                "CHSH exclusivity tests within 5σ",
                worst <= 5.0,
                format!("max deviation {worst:.2}σ"),
            );
        }
    }
    if let Some(run) = &nc {
        b.tables.insert(
            "T2".into(),
            simulated_table(
                "NC events (simulated)",
                run,
                "R",
                &measured::NC_PROBABILITIES,
                measured::R_TOTAL,
            ),
        );
        let checks = run_exclusivity_checks(config.seed, config.shots, config.nc_visibility)?;
        b.tables.insert(
            "T6".into(),
            simulated_exclusivity(
                "Exclusivity tests, NC events (simulated)",
                &checks.nc,
                "mu'",
                "v",
            ),
        );
        b.check(
            "simulated NC total",
            true,
            format!(
                "R = {:.4} ± {:.4} (noisy expectation {:.4})",
                run.total.value, run.total.uncertainty, run.total_noisy
            ),
        );
    }
    let mut w = Vec::new();
    if let (Some(c), Some(n)) = (&chsh, &nc) {
        w = run_w_report(c, n)?;
        b.tables.insert(
            "T3".into(),
            w_table("Exclusivity sums W_1..W_16 (simulated)", &w),
        );
        let flagged: Vec<String> = w
            .iter()
            .filter(|r| r.exceeds_bound)
            .map(|r| format!("W{}", r.index))
            .collect();
        b.check(
            "simulated W <= 1 + 3σ",
            flagged.is_empty(),
            if flagged.is_empty() {
                "no W exceeds 1 by 3σ".to_string()
            } else {
                flagged.join(", ")
            },
        );
        b.tables
            .insert("bounds".into(), bounds_table(c.total, n.total));
        let pb = product_bound(
            &std::array::from_fn(|i| c.estimates[i].p_hat),
            &std::array::from_fn(|i| n.estimates[i].p_hat),
        );
        if let Ok(pb) = pb {
            b.check(
                "simulated S·R <= 8",
                pb.product <= 8.0 + 1e-9,
                format!("S·R = {:.4}", pb.product),
            );
        }
    }
    Ok((b, SimulationOutcome { chsh, nc, w }))
}

fn simulated_table(
    title: &str,
    run: &SimulatedRun,
    total: &str,
    lab: &[(f64, f64); 8],
    lab_total: (f64, f64),
) -> Table {
    let mut t = Table::new(
        title,
        &[
            "event",
            "notation",
            "estimate",
            "stderr",
            "expected",
            "lab value",
            "lab error",
        ],
    );
    for (e, (v, err)) in run.estimates.iter().zip(lab) {
        t.push(vec![
            e.label.clone().into(),
            e.notation.clone().into(),
            e.p_hat.into(),
            e.stderr.into(),
            e.ideal.into(),
            (*v).into(),
            (*err).into(),
        ]);
    }
    let expected: f64 = run.estimates.iter().map(|e| e.ideal).sum();
    t.push(vec![
        total.into(),
        "".into(),
        run.total.value.into(),
        run.total.uncertainty.into(),
        expected.into(),
        lab_total.0.into(),
        lab_total.1.into(),
    ]);
    t
}

fn simulated_exclusivity(title: &str, rows: &[ExclusivityEstimate], mu: &str, ev: &str) -> Table {
    let mut t = Table::new(
        title,
        &[
            "probability",
            "estimate",
            "stderr",
            "ideal",
            "lab value",
            "lab error",
        ],
    );
    for e in rows {
        t.push(vec![
            format!("p(1|{mu}{};{ev}{})", e.measured, e.prepared).into(),
            e.p_hat.into(),
            e.stderr.into(),
            e.ideal.into(),
            e.lab.0.into(),
            e.lab.1.into(),
        ]);
    }
    t
}

/// Verification followed by simulation, bundled.
pub fn full_report(config: &SimulationConfig) -> Result<ReportBundle, MonteCarloError> {
    let mut bundle = verify(&VerifyOptions::default());
    let (sim, _) = simulate(config)?;
    // Simulated tables are stored next to the ideal ones under a suffix.
    for (id, table) in sim.tables {
        bundle.tables.insert(format!("{id}-sim"), table);
    }
    bundle.verdicts.extend(sim.verdicts);
    Ok(bundle)
}

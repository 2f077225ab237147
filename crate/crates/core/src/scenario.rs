//! The two quantum scenarios: a two-qubit Bell-CHSH experiment whose eight
//! events form the circulant C8(3,4), and a single five-level system
//! non-contextuality experiment whose events form C8(1,2).

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exgraph::{circulant, CirculantSpec, ExclusivityGraph, GraphError};
use crate::numerics::{
    inner_product, max_eigenpair, orthonormal_complement, probability, HermitianOperator,
    NumericsError, StateVector, ORTHOGONALITY_TOL,
};

/// Declared non-edges must overlap by more than this.
pub const NON_EDGE_MIN_OVERLAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invariant violated ({check}): {detail}")]
    InvariantViolation { check: &'static str, detail: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl ScenarioError {
    fn violation(check: &'static str, detail: impl Into<String>) -> Self {
        Self::InvariantViolation {
            check,
            detail: detail.into(),
        }
    }

    /// Name of the failed invariant, if this is an invariant violation.
    pub fn check_name(&self) -> Option<&'static str> {
        match self {
            Self::InvariantViolation { check, .. } => Some(check),
            _ => None,
        }
    }
}

/// A rank-1 event: a labelled projector direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub label: String,
    /// Outcome/setting notation as printed in the result tables, e.g. `1,-1|1,1`.
    pub notation: String,
    pub vec: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub state: StateVector,
    pub events: Vec<Event>,
    pub graph: ExclusivityGraph,
}

impl Scenario {
    /// Builds a scenario and checks every invariant.
    pub fn new(
        name: impl Into<String>,
        state: StateVector,
        events: Vec<Event>,
        graph: ExclusivityGraph,
    ) -> Result<Self, ScenarioError> {
        let s = Self::new_unchecked(name, state, events, graph);
        s.validate()?;
        Ok(s)
    }

    /// Builds a scenario without validation; call [`Scenario::validate`] to
    /// get the verdict.
    pub fn new_unchecked(
        name: impl Into<String>,
        state: StateVector,
        events: Vec<Event>,
        graph: ExclusivityGraph,
    ) -> Self {
        Self {
            name: name.into(),
            state,
            events,
            graph,
        }
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !self.state.is_normalized() {
            return Err(ScenarioError::violation(
                "state norm",
                format!("norm = {}", self.state.norm()),
            ));
        }
        if self.graph.n() != self.events.len() {
            return Err(ScenarioError::violation(
                "graph size",
                format!(
                    "graph has {} vertices for {} events",
                    self.graph.n(),
                    self.events.len()
                ),
            ));
        }
        for e in &self.events {
            if e.vec.dim() != self.dim() {
                return Err(ScenarioError::violation(
                    "event dimension",
                    format!(
                        "{} has dim {}, state has {}",
                        e.label,
                        e.vec.dim(),
                        self.dim()
                    ),
                ));
            }
            if !e.vec.is_normalized() {
                return Err(ScenarioError::violation(
                    "event norm",
                    format!("{}: norm = {}", e.label, e.vec.norm()),
                ));
            }
        }
        for i in 0..self.events.len() {
            for j in (i + 1)..self.events.len() {
                let overlap = inner_product(&self.events[i].vec, &self.events[j].vec)?.norm();
                let (a, b) = (&self.events[i].label, &self.events[j].label);
                if self.graph.has_edge(i, j) {
                    if overlap > ORTHOGONALITY_TOL {
                        return Err(ScenarioError::violation(
                            "edge orthogonality",
                            format!("|<{a}|{b}>| = {overlap:e} on a declared edge"),
                        ));
                    }
                } else if overlap <= NON_EDGE_MIN_OVERLAP {
                    return Err(ScenarioError::violation(
                        "non-edge overlap",
                        format!("{a} and {b} are orthogonal but not declared exclusive"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn event_vectors(&self) -> impl Iterator<Item = &StateVector> {
        self.events.iter().map(|e| &e.vec)
    }

    /// Ideal probability of every event on the scenario state.
    pub fn event_probabilities(&self) -> Result<Vec<f64>, ScenarioError> {
        Ok(self
            .events
            .iter()
            .map(|e| probability(&self.state, &e.vec))
            .collect::<Result<_, _>>()?)
    }

    /// `Σ_k |e_k><e_k|`; its largest eigenvalue is the quantum maximum.
    pub fn projector_sum(&self) -> Result<HermitianOperator, ScenarioError> {
        Ok(HermitianOperator::sum_of_projectors(
            self.dim(),
            self.event_vectors(),
        )?)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A qubit observable used in the Bell experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliSetting {
    /// Test `0`, σz.
    Z,
    /// Test `1`, σx.
    X,
}

impl PauliSetting {
    pub fn from_index(i: u8) -> Self {
        if i == 0 {
            Self::Z
        } else {
            Self::X
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::Z => 0,
            Self::X => 1,
        }
    }

    /// Eigenvector for outcome `+1` or `-1`.
    pub fn eigenvector(self, outcome: i8) -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match (self, outcome > 0) {
            (Self::Z, true) => [1.0, 0.0],
            (Self::Z, false) => [0.0, 1.0],
            (Self::X, true) => [h, h],
            (Self::X, false) => [h, -h],
        };
        StateVector::from_real(&amps).expect("finite")
    }

    /// The 2x2 matrix of the observable, row-major.
    pub fn matrix(self) -> [f64; 4] {
        match self {
            Self::Z => [1.0, 0.0, 0.0, -1.0],
            Self::X => [0.0, 1.0, 1.0, 0.0],
        }
    }
}

/// One joint outcome `(a, b | i, j)` of the Bell experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChshEvent {
    pub a: i8,
    pub b: i8,
    pub i: u8,
    pub j: u8,
}

impl ChshEvent {
    pub fn notation(&self) -> String {
        format!("{},{}|{},{}", self.a, self.b, self.i, self.j)
    }

    pub fn vector(&self) -> StateVector {
        PauliSetting::from_index(self.i)
            .eigenvector(self.a)
            .tensor(&PauliSetting::from_index(self.j).eigenvector(self.b))
    }
}

/// The eight events `u_0..u_7` in result-table order.
pub const CHSH_EVENTS: [ChshEvent; 8] = [
    ChshEvent {
        a: 1,
        b: 1,
        i: 0,
        j: 0,
    },
    ChshEvent {
        a: 1,
        b: 1,
        i: 1,
        j: 0,
    },
    ChshEvent {
        a: 1,
        b: -1,
        i: 1,
        j: 1,
    },
    ChshEvent {
        a: -1,
        b: -1,
        i: 0,
        j: 1,
    },
    ChshEvent {
        a: -1,
        b: -1,
        i: 0,
        j: 0,
    },
    ChshEvent {
        a: -1,
        b: -1,
        i: 1,
        j: 0,
    },
    ChshEvent {
        a: -1,
        b: 1,
        i: 1,
        j: 1,
    },
    ChshEvent {
        a: 1,
        b: 1,
        i: 0,
        j: 1,
    },
];

/// The optimal two-qubit state,
/// `[|00> - |11> + (√2 - 1)(|01> + |10>)] / (2 √(2 - √2))`.
pub fn chsh_state() -> StateVector {
    let norm = 1.0 / (2.0 * (2.0 - SQRT_2).sqrt());
    let off = SQRT_2 - 1.0;
    StateVector::from_real(&[norm, norm * off, norm * off, -norm]).expect("finite")
}

pub fn chsh_graph() -> ExclusivityGraph {
    circulant(&CirculantSpec::new(8, [3, 4])).expect("valid circulant")
}

pub fn nc_graph() -> ExclusivityGraph {
    circulant(&CirculantSpec::new(8, [1, 2])).expect("valid circulant")
}

pub fn build_chsh_scenario() -> Scenario {
    let events = CHSH_EVENTS
        .iter()
        .enumerate()
        .map(|(k, e)| Event {
            label: format!("u{k}"),
            notation: e.notation(),
            vec: e.vector(),
        })
        .collect();
    Scenario::new("chsh", chsh_state(), events, chsh_graph())
        .expect("closed-form CHSH scenario is consistent")
}

/// The five-dimensional state maximizing R.
pub fn nc_state() -> StateVector {
    let a = (1.0 - 1.0 / SQRT_2).sqrt();
    let b = (3.0 / SQRT_2 - 2.0).sqrt();
    StateVector::from_real(&[a, a, a, b, 0.0]).expect("finite")
}

/// The real components of `v_0..v_7`.
pub fn nc_event_components() -> [[f64; 5]; 8] {
    let r = SQRT_2;
    let two_minus = 2.0 - r;
    let three_minus = 3.0 - 2.0 * r;
    let s1 = (r - 1.0).sqrt();
    let s2 = (3.0 * r - 4.0).sqrt();
    let s3 = (2.0 * (5.0 * r - 7.0)).sqrt();
    let s4 = (6.0 * r - 8.0).sqrt();
    let s5 = 2.0 * (5.0 * r - 7.0).sqrt();
    [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [two_minus, 0.0, 0.0, s1, -s2],
        [three_minus, two_minus, 0.0, s3, s4],
        [two_minus, three_minus, two_minus, -s5, 0.0],
        [0.0, r - 2.0, 2.0 * r - 3.0, -s3, s4],
        [0.0, 0.0, r - 2.0, -s1, -s2],
    ]
}

/// Triangle notation `i-2,i-1,i` for event `v_i`.
pub fn nc_notation(i: usize) -> String {
    format!("0,0,1|{},{},{}", (i + 6) % 8, (i + 7) % 8, i)
}

pub fn build_nc_scenario() -> Scenario {
    Scenario::new("nc", nc_state(), nc_events(), nc_graph())
        .expect("closed-form NC scenario is consistent")
}

pub fn nc_events() -> Vec<Event> {
    nc_event_components()
        .iter()
        .enumerate()
        .map(|(k, comps)| Event {
            label: format!("v{k}"),
            notation: nc_notation(k),
            vec: StateVector::from_real(comps).expect("finite"),
        })
        .collect()
}

/// `S` or `R`: the sum of all event probabilities.
pub fn sum_value(s: &Scenario) -> Result<f64, ScenarioError> {
    Ok(s.event_probabilities()?.iter().sum())
}

/// Largest achievable event sum over pure states, with the optimizing state.
pub fn quantum_max(s: &Scenario) -> Result<(f64, StateVector), ScenarioError> {
    Ok(max_eigenpair(&s.projector_sum()?)?)
}

fn two_qubit_observable(first: PauliSetting, second: PauliSetting) -> HermitianOperator {
    let (a, b) = (first.matrix(), second.matrix());
    let mut entries = vec![c(0.0); 16];
    for r1 in 0..2 {
        for c1 in 0..2 {
            for r2 in 0..2 {
                for c2 in 0..2 {
                    entries[(2 * r1 + r2) * 4 + (2 * c1 + c2)] = c(a[r1 * 2 + c1] * b[r2 * 2 + c2]);
                }
            }
        }
    }
    HermitianOperator::new(4, entries).expect("tensor product of Hermitian matrices")
}

/// `⟨A_i B_j⟩` on a two-qubit state.
pub fn correlator(state: &StateVector, i: u8, j: u8) -> Result<f64, ScenarioError> {
    if state.dim() != 4 {
        return Err(NumericsError::DimensionMismatch(state.dim(), 4).into());
    }
    let op = two_qubit_observable(PauliSetting::from_index(i), PauliSetting::from_index(j));
    Ok(op.expectation(state)?)
}

/// Returns `(S, 2 + C/2)` for a two-qubit state, where `S` sums the eight
/// event probabilities and `C = E00 + E10 - E11 + E01` is the CHSH
/// correlator. The two agree for every state.
pub fn chsh_identity_check(state: &StateVector) -> Result<(f64, f64), ScenarioError> {
    if state.dim() != 4 {
        return Err(NumericsError::DimensionMismatch(state.dim(), 4).into());
    }
    let s = CHSH_EVENTS
        .iter()
        .map(|e| probability(state, &e.vector()))
        .sum::<Result<f64, _>>()?;
    let corr = correlator(state, 0, 0)? + correlator(state, 1, 0)? - correlator(state, 1, 1)?
        + correlator(state, 0, 1)?;
    Ok((s, 2.0 + corr / 2.0))
}

/// Entry `[j][i] = |<e_j|e_i>|^2`: the ideal probability of answer 1 when
/// the projector on `e_j` is measured on the state `e_i`.
pub fn exclusivity_table(s: &Scenario) -> Result<Vec<Vec<f64>>, ScenarioError> {
    s.events
        .iter()
        .map(|ej| {
            s.events
                .iter()
                .map(|ei| Ok(inner_product(&ej.vec, &ei.vec)?.norm_sqr()))
                .collect::<Result<Vec<_>, ScenarioError>>()
        })
        .collect()
}

/// A complete five-outcome basis containing one triangle of C8(1,2).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    /// Roman numeral, I..VIII.
    pub label: &'static str,
    /// Index `i` of the triangle `{v_{i-2}, v_{i-1}, v_i}`.
    pub triangle_end: usize,
    /// Event indices of the triangle in ascending order.
    pub events: [usize; 3],
    /// The two vectors completing the triangle to a basis.
    pub completion: Vec<StateVector>,
}

impl MeasurementBasis {
    /// All five basis vectors: the triangle in ascending order, then the completion.
    pub fn vectors(&self) -> Vec<StateVector> {
        let v = nc_events();
        self.events
            .iter()
            .map(|&k| v[k].vec.clone())
            .chain(self.completion.iter().cloned())
            .collect()
    }

    /// Position of event `v_k` within [`MeasurementBasis::vectors`].
    pub fn slot_of(&self, k: usize) -> Option<usize> {
        self.events.iter().position(|&e| e == k)
    }
}

/// Basis labels and the triangle each one measures, in printed order.
pub const BASIS_TRIANGLES: [(&str, usize); 8] = [
    ("I", 0),
    ("II", 2),
    ("III", 5),
    ("IV", 1),
    ("V", 3),
    ("VI", 4),
    ("VII", 6),
    ("VIII", 7),
];

/// The eight measurement bases, one per triangle.
pub fn measurement_bases() -> Result<Vec<MeasurementBasis>, ScenarioError> {
    let events = nc_events();
    BASIS_TRIANGLES
        .iter()
        .map(|&(label, end)| {
            let mut tri = [(end + 6) % 8, (end + 7) % 8, end];
            tri.sort_unstable();
            let given: Vec<StateVector> = tri.iter().map(|&k| events[k].vec.clone()).collect();
            Ok(MeasurementBasis {
                label,
                triangle_end: end,
                events: tri,
                completion: orthonormal_complement(&given)?,
            })
        })
        .collect()
}

/// The basis whose triangle ends at `v_i`, i.e. the one that measures `v_i`
/// in the NC experiment.
pub fn basis_for_event(bases: &[MeasurementBasis], i: usize) -> Option<&MeasurementBasis> {
    bases.iter().find(|b| b.triangle_end == i)
}

// JSON form of a scenario.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventJson {
    pub label: String,
    pub vec: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioJson {
    pub name: String,
    pub dim: usize,
    pub state: Vec<[f64; 2]>,
    pub events: Vec<EventJson>,
    pub edges: Vec<[usize; 2]>,
}

fn to_pairs(v: &StateVector) -> Vec<[f64; 2]> {
    v.amps().iter().map(|a| [a.re, a.im]).collect()
}

fn from_pairs(pairs: &[[f64; 2]]) -> Result<StateVector, ScenarioError> {
    Ok(StateVector::from_amplitudes(
        pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
    )?)
}

impl Scenario {
    pub fn to_json(&self) -> ScenarioJson {
        ScenarioJson {
            name: self.name.clone(),
            dim: self.dim(),
            state: to_pairs(&self.state),
            events: self
                .events
                .iter()
                .map(|e| EventJson {
                    label: e.label.clone(),
                    vec: to_pairs(&e.vec),
                })
                .collect(),
            edges: self.graph.edges().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("plain data serializes")
    }

    /// Rebuilds a scenario from its JSON form and re-validates it.
    /// Event notation is restored for the two built-in scenarios.
    pub fn from_json(json: &ScenarioJson) -> Result<Self, ScenarioError> {
        let state = from_pairs(&json.state)?;
        if state.dim() != json.dim {
            return Err(ScenarioError::violation(
                "dimension",
                format!("dim = {}, state has {}", json.dim, state.dim()),
            ));
        }
        let events = json
            .events
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let notation = match json.name.as_str() {
                    "chsh" if k < 8 => CHSH_EVENTS[k].notation(),
                    "nc" if k < 8 => nc_notation(k),
                    _ => String::new(),
                };
                Ok(Event {
                    label: e.label.clone(),
                    notation,
                    vec: from_pairs(&e.vec)?,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let graph =
            ExclusivityGraph::from_edges(events.len(), json.edges.iter().map(|e| (e[0], e[1])))?;
        Scenario::new(json.name.clone(), state, events, graph)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let json: ScenarioJson = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_json(&json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exgraph::{circular_distance, independence_number};
    use crate::numerics::{fidelity, gram_deviation};

    const P_CHSH: f64 = (2.0 + SQRT_2) / 8.0;
    const P_NC: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn chsh_probabilities_are_uniform() {
        let s = build_chsh_scenario();
        let p00 = probability(&s.state, &StateVector::basis(4, 0)).unwrap();
        assert!((p00 - 0.4267).abs() < 1e-4);
        for p in s.event_probabilities().unwrap() {
            assert!((p - P_CHSH).abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_orthogonality_follows_circular_distance() {
        let s = build_chsh_scenario();
        for i in 0..8 {
            for j in (i + 1)..8 {
                let ov = inner_product(&s.events[i].vec, &s.events[j].vec)
                    .unwrap()
                    .norm();
                let d = circular_distance(i, j, 8);
                assert_eq!(ov < 1e-12, d == 3 || d == 4, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn nc_event_values() {
        let s = build_nc_scenario();
        let p3 = probability(&s.state, &s.events[3].vec).unwrap();
        assert!((p3 - 0.2929).abs() < 5e-5);
        let v0v3 = inner_product(&s.events[0].vec, &s.events[3].vec).unwrap();
        assert!((v0v3.re - (2.0 - SQRT_2)).abs() < 1e-15);
        assert_eq!(
            inner_product(&s.events[0].vec, &s.events[1].vec)
                .unwrap()
                .norm(),
            0.0
        );
        for p in s.event_probabilities().unwrap() {
            assert!((p - P_NC).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_norms() {
        // (2-√2)^2 + (√2-1) + (3√2-4) = 1
        let lhs = (2.0 - SQRT_2).powi(2) + (SQRT_2 - 1.0) + (3.0 * SQRT_2 - 4.0);
        assert!((lhs - 1.0).abs() < 1e-12);
        for v in nc_event_components() {
            let n: f64 = v.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert!((nc_state().norm() - 1.0).abs() < 1e-12);
        assert!((chsh_state().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sums_and_maxima() {
        let chsh = build_chsh_scenario();
        let nc = build_nc_scenario();
        assert!((sum_value(&chsh).unwrap() - (2.0 + SQRT_2)).abs() < 1e-12);
        assert!((sum_value(&nc).unwrap() - (8.0 - 4.0 * SQRT_2)).abs() < 1e-12);

        let (smax, psi) = quantum_max(&chsh).unwrap();
        assert!((smax - (2.0 + SQRT_2)).abs() < 1e-9);
        assert!(fidelity(&psi, &chsh.state).unwrap() >= 1.0 - 1e-9);
        let (rmax, phi) = quantum_max(&nc).unwrap();
        assert!((rmax - (8.0 - 4.0 * SQRT_2)).abs() < 1e-9);
        assert!(fidelity(&phi, &nc.state).unwrap() >= 1.0 - 1e-9);
        assert!((smax * rmax - 8.0).abs() < 1e-8);
    }

    #[test]
    fn single_event_maximum() {
        let v = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let s = Scenario::new(
            "one",
            StateVector::basis(2, 0),
            vec![Event {
                label: "e".into(),
                notation: String::new(),
                vec: v.clone(),
            }],
            ExclusivityGraph::empty(1).unwrap(),
        )
        .unwrap();
        let (lambda, opt) = quantum_max(&s).unwrap();
        assert!((lambda - 1.0).abs() < 1e-12);
        assert!((fidelity(&opt, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_state_gives_zero_sum() {
        let ev = |k| Event {
            label: format!("e{k}"),
            notation: String::new(),
            vec: StateVector::basis(3, k),
        };
        let s = Scenario::new(
            "zero",
            StateVector::basis(3, 2),
            vec![ev(0), ev(1)],
            ExclusivityGraph::from_edges(2, [(0, 1)]).unwrap(),
        )
        .unwrap();
        assert_eq!(sum_value(&s).unwrap(), 0.0);
    }

    #[test]
    fn nchv_bounds_are_independence_numbers() {
        assert_eq!(
            independence_number(&build_chsh_scenario().graph).unwrap(),
            3
        );
        assert_eq!(independence_number(&build_nc_scenario().graph).unwrap(), 2);
    }

    #[test]
    fn identity_check_at_optimum_and_product_state() {
        let (s, alt) = chsh_identity_check(&chsh_state()).unwrap();
        assert!((s - (2.0 + SQRT_2)).abs() < 1e-12);
        assert!((alt - (2.0 + SQRT_2)).abs() < 1e-12);

        let prod = StateVector::basis(4, 0);
        let (s, alt) = chsh_identity_check(&prod).unwrap();
        // |00>: E00 = 1, E10 = E01 = E11 = 0, so C = 1 and S = 2.5.
        assert!((s - 2.5).abs() < 1e-12);
        assert!((alt - 2.5).abs() < 1e-12);
        assert!(chsh_identity_check(&StateVector::basis(5, 0)).is_err());
    }

    #[test]
    fn exclusivity_table_entries() {
        let chsh = exclusivity_table(&build_chsh_scenario()).unwrap();
        assert!((chsh[0][0] - 1.0).abs() < 1e-12);
        assert!(chsh[4][0] < 1e-12);
        let nc = exclusivity_table(&build_nc_scenario()).unwrap();
        assert!((nc[3][0] - (2.0 - SQRT_2).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn bases_are_orthonormal() {
        let bases = measurement_bases().unwrap();
        assert_eq!(bases.len(), 8);
        for b in &bases {
            assert!(
                gram_deviation(&b.vectors()).unwrap() < 1e-12,
                "basis {}",
                b.label
            );
        }
        let ii = &bases[1];
        assert_eq!(ii.events, [0, 1, 2]);
        assert_eq!(
            ii.completion,
            vec![StateVector::basis(5, 3), StateVector::basis(5, 4)]
        );
        assert_eq!(bases[0].events, [0, 6, 7]);
        assert_eq!(basis_for_event(&bases, 5).unwrap().label, "III");
    }

    #[test]
    fn notation_matches_tables() {
        let chsh = build_chsh_scenario();
        assert_eq!(chsh.events[2].notation, "1,-1|1,1");
        assert_eq!(nc_notation(0), "0,0,1|6,7,0");
        assert_eq!(nc_notation(3), "0,0,1|1,2,3");
    }

    #[test]
    fn json_round_trip_is_exact() {
        for s in [build_chsh_scenario(), build_nc_scenario()] {
            let back = Scenario::from_json_str(&s.to_json_string()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn json_load_revalidates() {
        let mut json = build_chsh_scenario().to_json();
        json.state[0][0] *= 1.1;
        assert_eq!(
            Scenario::from_json(&json).unwrap_err().check_name(),
            Some("state norm")
        );

        let mut json = build_chsh_scenario().to_json();
        json.edges.remove(0);
        assert_eq!(
            Scenario::from_json(&json).unwrap_err().check_name(),
            Some("non-edge overlap")
        );

        let err = Scenario::from_json_str("{\n \"name\": 3 }").unwrap_err();
        assert!(
            matches!(err, ScenarioError::Parse { line: 2, .. }),
            "{err:?}"
        );
    }
}

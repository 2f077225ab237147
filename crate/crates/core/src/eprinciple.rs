//! Merging the two experiments: the sixteen index maps, the exclusivity
//! sums `W_k`, the product bound `S·R ≤ 8` and the bounds it induces.

use std::io;

use serde::Serialize;
use thiserror::Error;

use crate::exgraph::{circular_distance, is_clique, product_index, ExclusivityGraph};

const N: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EPrincipleError {
    #[error("probability {value} at index {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("expected a 64-vertex product graph, got {0} vertices")]
    GraphShapeMismatch(usize),
    #[error("input must be positive, got {0}")]
    NonPositiveInput(f64),
    #[error("merge map parameters out of range: k = {k}, m = {m}")]
    BadParameters { k: usize, m: usize },
    #[error("index map {0:?} is not a distance-preserving bijection of Z_8")]
    NotDistancePreserving(Vec<usize>),
    #[error("csv output failed: {0}")]
    Csv(String),
}

/// `σ(i) = ((-1)^m · i + k) mod 8`: rotate by `k` steps, optionally after
/// reflecting about the axis through 0 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MergeMap {
    k: usize,
    m: usize,
}

impl MergeMap {
    pub fn new(k: usize, m: usize) -> Result<Self, EPrincipleError> {
        if k >= N || m > 1 {
            return Err(EPrincipleError::BadParameters { k, m });
        }
        Ok(Self { k, m })
    }

    /// Recovers the map from an explicit permutation, rejecting anything that
    /// is not one of the sixteen dihedral maps.
    pub fn from_permutation(perm: &[usize]) -> Result<Self, EPrincipleError> {
        let reject = || EPrincipleError::NotDistancePreserving(perm.to_vec());
        if perm.len() != N || perm.iter().any(|&p| p >= N) {
            return Err(reject());
        }
        let k = perm[0];
        let m = if perm[1] == (k + 1) % N { 0 } else { 1 };
        let map = Self { k, m };
        if map.sigma() == perm {
            Ok(map)
        } else {
            Err(reject())
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn apply(&self, i: usize) -> usize {
        let i = i % N;
        let reflected = if self.m == 1 { (N - i) % N } else { i };
        (reflected + self.k) % N
    }

    pub fn sigma(&self) -> [usize; N] {
        std::array::from_fn(|i| self.apply(i))
    }

    /// The eight global events `(i, σ(i))` as vertices of the 64-vertex product.
    pub fn global_events(&self) -> [usize; N] {
        std::array::from_fn(|i| product_index(i, self.apply(i), N))
    }
}

/// The sixteen maps in result-table order: `W_1..W_8` are rotations
/// `k = 0..7`, `W_9..W_16` the reflected maps `k = 0..7`.
pub fn all_merge_maps() -> Vec<MergeMap> {
    (0..2)
        .flat_map(|m| (0..N).map(move |k| MergeMap { k, m }))
        .collect()
}

fn check_probabilities(p: &[f64; N]) -> Result<(), EPrincipleError> {
    match p.iter().position(|x| !(0.0..=1.0).contains(x)) {
        Some(index) => Err(EPrincipleError::ProbabilityOutOfRange {
            index,
            value: p[index],
        }),
        None => Ok(()),
    }
}

/// `Σ_i pS[i] · pR[σ(i)]`.
pub fn w_value(map: &MergeMap, ps: &[f64; N], pr: &[f64; N]) -> Result<f64, EPrincipleError> {
    check_probabilities(ps)?;
    check_probabilities(pr)?;
    Ok((0..N).map(|i| ps[i] * pr[map.apply(i)]).sum())
}

/// True iff the map's eight global events are pairwise exclusive in `product`.
pub fn clique_certificate(
    map: &MergeMap,
    product: &ExclusivityGraph,
) -> Result<bool, EPrincipleError> {
    if product.n() != N * N {
        return Err(EPrincipleError::GraphShapeMismatch(product.n()));
    }
    Ok(is_clique(product, &map.global_events()).expect("indices below 64"))
}

/// A value with a one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    pub uncertainty: f64,
}

impl Measured {
    pub const fn new(value: f64, uncertainty: f64) -> Self {
        Self { value, uncertainty }
    }

    pub const fn exact(value: f64) -> Self {
        Self {
            value,
            uncertainty: 0.0,
        }
    }
}

/// One evaluated exclusivity sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WReport {
    /// 1-based index, `W_1..W_16`.
    pub index: usize,
    pub sigma: [usize; N],
    pub value: f64,
    pub uncertainty: f64,
    /// Set when `value > 1 + 3 · uncertainty`.
    pub exceeds_bound: bool,
}

/// Evaluates one `W` with uncorrelated first-order error propagation,
/// `δW² = Σ_i (pR[σi] δpS[i])² + (pS[i] δpR[σi])²`.
pub fn w_report(
    index: usize,
    map: &MergeMap,
    ps: &[Measured; N],
    pr: &[Measured; N],
) -> Result<WReport, EPrincipleError> {
    let values = |p: &[Measured; N]| std::array::from_fn::<f64, N, _>(|i| p[i].value);
    let value = w_value(map, &values(ps), &values(pr))?;
    let variance: f64 = (0..N)
        .map(|i| {
            let j = map.apply(i);
            (pr[j].value * ps[i].uncertainty).powi(2) + (ps[i].value * pr[j].uncertainty).powi(2)
        })
        .sum();
    let uncertainty = variance.sqrt();
    Ok(WReport {
        index,
        sigma: map.sigma(),
        value,
        uncertainty,
        exceeds_bound: value > 1.0 + 3.0 * uncertainty,
    })
}

/// All sixteen reports in table order.
pub fn w_reports(ps: &[Measured; N], pr: &[Measured; N]) -> Result<Vec<WReport>, EPrincipleError> {
    all_merge_maps()
        .iter()
        .enumerate()
        .map(|(k, map)| w_report(k + 1, map, ps, pr))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductBound {
    pub s: f64,
    pub r: f64,
    pub product: f64,
    /// `Σ_k W_k` over all sixteen maps; always `2 · S · R`.
    pub w_sum: f64,
}

/// `(S, R, S·R)`; summing the sixteen `W_k ≤ 1` and halving gives `S·R ≤ 8`.
pub fn product_bound(ps: &[f64; N], pr: &[f64; N]) -> Result<ProductBound, EPrincipleError> {
    let w_sum = all_merge_maps()
        .iter()
        .map(|m| w_value(m, ps, pr))
        .sum::<Result<f64, _>>()?;
    let s: f64 = ps.iter().sum();
    let r: f64 = pr.iter().sum();
    debug_assert!(
        (w_sum - 2.0 * s * r).abs() <= 1e-9,
        "every target index is hit twice"
    );
    Ok(ProductBound {
        s,
        r,
        product: s * r,
        w_sum,
    })
}

/// `8 / x` with `δ(8/x) = 8 δx / x²`.
pub fn inverse_bound(x: Measured) -> Result<Measured, EPrincipleError> {
    if x.value.is_nan() || x.value <= 0.0 {
        return Err(EPrincipleError::NonPositiveInput(x.value));
    }
    Ok(Measured::new(
        8.0 / x.value,
        8.0 * x.uncertainty / (x.value * x.value),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossBounds {
    /// Upper bound on `R` implied by the measured `S`.
    pub r_bound: Measured,
    /// Upper bound on `S` implied by the measured `R`.
    pub s_bound: Measured,
}

pub fn cross_bounds(s_exp: Measured, r_exp: Measured) -> Result<CrossBounds, EPrincipleError> {
    Ok(CrossBounds {
        r_bound: inverse_bound(s_exp)?,
        s_bound: inverse_bound(r_exp)?,
    })
}

/// Bounds obtained earlier from two copies of a single scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceBounds {
    /// `3√3/2`.
    pub r_two_copies: f64,
    /// The decimal printed next to `3√3/2`, which does not equal it.
    pub r_two_copies_printed: f64,
    /// `8/√5`.
    pub s_two_copies: f64,
}

pub fn reference_bounds() -> ReferenceBounds {
    ReferenceBounds {
        r_two_copies: 1.5 * 3f64.sqrt(),
        r_two_copies_printed: crate::measured::EARLIER_R_BOUND_PRINTED,
        s_two_copies: 8.0 / 5f64.sqrt(),
    }
}

/// Writes reports as CSV: `index, s0..s7, value, uncertainty`.
pub fn write_w_reports_csv<W: io::Write>(
    reports: &[WReport],
    out: W,
) -> Result<(), EPrincipleError> {
    let err = |e: csv::Error| EPrincipleError::Csv(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string()];
    header.extend((0..N).map(|i| format!("s{i}")));
    header.extend(["value".to_string(), "uncertainty".to_string()]);
    w.write_record(&header).map_err(err)?;
    for r in reports {
        let mut row = vec![r.index.to_string()];
        row.extend(r.sigma.iter().map(|s| s.to_string()));
        row.push(r.value.to_string());
        row.push(r.uncertainty.to_string());
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| EPrincipleError::Csv(e.to_string()))
}

/// True iff `σ` preserves circular distance on `Z_8`.
pub fn preserves_distance(map: &MergeMap) -> bool {
    (0..N).all(|i| {
        (0..N)
            .all(|j| circular_distance(map.apply(i), map.apply(j), N) == circular_distance(i, j, N))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exgraph::disjunctive_product;
    use crate::measured;
    use crate::scenario::{chsh_graph, nc_graph};
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    const PS: f64 = (2.0 + SQRT_2) / 8.0;
    const PR: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn map_table() {
        let maps = all_merge_maps();
        assert_eq!(maps.len(), 16);
        assert_eq!(maps[0].sigma(), [0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(maps[1].sigma(), [1, 2, 3, 4, 5, 6, 7, 0]);
        assert_eq!(maps[8].sigma(), [0, 7, 6, 5, 4, 3, 2, 1]);
        assert_eq!(maps[9].sigma(), [1, 0, 7, 6, 5, 4, 3, 2]);
        assert_eq!(maps[15].sigma(), [7, 6, 5, 4, 3, 2, 1, 0]);
        for m in &maps {
            assert!(preserves_distance(m));
            let mut s = m.sigma();
            s.sort_unstable();
            assert_eq!(s, [0, 1, 2, 3, 4, 5, 6, 7]);
        }
    }

    #[test]
    fn permutation_round_trip_and_rejection() {
        for m in all_merge_maps() {
            assert_eq!(MergeMap::from_permutation(&m.sigma()).unwrap(), m);
        }
        assert!(MergeMap::from_permutation(&[0; 8]).is_err());
        assert!(MergeMap::from_permutation(&[0, 2, 1, 3, 4, 5, 6, 7]).is_err());
        assert!(MergeMap::new(8, 0).is_err());
        assert!(MergeMap::new(0, 2).is_err());
    }

    #[test]
    fn ideal_values_saturate() {
        assert!((PS * PR - 0.125).abs() < 1e-15);
        for m in all_merge_maps() {
            assert!((w_value(&m, &[PS; 8], &[PR; 8]).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            w_value(&all_merge_maps()[0], &[PS; 8], &[0.0; 8]).unwrap(),
            0.0
        );
    }

    #[test]
    fn out_of_range_probability() {
        let mut p = [0.5; 8];
        p[3] = 1.2;
        assert_eq!(
            w_value(&all_merge_maps()[0], &p, &[0.5; 8]),
            Err(EPrincipleError::ProbabilityOutOfRange {
                index: 3,
                value: 1.2
            })
        );
    }

    #[test]
    fn measured_w1() {
        let ps = measured::CHSH_PROBABILITIES.map(|(v, e)| Measured::new(v, e));
        let pr = measured::NC_PROBABILITIES.map(|(v, e)| Measured::new(v, e));
        let reports = w_reports(&ps, &pr).unwrap();
        // Printed inputs are rounded; W_1 comes out 0.99649 against a printed 0.997.
        assert!(
            (reports[0].value - 0.997).abs() < 1e-3,
            "{}",
            reports[0].value
        );
        for (r, printed) in reports.iter().zip(measured::W_VALUES) {
            assert!(
                (r.value - printed).abs() < 1.5e-3,
                "W{}: {} vs {printed}",
                r.index,
                r.value
            );
            assert!(!r.exceeds_bound);
        }
    }

    #[test]
    fn product_of_quantum_maxima() {
        let b = product_bound(&[PS; 8], &[PR; 8]).unwrap();
        assert!((b.product - 8.0).abs() < 1e-9);
        let ps = measured::CHSH_PROBABILITIES.map(|p| p.0);
        let pr = measured::NC_PROBABILITIES.map(|p| p.0);
        let b = product_bound(&ps, &pr).unwrap();
        assert!((b.product - 7.971).abs() < 1e-3, "{}", b.product);
        let b = product_bound(&[PS; 8], &[0.0; 8]).unwrap();
        assert_eq!((b.r, b.product), (0.0, 0.0));
    }

    #[test]
    fn measured_cross_bounds() {
        let cb = cross_bounds(Measured::new(3.413, 0.013), Measured::new(2.335, 0.011)).unwrap();
        assert_eq!(
            format!("{:.3} {:.3}", cb.r_bound.value, cb.r_bound.uncertainty),
            "2.344 0.009"
        );
        assert_eq!(
            format!("{:.3} {:.3}", cb.s_bound.value, cb.s_bound.uncertainty),
            "3.426 0.016"
        );
        let one = inverse_bound(Measured::exact(8.0)).unwrap();
        assert_eq!(one, Measured::exact(1.0));
        assert_eq!(
            inverse_bound(Measured::exact(0.0)),
            Err(EPrincipleError::NonPositiveInput(0.0))
        );
    }

    #[test]
    fn cross_bounds_are_monotone() {
        let grid: Vec<f64> = (1..=40).map(|k| 0.25 * k as f64).collect();
        for w in grid.windows(2) {
            let a = inverse_bound(Measured::new(w[0], 0.01)).unwrap();
            let b = inverse_bound(Measured::new(w[1], 0.01)).unwrap();
            assert!(b.value < a.value);
            assert!(b.uncertainty < a.uncertainty);
        }
    }

    #[test]
    fn earlier_bounds() {
        let r = reference_bounds();
        assert_eq!(format!("{:.4}", r.s_two_copies), "3.5777");
        assert_eq!(format!("{:.4}", r.r_two_copies), "2.5981");
        assert!(r.r_two_copies > 2.344 && r.s_two_copies > 3.426);
    }

    #[test]
    fn every_map_is_a_product_clique() {
        let product = disjunctive_product(&chsh_graph(), &nc_graph()).unwrap();
        for m in all_merge_maps() {
            assert!(clique_certificate(&m, &product).unwrap());
        }
        assert_eq!(
            clique_certificate(&all_merge_maps()[0], &chsh_graph()),
            Err(EPrincipleError::GraphShapeMismatch(8))
        );
    }

    #[test]
    fn csv_layout() {
        let reports = w_reports(&[Measured::exact(PS); 8], &[Measured::exact(PR); 8]).unwrap();
        let mut buf = Vec::new();
        write_w_reports_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[0], "index,s0,s1,s2,s3,s4,s5,s6,s7,value,uncertainty");
        assert!(lines[9].starts_with("9,0,7,6,5,4,3,2,1,"));
    }

    proptest! {
        #[test]
        fn w_sum_is_twice_the_product(
            ps in prop::array::uniform8(0.0f64..=1.0),
            pr in prop::array::uniform8(0.0f64..=1.0),
        ) {
            let b = product_bound(&ps, &pr).unwrap();
            prop_assert!((b.w_sum - 2.0 * b.s * b.r).abs() <= 1e-9);
        }
    }
}

//! Sampled maps from a fiber to a finite metric space, checked against the map-space conditions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::decomposition::{all_regions, region_contains, region_distance, Region};
use super::fiber::FiberPoint;
use super::{in_compact_subset, CompactnessParams, CurveError, ModuliPoint};
use crate::metric_nets::FiniteMetricSpace;
use crate::scalar::Scalar;
use crate::trees::Marking;

/// Samples (q, f(q)) of a map on one fiber, with optional end energies E(f, R_e).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMap<T> {
    pub samples: Vec<(FiberPoint<T>, usize)>,
    pub region_energy: Option<BTreeMap<Region, T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum ConditionStatus {
    Pass,
    /// No sampled pair violates the condition; samples cannot prove it.
    NotRefuted,
    Fail(String),
    Unchecked(String),
}

impl ConditionStatus {
    pub fn failed(&self) -> bool {
        matches!(self, ConditionStatus::Fail(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub compact: ConditionStatus,
    pub image: ConditionStatus,
    pub lipschitz: ConditionStatus,
    pub energy: ConditionStatus,
    /// Region of the first sampled Lipschitz violation.
    pub rejected_region: Option<Region>,
    /// Largest observed d_X(f q, f q') / (Λ_w λ₀ dist_w(q, q')) over sampled pairs.
    pub worst_lipschitz_ratio: f64,
}

impl MembershipVerdict {
    pub fn rejected(&self) -> bool {
        [&self.compact, &self.image, &self.lipschitz, &self.energy].iter().any(|c| c.failed())
    }
}

#[allow(clippy::too_many_arguments)]
pub fn check_map_membership<T: Scalar>(
    p: &ModuliPoint<T>,
    c: &CompactnessParams<T>,
    map: &SampledMap<T>,
    target: &FiniteMetricSpace<T>,
    k: &BTreeSet<usize>,
    eta: T,
    lambda: &BTreeMap<Region, T>,
    lambda0: T,
    marking: &Marking,
) -> Result<MembershipVerdict, CurveError> {
    let t = p.tree();
    for (q, x) in &map.samples {
        if *x >= target.len() {
            return Err(CurveError::UnknownTarget(*x));
        }
        if q.coords.len() != t.n_vertices() {
            return Err(CurveError::WrongLength { got: q.coords.len(), expected: t.n_vertices() });
        }
        let r = q.residual(p);
        if r > T::loose() {
            return Err(CurveError::NotOnFiber(r.as_f64()));
        }
    }

    let report = in_compact_subset(p, c)?;
    let compact = match report.first() {
        None => ConditionStatus::Pass,
        Some(v) => ConditionStatus::Fail(format!("{v:?}")),
    };

    let image = match map.samples.iter().position(|(_, x)| !k.contains(x)) {
        None => ConditionStatus::Pass,
        Some(i) => ConditionStatus::Fail(format!("sample {i} maps to {} outside K", map.samples[i].1)),
    };

    let mut lipschitz = ConditionStatus::NotRefuted;
    let mut rejected_region = None;
    let mut worst = 0.0f64;
    for region in all_regions(t) {
        let mut inside = Vec::new();
        for (i, (q, _)) in map.samples.iter().enumerate() {
            if region_contains(p, region, q)? {
                inside.push(i);
            }
        }
        if inside.len() < 2 {
            continue;
        }
        let cap = *lambda.get(&region).ok_or_else(|| CurveError::MissingLipschitz(region.to_string()))? * lambda0;
        for (a, &i) in inside.iter().enumerate() {
            for &j in &inside[a + 1..] {
                let (qi, xi) = &map.samples[i];
                let (qj, xj) = &map.samples[j];
                let dx = target.d(*xi, *xj);
                let dq = region_distance(p, region, qi, qj)?;
                let ratio = if dx == T::zero() {
                    0.0
                } else if dq == T::zero() {
                    f64::INFINITY
                } else {
                    (dx / (cap * dq)).as_f64()
                };
                worst = worst.max(ratio);
                if ratio > 1.0 + T::slack().as_f64() && rejected_region.is_none() {
                    rejected_region = Some(region);
                    lipschitz = ConditionStatus::Fail(format!(
                        "{region}: samples {i}, {j} have d_X = {dx} > {cap} * {dq}",
                    ));
                }
            }
        }
    }

    let required: Vec<usize> = t.tree().half_edges().filter(|&e| !marking.contains(e)).collect();
    let floor = (eta * lambda0) * (eta * lambda0);
    let energy = match &map.region_energy {
        None => ConditionStatus::Unchecked("no energies supplied".into()),
        Some(energies) => {
            let mut status = ConditionStatus::Pass;
            for &e in &required {
                match energies.get(&Region::End(e)) {
                    None => {
                        status = ConditionStatus::Unchecked(format!("no energy for end e{e}"));
                        break;
                    }
                    Some(&en) if en < floor => {
                        status = ConditionStatus::Fail(format!("E(f, end e{e}) = {en} < {floor}"));
                        break;
                    }
                    Some(_) => {}
                }
            }
            status
        }
    };

    Ok(MembershipVerdict { compact, image, lipschitz, energy, rejected_region, worst_lipschitz_ratio: worst })
}

//! Contact-stage energy: distance, interpenetration, self-penetration, and
//! parameter-supervision terms with analytic gradients over the 51 hand pose
//! parameters. The object stays frozen; only the hand moves.
//!
//! Each term is normalized by its point or pair count so the weights stay
//! meaningful across sampling budgets.

use nalgebra::Point3;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{farthest_point_sample, PointSample, SampleSource, SdfIndex};
use crate::hand::{ContactDesignation, HandParams, HandRig, PoseJacobian, JOINT_POSE_DIM, POSE_PARAM_DIM};
use crate::optim::{Adam, AdamConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weights, thresholds, iteration budget, and ablation switches.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ContactConfig {
    pub lambda_pen: f64,
    pub lambda_spen: f64,
    pub lambda_sup: f64,
    /// Self-penetration threshold δ in meters.
    pub delta: f64,
    pub iterations: usize,
    pub lr_translate: f64,
    pub lr_rotation: f64,
    /// Learning rate of the 45 joint axis-angle parameters.
    pub lr_axis: f64,
    pub enable_dis: bool,
    pub enable_pen: bool,
    pub enable_spen: bool,
    pub enable_sup: bool,
    /// Evaluate the interpenetration term over all hand surface samples
    /// instead of the contact points only.
    pub pen_over_hand_samples: bool,
    pub hand_surface_samples: usize,
    pub surface_sample_seed: u64,
    pub adam: AdamConfig,
}

impl Default for ContactConfig {
    fn default() -> Self {
        ContactConfig {
            lambda_pen: 1.0,
            lambda_spen: 0.75,
            lambda_sup: 0.3,
            delta: 0.01,
            iterations: 2000,
            lr_translate: 1e-4,
            lr_rotation: 1e-3,
            lr_axis: 8e-4,
            enable_dis: true,
            enable_pen: true,
            enable_spen: true,
            enable_sup: true,
            pen_over_hand_samples: false,
            hand_surface_samples: 512,
            surface_sample_seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

impl ContactConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_pen < 0.0 || self.lambda_spen < 0.0 || self.lambda_sup < 0.0 {
            return Err(Error::InvalidParams("term weights must be nonnegative".into()));
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidParams("delta must be positive".into()));
        }
        if self.lr_translate <= 0.0 || self.lr_rotation <= 0.0 || self.lr_axis <= 0.0 {
            return Err(Error::InvalidParams("learning rates must be positive".into()));
        }
        Ok(())
    }
}

/// Per-iteration energy values. Disabled terms still log their value but
/// contribute zero weight to `total`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub iteration: usize,
    pub l_dis: f64,
    pub l_pen: f64,
    pub l_spen: f64,
    pub l_sup: f64,
    pub total: f64,
}

/// Mean |SDF| over the contact points.
pub fn loss_dis(contacts: &[PointSample], sdf: &SdfIndex) -> Result<f64> {
    if contacts.is_empty() {
        return Err(Error::EmptyContactSet);
    }
    let sum: f64 = contacts
        .iter()
        .map(|c| sdf.signed(&c.position).map(|r| r.value.abs()))
        .sum::<Result<f64>>()?;
    Ok(sum / contacts.len() as f64)
}

/// Mean −min(SDF, 0): zero whenever nothing penetrates.
pub fn loss_pen(points: &[PointSample], sdf: &SdfIndex) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidParams("loss_pen needs points".into()));
    }
    let sum: f64 = points
        .iter()
        .map(|c| sdf.signed(&c.position).map(|r| -r.value.min(0.0)))
        .sum::<Result<f64>>()?;
    Ok(sum / points.len() as f64)
}

/// Euclidean norm ‖θ̂ − θ‖ over the 45 articulation parameters.
pub fn loss_sup(current: &[f64], reference: &[f64]) -> Result<f64> {
    if current.len() != JOINT_POSE_DIM || reference.len() != JOINT_POSE_DIM {
        return Err(Error::InvalidParams(format!(
            "supervision needs {JOINT_POSE_DIM}-dim vectors"
        )));
    }
    Ok(current
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// A surface sample carried in rest-pose barycentric coordinates plus its
/// skinning-dominant segment for exemption tests.
#[derive(Debug, Clone, Copy)]
pub struct SpenSample {
    pub tri: u32,
    pub bary: [f64; 3],
    pub segment: usize,
}

/// Self-penetration evaluator over a fixed sample set.
///
/// Pairs within the same segment, in parent-child segments, or in sibling
/// segments are exempt; the pairwise hinge sum is normalized by the count of
/// non-exempt ordered pairs.
pub struct SpenEngine {
    pub samples: Vec<SpenSample>,
    exempt: Vec<bool>, // n·n matrix, row-major
    ordered_pair_count: usize,
    delta: f64,
}

impl SpenEngine {
    pub fn new(samples: Vec<SpenSample>, parents: &[Option<u8>], delta: f64) -> Self {
        let n = samples.len();
        let exempt_pair = |a: usize, b: usize| -> bool {
            if a == b {
                return true;
            }
            let pa = parents[a].map(|p| p as usize);
            let pb = parents[b].map(|p| p as usize);
            pa == Some(b) || pb == Some(a) || (pa.is_some() && pa == pb)
        };
        let mut exempt = vec![false; n * n];
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                let e = i == j || exempt_pair(samples[i].segment, samples[j].segment);
                exempt[i * n + j] = e;
                if !e {
                    count += 1;
                }
            }
        }
        SpenEngine {
            samples,
            exempt,
            ordered_pair_count: count,
            delta,
        }
    }

    pub fn ordered_pair_count(&self) -> usize {
        self.ordered_pair_count
    }

    /// Hinge loss and the active (non-exempt, closer than δ) unordered pairs.
    pub fn eval(&self, positions: &[Point3<f64>]) -> (f64, Vec<(usize, usize, f64)>) {
        let n = positions.len();
        debug_assert_eq!(n, self.samples.len());
        if self.ordered_pair_count == 0 {
            return (0.0, Vec::new());
        }
        // Spatial hash at cell size δ: candidate pairs differ by at most one
        // cell per axis.
        let inv = 1.0 / self.delta;
        let key = |p: &Point3<f64>| -> (i64, i64, i64) {
            (
                (p.x * inv).floor() as i64,
                (p.y * inv).floor() as i64,
                (p.z * inv).floor() as i64,
            )
        };
        let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in positions.iter().enumerate() {
            cells.entry(key(p)).or_default().push(i as u32);
        }
        let mut sum = 0.0;
        let mut active = Vec::new();
        for (i, p) in positions.iter().enumerate() {
            let (cx, cy, cz) = key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(bucket) = cells.get(&(cx + dx, cy + dy, cz + dz)) else {
                            continue;
                        };
                        for &jj in bucket {
                            let j = jj as usize;
                            if j <= i || self.exempt[i * n + j] {
                                continue;
                            }
                            let d = (positions[i] - positions[j]).norm();
                            if d < self.delta {
                                // Both ordered directions contribute.
                                sum += 2.0 * (self.delta - d);
                                active.push((i, j, d));
                            }
                        }
                    }
                }
            }
        }
        (sum / self.ordered_pair_count as f64, active)
    }
}

/// Standalone self-penetration loss over posed samples.
pub fn loss_spen(
    positions: &[Point3<f64>],
    samples: &[SpenSample],
    parents: &[Option<u8>],
    delta: f64,
) -> f64 {
    let engine = SpenEngine::new(samples.to_vec(), parents, delta);
    engine.eval(positions).0
}

/// Per-term gradients over the 51 pose parameters.
#[derive(Debug, Clone)]
pub struct TermGradients {
    pub dis: Vec<f64>,
    pub pen: Vec<f64>,
    pub spen: Vec<f64>,
    pub sup: Vec<f64>,
    /// Weighted sum respecting the enable flags.
    pub total: Vec<f64>,
}

/// Bound energy evaluator: rig + designation + object SDF + reference pose.
pub struct EnergyModel<'a> {
    pub rig: &'a HandRig,
    pub object_sdf: &'a SdfIndex,
    pub contact_ids: Vec<u32>,
    pub reference_theta: Vec<f64>,
    pub spen: SpenEngine,
    pub cfg: ContactConfig,
    parents: Vec<Option<u8>>,
}

impl<'a> EnergyModel<'a> {
    pub fn new(
        rig: &'a HandRig,
        designation: &ContactDesignation,
        object_sdf: &'a SdfIndex,
        reference_theta: Vec<f64>,
        cfg: ContactConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if reference_theta.len() != JOINT_POSE_DIM {
            return Err(Error::InvalidParams(
                "reference articulation must have 45 entries".into(),
            ));
        }
        let contact_ids = designation.resolve(rig)?;
        let parents: Vec<Option<u8>> = rig.joints.iter().map(|j| j.parent).collect();

        // Surface samples drawn once in rest pose and carried by barycentric
        // coordinates for stable correspondence.
        let raw = farthest_point_sample(
            &rig.rest_mesh,
            cfg.hand_surface_samples,
            cfg.surface_sample_seed,
            SampleSource::HandSurface,
        )?;
        let samples: Vec<SpenSample> = raw
            .iter()
            .map(|s| {
                let tri = s.tri.expect("surface samples carry triangles");
                let bary = s.bary.expect("surface samples carry barycentrics");
                SpenSample {
                    tri,
                    bary,
                    segment: dominant_segment(rig, tri, &bary),
                }
            })
            .collect();
        let spen = SpenEngine::new(samples, &parents, cfg.delta);

        Ok(EnergyModel {
            rig,
            object_sdf,
            contact_ids,
            reference_theta,
            spen,
            cfg,
            parents,
        })
    }

    /// Term values at `params`.
    pub fn breakdown(&self, params: &HandParams, iteration: usize) -> Result<EnergyBreakdown> {
        let (b, _) = self.eval_inner(params, iteration, false)?;
        Ok(b)
    }

    /// Term values and analytic gradients at `params`.
    pub fn gradients(
        &self,
        params: &HandParams,
        iteration: usize,
    ) -> Result<(EnergyBreakdown, TermGradients)> {
        let (b, g) = self.eval_inner(params, iteration, true)?;
        Ok((b, g.expect("gradients requested")))
    }

    fn eval_inner(
        &self,
        params: &HandParams,
        iteration: usize,
        want_gradients: bool,
    ) -> Result<(EnergyBreakdown, Option<TermGradients>)> {
        let cfg = &self.cfg;
        let engine = PoseJacobian::new(self.rig, params)?;

        let mut g_dis = vec![0.0; POSE_PARAM_DIM];
        let mut g_pen = vec![0.0; POSE_PARAM_DIM];
        let mut g_spen = vec![0.0; POSE_PARAM_DIM];
        let mut g_sup = vec![0.0; POSE_PARAM_DIM];

        // L_dis over contact vertices.
        let n_contacts = self.contact_ids.len() as f64;
        let mut l_dis = 0.0;
        for &vid in &self.contact_ids {
            let pos = engine.fk.posed_vertex(self.rig, vid as usize);
            let r = self.object_sdf.signed(&pos)?;
            l_dis += r.value.abs();
            if want_gradients && r.value != 0.0 {
                let cot = r.gradient * (r.value.signum() / n_contacts);
                engine.accumulate_vjp(vid as usize, &cot, &mut g_dis);
            }
        }
        l_dis /= n_contacts;

        // L_pen over the contact set (default) or the hand surface samples.
        let mut l_pen = 0.0;
        if cfg.pen_over_hand_samples {
            let n = self.spen.samples.len() as f64;
            for s in &self.spen.samples {
                let pos = engine.posed_bary(s.tri, &s.bary);
                let r = self.object_sdf.signed(&pos)?;
                if r.value < 0.0 {
                    l_pen += -r.value;
                    if want_gradients {
                        let cot = r.gradient * (-1.0 / n);
                        engine.accumulate_vjp_bary(s.tri, &s.bary, &cot, &mut g_pen);
                    }
                }
            }
            l_pen /= n;
        } else {
            for &vid in &self.contact_ids {
                let pos = engine.fk.posed_vertex(self.rig, vid as usize);
                let r = self.object_sdf.signed(&pos)?;
                if r.value < 0.0 {
                    l_pen += -r.value;
                    if want_gradients {
                        let cot = r.gradient * (-1.0 / n_contacts);
                        engine.accumulate_vjp(vid as usize, &cot, &mut g_pen);
                    }
                }
            }
            l_pen /= n_contacts;
        }

        // L_spen over posed surface samples.
        let positions: Vec<Point3<f64>> = self
            .spen
            .samples
            .iter()
            .map(|s| engine.posed_bary(s.tri, &s.bary))
            .collect();
        let (l_spen, active) = self.spen.eval(&positions);
        if want_gradients && !active.is_empty() {
            let scale = 2.0 / self.spen.ordered_pair_count() as f64;
            for &(i, j, d) in &active {
                let dir = (positions[i] - positions[j]) / d;
                let cot_i = -dir * scale;
                let cot_j = dir * scale;
                let si = self.spen.samples[i];
                let sj = self.spen.samples[j];
                engine.accumulate_vjp_bary(si.tri, &si.bary, &cot_i, &mut g_spen);
                engine.accumulate_vjp_bary(sj.tri, &sj.bary, &cot_j, &mut g_spen);
            }
        }

        // L_sup over the articulation parameters only.
        let l_sup = loss_sup(&params.joint_pose, &self.reference_theta)?;
        if want_gradients && l_sup > 1e-12 {
            for i in 0..JOINT_POSE_DIM {
                g_sup[6 + i] = (params.joint_pose[i] - self.reference_theta[i]) / l_sup;
            }
        }

        let mut total = 0.0;
        if cfg.enable_dis {
            total += l_dis;
        }
        if cfg.enable_pen {
            total += cfg.lambda_pen * l_pen;
        }
        if cfg.enable_spen {
            total += cfg.lambda_spen * l_spen;
        }
        if cfg.enable_sup {
            total += cfg.lambda_sup * l_sup;
        }

        let breakdown = EnergyBreakdown {
            iteration,
            l_dis,
            l_pen,
            l_spen,
            l_sup,
            total,
        };
        if !want_gradients {
            return Ok((breakdown, None));
        }

        let mut g_total = vec![0.0; POSE_PARAM_DIM];
        for p in 0..POSE_PARAM_DIM {
            if cfg.enable_dis {
                g_total[p] += g_dis[p];
            }
            if cfg.enable_pen {
                g_total[p] += cfg.lambda_pen * g_pen[p];
            }
            if cfg.enable_spen {
                g_total[p] += cfg.lambda_spen * g_spen[p];
            }
            if cfg.enable_sup {
                g_total[p] += cfg.lambda_sup * g_sup[p];
            }
        }
        Ok((
            breakdown,
            Some(TermGradients {
                dis: g_dis,
                pen: g_pen,
                spen: g_spen,
                sup: g_sup,
                total: g_total,
            }),
        ))
    }

    pub fn parents(&self) -> &[Option<u8>] {
        &self.parents
    }
}

/// Dominant-weight joint of a barycentric point.
pub fn dominant_segment(rig: &HandRig, tri: u32, bary: &[f64; 3]) -> usize {
    let t = rig.rest_mesh.triangles[tri as usize];
    let mut acc = [0.0f64; crate::hand::JOINT_COUNT];
    for (corner, &b) in t.iter().zip(bary.iter()) {
        for (j, w) in rig.weights[*corner as usize].iter() {
            acc[j] += b * w;
        }
    }
    acc.iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(j, _)| j)
        .unwrap_or(0)
}

/// Minimize the combined contact energy over the hand pose parameters with
/// the object frozen. Returns the lowest-energy iterate and the full trace.
pub fn refine_grasp(
    rig: &HandRig,
    initial: &HandParams,
    reference_theta: &[f64],
    designation: &ContactDesignation,
    object_sdf: &SdfIndex,
    cfg: &ContactConfig,
) -> Result<(HandParams, Vec<EnergyBreakdown>)> {
    let model = EnergyModel::new(rig, designation, object_sdf, reference_theta.to_vec(), cfg.clone())?;

    let mut params = initial.clone();
    params.validate()?;

    let mut lr = vec![0.0; POSE_PARAM_DIM];
    lr[0..3].fill(cfg.lr_rotation);
    lr[3..6].fill(cfg.lr_translate);
    lr[6..POSE_PARAM_DIM].fill(cfg.lr_axis);
    let mut adam = Adam::new(lr, cfg.adam);

    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let mut best_params = params.clone();
    let mut best_total = f64::INFINITY;

    for iteration in 0..=cfg.iterations {
        let want_step = iteration < cfg.iterations;
        let (breakdown, grads) = if want_step {
            let (b, g) = model.gradients(&params, iteration)?;
            (b, Some(g))
        } else {
            (model.breakdown(&params, iteration)?, None)
        };
        if !breakdown.total.is_finite() {
            return Err(Error::DivergedOptimization(format!(
                "non-finite energy at iteration {iteration}"
            )));
        }
        if breakdown.total < best_total {
            best_total = breakdown.total;
            best_params = params.clone();
        }
        trace.push(breakdown);

        if let Some(g) = grads {
            let mut flat = flatten_params(&params);
            adam.step(&mut flat, &g.total);
            unflatten_params(&flat, &mut params);
        }
    }

    Ok((best_params, trace))
}

fn flatten_params(p: &HandParams) -> Vec<f64> {
    let mut flat = Vec::with_capacity(POSE_PARAM_DIM);
    flat.extend_from_slice(&p.global_pose[0..3]);
    flat.extend_from_slice(&p.global_pose[3..6]);
    flat.extend_from_slice(&p.joint_pose);
    flat
}

fn unflatten_params(flat: &[f64], p: &mut HandParams) {
    p.global_pose.copy_from_slice(&flat[0..6]);
    p.joint_pose.copy_from_slice(&flat[6..POSE_PARAM_DIM]);
}

/// Verification helper: compare analytic per-term gradients
/// against central finite differences on `configs` random hand poses.
/// Returns descriptions of any term whose gradient-vector relative error
/// exceeds 1e-3.
pub fn fd_gradient_check(
    model: &EnergyModel,
    rig: &HandRig,
    object: &SdfIndex,
    configs: usize,
    seed: u64,
) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    let mut failures = Vec::new();
    let mut checked = 0;
    'outer: while checked < configs {
        let mut params = HandParams::default();
        for g in params.global_pose.iter_mut() {
            *g = rng.gen_range(-0.15..0.15);
        }
        for j in params.joint_pose.iter_mut() {
            *j = rng.gen_range(-0.5..0.5);
        }
        // Central differences are only meaningful when no contact point
        // or sample pair crosses an |SDF| / hinge kink inside the FD
        // step; resample configurations that straddle one.
        let engine = PoseJacobian::new(rig, &params).unwrap();
        for &vid in &model.contact_ids {
            let pos = engine.fk.posed_vertex(rig, vid as usize);
            if object.signed(&pos).unwrap().value.abs() < 1e-5 {
                eprintln!("reject: contact near kink");
                continue 'outer;
            }
        }
        let positions: Vec<Point3<f64>> = model
            .spen
            .samples
            .iter()
            .map(|s| engine.posed_bary(s.tri, &s.bary))
            .collect();
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                if ((positions[i] - positions[j]).norm() - model.cfg.delta).abs() < 1e-6 {
                    eprintln!("reject: pair near hinge");
                    continue 'outer;
                }
            }
        }

        let (_, grads) = model.gradients(&params, 0).unwrap();
        let mut fd = [
            vec![0.0; POSE_PARAM_DIM],
            vec![0.0; POSE_PARAM_DIM],
            vec![0.0; POSE_PARAM_DIM],
            vec![0.0; POSE_PARAM_DIM],
            vec![0.0; POSE_PARAM_DIM],
        ];
        for p_idx in 0..POSE_PARAM_DIM {
            let mut plus = params.clone();
            let mut minus = params.clone();
            if p_idx < 6 {
                plus.global_pose[p_idx] += h;
                minus.global_pose[p_idx] -= h;
            } else {
                plus.joint_pose[p_idx - 6] += h;
                minus.joint_pose[p_idx - 6] -= h;
            }
            let bp = model.breakdown(&plus, 0).unwrap();
            let bm = model.breakdown(&minus, 0).unwrap();
            fd[0][p_idx] = (bp.l_dis - bm.l_dis) / (2.0 * h);
            fd[1][p_idx] = (bp.l_pen - bm.l_pen) / (2.0 * h);
            fd[2][p_idx] = (bp.l_spen - bm.l_spen) / (2.0 * h);
            fd[3][p_idx] = (bp.l_sup - bm.l_sup) / (2.0 * h);
            fd[4][p_idx] = (bp.total - bm.total) / (2.0 * h);
        }
        let analytic = [&grads.dis, &grads.pen, &grads.spen, &grads.sup, &grads.total];
        let names = ["dis", "pen", "spen", "sup", "total"];
        for ((fd_vec, ana), name) in fd.iter().zip(analytic).zip(names) {
            let err: f64 = fd_vec
                .iter()
                .zip(ana.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let norm: f64 = fd_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
            // Relative to the gradient vector norm; exactly-zero gradients
            // must match exactly.
            let rel = if norm > 1e-10 { err / norm } else { err };
            if rel > 1e-3 {
                failures.push(format!(
                    "config {checked} term {name}: vector relative error {rel:.2e}"
                ));
            }
        }
        checked += 1;
    }
    failures
}
#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives::{box_mesh, icosphere};
    use crate::hand::builtin_capsule_hand;

    fn sphere_sdf(radius: f64, center: Point3<f64>) -> SdfIndex {
        let mut mesh = icosphere(radius, 3);
        mesh.map_vertices(|v| v + center.coords);
        SdfIndex::build(&mesh).unwrap()
    }

    fn contact_at(p: Point3<f64>) -> PointSample {
        PointSample::bare(p, SampleSource::HandContact)
    }

    #[test]
    fn dis_zero_on_surface_and_symmetric_off_surface() {
        // A unit box gives exact plane distances.
        let sdf = SdfIndex::build(&box_mesh(1.0, 1.0, 1.0)).unwrap();
        let on = vec![
            contact_at(Point3::new(0.5, 0.0, 0.0)),
            contact_at(Point3::new(0.0, 0.5, 0.1)),
        ];
        assert!(loss_dis(&on, &sdf).unwrap() <= 1e-9);

        let outside = vec![contact_at(Point3::new(0.505, 0.0, 0.0))];
        assert!((loss_dis(&outside, &sdf).unwrap() - 0.005).abs() <= 1e-12);

        let inside = vec![contact_at(Point3::new(0.495, 0.0, 0.0))];
        assert!((loss_dis(&inside, &sdf).unwrap() - 0.005).abs() <= 1e-12);
    }

    #[test]
    fn pen_counts_only_interior_points() {
        let sdf = SdfIndex::build(&box_mesh(1.0, 1.0, 1.0)).unwrap();
        let outside: Vec<PointSample> = (0..10)
            .map(|i| contact_at(Point3::new(0.6 + i as f64 * 0.01, 0.0, 0.0)))
            .collect();
        assert_eq!(loss_pen(&outside, &sdf).unwrap(), 0.0);

        // One point 3 mm inside among 10 points: mean = 0.003/10.
        let mut mixed = outside.clone();
        mixed[0] = contact_at(Point3::new(0.497, 0.0, 0.0));
        assert!((loss_pen(&mixed, &sdf).unwrap() - 0.0003).abs() <= 1e-12);

        let boundary = vec![contact_at(Point3::new(0.5, 0.0, 0.0))];
        assert_eq!(loss_pen(&boundary, &sdf).unwrap(), 0.0);
    }

    #[test]
    fn pen_zero_iff_no_negative_sdf() {
        let sdf = sphere_sdf(0.05, Point3::new(0.0, 0.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let pts: Vec<PointSample> = (0..20)
                .map(|_| {
                    contact_at(Point3::new(
                        rng.gen_range(-0.08..0.08),
                        rng.gen_range(-0.08..0.08),
                        rng.gen_range(-0.08..0.08),
                    ))
                })
                .collect();
            let any_inside = pts
                .iter()
                .any(|p| sdf.signed(&p.position).unwrap().value < 0.0);
            let l = loss_pen(&pts, &sdf).unwrap();
            assert_eq!(l > 0.0, any_inside);
        }
    }

    #[test]
    fn spen_hand_evaluation_of_the_clamped_hinge() {
        // Two samples in unrelated segments at distance δ/2 = 5 mm.
        let samples = vec![
            SpenSample { tri: 0, bary: [1.0, 0.0, 0.0], segment: 3 },  // index dip
            SpenSample { tri: 1, bary: [1.0, 0.0, 0.0], segment: 15 }, // pinky dip
        ];
        let parents: Vec<Option<u8>> =
            vec![None, Some(0), Some(1), Some(2), Some(0), Some(4), Some(5), Some(0), Some(7), Some(8), Some(0), Some(10), Some(11), Some(0), Some(13), Some(14)];
        let delta = 0.01;
        let positions = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(0.005, 0.0, 0.0)];
        let l = loss_spen(&positions, &samples, &parents, delta);
        assert!((l - 0.005).abs() <= 1e-12, "got {l}");

        // Beyond δ: zero.
        let apart = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(0.02, 0.0, 0.0)];
        assert_eq!(loss_spen(&apart, &samples, &parents, delta), 0.0);
    }

    #[test]
    fn spen_rest_pose_of_builtin_hand_is_zero() {
        let rig = builtin_capsule_hand();
        let sphere = sphere_sdf(0.04, Point3::new(0.0, 0.1, 0.3));
        let model = EnergyModel::new(
            &rig,
            &ContactDesignation::all_tips(),
            &sphere,
            vec![0.0; JOINT_POSE_DIM],
            ContactConfig::default(),
        )
        .unwrap();
        let b = model.breakdown(&HandParams::default(), 0).unwrap();
        assert_eq!(b.l_spen, 0.0, "rest pose self-penetration {}", b.l_spen);
    }

    #[test]
    fn spen_is_invariant_under_rigid_motion() {
        let rig = builtin_capsule_hand();
        let sphere = sphere_sdf(0.04, Point3::new(0.0, 0.1, 0.3));
        let model = EnergyModel::new(
            &rig,
            &ContactDesignation::all_tips(),
            &sphere,
            vec![0.0; JOINT_POSE_DIM],
            ContactConfig::default(),
        )
        .unwrap();
        // A strongly curled pose that triggers some self-penetration hinges.
        let mut params = HandParams::default();
        for f in 0..5 {
            for s in 0..3 {
                params.joint_pose[3 * (3 * f + s)] = 1.3;
            }
        }
        let b0 = model.breakdown(&params, 0).unwrap();
        let mut moved = params.clone();
        moved.global_pose = [0.7, -0.3, 0.4, 0.2, -0.1, 0.5];
        let b1 = model.breakdown(&moved, 0).unwrap();
        assert!(
            (b0.l_spen - b1.l_spen).abs() <= 1e-9,
            "{} vs {}",
            b0.l_spen,
            b1.l_spen
        );
        assert!(b0.l_spen > 0.0, "curled pose should self-penetrate");
    }

    #[test]
    fn sup_norm_examples() {
        let theta = vec![0.0; JOINT_POSE_DIM];
        assert_eq!(loss_sup(&theta, &theta).unwrap(), 0.0);

        let mut shifted = theta.clone();
        shifted[0] = 0.3;
        shifted[1] = 0.4;
        assert!((loss_sup(&shifted, &theta).unwrap() - 0.5).abs() <= 1e-12);
        assert_eq!(
            loss_sup(&shifted, &theta).unwrap(),
            loss_sup(&theta, &shifted).unwrap()
        );

        assert!(matches!(
            loss_sup(&theta[..10], &theta),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn breakdown_recomposition_identity() {
        let rig = builtin_capsule_hand();
        let sphere = sphere_sdf(0.04, Point3::new(0.01, 0.10, 0.05));
        let mut cfg = ContactConfig::default();
        cfg.enable_spen = false; // disabled term must contribute zero weight
        let model = EnergyModel::new(
            &rig,
            &ContactDesignation::all_tips(),
            &sphere,
            vec![0.0; JOINT_POSE_DIM],
            cfg.clone(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let mut params = HandParams::default();
            for j in params.joint_pose.iter_mut() {
                *j = rng.gen_range(-0.8..0.8);
            }
            let b = model.breakdown(&params, 0).unwrap();
            let recomposed = b.l_dis + cfg.lambda_pen * b.l_pen + cfg.lambda_sup * b.l_sup;
            assert!((b.total - recomposed).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_iterations_is_a_no_op() {
        let rig = builtin_capsule_hand();
        let sphere = sphere_sdf(0.04, Point3::new(0.01, 0.10, 0.05));
        let initial = HandParams::default();
        let cfg = ContactConfig {
            iterations: 0,
            ..ContactConfig::default()
        };
        let (out, trace) = refine_grasp(
            &rig,
            &initial,
            &vec![0.0; JOINT_POSE_DIM],
            &ContactDesignation::all_tips(),
            &sphere,
            &cfg,
        )
        .unwrap();
        assert_eq!(out, initial);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn all_terms_disabled_leaves_params_unchanged() {
        let rig = builtin_capsule_hand();
        let sphere = sphere_sdf(0.04, Point3::new(0.01, 0.10, 0.05));
        let initial = HandParams::default();
        let cfg = ContactConfig {
            iterations: 25,
            enable_dis: false,
            enable_pen: false,
            enable_spen: false,
            enable_sup: false,
            ..ContactConfig::default()
        };
        let (out, trace) = refine_grasp(
            &rig,
            &initial,
            &vec![0.0; JOINT_POSE_DIM],
            &ContactDesignation::all_tips(),
            &sphere,
            &cfg,
        )
        .unwrap();
        assert_eq!(out, initial);
        assert_eq!(trace.len(), 26);
        assert!(trace.iter().all(|b| b.total == 0.0));
        // Values are still logged even though the weights are zero.
        assert!(trace[0].l_dis > 0.0);
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let rig = builtin_capsule_hand();
        let sphere = sphere_sdf(0.05, Point3::new(0.01, 0.11, 0.06));
        let model = EnergyModel::new(
            &rig,
            &ContactDesignation::all_tips(),
            &sphere,
            vec![0.02; JOINT_POSE_DIM],
            ContactConfig::default(),
        )
        .unwrap();
        let failures = fd_gradient_check(&model, &rig, &sphere, 5, 17);
        assert!(failures.is_empty(), "{failures:?}");
    }

}

use grasp_refine::geom::{farthest_point_sample, SampleSource};
use grasp_refine::hand::{builtin_capsule_hand, ContactDesignation};

#[test]
fn probe_hand_stats() {
    let t0 = std::time::Instant::now();
    let rig = builtin_capsule_hand();
    println!("build time: {:?}", t0.elapsed());
    println!("vertices: {}", rig.rest_mesh.vertices.len());
    println!("triangles: {}", rig.rest_mesh.triangles.len());
    for (name, ids) in &rig.contact_sites {
        println!("region {name}: {} vertices", ids.len());
    }
    let samples = farthest_point_sample(&rig.rest_mesh, 512, 0, SampleSource::HandSurface).unwrap();
    let seg: Vec<usize> = samples
        .iter()
        .map(|s| {
            let t = rig.rest_mesh.triangles[s.tri.unwrap() as usize];
            let b = s.bary.unwrap();
            let mut acc = [0.0f64; 16];
            for (c, bb) in t.iter().zip(b.iter()) {
                for (j, w) in rig.weights[*c as usize].iter() {
                    acc[j] += bb * w;
                }
            }
            acc.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap().0
        })
        .collect();
    let exempt = |a: usize, b: usize| -> bool {
        if a == b { return true; }
        let pa = rig.joints[a].parent.map(|p| p as usize);
        let pb = rig.joints[b].parent.map(|p| p as usize);
        pa == Some(b) || pb == Some(a) || (pa.is_some() && pa == pb)
    };
    let mut min_nonexempt = f64::INFINITY;
    let mut min_pair = (0, 0);
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            if exempt(seg[i], seg[j]) { continue; }
            let d = (samples[i].position - samples[j].position).norm();
            if d < min_nonexempt { min_nonexempt = d; min_pair = (seg[i], seg[j]); }
        }
    }
    println!("min non-exempt pair distance: {:.4} m between joints {} and {}", min_nonexempt, rig.joints[min_pair.0].name, rig.joints[min_pair.1].name);
    let tips = ContactDesignation::all_tips();
    println!("tip vertex count: {}", tips.resolve(&rig).unwrap().len());
}

use grasp_refine::energy::*;
use grasp_refine::geom::{primitives::icosphere, SdfIndex};
use grasp_refine::hand::*;
use nalgebra::Point3;

#[test]
fn probe_energy_timing() {
    let rig = builtin_capsule_hand();
    let mut mesh = icosphere(0.05, 3);
    mesh.map_vertices(|v| v + nalgebra::Vector3::new(0.01, 0.11, 0.06));
    let sphere = SdfIndex::build(&mesh).unwrap();
    let model = EnergyModel::new(
        &rig,
        &ContactDesignation::all_tips(),
        &sphere,
        vec![0.02; 45],
        ContactConfig::default(),
    )
    .unwrap();
    let params = HandParams::default();
    let t0 = std::time::Instant::now();
    for _ in 0..10 {
        let _ = model.breakdown(&params, 0).unwrap();
    }
    println!("breakdown x10: {:?}", t0.elapsed());
    let t1 = std::time::Instant::now();
    for _ in 0..10 {
        let _ = model.gradients(&params, 0).unwrap();
    }
    println!("gradients x10: {:?}", t1.elapsed());

    let t2 = std::time::Instant::now();
    let fails = fd_gradient_check(&model, &rig, &sphere, 1, 17);
    println!("fd check 1 config: {:?} failures {:?}", t2.elapsed(), fails);
}

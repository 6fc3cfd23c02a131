use fibril_core::hermite::{CenterlineDofs, RefGeometry};
use fibril_core::quadrature::GAUSS_10;
use fibril_core::Vec3;

#[test]
fn probe_arc_length_iteration() {
    let r = 100.0;
    let n = 512usize;
    let span = std::f64::consts::FRAC_PI_4;
    let pos = |k: usize| {
        let th = span * k as f64 / n as f64;
        Vec3::new(r * th.sin(), r * (1.0 - th.cos()), 0.0)
    };
    let tan = |k: usize| {
        let th = span * k as f64 / n as f64;
        Vec3::new(th.cos(), th.sin(), 0.0).normalize()
    };
    let mut failures = 0;
    for e in 0..n {
        let dofs = CenterlineDofs::new(pos(e), tan(e), pos(e + 1), tan(e + 1));
        if let Err(err) = RefGeometry::new(dofs, None) {
            failures += 1;
            if failures <= 2 {
                println!("element {e} failed: {err:?}");
                let mut l = (dofs.d2 - dofs.d1).norm();
                for it in 0..12 {
                    let next = GAUSS_10.integrate(|xi| dofs.eval_xi(xi, 1, 0.5 * l).norm());
                    println!(
                        "  it {it:2}  l = {l:.17e}  next = {next:.17e}  diff = {:+.3e}",
                        next - l
                    );
                    l = next;
                }
            }
        }
    }
    println!("total failures: {failures} / {n}");
}

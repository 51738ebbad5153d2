use dehnscope_core::hypcore::{hyp_distance, H3Point, MobiusTransform};
use dehnscope_core::torus_end::ChartVariant;
use dehnscope_core::{Complex, End};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_end(rng: &mut ChaCha8Rng) -> End {
    let a = Complex::new(rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0));
    let b = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0));
    End::new(a, b).unwrap()
}

/// Length of `τ ↦ exp(τL)·q₀` for `τ ∈ [0, 1]`, where `exp(τL)` is the
/// similarity about `z₀` and `q₀` sits on the tube of radius `eps`.
/// The speed is taken by central differences of the Möbius action and
/// integrated with composite Simpson.
fn tube_path_length(s: &End, x: f64, y: f64, eps: f64, steps: usize) -> f64 {
    let z0 = s.z0().unwrap();
    let l = s.a() * (s.b() * y + x);
    let t0 = 1.3;
    let q0 = H3Point::new(z0 + Complex::from_polar(t0 * eps.sinh(), 0.7), t0).unwrap();
    let at = |tau: f64| MobiusTransform::similarity_about(l * tau, z0).apply_h3(&q0);
    let dh = 1e-6;
    let speed = |tau: f64| hyp_distance(&at(tau - dh), &at(tau + dh)) / (2.0 * dh);
    let h = 1.0 / steps as f64;
    let mut sum = speed(0.0) + speed(1.0);
    for i in 1..steps {
        sum += speed(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn cross_section_matches_tube_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let s = random_end(&mut rng);
        let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let eps = rng.gen_range(0.1..2.0);
        let closed = s.cross_section_length(x, y, eps).unwrap();
        let numeric = tube_path_length(&s, x, y, eps, 10_000);
        assert!((closed - numeric).abs() <= 1e-6 * closed, "{closed} vs {numeric}");
    }
}

#[test]
fn developing_map_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut ends: Vec<End> = (0..8).map(|_| random_end(&mut rng)).collect();
    ends.push(End::new(Complex::new(0.0, 2.0), Complex::new(0.0, 1.0)).unwrap());
    ends.push(End::new(Complex::new(0.8, 0.0), Complex::new(0.5, 1.0)).unwrap());
    for s in &ends {
        let [g1, g2] = s.generator_holonomies();
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let (x, y, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.5..3.0));
            let p = s.develop(x, y, t, ChartVariant::default()).unwrap();
            let q1 = s.develop(x + 1.0, y, t, ChartVariant::default()).unwrap();
            let q2 = s.develop(x, y + 1.0, t, ChartVariant::default()).unwrap();
            worst = worst.max(hyp_distance(&g1.apply_h3(&p), &q1)).max(hyp_distance(&g2.apply_h3(&p), &q2));
        }
        assert!(worst < 1e-9, "{s:?}: {worst}");
    }
}

#[test]
fn unit_scale_chart_is_equivariant_too() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let s = random_end(&mut rng);
        let [g1, g2] = s.generator_holonomies();
        for _ in 0..200 {
            let (x, y, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.5..3.0));
            let p = s.develop(x, y, t, ChartVariant::UnitScale).unwrap();
            let q1 = s.develop(x + 1.0, y, t, ChartVariant::UnitScale).unwrap();
            let q2 = s.develop(x, y + 1.0, t, ChartVariant::UnitScale).unwrap();
            assert!(hyp_distance(&g1.apply_h3(&p), &q1) < 1e-9);
            assert!(hyp_distance(&g2.apply_h3(&p), &q2) < 1e-9);
        }
    }
}

#[test]
fn tube_height_level_set_lies_on_the_tube() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let s = random_end(&mut rng);
        let z0 = s.z0().unwrap();
        let eps = rng.gen_range(0.1..2.0);
        for variant in [ChartVariant::SymmetricScale, ChartVariant::UnitScale] {
            let t = variant.tube_height(&s, eps).unwrap().unwrap();
            for _ in 0..20 {
                let p = s.develop(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), t, variant).unwrap();
                // distance to the vertical geodesic over z0
                let dist = ((p.z() - z0).norm() / p.t()).asinh();
                assert!((dist - eps).abs() < 1e-9, "{dist} vs {eps}");
            }
        }
    }
}

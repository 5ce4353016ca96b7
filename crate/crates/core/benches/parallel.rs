use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lhy_core::fockmicro::{self, ops};
use lhy_core::regime::RegimeParams;
use lhy_core::scattering::{self, Method, Potential};
use lhy_core::{lattice, par};

fn pools(c: &mut Criterion, name: &str, mut f: impl FnMut() + Send) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("threads", 1), |b| par::with_threads(1, || b.iter(&mut f)));
    g.bench_function(BenchmarkId::new("threads", "global"), |b| b.iter(&mut f));
    g.finish();
}

fn convolution(c: &mut Criterion) {
    let pot = Potential::soft_sphere(2.0, 1.0).unwrap();
    let params = RegimeParams::synthetic(1000.0, 0.52, 0.1, 1.0).unwrap();
    let points = scattering::lattice_points(2.0 * params.l);
    let x: Vec<f64> = (0..points.len()).map(|i| 1.0 / (1.0 + i as f64)).collect();
    for method in [Method::Direct, Method::Fft] {
        let conv = scattering::convolver(&pot, &params, points.clone(), Some(method));
        pools(c, &format!("convolution/{method:?}/{}pts", points.len()), || {
            std::hint::black_box(conv.apply(&x));
        });
    }
}

fn lattice_sum(c: &mut Criterion) {
    let shell = lattice::ball(60.0);
    pools(c, &format!("lattice_sum/{}pts", shell.len()), || {
        std::hint::black_box(par::sum_by(shell.len(), |i| {
            let p2 = lattice::p2(shell[i]);
            (p2 * p2 + 16.0 * p2).sqrt() - p2 - 8.0 + 32.0 / p2.max(1.0)
        }));
    });
}

fn sparse_matmul(c: &mut Criterion) {
    let lay = fockmicro::default_layout().unwrap();
    let tc = ops::t_c(&lay.space, &lay.order, &lay.phi(), lay.n).unwrap();
    pools(c, &format!("sparse_matmul/dim{}", lay.space.dim()), || {
        std::hint::black_box(tc.matmul(&tc.adjoint()));
    });
}

criterion_group!(benches, convolution, lattice_sum, sparse_matmul);
criterion_main!(benches);

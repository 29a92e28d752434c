use std::f64::consts::FRAC_PI_2;

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use foursurf::sweep::singlet_sweep_sequential;

#[cfg(feature = "parallel")]
use foursurf::sweep::singlet_sweep_parallel;

const TOL: f64 = 1e-9;

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("singlet_sweep");
    group.sample_size(20);

    for &steps in &[181usize, 721] {
        group.bench_function(format!("sequential/{steps}"), |b| {
            b.iter(|| {
                let rows =
                    singlet_sweep_sequential(black_box(0.0), black_box(FRAC_PI_2), steps, TOL)
                        .unwrap();
                black_box(rows.len())
            })
        });

        #[cfg(feature = "parallel")]
        group.bench_function(format!("parallel/{steps}"), |b| {
            b.iter(|| {
                let rows = singlet_sweep_parallel(black_box(0.0), black_box(FRAC_PI_2), steps, TOL)
                    .unwrap();
                black_box(rows.len())
            })
        });
    }

    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);

//! Compares the data-parallel inner loops against their sequential
//! execution by pinning the rayon pool width: the commitment-enumeration
//! oracle (one conic solve per feasible schedule) and the per-period Benders
//! subproblem batch.

use criterion::{criterion_group, criterion_main, Criterion};
use pioia::benders::solve_time_block;
use pioia::formulation::FormulationVariant;
use pioia::model::{generate_synthetic, load_instance};
use pioia::oracle::brute_force_optimum;
use pioia::solver::Backend;
use std::hint::black_box;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool builds")
}

fn bench_oracle(c: &mut Criterion) {
    let inst = generate_synthetic(3, 2, 4, 8).expect("valid sizes");
    let mut group = c.benchmark_group("oracle_enumeration");
    group.sample_size(10);
    for threads in [1, rayon::current_num_threads().max(2)] {
        let pool = pool(threads);
        group.bench_function(format!("threads_{threads}"), |b| {
            b.iter(|| {
                pool.install(|| {
                    brute_force_optimum(black_box(&inst), FormulationVariant::F2, Backend::Clarabel)
                        .expect("oracle solves")
                        .objective
                })
            })
        });
    }
    group.finish();
}

fn bench_benders_batch(c: &mut Criterion) {
    let inst = load_instance(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/ring3.json"
    ))
    .expect("fixture loads");
    let anchors: Vec<Vec<f64>> = (0..inst.horizon).map(|_| vec![0.25, 0.1]).collect();
    let mut group = c.benchmark_group("benders_period_batch");
    for threads in [1, rayon::current_num_threads().max(2)] {
        let pool = pool(threads);
        group.bench_function(format!("threads_{threads}"), |b| {
            b.iter(|| {
                pool.install(|| {
                    use rayon::prelude::*;
                    (0..inst.horizon)
                        .into_par_iter()
                        .map(|t| {
                            solve_time_block(
                                black_box(&inst),
                                FormulationVariant::F2,
                                t,
                                &anchors[t],
                                Backend::Clarabel,
                            )
                            .expect("subproblem solves")
                            .psi_star
                        })
                        .sum::<f64>()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_oracle, bench_benders_batch);
criterion_main!(benches);

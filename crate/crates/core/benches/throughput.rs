//! Single-thread pool against the default pool on the data-parallel paths.
//!
//! With `--no-default-features` the library runs every loop sequentially, so
//! both series measure the same sequential code.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;

use sdecc_core::constraints::{build_model, dominated_words, gen_c0, gen_c6, FamilyId};
use sdecc_core::sdecc::{conflict_graph, max_sdecc_exact, ExactOptions};

fn pools() -> Vec<(String, ThreadPool)> {
    let default = rayon::current_num_threads();
    let mut sizes = vec![1];
    if default > 1 {
        sizes.push(default);
    }
    sizes
        .into_iter()
        .map(|t| {
            let label = if sdecc_core::is_parallel() { format!("rayon-{t}") } else { "sequential".to_string() };
            (label, rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap())
        })
        .collect()
}

fn bench<F: Fn() + Sync>(c: &mut Criterion, name: &str, inputs: &[usize], samples: usize, f: impl Fn(usize) -> F) {
    let mut group = c.benchmark_group(name);
    group.sample_size(samples);
    for &n in inputs {
        let work = f(n);
        for (label, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| b.iter(|| pool.install(&work)));
        }
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    bench(c, "conflict_graph", &[10, 12], 10, |n| {
        move || {
            black_box(conflict_graph(n).unwrap());
        }
    });
    bench(c, "dominated_words", &[10, 12], 10, |n| {
        move || {
            black_box(dominated_words(n).unwrap());
        }
    });
    bench(c, "gen_c0", &[11, 13], 10, |n| {
        move || {
            black_box(gen_c0(n).unwrap());
        }
    });
    bench(c, "gen_c6", &[12], 10, |n| {
        move || {
            black_box(gen_c6(n, 1, 1).unwrap());
        }
    });
    bench(c, "build_model_all", &[11], 10, |n| {
        move || {
            black_box(build_model(n, &FamilyId::ALL, &[]).unwrap());
        }
    });
}

fn search(c: &mut Criterion) {
    bench(c, "max_sdecc_exact", &[7, 8], 10, |n| {
        move || {
            black_box(max_sdecc_exact(n, &ExactOptions::default()).unwrap());
        }
    });
}

criterion_group!(benches, generation, search);
criterion_main!(benches);

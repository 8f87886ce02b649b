use std::hint::black_box;

use bsk_bench::fixture;
use bsk_core::bass_serre::TreeWindow;
use bsk_core::fine::{check_fine, check_hyperbolic, quotient, FineWindow};
use bsk_core::input::{SelectedSpec, TameSpec};
use bsk_core::peripheral::compute_q;
use bsk_core::quasiconvex::run_window;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn tree(c: &mut Criterion) {
    let g = fixture("example");
    let mut group = c.benchmark_group("tree window");
    for l in [3, 4, 5] {
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| TreeWindow::build(&g, 3, black_box(l)).unwrap())
        });
    }
    group.finish();
}

fn fine(c: &mut Criterion) {
    let g = fixture("example");
    let t = TreeWindow::build(&g, 3, 5).unwrap();
    c.bench_function("fine window R=3 L=5", |b| b.iter(|| quotient(&FineWindow::build(&g, black_box(&t)).unwrap())));
    let k = FineWindow::build(&g, &t).unwrap();
    let q = quotient(&k);
    let e = q.base_cone_edge(&k, &g).unwrap();
    c.bench_function("circuits n=8", |b| b.iter(|| check_fine(&q.graph, black_box(e), 8)));
    c.bench_function("delta", |b| b.iter(|| check_hyperbolic(black_box(&q.graph))));
}

fn peripherals(c: &mut Criterion) {
    let g = fixture("example");
    let t = TreeWindow::build(&g, 3, 5).unwrap();
    let k = FineWindow::build(&g, &t).unwrap();
    c.bench_function("compute ℚ", |b| b.iter(|| compute_q(&g, Some(&t), Some(&k)).unwrap()));
}

fn kappa(c: &mut Criterion) {
    let g = fixture("example");
    let spec = TameSpec {
        id: "W".into(),
        vertices: vec![SelectedSpec { vertex: "v".into(), coset: "1".into(), generators: vec!["ab".into()] }],
        connecting: vec![],
    };
    c.bench_function("κ for ⟨ab⟩ R=3 L=4", |b| b.iter(|| run_window(&g, black_box(&spec), 3, 4).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = tree, fine, peripherals, kappa
}
criterion_main!(benches);

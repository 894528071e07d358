use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use leafsieve_bench::{ellipse, leaf_row};
use leafsieve_core::eval::evaluate;
use leafsieve_core::mask::{coverage_map, decode_rle, encode_rle, iou};
use leafsieve_core::synth::reference_scene;
use leafsieve_core::{run_pipeline, shape_ratio, FilterConfig, StageSet, ThresholdSet};

fn rle(c: &mut Criterion) {
    let mut g = c.benchmark_group("rle");
    for side in [256u32, 1024] {
        let m = ellipse(side, side, f64::from(side) * 0.4, f64::from(side) * 0.25);
        let r = encode_rle(&m);
        g.bench_with_input(BenchmarkId::new("encode", side), &m, |b, m| {
            b.iter(|| encode_rle(black_box(m)))
        });
        g.bench_with_input(BenchmarkId::new("decode", side), &r, |b, r| {
            b.iter(|| decode_rle(black_box(r)).unwrap())
        });
    }
    g.finish();
}

fn overlap(c: &mut Criterion) {
    let (masks, union) = leaf_row(16, 128);
    c.bench_function("iou/leaf_vs_union", |b| {
        b.iter(|| iou(black_box(&masks[3]), black_box(&union)).unwrap())
    });
    c.bench_function("coverage_map/16_leaves", |b| {
        b.iter(|| coverage_map(union.width(), union.height(), black_box(&masks)).unwrap())
    });
}

fn shape(c: &mut Criterion) {
    let mut g = c.benchmark_group("shape_ratio");
    for side in [64u32, 512] {
        let m = ellipse(side, side, f64::from(side) * 0.45, f64::from(side) * 0.2);
        g.bench_with_input(BenchmarkId::from_parameter(side), &m, |b, m| {
            b.iter(|| shape_ratio(black_box(m)).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let s = reference_scene().unwrap();
    let cfg = FilterConfig::default();
    c.bench_function("pipeline/reference_scene", |b| {
        b.iter(|| run_pipeline(&s.image, black_box(s.candidates.clone()), &cfg, StageSet::all()).unwrap())
    });
    let preds: Vec<_> = s.candidates.iter().map(|c| c.mask().clone()).collect();
    let ts = ThresholdSet::default();
    c.bench_function("evaluate/reference_scene", |b| {
        b.iter(|| evaluate(black_box(&preds), &s.ground_truth, &ts).unwrap())
    });
}

criterion_group!(benches, rle, overlap, shape, pipeline);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};

use pedrad_bench::body_mesh;
use pedrad_core::sbr::{trace_frame_grouped, AspectConfig};
use pedrad_core::shapes::square_plate;
use pedrad_core::{build_groups, Material, SPEED_OF_LIGHT};

fn plate_trace(c: &mut Criterion) {
    let carrier = 77e9;
    let lambda = SPEED_OF_LIGHT / carrier;
    let mesh = square_plate(20.0 * lambda, 0.0);
    let groups = build_groups(&mesh, 1).unwrap();
    let aspect = AspectConfig::monostatic(0.0, carrier).unwrap();
    let pec = Material::perfect_conductor();
    c.bench_function("plate_20_lambda_trace", |b| {
        b.iter(|| trace_frame_grouped(&mesh, &groups, &pec, &aspect))
    });
}

fn body_trace_grouped_vs_exhaustive(c: &mut Criterion) {
    let mesh = body_mesh();
    let aspect = AspectConfig::new(0.0, 0.0, 77e9, 3, Some(0.02), true).unwrap();
    let skin = Material::skin_77_ghz();
    let grouped = build_groups(&mesh, 24).unwrap();
    let exhaustive = build_groups(&mesh, 1).unwrap();
    let mut group = c.benchmark_group("body_trace");
    group.sample_size(20);
    group.bench_function("grouped_24", |b| {
        b.iter(|| trace_frame_grouped(&mesh, &grouped, &skin, &aspect))
    });
    group.bench_function("exhaustive", |b| {
        b.iter(|| trace_frame_grouped(&mesh, &exhaustive, &skin, &aspect))
    });
    group.finish();
}

criterion_group!(benches, plate_trace, body_trace_grouped_vs_exhaustive);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};

use pedrad_bench::walking_scatterer;
use pedrad_core::radar::{synthesize_cube, RadarParams};
use pedrad_core::signatures::{doppler_time, range_doppler, range_time, Window};

fn cube_synthesis(c: &mut Criterion) {
    let params = RadarParams::automotive_77ghz();
    let set = walking_scatterer(&params);
    let mut group = c.benchmark_group("synthesis");
    group.sample_size(10);
    group.bench_function("block_cube_1_scatterer", |b| {
        b.iter(|| synthesize_cube(&set, &params).unwrap())
    });
    group.finish();
}

fn signature_transforms(c: &mut Criterion) {
    let params = RadarParams::automotive_77ghz();
    let cube = synthesize_cube(&walking_scatterer(&params), &params).unwrap();
    let mut group = c.benchmark_group("signatures");
    group.sample_size(10);
    group.bench_function("range_time", |b| {
        b.iter(|| range_time(&cube, Window::Hann).unwrap())
    });
    group.bench_function("doppler_time", |b| {
        b.iter(|| doppler_time(&cube, Window::Hann).unwrap())
    });
    group.bench_function("range_doppler_cpi1", |b| {
        b.iter(|| range_doppler(&cube, 1, Window::Hann).unwrap())
    });
    group.finish();
}

criterion_group!(benches, cube_synthesis, signature_transforms);
criterion_main!(benches);

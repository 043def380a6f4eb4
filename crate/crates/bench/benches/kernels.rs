use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracmap_core::fmi::image_window;
use fracmap_core::{
    box_counting_dimension, extract_boundary, fmi_julia, forward_image, render_julia, render_mandelbrot, ComplexPoint,
    FmiMode, FmiScene, GridSpec, IterParams, MapSpec,
};

fn c1() -> ComplexPoint {
    ComplexPoint::new(-0.175, -0.655)
}

fn grid(n: usize) -> GridSpec {
    GridSpec::square(ComplexPoint::ZERO, 3.0, n).unwrap()
}

fn escape_time(c: &mut Criterion) {
    let mut g = c.benchmark_group("escape_time");
    g.sample_size(10);
    let p = IterParams::default();
    for n in [256, 512] {
        g.bench_with_input(BenchmarkId::new("julia", n), &n, |b, &n| {
            b.iter(|| render_julia(&grid(n), c1(), &p))
        });
    }
    let m = GridSpec::square(ComplexPoint::new(-0.6, 0.0), 3.0, 256).unwrap();
    g.bench_function("mandelbrot/256", |b| b.iter(|| render_mandelbrot(&m, &p)));
    g.finish();
}

fn mapped(c: &mut Criterion) {
    let mut g = c.benchmark_group("mapped");
    g.sample_size(10);
    let p = IterParams::default();
    let src = grid(256);
    for map in [
        MapSpec::affine(ComplexPoint::new(2.0, 0.0), ComplexPoint::ONE).unwrap(),
        MapSpec::arcsin_root5(),
    ] {
        let scene = FmiScene {
            grid: src,
            c: c1(),
            map: map.clone(),
            params: p,
            mode: FmiMode::JuliaFmi,
        };
        g.bench_function(format!("fmi_julia/{}", map.name()), |b| {
            b.iter(|| fmi_julia(&scene).unwrap())
        });
    }
    let filled = render_julia(&src, c1(), &IterParams::new(25, 2.0).unwrap());
    let map = MapSpec::affine(ComplexPoint::new(2.0, 0.0), ComplexPoint::ONE).unwrap();
    let dst = image_window(&map, &src, 129).unwrap();
    g.bench_function("forward_image/affine/ss3", |b| {
        b.iter(|| forward_image(&filled, &map, &dst, 3).unwrap())
    });
    g.finish();
}

fn analysis(c: &mut Criterion) {
    let boundary = extract_boundary(&render_julia(&grid(1024), c1(), &IterParams::new(25, 2.0).unwrap()));
    c.bench_function("box_counting/1024", |b| {
        b.iter(|| box_counting_dimension(&boundary, 2, 256).unwrap())
    });
}

criterion_group!(benches, escape_time, mapped, analysis);
criterion_main!(benches);

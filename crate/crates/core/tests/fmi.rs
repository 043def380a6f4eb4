use fracmap_core::fji::classify;
use fracmap_core::{
    compare_masks, discrete_trajectory, fmi_julia, fmi_mandelbrot, forward_image, render_julia, render_mandelbrot,
    ComplexPoint, FmiMode, FmiScene, GridSpec, IterParams, MapSpec, OrbitResult, RasterField,
};
use proptest::prelude::*;

fn cp(re: f64, im: f64) -> ComplexPoint {
    ComplexPoint::new(re, im)
}

fn c1() -> ComplexPoint {
    cp(-0.175, -0.655)
}

fn scene(grid: GridSpec, c: ComplexPoint, map: MapSpec, params: IterParams) -> FmiScene {
    FmiScene {
        grid,
        c,
        map,
        params,
        mode: FmiMode::JuliaFmi,
    }
}

/// Applies the inverse `k` times by hand, then classifies.
fn manual_pullback(grid: &GridSpec, c: ComplexPoint, map: &MapSpec, k: u32, p: &IterParams) -> RasterField {
    RasterField::render(*grid, |w| {
        let mut z = w;
        for _ in 0..k {
            match map.inverse(z) {
                Ok(next) => z = next,
                Err(_) => return OrbitResult::INVALID,
            }
        }
        classify(z, c.to_c64(), p)
    })
}

#[test]
fn semigroup_matches_composed_inverse() {
    let grid = GridSpec::square(ComplexPoint::ZERO, 3.0, 96).unwrap();
    let p = IterParams::new(60, 2.0).unwrap();
    let maps = [
        MapSpec::affine(cp(0.9, 0.3), cp(0.1, -0.05)).unwrap(),
        MapSpec::quadratic_param(0.6, cp(0.02, -0.02), c1()).unwrap(),
        MapSpec::arcsin_root5(),
    ];
    for map in &maps {
        let traj = discrete_trajectory(c1(), map, 4, &grid, &p).unwrap();
        for k in 0..4u32 {
            let via_registry = fmi_julia(&scene(grid, c1(), map.iterated(k + 1), p)).unwrap();
            assert_eq!(
                traj.pullback[k as usize + 1],
                via_registry,
                "{} k+1={}",
                map.name(),
                k + 1
            );
            assert_eq!(
                via_registry,
                manual_pullback(&grid, c1(), map, k + 1, &p),
                "{} k+1={}",
                map.name(),
                k + 1
            );
        }
    }
}

#[test]
fn affine_pullback_and_pushforward_agree() {
    // At a depth where the level set of this exterior parameter is still pixel-resolvable.
    let grid = GridSpec::square(ComplexPoint::ZERO, 3.0, 512).unwrap();
    let p = IterParams::new(25, 2.0).unwrap();
    let spiral = MapSpec::affine(cp(0.8, 0.45), cp(0.05, 0.1)).unwrap();
    let halving = MapSpec::affine(cp(0.5, 0.0), ComplexPoint::ZERO).unwrap();
    // The halving image is 64 px across by k = 3; beyond that the mask is mostly boundary pixels.
    for (map, k_max) in [(spiral, 5), (halving, 3)] {
        let traj = discrete_trajectory(c1(), &map, k_max, &grid, &p).unwrap();
        for k in 0..=k_max as usize {
            let r = compare_masks(&traj.pullback[k], &traj.pushforward[k]).unwrap();
            assert!(r.jaccard >= 0.95, "a={:?} k={k}: J={}", map.kind(), r.jaccard);
            assert!(
                r.hausdorff_px <= 2.0 + 1e-9,
                "a={:?} k={k}: H={}",
                map.kind(),
                r.hausdorff_px
            );
        }
    }
}

#[test]
fn identity_degeneracy_on_assorted_parameters() {
    let grid = GridSpec::new(cp(0.1, -0.2), 2.5, 2.0, 70, 55).unwrap();
    let p = IterParams::new(120, 2.0).unwrap();
    for c in [
        cp(-0.175, -0.655),
        cp(-0.7589, 0.0735),
        cp(0.285, 0.01),
        ComplexPoint::ZERO,
    ] {
        assert_eq!(
            fmi_julia(&scene(grid, c, MapSpec::identity(), p)).unwrap(),
            render_julia(&grid, c, &p)
        );
    }
    let m = FmiScene {
        grid,
        c: ComplexPoint::ZERO,
        map: MapSpec::identity(),
        params: p,
        mode: FmiMode::MandelbrotFmi,
    };
    assert_eq!(fmi_mandelbrot(&m).unwrap(), render_mandelbrot(&grid, &p));
    assert!(fmi_julia(&m).is_err());
}

#[test]
fn affine_fmt_equality_at_small_scale() {
    let src = GridSpec::square(ComplexPoint::ZERO, 3.0, 128).unwrap();
    let p = IterParams::new(25, 2.0).unwrap();
    let map = MapSpec::affine(cp(0.0, 1.5), cp(0.3, 0.0)).unwrap();
    let dst = GridSpec::square(cp(0.3, 0.0), 4.5, 128).unwrap();
    let pushed = forward_image(&render_julia(&src, c1(), &p), &map, &dst, 4).unwrap();
    let pulled = fmi_julia(&scene(dst, c1(), map, p)).unwrap();
    let r = compare_masks(&pushed, &pulled).unwrap();
    assert!(r.jaccard >= 0.95 && r.hausdorff_px <= 2.0, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn whole_pixel_translation_shifts_the_mask(di in -5i32..5, dj in -5i32..5) {
        let g = GridSpec::square(ComplexPoint::ZERO, 1.0, 40).unwrap();
        let mask: Vec<bool> = (0..1600).map(|k| { let (i, j) = (k % 40, k / 40); (12..28).contains(&i) && (15..22).contains(&j) }).collect();
        let src = RasterField::from_mask(g, &mask).unwrap();
        let shift = cp(di as f64 * g.pitch_re(), -(dj as f64) * g.pitch_im());
        let moved = forward_image(&src, &MapSpec::affine(ComplexPoint::ONE, shift).unwrap(), &g, 2).unwrap();
        for j in 0..40i32 {
            for i in 0..40i32 {
                let (si, sj) = (i - di, j - dj);
                let want = (0..40).contains(&si) && (0..40).contains(&sj) && mask[(sj * 40 + si) as usize];
                prop_assert_eq!(moved.is_bounded(i as usize, j as usize), want);
            }
        }
    }
}

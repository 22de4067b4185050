use muskat_core::kernels::{sigma, OffsetKernel, ProfileCurve};
use muskat_core::operators::{loglog_slope, offset_pv_integral, offset_pv_limit, t_phi};
use muskat_core::profiles::weighted_sup_of;
use muskat_core::{ProfileFunction, QuadSpec, SamplingGrid};

const ALPHA: f64 = 0.5;

fn curve() -> ProfileCurve {
    ProfileCurve {
        beta: 0.0,
        profile: ProfileFunction::rational_bump(0.1, 0.0, 1.0),
    }
}

fn offset_norm(scale: f64, symmetric: bool) -> f64 {
    let z = curve();
    let one = ProfileFunction::Constant(1.0);
    let phi = OffsetKernel {
        curve: &z,
        offset: &one,
        scale,
        symmetric,
    };
    let f = ProfileFunction::rational_bump(1.0, 0.0, 1.0);
    let quad = QuadSpec::default();
    let grid = SamplingGrid::uniform(8.0, 33).unwrap();
    weighted_sup_of(|s| t_phi(&phi, &f, 0.0, s, &quad).unwrap().value, ALPHA, &grid).unwrap()
}

#[test]
fn one_sided_offset_scales_at_least_like_holder_power() {
    let pts: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.125]
        .iter()
        .map(|&c| (c, offset_norm(c, false)))
        .collect();
    let slope = loglog_slope(&pts);
    assert!(slope >= ALPHA - 0.1, "slope {slope}");
}

#[test]
fn symmetric_offset_divided_by_c_tends_to_curvature_term() {
    let z = curve();
    let one = ProfileFunction::Constant(1.0);
    let c = 1e-3;
    let phi = OffsetKernel {
        curve: &z,
        offset: &one,
        scale: c,
        symmetric: true,
    };
    let f = ProfileFunction::rational_bump(1.0, 0.0, 1.0);
    let quad = QuadSpec::default();
    for s in [0.0, 0.5, -0.5, 2.0] {
        let got = t_phi(&phi, &f, 0.0, s, &quad).unwrap().value / c;
        let want = sigma(z.profile.derivs(s)[1]) * f.derivs(s)[2];
        assert!((got - want).abs() <= 0.01 * want.abs(), "s={s}: {got} vs {want}");
    }
}

#[test]
fn offset_integral_converges_to_its_limit() {
    let z = curve();
    let quad = QuadSpec::default();
    for s in [0.7, -1.5] {
        let limit = offset_pv_limit(&z, s, &quad).unwrap().value;
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125, 0.00625]
            .iter()
            .map(|&c| (c, (offset_pv_integral(&z, c, s, &quad).unwrap().value - limit).abs()))
            .collect();
        let slope = loglog_slope(&pts);
        assert!(slope >= ALPHA - 0.1, "slope {slope}");
    }
}

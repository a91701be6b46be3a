use super::*;
use crate::cplx::{cr_residual, wirtinger_fd, FD_STEP};
use crate::rng::disc_points;
use proptest::prelude::*;

fn spec(id: &str) -> ActivationSpec {
    ActivationSpec::from_id(id).unwrap()
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn fd_jet(s: &ActivationSpec, z: Complex, h: f64) -> WirtingerJet {
    wirtinger_fd(|w| s.eval(w).unwrap_or(Complex::new(f64::NAN, f64::NAN)), z, h).unwrap()
}

/// Seeded points in `|z| ≤ radius`, at least `clearance` away from every declared locus.
fn clear_points(s: &ActivationSpec, seed: u64, n: usize, radius: f64, clearance: f64) -> Vec<Complex> {
    disc_points(seed, 20 * n, radius)
        .into_iter()
        .filter(|&z| s.exclusion_distance(z) > clearance)
        .take(n)
        .collect()
}

#[test]
fn catalog_shape() {
    let cat = catalog();
    assert!(cat.len() >= 34);
    let mut ids: Vec<_> = cat.iter().map(|s| s.id()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), cat.len());
    for s in &cat {
        if s.holomorphic() {
            assert_eq!(s.category(), Category::FullyComplex, "{}", s.id());
        }
        assert_eq!(s.differentiable(), s.id() != "split_step");
    }
}

#[test]
fn spec_text_round_trips() {
    for s in catalog() {
        let back: ActivationSpec = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }
    let m: ActivationSpec = "modrelu(b=-0.5)".parse().unwrap();
    assert_eq!(m.kind(), Kind::Modrelu { b: -0.5 });
    let z: ActivationSpec = "zprelu:alpha=0.1+0.2i".parse().unwrap();
    assert_eq!(z.kind(), Kind::Zprelu { alpha: c(0.1, 0.2) });
    assert!(matches!("nope".parse::<ActivationSpec>(), Err(Error::UnknownActivation(_))));
    assert!("apsf(a=-1)".parse::<ActivationSpec>().is_err());
    assert!("split_tanh(q=1)".parse::<ActivationSpec>().is_err());
}

#[test]
fn eval_examples() {
    assert_eq!(spec("split_tanh").eval(ZERO).unwrap(), ZERO);
    assert_eq!(spec("split_crelu").eval(c(1.0, -2.0)).unwrap(), c(1.0, 0.0));
    let m = ActivationSpec::with_params("modrelu", &[("b", c(-0.5, 0.0))]).unwrap();
    assert_eq!(m.eval(c(1.0, 0.0)).unwrap(), c(0.5, 0.0));
    assert_eq!(spec("cap_pls").eval(c(3.0, 0.0)).unwrap(), c(1.0, 0.0));
    assert_eq!(spec("zrelu").eval(c(-1.0, 1.0)).unwrap(), ZERO);
    assert_eq!(spec("split_sigmoid").eval(ZERO).unwrap(), c(0.5, 0.5));
}

#[test]
fn amplitude_phase_is_zero_at_origin() {
    for s in catalog().iter().filter(|s| s.category() == Category::AmplitudePhase) {
        assert_eq!(s.eval(ZERO).unwrap(), ZERO, "{}", s.id());
    }
}

#[test]
fn eval_errors() {
    let t = spec("fc_tanh");
    assert!(matches!(t.eval(c(0.0, FRAC_PI_2)), Err(Error::Singularity { .. })));
    assert!(matches!(t.eval(c(0.0, -FRAC_PI_2)), Err(Error::Singularity { .. })));
    assert!(matches!(spec("fc_exp").eval(c(701.0, 0.0)), Err(Error::Overflow { .. })));
    assert!(matches!(spec("fc_sigmoid").eval(c(-701.0, 0.0)), Err(Error::Overflow { .. })));
    assert!(matches!(spec("fc_arctanh").eval(c(1.0, 0.0)), Err(Error::Singularity { .. })));
    // Evaluation on a branch cut is allowed and takes the principal value.
    assert!(spec("fc_arcsin").eval(c(2.0, 0.0)).is_ok());
}

#[test]
fn partials_examples() {
    let j = spec("split_tanh").partials(ZERO).unwrap();
    assert_eq!((j.ux, j.uy, j.vx, j.vy), (1.0, 0.0, 0.0, 1.0));
    let j = spec("fc_tanh").partials(ZERO).unwrap();
    assert_eq!(j.dz, ONE);
    assert!(j.dzbar.abs() < 1e-15);
    let j = spec("apsf").partials(ZERO).unwrap();
    assert_eq!((j.ux, j.uy, j.vx, j.vy), (1.0, 0.0, 0.0, 1.0));
    let a2 = ActivationSpec::with_params("apsf", &[("a", c(2.0, 0.0)), ("b", c(3.0, 0.0))]).unwrap();
    let j = a2.partials(ZERO).unwrap();
    assert_eq!((j.ux, j.vy), (0.5, 0.5));
}

#[test]
fn psigmoid_derivative_matches_oracle_on_axes() {
    let s = ActivationSpec::with_params("split_psigmoid", &[("c1", ONE), ("c2", ONE)]).unwrap();
    for t in [-2.5, -0.7, 0.0, 0.4, 1.9] {
        for z in [c(t, 0.0), c(0.0, t), c(t, -t)] {
            let a = s.partials(z).unwrap();
            let f = fd_jet(&s, z, FD_STEP);
            assert!((a.ux - f.ux).abs() < 1e-10 && (a.vy - f.vy).abs() < 1e-10);
        }
    }
}

#[test]
fn partials_errors() {
    assert!(matches!(spec("split_step").partials(ONE), Err(Error::NonDifferentiable { .. })));
    assert!(matches!(spec("split_crelu").partials(c(0.0, 0.5)), Err(Error::Kink { .. })));
    assert!(matches!(spec("split_hard_tanh").partials(c(0.3, -1.0)), Err(Error::Kink { .. })));
    assert!(matches!(spec("cap_pls").partials(c(0.0, 1.0)), Err(Error::Kink { .. })));
    assert!(matches!(spec("modrelu").partials(c(0.7, 0.0)), Err(Error::Kink { .. })));
    assert!(matches!(spec("zrelu").partials(c(0.5, 0.0)), Err(Error::Kink { .. })));
    assert!(matches!(spec("cardioid").partials(ZERO), Err(Error::Kink { .. })));
    assert!(spec("split_crelu").partials(c(1e-9, 0.5)).is_ok());
}

#[test]
fn singularity_distance_examples() {
    assert_eq!(spec("fc_tanh").singularity_distance(c(0.0, FRAC_PI_2)), 0.0);
    assert_eq!(spec("fc_swish").singularity_distance(c(0.0, PI)), 0.0);
    assert_eq!(spec("split_tanh").singularity_distance(c(3.0, -1.0)), f64::INFINITY);
    let m = spec("fc_mish");
    let root = (c(-1.0, 1.0)).ln();
    assert!(m.singularity_distance(root) < 1e-15);
    assert!(m.singularity_distance(root + c(0.0, 2.0 * PI)) < 1e-14);
}

#[test]
fn mish_singularities_are_where_one_plus_exp_is_plus_minus_i() {
    for root in [c(-1.0, 1.0).ln(), c(-1.0, -1.0).ln()] {
        let w = ONE + root.exp();
        assert!((w * w + ONE).abs() < 1e-14);
    }
}

#[test]
fn suitability_examples() {
    let r = suitability_report(&spec("split_tanh"), &[ZERO]).unwrap();
    assert_eq!(r.points[0].det, 1.0);
    assert!(r.suitable());
    let r = suitability_report(&spec("split_crelu"), &[c(1.0, 1.0)]).unwrap();
    assert_eq!(r.points[0].det, 1.0);
    assert!(r.suitable());
    // A constant map has every partial equal to zero.
    let constant = |_: Complex| c(0.3, -0.2);
    for z in [ZERO, c(1.0, 2.0), c(-0.5, 0.1)] {
        let p = suitability_of_jet(z, &wirtinger_fd(constant, z, FD_STEP).unwrap());
        assert!(p.unsuitable);
    }
    // crelu collapses the second quadrant onto a line.
    let r = suitability_report(&spec("split_crelu"), &[c(-1.0, 1.0)]).unwrap();
    assert!(!r.suitable());
}

#[test]
fn suitability_exemption_patterns() {
    let j = WirtingerJet::from_partials(ZERO, 0.0, 1.0, 0.0, 2.0);
    assert!(suitability_of_jet(ZERO, &j).exempt);
    let j = WirtingerJet::from_partials(ZERO, 1.0, 0.0, 2.0, 0.0);
    assert!(suitability_of_jet(ZERO, &j).exempt);
}

#[test]
fn analytic_partials_match_oracle() {
    for (k, s) in catalog().iter().filter(|s| s.differentiable()).enumerate() {
        let pts = clear_points(s, 100 + k as u64, 100, 1.5, 0.05);
        assert_eq!(pts.len(), 100, "{}", s.id());
        for z in pts {
            let a = s.partials(z).unwrap();
            let f = fd_jet(s, z, FD_STEP);
            for (name, x, y) in [("ux", a.ux, f.ux), ("uy", a.uy, f.uy), ("vx", a.vx, f.vx), ("vy", a.vy, f.vy)] {
                let tol = (1e-4 * y.abs()).max(1e-7);
                assert!((x - y).abs() <= tol, "{} {name} at {z}: analytic {x}, fd {y}", s.id());
            }
        }
    }
}

#[test]
fn holomorphic_entries_satisfy_cauchy_riemann() {
    for (k, s) in catalog().iter().filter(|s| s.holomorphic()).enumerate() {
        for z in clear_points(s, 300 + k as u64, 100, 1.5, 0.05) {
            let (r1, r2) = cr_residual(&fd_jet(s, z, 1e-6));
            assert!(r1 < 1e-6 && r2 < 1e-6, "{} at {z}: {r1} {r2}", s.id());
        }
    }
}

#[test]
fn split_entries_have_cauchy_riemann_witnesses() {
    let j = fd_jet(&spec("split_tanh"), ONE, FD_STEP);
    assert!((j.ux - 1.0 / 1f64.cosh().powi(2)).abs() < 1e-8 && (j.vy - 1.0).abs() < 1e-8);
    for s in catalog().iter().filter(|s| s.category() == Category::SplitRealImaginary && s.differentiable()) {
        let worst = clear_points(s, 7, 400, 2.0, 0.05)
            .into_iter()
            .map(|z| {
                let (r1, r2) = cr_residual(&fd_jet(s, z, FD_STEP));
                r1.max(r2)
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3, "{}: {worst}", s.id());
    }
}

#[test]
fn split_partials_have_no_cross_terms() {
    for s in catalog().iter().filter(|s| s.category() == Category::SplitRealImaginary && s.differentiable()) {
        for z in clear_points(s, 9, 100, 3.0, 0.05) {
            let j = s.partials(z).unwrap();
            assert!(j.uy == 0.0 && j.vx == 0.0);
        }
    }
}

/// Checks `lo < v < hi`, relaxing to `≤` plus one ulp only where the exact
/// value lies within one ulp of the bound and so cannot be represented
/// strictly inside. The extra ulp covers moduli `|g(r)·e^{iθ}|` that round up.
fn in_open(v: f64, lo: f64, hi: f64, saturated: bool) -> bool {
    if saturated {
        lo <= v && v <= hi + f64::EPSILON
    } else {
        lo < v && v < hi
    }
}

#[test]
fn boundedness_over_large_disc() {
    let pts = disc_points(41, 10_000, 50.0);
    let sig = spec("split_sigmoid");
    let tanh = spec("split_tanh");
    let hard = spec("split_hard_tanh");
    for &z in &pts {
        let s = sig.eval(z).unwrap();
        // 1/(1+e^{-u}) rounds to 1.0 once e^{-u} < 2^-53, i.e. u > 36.7.
        assert!(in_open(s.re, 0.0, 1.0, z.re > 36.0) && in_open(s.im, 0.0, 1.0, z.im > 36.0));
        let t = tanh.eval(z).unwrap();
        assert!(in_open(t.re, -1.0, 1.0, z.re.abs() > 18.0) && in_open(t.im, -1.0, 1.0, z.im.abs() > 18.0));
        let h = hard.eval(z).unwrap();
        assert!(h.re.abs() <= 1.0 && h.im.abs() <= 1.0);
        // tanh(r) rounds to 1 past r ≈ 18.7, after which |e^{iθ}| itself may round up one ulp.
        let a = spec("aptf").eval(z).unwrap().abs();
        assert!(if z.abs() > 18.0 { a <= 1.0 + f64::EPSILON } else { a < 1.0 });
        assert!(spec("apsf").eval(z).unwrap().abs() < 1.0);
        let r = z.abs();
        assert!(in_open(spec("cap_es").eval(z).unwrap().abs(), -1.0, 1.0, r > 36.0));
        assert!(spec("cap_arctans").eval(z).unwrap().abs() < FRAC_PI_2);
        { let v = spec("cap_erfa").eval(z).unwrap().abs(); assert!(in_open(v, -1.0, 1.0, r > 5.8), "{r} {v:e} {}", 1.0 - v); }
        for s in catalog() {
            if let Bound::Modulus(m) = s.bound() {
                assert!(s.eval(z).unwrap().abs() <= m * (1.0 + 1e-15), "{}", s.id());
            }
        }
    }
    let wide = ActivationSpec::with_params("apsf", &[("a", c(0.5, 0.0)), ("b", c(2.5, 0.0))]).unwrap();
    assert!(pts.iter().all(|&z| wide.eval(z).unwrap().abs() < 2.5));
}

#[test]
fn phase_preservation() {
    let ids = ["aptf", "apsf", "siglog", "cap_es", "cap_arctans", "cap_erfa", "cap_pls", "cap_softplus", "cap_swish", "modrelu"];
    let pts = disc_points(5, 500, 5.0);
    for id in ids {
        let s = spec(id);
        for &z in &pts {
            if id == "modrelu" && z.abs() <= 0.7 {
                continue;
            }
            let w = s.eval(z).unwrap();
            assert!(crate::cplx::angle_diff(w.arg(), z.arg()).abs() <= 1e-10, "{id} at {z}");
        }
    }
}

#[test]
fn rotation_equivariance() {
    let thetas = disc_points(6, 50, PI);
    let pts = disc_points(7, 50, 3.0);
    for s in catalog().iter().filter(|s| s.category() == Category::AmplitudePhase) {
        for (t, &z) in thetas.iter().zip(&pts) {
            let rot = Complex::cis(t.re);
            let lhs = s.eval(rot * z).unwrap();
            let rhs = rot * s.eval(z).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12, "{}: {}", s.id(), (lhs - rhs).abs());
        }
    }
}

#[test]
fn symmetry_identities() {
    let pts = disc_points(8, 200, 4.0);
    let aptf = spec("aptf");
    for &z in &pts {
        assert_eq!(aptf.eval(-z).unwrap(), -aptf.eval(z).unwrap());
    }
    for id in ["split_tanh", "split_sigmoid", "split_elu", "split_mish", "split_softplus", "split_swish"] {
        let s = spec(id);
        for &z in &pts {
            let w = s.eval(z).unwrap();
            assert_eq!(s.eval(z.conj()).unwrap().re, w.re, "{id}");
            assert_eq!(s.eval(c(-z.re, z.im)).unwrap().im, w.im, "{id}");
        }
    }
}

#[test]
fn reduction_identities() {
    let card = spec("cardioid");
    for x in [-3.0, -1e-300, -0.5, 0.0, 1e-300, 0.25, 7.0] {
        let w = card.eval(c(x, 0.0)).unwrap();
        assert!(w.re == x.max(0.0) && w.im == 0.0, "cardioid({x}) = {w}");
    }
    let (siglog, apsf) = (spec("siglog"), spec("apsf"));
    let hard = spec("split_hard_tanh");
    let zrelu = spec("zrelu");
    for z in disc_points(10, 300, 5.0) {
        assert_eq!(siglog.eval(z).unwrap(), apsf.eval(z).unwrap());
        let clip = |u: f64| u.clamp(-1.0, 1.0);
        assert_eq!(hard.eval(z).unwrap(), c(clip(z.re), clip(z.im)));
        let once = zrelu.eval(z).unwrap();
        assert_eq!(zrelu.eval(once).unwrap(), once);
    }
}

#[test]
fn stanh_extrema() {
    let f = |x: f64| real::stanh(x);
    let argext = |lo: f64, hi: f64, sign: f64| {
        let n = 200_000;
        let mut best = (lo, sign * f(lo));
        for k in 0..=n {
            let x = lo + (hi - lo) * k as f64 / n as f64;
            if sign * f(x) > best.1 {
                best = (x, sign * f(x));
            }
        }
        (best.0, sign * best.1)
    };
    let (xmax, vmax) = argext(-10.0, 10.0, 1.0);
    let (xmin, vmin) = argext(-10.0, 10.0, -1.0);
    assert!((vmax - 1.01802).abs() < 1e-3 && (xmax - 4.06725).abs() < 1e-2, "{xmax} {vmax}");
    assert!((vmin + 0.0715838).abs() < 1e-3 && (xmin + 0.67288).abs() < 1e-2, "{xmin} {vmin}");
}

#[test]
fn modrelu_dead_zone() {
    let dead = spec("modrelu");
    for z in disc_points(12, 200, 0.699) {
        assert_eq!(dead.eval(z).unwrap(), ZERO);
    }
    let open = ActivationSpec::with_params("modrelu", &[("b", c(0.3, 0.0))]).unwrap();
    for z in disc_points(13, 200, 2.0) {
        if !z.is_zero() {
            assert!(open.eval(z).unwrap().abs() > 0.0);
        }
    }
}

#[test]
fn singular_neighbourhoods() {
    let t = spec("fc_tanh").eval(c(1e-7, FRAC_PI_2)).unwrap();
    assert!(t.abs() > 1e6);
    let z = c(1e-7, PI);
    assert!((ONE + (-z).exp()).abs() < 1e-6);
    let at = spec("fc_arctanh");
    assert_eq!(at.singularity_distance(c(1.5, 0.0)), 0.0);
    assert_eq!(at.singularity_distance(c(-3.0, 0.0)), 0.0);
    assert!((at.singularity_distance(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
    let above = at.eval(c(2.0, 1e-12)).unwrap();
    let below = at.eval(c(2.0, -1e-12)).unwrap();
    assert!((above.im - FRAC_PI_2).abs() < 1e-9 && (below.im + FRAC_PI_2).abs() < 1e-9);
    let inside_above = at.eval(c(0.5, 1e-12)).unwrap();
    let inside_below = at.eval(c(0.5, -1e-12)).unwrap();
    assert!((inside_above - inside_below).abs() < 1e-11);
}

#[test]
fn inverse_entries_commute_with_conjugation_off_cuts() {
    for id in ["fc_arcsin", "fc_arccos", "fc_arctan", "fc_arctanh", "fc_arcsinh"] {
        let s = spec(id);
        for z in clear_points(&s, 14, 100, 3.0, 0.05) {
            let lhs = s.eval(z.conj()).unwrap();
            let rhs = s.eval(z).unwrap().conj();
            assert!((lhs - rhs).abs() < 1e-14, "{id} at {z}");
        }
    }
}

#[test]
fn records_are_listable() {
    for s in catalog() {
        let rec = serde_json::to_string(&s.record()).unwrap();
        assert!(rec.contains(s.id()));
    }
}

proptest! {
    #[test]
    fn jet_wirtinger_identity(ux in -3.0..3.0f64, uy in -3.0..3.0f64, vx in -3.0..3.0f64, vy in -3.0..3.0f64) {
        let j = WirtingerJet::from_partials(ZERO, ux, uy, vx, vy);
        // ∂f/∂x = ∂f/∂z + ∂f/∂z*, ∂f/∂y = i(∂f/∂z − ∂f/∂z*)
        prop_assert!((j.dz + j.dzbar - j.d_dx()).abs() <= 1e-12);
        prop_assert!(((j.dz - j.dzbar).mul_i() - j.d_dy()).abs() <= 1e-12);
    }

    #[test]
    fn split_step_takes_the_closed_branch(u in -5.0..5.0f64) {
        let s = spec("split_step");
        let w = s.eval(c(u, -u)).unwrap();
        prop_assert_eq!(w.re, if u >= 0.0 { 1.0 } else { 0.0 });
        prop_assert_eq!(w.im, if -u >= 0.0 { 1.0 } else { 0.0 });
    }
}

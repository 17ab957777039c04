use lhsphere::mie::{coefficient, coefficient_with_arguments, p_te, q_tm, Polarization};
use lhsphere::{Medium, SphereSystem};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nonzero(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let v: f64 = rng.gen_range(lo..hi);
        if v.abs() > 1e-2 {
            return v;
        }
    }
}

/// Host media are drawn with εμ > 0 so the exterior supports propagating waves.
fn random_lossless(rng: &mut ChaCha8Rng) -> SphereSystem {
    let interior = Medium::real(nonzero(rng, -10.0, 10.0), nonzero(rng, -10.0, 10.0)).unwrap();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let exterior = Medium::real(sign * rng.gen_range(0.2..5.0), sign * rng.gen_range(0.2..5.0)).unwrap();
    SphereSystem::new(interior, exterior, rng.gen_range(0.05..10.0)).unwrap()
}

fn j_series(n: usize, x: f64) -> f64 {
    let mut term = x.powi(n as i32) / (1..=2 * n + 1).step_by(2).map(|k| k as f64).product::<f64>();
    let mut sum = term;
    for k in 1..300 {
        term *= -x * x / 2.0 / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Textbook Mie coefficients a_n, b_n for a sphere of relative index `m` and
/// relative permeability `mu_rel` in a unit host (time dependence exp(-iωt)),
/// built from logarithmic derivatives, ascending series for ψ_n and the
/// (stable) upward recurrence for χ_n. Shares no code with the library.
fn textbook_mie(x: f64, m: Complex64, mu_rel: Complex64, nmax: usize) -> Vec<(Complex64, Complex64)> {
    let mx = m * x;
    let nstart = nmax + 40 + (mx.norm() as usize);
    let mut d = vec![Complex64::new(0.0, 0.0); nstart + 1];
    for k in (1..=nstart).rev() {
        let kf = k as f64;
        d[k - 1] = kf / mx - 1.0 / (d[k] + kf / mx);
    }
    let psi_of = |n: usize| x * j_series(n, x);
    let (mut chi_prev, mut chi) = (-x.sin(), x.cos());
    let mut out = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for n in 1..=nmax {
        let nf = n as f64;
        let (psi, psi_n) = (psi_of(n - 1), psi_of(n));
        let chi_n = (2.0 * nf - 1.0) / x * chi - chi_prev;
        let xi = Complex64::new(psi_n, -chi_n);
        let xi_prev = Complex64::new(psi, -chi);
        // Log-derivative weighted by μ1/m (TM) or m/μ1 (TE).
        let a_fac = d[n] / (m / mu_rel) + nf / x;
        let b_fac = d[n] * (m / mu_rel) + nf / x;
        let a = (a_fac * psi_n - psi) / (a_fac * xi - xi_prev);
        let b = (b_fac * psi_n - psi) / (b_fac * xi - xi_prev);
        out.push((a, b));
        chi_prev = chi;
        chi = chi_n;
    }
    out
}

#[test]
fn matches_textbook_mie_convention() {
    // Convention mapping established here: q_n = a_n and p_n = b_n exactly
    // (no sign flip, no conjugation) for exp(-iωt) fields.
    let cases = [
        (4.0, 1.0, 1.0),
        (4.0, 1.0, 2.5),
        (2.25, 1.0, 5.0),
        (4.0, 1.05, 1.0),
        (6.0, 2.0, 0.7),
    ];
    for (eps, mu, x) in cases {
        let sys = SphereSystem::new(Medium::real(eps, mu).unwrap(), Medium::vacuum(), x).unwrap();
        let m = Complex64::new(eps * mu, 0.0).sqrt();
        let oracle = textbook_mie(x, m, Complex64::new(mu, 0.0), 12);

        // Oracle sanity: a lossless sphere conserves energy, Q_ext = Q_sca.
        let (mut ext, mut sca) = (0.0, 0.0);
        for (k, (a, b)) in oracle.iter().enumerate() {
            let w = 2.0 * (k + 1) as f64 + 1.0;
            ext += w * (a.re + b.re);
            sca += w * (a.norm_sqr() + b.norm_sqr());
        }
        assert!((ext - sca).abs() < 1e-10 * ext.abs().max(1e-30));

        for (k, (a, b)) in oracle.iter().enumerate() {
            let n = k as u32 + 1;
            let q = q_tm(n, &sys).unwrap().value;
            let p = p_te(n, &sys).unwrap().value;
            if a.norm() > 1e-250 {
                assert!(
                    (q - a).norm() <= 1e-9 * a.norm(),
                    "eps={eps} mu={mu} x={x} n={n}: q={q} a={a}"
                );
            }
            if b.norm() > 1e-250 {
                assert!(
                    (p - b).norm() <= 1e-9 * b.norm(),
                    "eps={eps} mu={mu} x={x} n={n}: p={p} b={b}"
                );
            }
        }
    }
    // Spot value from the ε1 = 4, μ1 = 1, x = 1 case, n = 1.
    let sys = SphereSystem::new(Medium::real(4.0, 1.0).unwrap(), Medium::vacuum(), 1.0).unwrap();
    let q1 = q_tm(1, &sys).unwrap().value;
    let a1 = textbook_mie(1.0, Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0), 1)[0].0;
    assert!((q1 - a1).norm() < 1e-12);
}

#[test]
fn unitarity_circle_for_lossless_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut checked = 0;
    for _ in 0..50 {
        let sys = random_lossless(&mut rng);
        for n in 1..=20 {
            for pol in [Polarization::Tm, Polarization::Te] {
                let c = match coefficient(pol, n, &sys) {
                    Ok(c) => c,
                    // Deep-Rayleigh orders can underflow; they are not on the circle test's path.
                    Err(lhsphere::Error::Underflow { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let dev = ((Complex64::new(1.0, 0.0) - 2.0 * c.value).norm() - 1.0).abs();
                assert!(dev < 1e-8, "{sys:?} n={n} {pol:?}: |1-2q| deviates by {dev:e}");
                checked += 1;
            }
        }
    }
    assert!(checked > 1500);
}

#[test]
fn invariant_under_opposite_interior_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb4a2c4);
    for _ in 0..60 {
        let interior = Medium::new(
            Complex64::new(nonzero(&mut rng, -10.0, 10.0), rng.gen_range(0.0..0.5)),
            Complex64::new(nonzero(&mut rng, -10.0, 10.0), rng.gen_range(0.0..0.5)),
        )
        .unwrap();
        let exterior = Medium::real(rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0)).unwrap();
        let sys = SphereSystem::new(interior, exterior, rng.gen_range(0.1..5.0)).unwrap();
        let args = sys.wave_arguments();
        for n in 1..=15 {
            for pol in [Polarization::Tm, Polarization::Te] {
                let a = coefficient_with_arguments(pol, n, &interior, &exterior, args.z1, args.z2).unwrap();
                let b = coefficient_with_arguments(pol, n, &interior, &exterior, -args.z1, args.z2).unwrap();
                let rel = (a.value - b.value).norm() / a.value.norm().max(1e-300);
                assert!(rel < 1e-12, "{sys:?} n={n}: rel {rel:e}");
            }
        }
    }
}

#[test]
fn duality_is_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let interior = Medium::real(nonzero(&mut rng, -10.0, 10.0), nonzero(&mut rng, -10.0, 10.0)).unwrap();
        let exterior = Medium::real(nonzero(&mut rng, -10.0, 10.0), nonzero(&mut rng, -10.0, 10.0)).unwrap();
        let sys = SphereSystem::new(interior, exterior, rng.gen_range(0.01..5.0)).unwrap();
        for n in 1..=8 {
            match (p_te(n, &sys), q_tm(n, &sys.swapped())) {
                (Ok(p), Ok(q)) => {
                    assert_eq!(p.value.re.to_bits(), q.value.re.to_bits());
                    assert_eq!(p.value.im.to_bits(), q.value.im.to_bits());
                }
                (Err(a), Err(b)) => assert_eq!(a, b),
                (a, b) => panic!("duality broke: {a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn rayleigh_scaling() {
    let media = [(4.0, 1.05), (-4.0, -1.05), (2.0, 3.0), (-3.0, 2.0)];
    for (e, m) in media {
        for n in 1..=4u32 {
            for pol in [Polarization::Tm, Polarization::Te] {
                let at = |x: f64| {
                    let sys = SphereSystem::new(Medium::real(e, m).unwrap(), Medium::vacuum(), x).unwrap();
                    coefficient(pol, n, &sys).unwrap().value.norm()
                };
                let slope = (at(1e-2).ln() - at(1e-3).ln()) / (1e-2f64.ln() - 1e-3f64.ln());
                let want = (2 * n + 1) as f64;
                assert!(
                    (slope - want).abs() < 0.01 * want,
                    "({e},{m}) n={n} {pol:?}: slope {slope}"
                );
            }
        }
    }
}

//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N ... PASS|FAIL` line. Run with
//! `cargo test -p kdwit --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::Rng;

use kdwit::case_studies::{
    dft_matrix, haar_genericity_study, rho_lambda, run_spin1_report, Spin1Fixture,
};
use kdwit::geometry::{facet_enumeration, finite_convex_roof, membership_lp};
use kdwit::incompatibility::{complete_incompatibility, support_counts_mixed};
use kdwit::kd::{kd_table, kd_table_operator};
use kdwit::numerics::random::{
    haar_unitary_from_rng, random_density, random_simplex, rng_from_seed,
};
use kdwit::numerics::{hermitian_eig, CMatrix, C64};
use kdwit::pure_positive::{enumerate_min_uncertainty_states, filter_kd_positive_pure};
use kdwit::roof::{nonpositivity_roof_bounds, support_roof_bounds, RoofConfig, UpperBoundSource};
use kdwit::{DensityMatrix, PureState, Tolerances, TransitionMatrix};

type Outcome = Result<String, String>;

fn verdict(n: usize, title: &str, start: Instant, limit: Option<Duration>, outcome: Outcome) {
    let elapsed = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(_), Some(l)) if elapsed > l => Err(format!("took {:.2?}, limit {:.0?}", elapsed, l)),
        (o, _) => o,
    };
    match &outcome {
        Ok(detail) => println!("criterion {n} [{title}]: PASS ({detail}; {elapsed:.2?})"),
        Err(why) => println!("criterion {n} [{title}]: FAIL ({why}; {elapsed:.2?})"),
    }
    if let Err(why) = outcome {
        panic!("criterion {n} failed: {why}");
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if let false = $cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn real_matrix(rows: &[[f64; 3]; 3], scale: f64) -> CMatrix {
    CMatrix::from_fn(3, 3, |i, j| C64::new(rows[i][j] * scale, 0.0))
}

fn f_star() -> CMatrix {
    real_matrix(
        &[[2.0, -2.0, -3.0], [-2.0, 6.0, -1.0], [-3.0, -1.0, 4.0]],
        1.0 / 12.0,
    )
}

fn state(amps: &[f64]) -> PureState {
    PureState::normalized(amps.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap()
}

/// The fifteen minimal-uncertainty states in the order
/// a1 a2 a3 b1 b2 b3 φ1 φ2 φ3 ψ1..ψ6, written out from their closed forms.
fn listed_states(u: &TransitionMatrix) -> Vec<PureState> {
    let mut v: Vec<PureState> = (0..3).map(|i| PureState::basis(3, i)).collect();
    v.extend((0..3).map(|j| PureState::new(u.b_vector(j)).unwrap()));
    for amps in [
        [0.0, 1.0, -1.0],
        [1.0, 0.0, -1.0],
        [1.0, -1.0, 0.0],
        [1.0, 2.0, 0.0],
        [2.0, 1.0, 0.0],
        [1.0, 0.0, 2.0],
        [2.0, 0.0, 1.0],
        [0.0, 1.0, 2.0],
        [0.0, 2.0, 1.0],
    ] {
        v.push(state(&amps));
    }
    v
}

fn projectors(states: &[PureState]) -> Vec<DensityMatrix> {
    states.iter().map(DensityMatrix::from_pure).collect()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn closed_form_eigenvalues(l: f64) -> Vec<f64> {
    let root = (7.0 * l * l - 32.0 * l + 160.0).sqrt();
    sorted(vec![
        (7.0 * l + 2.0) / 18.0,
        (root - 7.0 * l + 16.0) / 36.0,
        (-root - 7.0 * l + 16.0) / 36.0,
    ])
}

fn criterion_1() -> Outcome {
    let report = run_spin1_report().map_err(|e| e.to_string())?;
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    ensure!(failed.is_empty(), "report checks failed: {failed:?}");

    let fx = Spin1Fixture::new();
    let f = f_star();
    ensure!(
        (&fx.f_star - &f).max_abs() < 1e-15,
        "fixture F★ differs from its closed form"
    );
    let f2 = (&f * &f).trace();
    ensure!(
        (f2.re - 7.0 / 12.0).abs() <= 1e-12 && f2.im.abs() <= 1e-12,
        "Tr(F★²) = {f2}"
    );

    let q = kd_table_operator(&f, &fx.u).map_err(|e| e.to_string())?;
    for i in 0..3 {
        for j in 0..3 {
            let z = q.entry(i, j);
            ensure!(
                z.im.abs() <= 1e-10 && z.re >= -1e-10,
                "Q(F★)[{i}][{j}] = {z}"
            );
        }
    }

    let boundary = 4.0 / 7.0;
    for k in 0..21 {
        let l = k as f64 / 20.0;
        let rho = rho_lambda(l).map_err(|e| e.to_string())?;
        let t = f.trace_product_re(&rho);
        ensure!((t - (0.5 + l / 12.0)).abs() <= 1e-12, "Tr(F★ρ_{l}) = {t}");
        let eig = sorted(hermitian_eig(&rho).map_err(|e| e.to_string())?.eigenvalues);
        let expected = closed_form_eigenvalues(l);
        for (a, b) in eig.iter().zip(&expected) {
            ensure!((a - b).abs() <= 1e-9, "eigenvalue {a} vs {b} at λ = {l}");
        }
        let psd = eig[0] >= -1e-9;
        ensure!(psd == (l <= boundary), "PSD = {psd} at λ = {l}");
    }
    let at_boundary = hermitian_eig(&rho_lambda(boundary).unwrap())
        .unwrap()
        .min_eigenvalue();
    ensure!(
        at_boundary.abs() <= 1e-9,
        "smallest eigenvalue at 4/7 is {at_boundary}"
    );
    let beyond = hermitian_eig(&rho_lambda(boundary + 1e-3).unwrap())
        .unwrap()
        .min_eigenvalue();
    ensure!(
        beyond < -1e-9,
        "smallest eigenvalue at 4/7 + 1e-3 is {beyond}"
    );
    Ok(format!(
        "{} report checks, Tr(F★²) = {:.15}, r_min(4/7) = {at_boundary:.1e}",
        report.checks.len(),
        f2.re
    ))
}

#[test]
fn criterion_1_spin1_values() {
    let start = Instant::now();
    verdict(
        1,
        "spin-1 closed-form values",
        start,
        Some(Duration::from_secs(10)),
        criterion_1(),
    );
}

fn criterion_2() -> Outcome {
    let u = Spin1Fixture::new().u;
    let expected = listed_states(&u);
    let found = enumerate_min_uncertainty_states(&u, 1e-9).map_err(|e| e.to_string())?;
    ensure!(
        found.len() == 15,
        "{} minimal-uncertainty states",
        found.len()
    );
    let mut worst: f64 = 0.0;
    let mut used = [false; 15];
    for (k, e) in expected.iter().enumerate() {
        let (idx, dist) = found
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.phase_distance(e)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        ensure!(
            dist <= 1e-8 && !used[idx],
            "listed state {k} unmatched (distance {dist:.2e})"
        );
        used[idx] = true;
        worst = worst.max(dist);
    }

    let positive = filter_kd_positive_pure(&found, &u, 1e-9).map_err(|e| e.to_string())?;
    ensure!(positive.len() == 9, "{} KD-positive states", positive.len());
    for (k, e) in expected.iter().enumerate() {
        let kept = positive.states.iter().any(|s| s.phase_distance(e) <= 1e-8);
        ensure!(kept == (k < 9), "listed state {k}: kept = {kept}");
    }
    Ok(format!(
        "15 states, 9 KD positive, worst phase distance {worst:.1e}"
    ))
}

#[test]
fn criterion_2_enumeration() {
    let start = Instant::now();
    verdict(
        2,
        "minimal-uncertainty enumeration",
        start,
        None,
        criterion_2(),
    );
}

fn criterion_3() -> Outcome {
    let u = Spin1Fixture::new().u;
    let states = listed_states(&u);
    let facets = facet_enumeration(&projectors(&states)).map_err(|e| e.to_string())?;
    ensure!(facets.len() == 28, "{} facets", facets.len());

    let saturating = vec![1, 3, 6, 7, 8];
    let facet = facets
        .iter()
        .find(|f| f.active == saturating)
        .ok_or("no facet with active set {a2, b1, φ1, φ2, φ3}")?;
    let values: Vec<f64> = states
        .iter()
        .map(|s| facet.functional.expectation(s.amplitudes()))
        .collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure!(
        (max - facet.offset).abs() <= 1e-8,
        "facet maximum {max} vs offset {}",
        facet.offset
    );
    let at_max: Vec<usize> = (0..15)
        .filter(|&k| (values[k] - max).abs() <= 1e-8)
        .collect();
    ensure!(at_max == saturating, "facet saturated by {at_max:?}");

    let f = f_star();
    let star: Vec<f64> = states
        .iter()
        .map(|s| f.expectation(s.amplitudes()))
        .collect();
    let star_max: Vec<usize> = (0..15).filter(|&k| (star[k] - 0.5).abs() <= 1e-8).collect();
    ensure!(
        star.iter().all(|&v| v <= 0.5 + 1e-8),
        "some ⟨ψ|F★|ψ⟩ exceeds 1/2"
    );
    ensure!(star_max == saturating, "F★ saturated by {star_max:?}");

    let traceless = &f - &CMatrix::identity(3).scale_real(1.0 / 3.0);
    let normal_form = traceless.scale_real(1.0 / traceless.frobenius_norm());
    let diff = (&facet.functional - &normal_form).max_abs();
    ensure!(
        diff <= 1e-8,
        "facet functional differs from normalized F★ by {diff:.2e}"
    );
    Ok(format!("28 facets, F★ facet matched within {diff:.1e}"))
}

#[test]
fn criterion_3_facets() {
    let start = Instant::now();
    verdict(3, "hull facets", start, None, criterion_3());
}

fn criterion_4() -> Outcome {
    let u = Spin1Fixture::new().u;
    let generators = projectors(&listed_states(&u));
    let tol = Tolerances::default();
    let config = RoofConfig::default();
    let mut details = Vec::new();
    for l in [0.1, 0.25, 0.5, 4.0 / 7.0] {
        let rho = DensityMatrix::new(rho_lambda(l).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let cert =
            membership_lp(&rho, &generators, tol.lp_feasibility).map_err(|e| e.to_string())?;
        ensure!(
            cert.is_outside() && cert.margin > 1e-6,
            "λ = {l}: verdict {:?}, margin {}",
            cert.verdict,
            cert.margin
        );

        let table = kd_table(&rho, &u).map_err(|e| e.to_string())?;
        ensure!(
            table.is_kd_positive(tol.positivity),
            "λ = {l}: not KD positive"
        );
        let n = table.total_nonpositivity();
        ensure!((n - 1.0).abs() <= 2e-9, "λ = {l}: N = {n}");

        let support = support_roof_bounds(&rho, &u, &config, &tol).map_err(|e| e.to_string())?;
        ensure!(
            support.lower_bound.value > 4.0,
            "λ = {l}: support roof lower bound {}",
            support.lower_bound.value
        );

        let est =
            nonpositivity_roof_bounds(&rho, &u, None, &config, &tol).map_err(|e| e.to_string())?;
        let lower_ok =
            est.lower_bound.value > 1.0 || (est.lower_bound.strict && est.lower_bound.value >= 1.0);
        ensure!(lower_ok, "λ = {l}: N^CR lower bound {:?}", est.lower_bound);
        ensure!(
            est.upper_source == UpperBoundSource::Annealing,
            "λ = {l}: upper bound from {:?}",
            est.upper_source
        );
        ensure!(
            est.upper_bound > 1.0 + 1e-4,
            "λ = {l}: N^CR upper bound {}",
            est.upper_bound
        );
        details.push(format!(
            "λ={l:.3}: margin {:.4}, n^CR >= {:.3}, N^CR <= {:.4}",
            cert.margin, support.lower_bound.value, est.upper_bound
        ));
    }
    Ok(details.join("; "))
}

#[test]
fn criterion_4_counterexample() {
    let start = Instant::now();
    verdict(
        4,
        "counterexample certification",
        start,
        None,
        criterion_4(),
    );
}

fn criterion_5() -> Outcome {
    let fx = Spin1Fixture::new();
    let positive = fx.kd_positive_pure_states();
    let generators = projectors(&positive);
    let tol = Tolerances::default();
    let config = RoofConfig::default();
    let mut rng = rng_from_seed(5);
    for sample in 0..200 {
        // random face of the simplex: between 2 and 9 states
        let size = rng.random_range(2..=9);
        let mut idx: Vec<usize> = (0..9).collect();
        for k in 0..size {
            let j = rng.random_range(k..9);
            idx.swap(k, j);
        }
        let chosen: Vec<DensityMatrix> =
            idx[..size].iter().map(|&i| generators[i].clone()).collect();
        let rho = DensityMatrix::mixture(&random_simplex(size, &mut rng), &chosen)
            .map_err(|e| e.to_string())?;

        let support = support_roof_bounds(&rho, &fx.u, &config, &tol).map_err(|e| e.to_string())?;
        let inside = support.membership.as_ref().is_some_and(|c| c.is_inside());
        ensure!(
            inside,
            "sample {sample}: not certified inside the minimal-uncertainty hull"
        );
        ensure!(
            support.exact && (support.upper_bound - 4.0).abs() <= 1e-9,
            "sample {sample}: n^CR bounds [{}, {}]",
            support.lower_bound.value,
            support.upper_bound
        );

        let est = nonpositivity_roof_bounds(&rho, &fx.u, Some(&positive), &config, &tol)
            .map_err(|e| e.to_string())?;
        let inside = est.membership.as_ref().is_some_and(|c| c.is_inside());
        ensure!(
            inside,
            "sample {sample}: not certified inside the KD-positive hull"
        );
        ensure!(
            est.exact && (est.upper_bound - 1.0).abs() <= 2e-9,
            "sample {sample}: N^CR bounds [{}, {}]",
            est.lower_bound.value,
            est.upper_bound
        );
    }
    Ok("200 mixtures: n^CR = 4 and N^CR = 1, both exact".into())
}

#[test]
fn criterion_5_pure_positive_mixtures() {
    let start = Instant::now();
    verdict(
        5,
        "mixtures of pure KD-positive states",
        start,
        Some(Duration::from_secs(60)),
        criterion_5(),
    );
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(6);
    let mut positive_checked = 0;
    for sample in 0..1000 {
        let d = [2, 3, 4][sample % 3];
        let u =
            TransitionMatrix::new(haar_unitary_from_rng(d, &mut rng)).map_err(|e| e.to_string())?;
        let rank = rng.random_range(1..=d);
        let rho =
            DensityMatrix::new(random_density(d, rank, &mut rng)).map_err(|e| e.to_string())?;
        let table = kd_table(&rho, &u).map_err(|e| e.to_string())?;

        // marginals against direct matrix arithmetic
        let rotated = &(&u.matrix().adjoint() * rho.matrix()) * u.matrix();
        for i in 0..d {
            let row: C64 = (0..d).map(|j| table.entry(i, j)).sum();
            ensure!(
                (row - rho.matrix()[(i, i)]).norm() <= 1e-9,
                "sample {sample}: A marginal {i}"
            );
            let col: C64 = (0..d).map(|k| table.entry(k, i)).sum();
            ensure!(
                (col - rotated[(i, i)]).norm() <= 1e-9,
                "sample {sample}: B marginal {i}"
            );
        }

        let n = table.total_nonpositivity();
        let direct: f64 = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| table.entry(i, j).norm())
            .sum();
        ensure!(
            (n - direct).abs() <= 1e-12,
            "sample {sample}: N = {n}, direct sum {direct}"
        );
        ensure!(n >= 1.0 - 1e-9, "sample {sample}: N = {n}");
        let positive = table.is_kd_positive(1e-9);
        ensure!(
            positive == ((n - 1.0).abs() <= 2e-9),
            "sample {sample}: positive = {positive}, N = {n}"
        );

        // dephasing in the A basis gives a KD-positive state
        let diag: Vec<f64> = (0..d).map(|i| rho.matrix()[(i, i)].re).collect();
        let dephased = DensityMatrix::new(CMatrix::diag_real(&diag)).map_err(|e| e.to_string())?;
        let t = kd_table(&dephased, &u).map_err(|e| e.to_string())?;
        let nd = t.total_nonpositivity();
        ensure!(
            t.is_kd_positive(1e-9) && (nd - 1.0).abs() <= 2e-9,
            "sample {sample}: dephased N = {nd}"
        );
        positive_checked += 1;

        let other =
            DensityMatrix::new(random_density(d, d, &mut rng)).map_err(|e| e.to_string())?;
        let w: f64 = rng.random();
        let mix = DensityMatrix::mixture(&[w, 1.0 - w], &[rho.clone(), other.clone()])
            .map_err(|e| e.to_string())?;
        let nm = kd_table(&mix, &u)
            .map_err(|e| e.to_string())?
            .total_nonpositivity();
        let no = kd_table(&other, &u)
            .map_err(|e| e.to_string())?
            .total_nonpositivity();
        ensure!(
            nm <= w * n + (1.0 - w) * no + 1e-9,
            "sample {sample}: convexity {nm} > {w}·{n} + (1−{w})·{no}"
        );
    }
    Ok(format!(
        "1000 pairs, {positive_checked} dephased KD-positive controls"
    ))
}

#[test]
fn criterion_6_witness_laws() {
    let start = Instant::now();
    verdict(6, "witness laws", start, None, criterion_6());
}

fn criterion_7() -> Outcome {
    for d in [2, 3, 5] {
        let r =
            complete_incompatibility(&dft_matrix(d).unwrap(), 1e-9).map_err(|e| e.to_string())?;
        ensure!(
            r.completely_incompatible,
            "DFT {d}: smallest minor {}",
            r.min_abs_minor
        );
    }
    let u4 = dft_matrix(4).unwrap();
    let r = complete_incompatibility(&u4, 1e-9).map_err(|e| e.to_string())?;
    ensure!(
        !r.completely_incompatible,
        "DFT 4 reported completely incompatible"
    );
    let loc = &r.argmin;
    ensure!(
        loc.order == 2 && r.min_abs_minor <= 1e-12,
        "DFT 4 argmin order {} value {}",
        loc.order,
        r.min_abs_minor
    );
    let m = u4.matrix();
    let (a, b) = ((loc.rows[0], loc.rows[1]), (loc.cols[0], loc.cols[1]));
    let direct = m[(a.0, b.0)] * m[(a.1, b.1)] - m[(a.0, b.1)] * m[(a.1, b.0)];
    ensure!(
        direct.norm() <= 1e-12,
        "reported minor recomputes to {direct}"
    );

    let mut fractions = Vec::new();
    for d in [2, 3, 4] {
        let study = haar_genericity_study(d, 500, 7 + d as u64).map_err(|e| e.to_string())?;
        ensure!(
            study.samples == 500 && study.fraction == 1.0,
            "Haar d = {d}: fraction {}",
            study.fraction
        );
        fractions.push(format!("d={d}: {}", study.fraction));
    }
    Ok(format!(
        "DFT 2,3,5 incompatible; DFT 4 minor rows {:?} cols {:?} = {:.1e}; Haar {}",
        loc.rows,
        loc.cols,
        r.min_abs_minor,
        fractions.join(", ")
    ))
}

#[test]
fn criterion_7_incompatibility() {
    let start = Instant::now();
    verdict(7, "complete incompatibility", start, None, criterion_7());
}

/// Real qubit state with Bloch coordinates `(x, 0, y)`; the unit disc maps
/// onto the real density matrices and the circle onto pure states.
fn disc_point(x: f64, y: f64) -> DensityMatrix {
    let m = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => C64::new((1.0 + y) / 2.0, 0.0),
        (1, 1) => C64::new((1.0 - y) / 2.0, 0.0),
        _ => C64::new(x / 2.0, 0.0),
    });
    DensityMatrix::with_tolerance(m, 1e-9).unwrap()
}

/// `n` points on the unit circle, none on the horizontal axis, with `s = 1`
/// on the upper half and `0` on the lower half.
fn half_circle(n: usize) -> (Vec<(f64, f64)>, Vec<f64>) {
    let points: Vec<(f64, f64)> = (0..n)
        .map(|k| 2.0 * PI * (k as f64 + 0.5) / n as f64)
        .map(|t| (t.cos(), t.sin()))
        .collect();
    let values = points
        .iter()
        .map(|p| if p.1 >= 0.0 { 1.0 } else { 0.0 })
        .collect();
    (points, values)
}

/// Signed distance to the boundary of a convex polygon with vertices in
/// counterclockwise order; positive inside.
fn polygon_depth(p: (f64, f64), vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|k| {
            let (a, b) = (vertices[k], vertices[(k + 1) % n]);
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            (ex * (p.1 - a.1) - ey * (p.0 - a.0)) / (ex * ex + ey * ey).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

fn roof_at(x: f64, y: f64, values: &[f64], generators: &[DensityMatrix]) -> Result<f64, String> {
    finite_convex_roof(values, &disc_point(x, y), generators, 1e-8)
        .map(|r| r.value)
        .map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let (points, values) = half_circle(64);
    let generators: Vec<DensityMatrix> = points.iter().map(|p| disc_point(p.0, p.1)).collect();
    let lower: Vec<(f64, f64)> = points.iter().cloned().filter(|p| p.1 < 0.0).collect();
    let mut rng = rng_from_seed(8);

    for (k, p) in points.iter().enumerate() {
        let v = roof_at(p.0, p.1, &values, &generators)?;
        ensure!(
            (v - values[k]).abs() <= 1e-9,
            "generator {k}: roof {v}, s = {}",
            values[k]
        );
    }
    for sample in 0..200 {
        let w = random_simplex(lower.len(), &mut rng);
        let (x, y) = lower
            .iter()
            .zip(&w)
            .fold((0.0, 0.0), |acc, (p, w)| (acc.0 + w * p.0, acc.1 + w * p.1));
        let v = roof_at(x, y, &values, &generators)?;
        ensure!(v.abs() <= 1e-12, "lower-half mixture {sample}: roof {v}");
    }
    let (mut inside, mut outside, mut skipped) = (0, 0, 0);
    while inside + outside < 400 {
        let (x, y): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if polygon_depth((x, y), &points) < 1e-6 {
            continue;
        }
        let depth = polygon_depth((x, y), &lower);
        if depth.abs() < 1e-6 {
            skipped += 1;
            continue;
        }
        let v = roof_at(x, y, &values, &generators)?;
        if depth > 0.0 {
            ensure!(
                v.abs() <= 1e-12,
                "({x:.4}, {y:.4}) inside the lower hull: roof {v}"
            );
            inside += 1;
        } else {
            ensure!(
                v > 1e-9,
                "({x:.4}, {y:.4}) outside the lower hull: roof {v}"
            );
            outside += 1;
        }
    }
    // on the horizontal diameter the finite roof is positive and shrinks as the circle is refined
    for x in [0.0, 0.5, 0.9] {
        let mut previous = f64::INFINITY;
        for n in [64, 256, 1024] {
            let (pts, vals) = half_circle(n);
            let gens: Vec<DensityMatrix> = pts.iter().map(|p| disc_point(p.0, p.1)).collect();
            let v = roof_at(x, 0.0, &vals, &gens)?;
            ensure!(
                v > 0.0 && v < previous,
                "diameter point x = {x}, n = {n}: roof {v} after {previous}"
            );
            previous = v;
        }
    }

    let u = Spin1Fixture::new().u;
    let a: Vec<DensityMatrix> = (0..3)
        .map(|i| DensityMatrix::from_pure(&PureState::basis(3, i)))
        .collect();
    let b: Vec<DensityMatrix> = (0..3)
        .map(|j| DensityMatrix::from_pure(&PureState::new(u.b_vector(j)).unwrap()))
        .collect();
    let mut cases = [0usize; 3];
    for sample in 0..100 {
        let case = sample % 3;
        let mut mask = || loop {
            let m: Vec<bool> = (0..3).map(|_| rng.random_bool(0.5)).collect();
            if m.iter().any(|&x| x) {
                break m;
            }
        };
        let (la, mb) = match case {
            0 => (mask(), mask()),
            1 => (mask(), vec![false; 3]),
            _ => (vec![false; 3], mask()),
        };
        let mut states = Vec::new();
        for i in 0..3 {
            if la[i] {
                states.push(a[i].clone());
            }
        }
        for j in 0..3 {
            if mb[j] {
                states.push(b[j].clone());
            }
        }
        let rho = DensityMatrix::mixture(&random_simplex(states.len(), &mut rng), &states)
            .map_err(|e| e.to_string())?;
        let count = support_counts_mixed(&rho, &u, 1e-9).map_err(|e| e.to_string())?;
        let expected = match case {
            0 => 6,
            1 => 3 + la.iter().filter(|&&x| x).count(),
            _ => 3 + mb.iter().filter(|&&x| x).count(),
        };
        ensure!(
            count.n_ab() == expected,
            "mixture case {} sample {sample}: n_AB = {}, expected {expected}",
            case + 1,
            count.n_ab()
        );
        cases[case] += 1;
    }
    Ok(format!(
        "half-circle: {inside} inside / {outside} outside ({skipped} near the chord skipped); mixed support cases {cases:?}"
    ))
}

#[test]
fn criterion_8_finite_roof_and_mixed_support() {
    let start = Instant::now();
    verdict(
        8,
        "finite convex roof and mixed support counts",
        start,
        None,
        criterion_8(),
    );
}

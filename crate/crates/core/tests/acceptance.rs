//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use szego_core::asymptotics::{
    edge_solutions, harris_lutz_q, harris_lutz_residual, levinson_solve, DiagonalSystem,
};
use szego_core::checker::{check_1_to_2, Outcome, TruncationStudy};
use szego_core::commutation::{double_commute_add, double_commute_remove};
use szego_core::geronimus::{direct_geronimus, inverse_geronimus};
use szego_core::jacobi::{m_at_edge, m_function, poly_table, spectral_quadrature};
use szego_core::linalg::tridiagonal_eigen;
use szego_core::{Edge, JacobiMatrix, Tolerances, Variant, VerblunskyCoeffs};

type Verdict = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn family() -> Vec<VerblunskyCoeffs> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_015);
    (0..100)
        .map(|_| VerblunskyCoeffs::new((0..8).map(|_| rng.random_range(-0.8..0.8)).collect()).unwrap())
        .collect()
}

fn edges(j: &JacobiMatrix) -> Result<(szego_core::EdgeValue, szego_core::EdgeValue), String> {
    let t = tol();
    let lo = m_at_edge(j, Edge::Minus, &t).map_err(|e| e.to_string())?;
    let hi = m_at_edge(j, Edge::Plus, &t).map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

fn geronimus_roundtrip(fam: &[VerblunskyCoeffs]) -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for a in fam {
        for v in Variant::ALL {
            let j = direct_geronimus(a, v).map_err(|e| e.to_string())?;
            let (lo, hi) = edges(&j)?;
            let inv = inverse_geronimus(&j, v, (&lo, &hi)).map_err(|e| format!("{v}: {e}"))?;
            worst = worst.max(inv.alpha.max_difference(a));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("max |d alpha| = {worst:.2e}, {secs:.2} s");
    if worst <= 1e-9 && secs < 5.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// R_{n+1}(x) = sign(x) (1 + s1 alpha_{2n+o1}) (1 + s2 alpha_{2n+o2}) R_n(x), R = P or F
struct Identity {
    variant: Variant,
    uses_f: bool,
    x: f64,
    first: (i64, f64),
    second: (i64, f64),
}

const IDENTITIES: [Identity; 8] = [
    Identity { variant: Variant::Even, uses_f: false, x: 2.0, first: (-1, -1.0), second: (0, -1.0) },
    Identity { variant: Variant::Even, uses_f: false, x: -2.0, first: (-1, -1.0), second: (0, 1.0) },
    Identity { variant: Variant::Odd, uses_f: true, x: 2.0, first: (1, 1.0), second: (2, 1.0) },
    Identity { variant: Variant::Odd, uses_f: true, x: -2.0, first: (1, 1.0), second: (2, -1.0) },
    Identity { variant: Variant::Plus, uses_f: true, x: 2.0, first: (0, 1.0), second: (1, 1.0) },
    Identity { variant: Variant::Plus, uses_f: false, x: -2.0, first: (0, 1.0), second: (1, -1.0) },
    Identity { variant: Variant::Minus, uses_f: false, x: 2.0, first: (0, -1.0), second: (1, -1.0) },
    Identity { variant: Variant::Minus, uses_f: true, x: -2.0, first: (0, -1.0), second: (1, 1.0) },
];

// alpha_{-1} = -1 closes the identities at n = 0
fn alpha_ext(a: &VerblunskyCoeffs, k: i64) -> f64 {
    if k == -1 {
        -1.0
    } else {
        a.get(k)
    }
}

fn ratio_identities(fam: &[VerblunskyCoeffs]) -> Verdict {
    let mut worst: f64 = 0.0;
    for a in fam {
        for id in &IDENTITIES {
            let j = direct_geronimus(a, id.variant).map_err(|e| e.to_string())?;
            let m = if id.uses_f {
                let edge = if id.x > 0.0 { Edge::Plus } else { Edge::Minus };
                Some(m_at_edge(&j, edge, &tol()).map_err(|e| e.to_string())?)
            } else {
                None
            };
            let table = poly_table(&j, id.x, 33, m.as_ref()).map_err(|e| e.to_string())?;
            let seq = if id.uses_f { table.f.unwrap() } else { table.p_monic };
            for n in 0..=32i64 {
                let f1 = 1.0 + id.first.1 * alpha_ext(a, 2 * n + id.first.0);
                let f2 = 1.0 + id.second.1 * alpha_ext(a, 2 * n + id.second.0);
                let rhs = id.x.signum() * f1 * f2 * seq[n as usize];
                let lhs = seq[n as usize + 1];
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
            }
        }
    }
    let detail = format!("max relative defect {worst:.2e} over 8 identities, n <= 32");
    if worst <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// m of the free matrix, -1/beta(z) with |beta| > 1
fn free_m(z: Complex64) -> Complex64 {
    let w = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    let beta = (z + w) * 0.5;
    let beta = if beta.norm() < 1.0 { 1.0 / beta } else { beta };
    -1.0 / beta
}

fn outside_truncated(j: &JacobiMatrix, m: usize) -> Result<Vec<f64>, String> {
    let (d, o) = j.truncation(m);
    let (eig, _) = tridiagonal_eigen(&d, &o).map_err(|e| e.to_string())?;
    Ok(eig.into_iter().filter(|e| e.abs() > 2.0 + 1e-6).collect())
}

fn double_commutation() -> Verdict {
    let free = JacobiMatrix::free();
    let (e, gamma) = (3.0, 1.0);
    let added = double_commute_add(&free, e, gamma, &tol()).map_err(|e| e.to_string())?;
    let removed = double_commute_remove(&added, e, &tol()).map_err(|e| e.to_string())?;
    let back = removed.max_difference(&free);

    // oracle: m of the free matrix in closed form, m-tilde from a 512-site quadrature
    let quad = spectral_quadrature(&added, 512).map_err(|e| e.to_string())?;
    let points = [
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 0.5),
        Complex64::new(-1.5, 0.7),
        Complex64::new(2.5, 0.5),
        Complex64::new(-3.0, 1.0),
        Complex64::new(0.3, 4.0),
        Complex64::new(4.0, 0.0),
        Complex64::new(-4.0, 0.0),
        Complex64::new(6.0, 0.0),
        Complex64::new(-2.6, 0.0),
    ];
    let mut m_err: f64 = 0.0;
    for z in points {
        let expected = (free_m(z) - gamma / (z - e)) / (1.0 + gamma);
        let direct = m_function(&added, z).map_err(|e| e.to_string())?;
        m_err = m_err.max((quad.stieltjes(z) - expected).norm()).max((direct - expected).norm());
    }

    let before = outside_truncated(&added, 256)?;
    let after = outside_truncated(&removed, 256)?;
    let books = before.len() == 1 && (before[0] - e).abs() < 1e-9 && after.is_empty();

    let detail = format!(
        "roundtrip {back:.2e}, m-tilde {m_err:.2e}, M=256 outside: {before:?} -> {after:?}"
    );
    if back <= 1e-8 && m_err <= 1e-9 && books {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn m_closed_forms(fam: &[VerblunskyCoeffs]) -> Verdict {
    let z = Complex64::new(3.0, 0.0);
    let free = m_function(&JacobiMatrix::free(), z).map_err(|e| e.to_string())?;
    let cheb = m_function(&JacobiMatrix::chebyshev_t(), z).map_err(|e| e.to_string())?;
    let d_free = (free - (-3.0 + 5f64.sqrt()) / 2.0).norm();
    let d_cheb = (cheb + 1.0 / 5f64.sqrt()).norm();

    let (lo, hi) = edges(&JacobiMatrix::free())?;
    let free_class = lo.is_finite() && hi.is_finite();
    let (lo, hi) = edges(&JacobiMatrix::chebyshev_t())?;
    let cheb_class = !lo.is_finite() && !hi.is_finite();

    let mut smallest = f64::INFINITY;
    for a in fam {
        for v in Variant::ALL {
            let j = direct_geronimus(a, v).map_err(|e| e.to_string())?;
            let (lo, hi) = edges(&j)?;
            for s in [lo.signed(), hi.signed()].into_iter().flatten() {
                smallest = smallest.min(s);
            }
        }
    }
    let detail = format!(
        "free {d_free:.1e}, chebyshev {d_cheb:.1e}, classes ok: {}, min finite -+m(+-2) = {smallest:.4}",
        free_class && cheb_class
    );
    if d_free <= 1e-10 && d_cheb <= 1e-10 && free_class && cheb_class && smallest > 0.25 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_system(rng: &mut ChaCha8Rng, len: usize) -> DiagonalSystem {
    let lambda = (0..len).map(|_| DVector::from_row_slice(&[2.0, 0.5])).collect();
    let perturbation = (0..len)
        .map(|k| {
            let s = 0.3 / ((k + 1) as f64).powi(2);
            DMatrix::from_fn(2, 2, |_, _| s * rng.random_range(-1.0..1.0))
        })
        .collect();
    DiagonalSystem::new(1, lambda, perturbation, 0.5).unwrap()
}

fn random_perturbation(rng: &mut ChaCha8Rng) -> JacobiMatrix {
    let n = rng.random_range(1..=6);
    let a = (0..n - 1).map(|_| rng.random_range(0.7..1.3)).collect();
    let b = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    JacobiMatrix::new(a, b).unwrap()
}

fn asymptotics() -> Verdict {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut hl, mut lev): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let sys = random_system(&mut rng, 200);
        let q = harris_lutz_q(&sys).map_err(|e| e.to_string())?;
        hl = hl.max(harris_lutz_residual(&sys, &q));
        for i in 0..2 {
            let sol = levinson_solve(&sys, i, &t).map_err(|e| e.to_string())?;
            lev = lev.max(sol.residual(&sys));
        }
    }

    let free = JacobiMatrix::free();
    let mut exact = true;
    for edge in [Edge::Plus, Edge::Minus] {
        let pair = edge_solutions(&free, edge, &t).map_err(|e| e.to_string())?;
        let s = edge.sign();
        for k in 0..pair.small.values.len() {
            let sign = s.powi(k as i32);
            exact &= pair.small.values[k] == sign && pair.big.values[k] == sign * k as f64;
        }
    }

    let mut worst_change: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let j = random_perturbation(&mut rng);
        for edge in [Edge::Plus, Edge::Minus] {
            let pair = edge_solutions(&j, edge, &t).map_err(|e| e.to_string())?;
            let r = pair.ratio();
            let (mid, end) = (r[127].abs(), r[255].abs());
            // psi_s / psi_b decays like 1/k
            worst_ratio = worst_ratio.max(end / mid);
            let (s1, s2) = (pair.step_sum(128), pair.step_sum(256));
            let change = if s1 == 0.0 { (s2 - s1).abs() } else { (s2 - s1).abs() / s1 };
            worst_change = worst_change.max(change);
        }
    }

    let detail = format!(
        "HL {hl:.1e}, Levinson {lev:.1e}, free edges exact: {exact}, \
         max |r(256)/r(128)| = {worst_ratio:.3}, max step-sum change {worst_change:.1e}"
    );
    if hl <= 1e-13 && lev <= 1e-12 && exact && worst_ratio < 0.6 && worst_change < 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn theorem_pipeline(fam: &[VerblunskyCoeffs]) -> Verdict {
    let t = tol();
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    let mut check = |j: &JacobiMatrix, a: &VerblunskyCoeffs, v: Variant| -> Result<(), String> {
        let r = check_1_to_2(j, &t).map_err(|e| e.to_string())?;
        if r.variant != Some(v) || r.outcome() != Outcome::Pass {
            return Err(format!("variant {v}: {:?} {:?}", r.variant, r.criteria));
        }
        worst = worst.max(r.alpha.unwrap().max_difference(a));
        runs += 1;
        Ok(())
    };
    for a in fam {
        for v in Variant::ALL {
            check(&direct_geronimus(a, v).map_err(|e| e.to_string())?, a, v)?;
        }
    }
    for v in Variant::ALL {
        let a = &fam[0];
        let j = direct_geronimus(a, v).map_err(|e| e.to_string())?;
        let j = double_commute_add(&j, -3.5, 0.5, &t).map_err(|e| e.to_string())?;
        check(&j, a, v)?;
    }
    let detail = format!("{runs} runs, max |d alpha| = {worst:.2e}, dispatch within range throughout");
    if worst <= 1e-7 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn truncation_check() -> Verdict {
    let cutoffs = [16, 32, 64];
    let fast = TruncationStudy::run("(n+1)^-2", |n| 0.5 / ((n + 1) as f64).powi(2), &cutoffs, 4096)
        .map_err(|e| e.to_string())?;
    let slow = TruncationStudy::run("(n+1)^-3/4", |n| 0.5 / ((n + 1) as f64).powf(0.75), &cutoffs, 4096)
        .map_err(|e| e.to_string())?;
    let (gf, gs) = (fast.growth(), slow.growth());
    let detail = format!(
        "growth {:?} vs {:?}; finite-truncation property check, not a proof of the equivalence",
        gf.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>(),
        gs.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>()
    );
    if gf[1].abs() < 0.05 && gs.iter().all(|g| *g > 0.2) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let fam = family();
    let criteria: [(&str, &dyn Fn() -> Verdict); 7] = [
        ("geronimus roundtrip", &|| geronimus_roundtrip(&fam)),
        ("ratio identities", &|| ratio_identities(&fam)),
        ("double commutation", &double_commutation),
        ("m-function closed forms and edges", &|| m_closed_forms(&fam)),
        ("asymptotics", &asymptotics),
        ("theorem pipeline", &|| theorem_pipeline(&fam)),
        ("truncation desk check", &truncation_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(d) => println!("PASS [{}] {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL [{}] {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

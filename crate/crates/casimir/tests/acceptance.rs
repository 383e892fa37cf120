//! End-to-end acceptance checks for the force pipeline.
//!
//! Each test prints one `PASS n ...` line with the measured numbers; run
//! with `cargo test -p casimir --test acceptance -- --nocapture` to see them
//! on success. A failing gate panics with the offending values.

use std::time::{Duration, Instant};

use casimir::lifshitz::ideal_mirror_pressure;
use casimir::materials::{
    kk_to_imaginary_axis, mix_clausius_mossotti, mix_looyenga, KkSettings, LorentzOscillator,
    TabulatedEps2,
};
use casimir::optics::{fresnel, slab_reflection, stack_reflection, SpectralPoint};
use casimir::scenarios::{
    default_porosity_grid, default_separation_grid, default_thickness_grid,
};
use casimir::{
    build_scenario, casimir_ideal, casimir_pressure, compare_scenarios, run_sweep,
    DielectricModel, DrudeParams, GapConfig, Layer, QuadratureSpec, ScenarioKind, ScenarioSpec,
    Stack, SweepAxis, SweepSpec,
};

const MIRROR_GAPS_NM: [f64; 5] = [50.0, 100.0, 500.0, 1000.0, 2000.0];

fn default_quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn doubled_quad() -> QuadratureSpec {
    QuadratureSpec {
        xi_nodes: 128,
        q_nodes: 128,
        ..QuadratureSpec::default()
    }
}

fn on_gold_spec() -> ScenarioSpec {
    ScenarioSpec::default()
}

fn freestanding_spec() -> ScenarioSpec {
    ScenarioSpec {
        kind: ScenarioKind::FreestandingSlabs,
        ..ScenarioSpec::default()
    }
}

#[test]
fn criterion_01_mirror_limit() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for gap in MIRROR_GAPS_NM {
        let result = ideal_mirror_pressure(gap, &default_quad()).unwrap();
        worst = worst.max((result.reduction_factor - 1.0).abs());
    }
    let wall = start.elapsed();
    assert!(worst < 1e-3, "mirror |F_r - 1| reached {worst:.3e}");
    assert!(wall < Duration::from_secs(5), "mirror limit took {wall:?}");
    println!(
        "PASS  1 mirror limit: max |F_r - 1| = {worst:.2e} over {MIRROR_GAPS_NM:?} nm, \
         wall {wall:.2?} (< 5 s)"
    );
}

#[test]
fn criterion_02_ideal_pressure_constant() {
    let pressure = casimir_ideal(100.0).unwrap();
    let rel = (pressure - (-13.00)).abs() / 13.00;
    assert!(rel < 2e-3, "ideal pressure {pressure} Pa, rel dev {rel:.3e}");
    println!("PASS  2 ideal pressure: casimir_ideal(100 nm) = {pressure:.4} Pa (-13.00 within 0.2%)");
}

#[test]
fn criterion_03_kk_oracle() {
    let oscillators = [
        LorentzOscillator {
            strength_ev2: 0.033,
            resonance_ev: 0.14,
            width_ev: 0.05,
        },
        LorentzOscillator {
            strength_ev2: 130.0,
            resonance_ev: 11.0,
            width_ev: 1.0,
        },
    ];
    // Dense sampling of the oscillators' absorption on a log grid.
    let n = 4000;
    let (w_lo, w_hi) = (1e-4f64, 1e4f64);
    let step = (w_hi / w_lo).ln() / (n - 1) as f64;
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let w = w_lo * (step * i as f64).exp();
            let eps2 = oscillators
                .iter()
                .map(|o| {
                    let d = o.resonance_ev * o.resonance_ev - w * w;
                    o.strength_ev2 * o.width_ev * w / (d * d + o.width_ev * o.width_ev * w * w)
                })
                .sum::<f64>();
            (w, eps2)
        })
        .collect();
    let table = TabulatedEps2::new(points, None).unwrap();
    let analytic = DielectricModel::LorentzSum(oscillators.to_vec());

    let mut worst = 0.0f64;
    for i in 0..25 {
        let xi = 1e-2 * 10f64.powf(4.0 * i as f64 / 24.0);
        let numeric = kk_to_imaginary_axis(&table, xi, &KkSettings::default()).unwrap();
        let exact = analytic.eval(xi).unwrap();
        worst = worst.max((numeric - exact).abs() / (exact - 1.0).abs().max(1e-300));
    }
    assert!(worst < 1e-3, "KK relative error reached {worst:.3e}");
    println!(
        "PASS  3 KK oracle: max rel error {worst:.2e} over xi in [1e-2, 1e2] eV (< 1e-3)"
    );
}

#[test]
fn criterion_04_mixing_closed_forms() {
    let eps = mix_clausius_mossotti(3.8, 0.9).unwrap();
    assert!((eps - 1.2165).abs() < 1e-4, "CM(3.8, 0.9) = {eps}");
    // Defining relation: (eps - eps_s)/(eps + 2 eps_s) = phi (1 - eps_s)/(1 + 2 eps_s).
    let eps_s = 3.8;
    let residual = ((eps - eps_s) / (eps + 2.0 * eps_s)
        - 0.9 * (1.0 - eps_s) / (1.0 + 2.0 * eps_s))
        .abs();
    assert!(residual < 1e-12, "defining-relation residual {residual:.3e}");
    for host in [1.5, 3.8, 11.7] {
        assert_eq!(mix_clausius_mossotti(host, 1.0).unwrap(), 1.0);
        assert_eq!(mix_clausius_mossotti(host, 0.0).unwrap(), host);
        assert_eq!(mix_looyenga(host, 1.0).unwrap(), 1.0);
        assert_eq!(mix_looyenga(host, 0.0).unwrap(), host);
    }
    println!(
        "PASS  4 mixing: CM(3.8, 0.9) = {eps:.5} (1.2165 +/- 1e-4), residual {residual:.1e}, \
         endpoints exact for both rules"
    );
}

#[test]
fn criterion_05_slab_limits() {
    let gold = DielectricModel::Drude(DrudeParams::gold());
    let film = DielectricModel::LorentzSum(vec![LorentzOscillator {
        strength_ev2: 1e12,
        resonance_ev: 1e6,
        width_ev: 0.0,
    }]);
    let point = SpectralPoint::new(0.5, 0.002);

    // Vanishing thickness: the film disappears.
    let thin = slab_reflection(
        &Layer {
            material: film.clone(),
            thickness_nm: 1e-12,
        },
        &gold,
        &point,
    )
    .unwrap();
    let bare = fresnel(1.0, gold.eval(point.xi).unwrap(), &point);
    let thin_dev = (thin.r_s - bare.r_s).abs().max((thin.r_p - bare.r_p).abs());
    assert!(thin_dev <= 1e-12, "D -> 0 deviation {thin_dev:.3e}");

    // Large thickness: the substrate disappears behind the film.
    let thick = slab_reflection(
        &Layer {
            material: film.clone(),
            thickness_nm: 5e4,
        },
        &gold,
        &point,
    )
    .unwrap();
    let front = fresnel(1.0, film.eval(point.xi).unwrap(), &point);
    let thick_dev = (thick.r_s - front.r_s)
        .abs()
        .max((thick.r_p - front.r_p).abs());
    assert!(thick_dev <= 1e-9, "D -> inf deviation {thick_dev:.3e}");

    // Splitting a homogeneous film changes nothing.
    let mut split_dev = 0.0f64;
    for parts in [2usize, 3, 7] {
        let stack = Stack {
            layers: (0..parts)
                .map(|_| Layer {
                    material: film.clone(),
                    thickness_nm: 600.0 / parts as f64,
                })
                .collect(),
            substrate: gold.clone(),
        };
        let whole = slab_reflection(
            &Layer {
                material: film.clone(),
                thickness_nm: 600.0,
            },
            &gold,
            &point,
        )
        .unwrap();
        let split = stack_reflection(&stack, &point).unwrap();
        split_dev = split_dev
            .max((whole.r_s - split.r_s).abs())
            .max((whole.r_p - split.r_p).abs());
    }
    assert!(split_dev <= 1e-10, "splitting deviation {split_dev:.3e}");

    println!(
        "PASS  5 slab limits: D->0 dev {thin_dev:.1e} (<= 1e-12), D->inf dev {thick_dev:.1e} \
         (<= 1e-9), splitting dev {split_dev:.1e} (<= 1e-10)"
    );
}

#[test]
fn criterion_06_coated_gold_order_of_magnitude() {
    let config = build_scenario(&on_gold_spec(), 100.0).unwrap();
    let fr = casimir_pressure(&config, &default_quad())
        .unwrap()
        .reduction_factor;
    assert!(
        (1e-3..1e-1).contains(&fr),
        "porous film on gold at 100 nm gave F_r = {fr:.4e}"
    );
    println!(
        "PASS  6 coated-gold magnitude: F_r(phi=0.9, D=500 nm, L=100 nm) = {fr:.3e} \
         in [1e-3, 1e-1]"
    );
}

#[test]
fn criterion_07_thickness_trends() {
    let grid = default_thickness_grid();
    let on_gold = run_sweep(&SweepSpec {
        axis: SweepAxis::Thickness,
        grid: grid.clone(),
        fixed: on_gold_spec(),
        quad: default_quad(),
        gap_nm: 500.0,
    })
    .unwrap();
    let freestanding = run_sweep(&SweepSpec {
        axis: SweepAxis::Thickness,
        grid: grid.clone(),
        fixed: freestanding_spec(),
        quad: default_quad(),
        gap_nm: 500.0,
    })
    .unwrap();
    for pair in on_gold.rows.windows(2) {
        assert!(
            pair[1].reduction_factor < pair[0].reduction_factor,
            "metal-backed F_r not strictly decreasing: {} -> {} at D = {}",
            pair[0].reduction_factor,
            pair[1].reduction_factor,
            pair[1].axis_value,
        );
    }
    for pair in freestanding.rows.windows(2) {
        assert!(
            pair[1].reduction_factor > pair[0].reduction_factor,
            "freestanding F_r not strictly increasing: {} -> {} at D = {}",
            pair[0].reduction_factor,
            pair[1].reduction_factor,
            pair[1].axis_value,
        );
    }
    let backed: Vec<String> = on_gold
        .rows
        .iter()
        .map(|r| format!("{:.2e}", r.reduction_factor))
        .collect();
    let free: Vec<String> = freestanding
        .rows
        .iter()
        .map(|r| format!("{:.2e}", r.reduction_factor))
        .collect();
    println!(
        "PASS  7 thickness trends at L = 500 nm over D = {grid:?}: metal-backed strictly \
         decreasing [{}], freestanding strictly increasing [{}]",
        backed.join(", "),
        free.join(", ")
    );
}

#[test]
fn criterion_08_bare_gold_side_never_weakens_the_force() {
    let grid = default_separation_grid();
    let supported = SweepSpec {
        axis: SweepAxis::Separation,
        grid: grid.clone(),
        fixed: ScenarioSpec {
            kind: ScenarioKind::GoldVsSupportedAerogel,
            ..ScenarioSpec::default()
        },
        quad: default_quad(),
        gap_nm: 0.0,
    };
    let symmetric = SweepSpec {
        axis: SweepAxis::Separation,
        grid,
        fixed: on_gold_spec(),
        quad: default_quad(),
        gap_nm: 0.0,
    };
    let table = compare_scenarios(&supported, &symmetric).unwrap();
    let mut min_ratio = f64::INFINITY;
    for row in &table.rows {
        assert!(
            row.ratio >= 1.0,
            "ratio {} < 1 at L = {} nm",
            row.ratio,
            row.axis_value
        );
        min_ratio = min_ratio.min(row.ratio);
    }
    println!(
        "PASS  8 bare-gold side: F_r ratio >= 1 at all {} grid points (min {min_ratio:.3})",
        table.rows.len()
    );
}

#[test]
fn criterion_09_porosity_trend_and_scale() {
    let sweep = SweepSpec {
        axis: SweepAxis::Porosity,
        grid: default_porosity_grid(),
        fixed: ScenarioSpec {
            kind: ScenarioKind::PorositySweep,
            ..ScenarioSpec::default()
        },
        quad: default_quad(),
        gap_nm: 1000.0,
    };
    let result = run_sweep(&sweep).unwrap();
    for pair in result.rows.windows(2) {
        assert!(
            pair[1].reduction_factor < pair[0].reduction_factor,
            "F_r not strictly decreasing in porosity: {} -> {} at phi = {}",
            pair[0].reduction_factor,
            pair[1].reduction_factor,
            pair[1].axis_value,
        );
    }
    for row in result.rows.iter().filter(|r| r.axis_value >= 0.9) {
        assert!(
            row.reduction_factor < 1e-3,
            "freestanding F_r = {:.4e} at phi = {} (expected < 1e-3)",
            row.reduction_factor,
            row.axis_value
        );
    }
    let values: Vec<String> = result
        .rows
        .iter()
        .map(|r| format!("phi={}: {:.2e}", r.axis_value, r.reduction_factor))
        .collect();
    println!(
        "PASS  9 porosity trend at L = 1 um, D = 500 nm: strictly decreasing [{}]; \
         phi >= 0.9 rows < 1e-3",
        values.join(", ")
    );
}

#[test]
fn criterion_10_convergence_and_determinism() {
    // Every configuration the suite asserts on, re-evaluated with doubled
    // node counts, must agree to 1e-4 relative.
    let mut configs: Vec<(String, GapConfig)> = Vec::new();
    for d in default_thickness_grid() {
        let spec = ScenarioSpec {
            aerogel_thickness_nm: d,
            ..on_gold_spec()
        };
        configs.push((format!("metal-backed D={d}"), build_scenario(&spec, 500.0).unwrap()));
        let spec = ScenarioSpec {
            aerogel_thickness_nm: d,
            ..freestanding_spec()
        };
        configs.push((format!("freestanding D={d}"), build_scenario(&spec, 500.0).unwrap()));
    }
    for phi in default_porosity_grid() {
        let spec = ScenarioSpec {
            kind: ScenarioKind::PorositySweep,
            porosity: phi,
            ..ScenarioSpec::default()
        };
        configs.push((format!("porosity phi={phi}"), build_scenario(&spec, 1000.0).unwrap()));
    }
    configs.push((
        "coated gold L=100".into(),
        build_scenario(&on_gold_spec(), 100.0).unwrap(),
    ));
    for gap in default_separation_grid() {
        let spec = ScenarioSpec {
            kind: ScenarioKind::GoldVsSupportedAerogel,
            ..ScenarioSpec::default()
        };
        configs.push((format!("supported L={gap:.0}"), build_scenario(&spec, gap).unwrap()));
        configs.push((
            format!("symmetric L={gap:.0}"),
            build_scenario(&on_gold_spec(), gap).unwrap(),
        ));
    }

    let mut worst = 0.0f64;
    let mut worst_label = String::new();
    for (label, config) in &configs {
        let base = casimir_pressure(config, &default_quad()).unwrap().pressure_pa;
        let fine = casimir_pressure(config, &doubled_quad()).unwrap().pressure_pa;
        let rel = (fine - base).abs() / fine.abs();
        if rel > worst {
            worst = rel;
            worst_label = label.clone();
        }
    }
    for gap in MIRROR_GAPS_NM {
        let base = ideal_mirror_pressure(gap, &default_quad()).unwrap().pressure_pa;
        let fine = ideal_mirror_pressure(gap, &doubled_quad()).unwrap().pressure_pa;
        let rel = (fine - base).abs() / fine.abs();
        if rel > worst {
            worst = rel;
            worst_label = format!("mirror L={gap}");
        }
    }
    assert!(
        worst < 1e-4,
        "node doubling moved {worst_label} by {worst:.3e} relative"
    );

    // Identical sweeps through differently sized thread pools must agree to
    // the bit.
    let sweep = SweepSpec {
        axis: SweepAxis::Porosity,
        grid: default_porosity_grid(),
        fixed: ScenarioSpec {
            kind: ScenarioKind::PorositySweep,
            ..ScenarioSpec::default()
        },
        quad: default_quad(),
        gap_nm: 1000.0,
    };
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_sweep(&sweep))
        .unwrap();
    let quad_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_sweep(&sweep))
        .unwrap();
    assert_eq!(single, quad_pool, "sweep results differ across worker counts");

    println!(
        "PASS 10 convergence and determinism: worst node-doubling shift {worst:.2e} \
         ({worst_label}, < 1e-4); sweeps bitwise identical on 1 and 4 workers \
         ({} checked configs)",
        configs.len() + MIRROR_GAPS_NM.len()
    );
}

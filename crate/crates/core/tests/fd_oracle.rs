//! The series solver against a finite-difference diagonalisation that shares
//! no code with it.

mod common;

use common::fd::ground_binding_energy;
use hydromag_core::zeeman::{solve_in_window, ScanWindow, SectorLabel, SolveControls, SolveOptions};

#[test]
fn oracle_reproduces_field_free_hydrogen() {
    let (two, raw) = ground_binding_energy(0.0, &[0.1, 0.05], 16.0, 16.0);
    assert!((two - 0.5).abs() < 1e-3, "{two} from {raw:?}");
    let (three, _) = ground_binding_energy(0.0, &[0.1, 0.05, 0.025], 16.0, 16.0);
    assert!((three - 0.5).abs() < 1e-4, "{three}");
}

#[test]
fn series_agrees_with_the_oracle_at_unit_field() {
    let s = SectorLabel::new(0, 0).unwrap();
    let controls = SolveControls { i_max: 174, n_constants: 13, r_match: 10.0, digits: 40, eb_tol: 1e-10 };
    let ctx = controls.validate().unwrap();
    let options =
        SolveOptions { window: ScanWindow { lo: 0.6, hi: 1.0, steps: 8 }, refine: false, convergence_tol: 1e-8 };
    let series = solve_in_window(s, &ctx.float(1), 1, &controls, &options).unwrap().e_b().to_f64();

    let (two, raw) = ground_binding_energy(1.0, &[0.1, 0.05], 8.0, 12.0);
    assert!((series - two).abs() < 1e-3, "series {series}, oracle {two} from {raw:?}");
    let (three, _) = ground_binding_energy(1.0, &[0.1, 0.05, 0.025], 8.0, 12.0);
    assert!((series - three).abs() < 1e-4, "series {series}, oracle {three}");
}

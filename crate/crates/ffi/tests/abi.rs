use std::ffi::CStr;
use std::ptr;

use sublattice_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sl_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn lattice(ambient: usize, rows: &[&[i64]]) -> *mut SlLattice {
    let flat: Vec<i64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let mut out = ptr::null_mut();
    let st = unsafe { sl_lattice_new(ambient, rows.len(), flat.as_ptr(), &mut out) };
    assert_eq!(st, SlStatus::Ok, "{}", last_error());
    assert!(!out.is_null());
    out
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sl_version()) }.to_str().unwrap();
    assert_eq!(v, sublattice_core::ENGINE_VERSION);
}

#[test]
fn lattice_queries() {
    let l = lattice(3, &[&[2, 0, 2], &[0, 1, 3]]);
    let mut rank = 0;
    let mut ambient = 0;
    let mut torsion = 0;
    let mut mult = true;
    let mut cols = 0;
    unsafe {
        assert_eq!(sl_lattice_rank(l, &mut rank), SlStatus::Ok);
        assert_eq!(sl_lattice_ambient(l, &mut ambient), SlStatus::Ok);
        assert_eq!(sl_lattice_torsion_size(l, &mut torsion), SlStatus::Ok);
        assert_eq!(sl_lattice_is_multiplicative(l, &mut mult), SlStatus::Ok);
        assert_eq!(
            sl_lattice_distinct_nonzero_columns(l, &mut cols),
            SlStatus::Ok
        );
        sl_lattice_free(l);
    }
    assert_eq!((rank, ambient, torsion, cols), (2, 3, 2, 3));
    assert!(!mult);
}

#[test]
fn basis_copy_and_equality() {
    let a = lattice(2, &[&[2, 2], &[0, 4]]);
    let b = lattice(2, &[&[2, -2], &[4, 0]]);
    let mut needed = 0;
    let mut buf = [0i64; 4];
    let mut eq = false;
    unsafe {
        assert_eq!(
            sl_lattice_basis(a, ptr::null_mut(), 0, &mut needed),
            SlStatus::InvalidArgument
        );
        assert_eq!(needed, 4);
        assert_eq!(
            sl_lattice_basis(a, buf.as_mut_ptr(), 4, &mut needed),
            SlStatus::Ok
        );
        assert_eq!(sl_lattice_equal(a, b, &mut eq), SlStatus::Ok);
        sl_lattice_free(a);
        sl_lattice_free(b);
    }
    assert_eq!(buf, [2, 2, 0, 4]);
    assert!(eq);
}

#[test]
fn multiplicative_rigid_lattice() {
    // {(x, x, y)}: rank 2, two distinct nonzero columns
    let l = lattice(3, &[&[1, 1, 0], &[0, 0, 1]]);
    let (mut mult, mut rigid) = (false, false);
    unsafe {
        assert_eq!(sl_lattice_is_multiplicative(l, &mut mult), SlStatus::Ok);
        assert_eq!(sl_lattice_rigidity_check(l, &mut rigid), SlStatus::Ok);
        sl_lattice_free(l);
    }
    assert!(mult && rigid);
}

#[test]
fn zero_lattice_from_no_rows() {
    let mut out = ptr::null_mut();
    let mut rank = 9;
    unsafe {
        assert_eq!(sl_lattice_new(3, 0, ptr::null(), &mut out), SlStatus::Ok);
        assert_eq!(sl_lattice_rank(out, &mut rank), SlStatus::Ok);
        sl_lattice_free(out);
    }
    assert_eq!(rank, 0);
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    let mut v = 0u64;
    unsafe {
        assert_eq!(
            sl_lattice_new(2, 1, ptr::null(), &mut out),
            SlStatus::NullPointer
        );
        assert!(out.is_null());
        assert_eq!(
            sl_lattice_new(2, 1, [1i64, 2].as_ptr(), ptr::null_mut()),
            SlStatus::NullPointer
        );
        assert_eq!(sl_lattice_rank(ptr::null(), &mut 0), SlStatus::NullPointer);
        assert!(last_error().contains("null"));

        // index (2^63 - 1)^2 does not fit in 64 bits
        let big = [i64::MAX, 0, 0, i64::MAX];
        assert_eq!(sl_lattice_new(2, 2, big.as_ptr(), &mut out), SlStatus::Ok);
        assert_eq!(sl_lattice_torsion_size(out, &mut v), SlStatus::Overflow);
        sl_lattice_free(out);

        assert_eq!(sl_phi(2, 0, 1, 0, &mut v), SlStatus::InvalidArgument);
        assert_eq!(
            sl_corank_oracle_count(3, 1, 4, 1, 1, 5, &mut v),
            SlStatus::BudgetExhausted
        );
        assert!(last_error().contains("budget"));
        assert_eq!(sl_stirling2(200, 100, &mut v), SlStatus::Overflow);
        assert_eq!(sl_f_count(2, 3, 1, 0, &mut v), SlStatus::Ok);
        assert_eq!(last_error(), "");
        sl_lattice_free(ptr::null_mut());
    }
}

#[test]
fn counting_entry_points() {
    let mut v = 0u64;
    unsafe {
        assert_eq!(sl_stirling2(5, 3, &mut v), SlStatus::Ok);
        assert_eq!(v, 25);
        assert_eq!(sl_phi(2, 6, 1, 0, &mut v), SlStatus::Ok);
        assert_eq!(v, 9);
        assert_eq!(sl_f_count(3, 4, 2, 0, &mut v), SlStatus::Ok);
        assert_eq!(v, 4);
        assert_eq!(sl_phi_corank_formula(2, 1, 2, 1, 0, &mut v), SlStatus::Ok);
        assert_eq!(v, 18);
        assert_eq!(
            sl_corank_oracle_count(3, 1, 2, 1, 2, 0, &mut v),
            SlStatus::Ok
        );
        assert_eq!(v, 18);
    }
}

#[test]
fn verify_report() {
    let mut rep = SlReport::default();
    let st = unsafe { sl_verify_main_theorem(1, 2, 2, 1, 1, 0, &mut rep) };
    assert_eq!(st, SlStatus::Ok, "{}", last_error());
    assert!(rep.passed);
    assert_eq!(
        (
            rep.oracle_count,
            rep.formula_count,
            rep.stirling_factor,
            rep.phi_base
        ),
        (7, 7, 7, 1)
    );
    assert_eq!(rep.witnesses_checked, 7);
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/sublattice.h");
    for name in [
        "sl_version",
        "sl_last_error_message",
        "sl_lattice_new",
        "sl_lattice_free",
        "sl_lattice_rank",
        "sl_lattice_ambient",
        "sl_lattice_basis",
        "sl_lattice_is_multiplicative",
        "sl_lattice_torsion_size",
        "sl_lattice_distinct_nonzero_columns",
        "sl_lattice_rigidity_check",
        "sl_lattice_equal",
        "sl_stirling2",
        "sl_phi",
        "sl_f_count",
        "sl_phi_corank_formula",
        "sl_corank_oracle_count",
        "sl_verify_main_theorem",
    ] {
        assert!(header.contains(&format!("{name}(")), "missing {name}");
    }
    assert!(header.contains("typedef struct SlLattice SlLattice;"));
    assert!(header.contains("SL_STATUS_BUDGET_EXHAUSTED = 5"));
    assert!(header.contains("#ifndef SUBLATTICE_H"));
}

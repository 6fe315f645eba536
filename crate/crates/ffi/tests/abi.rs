use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use modk_ffi::*;

const BUDGET: u64 = 1_000_000;

unsafe fn complete(n: usize, mult: usize) -> *mut ModkGraph {
    let mut g = ptr::null_mut();
    assert_eq!(modk_graph_new(n, &mut g), ModkStatus::ModkOk);
    for u in 0..n {
        for v in u + 1..n {
            for _ in 0..mult {
                assert_eq!(modk_graph_add_edge(g, u, v, ptr::null_mut()), ModkStatus::ModkOk);
            }
        }
    }
    g
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        modk_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn mod2_orientation_round_trip() {
    unsafe {
        let g = complete(5, 1);
        assert_eq!(modk_graph_edge_count(g), 10);
        let p = [0i64, 0, 0, 0, 0];
        let mut o = ptr::null_mut();
        assert_eq!(modk_orient_mod2(g, p.as_ptr(), 5, 2, 2, &mut o), ModkStatus::ModkOk);
        let mut out = [0usize; 5];
        assert_eq!(modk_orientation_out_degrees(g, o, out.as_mut_ptr(), 5), ModkStatus::ModkOk);
        assert_eq!(out, [2; 5]);
        let mut ok = false;
        assert_eq!(modk_verify_orientation(g, o, 2, p.as_ptr(), 5, &mut ok), ModkStatus::ModkOk);
        assert!(ok);
        modk_orientation_free(o);
        modk_graph_free(g);
    }
}

#[test]
fn search_and_bounded_agree_on_k33_doubled() {
    unsafe {
        let text = CString::new(
            "mg 6 18\n".to_string()
                + &(0..3)
                    .flat_map(|a| (3..6).flat_map(move |b| [format!("e {a} {b}\n"), format!("e {a} {b}\n")]))
                    .collect::<String>(),
        )
        .unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(modk_graph_parse(text.as_ptr(), &mut g), ModkStatus::ModkOk);
        let p = [0i64; 6];
        let mut o = ptr::null_mut();
        assert_eq!(modk_orient_search(g, 3, p.as_ptr(), 6, BUDGET, &mut o), ModkStatus::ModkOk);
        let mut ok = false;
        modk_verify_orientation(g, o, 3, p.as_ptr(), 6, &mut ok);
        assert!(ok);
        modk_orientation_free(o);
        let mut o = ptr::null_mut();
        let status = modk_orient_mod_k(g, 3, p.as_ptr(), 6, ModkRegime::ModkRegimeEdge, BUDGET, &mut o);
        assert_eq!(status, ModkStatus::ModkOk, "{}", last_error());
        let mut ok = false;
        modk_verify_orientation(g, o, 3, p.as_ptr(), 6, &mut ok);
        assert!(ok);
        modk_orientation_free(o);
        modk_graph_free(g);
    }
}

#[test]
fn stars_on_k4() {
    unsafe {
        let g = complete(4, 1);
        let mut centers = [usize::MAX; 6];
        assert_eq!(modk_star_decomposition(g, 3, BUDGET, centers.as_mut_ptr(), 6), ModkStatus::ModkErrInfeasible);
        assert_eq!(modk_star_decomposition(g, 2, BUDGET, centers.as_mut_ptr(), 6), ModkStatus::ModkOk);
        let mut per_center = [0; 4];
        for c in centers {
            per_center[c] += 1;
        }
        assert!(per_center.iter().all(|c| c % 2 == 0));
        assert_eq!(modk_star_decomposition(g, 2, BUDGET, centers.as_mut_ptr(), 5), ModkStatus::ModkErrBufferTooSmall);
        modk_graph_free(g);
    }
}

#[test]
fn manual_orientation_and_tail() {
    unsafe {
        let g = complete(3, 1);
        let mut o = ptr::null_mut();
        assert_eq!(modk_orientation_new(&mut o), ModkStatus::ModkOk);
        for (e, t) in [(0u32, 0usize), (1, 2), (2, 1)] {
            assert_eq!(modk_orientation_set(g, o, e, t), ModkStatus::ModkOk);
        }
        let mut tail = 9;
        assert_eq!(modk_orientation_tail(g, o, 1, &mut tail), ModkStatus::ModkOk);
        assert_eq!(tail, 2);
        assert_eq!(modk_orientation_set(g, o, 0, 2), ModkStatus::ModkErrDomain);
        let p = [1i64, 1, 1];
        let mut ok = false;
        modk_verify_orientation(g, o, 3, p.as_ptr(), 3, &mut ok);
        assert!(ok);
        modk_orientation_free(o);
        modk_graph_free(g);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = CString::new("mg 2 1\ne 0 5\n").unwrap();
        assert_eq!(modk_graph_parse(bad.as_ptr(), &mut g), ModkStatus::ModkErrParse);
        assert!(!last_error().is_empty());
        assert_eq!(modk_graph_parse(ptr::null(), &mut g), ModkStatus::ModkErrNull);
        let g = complete(3, 1);
        assert_eq!(modk_graph_add_edge(g, 1, 1, ptr::null_mut()), ModkStatus::ModkErrDomain);
        let p = [0i64; 2];
        let mut o = ptr::null_mut();
        assert_eq!(modk_orient_mod2(g, p.as_ptr(), 2, 0, -1, &mut o), ModkStatus::ModkErrDomain);
        assert!(last_error().contains("residues"));
        let msg = CStr::from_ptr(modk_status_str(ModkStatus::ModkErrBudget));
        assert_eq!(msg.to_str().unwrap(), "search budget exhausted");
        modk_graph_free(g);
        modk_graph_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/modk.h");
    assert!(header.exists());
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["modk_graph_new", "modk_orient_mod_k", "modk_star_decomposition", "MODK_ERR_BUDGET"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-std=c99", "-x", "c"]).arg(&header).status() else {
        return;
    };
    assert!(status.success());
}

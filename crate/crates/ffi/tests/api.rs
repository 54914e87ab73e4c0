use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use parapulse_ffi::*;

const ZERO: PpErrorParams = PpErrorParams { epsilon: 0.0, delta: 0.0, epsilon_s: 0.0 };

fn last_error() -> String {
    let p = pp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn synth_gate(family: &str, scheme: Option<&str>, angles: [f64; 3]) -> (PpStatus, *mut PpSequence) {
    let family = CString::new(family).unwrap();
    let scheme = scheme.map(|s| CString::new(s).unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe {
        pp_synth_gate(
            family.as_ptr(),
            0,
            scheme.as_ref().map_or(ptr::null(), |s| s.as_ptr()),
            angles[0],
            angles[1],
            angles[2],
            &mut out,
        )
    };
    (st, out)
}

fn hadamard() -> PpQuaternion {
    // H = −i(X + Z)/√2
    PpQuaternion { w: 0.0, x: FRAC_1_SQRT_2, y: 0.0, z: FRAC_1_SQRT_2 }
}

#[test]
fn up1_for_hadamard() {
    let (st, seq) = synth_gate("UP1", None, [0.0, PI / 2.0, PI]);
    assert_eq!(st, PpStatus::Ok);
    unsafe {
        let mut stats = PpStats { k: 0, t: 0.0, duration: 0.0 };
        assert_eq!(pp_stats(seq, 5.0, &mut stats), PpStatus::Ok);
        assert_eq!(stats.k, 5);
        assert!((stats.t - 6.0).abs() < 1e-12);

        let mut u = PpQuaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
        assert_eq!(pp_evaluate(seq, ZERO, &mut u), PpStatus::Ok);
        let h = hadamard();
        let dot = u.w * h.w + u.x * h.x + u.y * h.y + u.z * h.z;
        assert!((dot.abs() - 1.0).abs() < 1e-10, "{u:?}");

        let mut f = 0.0;
        assert_eq!(pp_avg_gate_fidelity(seq, h, ZERO, 0.0, 5.0, &mut f), PpStatus::Ok);
        assert!((f - 1.0).abs() < 1e-12);

        let (mut slope, mut order) = (0.0, -2);
        assert_eq!(pp_suppression_order(seq, h, PpAxis::Epsilon as u32, &mut slope, &mut order), PpStatus::Ok);
        assert_eq!(order, 1, "slope {slope}");
        pp_sequence_free(seq);
    }
}

#[test]
fn text_round_trip() {
    let (st, seq) = synth_gate("sUZ1", Some("ZC"), [0.3, 1.1, -0.4]);
    assert_eq!(st, PpStatus::Ok);
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(pp_sequence_to_text(seq, &mut text), PpStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(pp_sequence_from_text(text, &mut back), PpStatus::Ok);
        let (mut n1, mut n2) = (0usize, 0usize);
        pp_sequence_len(seq, &mut n1);
        pp_sequence_len(back, &mut n2);
        assert_eq!(n1, n2);
        let err = PpErrorParams { epsilon: 0.02, delta: -0.01, epsilon_s: 0.03 };
        let (mut a, mut b) = (hadamard(), hadamard());
        pp_evaluate(seq, err, &mut a);
        pp_evaluate(back, err, &mut b);
        for (x, y) in [(a.w, b.w), (a.x, b.x), (a.y, b.y), (a.z, b.z)] {
            assert!((x - y).abs() < 1e-12);
        }
        pp_string_free(text);
        pp_sequence_free(seq);
        pp_sequence_free(back);
    }
}

#[test]
fn rotation_families() {
    let family = CString::new("RA").unwrap();
    let mut seq = ptr::null_mut();
    unsafe {
        assert_eq!(pp_synth_rotation(family.as_ptr(), 2, ptr::null(), PI, 0.0, &mut seq), PpStatus::Ok);
        let mut n = 0usize;
        pp_sequence_len(seq, &mut n);
        assert!(n > 6);
        pp_sequence_free(seq);
    }
}

#[test]
fn errors_set_status_and_message() {
    let (st, seq) = synth_gate("UP1", Some("ZC"), [0.0, 1.0, 2.0]);
    assert_eq!(st, PpStatus::InvalidArgument);
    assert!(seq.is_null());
    assert!(last_error().contains("ZC"), "{}", last_error());

    let (st, _) = synth_gate("NOPE", None, [0.0; 3]);
    assert_eq!(st, PpStatus::InvalidArgument);

    let bad = CString::new("scheme: PC\nG 1 zero\n").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(pp_sequence_from_text(bad.as_ptr(), &mut out), PpStatus::Parse);
        assert!(last_error().contains("line 2"));
        assert_eq!(pp_sequence_from_text(ptr::null(), &mut out), PpStatus::NullPointer);
        assert_eq!(pp_stats(ptr::null(), 5.0, ptr::null_mut()), PpStatus::NullPointer);
        pp_sequence_free(ptr::null_mut());
        pp_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let (_, seq) = synth_gate("basic", Some("PC"), [0.0, PI / 2.0, PI]);
    unsafe {
        let (mut slope, mut order) = (0.0, 0);
        assert_eq!(pp_suppression_order(seq, hadamard(), 17, &mut slope, &mut order), PpStatus::InvalidArgument);
        let not_unit = PpQuaternion { w: 2.0, x: 0.0, y: 0.0, z: 0.0 };
        let mut f = 0.0;
        assert_eq!(pp_avg_gate_fidelity(seq, not_unit, ZERO, 0.0, 5.0, &mut f), PpStatus::InvalidArgument);
        assert_eq!(pp_avg_gate_fidelity(seq, hadamard(), ZERO, -1.0, 5.0, &mut f), PpStatus::InvalidArgument);
        let nan = PpErrorParams { epsilon: f64::NAN, ..ZERO };
        let mut u = hadamard();
        assert_eq!(pp_evaluate(seq, nan, &mut u), PpStatus::InvalidArgument);
        // Wrong target: the order is undefined.
        let id = PpQuaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
        assert_eq!(pp_suppression_order(seq, id, 0, &mut slope, &mut order), PpStatus::Verification);
        pp_sequence_free(seq);
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/parapulse.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "pp_synth_gate",
        "pp_synth_rotation",
        "pp_sequence_from_text",
        "pp_sequence_to_text",
        "pp_evaluate",
        "pp_stats",
        "pp_avg_gate_fidelity",
        "pp_suppression_order",
        "pp_sequence_free",
        "pp_string_free",
        "pp_last_error_message",
        "PP_STATUS_PANIC",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    match Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).status() {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(e) => eprintln!("cc unavailable ({e}); header syntax not checked"),
    }
}

/// Compiles and runs `c/smoke.c` against the static library when a C
/// compiler is available.
#[test]
fn c_client_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libparapulse_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; C client not checked", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let bin = dir.join("smoke");
    let compiled = Command::new("cc")
        .arg(manifest.join("c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status();
    match compiled {
        Ok(s) => assert!(s.success(), "C client failed to build"),
        Err(e) => {
            eprintln!("cc unavailable ({e}); C client not checked");
            return;
        }
    }
    let out = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("label: UP1") && stdout.contains("order=1"), "{stdout}");
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("parapulse-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

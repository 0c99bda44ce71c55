use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use redfield_teleport_ffi::*;

const BOSONIC: RtReservoir = RtReservoir {
    statistics: 0,
    temperature: 2.0,
    mu: 0.0,
    gamma: 0.007_853_981_633_974_483,
};
const SYSTEM: RtSystem = RtSystem {
    epsilon_a: 10.0,
    epsilon_b: 10.0,
    lambda: 30.0,
};

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        rt_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn liouvillian(a: &RtReservoir, b: &RtReservoir) -> *mut RtLiouvillian {
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { rt_liouvillian_new(&SYSTEM, a, b, &mut l) }, RtStatus::Ok, "{}", last_error());
    l
}

#[test]
fn steady_state_round_trip() {
    unsafe {
        let l = liouvillian(&BOSONIC, &BOSONIC);
        let mut rho = ptr::null_mut();
        assert_eq!(rt_steady_state(l, -1.0, &mut rho), RtStatus::Ok);
        let mut entries = [RtComplex::default(); 16];
        assert_eq!(rt_state_matrix(rho, entries.as_mut_ptr()), RtStatus::Ok);
        let trace: f64 = (0..4).map(|k| entries[5 * k].re).sum();
        assert!((trace - 1.0).abs() < 1e-12);

        let mut copy = ptr::null_mut();
        assert_eq!(rt_state_from_matrix(entries.as_ptr(), &mut copy), RtStatus::Ok);
        let (mut f1, mut f2) = (0.0, 0.0);
        assert_eq!(rt_fmax(rho, &mut f1), RtStatus::Ok);
        assert_eq!(rt_fmax(copy, &mut f2), RtStatus::Ok);
        assert_eq!(f1, f2);

        let (mut m, mut n) = (9u8, 9u8);
        assert_eq!(rt_select_protocol(rho, 0, &mut m, &mut n), RtStatus::Ok);
        assert_eq!((m, n), (1, 1));
        let mut avg = 0.0;
        assert_eq!(rt_average_fidelity(rho, 1, 1, 0, &mut avg), RtStatus::Ok);
        assert!(avg <= f1 + 1e-10);

        rt_state_free(copy);
        rt_state_free(rho);
        rt_liouvillian_free(l);
    }
}

#[test]
fn bell_resource_and_free_evolution() {
    unsafe {
        let mut bell = ptr::null_mut();
        assert_eq!(rt_state_bell(0, 0, &mut bell), RtStatus::Ok);
        let (mut f, mut c) = (0.0, 0.0);
        assert_eq!(rt_teleport_fidelity(bell, 1.1, 0.4, 0, 0, &mut f), RtStatus::Ok);
        assert!((f - 1.0).abs() < 1e-12);
        assert_eq!(rt_concurrence(bell, &mut c), RtStatus::Ok);
        assert!((c - 1.0).abs() < 1e-12);

        let closed = RtReservoir { gamma: 0.0, ..BOSONIC };
        let l = liouvillian(&closed, &closed);
        let mut same = ptr::null_mut();
        assert_eq!(rt_propagate(l, bell, 0.0, -1.0, &mut same), RtStatus::Ok);
        let (mut a, mut b) = ([RtComplex::default(); 16], [RtComplex::default(); 16]);
        rt_state_matrix(bell, a.as_mut_ptr());
        rt_state_matrix(same, b.as_mut_ptr());
        assert_eq!(a, b);
        rt_state_free(same);
        rt_state_free(bell);
        rt_liouvillian_free(l);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let bad = RtReservoir { temperature: -1.0, ..BOSONIC };
        let mut l = ptr::null_mut();
        assert_eq!(rt_liouvillian_new(&SYSTEM, &bad, &BOSONIC, &mut l), RtStatus::InvalidParameter);
        assert!(l.is_null());
        assert!(last_error().contains("temperature"));

        assert_eq!(rt_fmax(ptr::null(), &mut 0.0), RtStatus::NullPointer);
        assert!(last_error().contains("rho"));

        let mut rho = ptr::null_mut();
        assert_eq!(rt_state_bell(2, 0, &mut rho), RtStatus::InvalidParameter);

        let mut entries = [RtComplex::default(); 16];
        entries[0].re = 2.0;
        assert_eq!(rt_state_from_matrix(entries.as_ptr(), &mut rho), RtStatus::InvalidState);

        let mut n = 0.0;
        assert_eq!(rt_occupation(0.0, &BOSONIC, &mut n), RtStatus::DivergentOccupation);
        let fermi = RtReservoir { statistics: 1, temperature: 1.0, mu: 10.0, gamma: 0.1 };
        assert_eq!(rt_occupation(10.0, &fermi, &mut n), RtStatus::Ok);
        assert!((n - 0.5).abs() < 1e-15);
        assert_eq!(last_error(), "");

        let mut short = [0 as std::ffi::c_char; 4];
        rt_fmax(ptr::null(), &mut 0.0);
        let full = rt_last_error_message(short.as_mut_ptr(), short.len());
        assert!(full > 3);
        assert_eq!(CStr::from_ptr(short.as_ptr()).to_bytes().len(), 3);

        rt_state_free(ptr::null_mut());
        rt_liouvillian_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(rt_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/redfield_teleport.h")).unwrap();
    for name in [
        "rt_liouvillian_new",
        "rt_steady_state",
        "rt_propagate",
        "rt_fmax",
        "rt_concurrence",
        "rt_teleport_fidelity",
        "rt_average_fidelity",
        "rt_select_protocol",
        "rt_occupation",
        "rt_last_error_message",
        "RT_STATUS_POSITIVITY_VIOLATION",
        "typedef struct RtState RtState",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

fn target_dir() -> Option<PathBuf> {
    // tests run from <target>/<profile>/deps
    Some(std::env::current_exe().ok()?.parent()?.parent()?.to_path_buf())
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let Some(dir) = target_dir() else { return };
    let lib = dir.join("libredfield_teleport_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping C link test: static library or C compiler unavailable");
        return;
    }
    let exe = tempfile::tempdir().unwrap();
    let bin = exe.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("protocol=11"));
}

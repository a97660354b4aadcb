use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use abpre_ffi::*;

struct Buf(*mut AbpreBuffer);

impl Buf {
    fn null() -> Self {
        Buf(ptr::null_mut())
    }

    fn bytes(&self) -> &[u8] {
        assert!(!self.0.is_null());
        unsafe {
            let len = abpre_buffer_len(self.0);
            std::slice::from_raw_parts(abpre_buffer_data(self.0), len)
        }
    }

    fn view(&self) -> AbpreBytes {
        let b = self.bytes();
        AbpreBytes {
            data: b.as_ptr(),
            len: b.len(),
        }
    }
}

impl Drop for Buf {
    fn drop(&mut self) {
        unsafe { abpre_buffer_free(self.0) }
    }
}

struct Rng(*mut AbpreRng);

impl Rng {
    fn seeded(seed: u64) -> Self {
        Rng(abpre_rng_new_seeded(seed))
    }

    fn tape(values: &[u64]) -> Self {
        Rng(unsafe { abpre_rng_new_tape(values.as_ptr(), values.len()) })
    }
}

impl Drop for Rng {
    fn drop(&mut self) {
        unsafe { abpre_rng_free(self.0) }
    }
}

fn view(b: &[u8]) -> AbpreBytes {
    AbpreBytes {
        data: b.as_ptr(),
        len: b.len(),
    }
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = abpre_last_error();
    assert!(!p.is_null(), "no error message recorded");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[track_caller]
fn check(status: AbpreStatus) {
    if status != ABPRE_OK {
        panic!("status {status}: {}", last_error());
    }
}

struct Suite {
    pk: Buf,
    msk: Buf,
}

fn mock_suite(universe: &str, rng: &Rng) -> Suite {
    let (mut pk, mut msk) = (Buf::null(), Buf::null());
    check(unsafe {
        abpre_setup_mock(
            (1 << 61) - 1,
            7,
            c(universe).as_ptr(),
            rng.0,
            &mut pk.0,
            &mut msk.0,
        )
    });
    Suite { pk, msk }
}

fn keygen(s: &Suite, attrs: &str, rng: &Rng) -> Buf {
    let mut sk = Buf::null();
    check(unsafe { abpre_keygen(s.pk.view(), s.msk.view(), c(attrs).as_ptr(), rng.0, &mut sk.0) });
    sk
}

fn encrypt(s: &Suite, policy: &str, reenc: bool, payload: &[u8], rng: &Rng) -> Buf {
    let mut ct = Buf::null();
    check(unsafe {
        abpre_encrypt(s.pk.view(), c(policy).as_ptr(), reenc, view(payload), rng.0, &mut ct.0)
    });
    ct
}

fn decrypt(s: &Suite, key: &Buf, ct: &[u8]) -> Result<Vec<u8>, AbpreStatus> {
    let mut out = Buf::null();
    match unsafe { abpre_decrypt(s.pk.view(), key.view(), view(ct), &mut out.0) } {
        ABPRE_OK => Ok(out.bytes().to_vec()),
        status => {
            assert!(out.0.is_null());
            Err(status)
        }
    }
}

fn full_cycle(s: &Suite, rng: &Rng) {
    let payload = b"payload crossing the C boundary".repeat(40);
    let sk = keygen(s, "A,B", rng);
    let ct = encrypt(s, "A AND B", true, &payload, rng);
    assert_eq!(decrypt(s, &sk, ct.bytes()).unwrap(), payload);

    let (mut rk, mut dk) = (Buf::null(), Buf::null());
    check(unsafe {
        abpre_rkgen(s.pk.view(), s.msk.view(), sk.view(), c("C").as_ptr(), rng.0, &mut rk.0, &mut dk.0)
    });
    let mut ct2 = Buf::null();
    check(unsafe {
        abpre_reencrypt(s.pk.view(), rk.view(), c("C OR B").as_ptr(), ct.view(), rng.0, &mut ct2.0)
    });
    assert_eq!(decrypt(s, &dk, ct2.bytes()).unwrap(), payload);

    let (mut tk, mut z) = (Buf::null(), Buf::null());
    check(unsafe { abpre_transform_keygen(dk.view(), rng.0, &mut tk.0, &mut z.0) });
    let mut pd = Buf::null();
    check(unsafe { abpre_transform(s.pk.view(), tk.view(), ct2.view(), &mut pd.0) });
    let mut out = Buf::null();
    check(unsafe { abpre_finish(z.view(), pd.view(), ct2.view(), &mut out.0) });
    assert_eq!(out.bytes(), &payload[..]);
}

#[test]
fn full_cycle_mock() {
    let rng = Rng::seeded(1);
    full_cycle(&mock_suite("A B C", &rng), &rng);
}

#[test]
fn full_cycle_pairing() {
    let rng = Rng(abpre_rng_new_os());
    let (mut pk, mut msk) = (Buf::null(), Buf::null());
    check(unsafe {
        abpre_setup_pairing(ptr::null(), c("A,B,C").as_ptr(), rng.0, &mut pk.0, &mut msk.0)
    });
    full_cycle(&Suite { pk, msk }, &rng);
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/p13")
}

#[test]
fn tape_pipeline_reproduces_core_golden_files() {
    let golden = |name: &str| std::fs::read(golden_dir().join(name)).unwrap();
    let (mut pk, mut msk) = (Buf::null(), Buf::null());
    check(unsafe {
        abpre_setup_mock(13, 7, c("A\nB\n").as_ptr(), Rng::tape(&[3, 2, 4, 5]).0, &mut pk.0, &mut msk.0)
    });
    assert_eq!(pk.bytes(), golden("pk.bin"));
    assert_eq!(msk.bytes(), golden("msk.bin"));
    let s = Suite { pk, msk };
    let sk = keygen(&s, "A,B", &Rng::tape(&[6]));
    assert_eq!(sk.bytes(), golden("sk.bin"));
    let ct = encrypt(&s, "A AND B", true, b"small-prime transcript payload\n", &Rng::tape(&[9, 5, 3, 1, 2]));
    assert_eq!(ct.bytes(), golden("ct1.bin"));

    let (mut rk, mut dk) = (Buf::null(), Buf::null());
    check(unsafe {
        abpre_rkgen(s.pk.view(), s.msk.view(), sk.view(), c("B").as_ptr(), Rng::tape(&[4, 3]).0, &mut rk.0, &mut dk.0)
    });
    assert_eq!(rk.bytes(), golden("rk_proxy.bin"));
    assert_eq!(dk.bytes(), golden("rk_delegatee.bin"));
    let mut ct2 = Buf::null();
    check(unsafe {
        abpre_reencrypt(s.pk.view(), rk.view(), c("B").as_ptr(), ct.view(), Rng::tape(&[6]).0, &mut ct2.0)
    });
    assert_eq!(ct2.bytes(), golden("ct2.bin"));
    let (mut tk, mut z) = (Buf::null(), Buf::null());
    check(unsafe { abpre_transform_keygen(dk.view(), Rng::tape(&[5]).0, &mut tk.0, &mut z.0) });
    assert_eq!(tk.bytes(), golden("tk.bin"));
    assert_eq!(z.bytes(), golden("z.bin"));
    let mut pd = Buf::null();
    check(unsafe { abpre_transform(s.pk.view(), tk.view(), ct2.view(), &mut pd.0) });
    assert_eq!(pd.bytes(), golden("partial.bin"));
}

#[test]
fn error_codes() {
    let rng = Rng::seeded(2);
    let s = mock_suite("A B C", &rng);
    let sk_a = keygen(&s, "A", &rng);
    let ct = encrypt(&s, "A AND B", false, b"x", &rng);
    assert_eq!(decrypt(&s, &sk_a, ct.bytes()), Err(ABPRE_ERR_POLICY_NOT_SATISFIED));
    assert!(last_error().contains("not satisfied"));

    let sk = keygen(&s, "A,B", &rng);
    let (mut rk, mut dk) = (Buf::null(), Buf::null());
    check(unsafe {
        abpre_rkgen(s.pk.view(), s.msk.view(), sk.view(), c("C").as_ptr(), rng.0, &mut rk.0, &mut dk.0)
    });
    let mut ct2 = Buf::null();
    let status = unsafe {
        abpre_reencrypt(s.pk.view(), rk.view(), c("C").as_ptr(), ct.view(), rng.0, &mut ct2.0)
    };
    assert_eq!(status, ABPRE_ERR_REENCRYPTION_DISABLED);
    assert!(ct2.0.is_null());

    let mut tampered = ct.bytes().to_vec();
    *tampered.last_mut().unwrap() ^= 1;
    assert_eq!(decrypt(&s, &sk, &tampered), Err(ABPRE_ERR_AEAD));
    assert_eq!(decrypt(&s, &sk, s.pk.bytes()), Err(ABPRE_ERR_FORMAT));

    let mut out = Buf::null();
    let status = unsafe {
        abpre_encrypt(s.pk.view(), c("A AND (B OR").as_ptr(), true, view(b"x"), rng.0, &mut out.0)
    };
    assert_eq!(status, ABPRE_ERR_INVALID_ARGUMENT);
    let status = unsafe {
        abpre_keygen(s.pk.view(), s.msk.view(), c("Z").as_ptr(), rng.0, &mut out.0)
    };
    assert_eq!(status, ABPRE_ERR_INVALID_ARGUMENT);
    let status = unsafe {
        abpre_setup_mock(12, 7, c("A").as_ptr(), rng.0, &mut out.0, &mut Buf::null().0)
    };
    assert_eq!(status, ABPRE_ERR_INVALID_ARGUMENT);

    let empty = Rng::tape(&[]);
    let status = unsafe { abpre_keygen(s.pk.view(), s.msk.view(), c("A").as_ptr(), empty.0, &mut out.0) };
    assert_eq!(status, ABPRE_ERR_INVALID_ARGUMENT);

    // Success clears the recorded message.
    let _ = keygen(&s, "A", &rng);
    assert!(abpre_last_error().is_null());
}

#[test]
fn null_pointers_are_rejected() {
    let rng = Rng::seeded(3);
    let s = mock_suite("A B", &rng);
    let mut out = Buf::null();
    let status = unsafe { abpre_keygen(s.pk.view(), s.msk.view(), ptr::null(), rng.0, &mut out.0) };
    assert_eq!(status, ABPRE_ERR_NULL_POINTER);
    let status = unsafe {
        abpre_keygen(s.pk.view(), s.msk.view(), c("A").as_ptr(), ptr::null_mut(), &mut out.0)
    };
    assert_eq!(status, ABPRE_ERR_NULL_POINTER);
    let status = unsafe {
        abpre_keygen(s.pk.view(), s.msk.view(), c("A").as_ptr(), rng.0, ptr::null_mut())
    };
    assert_eq!(status, ABPRE_ERR_NULL_POINTER);
    let dangling = AbpreBytes { data: ptr::null(), len: 4 };
    let status = unsafe { abpre_keygen(dangling, s.msk.view(), c("A").as_ptr(), rng.0, &mut out.0) };
    assert_eq!(status, ABPRE_ERR_NULL_POINTER);
    assert!(out.0.is_null());
    assert!(unsafe { abpre_rng_new_tape(ptr::null(), 2) }.is_null());
    unsafe {
        abpre_buffer_free(ptr::null_mut());
        abpre_rng_free(ptr::null_mut());
        assert_eq!(abpre_buffer_len(ptr::null()), 0);
    }
}

#[test]
fn policy_check_reports() {
    let mut satisfied = 7;
    let mut report = Buf::null();
    check(unsafe {
        abpre_policy_check(c("A AND B").as_ptr(), c("A,B").as_ptr(), &mut satisfied, &mut report.0)
    });
    assert_eq!(satisfied, 1);
    let text = String::from_utf8(report.bytes().to_vec()).unwrap();
    assert!(text.contains("matrix: [[1,1],[0,-1]]"), "{text}");
    assert!(text.trim_end().ends_with("SATISFIED"));

    let mut report = Buf::null();
    check(unsafe { abpre_policy_check(c("A AND B").as_ptr(), c("A").as_ptr(), &mut satisfied, &mut report.0) });
    assert_eq!(satisfied, 0);
    let mut report = Buf::null();
    check(unsafe { abpre_policy_check(c("A OR B").as_ptr(), ptr::null(), &mut satisfied, &mut report.0) });
    assert_eq!(satisfied, -1);
    let mut report = Buf::null();
    let status = unsafe { abpre_policy_check(c("A AND").as_ptr(), ptr::null(), &mut satisfied, &mut report.0) };
    assert_eq!(status, ABPRE_ERR_INVALID_ARGUMENT);
    assert!(report.0.is_null());
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(abpre_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/abpre.h")).unwrap();
    let source = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for item in ["typedef struct AbpreBuffer AbpreBuffer;", "typedef struct AbpreRng AbpreRng;", "#define ABPRE_ERR_AEAD 4"] {
        assert!(header.contains(item), "{item} missing from header");
    }
}

/// Compiles and runs a C program against the generated header and the
/// static library.
#[test]
fn c_program_links_against_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libabpre_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap_or_else(|e| panic!("running {cc}: {e}"));
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

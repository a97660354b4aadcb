use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use tempfile::TempDir;

const P13_PAYLOAD: &[u8] = b"small-prime transcript payload\n";

fn abpre(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abpre"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn abpre")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = abpre(dir, args);
    assert!(
        out.status.success(),
        "abpre {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/p13")
}

const P13_FILES: &[&str] = &[
    "pk.bin",
    "msk.bin",
    "sk.bin",
    "ct1.bin",
    "rk_proxy.bin",
    "rk_delegatee.bin",
    "ct2.bin",
    "tk.bin",
    "z.bin",
    "partial.bin",
];

/// Runs the p = 13 pipeline with every draw fixed by a tape.
fn run_p13(dir: &Path) {
    fs::write(dir.join("universe.txt"), "A\nB\n").unwrap();
    fs::write(dir.join("payload.txt"), P13_PAYLOAD).unwrap();
    ok(dir, &[
        "--seed", "tape:3,2,4,5", "setup", "--universe", "universe.txt", "--backend", "mock",
        "--modulus", "13", "--g2-exponent", "7", "--out-pk", "pk.bin", "--out-msk", "msk.bin",
    ]);
    ok(dir, &[
        "--seed", "tape:6", "keygen", "--pk", "pk.bin", "--msk", "msk.bin", "--attrs", "A,B",
        "--out", "sk.bin",
    ]);
    // The first draw is the KEM element gt^9.
    ok(dir, &[
        "--seed", "tape:9,5,3,1,2", "encrypt", "--pk", "pk.bin", "--policy", "A AND B", "--in",
        "payload.txt", "--out", "ct1.bin",
    ]);
    ok(dir, &[
        "--seed", "tape:4,3", "rkgen", "--pk", "pk.bin", "--msk", "msk.bin", "--sk", "sk.bin",
        "--delegatee-attrs", "B", "--out-proxy", "rk_proxy.bin", "--out-delegatee",
        "rk_delegatee.bin",
    ]);
    ok(dir, &[
        "--seed", "tape:6", "reencrypt", "--pk", "pk.bin", "--rk", "rk_proxy.bin", "--policy2",
        "B", "--in", "ct1.bin", "--out", "ct2.bin",
    ]);
    ok(dir, &[
        "--seed", "tape:5", "transform-keygen", "--dk", "rk_delegatee.bin", "--out-tk", "tk.bin",
        "--out-z", "z.bin",
    ]);
    ok(dir, &[
        "transform", "--pk", "pk.bin", "--tk", "tk.bin", "--in", "ct2.bin", "--out-partial",
        "partial.bin",
    ]);
}

#[test]
fn p13_pipeline_matches_golden_files() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    run_p13(dir);

    ok(dir, &["decrypt", "--pk", "pk.bin", "--sk", "sk.bin", "--in", "ct1.bin", "--out", "p1"]);
    ok(dir, &["decrypt", "--pk", "pk.bin", "--dk", "rk_delegatee.bin", "--in", "ct2.bin", "--out", "p2"]);
    ok(dir, &[
        "finish", "--z", "z.bin", "--in-partial", "partial.bin", "--in-ct", "ct2.bin", "--out",
        "p3",
    ]);
    for p in ["p1", "p2", "p3"] {
        assert_eq!(fs::read(dir.join(p)).unwrap(), P13_PAYLOAD);
    }

    let golden = golden_dir();
    if std::env::var_os("ABPRE_BLESS").is_some() {
        fs::create_dir_all(&golden).unwrap();
        for f in P13_FILES {
            fs::write(golden.join(f), fs::read(dir.join(f)).unwrap()).unwrap();
        }
    }
    for f in P13_FILES {
        let expected = fs::read(golden.join(f))
            .unwrap_or_else(|e| panic!("golden {f}: {e} (regenerate with ABPRE_BLESS=1)"));
        assert_eq!(fs::read(dir.join(f)).unwrap(), expected, "{f} differs from golden");
    }

    // A second run is byte-identical.
    let again = TempDir::new().unwrap();
    run_p13(again.path());
    for f in P13_FILES {
        assert_eq!(fs::read(dir.join(f)).unwrap(), fs::read(again.path().join(f)).unwrap());
    }
}

/// Mock exponents inside the golden files, read at fixed offsets.
#[test]
fn p13_golden_public_key_exponents() {
    let pk = fs::read(golden_dir().join("pk.bin")).unwrap();
    assert_eq!(&pk[..9], b"ABPRE1\x01\x00\x01");
    // Suite: tag 1, length 40, modulus 13, g2 exponent 7.
    assert_eq!(pk[9], 1);
    assert_eq!(&pk[10..14], &40u32.to_be_bytes());
    assert_eq!(u64::from_be_bytes(pk[14..22].try_into().unwrap()), 13);
    assert_eq!(pk[53], 7);
    let msk = fs::read(golden_dir().join("msk.bin")).unwrap();
    let n = msk.len();
    // alpha = 3, a = 2
    assert_eq!(msk[n - 38], 3);
    assert_eq!(msk[n - 1], 2);
}

#[cfg(unix)]
#[test]
fn secrets_are_owner_only() {
    use std::os::unix::fs::PermissionsExt;
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    run_p13(dir);
    let mode = |f: &str| fs::metadata(dir.join(f)).unwrap().permissions().mode() & 0o777;
    for f in ["msk.bin", "sk.bin", "rk_proxy.bin", "rk_delegatee.bin", "tk.bin", "z.bin"] {
        assert_eq!(mode(f), 0o600, "{f}");
    }
    assert_ne!(mode("pk.bin"), 0o600);
}

#[test]
fn unauthorized_decrypt_exits_1() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    run_p13(dir);
    ok(dir, &["--seed", "tape:8", "keygen", "--pk", "pk.bin", "--msk", "msk.bin", "--attrs", "A", "--out", "sk_a.bin"]);
    let out = abpre(dir, &["decrypt", "--pk", "pk.bin", "--sk", "sk_a.bin", "--in", "ct1.bin", "--out", "x"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("policy not satisfied"));
    assert!(!dir.join("x").exists());

    ok(dir, &["--seed", "tape:2,3", "rkgen", "--pk", "pk.bin", "--msk", "msk.bin", "--sk", "sk.bin",
        "--delegatee-attrs", "A", "--out-proxy", "rk2.bin", "--out-delegatee", "dk_a.bin"]);
    let out = abpre(dir, &["decrypt", "--pk", "pk.bin", "--dk", "dk_a.bin", "--in", "ct2.bin", "--out", "x"]);
    assert_eq!(code(&out), 1);
    let out = abpre(dir, &["--seed", "tape:7", "reencrypt", "--pk", "pk.bin", "--rk", "rk2.bin",
        "--policy2", "A", "--in", "ct1.bin", "--out", "ct2a.bin"]);
    assert!(out.status.success());
    ok(dir, &["decrypt", "--pk", "pk.bin", "--dk", "dk_a.bin", "--in", "ct2a.bin", "--out", "y"]);
    assert_eq!(fs::read(dir.join("y")).unwrap(), P13_PAYLOAD);
}

#[test]
fn no_reencrypt_propagates() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    run_p13(dir);
    ok(dir, &["--seed", "1", "encrypt", "--pk", "pk.bin", "--policy", "A AND B", "--in",
        "payload.txt", "--out", "locked.bin", "--no-reencrypt"]);
    let out = abpre(dir, &["--seed", "2", "reencrypt", "--pk", "pk.bin", "--rk", "rk_proxy.bin",
        "--policy2", "B", "--in", "locked.bin", "--out", "x"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("re-encryption disabled"));
    ok(dir, &["decrypt", "--pk", "pk.bin", "--sk", "sk.bin", "--in", "locked.bin", "--out", "y"]);
    assert_eq!(fs::read(dir.join("y")).unwrap(), P13_PAYLOAD);
}

#[test]
fn format_and_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    run_p13(dir);

    let mut tampered = fs::read(dir.join("ct1.bin")).unwrap();
    let last = tampered.len() - 1;
    tampered[last] ^= 1;
    fs::write(dir.join("bad.bin"), &tampered).unwrap();
    let out = abpre(dir, &["decrypt", "--pk", "pk.bin", "--sk", "sk.bin", "--in", "bad.bin", "--out", "x"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("AEAD"));

    let mut magic = fs::read(dir.join("pk.bin")).unwrap();
    magic[0] = b'X';
    fs::write(dir.join("xpk.bin"), &magic).unwrap();
    let out = abpre(dir, &["decrypt", "--pk", "xpk.bin", "--sk", "sk.bin", "--in", "ct1.bin", "--out", "x"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad magic"));

    let out = abpre(dir, &["decrypt", "--pk", "missing.bin", "--sk", "sk.bin", "--in", "ct1.bin", "--out", "x"]);
    assert_eq!(code(&out), 2);

    let out = abpre(dir, &["--seed", "3", "encrypt", "--pk", "pk.bin", "--policy", "A AND (B OR", "--in", "payload.txt", "--out", "x"]);
    assert_eq!(code(&out), 3);
    let out = abpre(dir, &["--seed", "3", "encrypt", "--pk", "pk.bin", "--policy", "A AND C", "--in", "payload.txt", "--out", "x"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown attribute `C`"));
    let out = abpre(dir, &["keygen", "--pk", "pk.bin"]);
    assert_eq!(code(&out), 3);
    let out = abpre(dir, &["--seed", "tape:1", "keygen", "--pk", "pk.bin", "--msk", "pk.bin", "--attrs", "A", "--out", "x"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn policy_check_command() {
    let tmp = TempDir::new().unwrap();
    let out = abpre(tmp.path(), &["policy", "check", "--policy", "A AND B", "--attrs", "A"]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("matrix: [[1,1],[0,-1]]"), "{text}");
    assert!(text.contains("NOT SATISFIED"));
}

#[test]
fn pairing_seed_requires_opt_in() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("u"), "A B").unwrap();
    let out = abpre(dir, &["--seed", "5", "setup", "--universe", "u", "--backend", "pairing", "--out-pk", "pk", "--out-msk", "msk"]);
    assert_eq!(code(&out), 3);
    assert!(!dir.join("pk").exists());
    ok(dir, &["--seed", "5", "--insecure-seed", "setup", "--universe", "u", "--backend", "pairing", "--out-pk", "pk", "--out-msk", "msk"]);
    ok(dir, &["setup", "--universe", "u", "--backend", "pairing", "--out-pk", "pk2", "--out-msk", "msk2"]);
}

/// Random payloads up to 1 MiB through both decryption paths, on random
/// policies over a small universe.
#[test]
fn random_file_round_trips() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    fs::write(dir.join("u"), "A B C D").unwrap();
    ok(dir, &["--seed", "11", "setup", "--universe", "u", "--backend", "mock", "--out-pk", "pk", "--out-msk", "msk"]);
    let cases = [
        ("A AND B", "A,B", true, "C OR D", "D", true),
        ("A OR (B AND C)", "B,C", true, "D", "D", true),
        ("A AND B", "A,C", false, "C", "C", true),
        ("(A OR B) AND (C OR D)", "B,D", true, "A AND D", "D", false),
    ];
    for (i, (policy, attrs, ok1, policy2, dattrs, ok2)) in cases.into_iter().enumerate() {
        let len = if i == 0 { 1 << 20 } else { rng.gen_range(0..4096) };
        let mut payload = vec![0u8; len];
        rng.fill_bytes(&mut payload);
        fs::write(dir.join("in"), &payload).unwrap();
        let seed = i.to_string();
        ok(dir, &["--seed", &seed, "keygen", "--pk", "pk", "--msk", "msk", "--attrs", attrs, "--out", "sk"]);
        ok(dir, &["--seed", &seed, "rkgen", "--pk", "pk", "--msk", "msk", "--sk", "sk", "--delegatee-attrs", dattrs, "--out-proxy", "rk", "--out-delegatee", "dk"]);
        ok(dir, &["--seed", &seed, "encrypt", "--pk", "pk", "--policy", policy, "--in", "in", "--out", "ct"]);

        let out = abpre(dir, &["decrypt", "--pk", "pk", "--sk", "sk", "--in", "ct", "--out", "o1"]);
        if ok1 {
            assert_eq!(code(&out), 0, "case {i}");
            assert_eq!(fs::read(dir.join("o1")).unwrap(), payload);
        } else {
            assert_eq!(code(&out), 1, "case {i}");
        }

        let out = abpre(dir, &["--seed", &seed, "reencrypt", "--pk", "pk", "--rk", "rk", "--policy2", policy2, "--in", "ct", "--out", "ct2"]);
        if !ok1 {
            assert_eq!(code(&out), 1, "case {i}");
            continue;
        }
        assert_eq!(code(&out), 0, "case {i}");
        let out = abpre(dir, &["decrypt", "--pk", "pk", "--dk", "dk", "--in", "ct2", "--out", "o2"]);
        if ok2 {
            assert_eq!(code(&out), 0, "case {i}");
            assert_eq!(fs::read(dir.join("o2")).unwrap(), payload);
        } else {
            assert_eq!(code(&out), 1, "case {i}");
        }
        fs::remove_file(dir.join("o1")).ok();
        fs::remove_file(dir.join("o2")).ok();
    }
}

#[test]
fn stdout_output_on_request() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    run_p13(dir);
    let out = abpre(dir, &["decrypt", "--pk", "pk.bin", "--sk", "sk.bin", "--in", "ct1.bin", "--out", "-"]);
    assert!(out.status.success());
    assert_eq!(out.stdout, P13_PAYLOAD);
}

//! The `abpre` command-line tool.
//!
//! Exit codes: 0 success, 1 policy or authorization failure, 2 format or
//! I/O error, 3 usage error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::format::peek_header;
use crate::group::{
    BackendId, DynSource, MockGroup, SuiteParams, DEFAULT_CURVE, MOCK_TEST_PRIME,
};
use crate::policy::{
    compile_lsss, parse_policy, satisfying_rows, AccessMatrix, AttributeSet, PolicyAst,
    PolicyError,
};
use crate::workflow::{self, ErrorKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNAUTHORIZED: i32 = 1;
pub const EXIT_FORMAT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "abpre",
    version,
    about = "Attribute-based proxy re-encryption of files"
)]
struct Cli {
    /// Test only: deterministic randomness, either a u64 seed or
    /// `tape:v1,v2,...` listing the exact scalars to draw.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<String>,

    /// Allow --seed on the pairing backend.
    #[arg(long, global = true)]
    insecure_seed: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Create public parameters and a master key.
    Setup(SetupArgs),
    /// Issue a secret key for an attribute set.
    Keygen {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        msk: PathBuf,
        /// Comma-separated attributes.
        #[arg(long)]
        attrs: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a file under a policy.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Omit the component a proxy needs to re-encrypt.
        #[arg(long)]
        no_reencrypt: bool,
    },
    /// Derive a re-encryption key pair from a secret key.
    Rkgen {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        msk: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        delegatee_attrs: String,
        #[arg(long)]
        out_proxy: PathBuf,
        #[arg(long)]
        out_delegatee: PathBuf,
    },
    /// Re-encrypt a file under a new policy.
    Reencrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        rk: PathBuf,
        #[arg(long)]
        policy2: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt with a secret key or, after re-encryption, a delegatee key.
    Decrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long, required_unless_present = "dk", conflicts_with = "dk")]
        sk: Option<PathBuf>,
        #[arg(long)]
        dk: Option<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Blind a delegatee key for outsourced decryption.
    TransformKeygen {
        #[arg(long)]
        dk: PathBuf,
        #[arg(long)]
        out_tk: PathBuf,
        #[arg(long)]
        out_z: PathBuf,
    },
    /// Partially decrypt a re-encrypted file with a transformation key.
    Transform {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        tk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_partial: PathBuf,
    },
    /// Complete an outsourced decryption.
    Finish {
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        in_partial: PathBuf,
        #[arg(long)]
        in_ct: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Policy inspection.
    #[command(subcommand)]
    Policy(PolicyCommand),
}

#[derive(Args, Debug)]
struct SetupArgs {
    /// File listing the attribute universe.
    #[arg(long)]
    universe: PathBuf,
    #[arg(long, value_enum)]
    backend: Backend,
    #[arg(long)]
    out_pk: PathBuf,
    #[arg(long)]
    out_msk: PathBuf,
    /// Prime modulus of the mock backend.
    #[arg(long, default_value_t = MOCK_TEST_PRIME)]
    modulus: u64,
    /// Discrete log of g2 on the mock backend.
    #[arg(long, default_value_t = 7)]
    g2_exponent: u64,
    #[arg(long, default_value = DEFAULT_CURVE)]
    curve: String,
}

#[derive(Subcommand, Debug)]
enum PolicyCommand {
    /// Print the compiled matrix and, given attributes, whether they
    /// satisfy the policy.
    Check {
        #[arg(long)]
        policy: String,
        #[arg(long)]
        attrs: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Backend {
    Mock,
    Pairing,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure {
            code: EXIT_FORMAT,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<workflow::Error> for Failure {
    fn from(e: workflow::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Authorization => EXIT_UNAUTHORIZED,
            ErrorKind::Format => EXIT_FORMAT,
            ErrorKind::Usage => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<PolicyError> for Failure {
    fn from(e: PolicyError) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the tool with process stdio and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "abpre: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::io(path, e))?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| Failure::io(path, e))
}

/// Writes `bytes` to `path`, or to stdout for `-`. Secret objects get
/// owner-only permissions.
fn write_output(
    path: &Path,
    bytes: &[u8],
    secret: bool,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    if path == Path::new("-") {
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| Failure::io(path, e));
    }
    let mut options = fs::OpenOptions::new();
    options.write(true).create(true).truncate(true);
    #[cfg(unix)]
    if secret {
        use std::os::unix::fs::OpenOptionsExt;
        options.mode(0o600);
    }
    let mut file = options.open(path).map_err(|e| Failure::io(path, e))?;
    #[cfg(unix)]
    if secret {
        use std::os::unix::fs::PermissionsExt;
        file.set_permissions(fs::Permissions::from_mode(0o600))
            .map_err(|e| Failure::io(path, e))?;
    }
    file.write_all(bytes).map_err(|e| Failure::io(path, e))
}

fn write_object(path: &Path, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    let secret = peek_header(bytes)
        .map(|h| h.object_type.is_secret())
        .unwrap_or(true);
    write_output(path, bytes, secret, stdout)
}

fn parse_seed(text: &str) -> Result<DynSource, Failure> {
    if let Some(list) = text.strip_prefix("tape:") {
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse::<u64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::usage(format!("invalid --seed tape `{list}`")))?;
        return Ok(DynSource::tape(values));
    }
    text.parse::<u64>()
        .map(DynSource::seeded)
        .map_err(|_| Failure::usage(format!("invalid --seed `{text}`")))
}

struct Randomness {
    seed: Option<String>,
    insecure: bool,
}

impl Randomness {
    fn source(&self, backend: BackendId) -> Result<DynSource, Failure> {
        let Some(seed) = &self.seed else {
            return Ok(DynSource::os());
        };
        if backend == BackendId::Pairing && !self.insecure {
            return Err(Failure::usage(
                "--seed is for tests only and is refused on the pairing backend without --insecure-seed",
            ));
        }
        parse_seed(seed)
    }

    fn source_for(&self, object: &[u8]) -> Result<DynSource, Failure> {
        let backend = peek_header(object)
            .map_err(|e| Failure::from(workflow::Error::from(e)))?
            .backend;
        self.source(backend)
    }
}

fn attrs(list: &str) -> Result<AttributeSet, Failure> {
    Ok(AttributeSet::parse_list(list)?)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Outcome {
    let randomness = Randomness {
        seed: cli.seed,
        insecure: cli.insecure_seed,
    };
    match cli.command {
        Command::Setup(a) => {
            let suite = match a.backend {
                Backend::Mock => SuiteParams::Mock {
                    modulus: a.modulus,
                    g2_exponent: a.g2_exponent,
                },
                Backend::Pairing => SuiteParams::Pairing { curve: a.curve },
            };
            let mut rng = randomness.source(suite.backend())?;
            let text = read_input(&a.universe)?;
            let text = String::from_utf8(text)
                .map_err(|_| Failure::usage("universe file is not UTF-8"))?;
            let universe = workflow::parse_universe(&text);
            let (pk, msk) = workflow::setup(&suite, &universe, &mut rng)?;
            write_object(&a.out_pk, &pk, stdout)?;
            write_object(&a.out_msk, &msk, stdout)?;
        }
        Command::Keygen {
            pk,
            msk,
            attrs: list,
            out,
        } => {
            let set = attrs(&list)?;
            let (pk, msk) = (read_input(&pk)?, read_input(&msk)?);
            let mut rng = randomness.source_for(&pk)?;
            let sk = workflow::keygen(&pk, &msk, &set, &mut rng)?;
            write_object(&out, &sk, stdout)?;
        }
        Command::Encrypt {
            pk,
            policy,
            input,
            out,
            no_reencrypt,
        } => {
            let pk = read_input(&pk)?;
            let payload = read_input(&input)?;
            let mut rng = randomness.source_for(&pk)?;
            let sealed = workflow::encrypt(&pk, &policy, !no_reencrypt, &payload, &mut rng)?;
            write_output(&out, &sealed, false, stdout)?;
        }
        Command::Rkgen {
            pk,
            msk,
            sk,
            delegatee_attrs,
            out_proxy,
            out_delegatee,
        } => {
            let set = attrs(&delegatee_attrs)?;
            let (pk, msk, sk) = (read_input(&pk)?, read_input(&msk)?, read_input(&sk)?);
            let mut rng = randomness.source_for(&pk)?;
            let (rk, dk) = workflow::rkgen(&pk, &msk, &sk, &set, &mut rng)?;
            write_object(&out_proxy, &rk, stdout)?;
            write_object(&out_delegatee, &dk, stdout)?;
        }
        Command::Reencrypt {
            pk,
            rk,
            policy2,
            input,
            out,
        } => {
            let (pk, rk, sealed) = (read_input(&pk)?, read_input(&rk)?, read_input(&input)?);
            let mut rng = randomness.source_for(&pk)?;
            let sealed2 = workflow::reencrypt(&pk, &rk, &policy2, &sealed, &mut rng)?;
            write_output(&out, &sealed2, false, stdout)?;
        }
        Command::Decrypt {
            pk,
            sk,
            dk,
            input,
            out,
        } => {
            let key_path = sk.or(dk).expect("clap requires --sk or --dk");
            let (pk, key, sealed) =
                (read_input(&pk)?, read_input(&key_path)?, read_input(&input)?);
            let payload = workflow::decrypt(&pk, &key, &sealed)?;
            write_output(&out, &payload, true, stdout)?;
        }
        Command::TransformKeygen { dk, out_tk, out_z } => {
            let dk = read_input(&dk)?;
            let mut rng = randomness.source_for(&dk)?;
            let (tk, z) = workflow::transform_keygen(&dk, &mut rng)?;
            write_object(&out_tk, &tk, stdout)?;
            write_object(&out_z, &z, stdout)?;
        }
        Command::Transform {
            pk,
            tk,
            input,
            out_partial,
        } => {
            let (pk, tk, sealed) = (read_input(&pk)?, read_input(&tk)?, read_input(&input)?);
            let pd = workflow::transform(&pk, &tk, &sealed)?;
            write_object(&out_partial, &pd, stdout)?;
        }
        Command::Finish {
            z,
            in_partial,
            in_ct,
            out,
        } => {
            let (z, pd, sealed) = (read_input(&z)?, read_input(&in_partial)?, read_input(&in_ct)?);
            let payload = workflow::finish(&z, &pd, &sealed)?;
            write_output(&out, &payload, true, stdout)?;
        }
        Command::Policy(PolicyCommand::Check { policy, attrs: list }) => {
            let set = list.as_deref().map(attrs).transpose()?;
            let report = policy_explain(&policy, set.as_ref())?;
            write!(stdout, "{report}").map_err(|e| Failure::io(Path::new("-"), e))?;
            if report.satisfied() == Some(false) {
                return Ok(EXIT_UNAUTHORIZED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Compiled form of a policy and, for a given attribute set, its
/// reconstruction. Row indices are 1-based.
#[derive(Debug, Clone)]
pub struct PolicyReport {
    pub ast: PolicyAst,
    pub matrix: AccessMatrix,
    pub attrs: Option<AttributeSet>,
    /// `(I, omega)` when `attrs` satisfies the policy.
    pub reconstruction: Option<(Vec<usize>, Vec<i64>)>,
}

impl PolicyReport {
    pub fn satisfied(&self) -> Option<bool> {
        self.attrs.as_ref().map(|_| self.reconstruction.is_some())
    }
}

impl fmt::Display for PolicyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "policy: {}", self.ast)?;
        writeln!(f, "matrix: {}", self.matrix)?;
        f.write_str("rho:")?;
        for (i, label) in self.matrix.rho().iter().enumerate() {
            write!(f, " {}:{label}", i + 1)?;
        }
        writeln!(f)?;
        let Some(attrs) = &self.attrs else {
            return Ok(());
        };
        writeln!(f, "attributes: {attrs}")?;
        match &self.reconstruction {
            Some((rows, omega)) => {
                let join = |v: Vec<String>| v.join(",");
                writeln!(f, "I: {{{}}}", join(rows.iter().map(|r| r.to_string()).collect()))?;
                writeln!(f, "omega: ({})", join(omega.iter().map(|w| w.to_string()).collect()))?;
                writeln!(f, "SATISFIED")
            }
            None => writeln!(f, "NOT SATISFIED"),
        }
    }
}

/// Reconstruction coefficients are solved over `Z_p` with `p = 2^61 - 1`
/// and shown as their representatives of least magnitude.
pub fn policy_explain(
    formula: &str,
    attrs: Option<&AttributeSet>,
) -> Result<PolicyReport, PolicyError> {
    let ast = parse_policy(formula)?;
    let matrix = compile_lsss(&ast);
    let field = MockGroup::new(MOCK_TEST_PRIME, 1).expect("prime modulus");
    let reconstruction = attrs.and_then(|set| {
        satisfying_rows(&field, &matrix, set).map(|rec| {
            let omega = rec
                .coefficients
                .iter()
                .map(|w| {
                    let v = w.value() as i64;
                    let neg = (-*w).value() as i64;
                    if neg < v {
                        -neg
                    } else {
                        v
                    }
                })
                .collect();
            (rec.rows.iter().map(|i| i + 1).collect(), omega)
        })
    });
    Ok(PolicyReport {
        ast,
        matrix,
        attrs: attrs.cloned(),
        reconstruction,
    })
}

//! External compressor commands behind the codec contract.
//!
//! A command template is split shell-style into an argument vector and run
//! directly (no shell). In file mode the `{in}` and `{out}` placeholders are
//! replaced with paths in a per-run scratch directory; in stream mode the
//! input goes to stdin and the output is read from stdout.
//!
//! The measured wall time runs from spawn to exit, so process start-up is
//! included. For fast codecs a minimum cumulative runtime can be set; the
//! command is then repeated until the floor is reached and the mean is
//! reported.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use crate::codec::{Codec, CodecKind};
use crate::error::{Error, Result};
use crate::harness::CodecSpec;

/// Environment variable overriding the parent of scratch directories.
pub const SCRATCH_ENV: &str = "COMPSEL_SCRATCH";

pub const DEFAULT_TIMEOUT_S: f64 = 300.0;

/// Default cumulative-runtime floor when repetition is requested.
pub const DEFAULT_MIN_RUNTIME_S: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IoMode {
    File,
    Stream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Encode,
    Decode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalCodecSpec {
    pub name: String,
    pub encode_template: String,
    pub decode_template: String,
    pub io_mode: IoMode,
    /// Seconds.
    pub timeout: f64,
}

impl ExternalCodecSpec {
    pub fn new(
        name: impl Into<String>,
        encode_template: impl Into<String>,
        decode_template: impl Into<String>,
        io_mode: IoMode,
        timeout: f64,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            encode_template: encode_template.into(),
            decode_template: decode_template.into(),
            io_mode,
            timeout,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Error::Usage(format!("codec `{}`: {msg}", self.name));
        if self.name.trim().is_empty() {
            return Err(Error::Usage("external codec without a name".into()));
        }
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err(bad(format!("timeout must be > 0, got {}", self.timeout)));
        }
        for (which, template) in [
            ("encode", &self.encode_template),
            ("decode", &self.decode_template),
        ] {
            let argv = split_template(template)
                .ok_or_else(|| bad(format!("{which} template is not valid shell syntax")))?;
            if argv.is_empty() {
                return Err(bad(format!("{which} template is empty")));
            }
            let has_in = template.contains("{in}");
            let has_out = template.contains("{out}");
            match self.io_mode {
                IoMode::File if !(has_in && has_out) => {
                    return Err(bad(format!(
                        "{which} template needs both {{in}} and {{out}} in file mode"
                    )))
                }
                IoMode::Stream if has_in || has_out => {
                    return Err(bad(format!(
                        "{which} template must not use {{in}}/{{out}} in stream mode"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn template(&self, direction: Direction) -> &str {
        match direction {
            Direction::Encode => &self.encode_template,
            Direction::Decode => &self.decode_template,
        }
    }
}

fn split_template(template: &str) -> Option<Vec<String>> {
    shlex::split(template)
}

/// Input to an external command.
#[derive(Debug, Clone, Copy)]
pub enum ExternalInput<'a> {
    Bytes(&'a [u8]),
    Path(&'a Path),
}

#[derive(Debug, Clone)]
pub struct ExternalOutput {
    pub bytes: Vec<u8>,
    /// Spawn-to-exit seconds; the mean per run when repeated.
    pub wall_time: f64,
    pub runs: u32,
}

/// A per-run scratch directory, removed on drop unless retained.
#[derive(Debug)]
pub struct Scratch {
    dir: Option<tempfile::TempDir>,
    kept: Option<PathBuf>,
}

static SCRATCH_SEQ: AtomicU64 = AtomicU64::new(0);

impl Scratch {
    /// Creates a directory under `$COMPSEL_SCRATCH`, or the system temp dir.
    pub fn new() -> Result<Self> {
        let base = std::env::var_os(SCRATCH_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(std::env::temp_dir);
        Self::in_dir(&base)
    }

    pub fn in_dir(base: &Path) -> Result<Self> {
        fs::create_dir_all(base).map_err(|e| Error::file(base, e))?;
        let dir = tempfile::Builder::new()
            .prefix("compsel-")
            .tempdir_in(base)
            .map_err(|e| Error::file(base, e))?;
        Ok(Self {
            dir: Some(dir),
            kept: None,
        })
    }

    pub fn path(&self) -> &Path {
        match (&self.dir, &self.kept) {
            (Some(d), _) => d.path(),
            (None, Some(p)) => p,
            (None, None) => unreachable!("scratch directory always exists"),
        }
    }

    /// Keeps the directory on disk for debugging; returns its path.
    pub fn retain(&mut self) -> PathBuf {
        if let Some(dir) = self.dir.take() {
            self.kept = Some(dir.keep());
        }
        self.kept.clone().expect("retained path")
    }

    pub fn is_retained(&self) -> bool {
        self.kept.is_some()
    }

    fn fresh_path(&self, ext: &str) -> PathBuf {
        let n = SCRATCH_SEQ.fetch_add(1, Ordering::Relaxed);
        self.path().join(format!("{n:06}.{ext}"))
    }
}

/// Runs the encode or decode command once.
pub fn run_external(
    spec: &ExternalCodecSpec,
    direction: Direction,
    input: ExternalInput<'_>,
    scratch: &Scratch,
) -> Result<ExternalOutput> {
    let template = spec.template(direction);
    let mut argv = split_template(template)
        .filter(|a| !a.is_empty())
        .ok_or_else(|| Error::Usage(format!("codec `{}`: bad template", spec.name)))?;

    match spec.io_mode {
        IoMode::File => {
            let mut temp_in = None;
            let in_path = match input {
                ExternalInput::Path(p) => p.to_path_buf(),
                ExternalInput::Bytes(b) => {
                    let p = scratch.fresh_path("in");
                    fs::write(&p, b).map_err(|e| Error::file(&p, e))?;
                    temp_in = Some(p.clone());
                    p
                }
            };
            let out_path = scratch.fresh_path("out");
            for arg in &mut argv {
                *arg = arg
                    .replace("{in}", &in_path.to_string_lossy())
                    .replace("{out}", &out_path.to_string_lossy());
            }
            let (wall_time, _) = spawn_and_wait(&argv, None, spec.timeout)?;
            let bytes = fs::read(&out_path).map_err(|e| Error::file(&out_path, e))?;
            // Clean up only after success; failures leave files for inspection.
            let _ = fs::remove_file(&out_path);
            if let Some(p) = temp_in {
                let _ = fs::remove_file(p);
            }
            Ok(ExternalOutput {
                bytes,
                wall_time,
                runs: 1,
            })
        }
        IoMode::Stream => {
            let owned;
            let data = match input {
                ExternalInput::Bytes(b) => b,
                ExternalInput::Path(p) => {
                    owned = fs::read(p).map_err(|e| Error::file(p, e))?;
                    &owned[..]
                }
            };
            let (wall_time, bytes) = spawn_and_wait(&argv, Some(data), spec.timeout)?;
            Ok(ExternalOutput {
                bytes,
                wall_time,
                runs: 1,
            })
        }
    }
}

/// Repeats the command until the cumulative wall time reaches `min_runtime`
/// seconds, reporting the mean. `None` runs it once.
pub fn run_external_repeated(
    spec: &ExternalCodecSpec,
    direction: Direction,
    input: ExternalInput<'_>,
    scratch: &Scratch,
    min_runtime: Option<f64>,
) -> Result<ExternalOutput> {
    let mut out = run_external(spec, direction, input, scratch)?;
    let Some(floor) = min_runtime else {
        return Ok(out);
    };
    let mut total = out.wall_time;
    let mut runs = 1u32;
    while total < floor {
        let next = run_external(spec, direction, input, scratch)?;
        total += next.wall_time;
        runs += 1;
        out.bytes = next.bytes;
    }
    out.wall_time = total / f64::from(runs);
    out.runs = runs;
    Ok(out)
}

/// True iff decoding the encoded input reproduces it byte for byte.
pub fn verify_roundtrip(
    spec: &ExternalCodecSpec,
    input: ExternalInput<'_>,
    scratch: &Scratch,
) -> Result<bool> {
    let owned;
    let original = match input {
        ExternalInput::Bytes(b) => b,
        ExternalInput::Path(p) => {
            owned = fs::read(p).map_err(|e| Error::file(p, e))?;
            &owned[..]
        }
    };
    let encoded = run_external(spec, Direction::Encode, input, scratch)?;
    let decoded = run_external(
        spec,
        Direction::Decode,
        ExternalInput::Bytes(&encoded.bytes),
        scratch,
    )?;
    Ok(decoded.bytes == original)
}

/// Spawns `argv`, feeds `stdin` if given, and waits with a timeout.
/// Returns the wall time and captured stdout.
fn spawn_and_wait(argv: &[String], stdin: Option<&[u8]>, timeout: f64) -> Result<(f64, Vec<u8>)> {
    let command_line = argv.join(" ");
    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .stdin(if stdin.is_some() {
            Stdio::piped()
        } else {
            Stdio::null()
        })
        .stdout(if stdin.is_some() {
            Stdio::piped()
        } else {
            Stdio::null()
        })
        .stderr(Stdio::piped());

    let start = Instant::now();
    let mut child = cmd.spawn().map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound {
                program: argv[0].clone(),
            }
        } else {
            Error::ExternalFailure {
                command: command_line.clone(),
                status: "spawn failed".into(),
                stderr: e.to_string(),
            }
        }
    })?;

    thread::scope(|s| {
        let writer = child.stdin.take().map(|mut pipe| {
            let data = stdin.unwrap_or_default();
            // A child that exits early closes the pipe; that shows up in
            // its exit status, not here.
            s.spawn(move || {
                let _ = pipe.write_all(data);
            })
        });
        let stdout_reader = child.stdout.take().map(|mut pipe| {
            s.spawn(move || {
                let mut buf = Vec::new();
                let _ = pipe.read_to_end(&mut buf);
                buf
            })
        });
        let stderr_reader = child.stderr.take().map(|mut pipe| {
            s.spawn(move || {
                let mut buf = Vec::new();
                let _ = pipe.read_to_end(&mut buf);
                buf
            })
        });

        let status = child.wait_timeout(Duration::from_secs_f64(timeout))?;
        let elapsed = start.elapsed().as_secs_f64();
        let Some(status) = status else {
            let _ = child.kill();
            let _ = child.wait();
            return Err(Error::Timeout {
                command: command_line.clone(),
                seconds: timeout,
            });
        };
        if let Some(w) = writer {
            let _ = w.join();
        }
        let stdout = stdout_reader
            .map(|h| h.join().unwrap_or_default())
            .unwrap_or_default();
        let stderr = stderr_reader
            .map(|h| h.join().unwrap_or_default())
            .unwrap_or_default();
        if !status.success() {
            return Err(Error::ExternalFailure {
                command: command_line.clone(),
                status: status.to_string(),
                stderr: String::from_utf8_lossy(&stderr).trim().to_owned(),
            });
        }
        Ok((elapsed.max(1e-9), stdout))
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default, rename = "codec")]
    codecs: Vec<RegistryEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryEntry {
    name: String,
    builtin: Option<CodecKind>,
    encode: Option<String>,
    decode: Option<String>,
    io_mode: Option<IoMode>,
    timeout: Option<f64>,
}

/// Parses a codec registry document.
///
/// ```toml
/// [[codec]]
/// name = "huffman"
/// builtin = "huffman"
///
/// [[codec]]
/// name = "gzip-6"
/// encode = "gzip -6 -c"
/// decode = "gzip -d -c"
/// io_mode = "stream"     # or "file", with {in} and {out} in both templates
/// timeout = 60.0         # seconds, default 300
/// ```
pub fn parse_registry(text: &str) -> Result<Vec<CodecSpec>> {
    let file: RegistryFile = toml::from_str(text).map_err(|e| Error::Parse {
        line: e
            .span()
            .map(|s| text[..s.start].lines().count().max(1) as u64)
            .unwrap_or(0),
        message: e.message().to_owned(),
    })?;
    if file.codecs.is_empty() {
        return Err(Error::EmptyInput("codec registry lists no codecs".into()));
    }
    let mut names = std::collections::HashSet::new();
    let mut specs = Vec::with_capacity(file.codecs.len());
    for entry in file.codecs {
        if !names.insert(entry.name.clone()) {
            return Err(Error::DuplicateMethod(entry.name));
        }
        let spec = match (entry.builtin, entry.encode, entry.decode) {
            (Some(kind), None, None) => {
                if entry.io_mode.is_some() || entry.timeout.is_some() {
                    return Err(Error::Usage(format!(
                        "codec `{}`: io_mode/timeout apply to external codecs only",
                        entry.name
                    )));
                }
                CodecSpec::Builtin(Codec::named(entry.name, kind))
            }
            (None, Some(enc), Some(dec)) => CodecSpec::External(ExternalCodecSpec::new(
                entry.name,
                enc,
                dec,
                entry.io_mode.unwrap_or(IoMode::Stream),
                entry.timeout.unwrap_or(DEFAULT_TIMEOUT_S),
            )?),
            _ => {
                return Err(Error::Usage(format!(
                    "codec `{}`: give either `builtin` or both `encode` and `decode`",
                    entry.name
                )))
            }
        };
        specs.push(spec);
    }
    Ok(specs)
}

pub fn load_registry(path: &Path) -> Result<Vec<CodecSpec>> {
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_registry(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> ExternalCodecSpec {
        ExternalCodecSpec::new("cat", "cat", "cat", IoMode::Stream, 10.0).unwrap()
    }

    fn sample(len: usize) -> Vec<u8> {
        (0..len).map(|i| (i * 7 % 256) as u8).collect()
    }

    #[test]
    fn stream_pass_through() {
        let scratch = Scratch::new().unwrap();
        let input = sample(1024);
        let out = run_external(&cat(), Direction::Encode, ExternalInput::Bytes(&input), &scratch)
            .unwrap();
        assert_eq!(out.bytes, input);
        assert!(out.wall_time > 0.0);
    }

    #[test]
    fn file_mode_copy() {
        let scratch = Scratch::new().unwrap();
        let spec =
            ExternalCodecSpec::new("cp", "cp {in} {out}", "cp {in} {out}", IoMode::File, 10.0)
                .unwrap();
        let input = sample(1024);
        let out =
            run_external(&spec, Direction::Encode, ExternalInput::Bytes(&input), &scratch).unwrap();
        assert_eq!(out.bytes, input);
        assert!(verify_roundtrip(&spec, ExternalInput::Bytes(&input), &scratch).unwrap());
        // Successful runs leave nothing behind.
        assert_eq!(fs::read_dir(scratch.path()).unwrap().count(), 0);
    }

    #[test]
    fn missing_binary_is_not_found() {
        let scratch = Scratch::new().unwrap();
        let spec = ExternalCodecSpec::new(
            "ghost",
            "compsel-no-such-binary-x",
            "cat",
            IoMode::Stream,
            5.0,
        )
        .unwrap();
        let err = run_external(&spec, Direction::Encode, ExternalInput::Bytes(b"x"), &scratch)
            .unwrap_err();
        assert!(matches!(err, Error::NotFound { .. }));
        assert!(err.is_external());
    }

    #[test]
    fn nonzero_exit_captures_stderr() {
        let scratch = Scratch::new().unwrap();
        let spec = ExternalCodecSpec::new(
            "fails",
            "sh -c 'echo boom >&2; exit 3'",
            "cat",
            IoMode::Stream,
            5.0,
        )
        .unwrap();
        match run_external(&spec, Direction::Encode, ExternalInput::Bytes(b""), &scratch) {
            Err(Error::ExternalFailure { stderr, .. }) => assert_eq!(stderr, "boom"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn timeout_kills_the_child() {
        let scratch = Scratch::new().unwrap();
        let spec = ExternalCodecSpec::new("slow", "sleep 5", "cat", IoMode::Stream, 0.2).unwrap();
        let start = Instant::now();
        let err = run_external(&spec, Direction::Encode, ExternalInput::Bytes(b""), &scratch)
            .unwrap_err();
        assert!(matches!(err, Error::Timeout { .. }));
        assert!(start.elapsed() < Duration::from_secs(4));
    }

    #[test]
    fn lossy_pair_fails_verification() {
        let scratch = Scratch::new().unwrap();
        let spec =
            ExternalCodecSpec::new("trunc", "head -c 10", "cat", IoMode::Stream, 5.0).unwrap();
        assert!(!verify_roundtrip(&spec, ExternalInput::Bytes(&sample(100)), &scratch).unwrap());
        assert!(verify_roundtrip(&cat(), ExternalInput::Bytes(&sample(100)), &scratch).unwrap());
    }

    #[test]
    fn min_runtime_repeats() {
        let scratch = Scratch::new().unwrap();
        let out = run_external_repeated(
            &cat(),
            Direction::Encode,
            ExternalInput::Bytes(b"abc"),
            &scratch,
            Some(0.05),
        )
        .unwrap();
        assert!(out.runs >= 1);
        assert!(out.wall_time * f64::from(out.runs) >= 0.05);
        assert_eq!(out.bytes, b"abc");
    }

    #[test]
    fn template_validation() {
        assert!(ExternalCodecSpec::new("a", "gzip {in}", "gzip -d", IoMode::File, 1.0).is_err());
        assert!(ExternalCodecSpec::new("a", "gzip -c {in}", "x", IoMode::Stream, 1.0).is_err());
        assert!(ExternalCodecSpec::new("a", "cat", "cat", IoMode::Stream, 0.0).is_err());
        assert!(ExternalCodecSpec::new("a", "", "cat", IoMode::Stream, 1.0).is_err());
        assert!(ExternalCodecSpec::new("a", "cat 'x", "cat", IoMode::Stream, 1.0).is_err());
    }

    #[test]
    fn scratch_retained_on_request() {
        let mut scratch = Scratch::new().unwrap();
        let path = scratch.retain();
        assert!(scratch.is_retained());
        drop(scratch);
        assert!(path.exists());
        fs::remove_dir_all(path).unwrap();
    }

    #[test]
    fn registry_parsing() {
        let specs = parse_registry(
            r#"
            [[codec]]
            name = "huffman"
            builtin = "huffman"

            [[codec]]
            name = "gz"
            encode = "gzip -c"
            decode = "gzip -dc"
            timeout = 30.0
            "#,
        )
        .unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].name(), "huffman");
        match &specs[1] {
            CodecSpec::External(e) => {
                assert_eq!(e.io_mode, IoMode::Stream);
                assert_eq!(e.timeout, 30.0);
            }
            other => panic!("unexpected {other:?}"),
        }

        assert!(parse_registry("").is_err());
        assert!(parse_registry("[[codec]]\nname = \"x\"\n").is_err());
        assert!(parse_registry("[[codec]]\nname = \"x\"\nbuiltin = \"zip\"\n").is_err());
        assert!(parse_registry(
            "[[codec]]\nname = \"x\"\nbuiltin = \"lzw\"\n[[codec]]\nname = \"x\"\nbuiltin = \"lzw\"\n"
        )
        .is_err());
        assert!(matches!(
            parse_registry("[[codec]]\nname = \"x\"\nbogus = 1\n"),
            Err(Error::Parse { .. })
        ));
    }
}

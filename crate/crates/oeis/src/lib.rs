//! OEIS b-file client with an on-disk cache and vendored fixtures, plus the
//! cross-checks of catalog sequences against the cited A-numbers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use asymmetry::catalog::{self, GfParams};
use asymmetry::series::Rational;
use asymmetry::verify::{Recorder, Status, VerificationReport};
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

pub const CACHE_ENV: &str = "ASYM_OEIS_CACHE";
pub const ENDPOINT_ENV: &str = "ASYM_OEIS_ENDPOINT";
pub const DEFAULT_ENDPOINT: &str = "https://oeis.org";

/// Fewest overlapping terms for a comparison to count.
pub const MIN_OVERLAP: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OeisError {
    #[error("invalid A-number `{0}`: expected `A` followed by six digits")]
    InvalidANumber(String),
    #[error("network error fetching {a_number} (retryable): {message}")]
    Network { a_number: String, message: String },
    #[error("{a_number} is not available: {message}")]
    NotAvailable { a_number: String, message: String },
    #[error("malformed b-file for {a_number}, line {line}: {message}")]
    Parse {
        a_number: String,
        line: usize,
        message: String,
    },
    #[error("cache error: {0}")]
    Cache(String),
    #[error("catalog error: {0}")]
    Catalog(String),
}

impl OeisError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, Self::Network { .. })
    }
}

pub type Result<T> = std::result::Result<T, OeisError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Online,
    Offline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Remote,
    Cache,
    Vendored,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceRef {
    pub a_number: String,
    pub offset: i64,
    #[serde(serialize_with = "as_strings")]
    pub terms: Vec<BigInt>,
    pub source: Source,
}

fn as_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl SequenceRef {
    /// Term with OEIS index `i`, if present.
    pub fn term(&self, i: i64) -> Option<&BigInt> {
        let k = i.checked_sub(self.offset)?;
        usize::try_from(k).ok().and_then(|k| self.terms.get(k))
    }
}

pub fn validate_a_number(a: &str) -> Result<()> {
    let ok = a.len() == 7 && a.starts_with('A') && a[1..].bytes().all(|b| b.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(OeisError::InvalidANumber(a.to_string()))
    }
}

/// Parses b-file text: `n a(n)` per line, `#` comments and blank lines
/// skipped, indices consecutive.
pub fn parse_bfile(a_number: &str, text: &str) -> Result<(i64, Vec<BigInt>)> {
    let err = |line: usize, message: String| OeisError::Parse {
        a_number: a_number.to_string(),
        line,
        message,
    };
    let mut offset = None;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let (Some(n), Some(v), None) = (tok.next(), tok.next(), tok.next()) else {
            return Err(err(i + 1, format!("expected `n a(n)`, got `{line}`")));
        };
        let n: i64 = n
            .parse()
            .map_err(|_| err(i + 1, format!("bad index `{n}`")))?;
        let v: BigInt = v
            .parse()
            .map_err(|_| err(i + 1, format!("bad term `{v}`")))?;
        match offset {
            None => offset = Some(n),
            Some(o) => {
                let want = o + terms.len() as i64;
                if n != want {
                    return Err(err(
                        i + 1,
                        format!("index {n} out of sequence, expected {want}"),
                    ));
                }
            }
        }
        terms.push(v);
    }
    match offset {
        Some(o) => Ok((o, terms)),
        None => Err(err(text.lines().count(), "no terms".to_string())),
    }
}

const VENDORED: &[(&str, &str)] = &[
    ("A000085", include_str!("../fixtures/b000085.txt")),
    ("A001523", include_str!("../fixtures/b001523.txt")),
    ("A038205", include_str!("../fixtures/b038205.txt")),
    ("A047974", include_str!("../fixtures/b047974.txt")),
    ("A051288", include_str!("../fixtures/b051288.txt")),
    ("A053871", include_str!("../fixtures/b053871.txt")),
    ("A096441", include_str!("../fixtures/b096441.txt")),
];

pub fn vendored(a_number: &str) -> Option<&'static str> {
    VENDORED
        .iter()
        .find(|(a, _)| *a == a_number)
        .map(|(_, t)| *t)
}

#[derive(Debug, Clone)]
pub struct Client {
    pub cache_dir: PathBuf,
    pub endpoint: String,
    pub timeout: Duration,
}

impl Client {
    pub fn new(cache_dir: impl Into<PathBuf>, endpoint: impl Into<String>) -> Self {
        Self {
            cache_dir: cache_dir.into(),
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            timeout: Duration::from_secs(20),
        }
    }

    /// Cache directory from `ASYM_OEIS_CACHE` (else the user cache dir),
    /// endpoint from `ASYM_OEIS_ENDPOINT`.
    pub fn from_env() -> Self {
        let cache = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(default_cache_dir);
        let endpoint = std::env::var(ENDPOINT_ENV).unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string());
        Self::new(cache, endpoint)
    }

    pub fn cache_path(&self, a_number: &str) -> PathBuf {
        self.cache_dir.join(format!("b{}.txt", &a_number[1..]))
    }

    pub fn fetch_bfile(&self, a_number: &str, mode: Mode) -> Result<SequenceRef> {
        validate_a_number(a_number)?;
        match mode {
            Mode::Online => {
                let text = self.download(a_number)?;
                let (offset, terms) = parse_bfile(a_number, &text)?;
                write_atomic(&self.cache_path(a_number), &text)?;
                Ok(SequenceRef {
                    a_number: a_number.to_string(),
                    offset,
                    terms,
                    source: Source::Remote,
                })
            }
            Mode::Offline => {
                let path = self.cache_path(a_number);
                let (text, source) = match fs::read_to_string(&path) {
                    Ok(t) => (t, Source::Cache),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                        match vendored(a_number) {
                            Some(t) => (t.to_string(), Source::Vendored),
                            None => {
                                return Err(OeisError::NotAvailable {
                                    a_number: a_number.to_string(),
                                    message: format!(
                                        "offline, not cached in {} and no vendored fixture",
                                        self.cache_dir.display()
                                    ),
                                })
                            }
                        }
                    }
                    Err(e) => return Err(OeisError::Cache(format!("{}: {e}", path.display()))),
                };
                let (offset, terms) = parse_bfile(a_number, &text)?;
                Ok(SequenceRef {
                    a_number: a_number.to_string(),
                    offset,
                    terms,
                    source,
                })
            }
        }
    }

    fn download(&self, a_number: &str) -> Result<String> {
        let url = format!("{}/{}/b{}.txt", self.endpoint, a_number, &a_number[1..]);
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let net = |message: String| OeisError::Network {
            a_number: a_number.to_string(),
            message,
        };
        match agent.get(&url).call() {
            Ok(mut resp) => resp
                .body_mut()
                .read_to_string()
                .map_err(|e| net(format!("{url}: {e}"))),
            Err(ureq::Error::StatusCode(404)) => Err(OeisError::NotAvailable {
                a_number: a_number.to_string(),
                message: format!("{url} returned 404"),
            }),
            Err(e) => Err(net(format!("{url}: {e}"))),
        }
    }
}

fn default_cache_dir() -> PathBuf {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(x).join("asymmetry").join("oeis");
    }
    if let Some(h) = std::env::var_os("HOME") {
        return PathBuf::from(h)
            .join(".cache")
            .join("asymmetry")
            .join("oeis");
    }
    PathBuf::from(".asymmetry-cache")
}

/// Write to a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let e = |e: std::io::Error| OeisError::Cache(format!("{}: {e}", path.display()));
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(e)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(e)?;
    tmp.write_all(text.as_bytes()).map_err(e)?;
    tmp.persist(path).map_err(|p| e(p.error))?;
    Ok(())
}

/// `computed[i]` is compared with the OEIS term of index `i + offset_shift`.
pub fn compare_sequence(
    computed: &[BigInt],
    r: &SequenceRef,
    offset_shift: i64,
) -> VerificationReport {
    let start = Instant::now();
    let id = format!("oeis/{}", r.a_number);
    let pairs: Vec<(usize, &BigInt)> = computed
        .iter()
        .enumerate()
        .filter_map(|(i, _)| r.term(i as i64 + offset_shift).map(|t| (i, t)))
        .collect();
    if pairs.len() < MIN_OVERLAP {
        let mut rep = VerificationReport::skipped(
            &id,
            &format!("only {} overlapping terms, need {MIN_OVERLAP}", pairs.len()),
        );
        rep.parameters
            .insert("offset_shift".into(), offset_shift.into());
        return rep;
    }
    let mut rec = Recorder::new(&id);
    rec.param("offset_shift", offset_shift)
        .param("overlap", pairs.len())
        .param("source", r.source);
    for (i, t) in pairs {
        rec.expect_eq(
            format!("a({})", i as i64 + offset_shift),
            t.to_string(),
            computed[i].to_string(),
        );
    }
    let mut rep = rec.finish();
    rep.runtime_ms = start.elapsed().as_millis() as u64;
    rep
}

/// How catalog coefficients line up with the terms of a cited sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Layout {
    /// Counts `n = 0, 1, ...` (times `n!` for EGFs).
    Sequence,
    /// Rows `n = 0, 1, ...` of `[var^k size^n]`, `k = 0..=n/2`, flattened.
    Triangle { var: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub a_number: &'static str,
    pub entry: &'static str,
    pub layout: Layout,
    /// First catalog index compared.
    pub first_n: usize,
    /// OEIS index minus catalog index.
    pub index_shift: i64,
    pub note: &'static str,
}

pub const MANIFEST: &[ManifestEntry] = &[
    ManifestEntry { a_number: "A051288", entry: "balanced-sz", layout: Layout::Triangle { var: "u" }, first_n: 0, index_shift: 0, note: "rows n >= 0, k = 0..floor(n/2), read by rows" },
    ManifestEntry { a_number: "A047974", entry: "matchings-sym", layout: Layout::Sequence, first_n: 0, index_shift: 0, note: "offset 0, n = arcs" },
    ManifestEntry { a_number: "A053871", entry: "matchings-no-centered", layout: Layout::Sequence, first_n: 0, index_shift: 0, note: "offset 0, n = arcs" },
    ManifestEntry { a_number: "A000085", entry: "perms-involutions", layout: Layout::Sequence, first_n: 0, index_shift: 0, note: "offset 0" },
    ManifestEntry { a_number: "A038205", entry: "perms-fully-asym", layout: Layout::Sequence, first_n: 0, index_shift: 0, note: "offset 0" },
    ManifestEntry { a_number: "A001523", entry: "unimodal-t1-sum", layout: Layout::Sequence, first_n: 1, index_shift: 0, note: "offset 0 with a(0) = 1 for the empty composition; the sum form has constant term 0, so n = 0 is not compared" },
    ManifestEntry { a_number: "A096441", entry: "unimodal-t0-sum", layout: Layout::Sequence, first_n: 1, index_shift: 0, note: "offset 0 with a(0) = 1 for the empty composition; the sum form has constant term 0, so n = 0 is not compared" },
];

pub fn manifest_entry(a_number: &str) -> Option<&'static ManifestEntry> {
    MANIFEST.iter().find(|m| m.a_number == a_number)
}

fn integral(v: &Rational) -> Result<BigInt> {
    if v.denom().is_one() {
        Ok(v.numer().clone())
    } else {
        Err(OeisError::Catalog(format!("non-integral count {v}")))
    }
}

/// Catalog terms in the layout of `m`, starting at catalog index 0, for
/// sizes up to `n_max`.
pub fn computed_terms(m: &ManifestEntry, n_max: u32) -> Result<Vec<BigInt>> {
    let cat = |e: catalog::CatalogError| OeisError::Catalog(e.to_string());
    let (spec, series) = catalog::build(m.entry, &GfParams::default(), n_max).map_err(cat)?;
    match m.layout {
        Layout::Sequence => catalog::counts(spec.kind, &series)
            .map_err(cat)?
            .iter()
            .map(integral)
            .collect(),
        Layout::Triangle { var } => {
            let mut out = Vec::new();
            let size = series.context().size_name().to_string();
            for n in 0..=n_max {
                for k in 0..=n / 2 {
                    let c = series
                        .coefficient_named(&[(var, k), (size.as_str(), n)])
                        .map_err(|e| OeisError::Catalog(e.to_string()))?;
                    out.push(integral(&c)?);
                }
            }
            Ok(out)
        }
    }
}

/// Largest size whose terms fit inside the reference.
fn sizes_for(m: &ManifestEntry, r: &SequenceRef) -> u32 {
    let last = r.offset + r.terms.len() as i64 - 1 - m.index_shift;
    match m.layout {
        Layout::Sequence => last.max(0) as u32,
        Layout::Triangle { .. } => {
            let (mut n, mut used) = (0i64, 0i64);
            while used + n / 2 <= last {
                used += n / 2 + 1;
                n += 1;
            }
            (n - 1).max(0) as u32
        }
    }
}

/// Compares the catalog entry (the manifest's unless `against` overrides
/// it) with the b-file for `a_number`.
pub fn check(
    client: &Client,
    a_number: &str,
    against: Option<&str>,
    mode: Mode,
) -> Result<VerificationReport> {
    validate_a_number(a_number)?;
    let base = manifest_entry(a_number).copied();
    let m = match (base, against) {
        (Some(b), None) => b,
        (Some(b), Some(e)) if b.entry == e => b,
        (_, Some(e)) => ManifestEntry {
            a_number: "",
            entry: catalog_entry_name(e)?,
            layout: Layout::Sequence,
            first_n: 0,
            index_shift: 0,
            note: "not in manifest",
        },
        (None, None) => {
            return Err(OeisError::NotAvailable {
                a_number: a_number.to_string(),
                message: "not in the manifest; pass a catalog entry to compare against".into(),
            })
        }
    };
    let r = client.fetch_bfile(a_number, mode)?;
    let n_max = sizes_for(&m, &r).min(60);
    let computed = computed_terms(&m, n_max)?;
    let tail = computed.get(m.first_n..).unwrap_or(&[]);
    let mut rep = compare_sequence(tail, &r, m.first_n as i64 + m.index_shift);
    rep.parameters.insert("entry".into(), m.entry.into());
    rep.parameters.insert("note".into(), m.note.into());
    Ok(rep)
}

fn catalog_entry_name(e: &str) -> Result<&'static str> {
    catalog::ENTRIES
        .iter()
        .map(|(n, _)| *n)
        .find(|n| *n == e)
        .ok_or_else(|| OeisError::Catalog(format!("unknown catalog entry `{e}`")))
}

/// Every manifest sequence, in manifest order.
pub fn check_all(client: &Client, mode: Mode) -> Vec<VerificationReport> {
    MANIFEST
        .iter()
        .map(|m| match check(client, m.a_number, None, mode) {
            Ok(r) => r,
            Err(e) => {
                let mut rec = Recorder::new(&format!("oeis/{}", m.a_number));
                rec.mismatch("fetch", "b-file", e);
                rec.finish()
            }
        })
        .collect()
}

/// True when the report passed with at least `n` compared terms.
pub fn passed_with_overlap(r: &VerificationReport, n: usize) -> bool {
    r.status == Status::Pass
        && r.parameters
            .get("overlap")
            .and_then(|v| v.as_u64())
            .is_some_and(|k| k as usize >= n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_numbers() {
        assert!(validate_a_number("A000085").is_ok());
        for bad in ["A00008", "a000085", "A0000850", "B000085", "A00008x"] {
            assert_eq!(
                validate_a_number(bad),
                Err(OeisError::InvalidANumber(bad.into()))
            );
        }
    }

    #[test]
    fn parse_lines() {
        let (o, t) =
            parse_bfile("A000001", "# c\n\n1 1\n2 -3\n3 40000000000000000000000\n").unwrap();
        assert_eq!(o, 1);
        assert_eq!(t[1], BigInt::from(-3));
        let e = parse_bfile("A000001", "0 1\n1 x\n").unwrap_err();
        assert!(matches!(e, OeisError::Parse { line: 2, .. }), "{e}");
        let e = parse_bfile("A000001", "0 1\n2 1\n").unwrap_err();
        assert!(matches!(e, OeisError::Parse { line: 2, .. }), "{e}");
        assert!(parse_bfile("A000001", "# only\n").is_err());
    }

    #[test]
    fn triangle_sizes() {
        let m = manifest_entry("A051288").unwrap();
        let r = SequenceRef {
            a_number: "A051288".into(),
            offset: 0,
            terms: vec![BigInt::one(); 9],
            source: Source::Vendored,
        };
        // rows 0..=4 hold 1+1+2+2+3 = 9 terms
        assert_eq!(sizes_for(m, &r), 4);
    }
}

//! Oracle harness: closed forms against enumeration, bijections against
//! their laws. Failures are collected into reports, never thrown.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bijections;
use crate::catalog::{
    self, BalancedCount, BalancedVariant, GfKind, GfParams, MatchingVariant, TreeVariant,
    UnimodalVariant,
};
use crate::combinat::{BinaryWord, Caps, CombObject, Family, PartSet, Statistic};
use crate::series::{factorial, rat, ratio, rmul, Context, PowerSeries, Rational};

pub const SUITE_VERSION: &str = "1";

/// Mismatches kept per report; the total is always recorded.
pub const MAX_MISMATCHES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    #[serde(rename = "where")]
    pub at: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    /// Checks of printed constants that are expected to fail.
    pub erratum: bool,
    pub mismatch_count: usize,
    pub mismatches: Vec<Mismatch>,
    /// Wall time; kept out of the serialized payload so reports compare
    /// byte for byte.
    #[serde(skip)]
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn skipped(check_id: &str, reason: &str) -> Self {
        let mut parameters = BTreeMap::new();
        parameters.insert("reason".to_string(), json!(reason));
        Self {
            check_id: check_id.to_string(),
            parameters,
            status: Status::Skipped,
            erratum: false,
            mismatch_count: 0,
            mismatches: Vec::new(),
            runtime_ms: 0,
        }
    }

    /// `expected-fail` for a failing erratum check, else the status.
    pub fn label(&self) -> &'static str {
        match (self.status, self.erratum) {
            (Status::Pass, _) => "pass",
            (Status::Fail, true) => "expected-fail",
            (Status::Fail, false) => "fail",
            (Status::Skipped, _) => "skipped",
        }
    }
}

/// Collects mismatches for one check.
pub struct Recorder {
    id: String,
    parameters: BTreeMap<String, Value>,
    erratum: bool,
    mismatches: Vec<Mismatch>,
    count: usize,
    start: Instant,
}

impl Recorder {
    pub fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            parameters: BTreeMap::new(),
            erratum: false,
            mismatches: Vec::new(),
            count: 0,
            start: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), json!(v));
        self
    }

    pub fn erratum(&mut self) -> &mut Self {
        self.erratum = true;
        self
    }

    pub fn mismatch(&mut self, at: impl Display, expected: impl Display, actual: impl Display) {
        self.count += 1;
        if self.mismatches.len() < MAX_MISMATCHES {
            self.mismatches.push(Mismatch {
                at: at.to_string(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }

    pub fn expect_eq<T: PartialEq + Display>(
        &mut self,
        at: impl Display,
        expected: T,
        actual: T,
    ) -> bool {
        if expected != actual {
            self.mismatch(at, expected, actual);
            false
        } else {
            true
        }
    }

    /// Records a library error as a mismatch and returns `None`.
    pub fn ok<T, E: Display>(&mut self, at: impl Display, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.mismatch(at, "no error", format!("error: {e}"));
                None
            }
        }
    }

    pub fn finish(self) -> VerificationReport {
        VerificationReport {
            check_id: self.id,
            parameters: self.parameters,
            status: if self.count == 0 {
                Status::Pass
            } else {
                Status::Fail
            },
            erratum: self.erratum,
            mismatch_count: self.count,
            mismatches: self.mismatches,
            runtime_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}

fn show(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ----------------------------------------------------------- gf vs enumeration

/// Statistic slots: the exponents of the listed series variables are summed
/// into one statistic. Unlisted auxiliary variables are read at 1.
pub type Slot = (&'static [&'static str], Statistic);

#[derive(Debug, Clone)]
pub struct GfEnumCase {
    pub id: &'static str,
    pub entry: &'static str,
    pub m: Option<u32>,
    pub parts: Option<&'static str>,
    pub family: &'static str,
    pub slots: &'static [Slot],
    pub n_min: usize,
    pub n_max: usize,
}

use Statistic as S;

pub const GF_ENUM_CASES: &[GfEnumCase] = &[
    GfEnumCase {
        id: "gf-enum/compositions-da",
        entry: "comp-tz",
        m: None,
        parts: None,
        family: "compositions",
        slots: &[(&["t"], S::Da)],
        n_min: 0,
        n_max: 12,
    },
    GfEnumCase {
        id: "gf-enum/compositions-da-parts",
        entry: "comp",
        m: None,
        parts: None,
        family: "compositions",
        slots: &[(&["t"], S::Da), (&["x"], S::Parts)],
        n_min: 0,
        n_max: 12,
    },
    GfEnumCase {
        id: "gf-enum/restricted-1-2",
        entry: "comp-restricted",
        m: None,
        parts: Some("1,2"),
        family: "compositions-with-parts",
        slots: &[(&["t"], S::Da), (&["x"], S::Parts)],
        n_min: 0,
        n_max: 12,
    },
    GfEnumCase {
        id: "gf-enum/restricted-odd",
        entry: "comp-restricted",
        m: None,
        parts: Some("odd"),
        family: "compositions-with-parts",
        slots: &[(&["t"], S::Da), (&["x"], S::Parts)],
        n_min: 0,
        n_max: 12,
    },
    GfEnumCase {
        id: "gf-enum/words-m2",
        entry: "words",
        m: Some(2),
        parts: None,
        family: "words",
        slots: &[(&["t"], S::Da)],
        n_min: 0,
        n_max: 10,
    },
    GfEnumCase {
        id: "gf-enum/words-m3",
        entry: "words",
        m: Some(3),
        parts: None,
        family: "words",
        slots: &[(&["t"], S::Da)],
        n_min: 0,
        n_max: 10,
    },
    GfEnumCase {
        id: "gf-enum/balanced-da",
        entry: "balanced",
        m: None,
        parts: None,
        family: "balanced",
        slots: &[(&["t"], S::Da)],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/balanced-pairs",
        entry: "balanced-multivar",
        m: None,
        parts: None,
        family: "balanced",
        slots: &[
            (&["x00"], S::O00),
            (&["x11"], S::O11),
            (&["x10"], S::O10),
            (&["x01"], S::O01),
        ],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/balanced-da-sz",
        entry: "balanced-multivar",
        m: None,
        parts: None,
        family: "balanced",
        slots: &[(&["x10", "x01"], S::Da), (&["x00"], S::Sz)],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/balanced-sz",
        entry: "balanced-sz",
        m: None,
        parts: None,
        family: "balanced",
        slots: &[(&["u"], S::Sz)],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/balanced-o00",
        entry: "balanced-sz",
        m: None,
        parts: None,
        family: "balanced",
        slots: &[(&["u"], S::O00)],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/balanced-001",
        entry: "balanced-sz",
        m: None,
        parts: None,
        family: "balanced",
        slots: &[(&["u"], S::Cnt001)],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/balanced-001-01",
        entry: "balanced-001-01",
        m: None,
        parts: None,
        family: "balanced",
        slots: &[(&["u"], S::Cnt001), (&["v"], S::Cnt01)],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/trees-da",
        entry: "trees",
        m: None,
        parts: None,
        family: "trees",
        slots: &[(&["t"], S::Da)],
        n_min: 0,
        n_max: 12,
    },
    GfEnumCase {
        id: "gf-enum/trees-ds",
        entry: "trees-ds",
        m: None,
        parts: None,
        family: "trees",
        slots: &[(&["s"], S::Ds)],
        n_min: 1,
        n_max: 12,
    },
    GfEnumCase {
        id: "gf-enum/matchings",
        entry: "matchings",
        m: None,
        parts: None,
        family: "matchings",
        slots: &[(&["r"], S::C), (&["s"], S::P), (&["t"], S::Da)],
        n_min: 0,
        n_max: 6,
    },
    GfEnumCase {
        id: "gf-enum/permutations",
        entry: "perms",
        m: None,
        parts: None,
        family: "permutations",
        slots: &[(&["r"], S::C1), (&["s"], S::C2), (&["t"], S::Da)],
        n_min: 0,
        n_max: 8,
    },
    GfEnumCase {
        id: "gf-enum/unimodal",
        entry: "unimodal-t1-sum",
        m: None,
        parts: None,
        family: "unimodal",
        slots: &[],
        n_min: 1,
        n_max: 18,
    },
    GfEnumCase {
        id: "gf-enum/unimodal-palindromic",
        entry: "unimodal-t0-sum",
        m: None,
        parts: None,
        family: "palindromic-unimodal",
        slots: &[],
        n_min: 1,
        n_max: 18,
    },
];

/// For all `n_min <= n <= n_max`, the coefficient table of the catalog
/// entry equals the enumerated histogram of the slot statistics.
pub fn verify_gf_vs_enum(case: &GfEnumCase, n_max: usize) -> VerificationReport {
    let mut rec = Recorder::new(case.id);
    rec.param("entry", case.entry)
        .param("family", case.family)
        .param("n_min", case.n_min)
        .param("n_max", n_max)
        .param(
            "statistics",
            case.slots.iter().map(|(_, s)| s.name()).collect::<Vec<_>>(),
        );
    if let Some(m) = case.m {
        rec.param("m", m);
    }
    if let Some(p) = case.parts {
        rec.param("parts", p);
    }
    let parts: Option<PartSet> = match case.parts.map(str::parse) {
        None => None,
        Some(r) => match rec.ok("parts", r) {
            Some(p) => Some(p),
            None => return rec.finish(),
        },
    };
    let caps = Caps::default();
    let params = GfParams {
        m: case.m,
        parts: parts.clone(),
        caps: caps.clone(),
    };
    let Some((spec, series)) = rec.ok("catalog", catalog::build(case.entry, &params, n_max as u32))
    else {
        return rec.finish();
    };
    let ctx = series.context().clone();
    let mut slot_index = Vec::new();
    for (vars, _) in case.slots {
        let mut idx = Vec::new();
        for v in *vars {
            match rec.ok(format!("variable {v}"), ctx.aux_index(v)) {
                Some(i) => idx.push(i),
                None => return rec.finish(),
            }
        }
        slot_index.push(idx);
    }
    let stats: Vec<Statistic> = case.slots.iter().map(|(_, s)| *s).collect();
    for n in case.n_min..=n_max {
        let Some(family) = rec.ok(
            format!("n={n}"),
            Family::parse(case.family, n, case.m, parts.clone()),
        ) else {
            continue;
        };
        let Some(hist) = rec.ok(
            format!("n={n}"),
            crate::combinat::histogram(&family, &stats, &caps),
        ) else {
            continue;
        };
        let Some(slice) = rec.ok(format!("n={n}"), series.slice(n as u32)) else {
            continue;
        };
        let scale = match spec.kind {
            GfKind::Ogf => Rational::one(),
            GfKind::Egf => Rational::from_integer(factorial(n as u32)),
        };
        let mut table: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (aux, c) in slice.iter() {
            let key: Vec<u32> = slot_index
                .iter()
                .map(|idx| idx.iter().map(|&i| aux[i]).sum())
                .collect();
            let e = table.entry(key).or_insert_with(Rational::zero);
            *e += rmul(c, &scale);
        }
        table.retain(|_, v| !v.is_zero());
        let keys: BTreeSet<&Vec<u32>> = table.keys().chain(hist.counts.keys()).collect();
        for key in keys {
            let gf = table.get(key).cloned().unwrap_or_else(Rational::zero);
            let en = Rational::from_integer(BigInt::from(hist.get(key)));
            if gf != en {
                rec.mismatch(
                    format!("n={n} {}={key:?}", stat_names(&stats)),
                    show(&en),
                    show(&gf),
                );
            }
        }
    }
    rec.finish()
}

fn stat_names(stats: &[Statistic]) -> String {
    let v: Vec<&str> = stats.iter().map(|s| s.name()).collect();
    format!("({})", v.join(","))
}

// ---------------------------------------------------------------- bijections

pub const BIJECTIONS: &[(&str, usize)] = &[
    ("phi", 7),
    ("zigzag", 8),
    ("unimodal-partition", 20),
    ("tree-reflect", 10),
];

fn balanced_words(
    n: usize,
    caps: &Caps,
) -> Result<Vec<BinaryWord>, crate::combinat::CombinatError> {
    Ok(Family::BalancedWords { n }
        .enumerate(caps)?
        .filter_map(|o| match o {
            CombObject::Binary(w) => Some(w),
            _ => None,
        })
        .collect())
}

pub fn verify_bijection(id: &str, n_max: usize) -> VerificationReport {
    let mut rec = Recorder::new(&format!("bijection/{id}"));
    rec.param("n_max", n_max);
    let caps = Caps::default();
    match id {
        "phi" => {
            for n in 0..=n_max {
                let Some(words) = rec.ok(format!("n={n}"), balanced_words(n, &caps)) else {
                    continue;
                };
                let mut images = BTreeSet::new();
                for w in &words {
                    let Some(o) = rec.ok(format!("omega({w})"), bijections::word_to_omega(w))
                    else {
                        continue;
                    };
                    if let Some(back) =
                        rec.ok(format!("omega^-1({w})"), bijections::omega_to_word(&o))
                    {
                        rec.expect_eq(
                            format!("omega round trip {w}"),
                            w.to_string(),
                            back.to_string(),
                        );
                    }
                    let Some(img) = rec.ok(format!("phi({w})"), bijections::phi(w)) else {
                        continue;
                    };
                    rec.expect_eq(
                        format!("phi({w}) balanced"),
                        true,
                        img.is_balanced() && img.len() == w.len(),
                    );
                    if let Some(back) =
                        rec.ok(format!("phi^-1({img})"), bijections::phi_inverse(&img))
                    {
                        rec.expect_eq(
                            format!("phi round trip {w}"),
                            w.to_string(),
                            back.to_string(),
                        );
                    }
                    if let (Some(a), Some(b)) = (rec.ok(w, w.stats()), rec.ok(&img, img.stats())) {
                        rec.expect_eq(format!("o00({w}) = #001({img})"), a.o00, b.cnt001);
                        rec.expect_eq(format!("o0({w}) = #01({img})"), a.o0, b.cnt01);
                    }
                    images.insert(img);
                }
                rec.expect_eq(format!("n={n} distinct images"), words.len(), images.len());
            }
        }
        "zigzag" => {
            for n in 0..=n_max {
                let Some(words) = rec.ok(format!("n={n}"), balanced_words(n, &caps)) else {
                    continue;
                };
                let mut images = BTreeSet::new();
                for w in &words {
                    let Some(z) = rec.ok(format!("Z({w})"), bijections::zigzag(w)) else {
                        continue;
                    };
                    if let Some(back) = rec.ok(format!("Z^-1({z})"), bijections::zigzag_inverse(&z))
                    {
                        rec.expect_eq(format!("Z round trip {w}"), w.to_string(), back.to_string());
                    }
                    if let (Some(a), Some(b)) = (rec.ok(w, w.stats()), rec.ok(&z, z.stats())) {
                        rec.expect_eq(format!("da({w}) = o10+o01({z})"), a.da, b.o10 + b.o01);
                        rec.expect_eq(format!("sz({w}) = o00({z})"), a.sz, b.o00);
                    }
                    images.insert(z);
                }
                rec.expect_eq(format!("n={n} distinct images"), words.len(), images.len());
            }
        }
        "unimodal-partition" => {
            for n in 1..=n_max {
                let Some(objs) = rec.ok(
                    format!("n={n}"),
                    Family::PalindromicUnimodal { n }.enumerate(&caps),
                ) else {
                    continue;
                };
                let mut images = BTreeSet::new();
                let mut count = 0usize;
                for o in objs {
                    let CombObject::Composition(a) = o else {
                        continue;
                    };
                    count += 1;
                    let Some(p) = rec.ok(format!("({a})"), bijections::unimodal_partition(&a))
                    else {
                        continue;
                    };
                    rec.expect_eq(format!("|{p}| = |{a}|"), a.sum(), p.sum());
                    rec.expect_eq(format!("({p}) single parity"), true, p.is_single_parity());
                    if let Some(back) = rec.ok(
                        format!("inverse({p})"),
                        bijections::unimodal_partition_inverse(&p),
                    ) {
                        rec.expect_eq(format!("round trip ({a})"), a.to_string(), back.to_string());
                    }
                    images.insert(p.to_string());
                }
                rec.expect_eq(format!("n={n} distinct images"), count, images.len());
                if let Some(parts) = rec.ok(
                    format!("n={n}"),
                    Family::SingleParityPartitions { n }.enumerate(&caps),
                ) {
                    let all: BTreeSet<String> = parts
                        .filter_map(|o| match o {
                            CombObject::Partition(p) => Some(p.to_string()),
                            _ => None,
                        })
                        .collect();
                    rec.expect_eq(
                        format!("n={n} image is every single-parity partition"),
                        true,
                        all == images,
                    );
                }
            }
        }
        "tree-reflect" => {
            for n in 0..=n_max {
                let Some(objs) =
                    rec.ok(format!("n={n}"), Family::BinaryTrees { n }.enumerate(&caps))
                else {
                    continue;
                };
                for o in objs {
                    let CombObject::Tree(t) = o else { continue };
                    let r = bijections::reflect(&t);
                    rec.expect_eq(
                        format!("reflect involution n={n}"),
                        true,
                        bijections::reflect(&r) == t,
                    );
                    let (sa, sb) = (t.stats(), r.stats());
                    rec.expect_eq(format!("da invariant n={n}"), sa.da, sb.da);
                    rec.expect_eq(
                        format!("unique nodes = 2 da n={n}"),
                        2 * sa.da,
                        bijections::unique_nodes(&t, &r),
                    );
                }
            }
        }
        other => {
            return VerificationReport::skipped(&format!("bijection/{other}"), "unknown bijection");
        }
    }
    rec.finish()
}

// ---------------------------------------------------------------- identities

pub const IDENTITIES: &[(&str, usize)] = &[
    ("dasz", 8),
    ("cpda", 6),
    ("tree", 12),
    ("equidistribution", 8),
    ("unimodal-sum-sieve", 40),
    ("palindromic-sum-partition", 40),
    ("sz-series", 40),
    ("matchings-reconstruction", 40),
    ("trees-catalan", 40),
];

pub fn verify_identities(id: &str, n_max: usize) -> VerificationReport {
    let mut rec = Recorder::new(&format!("identity/{id}"));
    rec.param("n_max", n_max);
    let caps = Caps::default();
    let order = n_max as u32;
    match id {
        "dasz" => {
            for n in 0..=n_max {
                if let Some(words) = rec.ok(format!("n={n}"), balanced_words(n, &caps)) {
                    for w in words {
                        if let Some(s) = rec.ok(&w, w.stats()) {
                            rec.expect_eq(format!("da+2sz at {w}"), n as u32, s.da + 2 * s.sz);
                        }
                    }
                }
            }
        }
        "cpda" => {
            for n in 0..=n_max {
                if let Some(objs) =
                    rec.ok(format!("n={n}"), Family::Matchings { n }.enumerate(&caps))
                {
                    for o in objs {
                        if let CombObject::Matching(m) = o {
                            let s = m.stats();
                            rec.expect_eq(
                                format!("c+2p+da at {m}"),
                                n as u32,
                                s.c + 2 * s.p + s.da,
                            );
                        }
                    }
                }
            }
        }
        "tree" => {
            for n in 1..=n_max {
                if let Some(objs) =
                    rec.ok(format!("n={n}"), Family::BinaryTrees { n }.enumerate(&caps))
                {
                    for o in objs {
                        if let CombObject::Tree(t) = o {
                            let s = t.stats();
                            rec.expect_eq(format!("2ds+da+1 n={n}"), n as u32, 2 * s.ds + s.da + 1);
                        }
                    }
                }
            }
        }
        "equidistribution" => {
            for n in 0..=n_max {
                let h = |st| crate::combinat::histogram(&Family::BalancedWords { n }, &[st], &caps);
                if let (Some(sz), Some(o00), Some(c001)) = (
                    rec.ok(format!("n={n}"), h(S::Sz)),
                    rec.ok(format!("n={n}"), h(S::O00)),
                    rec.ok(format!("n={n}"), h(S::Cnt001)),
                ) {
                    rec.expect_eq(
                        format!("n={n} sz vs o00"),
                        format!("{:?}", sz.counts),
                        format!("{:?}", o00.counts),
                    );
                    rec.expect_eq(
                        format!("n={n} sz vs #001"),
                        format!("{:?}", sz.counts),
                        format!("{:?}", c001.counts),
                    );
                }
            }
        }
        "unimodal-sum-sieve" | "palindromic-sum-partition" => {
            let (a, b) = if id == "unimodal-sum-sieve" {
                (UnimodalVariant::U1Sum, UnimodalVariant::U1Sieve)
            } else {
                (UnimodalVariant::U0Sum, UnimodalVariant::U0Partition)
            };
            if let (Some(x), Some(y)) = (
                rec.ok("first form", catalog::unimodal_gf(a, order, &caps)),
                rec.ok("second form", catalog::unimodal_gf(b, order, &caps)),
            ) {
                compare_series(&mut rec, &x, &y);
            }
        }
        "sz-series" => sz_series(&mut rec, order),
        "matchings-reconstruction" => matchings_reconstruction(&mut rec, order),
        "trees-catalan" => {
            let b = rec.ok(
                "B",
                catalog::trees_gf(TreeVariant::B, order)
                    .and_then(|b| Ok(b.specialize(&[("t", rat(1))])?)),
            );
            let c = rec.ok("Cat", catalog::cat_gf(order));
            if let (Some(b), Some(c)) = (b, c) {
                compare_tables(&mut rec, &b.size_coefficients(), &c.size_coefficients());
            }
        }
        other => {
            return VerificationReport::skipped(&format!("identity/{other}"), "unknown identity")
        }
    }
    rec.finish()
}

fn compare_series(rec: &mut Recorder, a: &PowerSeries, b: &PowerSeries) {
    let ta: BTreeMap<Vec<u32>, &Rational> = a.terms().collect();
    let tb: BTreeMap<Vec<u32>, &Rational> = b.terms().collect();
    let zero = Rational::zero();
    let keys: BTreeSet<&Vec<u32>> = ta.keys().chain(tb.keys()).collect();
    for k in keys {
        let (x, y) = (
            ta.get(k).copied().unwrap_or(&zero),
            tb.get(k).copied().unwrap_or(&zero),
        );
        if x != y {
            rec.mismatch(format!("{:?}", k), show(x), show(y));
        }
    }
}

fn compare_tables(rec: &mut Recorder, a: &[Rational], b: &[Rational]) {
    for (n, (x, y)) in a.iter().zip(b).enumerate() {
        if x != y {
            rec.mismatch(format!("n={n}"), show(x), show(y));
        }
    }
}

/// Table `(n, k) -> [var^k size^n]` with the other auxiliaries read at 1.
fn single_variable_table(
    s: &PowerSeries,
    var: &str,
) -> Result<BTreeMap<(u32, u32), Rational>, String> {
    let ctx = s.context();
    let i = ctx.aux_index(var).map_err(|e| e.to_string())?;
    let mut out: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for n in 0..=s.order() {
        for (aux, c) in s.slice(n).map_err(|e| e.to_string())?.iter() {
            *out.entry((n, aux[i])).or_insert_with(Rational::zero) += c;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

fn sz_series(rec: &mut Recorder, order: u32) {
    let build = |v| catalog::balanced_gf(v, order);
    let Some(sz) = rec.ok("sz", build(BalancedVariant::Sz)) else {
        return;
    };
    let Some(reference) = rec.ok("sz table", single_variable_table(&sz, "u")) else {
        return;
    };
    type Table = Result<BTreeMap<(u32, u32), Rational>, String>;
    let mut forms: Vec<(&str, Table)> = Vec::new();
    forms.push((
        "o00 via pair variables",
        build(BalancedVariant::Multivar)
            .map_err(|e| e.to_string())
            .and_then(|m| single_variable_table(&m, "x00")),
    ));
    forms.push((
        "#001 via joint series",
        build(BalancedVariant::Joint001_01)
            .map_err(|e| e.to_string())
            .and_then(|m| single_variable_table(&m, "u")),
    ));
    forms.push(("#001 via marked occurrences", marked_to_all(order)));
    for (label, t) in forms {
        let Some(t) = rec.ok(label, t) else { continue };
        let keys: BTreeSet<&(u32, u32)> = reference.keys().chain(t.keys()).collect();
        for k in keys {
            let zero = Rational::zero();
            let (x, y) = (reference.get(k).unwrap_or(&zero), t.get(k).unwrap_or(&zero));
            if x != y {
                rec.mismatch(format!("{label} [u^{} x^{}]", k.1, k.0), show(x), show(y));
            }
        }
    }
}

/// The marked-001 series with `v = u - 1`.
fn marked_to_all(order: u32) -> Result<BTreeMap<(u32, u32), Rational>, String> {
    let e = |e: crate::series::SeriesError| e.to_string();
    let marked =
        catalog::balanced_gf(BalancedVariant::Marked001, order).map_err(|e| e.to_string())?;
    let big = Context::new(&["u", "v", "x"], "x").map_err(e)?;
    let m = marked.reembed(&big).map_err(e)?;
    let u1 = PowerSeries::var(&big, order, "u")
        .map_err(e)?
        .sub(&PowerSeries::one(&big, order))
        .map_err(e)?;
    let all = m.substitute("v", &u1).map_err(e)?;
    single_variable_table(&all, "u")
}

/// `H(r,s,t,x) = H(r/t, s/t^2, 1, tx)` at sampled `t`.
fn matchings_reconstruction(rec: &mut Recorder, order: u32) {
    let Some(h) = rec.ok("H", catalog::matchings_gf(MatchingVariant::H, order)) else {
        return;
    };
    let Some(rs) = rec.ok(
        "H(r,s,1,x)",
        catalog::matchings_gf(MatchingVariant::Rs, order),
    ) else {
        return;
    };
    let ctx = rs.context().clone();
    let (ri, si) = (
        ctx.aux_index("r").unwrap_or(0),
        ctx.aux_index("s").unwrap_or(1),
    );
    for t in [ratio(1, 2), rat(2)] {
        let Some(direct) = rec.ok("specialize", h.specialize(&[("t", t.clone())])) else {
            continue;
        };
        let Some(direct) = rec.ok("reembed", direct.reembed(&ctx)) else {
            continue;
        };
        let mut terms = Vec::new();
        for n in 0..=order {
            let Some(slice) = rec.ok("slice", rs.slice(n)) else {
                continue;
            };
            for (aux, c) in slice.iter() {
                let shift = n as i64 - aux[ri] as i64 - 2 * aux[si] as i64;
                let w = num_traits::pow::pow(t.clone(), shift.unsigned_abs() as usize);
                let w = if shift < 0 { w.recip() } else { w };
                let mut full = vec![0u32; ctx.len()];
                full[ctx.index("r").unwrap_or(0)] = aux[ri];
                full[ctx.index("s").unwrap_or(1)] = aux[si];
                full[ctx.size_index()] = n;
                terms.push((full, rmul(c, &w)));
            }
        }
        let Some(rebuilt) = rec.ok("rebuild", PowerSeries::from_terms(&ctx, order, terms)) else {
            continue;
        };
        compare_series(rec, &direct, &rebuilt);
    }
}

// -------------------------------------------------------------- closed forms

pub fn verify_closed_forms() -> VerificationReport {
    let mut rec = Recorder::new("closed-forms");
    let caps = Caps::default();
    let enum_n = 8usize;
    let gf_n = 10u32;
    rec.param("enumeration_n_max", enum_n)
        .param("series_n_max", gf_n);

    // balanced words by da
    if let Some(g) = rec.ok("G", catalog::balanced_gf(BalancedVariant::G, gf_n)) {
        for n in 0..=gf_n {
            let hist = if (n as usize) <= enum_n {
                rec.ok(
                    format!("n={n}"),
                    crate::combinat::histogram(
                        &Family::BalancedWords { n: n as usize },
                        &[S::Da],
                        &caps,
                    ),
                )
            } else {
                None
            };
            for k in 0..=n {
                let closed = balanced_counts_rat(BalancedCount::Da { n, k });
                if let Some(c) = rec.ok("coefficient", g.coefficient_named(&[("t", k), ("x", n)])) {
                    rec.expect_eq(format!("da n={n} k={k} series"), show(&closed), show(&c));
                }
                if let Some(h) = &hist {
                    rec.expect_eq(
                        format!("da n={n} k={k} enumeration"),
                        show(&closed),
                        h.get(&[k]).to_string(),
                    );
                }
            }
        }
    }
    // occurrences of 001 and of 01
    if let Some(j) = rec.ok(
        "joint",
        catalog::balanced_gf(BalancedVariant::Joint001_01, gf_n),
    ) {
        for n in 0..=gf_n {
            let hist = if (n as usize) <= enum_n {
                rec.ok(
                    format!("n={n}"),
                    crate::combinat::histogram(
                        &Family::BalancedWords { n: n as usize },
                        &[S::Cnt001, S::Cnt01],
                        &caps,
                    ),
                )
            } else {
                None
            };
            for k in 0..=n {
                let single = balanced_counts_rat(BalancedCount::Occ001 { n, k });
                let mut marginal = Rational::zero();
                for l in 0..=n {
                    let multinomial = balanced_counts_rat(BalancedCount::Occ001And01 { n, k, l });
                    let product = if l >= k && 2 * k <= n && l - k <= n - 2 * k {
                        let b = |a: u32, c: u32| binomial(BigInt::from(a), BigInt::from(c));
                        Rational::from_integer(b(n, 2 * k) * b(2 * k, k) * b(n - 2 * k, l - k))
                    } else {
                        Rational::zero()
                    };
                    rec.expect_eq(
                        format!("001/01 n={n} k={k} l={l} product form"),
                        show(&multinomial),
                        show(&product),
                    );
                    if let Some(c) = rec.ok(
                        "coefficient",
                        j.coefficient_named(&[("u", k), ("v", l), ("x", n)]),
                    ) {
                        rec.expect_eq(
                            format!("001/01 n={n} k={k} l={l} series"),
                            show(&multinomial),
                            show(&c),
                        );
                    }
                    if let Some(h) = &hist {
                        rec.expect_eq(
                            format!("001/01 n={n} k={k} l={l} enumeration"),
                            show(&multinomial),
                            h.get(&[k, l]).to_string(),
                        );
                    }
                    marginal += multinomial;
                }
                rec.expect_eq(
                    format!("001 n={n} k={k} marginal"),
                    show(&single),
                    show(&marginal),
                );
                if let Some(h) = &hist {
                    rec.expect_eq(
                        format!("001 n={n} k={k} enumeration"),
                        show(&single),
                        h.marginal(0).get(&k).copied().unwrap_or(0).to_string(),
                    );
                }
            }
        }
    }
    // m-ary words
    for m in 1..=4u32 {
        let Some(w) = rec.ok(format!("W_{m}"), catalog::words_gf(m, gf_n)) else {
            continue;
        };
        for n in 0..=gf_n {
            let hist = if m <= 3 {
                rec.ok(
                    format!("m={m} n={n}"),
                    crate::combinat::histogram(
                        &Family::Words {
                            m,
                            length: n as usize,
                        },
                        &[S::Da],
                        &caps,
                    ),
                )
            } else {
                None
            };
            for k in 0..=n / 2 {
                let closed = Rational::from_integer(catalog::words_count(m, n, k as i64));
                if let Some(c) = rec.ok("coefficient", w.coefficient_named(&[("t", k), ("x", n)])) {
                    rec.expect_eq(
                        format!("words m={m} n={n} k={k} series"),
                        show(&closed),
                        show(&c),
                    );
                }
                if let Some(h) = &hist {
                    rec.expect_eq(
                        format!("words m={m} n={n} k={k} enumeration"),
                        show(&closed),
                        h.get(&[k]).to_string(),
                    );
                }
            }
        }
    }
    rec.finish()
}

fn balanced_counts_rat(kind: BalancedCount) -> Rational {
    Rational::from_integer(catalog::balanced_counts(kind))
}

// ----------------------------------------------------------- printed constants

/// A printed closed form together with the range it is claimed for.
#[derive(Debug, Clone, Copy)]
pub struct PrintedForm {
    pub id: &'static str,
    /// Which derivative in `t` the form describes (1 or 2).
    pub derivative: u32,
    pub claimed_from: u32,
    pub erratum: bool,
    pub formula: fn(u32) -> Rational,
    pub display: &'static str,
}

fn pm(n: u32) -> Rational {
    if n.is_multiple_of(2) {
        rat(1)
    } else {
        rat(-1)
    }
}

fn pow2(n: u32) -> Rational {
    Rational::from_integer(BigInt::one() << n)
}

fn kt_19(n: u32) -> Rational {
    (ratio(n as i64, 12) - ratio(1, 19)) * pow2(n) - ratio(4, 9) * pm(n)
}

fn kt_18(n: u32) -> Rational {
    (ratio(n as i64, 12) - ratio(1, 18)) * pow2(n) - ratio(4, 9) * pm(n)
}

fn ktt(n: u32) -> Rational {
    let n = n as i64;
    (ratio(n * n, 72) - ratio(17 * n, 216) + ratio(2, 27)) * pow2(n as u32)
        + ratio(16 * n - 56, 27) * pm(n as u32)
}

pub const PRINTED_FORMS: &[PrintedForm] = &[
    PrintedForm {
        id: "kt-printed",
        derivative: 1,
        claimed_from: 2,
        erratum: true,
        formula: kt_19,
        display: "(n/12 - 1/19) 2^n - (4/9)(-1)^n",
    },
    PrintedForm {
        id: "kt-corrected",
        derivative: 1,
        claimed_from: 2,
        erratum: false,
        formula: kt_18,
        display: "(n/12 - 1/18) 2^n - (4/9)(-1)^n",
    },
    PrintedForm {
        id: "ktt-printed",
        derivative: 2,
        claimed_from: 3,
        erratum: true,
        formula: ktt,
        display: "(n^2/72 - 17n/216 + 2/27) 2^n + ((16n-56)/27)(-1)^n",
    },
];

pub const CONSTANTS_N_MAX: u32 = 40;

/// Exact `[z^n] d^k/dt^k K(t,z) |_{t=1}` for `n <= n_max`.
pub fn composition_derivative_coefficients(k: u32, n_max: u32) -> Result<Vec<Rational>, String> {
    let mut s =
        catalog::compositions_gf(&catalog::CompVariant::Tz, n_max).map_err(|e| e.to_string())?;
    for _ in 0..k {
        s = s.derivative("t").map_err(|e| e.to_string())?;
    }
    let s = s.specialize(&[("t", rat(1))]).map_err(|e| e.to_string())?;
    Ok(s.size_coefficients())
}

/// Outcome of a printed form over `1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormVerdict {
    /// First `n >= claimed_from` where the form disagrees.
    pub first_failure: Option<u32>,
    /// Smallest `n0` such that the form agrees for all `n0 <= n <= n_max`.
    pub valid_from: Option<u32>,
}

pub fn printed_form_verdict(form: &PrintedForm, exact: &[Rational], n_max: u32) -> FormVerdict {
    let agree = |n: u32| (form.formula)(n) == exact[n as usize];
    let first_failure = (form.claimed_from..=n_max).find(|&n| !agree(n));
    let mut valid_from = None;
    for n in (1..=n_max).rev() {
        if agree(n) {
            valid_from = Some(n);
        } else {
            break;
        }
    }
    FormVerdict {
        first_failure,
        valid_from,
    }
}

pub fn verify_printed_form(form: &PrintedForm) -> VerificationReport {
    let mut rec = Recorder::new(&format!("constants/{}", form.id));
    if form.erratum {
        rec.erratum();
    }
    rec.param("formula", form.display)
        .param("derivative", form.derivative)
        .param("claimed_from", form.claimed_from)
        .param("n_max", CONSTANTS_N_MAX);
    let Some(exact) = rec.ok(
        "series",
        composition_derivative_coefficients(form.derivative, CONSTANTS_N_MAX),
    ) else {
        return rec.finish();
    };
    let verdict = printed_form_verdict(form, &exact, CONSTANTS_N_MAX);
    rec.param("first_failure", verdict.first_failure)
        .param("valid_from", verdict.valid_from);
    for n in form.claimed_from..=CONSTANTS_N_MAX {
        let f = (form.formula)(n);
        if f != exact[n as usize] {
            rec.mismatch(format!("n={n}"), show(&exact[n as usize]), show(&f));
        }
    }
    rec.finish()
}

/// All printed-constant checks, one report each.
pub fn verify_paper_constants() -> Vec<VerificationReport> {
    PRINTED_FORMS.iter().map(verify_printed_form).collect()
}

// --------------------------------------------------------------------- suite

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub expected_fail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite_version: String,
    pub checks: Vec<VerificationReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn from_checks(checks: Vec<VerificationReport>) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            match c.label() {
                "pass" => summary.pass += 1,
                "expected-fail" => summary.expected_fail += 1,
                "fail" => summary.fail += 1,
                _ => summary.skipped += 1,
            }
        }
        Self {
            suite_version: SUITE_VERSION.to_string(),
            checks,
            summary,
        }
    }

    /// True when every check outside the declared errata passed or was skipped.
    pub fn ok(&self) -> bool {
        self.summary.fail == 0
    }

    /// Deterministic JSON payload.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }

    /// Per-check wall times, for a footer outside the payload.
    pub fn runtimes(&self) -> BTreeMap<String, u64> {
        self.checks
            .iter()
            .map(|c| (c.check_id.clone(), c.runtime_ms))
            .collect()
    }
}

type CheckFn = Box<dyn Fn() -> VerificationReport + Send + Sync>;

/// Every check of the default suite, in report order.
pub fn registry() -> Vec<(String, CheckFn)> {
    let mut out: Vec<(String, CheckFn)> = Vec::new();
    for case in GF_ENUM_CASES {
        out.push((
            case.id.to_string(),
            Box::new(move || verify_gf_vs_enum(case, case.n_max)),
        ));
    }
    for &(id, n) in BIJECTIONS {
        out.push((
            format!("bijection/{id}"),
            Box::new(move || verify_bijection(id, n)),
        ));
    }
    for &(id, n) in IDENTITIES {
        out.push((
            format!("identity/{id}"),
            Box::new(move || verify_identities(id, n)),
        ));
    }
    out.push(("closed-forms".to_string(), Box::new(verify_closed_forms)));
    for form in PRINTED_FORMS {
        out.push((
            format!("constants/{}", form.id),
            Box::new(move || verify_printed_form(form)),
        ));
    }
    out
}

pub fn check_ids() -> Vec<String> {
    registry().into_iter().map(|(id, _)| id).collect()
}

/// Runs the selected checks (all when `select` is empty) in parallel;
/// a selector matches an id exactly or as a `group/` prefix.
pub fn run_suite(select: &[String]) -> Result<SuiteReport, String> {
    let reg = registry();
    let chosen: Vec<&(String, CheckFn)> = if select.is_empty() || select.iter().any(|s| s == "all")
    {
        reg.iter().collect()
    } else {
        for s in select {
            if !reg.iter().any(|(id, _)| matches(id, s)) {
                return Err(format!("unknown check `{s}`"));
            }
        }
        reg.iter()
            .filter(|(id, _)| select.iter().any(|s| matches(id, s)))
            .collect()
    };
    let checks: Vec<VerificationReport> = chosen.par_iter().map(|(_, f)| f()).collect();
    Ok(SuiteReport::from_checks(checks))
}

fn matches(id: &str, sel: &str) -> bool {
    id == sel
        || id
            .strip_prefix(sel)
            .is_some_and(|rest| rest.starts_with('/'))
        || (sel.ends_with('/') && id.starts_with(sel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_forms_against_series() {
        let kt = composition_derivative_coefficients(1, 40).unwrap();
        let ktt_exact = composition_derivative_coefficients(2, 40).unwrap();
        assert_eq!(kt[3], rat(2));
        let v = printed_form_verdict(&PRINTED_FORMS[0], &kt, 40);
        assert_eq!(v.first_failure, Some(2));
        assert_eq!(v.valid_from, None);
        let v = printed_form_verdict(&PRINTED_FORMS[1], &kt, 40);
        assert_eq!(v.first_failure, None);
        assert_eq!(v.valid_from, Some(2));
        let v = printed_form_verdict(&PRINTED_FORMS[2], &ktt_exact, 40);
        assert_eq!(ktt(2), rat(-1));
        assert_eq!(
            v,
            FormVerdict {
                first_failure: None,
                valid_from: Some(3)
            }
        );
    }

    #[test]
    fn small_cases_pass() {
        let r = verify_gf_vs_enum(&GF_ENUM_CASES[0], 6);
        assert_eq!(r.status, Status::Pass, "{:?}", r.mismatches);
        let r = verify_bijection("phi", 4);
        assert_eq!(r.status, Status::Pass, "{:?}", r.mismatches);
        let r = verify_identities("sz-series", 10);
        assert_eq!(r.status, Status::Pass, "{:?}", r.mismatches);
    }

    #[test]
    fn broken_claim_is_reported() {
        let form = PrintedForm {
            id: "zero",
            derivative: 1,
            claimed_from: 1,
            erratum: false,
            formula: |_| rat(0),
            display: "0",
        };
        let r = verify_printed_form(&form);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.mismatches[0].at, "n=3");
        assert_eq!(r.label(), "fail");
    }

    #[test]
    fn selectors() {
        assert!(matches("gf-enum/trees-da", "gf-enum"));
        assert!(matches("gf-enum/trees-da", "gf-enum/trees-da"));
        assert!(!matches("gf-enum/trees-da", "gf-enum/trees"));
        assert!(run_suite(&["nope".to_string()]).is_err());
    }
}

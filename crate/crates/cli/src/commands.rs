use std::io::Write;
use std::time::Instant;

use asymmetry::bijections as bij;
use asymmetry::catalog::{self, GfKind, GfParams};
use asymmetry::combinat::{
    histogram, BinaryTree, BinaryWord, Caps, CombObject, Composition, Family, PartSet, Partition,
    Statistic,
};
use asymmetry::moments::{convergence_report, LimitFamily};
use asymmetry::series::{factorial, Rational};
use asymmetry::verify::{self, Status, VerificationReport};
use asymmetry_oeis as oeis;
use serde_json::{json, Map, Value};

use crate::{
    render, BijArgs, Bijection, Cli, Command, Failure, FamilyArgs, Format, GfArgs, MomentsArgs,
    OeisCheckArgs, OeisCommand, OeisFetchArgs, OeisSource, Outcome, VerifyArgs,
};

type Out<'a> = &'a mut dyn Write;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn io(e: std::io::Error) -> Failure {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return Failure::Closed;
    }
    Failure::Environment(format!("cannot write output: {e}"))
}

fn csv_err(e: csv::Error) -> Failure {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => io(e),
        other => Failure::Environment(format!("cannot write output: {other:?}")),
    }
}

fn json_out(out: Out, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Environment(e.to_string()))?;
    writeln!(out, "{text}").map_err(io)
}

pub fn run(cli: &Cli, out: Out) -> Outcome {
    match &cli.command {
        Command::Gf(a) => gf(cli, a, out),
        Command::Enum(a) => enumerate(cli, a, out),
        Command::Hist(a) => hist(cli, a, out),
        Command::Bij(a) => bijection(cli, a, out),
        Command::Moments(a) => moments(cli, a, out),
        Command::Verify(a) => verify_suite(cli, a, out),
        Command::Oeis(OeisCommand::Check(a)) => oeis_check(cli, a, out),
        Command::Oeis(OeisCommand::Fetch(a)) => oeis_fetch(cli, a, out),
        Command::Oeis(OeisCommand::List) => oeis_list(cli, out),
    }
}

fn caps(cli: &Cli) -> Caps {
    cli.cap.map(Caps::uniform).unwrap_or_default()
}

fn part_set(text: &Option<String>) -> Result<Option<PartSet>, Failure> {
    text.as_deref()
        .map(|p| p.parse::<PartSet>().map_err(usage))
        .transpose()
}

// ------------------------------------------------------------------------ gf

fn gf(cli: &Cli, a: &GfArgs, out: Out) -> Outcome {
    if a.list {
        for (name, desc) in catalog::ENTRIES {
            writeln!(out, "{name:<24} {desc}").map_err(io)?;
        }
        return Ok(true);
    }
    let name = a.name.as_deref().unwrap_or_default();
    if a.order > cli.max_order {
        return Err(usage(format!(
            "order {} exceeds the maximum {} (raise it with --max-order)",
            a.order, cli.max_order
        )));
    }
    let params = GfParams {
        m: a.m,
        parts: part_set(&a.parts)?,
        caps: caps(cli),
    };
    let (spec, s) = catalog::build(name, &params, a.order).map_err(usage)?;
    let ctx = s.context().clone();
    let aux = ctx.aux_names();
    let mut values: Vec<(String, Rational)> = Vec::new();
    for item in &a.set {
        let (var, v) = render::parse_assignment(item).map_err(usage)?;
        ctx.aux_index(&var).map_err(usage)?;
        values.push((var, v));
    }
    let pairs: Vec<(&str, Rational)> = values
        .iter()
        .map(|(n, v)| (n.as_str(), v.clone()))
        .collect();
    let s = s.specialize(&pairs).map_err(usage)?;
    let egf = spec.kind == GfKind::Egf;
    let is_set = |n: &str| values.iter().any(|(v, _)| v == n);
    let set_json: Map<String, Value> = values
        .iter()
        .map(|(n, v)| (n.clone(), json!(v.to_string())))
        .collect();

    if let Some(text) = &a.coeff {
        let names: Vec<&str> = ctx.names().iter().map(String::as_str).collect();
        let mono = render::parse_monomial(text, &names).map_err(usage)?;
        if let Some((n, _)) = mono.iter().find(|(n, _)| is_set(n)) {
            return Err(usage(format!("`{n}` was fixed by --set")));
        }
        let size = mono
            .iter()
            .find(|(n, _)| n == ctx.size_name())
            .map_or(0, |m| m.1);
        if size > a.order {
            return Err(usage(format!(
                "{}^{size} is beyond order {}",
                ctx.size_name(),
                a.order
            )));
        }
        let exps: Vec<(&str, u32)> = mono.iter().map(|(n, e)| (n.as_str(), *e)).collect();
        let c = s.coefficient_named(&exps).map_err(usage)?;
        let count = egf.then(|| &c * Rational::from_integer(factorial(size)));
        match cli.format {
            Format::Json => {
                let m: Map<String, Value> =
                    mono.iter().map(|(n, e)| (n.clone(), json!(e))).collect();
                let mut v = json!({"entry": spec, "set": set_json, "monomial": m, "coefficient": c.to_string()});
                if let Some(k) = &count {
                    v["count"] = json!(k.to_string());
                }
                json_out(out, &v)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                match &count {
                    Some(k) => {
                        w.write_record(["coefficient", "count"]).map_err(csv_err)?;
                        w.write_record([c.to_string(), k.to_string()])
                            .map_err(csv_err)?;
                    }
                    None => {
                        w.write_record(["coefficient"]).map_err(csv_err)?;
                        w.write_record([c.to_string()]).map_err(csv_err)?;
                    }
                }
                w.flush().map_err(io)?;
            }
            Format::Plain => match &count {
                Some(k) => writeln!(out, "{c}\tcount {k}").map_err(io)?,
                None => writeln!(out, "{c}").map_err(io)?,
            },
        }
        return Ok(true);
    }

    let size_at = ctx.size_index();
    let free: Vec<(usize, &str)> = ctx
        .names()
        .iter()
        .enumerate()
        .filter(|&(i, n)| i != size_at && !is_set(n))
        .map(|(i, n)| (i, n.as_str()))
        .collect();
    match cli.format {
        Format::Json => {
            let terms: Vec<Value> = s
                .terms()
                .map(|(exps, c)| {
                    let n = exps[size_at];
                    let m: Map<String, Value> = free
                        .iter()
                        .filter(|(i, _)| exps[*i] > 0)
                        .map(|(i, name)| (name.to_string(), json!(exps[*i])))
                        .collect();
                    let mut t = json!({"n": n, "exponents": m, "coefficient": c.to_string()});
                    if egf {
                        t["count"] = json!((c * Rational::from_integer(factorial(n))).to_string());
                    }
                    t
                })
                .collect();
            json_out(
                out,
                &json!({"entry": spec, "set": set_json, "terms": terms}),
            )?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec![ctx.size_name().to_string()];
            header.extend(free.iter().map(|(_, n)| n.to_string()));
            header.push("coefficient".into());
            if egf {
                header.push("count".into());
            }
            w.write_record(&header).map_err(csv_err)?;
            for (exps, c) in s.terms() {
                let n = exps[size_at];
                let mut row = vec![n.to_string()];
                row.extend(free.iter().map(|(i, _)| exps[*i].to_string()));
                row.push(c.to_string());
                if egf {
                    row.push((c * Rational::from_integer(factorial(n))).to_string());
                }
                w.write_record(&row).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Format::Plain => {
            let fixed: Vec<String> = values.iter().map(|(n, v)| format!("{n}={v}")).collect();
            let note = if fixed.is_empty() {
                String::new()
            } else {
                format!(" with {}", fixed.join(", "))
            };
            writeln!(out, "# {spec}{note}").map_err(io)?;
            writeln!(
                out,
                "{}\tcoefficient{}",
                ctx.size_name(),
                if egf { "\tcount" } else { "" }
            )
            .map_err(io)?;
            for n in 0..=s.order() {
                let slice = s.slice(n).map_err(usage)?;
                let mut line = format!("{n}\t{}", render::poly(slice, &aux));
                if egf {
                    let scaled = slice.scaled(&Rational::from_integer(factorial(n)));
                    line.push_str(&format!("\t{}", render::poly(&scaled, &aux)));
                }
                writeln!(out, "{line}").map_err(io)?;
            }
        }
    }
    Ok(true)
}

// --------------------------------------------------------------- enum, hist

fn family(cli: &Cli, a: &FamilyArgs) -> Result<(Family, Vec<Statistic>, Caps), Failure> {
    let fam = Family::parse(&a.family, a.n, a.m, part_set(&a.parts)?).map_err(usage)?;
    let stats = a
        .stats
        .iter()
        .map(|s| s.parse::<Statistic>().map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((fam, stats, caps(cli)))
}

fn enumerate(cli: &Cli, a: &FamilyArgs, out: Out) -> Outcome {
    let (fam, stats, caps) = family(cli, a)?;
    let mut rows: Vec<(CombObject, Vec<u32>)> = Vec::new();
    for o in fam.enumerate(&caps).map_err(usage)? {
        let vals = stats
            .iter()
            .map(|&s| o.stat(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage)?;
        rows.push((o, vals));
    }
    match cli.format {
        Format::Json => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|(o, vals)| {
                    let mut m = Map::new();
                    m.insert("object".into(), o.to_json());
                    for (s, v) in stats.iter().zip(vals) {
                        m.insert(s.name().into(), json!(v));
                    }
                    Value::Object(m)
                })
                .collect();
            let names: Vec<&str> = stats.iter().map(|s| s.name()).collect();
            json_out(
                out,
                &json!({"family": fam.name(), "n": fam.size(), "stats": names, "objects": objects}),
            )?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["object".to_string()];
            header.extend(stats.iter().map(|s| s.name().to_string()));
            w.write_record(&header).map_err(csv_err)?;
            for (o, vals) in &rows {
                let mut row = vec![render::object(o)];
                row.extend(vals.iter().map(u32::to_string));
                w.write_record(&row).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Format::Plain => {
            for (o, vals) in &rows {
                let mut line = render::object(o);
                for (s, v) in stats.iter().zip(vals) {
                    line.push_str(&format!("\t{s}={v}"));
                }
                writeln!(out, "{line}").map_err(io)?;
            }
        }
    }
    Ok(true)
}

fn hist(cli: &Cli, a: &FamilyArgs, out: Out) -> Outcome {
    let (fam, stats, caps) = family(cli, a)?;
    if stats.is_empty() {
        return Err(usage("hist needs --stats"));
    }
    let h = histogram(&fam, &stats, &caps).map_err(usage)?;
    match cli.format {
        Format::Json => {
            let counts: Vec<Value> = h
                .counts
                .iter()
                .map(|(key, c)| {
                    let mut m: Map<String, Value> = stats
                        .iter()
                        .zip(key)
                        .map(|(s, v)| (s.name().to_string(), json!(v)))
                        .collect();
                    m.insert("count".into(), json!(c));
                    Value::Object(m)
                })
                .collect();
            let names: Vec<&str> = stats.iter().map(|s| s.name()).collect();
            json_out(
                out,
                &json!({"family": h.family, "n": h.n, "stats": names, "counts": counts, "total": h.total()}),
            )?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header: Vec<String> = stats.iter().map(|s| s.name().to_string()).collect();
            header.push("count".into());
            w.write_record(&header).map_err(csv_err)?;
            for (key, c) in &h.counts {
                let mut row: Vec<String> = key.iter().map(u32::to_string).collect();
                row.push(c.to_string());
                w.write_record(&row).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Format::Plain => {
            let names: Vec<&str> = stats.iter().map(|s| s.name()).collect();
            writeln!(out, "{}\tcount", names.join("\t")).map_err(io)?;
            for (key, c) in &h.counts {
                let k: Vec<String> = key.iter().map(u32::to_string).collect();
                writeln!(out, "{}\t{c}", k.join("\t")).map_err(io)?;
            }
            writeln!(out, "total\t{}", h.total()).map_err(io)?;
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------- bijections

fn bijection(cli: &Cli, a: &BijArgs, out: Out) -> Outcome {
    let id = match a.name {
        Bijection::Phi => "phi",
        Bijection::Zigzag => "zigzag",
        Bijection::UnimodalPartition => "unimodal-partition",
        Bijection::TreeReflect => "tree-reflect",
    };
    if let Some(n) = a.check {
        let r = verify::verify_bijection(id, n);
        reports(cli.format, std::slice::from_ref(&r), out)?;
        return Ok(r.status != Status::Fail);
    }
    let input = a.input.as_deref().unwrap_or_default();
    let mut fields: Vec<(&str, String, Value)> = Vec::new();
    let mut field = |k: &'static str, plain: String, v: Value| fields.push((k, plain, v));
    field("input", input.to_string(), json!(input));
    match a.name {
        Bijection::Phi => {
            let w: BinaryWord = input.parse().map_err(usage)?;
            let (image, source) = if a.inverse {
                let v = bij::phi_inverse(&w).map_err(usage)?;
                (v.clone(), v)
            } else {
                (bij::phi(&w).map_err(usage)?, w)
            };
            let dec = bij::phi_decomposition(&source).map_err(usage)?;
            field("image", image.to_string(), json!(image.to_string()));
            let o = &dec.omega;
            for (k, s) in [("Q", &o.q), ("R", &o.r), ("S", &o.s), ("T", &o.t)] {
                field(k, render::set(s), json!(s));
            }
            field("d", render::list(&dec.d), json!(dec.d));
            field("mu", render::list(&dec.mu), json!(dec.mu));
        }
        Bijection::Zigzag => {
            let w: BinaryWord = input.parse().map_err(usage)?;
            let image = if a.inverse {
                bij::zigzag_inverse(&w)
            } else {
                bij::zigzag(&w)
            }
            .map_err(usage)?;
            field("image", image.to_string(), json!(image.to_string()));
        }
        Bijection::UnimodalPartition => {
            let image = if a.inverse {
                let p: Partition = input.parse().map_err(usage)?;
                bij::unimodal_partition_inverse(&p)
                    .map_err(usage)?
                    .to_string()
            } else {
                let c: Composition = input.parse().map_err(usage)?;
                bij::unimodal_partition(&c).map_err(usage)?.to_string()
            };
            field("image", image.clone(), json!(image));
        }
        Bijection::TreeReflect => {
            let t: BinaryTree = input.parse().map_err(usage)?;
            let image = bij::reflect(&t).to_json();
            field("image", image.to_string(), image);
            if !t.is_empty() {
                let (l, r) = bij::tree_reflect_pair(&t).map_err(usage)?;
                let u = bij::unique_nodes(&l, &r);
                field("left", l.to_json().to_string(), l.to_json());
                field("reflected_right", r.to_json().to_string(), r.to_json());
                field("unique_nodes", u.to_string(), json!(u));
                field("da", t.stats().da.to_string(), json!(t.stats().da));
            }
        }
    }
    match cli.format {
        Format::Json => {
            let mut m: Map<String, Value> = fields
                .into_iter()
                .map(|(k, _, v)| (k.to_string(), v))
                .collect();
            m.insert("bijection".into(), json!(id));
            m.insert("inverse".into(), json!(a.inverse));
            json_out(out, &Value::Object(m))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["field", "value"]).map_err(csv_err)?;
            for (k, plain, _) in &fields {
                w.write_record([k, plain.as_str()]).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Format::Plain => {
            for (k, plain, _) in &fields {
                writeln!(out, "{k:<16}{plain}").map_err(io)?;
            }
        }
    }
    Ok(true)
}

// ------------------------------------------------------------------- moments

fn moments(cli: &Cli, a: &MomentsArgs, out: Out) -> Outcome {
    if let Some(n) = a.n.iter().find(|&&n| n > cli.max_order) {
        return Err(usage(format!(
            "size {n} exceeds the maximum {} (raise it with --max-order)",
            cli.max_order
        )));
    }
    let fam = LimitFamily::parse(&a.family, a.m).map_err(usage)?;
    let rep = convergence_report(fam, &a.n).map_err(usage)?;
    match cli.format {
        Format::Json => json_out(
            out,
            &serde_json::to_value(&rep).map_err(|e| Failure::Environment(e.to_string()))?,
        )?,
        _ => write!(out, "{}", rep.to_csv()).map_err(io)?,
    }
    Ok(true)
}

// -------------------------------------------------------------------- verify

fn report_line(r: &VerificationReport) -> String {
    let mut line = format!("{:<14}{}", r.label(), r.check_id);
    if let Some(m) = r.mismatches.first() {
        line.push_str(&format!(
            "  ({} mismatch{}, first at {}: expected {}, got {})",
            r.mismatch_count,
            if r.mismatch_count == 1 { "" } else { "es" },
            m.at,
            m.expected,
            m.actual
        ));
    } else if let Some(Value::String(why)) = r.parameters.get("reason") {
        line.push_str(&format!("  ({why})"));
    }
    line
}

fn reports(format: Format, rs: &[VerificationReport], out: Out) -> Result<(), Failure> {
    match format {
        Format::Json => {
            let v = serde_json::to_value(rs).map_err(|e| Failure::Environment(e.to_string()))?;
            json_out(out, &v)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check_id", "status", "mismatch_count"])
                .map_err(csv_err)?;
            for r in rs {
                w.write_record([
                    r.check_id.as_str(),
                    r.label(),
                    &r.mismatch_count.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(io)
        }
        Format::Plain => {
            for r in rs {
                writeln!(out, "{}", report_line(r)).map_err(io)?;
            }
            Ok(())
        }
    }
}

fn verify_suite(cli: &Cli, a: &VerifyArgs, out: Out) -> Outcome {
    if a.list {
        for id in verify::check_ids() {
            writeln!(out, "{id}").map_err(io)?;
        }
        return Ok(true);
    }
    let started = Instant::now();
    let suite = verify::run_suite(&a.suite).map_err(usage)?;
    let elapsed = started.elapsed().as_millis() as u64;
    match cli.format {
        Format::Json => json_out(out, &suite.to_json())?,
        f => {
            reports(f, &suite.checks, out)?;
            if f == Format::Plain {
                let s = suite.summary;
                writeln!(
                    out,
                    "summary: {} pass, {} expected-fail, {} fail, {} skipped",
                    s.pass, s.expected_fail, s.fail, s.skipped
                )
                .map_err(io)?;
            }
        }
    }
    if let Some(path) = &a.json {
        let mut v = suite.to_json();
        v["footer"] = json!({"runtime_ms": suite.runtimes(), "total_ms": elapsed});
        let text =
            serde_json::to_string_pretty(&v).map_err(|e| Failure::Environment(e.to_string()))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::Environment(format!("{}: {e}", path.display())))?;
    }
    eprintln!("runtime: {elapsed} ms");
    Ok(suite.ok())
}

// ---------------------------------------------------------------------- oeis

fn client(src: &OeisSource) -> (oeis::Client, oeis::Mode) {
    let mut c = oeis::Client::from_env();
    if let Some(d) = &src.cache_dir {
        c.cache_dir = d.clone();
    }
    if let Some(e) = &src.endpoint {
        c.endpoint = e.trim_end_matches('/').to_string();
    }
    let mode = if src.offline {
        oeis::Mode::Offline
    } else {
        oeis::Mode::Online
    };
    (c, mode)
}

fn oeis_failure(e: oeis::OeisError) -> Failure {
    match e {
        oeis::OeisError::InvalidANumber(_) | oeis::OeisError::Catalog(_) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Environment(e.to_string()),
    }
}

fn oeis_check(cli: &Cli, a: &OeisCheckArgs, out: Out) -> Outcome {
    let (c, mode) = client(&a.source);
    let targets: Vec<String> = if a.a_numbers.is_empty() {
        if a.against.is_some() {
            return Err(usage("--against needs an A-number"));
        }
        oeis::MANIFEST
            .iter()
            .map(|m| m.a_number.to_string())
            .collect()
    } else {
        a.a_numbers.clone()
    };
    let mut rs = Vec::new();
    for t in &targets {
        rs.push(oeis::check(&c, t, a.against.as_deref(), mode).map_err(oeis_failure)?);
    }
    match cli.format {
        Format::Plain => {
            for r in &rs {
                let p = |k: &str| {
                    r.parameters
                        .get(k)
                        .map(|v| v.as_str().map_or(v.to_string(), str::to_string))
                        .unwrap_or_default()
                };
                writeln!(
                    out,
                    "{}  against {}, {} terms compared, offset shift {}, source {}",
                    report_line(r),
                    p("entry"),
                    p("overlap"),
                    p("offset_shift"),
                    p("source")
                )
                .map_err(io)?;
            }
        }
        f => reports(f, &rs, out)?,
    }
    Ok(rs.iter().all(|r| r.status != Status::Fail))
}

fn oeis_fetch(cli: &Cli, a: &OeisFetchArgs, out: Out) -> Outcome {
    let (c, mode) = client(&a.source);
    let r = c.fetch_bfile(&a.a_number, mode).map_err(oeis_failure)?;
    match cli.format {
        Format::Json => json_out(
            out,
            &serde_json::to_value(&r).map_err(|e| Failure::Environment(e.to_string()))?,
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "a(n)"]).map_err(csv_err)?;
            for (i, t) in r.terms.iter().enumerate() {
                w.write_record([(r.offset + i as i64).to_string(), t.to_string()])
                    .map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Format::Plain => {
            writeln!(out, "# {} from {:?}", r.a_number, r.source).map_err(io)?;
            for (i, t) in r.terms.iter().enumerate() {
                writeln!(out, "{} {t}", r.offset + i as i64).map_err(io)?;
            }
        }
    }
    Ok(true)
}

fn oeis_list(cli: &Cli, out: Out) -> Outcome {
    match cli.format {
        Format::Json => {
            let v: Vec<Value> = oeis::MANIFEST
                .iter()
                .map(|m| json!({"a_number": m.a_number, "entry": m.entry, "first_n": m.first_n, "index_shift": m.index_shift, "note": m.note}))
                .collect();
            json_out(out, &Value::Array(v))?;
        }
        _ => {
            for m in oeis::MANIFEST {
                writeln!(out, "{}  {:<24}{}", m.a_number, m.entry, m.note).map_err(io)?;
            }
        }
    }
    Ok(true)
}

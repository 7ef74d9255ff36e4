use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;

use asymmetry::verify::Status;
use asymmetry_oeis::*;
use num_bigint::BigInt;

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Serves `body` with `status` to `requests` connections, returns the endpoint.
fn stub(status: u16, body: &'static str, requests: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming().take(requests) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            while reader.read_line(&mut line).unwrap() > 2 {
                line.clear();
            }
            let reason = if status == 200 { "OK" } else { "Not Found" };
            write!(
                stream,
                "HTTP/1.1 {status} {reason}\r\ncontent-type: text/plain\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    format!("http://{addr}")
}

#[test]
fn vendored_involutions() {
    let dir = tempfile::tempdir().unwrap();
    let c = Client::new(dir.path(), "http://127.0.0.1:9");
    let r = c.fetch_bfile("A000085", Mode::Offline).unwrap();
    assert_eq!(r.source, Source::Vendored);
    assert_eq!(r.offset, 0);
    assert_eq!(r.terms[..6], big(&[1, 1, 2, 4, 10, 26])[..]);
}

#[test]
fn malformed_a_number() {
    let c = Client::new(tempfile::tempdir().unwrap().path(), "http://127.0.0.1:9");
    let e = c.fetch_bfile("A00008", Mode::Offline).unwrap_err();
    assert_eq!(e, OeisError::InvalidANumber("A00008".into()));
}

#[test]
fn missing_offline_fixture() {
    let c = Client::new(tempfile::tempdir().unwrap().path(), "http://127.0.0.1:9");
    let e = c.fetch_bfile("A999999", Mode::Offline).unwrap_err();
    assert!(matches!(e, OeisError::NotAvailable { .. }), "{e}");
    assert!(!e.is_retryable());
}

#[test]
fn online_then_offline_round_trip() {
    let endpoint = stub(200, "# test\n3 5\n4 8\n5 13\n6 21\n7 34\n", 1);
    let dir = tempfile::tempdir().unwrap();
    let c = Client::new(dir.path(), endpoint);
    let online = c.fetch_bfile("A000045", Mode::Online).unwrap();
    assert_eq!(online.source, Source::Remote);
    assert_eq!(online.offset, 3);
    assert!(c.cache_path("A000045").exists());
    let offline = c.fetch_bfile("A000045", Mode::Offline).unwrap();
    assert_eq!(offline.source, Source::Cache);
    assert_eq!(offline.terms, online.terms);
    assert_eq!(offline.offset, online.offset);
}

#[test]
fn cache_shadows_vendored() {
    let dir = tempfile::tempdir().unwrap();
    let c = Client::new(dir.path(), "http://127.0.0.1:9");
    std::fs::write(c.cache_path("A000085"), "0 1\n1 1\n2 2\n").unwrap();
    let r = c.fetch_bfile("A000085", Mode::Offline).unwrap();
    assert_eq!(r.source, Source::Cache);
    assert_eq!(r.terms.len(), 3);
}

#[test]
fn malformed_remote_bfile_reports_line() {
    let endpoint = stub(200, "0 1\n1 1\n2 two\n", 1);
    let dir = tempfile::tempdir().unwrap();
    let c = Client::new(dir.path(), endpoint);
    let e = c.fetch_bfile("A000001", Mode::Online).unwrap_err();
    assert!(matches!(e, OeisError::Parse { line: 3, .. }), "{e}");
    assert!(!c.cache_path("A000001").exists());
}

#[test]
fn remote_404_is_not_available() {
    let endpoint = stub(404, "no", 1);
    let c = Client::new(tempfile::tempdir().unwrap().path(), endpoint);
    let e = c.fetch_bfile("A000002", Mode::Online).unwrap_err();
    assert!(matches!(e, OeisError::NotAvailable { .. }), "{e}");
}

#[test]
fn unreachable_endpoint_is_retryable() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let mut c = Client::new(
        tempfile::tempdir().unwrap().path(),
        format!("http://127.0.0.1:{port}"),
    );
    c.timeout = std::time::Duration::from_secs(5);
    let e = c.fetch_bfile("A000085", Mode::Online).unwrap_err();
    assert!(e.is_retryable(), "{e}");
}

#[test]
fn compare_needs_overlap() {
    let r = SequenceRef {
        a_number: "A000001".into(),
        offset: 0,
        terms: big(&[1, 2, 3, 4, 5, 6]),
        source: Source::Vendored,
    };
    assert_eq!(
        compare_sequence(&big(&[1, 2, 3, 4, 5]), &r, 0).status,
        Status::Pass
    );
    assert_eq!(
        compare_sequence(&big(&[2, 3, 4, 5, 6]), &r, 1).status,
        Status::Pass
    );
    assert_eq!(
        compare_sequence(&big(&[1, 2, 3, 4]), &r, 0).status,
        Status::Skipped
    );
    assert_eq!(
        compare_sequence(&big(&[5, 6, 7, 8, 9]), &r, 4).status,
        Status::Skipped
    );
    let bad = compare_sequence(&big(&[1, 2, 3, 4, 6]), &r, 0);
    assert_eq!(bad.status, Status::Fail);
    assert_eq!(bad.mismatches[0].at, "a(4)");
}

#[test]
fn manifest_sequences_agree_offline() {
    let c = Client::new(tempfile::tempdir().unwrap().path(), "http://127.0.0.1:9");
    let reports = check_all(&c, Mode::Offline);
    assert_eq!(reports.len(), 7);
    for r in &reports {
        assert!(passed_with_overlap(r, 10), "{r:?}");
    }
}

#[test]
fn explicit_catalog_entry() {
    let c = Client::new(tempfile::tempdir().unwrap().path(), "http://127.0.0.1:9");
    let r = check(&c, "A047974", Some("matchings-sym"), Mode::Offline).unwrap();
    assert_eq!(r.status, Status::Pass);
    let r = check(&c, "A047974", Some("matchings-no-centered"), Mode::Offline).unwrap();
    assert_eq!(r.status, Status::Fail);
    assert!(check(&c, "A047974", Some("nonsense"), Mode::Offline).is_err());
}

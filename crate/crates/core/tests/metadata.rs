mod common;

use common::fixtures::{self, encode, JpegSpec, DATE_CREATED, ORIGINATING_PROGRAM};
use printproof::metadata::{estimate_quality, parse_segments, summarize, Confidence, Ifd};

fn row<'a>(rows: &'a [(String, String)], key: &str) -> Option<&'a str> {
    rows.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

#[test]
fn portrait_fixture_fields() {
    let bytes = fixtures::portrait_fixture();
    let s = summarize(&bytes).unwrap();
    let rows = s.rows();
    assert_eq!(row(&rows, "Image Size"), Some("634x821"));
    assert_eq!(row(&rows, "Megapixels"), Some("0.521"));
    assert_eq!(row(&rows, "Encoding Process"), Some("Baseline DCT, Huffman coding"));
    assert_eq!(row(&rows, "Y Cb Cr Sub Sampling"), Some("YCbCr4:2:0 (2 2)"));
    assert_eq!(row(&rows, "JFIF Version"), Some("1.01"));
    assert_eq!(row(&rows, "X Resolution"), Some("166"));
    assert_eq!(row(&rows, "Resolution Unit"), Some("inches"));
    assert_eq!(row(&rows, "Date Created"), Some(DATE_CREATED));
    assert_eq!(row(&rows, "Time Created"), Some("13:04:27+00:00"));
    assert_eq!(row(&rows, "Originating Program"), Some(ORIGINATING_PROGRAM));
    assert_eq!(row(&rows, "Country-Primary Location Name"), Some("Australia"));
    let exif = s.exif.as_ref().unwrap();
    assert_eq!(exif.get(Ifd::Ifd0, 0x0110).unwrap().display(), "Canon EOS-1D Mark IV");
    assert_eq!(exif.get(Ifd::Exif, 0x829A).unwrap().display(), "1/125");
    assert!(s.warnings.is_empty(), "{:?}", s.warnings);
    let q = s.dqt.unwrap();
    assert_eq!((q.quality, q.confidence), (80, Confidence::Exact));
}

#[test]
fn landscape_fixture_fields() {
    let s = summarize(&fixtures::landscape_fixture()).unwrap();
    let rows = s.rows();
    assert_eq!(row(&rows, "Image Size"), Some("634x423"));
    assert_eq!(row(&rows, "Megapixels"), Some("0.268"));
    assert_eq!(row(&rows, "Encoding Process"), Some("Progressive DCT, Huffman coding"));
    assert_eq!(row(&rows, "Y Cb Cr Sub Sampling"), Some("YCbCr4:2:0 (2 2)"));
    assert_eq!(row(&rows, "Profile Description"), Some("Adobe RGB (1998)"));
    assert_eq!(row(&rows, "Profile CMM Type"), Some("Adobe Systems Inc."));
    assert_eq!(row(&rows, "Profile Class"), Some("Display Device Profile"));
    assert_eq!(row(&rows, "Primary Platform"), Some("Apple Computer Inc."));
    assert_eq!(row(&rows, "Profile Version"), Some("2.1.0"));
    assert_eq!(row(&rows, "Media White Point"), Some("0.95045 1 1.08905"));
    assert_eq!(row(&rows, "Comment"), Some("re-encoded fixture"));
    assert_eq!(row(&rows, "X Resolution"), Some("300"));
}

#[test]
fn json_matches_listing() {
    let s = summarize(&fixtures::portrait_fixture()).unwrap();
    let j = s.to_json();
    assert_eq!(j["megapixels"], 0.521);
    assert_eq!(j["sof"]["encoding_process"], "Baseline DCT, Huffman coding");
    let iptc = j["iptc"].as_array().unwrap();
    assert!(iptc.iter().any(|r| r["dataset"] == "2:65" && r["value"] == ORIGINATING_PROGRAM));
}

#[test]
fn quality_recovered_for_reference_encoder() {
    let img = fixtures::textured(64, 48, 1);
    for q in (10..=95).step_by(5) {
        let bytes = encode(&img, &JpegSpec { quality: q, subsample: true, ..Default::default() });
        let est = estimate_quality(&parse_segments(&bytes).unwrap()).unwrap();
        assert_eq!((est.quality, est.confidence), (q, Confidence::Exact), "q={q}");
    }
}

#[test]
fn sampling_one_one_reads_as_444() {
    let img = fixtures::textured(32, 32, 2);
    let s = summarize(&encode(&img, &JpegSpec { quality: 92, ..Default::default() })).unwrap();
    assert_eq!(row(&s.rows(), "Y Cb Cr Sub Sampling"), Some("YCbCr4:4:4 (1 1)"));
}

#[test]
fn segment_tree_round_trips_bytes() {
    for bytes in [fixtures::portrait_fixture(), fixtures::landscape_fixture()] {
        let tree = parse_segments(&bytes).unwrap();
        assert_eq!(tree.to_bytes(), bytes);
    }
}

#[test]
fn truncated_stream_degrades_to_warning() {
    let bytes = fixtures::portrait_fixture();
    let s = summarize(&bytes[..bytes.len() / 3]).unwrap();
    assert!(s.truncated);
    assert_eq!(row(&s.rows(), "Image Size"), Some("634x821"));
    assert!(summarize(b"not a jpeg").is_err());
}

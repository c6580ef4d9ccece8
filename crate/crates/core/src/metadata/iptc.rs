//! IPTC-IIM datasets carried in a Photoshop APP13 image resource block.

use serde::Serialize;
use serde_json::{json, Value};

pub const PHOTOSHOP_SIGNATURE: &[u8] = b"Photoshop 3.0\0";
const RESOURCE_IPTC: u16 = 0x0404;
const RESOURCE_IPTC_DIGEST: u16 = 0x0425;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IptcRecord {
    pub record: u8,
    pub dataset: u8,
    pub value: String,
}

impl IptcRecord {
    pub fn name(&self) -> Option<&'static str> {
        dataset_name(self.record, self.dataset)
    }

    pub fn label(&self) -> String {
        self.name()
            .map(str::to_string)
            .unwrap_or_else(|| format!("IPTC {}:{}", self.record, self.dataset))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IptcData {
    /// Datasets in file order; repeatable ones (Keywords) appear once per occurrence.
    pub records: Vec<IptcRecord>,
    /// Raw bytes of resource 0x0425 when present. Not recomputed.
    pub digest: Option<Vec<u8>>,
}

impl IptcData {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty() && self.digest.is_none()
    }

    pub fn get(&self, record: u8, dataset: u8) -> Option<&str> {
        self.records
            .iter()
            .find(|r| r.record == record && r.dataset == dataset)
            .map(|r| r.value.as_str())
    }

    pub fn get_all(&self, record: u8, dataset: u8) -> Vec<&str> {
        self.records
            .iter()
            .filter(|r| r.record == record && r.dataset == dataset)
            .map(|r| r.value.as_str())
            .collect()
    }

    pub fn keywords(&self) -> Vec<&str> {
        self.get_all(2, 25)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.records
                .iter()
                .map(|r| {
                    json!({
                        "dataset": format!("{}:{}", r.record, r.dataset),
                        "tag": r.label(),
                        "value": r.value,
                    })
                })
                .collect(),
        )
    }
}

pub fn dataset_name(record: u8, dataset: u8) -> Option<&'static str> {
    Some(match (record, dataset) {
        (1, 90) => "Coded Character Set",
        (2, 0) => "Application Record Version",
        (2, 5) => "Object Name",
        (2, 15) => "Category",
        (2, 20) => "Supplemental Categories",
        (2, 25) => "Keywords",
        (2, 40) => "Special Instructions",
        (2, 55) => "Date Created",
        (2, 60) => "Time Created",
        (2, 62) => "Digital Creation Date",
        (2, 63) => "Digital Creation Time",
        (2, 65) => "Originating Program",
        (2, 70) => "Program Version",
        (2, 80) => "By-line",
        (2, 85) => "By-line Title",
        (2, 90) => "City",
        (2, 92) => "Sub-location",
        (2, 95) => "Province-State",
        (2, 100) => "Country-Primary Location Code",
        (2, 101) => "Country-Primary Location Name",
        (2, 103) => "Original Transmission Reference",
        (2, 105) => "Headline",
        (2, 110) => "Credit",
        (2, 115) => "Source",
        (2, 116) => "Copyright Notice",
        (2, 120) => "Caption-Abstract",
        (2, 122) => "Writer-Editor",
        _ => return None,
    })
}

fn is_date(record: u8, dataset: u8) -> bool {
    matches!((record, dataset), (1, 70) | (2, 30) | (2, 37) | (2, 47) | (2, 55) | (2, 62))
}

fn is_time(record: u8, dataset: u8) -> bool {
    matches!((record, dataset), (1, 80) | (2, 35) | (2, 38) | (2, 60) | (2, 63))
}

fn decode_text(raw: &[u8]) -> String {
    match std::str::from_utf8(raw) {
        Ok(s) => s.to_string(),
        Err(_) => raw.iter().map(|&b| b as char).collect(),
    }
}

/// `20110217` -> `2011:02:17`; anything else is returned unchanged.
fn format_date(s: &str) -> String {
    if s.len() == 8 && s.bytes().all(|b| b.is_ascii_digit()) {
        format!("{}:{}:{}", &s[0..4], &s[4..6], &s[6..8])
    } else {
        s.to_string()
    }
}

/// `134512+0100` -> `13:45:12+01:00`.
fn format_time(s: &str) -> String {
    let b = s.as_bytes();
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    if b.len() == 11 && digits(0..6) && matches!(b[6], b'+' | b'-') && digits(7..11) {
        format!("{}:{}:{}{}{}:{}", &s[0..2], &s[2..4], &s[4..6], &s[6..7], &s[7..9], &s[9..11])
    } else if b.len() == 6 && digits(0..6) {
        format!("{}:{}:{}", &s[0..2], &s[2..4], &s[4..6])
    } else {
        s.to_string()
    }
}

fn be16(b: &[u8], at: usize) -> Option<u16> {
    Some(u16::from_be_bytes(b.get(at..at + 2)?.try_into().ok()?))
}

fn be32(b: &[u8], at: usize) -> Option<u32> {
    Some(u32::from_be_bytes(b.get(at..at + 4)?.try_into().ok()?))
}

/// Walks the 8BIM resource list, yielding (id, data).
fn resources(mut b: &[u8]) -> Vec<(u16, &[u8])> {
    let mut out = Vec::new();
    while b.len() >= 12 && &b[..4] == b"8BIM" {
        let Some(id) = be16(b, 4) else { break };
        // Pascal name, padded so that length byte + name is even.
        let name_len = b[6] as usize;
        let mut pos = 6 + 1 + name_len;
        pos += pos % 2;
        let Some(size) = be32(b, pos) else { break };
        pos += 4;
        let size = size as usize;
        let Some(data) = pos.checked_add(size).and_then(|end| b.get(pos..end)) else {
            break;
        };
        out.push((id, data));
        let next = pos + size + size % 2;
        b = b.get(next..).unwrap_or(&[]);
    }
    out
}

fn parse_iim(mut b: &[u8]) -> Vec<IptcRecord> {
    let mut out = Vec::new();
    while b.len() >= 5 && b[0] == 0x1C {
        let (record, dataset) = (b[1], b[2]);
        let len_field = u16::from_be_bytes([b[3], b[4]]);
        let mut pos = 5;
        let len = if len_field & 0x8000 != 0 {
            // Extended dataset: the low bits give the size of the length field.
            let n = (len_field & 0x7FFF) as usize;
            let Some(bytes) = b.get(5..5 + n) else { break };
            if n > 4 {
                break;
            }
            pos += n;
            bytes.iter().fold(0usize, |acc, &x| (acc << 8) | x as usize)
        } else {
            len_field as usize
        };
        let Some(raw) = pos.checked_add(len).and_then(|end| b.get(pos..end)) else {
            break;
        };
        let text = decode_text(raw);
        let value = if is_date(record, dataset) {
            format_date(&text)
        } else if is_time(record, dataset) {
            format_time(&text)
        } else {
            text
        };
        out.push(IptcRecord { record, dataset, value });
        b = &b[pos + len..];
    }
    out
}

/// Decodes IIM datasets from an APP13 payload. A payload without the
/// Photoshop signature or without resource 0x0404 yields empty data.
pub fn parse_iptc(app13_payload: &[u8]) -> IptcData {
    let Some(body) = app13_payload.strip_prefix(PHOTOSHOP_SIGNATURE) else {
        return IptcData::default();
    };
    let mut data = IptcData::default();
    for (id, bytes) in resources(body) {
        match id {
            RESOURCE_IPTC => data.records.extend(parse_iim(bytes)),
            RESOURCE_IPTC_DIGEST => data.digest = Some(bytes.to_vec()),
            _ => {}
        }
    }
    data
}

//! EXIF (TIFF IFD) decoding from an APP1 payload.

use std::collections::HashSet;

use serde::Serialize;
use serde_json::{json, Value};

use super::{MetaError, MetaWarning};

pub const EXIF_SIGNATURE: &[u8] = b"Exif\0\0";

const TAG_EXIF_IFD: u16 = 0x8769;
const TAG_GPS_IFD: u16 = 0x8825;
const MAX_IFD_ENTRIES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Ifd {
    #[serde(rename = "IFD0")]
    Ifd0,
    #[serde(rename = "ExifIFD")]
    Exif,
    #[serde(rename = "GPS")]
    Gps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ByteOrder {
    #[serde(rename = "II")]
    Little,
    #[serde(rename = "MM")]
    Big,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: u32,
    pub den: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SRational {
    pub num: i32,
    pub den: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExifValue {
    Byte(Vec<u8>),
    Ascii(String),
    Short(Vec<u16>),
    Long(Vec<u32>),
    Rational(Vec<Rational>),
    SByte(Vec<i8>),
    Undefined(Vec<u8>),
    SShort(Vec<i16>),
    SLong(Vec<i32>),
    SRational(Vec<SRational>),
    Float(Vec<f32>),
    Double(Vec<f64>),
    /// Unrecognized type code; the raw 4-byte value field is kept.
    Unknown(Vec<u8>),
}

fn type_size(type_code: u16) -> Option<usize> {
    Some(match type_code {
        1 | 2 | 6 | 7 => 1,
        3 | 8 => 2,
        4 | 9 | 11 => 4,
        5 | 10 | 12 => 8,
        _ => return None,
    })
}

fn fmt_decimal(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl ExifValue {
    pub fn as_u32(&self) -> Option<u32> {
        match self {
            Self::Short(v) => v.first().map(|&x| x as u32),
            Self::Long(v) => v.first().copied(),
            Self::Byte(v) => v.first().map(|&x| x as u32),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Self::Rational(v) => v.first().copied(),
            _ => None,
        }
    }

    /// Human-readable rendering for the listing.
    pub fn display(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
        }
        match self {
            Self::Ascii(s) => s.clone(),
            Self::Byte(v) => join(v),
            Self::Short(v) => join(v),
            Self::Long(v) => join(v),
            Self::SByte(v) => join(v),
            Self::SShort(v) => join(v),
            Self::SLong(v) => join(v),
            Self::Float(v) => join(v),
            Self::Double(v) => join(v),
            Self::Rational(v) => v
                .iter()
                .map(|r| match r.den {
                    0 => "inf".to_string(),
                    1 => r.num.to_string(),
                    d => fmt_decimal(r.num as f64 / d as f64),
                })
                .collect::<Vec<_>>()
                .join(" "),
            Self::SRational(v) => v
                .iter()
                .map(|r| match r.den {
                    0 => "inf".to_string(),
                    1 => r.num.to_string(),
                    d => fmt_decimal(r.num as f64 / d as f64),
                })
                .collect::<Vec<_>>()
                .join(" "),
            Self::Undefined(v) | Self::Unknown(v) => {
                if v.len() <= 8 && v.iter().all(|b| b.is_ascii_graphic()) {
                    String::from_utf8_lossy(v).into_owned()
                } else {
                    format!("(Binary data {} bytes)", v.len())
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        fn one_or_many<T: Serialize>(v: &[T]) -> Value {
            if v.len() == 1 {
                json!(v[0])
            } else {
                json!(v)
            }
        }
        match self {
            Self::Ascii(s) => json!(s),
            Self::Byte(v) => one_or_many(v),
            Self::Short(v) => one_or_many(v),
            Self::Long(v) => one_or_many(v),
            Self::SByte(v) => one_or_many(v),
            Self::SShort(v) => one_or_many(v),
            Self::SLong(v) => one_or_many(v),
            Self::Float(v) => one_or_many(v),
            Self::Double(v) => one_or_many(v),
            Self::Rational(v) => one_or_many(&v.iter().map(|r| [r.num, r.den]).collect::<Vec<_>>()),
            Self::SRational(v) => one_or_many(&v.iter().map(|r| [r.num, r.den]).collect::<Vec<_>>()),
            Self::Undefined(v) | Self::Unknown(v) => json!({ "hex": hex::encode(v) }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExifEntry {
    pub tag_id: u16,
    pub ifd: Ifd,
    pub type_code: u16,
    pub value: ExifValue,
}

impl ExifEntry {
    pub fn name(&self) -> Option<&'static str> {
        tag_name(self.ifd, self.tag_id)
    }

    pub fn label(&self) -> String {
        self.name()
            .map(str::to_string)
            .unwrap_or_else(|| format!("Tag 0x{:04X}", self.tag_id))
    }

    /// Listing value with enumerations spelled out.
    pub fn display(&self) -> String {
        match (self.ifd, self.tag_id, self.value.as_u32()) {
            (Ifd::Ifd0, 0x0128, Some(u)) => resolution_unit_name(u).to_string(),
            (Ifd::Exif, 0x829A, _) => match self.value.as_rational() {
                Some(Rational { num, den }) if num > 0 && den > num => {
                    format!("1/{}", fmt_decimal(den as f64 / num as f64))
                }
                _ => self.value.display(),
            },
            _ => self.value.display(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ifd": self.ifd,
            "tag_id": self.tag_id,
            "tag": self.label(),
            "type": self.type_code,
            "value": self.value.to_json(),
        })
    }
}

pub fn resolution_unit_name(unit: u32) -> &'static str {
    match unit {
        1 => "None",
        2 => "inches",
        3 => "cm",
        _ => "unknown",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExifData {
    pub byte_order: ByteOrder,
    pub entries: Vec<ExifEntry>,
    pub warnings: Vec<MetaWarning>,
}

impl ExifData {
    pub fn get(&self, ifd: Ifd, tag_id: u16) -> Option<&ExifEntry> {
        self.entries.iter().find(|e| e.ifd == ifd && e.tag_id == tag_id)
    }
}

struct Tiff<'a> {
    data: &'a [u8],
    order: ByteOrder,
}

impl<'a> Tiff<'a> {
    fn bytes(&self, off: usize, len: usize) -> Option<&'a [u8]> {
        self.data.get(off..off.checked_add(len)?)
    }

    fn u16_at(&self, off: usize) -> Option<u16> {
        let b: [u8; 2] = self.bytes(off, 2)?.try_into().ok()?;
        Some(match self.order {
            ByteOrder::Little => u16::from_le_bytes(b),
            ByteOrder::Big => u16::from_be_bytes(b),
        })
    }

    fn u32_at(&self, off: usize) -> Option<u32> {
        let b: [u8; 4] = self.bytes(off, 4)?.try_into().ok()?;
        Some(match self.order {
            ByteOrder::Little => u32::from_le_bytes(b),
            ByteOrder::Big => u32::from_be_bytes(b),
        })
    }

    fn u64_at(&self, off: usize) -> Option<u64> {
        let b: [u8; 8] = self.bytes(off, 8)?.try_into().ok()?;
        Some(match self.order {
            ByteOrder::Little => u64::from_le_bytes(b),
            ByteOrder::Big => u64::from_be_bytes(b),
        })
    }

    fn decode(&self, type_code: u16, count: usize, off: usize) -> Option<ExifValue> {
        let n = |size: usize| (0..count).map(move |i| off + i * size);
        Some(match type_code {
            1 => ExifValue::Byte(self.bytes(off, count)?.to_vec()),
            2 => {
                let raw = self.bytes(off, count)?;
                let raw = match raw.iter().position(|&b| b == 0) {
                    Some(p) => &raw[..p],
                    None => raw,
                };
                ExifValue::Ascii(String::from_utf8_lossy(raw).into_owned())
            }
            3 => ExifValue::Short(n(2).map(|o| self.u16_at(o)).collect::<Option<_>>()?),
            4 => ExifValue::Long(n(4).map(|o| self.u32_at(o)).collect::<Option<_>>()?),
            5 => ExifValue::Rational(
                n(8).map(|o| Some(Rational { num: self.u32_at(o)?, den: self.u32_at(o + 4)? }))
                    .collect::<Option<_>>()?,
            ),
            6 => ExifValue::SByte(self.bytes(off, count)?.iter().map(|&b| b as i8).collect()),
            7 => ExifValue::Undefined(self.bytes(off, count)?.to_vec()),
            8 => ExifValue::SShort(n(2).map(|o| self.u16_at(o).map(|v| v as i16)).collect::<Option<_>>()?),
            9 => ExifValue::SLong(n(4).map(|o| self.u32_at(o).map(|v| v as i32)).collect::<Option<_>>()?),
            10 => ExifValue::SRational(
                n(8).map(|o| {
                    Some(SRational {
                        num: self.u32_at(o)? as i32,
                        den: self.u32_at(o + 4)? as i32,
                    })
                })
                .collect::<Option<_>>()?,
            ),
            11 => ExifValue::Float(n(4).map(|o| self.u32_at(o).map(f32::from_bits)).collect::<Option<_>>()?),
            12 => ExifValue::Double(n(8).map(|o| self.u64_at(o).map(f64::from_bits)).collect::<Option<_>>()?),
            _ => ExifValue::Unknown(self.bytes(off, 4)?.to_vec()),
        })
    }
}

/// Decodes IFD0, the Exif sub-IFD and the GPS sub-IFD.
///
/// Out-of-bounds IFDs or value offsets do not fail the parse: the affected IFD
/// (or entry) is skipped and a warning is attached to the partial result.
pub fn parse_exif(app1_payload: &[u8]) -> Result<ExifData, MetaError> {
    let data = app1_payload
        .strip_prefix(EXIF_SIGNATURE)
        .ok_or(MetaError::BadTiffHeader)?;
    let order = match data.get(..2) {
        Some(b"II") => ByteOrder::Little,
        Some(b"MM") => ByteOrder::Big,
        _ => return Err(MetaError::BadTiffHeader),
    };
    let tiff = Tiff { data, order };
    if tiff.u16_at(2) != Some(42) {
        return Err(MetaError::BadTiffHeader);
    }
    let ifd0 = tiff.u32_at(4).ok_or(MetaError::BadTiffHeader)? as usize;

    let mut out = ExifData {
        byte_order: order,
        entries: Vec::new(),
        warnings: Vec::new(),
    };
    let mut visited = HashSet::new();
    let mut queue = vec![(Ifd::Ifd0, ifd0)];
    while let Some((ifd, offset)) = queue.pop() {
        if !visited.insert(offset) {
            out.warnings.push(MetaWarning::IfdLoop { offset });
            continue;
        }
        let Some(count) = tiff.u16_at(offset).map(usize::from) else {
            out.warnings.push(MetaWarning::IfdOffsetOutOfBounds { ifd, offset });
            continue;
        };
        for i in 0..count.min(MAX_IFD_ENTRIES) {
            let e = offset + 2 + i * 12;
            let (Some(tag), Some(type_code), Some(n)) = (tiff.u16_at(e), tiff.u16_at(e + 2), tiff.u32_at(e + 4))
            else {
                out.warnings.push(MetaWarning::IfdOffsetOutOfBounds { ifd, offset: e });
                break;
            };
            let n = n as usize;
            let size = type_size(type_code).and_then(|s| s.checked_mul(n));
            let value_off = match size {
                Some(s) if s <= 4 => Some(e + 8),
                Some(_) => tiff.u32_at(e + 8).map(|v| v as usize),
                None => Some(e + 8),
            };
            let value = value_off.and_then(|vo| tiff.decode(type_code, n, vo));
            let Some(value) = value else {
                out.warnings.push(MetaWarning::EntryOffsetOutOfBounds { ifd, tag });
                continue;
            };
            match (ifd, tag) {
                (Ifd::Ifd0, TAG_EXIF_IFD) | (Ifd::Ifd0, TAG_GPS_IFD) => {
                    let sub = if tag == TAG_EXIF_IFD { Ifd::Exif } else { Ifd::Gps };
                    match value.as_u32() {
                        Some(p) => queue.insert(0, (sub, p as usize)),
                        None => out.warnings.push(MetaWarning::EntryOffsetOutOfBounds { ifd, tag }),
                    }
                }
                _ => out.entries.push(ExifEntry {
                    tag_id: tag,
                    ifd,
                    type_code,
                    value,
                }),
            }
        }
    }
    Ok(out)
}

pub fn tag_name(ifd: Ifd, tag: u16) -> Option<&'static str> {
    if ifd == Ifd::Gps {
        return Some(match tag {
            0x0000 => "GPS Version ID",
            0x0001 => "GPS Latitude Ref",
            0x0002 => "GPS Latitude",
            0x0003 => "GPS Longitude Ref",
            0x0004 => "GPS Longitude",
            0x0005 => "GPS Altitude Ref",
            0x0006 => "GPS Altitude",
            0x0007 => "GPS Time Stamp",
            0x001D => "GPS Date Stamp",
            _ => return None,
        });
    }
    Some(match tag {
        0x010E => "Image Description",
        0x010F => "Make",
        0x0110 => "Camera Model Name",
        0x0112 => "Orientation",
        0x011A => "X Resolution",
        0x011B => "Y Resolution",
        0x0128 => "Resolution Unit",
        0x0131 => "Software",
        0x0132 => "Modify Date",
        0x013B => "Artist",
        0x0213 => "Y Cb Cr Positioning",
        0x8298 => "Copyright",
        0x829A => "Exposure Time",
        0x829D => "F Number",
        0x8822 => "Exposure Program",
        0x8827 => "ISO",
        0x9000 => "Exif Version",
        0x9003 => "Date/Time Original",
        0x9004 => "Create Date",
        0x9010 => "Offset Time",
        0x9011 => "Offset Time Original",
        0x9101 => "Components Configuration",
        0x9201 => "Shutter Speed Value",
        0x9202 => "Aperture Value",
        0x9204 => "Exposure Compensation",
        0x9207 => "Metering Mode",
        0x9209 => "Flash",
        0x920A => "Focal Length",
        0x927C => "Maker Note",
        0x9286 => "User Comment",
        0xA000 => "Flashpix Version",
        0xA001 => "Color Space",
        0xA002 => "Exif Image Width",
        0xA003 => "Exif Image Height",
        0xA005 => "Interop Offset",
        0xA402 => "Exposure Mode",
        0xA403 => "White Balance",
        0xA405 => "Focal Length In 35mm Format",
        0xA406 => "Scene Capture Type",
        0xA430 => "Owner Name",
        0xA431 => "Serial Number",
        0xA434 => "Lens Model",
        _ => return None,
    })
}

//! JPEG fixture builders. EXIF, IPTC and ICC payloads are written here byte by
//! byte, independently of the parsers under test.

use jpeg_encoder::{ColorType, Encoder, PixelDensity, SamplingFactor};
use printproof::RasterImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smooth gradients plus a little seeded noise.
pub fn textured(w: u32, h: u32, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<i32> = (0..w * h).map(|_| rng.gen_range(-6..=6)).collect();
    RasterImage::from_fn(w, h, |x, y| {
        let n = noise[(y * w + x) as usize];
        let r = 40 + (x * 170 / w.max(1)) as i32 + n;
        let g = 60 + (y * 150 / h.max(1)) as i32 - n;
        let b = 128 + (((x as f64 * 0.05).sin() + (y as f64 * 0.07).cos()) * 50.0) as i32 + n;
        [r.clamp(0, 255) as u8, g.clamp(0, 255) as u8, b.clamp(0, 255) as u8]
    })
    .unwrap()
}

#[derive(Clone, Debug, Default)]
pub struct JpegSpec {
    pub quality: u8,
    pub progressive: bool,
    /// 4:2:0 when true, 4:4:4 otherwise.
    pub subsample: bool,
    pub dpi: Option<u16>,
    pub exif: Option<Vec<u8>>,
    pub iptc: Option<Vec<u8>>,
    pub icc: Option<Vec<u8>>,
    pub comment: Option<Vec<u8>>,
}

pub fn encode(img: &RasterImage, spec: &JpegSpec) -> Vec<u8> {
    let mut out = Vec::new();
    let mut enc = Encoder::new(&mut out, spec.quality);
    enc.set_sampling_factor(if spec.subsample { SamplingFactor::R_4_2_0 } else { SamplingFactor::R_4_4_4 });
    enc.set_progressive(spec.progressive);
    if let Some(d) = spec.dpi {
        enc.set_density(PixelDensity::dpi(d));
    }
    if let Some(e) = &spec.exif {
        enc.add_app_segment(1, e.clone()).unwrap();
    }
    if let Some(i) = &spec.iptc {
        enc.add_app_segment(13, i.clone()).unwrap();
    }
    if let Some(p) = &spec.icc {
        enc.add_icc_profile(p).unwrap();
    }
    enc.encode(img.as_rgb_bytes(), img.width() as u16, img.height() as u16, ColorType::Rgb).unwrap();
    match &spec.comment {
        Some(c) => insert_before_first(&out, 0xDB, 0xFE, c),
        None => out,
    }
}

/// Inserts a marker segment in front of the first segment with marker `before`.
pub fn insert_before_first(jpeg: &[u8], before: u8, marker: u8, payload: &[u8]) -> Vec<u8> {
    let mut pos = 2;
    while pos + 4 <= jpeg.len() {
        assert_eq!(jpeg[pos], 0xFF);
        if jpeg[pos + 1] == before {
            break;
        }
        let len = u16::from_be_bytes([jpeg[pos + 2], jpeg[pos + 3]]) as usize;
        pos += 2 + len;
    }
    let mut out = jpeg[..pos].to_vec();
    out.extend_from_slice(&[0xFF, marker]);
    out.extend_from_slice(&((payload.len() + 2) as u16).to_be_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&jpeg[pos..]);
    out
}

/// One TIFF IFD entry: tag, type, count and the raw value bytes (big endian).
pub struct TiffEntry {
    pub tag: u16,
    pub typ: u16,
    pub count: u32,
    pub data: Vec<u8>,
}

pub fn ascii(tag: u16, s: &str) -> TiffEntry {
    let mut data = s.as_bytes().to_vec();
    data.push(0);
    TiffEntry { tag, typ: 2, count: data.len() as u32, data }
}

pub fn short(tag: u16, v: u16) -> TiffEntry {
    TiffEntry { tag, typ: 3, count: 1, data: v.to_be_bytes().to_vec() }
}

pub fn rational(tag: u16, n: u32, d: u32) -> TiffEntry {
    let mut data = n.to_be_bytes().to_vec();
    data.extend_from_slice(&d.to_be_bytes());
    TiffEntry { tag, typ: 5, count: 1, data }
}

/// Big-endian "MM" TIFF with IFD0 and an optional Exif sub-IFD, prefixed by the
/// APP1 Exif signature.
pub fn exif_app1(ifd0: Vec<TiffEntry>, exif_ifd: Vec<TiffEntry>) -> Vec<u8> {
    fn ifd_size(n: usize) -> usize {
        2 + 12 * n + 4
    }
    let mut ifd0 = ifd0;
    let has_sub = !exif_ifd.is_empty();
    if has_sub {
        ifd0.push(TiffEntry { tag: 0x8769, typ: 4, count: 1, data: vec![0; 4] });
    }
    ifd0.sort_by_key(|e| e.tag);
    let ifd0_at = 8usize;
    let sub_at = ifd0_at + ifd_size(ifd0.len());
    let data_at = sub_at + if has_sub { ifd_size(exif_ifd.len()) } else { 0 };

    let mut tiff = b"MM\0\x2a".to_vec();
    tiff.extend_from_slice(&(ifd0_at as u32).to_be_bytes());
    let mut heap: Vec<u8> = Vec::new();
    let mut write_ifd = |tiff: &mut Vec<u8>, entries: &[TiffEntry]| {
        tiff.extend_from_slice(&(entries.len() as u16).to_be_bytes());
        for e in entries {
            tiff.extend_from_slice(&e.tag.to_be_bytes());
            tiff.extend_from_slice(&e.typ.to_be_bytes());
            tiff.extend_from_slice(&e.count.to_be_bytes());
            if e.tag == 0x8769 {
                tiff.extend_from_slice(&(sub_at as u32).to_be_bytes());
            } else if e.data.len() <= 4 {
                let mut v = e.data.clone();
                v.resize(4, 0);
                tiff.extend_from_slice(&v);
            } else {
                let off = data_at + heap.len();
                tiff.extend_from_slice(&(off as u32).to_be_bytes());
                heap.extend_from_slice(&e.data);
                if heap.len() % 2 == 1 {
                    heap.push(0);
                }
            }
        }
        tiff.extend_from_slice(&0u32.to_be_bytes());
    };
    write_ifd(&mut tiff, &ifd0);
    if has_sub {
        write_ifd(&mut tiff, &exif_ifd);
    }
    assert_eq!(tiff.len(), data_at);
    tiff.extend_from_slice(&heap);
    let mut out = b"Exif\0\0".to_vec();
    out.extend_from_slice(&tiff);
    out
}

/// APP13 payload: Photoshop 3.0 header, one 8BIM 0x0404 resource holding IIM
/// datasets.
pub fn iptc_app13(records: &[(u8, u8, &[u8])]) -> Vec<u8> {
    let mut iim = Vec::new();
    for (rec, ds, data) in records {
        iim.extend_from_slice(&[0x1C, *rec, *ds]);
        iim.extend_from_slice(&(data.len() as u16).to_be_bytes());
        iim.extend_from_slice(data);
    }
    let mut out = b"Photoshop 3.0\0".to_vec();
    out.extend_from_slice(b"8BIM");
    out.extend_from_slice(&0x0404u16.to_be_bytes());
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&(iim.len() as u32).to_be_bytes());
    out.extend_from_slice(&iim);
    if iim.len() % 2 == 1 {
        out.push(0);
    }
    out
}

fn s15f16(v: f64) -> [u8; 4] {
    ((v * 65536.0).round() as i32).to_be_bytes()
}

/// Display-class RGB profile with `desc`, `cprt` and `wtpt` tags.
pub fn icc_profile(description: &str, copyright: &str, white: [f64; 3]) -> Vec<u8> {
    let mut desc = b"desc\0\0\0\0".to_vec();
    desc.extend_from_slice(&((description.len() + 1) as u32).to_be_bytes());
    desc.extend_from_slice(description.as_bytes());
    desc.push(0);
    desc.resize(desc.len() + 12 + 67, 0);
    let mut cprt = b"text\0\0\0\0".to_vec();
    cprt.extend_from_slice(copyright.as_bytes());
    cprt.push(0);
    let mut wtpt = b"XYZ \0\0\0\0".to_vec();
    for v in white {
        wtpt.extend_from_slice(&s15f16(v));
    }
    let tags: [(&[u8; 4], Vec<u8>); 3] = [(b"desc", desc), (b"cprt", cprt), (b"wtpt", wtpt)];

    let table_len = 4 + 12 * tags.len();
    let mut body = Vec::new();
    let mut table = (tags.len() as u32).to_be_bytes().to_vec();
    for (sig, data) in &tags {
        while body.len() % 4 != 0 {
            body.push(0);
        }
        let off = 128 + table_len + body.len();
        table.extend_from_slice(*sig);
        table.extend_from_slice(&(off as u32).to_be_bytes());
        table.extend_from_slice(&(data.len() as u32).to_be_bytes());
        body.extend_from_slice(data);
    }
    let size = 128 + table_len + body.len();
    let mut h = vec![0u8; 128];
    h[0..4].copy_from_slice(&(size as u32).to_be_bytes());
    h[4..8].copy_from_slice(b"ADBE");
    h[8] = 2;
    h[9] = 0x10;
    h[12..16].copy_from_slice(b"mntr");
    h[16..20].copy_from_slice(b"RGB ");
    h[20..24].copy_from_slice(b"XYZ ");
    for (i, v) in [1999u16, 6, 3, 0, 0, 0].iter().enumerate() {
        h[24 + 2 * i..26 + 2 * i].copy_from_slice(&v.to_be_bytes());
    }
    h[36..40].copy_from_slice(b"acsp");
    h[40..44].copy_from_slice(b"APPL");
    h[48..52].copy_from_slice(b"none");
    for (i, v) in [0.9642, 1.0, 0.82491].iter().enumerate() {
        h[68 + 4 * i..72 + 4 * i].copy_from_slice(&s15f16(*v));
    }
    h[80..84].copy_from_slice(b"ADBE");
    let mut out = h;
    out.extend_from_slice(&table);
    out.extend_from_slice(&body);
    out
}

pub const DATE_CREATED: &str = "2011:02:17";
pub const ORIGINATING_PROGRAM: &str = "Example Editor CS4 Macintosh";

/// Rewrites the JFIF APP0 version (the encoder writes 1.02).
pub fn set_jfif_version(mut jpeg: Vec<u8>, major: u8, minor: u8) -> Vec<u8> {
    assert_eq!(&jpeg[6..11], b"JFIF\0");
    jpeg[11] = major;
    jpeg[12] = minor;
    jpeg
}

/// 634x821 baseline 4:2:0 file with JFIF 166 dpi, EXIF and IPTC.
pub fn portrait_fixture() -> Vec<u8> {
    let img = textured(634, 821, 11);
    let jpeg = encode(
        &img,
        &JpegSpec {
            quality: 80,
            subsample: true,
            dpi: Some(166),
            exif: Some(exif_app1(
                vec![ascii(0x010F, "Canon"), ascii(0x0110, "Canon EOS-1D Mark IV"), rational(0x011A, 166, 1), rational(0x011B, 166, 1), short(0x0128, 2)],
                vec![rational(0x829A, 1, 125), ascii(0x9003, "2011:02:17 13:04:27")],
            )),
            iptc: Some(iptc_app13(&[
                (2, 0, &[0, 4]),
                (2, 55, DATE_CREATED.replace(':', "").as_bytes()),
                (2, 60, b"130427+0000"),
                (2, 65, ORIGINATING_PROGRAM.as_bytes()),
                (2, 101, b"Australia"),
            ])),
            ..Default::default()
        },
    );
    set_jfif_version(jpeg, 1, 1)
}

/// 634x423 progressive 4:2:0 file with an embedded ICC profile and a comment.
pub fn landscape_fixture() -> Vec<u8> {
    let img = textured(634, 423, 12);
    let jpeg = encode(
        &img,
        &JpegSpec {
            quality: 70,
            progressive: true,
            subsample: true,
            dpi: Some(300),
            icc: Some(icc_profile("Adobe RGB (1998)", "Copyright 1999 Adobe Systems Incorporated", [0.95045, 1.0, 1.08905])),
            comment: Some(b"re-encoded fixture".to_vec()),
            ..Default::default()
        },
    );
    set_jfif_version(jpeg, 1, 1)
}

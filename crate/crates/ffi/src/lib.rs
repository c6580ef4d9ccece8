//! C ABI over the printproof library.
//!
//! Every entry point returns a [`PpStatus`]. On failure a message is kept per
//! thread and read with [`pp_last_error`]. Images and maps are opaque handles
//! released with their `_free` functions; byte results come back in a
//! [`PpBuffer`] released with [`pp_buffer_free`]. Panics never cross the
//! boundary: they are caught and reported as `PP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use printproof::filters::{ela_map, lga_map, noise_map, pca_basis, pca_map, ElaParams, FilterError, LgaParams, NoiseParams, PcaMode};
use printproof::metrology::{run_metrology, AnnotationSet, MetrologyOptions};
use printproof::{load_image, AnalysisMap, Channel, CoreError, RasterImage};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullArgument = 1,
    UnsupportedFormat = 2,
    CorruptStream = 3,
    InvalidDimensions = 4,
    InvalidParam = 5,
    ImageTooSmall = 6,
    EncodeFailure = 7,
    NotAJpeg = 8,
    MalformedMetadata = 9,
    BadAnnotations = 10,
    InvalidAnnotations = 11,
    HashMismatch = 12,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpPcaMode {
    Projection = 0,
    Distance = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpChannel {
    Red = 0,
    Green = 1,
    Blue = 2,
    Luminance = 3,
}

/// Bytes owned by the library. Release with `pp_buffer_free`.
#[repr(C)]
#[derive(Debug)]
pub struct PpBuffer {
    pub data: *mut u8,
    pub len: usize,
}

impl PpBuffer {
    fn from_vec(v: Vec<u8>) -> Self {
        let mut b = v.into_boxed_slice();
        let out = PpBuffer { data: b.as_mut_ptr(), len: b.len() };
        std::mem::forget(b);
        out
    }
}

/// A decoded image plus the bytes it came from.
pub struct PpImage {
    bytes: Vec<u8>,
    raster: RasterImage,
}

/// A computed analysis map.
pub struct PpMap {
    map: AnalysisMap,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PpStatus, String);

type FfiResult<T> = Result<T, Failure>;

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let status = match e {
            CoreError::UnsupportedFormat => PpStatus::UnsupportedFormat,
            CoreError::CorruptStream(_) => PpStatus::CorruptStream,
            CoreError::InvalidDimensions { .. } => PpStatus::InvalidDimensions,
            CoreError::InvalidPercentile(_) => PpStatus::InvalidParam,
        };
        Failure(status, e.to_string())
    }
}

impl From<FilterError> for Failure {
    fn from(e: FilterError) -> Self {
        let status = match e {
            FilterError::InvalidParam { .. } => PpStatus::InvalidParam,
            FilterError::ImageTooSmall { .. } => PpStatus::ImageTooSmall,
            FilterError::EncodeFailure(_) => PpStatus::EncodeFailure,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> PpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            PpStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PpStatus::NullArgument, format!("{what} is NULL"))
}

unsafe fn slice<'a>(data: *const u8, len: usize, what: &str) -> FfiResult<&'a [u8]> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn image<'a>(img: *const PpImage) -> FfiResult<&'a PpImage> {
    img.as_ref().ok_or_else(|| null("image"))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_map(out: *mut *mut PpMap, map: AnalysisMap) -> FfiResult<()> {
    put(out, Box::into_raw(Box::new(PpMap { map })), "out")
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn pp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Decodes a JPEG or PNG held in `data[0..len]`.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_image_load(data: *const u8, len: usize, out: *mut *mut PpImage) -> PpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let bytes = slice(data, len, "data")?.to_vec();
        let raster = load_image(&bytes)?;
        put(out, Box::into_raw(Box::new(PpImage { bytes, raster })), "out")
    })
}

/// # Safety
/// `img` must come from `pp_image_load` and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn pp_image_free(img: *mut PpImage) {
    if !img.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(img))));
    }
}

/// # Safety
/// `img` must be a live handle; `width` and `height` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_image_size(img: *const PpImage, width: *mut u32, height: *mut u32) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        put(width, i.raster.width(), "width")?;
        put(height, i.raster.height(), "height")
    })
}

/// Lowercase hex SHA-256 of the source bytes (64 bytes, no NUL).
///
/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_image_hash(img: *const PpImage, out: *mut PpBuffer) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        put(out, PpBuffer::from_vec(i.raster.source_hash().to_hex().into_bytes()), "out")
    })
}

/// Canonical metadata JSON for JPEG sources.
///
/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_meta_json(img: *const PpImage, out: *mut PpBuffer) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = printproof::metadata::summarize(&i.bytes).map_err(|e| {
            let status = match e {
                printproof::metadata::MetaError::NotAJpeg => PpStatus::NotAJpeg,
                _ => PpStatus::MalformedMetadata,
            };
            Failure(status, e.to_string())
        })?;
        let json = printproof::canonical::to_canonical_bytes(&s.to_json()).expect("serializable");
        put(out, PpBuffer::from_vec(json), "out")
    })
}

/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_ela(img: *const PpImage, quality: u8, scale: u8, contrast: u8, out: *mut *mut PpMap) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        put_map(out, ela_map(&i.raster, &ElaParams { quality, scale, contrast })?)
    })
}

/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_pca(img: *const PpImage, component: u8, mode: PpPcaMode, out: *mut *mut PpMap) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        let mode = match mode {
            PpPcaMode::Projection => PcaMode::Projection,
            PpPcaMode::Distance => PcaMode::Distance,
        };
        put_map(out, pca_map(&i.raster, &pca_basis(&i.raster), component, mode)?)
    })
}

/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_lga(
    img: *const PpImage,
    intensity: u8,
    channel: PpChannel,
    normalized: bool,
    out: *mut *mut PpMap,
) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        let channel = match channel {
            PpChannel::Red => Channel::Red,
            PpChannel::Green => Channel::Green,
            PpChannel::Blue => Channel::Blue,
            PpChannel::Luminance => Channel::Luminance,
        };
        put_map(out, lga_map(&i.raster, &LgaParams { intensity, channel, normalized })?)
    })
}

/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_noise(img: *const PpImage, radius: u32, gain: f64, out: *mut *mut PpMap) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        put_map(out, noise_map(&i.raster, &NoiseParams { radius, gain })?)
    })
}

/// Width, height and channel count (1 or 3) of a map.
///
/// # Safety
/// `map` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_map_shape(map: *const PpMap, width: *mut u32, height: *mut u32, channels: *mut u32) -> PpStatus {
    guard(|| {
        let m = &map.as_ref().ok_or_else(|| null("map"))?.map;
        put(width, m.width, "width")?;
        put(height, m.height, "height")?;
        put(channels, m.channels as u32, "channels")
    })
}

/// Borrowed view of the row-major, channel-interleaved values in [0,1].
/// Valid while the map is alive.
///
/// # Safety
/// `map` must be a live handle; `values` and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_map_values(map: *const PpMap, values: *mut *const f64, len: *mut usize) -> PpStatus {
    guard(|| {
        let m = &map.as_ref().ok_or_else(|| null("map"))?.map;
        put(values, m.values.as_ptr(), "values")?;
        put(len, m.values.len(), "len")
    })
}

/// PNG encoding with the parameters embedded as text.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_map_png(map: *const PpMap, out: *mut PpBuffer) -> PpStatus {
    guard(|| {
        let m = &map.as_ref().ok_or_else(|| null("map"))?.map;
        put(out, PpBuffer::from_vec(m.to_png()), "out")
    })
}

/// # Safety
/// `map` must come from a filter call and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn pp_map_free(map: *mut PpMap) {
    if !map.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(map))));
    }
}

/// Runs the metrology pipeline on an annotation document (UTF-8 JSON) and
/// returns the canonical result JSON.
///
/// # Safety
/// `img` must be a live handle; `annotations` must point to `len` readable
/// bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_metrology_json(
    img: *const PpImage,
    annotations: *const u8,
    len: usize,
    seed: u64,
    perturbation_px: f64,
    tilt_tau: f64,
    out: *mut PpBuffer,
) -> PpStatus {
    guard(|| {
        let i = image(img)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(perturbation_px >= 0.0 && perturbation_px.is_finite()) {
            return Err(Failure(PpStatus::InvalidParam, "perturbation_px must be a finite number >= 0".into()));
        }
        if !(tilt_tau > 0.0 && tilt_tau < 1.0) {
            return Err(Failure(PpStatus::InvalidParam, "tilt_tau must lie in (0, 1)".into()));
        }
        let ann = AnnotationSet::from_json(slice(annotations, len, "annotations")?)
            .map_err(|e| Failure(PpStatus::BadAnnotations, e.to_string()))?;
        if ann.image_hash != *i.raster.source_hash() {
            return Err(Failure(
                PpStatus::HashMismatch,
                format!("annotations reference image {}, not {}", ann.image_hash, i.raster.source_hash()),
            ));
        }
        let opts = MetrologyOptions { seed, perturbation_px, tilt_tau };
        let r = run_metrology(&ann, (i.raster.width(), i.raster.height()), &opts).map_err(|v| {
            let msg = v.iter().map(|v| format!("{}: {}", v.field, v.message)).collect::<Vec<_>>().join("; ");
            Failure(PpStatus::InvalidAnnotations, msg)
        })?;
        let json = printproof::canonical::to_canonical_bytes(&r.to_json()).expect("serializable");
        put(out, PpBuffer::from_vec(json), "out")
    })
}

/// Releases a buffer returned by the library. Empty buffers are ignored.
///
/// # Safety
/// `buf` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pp_buffer_free(buf: PpBuffer) {
    if !buf.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(buf.data, buf.len)));
    }
}

/// Short name of a status code, e.g. "INVALID_PARAM". Static string.
#[no_mangle]
pub extern "C" fn pp_status_name(status: PpStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PpStatus::Ok => c"OK",
        PpStatus::NullArgument => c"NULL_ARGUMENT",
        PpStatus::UnsupportedFormat => c"UNSUPPORTED_FORMAT",
        PpStatus::CorruptStream => c"CORRUPT_STREAM",
        PpStatus::InvalidDimensions => c"INVALID_DIMENSIONS",
        PpStatus::InvalidParam => c"INVALID_PARAM",
        PpStatus::ImageTooSmall => c"IMAGE_TOO_SMALL",
        PpStatus::EncodeFailure => c"ENCODE_FAILURE",
        PpStatus::NotAJpeg => c"NOT_A_JPEG",
        PpStatus::MalformedMetadata => c"MALFORMED_METADATA",
        PpStatus::BadAnnotations => c"BAD_ANNOTATIONS",
        PpStatus::InvalidAnnotations => c"INVALID_ANNOTATIONS",
        PpStatus::HashMismatch => c"HASH_MISMATCH",
        PpStatus::Panic => c"PANIC",
    };
    s.as_ptr()
}

//! C ABI over the thermal-face pipeline.
//!
//! Every fallible call returns a [`TfStatus`]; on failure the message is
//! available from [`tf_last_error_message`] on the same thread. Series and
//! galleries are opaque handles that must be released with their `_free`
//! function. The header is generated into `include/thermal_face.h` at build
//! time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use thermal_face::classify::{build_mean_reference, sim, ClassifierKind, Enrolled};
use thermal_face::eval::{read_gallery, run_pipeline, write_gallery, PipelineConfig};
use thermal_face::segmentation::Connectivity;
use thermal_face::wavelet::haar_full_1d;
use thermal_face::{Config, Error, FeatureSeries, GalleryModel, Level};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotFound = 3,
    Io = 4,
    MalformedInput = 5,
    UnsupportedDepth = 6,
    NoForeground = 7,
    Segmentation = 8,
    Dimensions = 9,
    LengthMismatch = 10,
    EmptyGallery = 11,
    Dataset = 12,
    BufferTooSmall = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfClassifier {
    Nearest = 0,
    MeanReference = 1,
}

/// Pipeline settings. `crop_size` 0 keeps the padded crop unresampled.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TfConfig {
    /// 4 or 8
    pub connectivity: u8,
    pub crop_size: usize,
    /// 0 = original, 1 = LL1, 2 = LL2
    pub level: u8,
    pub quantize: bool,
}

/// Opaque feature series.
pub struct TfSeries(FeatureSeries);

/// Opaque enrolled gallery.
pub struct TfGallery(GalleryModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> TfStatus {
    match err.root() {
        Error::NotFound(_) | Error::MissingImage(_) => TfStatus::NotFound,
        Error::Io { .. } => TfStatus::Io,
        Error::MalformedFile(_)
        | Error::MalformedGallery(_)
        | Error::MalformedManifest(_)
        | Error::MalformedPyramid(_) => TfStatus::MalformedInput,
        Error::UnsupportedDepth(_) => TfStatus::UnsupportedDepth,
        Error::NoForeground => TfStatus::NoForeground,
        Error::InvalidEllipse(_) | Error::OutOfBounds(_) => TfStatus::Segmentation,
        Error::EmptyImage
        | Error::InvalidDimensions(_)
        | Error::OddLength(_)
        | Error::NotPowerOfTwo(_)
        | Error::OddDimension { .. }
        | Error::InsufficientDivisibility { .. } => TfStatus::Dimensions,
        Error::LengthMismatch(_) | Error::InconsistentSeriesLength { .. } => {
            TfStatus::LengthMismatch
        }
        Error::EmptyGallery => TfStatus::EmptyGallery,
        Error::SubjectTooSmall { .. } => TfStatus::Dataset,
        Error::InvalidConfig(_) => TfStatus::InvalidArgument,
        Error::Stage { .. } | Error::AtPath { .. } => unreachable!("root strips wrappers"),
    }
}

struct Failure(TfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail(status: TfStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Run `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside thermal-face".into());
            TfStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    Ok(PathBuf::from(str_arg(p)?))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(TfStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TfStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(TfStatus::NullPointer, format!("null {what}")))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(TfStatus::NullPointer, "null output pointer"))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(TfStatus::NullPointer, "null buffer"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn pipeline_of(cfg: &TfConfig) -> Result<(Level, PipelineConfig), Failure> {
    let core = Config {
        connectivity: Connectivity::from_neighbours(cfg.connectivity)?,
        crop_size: cfg.crop_size,
        level: Level::new(cfg.level),
        classifier: None,
        quantize: cfg.quantize,
        debug_dir: None,
    };
    core.validate()?;
    Ok((core.level, core.pipeline()))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn tf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// 8-connectivity, 128x128 crops, LL2, quantized.
#[no_mangle]
pub extern "C" fn tf_config_default() -> TfConfig {
    TfConfig {
        connectivity: 8,
        crop_size: 128,
        level: 2,
        quantize: true,
    }
}

/// Run the whole pipeline on one image file.
///
/// # Safety
/// `path` must be a NUL-terminated string, `cfg` NULL or a valid config,
/// and `out` a valid pointer to write the new handle to.
#[no_mangle]
pub unsafe extern "C" fn tf_series_extract(
    path: *const c_char,
    cfg: *const TfConfig,
    out: *mut *mut TfSeries,
) -> TfStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let path = path_arg(path)?;
        let cfg = cfg.as_ref().copied().unwrap_or_else(|| tf_config_default());
        let (level, pipeline) = pipeline_of(&cfg)?;
        let series = run_pipeline(&path, level, &pipeline)?;
        *out = Box::into_raw(Box::new(TfSeries(series)));
        Ok(())
    })
}

/// Wrap caller-provided values as a series at `level`.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tf_series_from_values(
    values: *const f64,
    len: usize,
    level: u8,
    out: *mut *mut TfSeries,
) -> TfStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let values = slice_arg(values, len)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(fail(
                TfStatus::InvalidArgument,
                "series values must be finite",
            ));
        }
        *out = Box::into_raw(Box::new(TfSeries(FeatureSeries::new(
            values.to_vec(),
            Level::new(level),
        ))));
        Ok(())
    })
}

/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_series_len(series: *const TfSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_series_level(series: *const TfSeries) -> u8 {
    series.as_ref().map_or(0, |s| s.0.level().depth())
}

/// Copy the values into `buf`, which must hold at least
/// `tf_series_len(series)` doubles.
///
/// # Safety
/// `series` must be a live handle and `buf` writable for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn tf_series_copy(
    series: *const TfSeries,
    buf: *mut f64,
    cap: usize,
) -> TfStatus {
    guard(|| {
        let s = ref_arg(series, "series")?;
        let values = s.0.values();
        if cap < values.len() {
            return Err(fail(
                TfStatus::BufferTooSmall,
                format!("need {} values, buffer holds {cap}", values.len()),
            ));
        }
        if values.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            return Err(fail(TfStatus::NullPointer, "null buffer"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// # Safety
/// `series` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_series_free(series: *mut TfSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// L1 distance between two series of equal length.
///
/// # Safety
/// `a` and `b` must be live handles and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tf_sim(a: *const TfSeries, b: *const TfSeries, out: *mut f64) -> TfStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = sim(&ref_arg(a, "series")?.0, &ref_arg(b, "series")?.0)?;
        Ok(())
    })
}

/// Build a gallery from `n` subject ids and series. The series handles are
/// only read; the caller still owns them.
///
/// # Safety
/// `subjects` and `series` must each point to `n` valid entries.
#[no_mangle]
pub unsafe extern "C" fn tf_gallery_build(
    subjects: *const *const c_char,
    series: *const *const TfSeries,
    n: usize,
    out: *mut *mut TfGallery,
) -> TfStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        if n > 0 && (subjects.is_null() || series.is_null()) {
            return Err(fail(TfStatus::NullPointer, "null gallery arrays"));
        }
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let id = str_arg(*subjects.add(i))?;
            let s = ref_arg(*series.add(i), "series")?;
            entries.push(Enrolled::new(id, s.0.clone()));
        }
        *out = Box::into_raw(Box::new(TfGallery(build_mean_reference(entries)?)));
        Ok(())
    })
}

/// Read a gallery file written by `enroll`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tf_gallery_load(
    path: *const c_char,
    out: *mut *mut TfGallery,
) -> TfStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let model = read_gallery(&path_arg(path)?)?;
        *out = Box::into_raw(Box::new(TfGallery(model)));
        Ok(())
    })
}

/// # Safety
/// `gallery` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tf_gallery_save(
    gallery: *const TfGallery,
    path: *const c_char,
) -> TfStatus {
    guard(|| {
        let g = ref_arg(gallery, "gallery")?;
        write_gallery(&path_arg(path)?, &g.0)?;
        Ok(())
    })
}

/// Number of enrolled series.
///
/// # Safety
/// `gallery` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_gallery_len(gallery: *const TfGallery) -> usize {
    gallery.as_ref().map_or(0, |g| g.0.len())
}

/// Identify `probe`; `classifier` is a [`TfClassifier`] value. The
/// predicted subject id is written NUL-terminated into `subject` (capacity
/// `cap` bytes, including the NUL) and the winning score into `score`;
/// either output may be NULL.
///
/// # Safety
/// `gallery` and `probe` must be live handles; non-NULL outputs must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tf_gallery_identify(
    gallery: *const TfGallery,
    probe: *const TfSeries,
    classifier: u32,
    subject: *mut c_char,
    cap: usize,
    score: *mut f64,
) -> TfStatus {
    guard(|| {
        let g = ref_arg(gallery, "gallery")?;
        let p = ref_arg(probe, "probe")?;
        let kind = match classifier {
            c if c == TfClassifier::Nearest as u32 => ClassifierKind::Nearest,
            c if c == TfClassifier::MeanReference as u32 => ClassifierKind::MeanReference,
            other => {
                return Err(fail(
                    TfStatus::InvalidArgument,
                    format!("unknown classifier {other}"),
                ))
            }
        };
        let result = kind.classify(&p.0, "probe", &g.0)?;
        if !subject.is_null() {
            let id = result.predicted.as_bytes();
            if cap < id.len() + 1 {
                return Err(fail(
                    TfStatus::BufferTooSmall,
                    format!("subject id needs {} bytes", id.len() + 1),
                ));
            }
            ptr::copy_nonoverlapping(id.as_ptr().cast(), subject, id.len());
            *subject.add(id.len()) = 0;
        }
        if let Some(score) = score.as_mut() {
            *score = result.best_score();
        }
        Ok(())
    })
}

/// # Safety
/// `gallery` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_gallery_free(gallery: *mut TfGallery) {
    if !gallery.is_null() {
        drop(Box::from_raw(gallery));
    }
}

/// Full 1D Haar decomposition of `len` values (a power of two) into `out`.
///
/// # Safety
/// `input` must be readable and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tf_haar_full_1d(input: *const f64, len: usize, out: *mut f64) -> TfStatus {
    guard(|| {
        let coeffs = haar_full_1d(slice_arg(input, len)?)?;
        if out.is_null() {
            return Err(fail(TfStatus::NullPointer, "null output buffer"));
        }
        ptr::copy_nonoverlapping(coeffs.as_ptr(), out, coeffs.len());
        Ok(())
    })
}

//! C ABI over `partial-knn`.
//!
//! Datasets and classifiers are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`PlStatus`]; on failure
//! [`pl_last_error_message`] describes the error for the calling thread.
//! Panics never cross the boundary and surface as `PL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use partial_knn::distribution::BagGenMatrix;
use partial_knn::plaknn::{decide_batch, threshold};
use partial_knn::theory::is_reconstructible;
use partial_knn::{Bag, Error, LabelSpace, Mode, NeighborIndex, PartialDataset, PartialExample, PlaknnConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    IoError = 4,
    DimensionMismatch = 5,
    Panic = 6,
}

/// Classifier parameters. `d0 = 0` means unset; uniform mode requires it.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlConfig {
    pub c1: f64,
    pub delta: f64,
    pub max_iter: usize,
    /// 0 pointwise, 1 uniform.
    pub uniform: i32,
    pub d0: usize,
}

pub struct PlDataset {
    inner: PartialDataset,
}

pub struct PlClassifier {
    train: PartialDataset,
    index: NeighborIndex,
    config: PlaknnConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> PlStatus {
    match err {
        Error::Parse { .. } | Error::Csv(_) => PlStatus::ParseError,
        Error::Io(_) => PlStatus::IoError,
        Error::DimensionMismatch { .. } => PlStatus::DimensionMismatch,
        _ => PlStatus::InvalidArgument,
    }
}

#[derive(Debug)]
struct Failure(PlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PlStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PlStatus::Panic
        }
    }
}

impl PlConfig {
    fn to_core(self) -> Result<PlaknnConfig, Failure> {
        let mode = match self.uniform {
            0 => Mode::Pointwise,
            1 => Mode::Uniform,
            other => return Err(Failure(PlStatus::InvalidArgument, format!("uniform must be 0 or 1, got {other}"))),
        };
        let cfg = PlaknnConfig {
            c1: self.c1,
            delta: self.delta,
            max_iter: self.max_iter,
            mode,
            d0: (self.d0 > 0).then_some(self.d0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Fills `out` with c1 = 0.5, delta = 0.1, max_iter = 400, pointwise.
///
/// # Safety
/// `out` must be null or point to writable memory for one `PlConfig`.
#[no_mangle]
pub unsafe extern "C" fn pl_config_default(out: *mut PlConfig) -> PlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let d = PlaknnConfig::default();
        *out = PlConfig { c1: d.c1, delta: d.delta, max_iter: d.max_iter, uniform: 0, d0: 0 };
        Ok(())
    })
}

/// Reads a CSV with header `x1..xd,bag[,y]`. `num_labels = 0` infers the
/// label count from the largest label seen.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pl_dataset_from_csv(path: *const c_char, num_labels: usize, out: *mut *mut PlDataset) -> PlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        if path.is_null() {
            return Err(null("path"));
        }
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| Failure(PlStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let space = (num_labels > 0).then(|| LabelSpace::new(num_labels)).transpose()?;
        let inner = PartialDataset::from_csv_path(path, space)?;
        *out = Box::into_raw(Box::new(PlDataset { inner }));
        Ok(())
    })
}

/// Builds a dataset from `n` row-major feature vectors of length `dim` and
/// one bag bitmask per row (bit `y - 1` set when label `y` is a candidate).
///
/// # Safety
/// `features` must hold `n * dim` doubles and `bag_masks` `n` values.
#[no_mangle]
pub unsafe extern "C" fn pl_dataset_new(
    features: *const f64,
    n: usize,
    dim: usize,
    bag_masks: *const u64,
    num_labels: usize,
    out: *mut *mut PlDataset,
) -> PlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        if features.is_null() || bag_masks.is_null() {
            return Err(null("features or bag_masks"));
        }
        if n == 0 || dim == 0 {
            return Err(Failure(PlStatus::InvalidArgument, "n and dim must be positive".into()));
        }
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Failure(PlStatus::InvalidArgument, "n * dim overflows".into()))?;
        let xs = unsafe { std::slice::from_raw_parts(features, len) };
        let masks = unsafe { std::slice::from_raw_parts(bag_masks, n) };
        let space = LabelSpace::new(num_labels)?;
        let examples = xs
            .chunks_exact(dim)
            .zip(masks)
            .map(|(x, &m)| Ok(PartialExample { x: x.to_vec(), bag: Bag::from_mask(m, space)?, truth: None }))
            .collect::<Result<Vec<_>, Error>>()?;
        let inner = PartialDataset::new(examples, space)?;
        *out = Box::into_raw(Box::new(PlDataset { inner }));
        Ok(())
    })
}

/// Number of examples; 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_dataset_len(dataset: *const PlDataset) -> usize {
    unsafe { dataset.as_ref() }.map_or(0, |d| d.inner.len())
}

/// Feature dimension; 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_dataset_dim(dataset: *const PlDataset) -> usize {
    unsafe { dataset.as_ref() }.map_or(0, |d| d.inner.dim())
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_dataset_free(dataset: *mut PlDataset) {
    if !dataset.is_null() {
        drop(unsafe { Box::from_raw(dataset) });
    }
}

/// Copies the training set and builds its neighbor index. `config` may be
/// null for the defaults.
///
/// # Safety
/// `train` must be a live handle, `config` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_classifier_new(
    train: *const PlDataset,
    config: *const PlConfig,
    out: *mut *mut PlClassifier,
) -> PlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let train = unsafe { train.as_ref() }.ok_or_else(|| null("train"))?;
        let config = match unsafe { config.as_ref() } {
            Some(c) => c.to_core()?,
            None => PlaknnConfig::default(),
        };
        let index = NeighborIndex::build(&train.inner.features())?;
        *out = Box::into_raw(Box::new(PlClassifier { train: train.inner.clone(), index, config }));
        Ok(())
    })
}

/// Predicts one label (1-based). `iterations` may be null; otherwise it
/// receives the number of neighbors examined.
///
/// # Safety
/// `x` must hold `dim` doubles; `label` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_classifier_predict(
    classifier: *const PlClassifier,
    x: *const f64,
    dim: usize,
    label: *mut usize,
    iterations: *mut usize,
) -> PlStatus {
    guard(|| {
        let cls = unsafe { classifier.as_ref() }.ok_or_else(|| null("classifier"))?;
        let label = unsafe { label.as_mut() }.ok_or_else(|| null("label"))?;
        if x.is_null() {
            return Err(null("x"));
        }
        let query = unsafe { std::slice::from_raw_parts(x, dim) }.to_vec();
        let d = decide_batch(&cls.train, &cls.index, &[query], &cls.config)?;
        *label = d[0].label;
        if let Some(it) = unsafe { iterations.as_mut() } {
            *it = d[0].iterations;
        }
        Ok(())
    })
}

/// Predicts `n` row-major queries into `labels`.
///
/// # Safety
/// `xs` must hold `n * dim` doubles and `labels` room for `n` values.
#[no_mangle]
pub unsafe extern "C" fn pl_classifier_predict_batch(
    classifier: *const PlClassifier,
    xs: *const f64,
    n: usize,
    dim: usize,
    labels: *mut usize,
) -> PlStatus {
    guard(|| {
        let cls = unsafe { classifier.as_ref() }.ok_or_else(|| null("classifier"))?;
        if n == 0 {
            return Ok(());
        }
        if xs.is_null() || labels.is_null() {
            return Err(null("xs or labels"));
        }
        if dim == 0 {
            return Err(Failure(PlStatus::InvalidArgument, "dim must be positive".into()));
        }
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Failure(PlStatus::InvalidArgument, "n * dim overflows".into()))?;
        let flat = unsafe { std::slice::from_raw_parts(xs, len) };
        let queries: Vec<Vec<f64>> = flat.chunks_exact(dim).map(<[f64]>::to_vec).collect();
        let decided = decide_batch(&cls.train, &cls.index, &queries, &cls.config)?;
        let out = unsafe { std::slice::from_raw_parts_mut(labels, n) };
        for (o, d) in out.iter_mut().zip(decided) {
            *o = d.label;
        }
        Ok(())
    })
}

/// # Safety
/// `classifier` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_classifier_free(classifier: *mut PlClassifier) {
    if !classifier.is_null() {
        drop(unsafe { Box::from_raw(classifier) });
    }
}

/// Elimination threshold for `n` training points at neighborhood size `k`.
///
/// # Safety
/// `config` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_threshold(
    n: usize,
    k: usize,
    delta: f64,
    num_labels: usize,
    config: *const PlConfig,
    out: *mut f64,
) -> PlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let config = match unsafe { config.as_ref() } {
            Some(c) => c.to_core()?,
            None => PlaknnConfig::default(),
        };
        *out = threshold(n, k, delta, num_labels, &config)?;
        Ok(())
    })
}

/// Column-rank test on a bag-generation matrix given row-major with
/// `2^num_labels - 1` rows in ascending bag-mask order.
///
/// # Safety
/// `entries` must hold `(2^num_labels - 1) * num_labels` doubles.
#[no_mangle]
pub unsafe extern "C" fn pl_is_reconstructible(
    entries: *const f64,
    num_labels: usize,
    tol: f64,
    out: *mut bool,
) -> PlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        if entries.is_null() {
            return Err(null("entries"));
        }
        let space = LabelSpace::new(num_labels)?;
        if num_labels > partial_knn::distribution::MAX_MATERIALIZED_LABELS {
            return Err(Failure(PlStatus::InvalidArgument, format!("at most 12 labels, got {num_labels}")));
        }
        let len = space.num_bags() * num_labels;
        let m = BagGenMatrix::new(space, unsafe { std::slice::from_raw_parts(entries, len) }.to_vec())?;
        *out = is_reconstructible(&m, tol)?;
        Ok(())
    })
}

//! C interface to `rpd_core`.
//!
//! Every fallible function returns an [`RpdStatus`]. On failure a message
//! is kept per thread and can be read with [`rpd_last_error`]. Strings
//! returned through out-pointers are owned by the caller and released with
//! [`rpd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rpd_core::assignment::{constrained_matching, WeightMatrix};
use rpd_core::ingest::{read_corpus_str, write_tsv};
use rpd_core::metrics::{evaluate_corpus, Metric};
use rpd_core::split::welch_t_test;
use rpd_core::tagging::TagScheme;
use rpd_core::{Corpus, Document};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    DataMismatch = 5,
    Panic = 6,
}

/// Opaque corpus handle.
pub struct RpdCorpus {
    inner: Corpus,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RpdScores {
    pub m: f64,
    pub size_g: f64,
    pub size_h: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RpdWelch {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Outcome = Result<(), (RpdStatus, String)>;

fn guard(body: impl FnOnce() -> Outcome) -> RpdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RpdStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RpdStatus::Panic
        }
    }
}

fn null(name: &str) -> (RpdStatus, String) {
    (RpdStatus::NullArgument, format!("{name} is NULL"))
}

/// # Safety
/// `s` must be NULL or a valid NUL-terminated string.
unsafe fn text<'a>(s: *const c_char, name: &str) -> Result<&'a str, (RpdStatus, String)> {
    if s.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (RpdStatus::InvalidUtf8, format!("{name}: {e}")))
}

/// # Safety
/// `s` must be NULL or a valid NUL-terminated string.
unsafe fn optional_text<'a>(s: *const c_char, name: &str) -> Result<Option<&'a str>, (RpdStatus, String)> {
    if s.is_null() {
        Ok(None)
    } else {
        text(s, name).map(Some)
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rpd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rpd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a canonical corpus. On success `*out` receives a handle to be
/// released with [`rpd_corpus_free`].
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rpd_corpus_from_json(json: *const c_char, out: *mut *mut RpdCorpus) -> RpdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let json = text(json, "json")?;
        let corpus = read_corpus_str(json).map_err(|e| (RpdStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(RpdCorpus { inner: corpus }));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be NULL or a handle from [`rpd_corpus_from_json`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn rpd_corpus_free(corpus: *mut RpdCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of documents, or 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rpd_corpus_len(corpus: *const RpdCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.len())
}

fn with_layer(gold: &Corpus, hyp: &Corpus) -> Result<Corpus, (RpdStatus, String)> {
    let mismatch = |m: String| (RpdStatus::DataMismatch, m);
    if gold.len() != hyp.len() {
        return Err(mismatch(format!("{} reference documents but {} hypothesis documents", gold.len(), hyp.len())));
    }
    let docs = gold
        .documents()
        .iter()
        .map(|d| {
            let h = hyp.document(d.id()).ok_or_else(|| mismatch(format!("hypothesis lacks document {:?}", d.id())))?;
            if h.len() != d.len() {
                return Err(mismatch(format!("document {:?}: token counts differ", d.id())));
            }
            d.clone().with_hypothesis("hypothesis", h.reference().clone()).map_err(|e| mismatch(e.to_string()))
        })
        .collect::<Result<Vec<Document>, _>>()?;
    Corpus::new(gold.name(), docs).map_err(|e| mismatch(e.to_string()))
}

/// Micro-averaged scores of one metric (`"epm"`, `"mpbm"`, `"mbawo"` or
/// `"mwo"`). The hypothesis is the reference layer of `hypothesis` when it
/// is not NULL, otherwise the layer of `gold` named `layer`.
///
/// # Safety
/// Handles must be live; strings NULL or NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rpd_evaluate(
    gold: *const RpdCorpus,
    hypothesis: *const RpdCorpus,
    layer: *const c_char,
    metric: *const c_char,
    out: *mut RpdScores,
) -> RpdStatus {
    guard(|| {
        let gold = gold.as_ref().ok_or_else(|| null("gold"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let metric: Metric = text(metric, "metric")?.parse().map_err(|e: rpd_core::metrics::MetricError| {
            (RpdStatus::InvalidArgument, e.to_string())
        })?;
        let layer = optional_text(layer, "layer")?;
        let joined;
        let (corpus, name) = match (hypothesis.as_ref(), layer) {
            (Some(h), _) => {
                joined = with_layer(&gold.inner, &h.inner)?;
                (&joined, "hypothesis")
            }
            (None, Some(l)) => (&gold.inner, l),
            (None, None) => return Err(null("hypothesis and layer")),
        };
        let r = evaluate_corpus(corpus, name, metric).map_err(|e| (RpdStatus::DataMismatch, e.to_string()))?;
        *out = RpdScores {
            m: r.m,
            size_g: r.size_g,
            size_h: r.size_h,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        };
        Ok(())
    })
}

/// Maximum-weight matching of a row-major `rows` x `cols` matrix with at
/// least `min_positive` strictly positive pairs. `col_of_row` (length
/// `rows`, may be NULL) receives each row's column or -1. When the
/// constraint cannot be met the total is 0 and every row is -1.
///
/// # Safety
/// `weights` must hold `rows * cols` values; `total` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rpd_max_weight_matching(
    weights: *const f64,
    rows: usize,
    cols: usize,
    min_positive: usize,
    total: *mut f64,
    col_of_row: *mut isize,
) -> RpdStatus {
    guard(|| {
        let total = total.as_mut().ok_or_else(|| null("total"))?;
        let n = rows.checked_mul(cols).ok_or_else(|| (RpdStatus::InvalidArgument, "matrix too large".into()))?;
        let data = if n == 0 {
            Vec::new()
        } else if weights.is_null() {
            return Err(null("weights"));
        } else {
            std::slice::from_raw_parts(weights, n).to_vec()
        };
        let w = WeightMatrix::new(rows, cols, data).map_err(|e| (RpdStatus::InvalidArgument, e.to_string()))?;
        let m = constrained_matching(&w, min_positive);
        *total = m.as_ref().map_or(0.0, |m| m.total_weight);
        if !col_of_row.is_null() {
            let slots = std::slice::from_raw_parts_mut(col_of_row, rows);
            for (r, slot) in slots.iter_mut().enumerate() {
                *slot = m.as_ref().and_then(|m| m.col_of(r)).map_or(-1, |c| c as isize);
            }
        }
        Ok(())
    })
}

/// Welch's unequal-variance t-test.
///
/// # Safety
/// `a` and `b` must hold `a_len` and `b_len` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rpd_welch(
    a: *const f64,
    a_len: usize,
    b: *const f64,
    b_len: usize,
    out: *mut RpdWelch,
) -> RpdStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if (a.is_null() && a_len > 0) || (b.is_null() && b_len > 0) {
            return Err(null("sample"));
        }
        let slice = |p: *const f64, n: usize| if n == 0 { &[][..] } else { std::slice::from_raw_parts(p, n) };
        let r = welch_t_test(slice(a, a_len), slice(b, b_len)).map_err(|e| (RpdStatus::InvalidArgument, e.to_string()))?;
        *out = RpdWelch { t: r.t, df: r.df, p: r.p };
        Ok(())
    })
}

/// Encodes the reference layer, or the layer named `layer` when it is not
/// NULL, as tag TSV under `scheme` (for example `"BIOMJ-Token"`).
///
/// # Safety
/// `corpus` must be live; strings NULL or NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rpd_encode_tsv(
    corpus: *const RpdCorpus,
    scheme: *const c_char,
    layer: *const c_char,
    out: *mut *mut c_char,
) -> RpdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let corpus = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        let scheme: TagScheme =
            text(scheme, "scheme")?.parse().map_err(|e: rpd_core::tagging::TaggingError| (RpdStatus::InvalidArgument, e.to_string()))?;
        let layer = optional_text(layer, "layer")?;
        let tsv = write_tsv(&corpus.inner, layer, scheme).map_err(|e| (RpdStatus::DataMismatch, e.to_string()))?;
        *out = CString::new(tsv).map_err(|e| (RpdStatus::DataMismatch, e.to_string()))?.into_raw();
        Ok(())
    })
}

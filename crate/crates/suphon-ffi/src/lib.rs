//! C ABI over the suphon library: opaque handles, integer status codes,
//! and a thread-local error message. `include/suphon.h` declares the same
//! surface for C and C++ consumers; a test keeps the two in sync.
//!
//! Conventions:
//! - Fallible calls return a status code and write results through out
//!   pointers, which are touched only on success.
//! - Accessors on a null handle return 0.
//! - `suphon_last_error` describes the most recent failure on the calling
//!   thread; the pointer stays valid until the next failure on that thread.
//! - Handles are freed exactly once with their `*_free` function.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use suphon::builder::{self, BuildConfig, HonGraph, Method};
use suphon::corpus::{self, Corpus};
use suphon::predict::{self, ScorerConfig};
use suphon::walker::{self, StartWeighting};
use suphon::Error;

pub const SUPHON_OK: i32 = 0;
pub const SUPHON_ERR_CONTRACT: i32 = 1;
pub const SUPHON_ERR_IO: i32 = 2;
pub const SUPHON_ERR_NULL: i32 = 3;
pub const SUPHON_ERR_UTF8: i32 = 4;

pub struct SuphonCorpus(Corpus);
pub struct SuphonGraph(HonGraph);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    let text = CString::new(msg.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
    code
}

fn fail_with(err: &Error) -> i32 {
    fail(err.exit_code(), err)
}

/// Every entry point runs behind a panic guard: unwinding across the C
/// boundary is undefined behavior.
fn guarded(f: impl FnOnce() -> i32) -> i32 {
    catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(SUPHON_ERR_CONTRACT, "internal panic"))
}

unsafe fn as_str<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    if ptr.is_null() {
        return Err(fail(SUPHON_ERR_NULL, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(SUPHON_ERR_UTF8, "string argument is not valid UTF-8"))
}

unsafe fn as_ref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, i32> {
    ptr.as_ref()
        .ok_or_else(|| fail(SUPHON_ERR_NULL, format!("null {what} handle")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> i32 {
    if out.is_null() {
        return fail(SUPHON_ERR_NULL, format!("null {what} out pointer"));
    }
    out.write(value);
    SUPHON_OK
}

/// Version of the underlying library, as a static string.
#[no_mangle]
pub extern "C" fn suphon_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the calling thread's most recent failure (empty if none).
#[no_mangle]
pub extern "C" fn suphon_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a corpus from text: one `id<TAB>label<TAB>tok tok ...` line per
/// trajectory.
///
/// # Safety
/// `text` must be null or NUL-terminated; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_corpus_parse(
    text: *const c_char,
    out: *mut *mut SuphonCorpus,
) -> i32 {
    guarded(|| {
        let text = match as_str(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match Corpus::parse_str(text) {
            Ok(c) => write_out(out, Box::into_raw(Box::new(SuphonCorpus(c))), "corpus"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Reads a corpus file in the same format `suphon_corpus_parse` accepts.
///
/// # Safety
/// `path` must be null or NUL-terminated; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_corpus_read(
    path: *const c_char,
    out: *mut *mut SuphonCorpus,
) -> i32 {
    guarded(|| {
        let path = match as_str(path) {
            Ok(p) => p,
            Err(code) => return code,
        };
        match corpus::read_corpus(std::path::Path::new(path)) {
            Ok(c) => write_out(out, Box::into_raw(Box::new(SuphonCorpus(c))), "corpus"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Builds the fixed two-path toy corpus; `variant` is `clean` or `noisy`.
///
/// # Safety
/// `variant` must be null or NUL-terminated; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_corpus_toy(
    variant: *const c_char,
    n_per_path: usize,
    seed: u64,
    out: *mut *mut SuphonCorpus,
) -> i32 {
    guarded(|| {
        let variant = match as_str(variant) {
            Ok(v) => v,
            Err(code) => return code,
        };
        let result = variant
            .parse()
            .and_then(|variant| corpus::fig1_toy(variant, n_per_path, seed));
        match result {
            Ok(c) => write_out(out, Box::into_raw(Box::new(SuphonCorpus(c))), "corpus"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Number of trajectories; 0 for a null handle.
///
/// # Safety
/// `corpus` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn suphon_corpus_len(corpus: *const SuphonCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// Number of label-1 trajectories; 0 for a null handle.
///
/// # Safety
/// `corpus` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn suphon_corpus_positives(corpus: *const SuphonCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.positives())
}

/// Releases a corpus handle. Null is a no-op.
///
/// # Safety
/// `corpus` must be null or an unfreed handle from this library; it is
/// invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn suphon_corpus_free(corpus: *mut SuphonCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Builds a graph from a labeled corpus. `method` is `fon`, `hon`,
/// `suphon`, or `suphon-noskip`. For `hon`, `alpha` is the divergence
/// threshold scale; `fon` ignores every knob.
///
/// # Safety
/// `corpus` must be null or a live handle; `method` null or NUL-terminated;
/// `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_build(
    corpus: *const SuphonCorpus,
    method: *const c_char,
    k: usize,
    alpha: f64,
    n_perm: usize,
    min_support: usize,
    seed: u64,
    out: *mut *mut SuphonGraph,
) -> i32 {
    guarded(|| {
        let corpus = match as_ref(corpus, "corpus") {
            Ok(c) => &c.0,
            Err(code) => return code,
        };
        let method_str = match as_str(method) {
            Ok(m) => m,
            Err(code) => return code,
        };
        let built = method_str.parse().and_then(|method| match method {
            Method::Fon => builder::build_fon(corpus),
            Method::Hon => builder::build_hon_unsupervised(corpus, k, alpha),
            Method::Suphon | Method::SuphonNoskip => {
                let config = BuildConfig {
                    k,
                    alpha,
                    n_perm,
                    min_support,
                    seed,
                    ..Default::default()
                };
                if matches!(method, Method::Suphon) {
                    builder::build_suphon(corpus, &config)
                } else {
                    builder::build_suphon_noskip(corpus, &config)
                }
            }
        });
        match built {
            Ok(g) => write_out(out, Box::into_raw(Box::new(SuphonGraph(g))), "graph"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Reads a serialized graph file.
///
/// # Safety
/// `path` must be null or NUL-terminated; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_read(path: *const c_char, out: *mut *mut SuphonGraph) -> i32 {
    guarded(|| {
        let path = match as_str(path) {
            Ok(p) => p,
            Err(code) => return code,
        };
        match builder::read_graph(std::path::Path::new(path)) {
            Ok(g) => write_out(out, Box::into_raw(Box::new(SuphonGraph(g))), "graph"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Serializes a graph to a file.
///
/// # Safety
/// `graph` must be null or a live handle; `path` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_write(graph: *const SuphonGraph, path: *const c_char) -> i32 {
    guarded(|| {
        let graph = match as_ref(graph, "graph") {
            Ok(g) => &g.0,
            Err(code) => return code,
        };
        let path = match as_str(path) {
            Ok(p) => p,
            Err(code) => return code,
        };
        match builder::write_graph(graph, std::path::Path::new(path)) {
            Ok(()) => SUPHON_OK,
            Err(e) => fail_with(&e),
        }
    })
}

/// Number of nodes including the two sinks; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_node_count(graph: *const SuphonGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Number of directed edges; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_edge_count(graph: *const SuphonGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Writes 1 through `out` if a node with this encoding exists, else 0.
///
/// # Safety
/// `graph` must be null or a live handle; `encoding` null or NUL-terminated;
/// `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_contains(
    graph: *const SuphonGraph,
    encoding: *const c_char,
    out: *mut i32,
) -> i32 {
    guarded(|| {
        let graph = match as_ref(graph, "graph") {
            Ok(g) => &g.0,
            Err(code) => return code,
        };
        let encoding = match as_str(encoding) {
            Ok(e) => e,
            Err(code) => return code,
        };
        write_out(out, graph.node_index(encoding).is_some() as i32, "contains")
    })
}

/// Whole-graph information gain from exactly solved absorption, start
/// nodes weighted by out-degree.
///
/// # Safety
/// `graph` must be null or a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_ig(graph: *const SuphonGraph, out: *mut f64) -> i32 {
    guarded(|| {
        let graph = match as_ref(graph, "graph") {
            Ok(g) => &g.0,
            Err(code) => return code,
        };
        match walker::graph_ig_exact(graph, StartWeighting::OutDegree) {
            Ok(ig) => write_out(out, ig, "information gain"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Exactly solved probability that a walk from the named node is absorbed
/// by the positive sink.
///
/// # Safety
/// `graph` must be null or a live handle; `encoding` null or NUL-terminated;
/// `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_node_absorption(
    graph: *const SuphonGraph,
    encoding: *const c_char,
    out: *mut f64,
) -> i32 {
    guarded(|| {
        let graph = match as_ref(graph, "graph") {
            Ok(g) => &g.0,
            Err(code) => return code,
        };
        let encoding = match as_str(encoding) {
            Ok(e) => e,
            Err(code) => return code,
        };
        let Some(idx) = graph.node_index(encoding) else {
            return fail(
                SUPHON_ERR_CONTRACT,
                format!("graph has no node `{encoding}`"),
            );
        };
        match walker::exact_absorption(graph) {
            Ok(table) => write_out(out, table[idx].p_pos, "absorption"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Scores every trajectory against the graph (exact absorption, mean
/// aggregation) and writes the area under the precision-recall curve.
///
/// # Safety
/// `graph` and `corpus` must be null or live handles; `out` must be valid
/// for a write.
#[no_mangle]
pub unsafe extern "C" fn suphon_evaluate(
    graph: *const SuphonGraph,
    corpus: *const SuphonCorpus,
    out: *mut f64,
) -> i32 {
    guarded(|| {
        let graph = match as_ref(graph, "graph") {
            Ok(g) => &g.0,
            Err(code) => return code,
        };
        let corpus = match as_ref(corpus, "corpus") {
            Ok(c) => &c.0,
            Err(code) => return code,
        };
        match predict::evaluate(corpus, graph, &ScorerConfig::default()) {
            Ok(auprc) => write_out(out, auprc, "auprc"),
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases a graph handle. Null is a no-op.
///
/// # Safety
/// `graph` must be null or an unfreed handle from this library; it is
/// invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn suphon_graph_free(graph: *mut SuphonGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

//! C ABI over `modk`.
//!
//! Every function returns a `ModkStatus`. Results come back through out
//! pointers. Graphs and orientations are opaque handles released with their
//! `_free` function. After a non-OK status, `modk_last_error` copies the
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use modk::factor::{self, StarDecomposition};
use modk::harness::io;
use modk::orientation::{self, BoundSpec, Bounds, Regime, SearchConfig, SearchOutcome, SolverConfig};
use modk::{EdgeId, Error, MultiGraph, Orientation, ResidueMap};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModkStatus {
    ModkOk = 0,
    ModkErrNull = 1,
    ModkErrDomain = 2,
    ModkErrParse = 3,
    ModkErrPrecondition = 4,
    ModkErrInfeasible = 5,
    ModkErrBudget = 6,
    ModkErrSizeGuard = 7,
    ModkErrCancelled = 8,
    ModkErrContract = 9,
    ModkErrBufferTooSmall = 10,
    ModkErrPanic = 11,
}

/// Bounded-orientation regimes for `modk_orient_mod_k`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModkRegime {
    ModkRegimeEdge = 0,
    ModkRegimeTree = 1,
    ModkRegimeOdd = 2,
}

/// Opaque multigraph handle.
pub struct ModkGraph(MultiGraph);

/// Opaque orientation handle.
pub struct ModkOrientation(Orientation);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|s| *s.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ModkStatus {
    match e {
        Error::Domain(_) => ModkStatus::ModkErrDomain,
        Error::Parse { .. } => ModkStatus::ModkErrParse,
        Error::Precondition(_) => ModkStatus::ModkErrPrecondition,
        Error::Infeasible(_) => ModkStatus::ModkErrInfeasible,
        Error::Budget { .. } => ModkStatus::ModkErrBudget,
        Error::SizeGuard { .. } => ModkStatus::ModkErrSizeGuard,
        Error::Cancelled => ModkStatus::ModkErrCancelled,
        Error::Contract(_) => ModkStatus::ModkErrContract,
    }
}

struct Fail(ModkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ModkStatus::ModkErrNull, format!("{what} is null"))
}

/// Run `f`, record any error message, and map panics to a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ModkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ModkStatus::ModkOk
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside modk".into());
            ModkStatus::ModkErrPanic
        }
    }
}

unsafe fn graph<'a>(g: *const ModkGraph) -> Result<&'a MultiGraph, Fail> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("graph"))
}

unsafe fn residues(g: &MultiGraph, k: usize, p: *const i64, len: usize) -> Result<ResidueMap, Fail> {
    if p.is_null() {
        return Err(null("residues"));
    }
    if len != g.vertex_count() {
        return Err(Fail(ModkStatus::ModkErrDomain, format!("{len} residues for {} vertices", g.vertex_count())));
    }
    Ok(ResidueMap::new(k, std::slice::from_raw_parts(p, len).to_vec())?)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_orientation(out: *mut *mut ModkOrientation, o: Orientation) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(ModkOrientation(o))))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn modk_status_str(status: ModkStatus) -> *const c_char {
    let s: &'static CStr = match status {
        ModkStatus::ModkOk => c"ok",
        ModkStatus::ModkErrNull => c"null pointer",
        ModkStatus::ModkErrDomain => c"invalid input",
        ModkStatus::ModkErrParse => c"parse error",
        ModkStatus::ModkErrPrecondition => c"precondition violated",
        ModkStatus::ModkErrInfeasible => c"infeasible",
        ModkStatus::ModkErrBudget => c"search budget exhausted",
        ModkStatus::ModkErrSizeGuard => c"instance too large for exhaustive check",
        ModkStatus::ModkErrCancelled => c"cancelled",
        ModkStatus::ModkErrContract => c"internal contract violation",
        ModkStatus::ModkErrBufferTooSmall => c"buffer too small",
        ModkStatus::ModkErrPanic => c"panic",
    };
    s.as_ptr()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn modk_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|s| {
        let s = s.borrow();
        if !buf.is_null() && len > 0 {
            let n = s.len().min(len - 1);
            ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        s.len()
    })
}

/// New graph on `n` vertices and no edges.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modk_graph_new(n: usize, out: *mut *mut ModkGraph) -> ModkStatus {
    guard(|| put(out, Box::into_raw(Box::new(ModkGraph(MultiGraph::new(n))))))
}

/// Parse a graph in the `mg n m` / `e u v` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modk_graph_parse(text: *const c_char, out: *mut *mut ModkGraph) -> ModkStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| Fail(ModkStatus::ModkErrParse, e.to_string()))?;
        let g = io::parse_graph(s)?;
        put(out, Box::into_raw(Box::new(ModkGraph(g))))
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn modk_graph_free(g: *mut ModkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Add edge `uv`; its id is written to `id_out` if non-null.
///
/// # Safety
/// `g` must be a live graph handle; `id_out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn modk_graph_add_edge(g: *mut ModkGraph, u: usize, v: usize, id_out: *mut u32) -> ModkStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(|| null("graph"))?;
        let id = g.0.add_edge(u, v)?;
        if !id_out.is_null() {
            id_out.write(id.0);
        }
        Ok(())
    })
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn modk_graph_vertex_count(g: *const ModkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn modk_graph_edge_count(g: *const ModkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Orientation with out-degrees congruent to `p` mod 2 and within one of
/// d/2. A non-negative `target` pins d+(z0) to that value.
///
/// # Safety
/// `g` live, `p` points to `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn modk_orient_mod2(
    g: *const ModkGraph,
    p: *const i64,
    len: usize,
    z0: usize,
    target: i64,
    out: *mut *mut ModkOrientation,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        let p = residues(g, 2, p, len)?;
        let target = usize::try_from(target).ok();
        put_orientation(out, orientation::orient_mod2_bounded(g, &p, z0, target)?)
    })
}

/// Bounded p-orientation modulo `k` under a connectivity regime.
///
/// # Safety
/// `g` live, `p` points to `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn modk_orient_mod_k(
    g: *const ModkGraph,
    k: usize,
    p: *const i64,
    len: usize,
    regime: ModkRegime,
    budget: u64,
    out: *mut *mut ModkOrientation,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        let p = residues(g, k, p, len)?;
        let regime = match regime {
            ModkRegime::ModkRegimeEdge => Regime::Edge3k3,
            ModkRegime::ModkRegimeTree => Regime::Tree2k2,
            ModkRegime::ModkRegimeOdd => Regime::OddEdge,
        };
        let cfg =
            SolverConfig { search: SearchConfig { node_budget: budget, cancel: None }, ..SolverConfig::default() };
        put_orientation(out, orientation::orient_mod_k_bounded_with(g, &p, regime, None, &cfg)?.orientation)
    })
}

/// Exhaustive search for an unbounded p-orientation modulo `k`.
/// `MODK_ERR_INFEASIBLE` means none exists.
///
/// # Safety
/// `g` live, `p` points to `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn modk_orient_search(
    g: *const ModkGraph,
    k: usize,
    p: *const i64,
    len: usize,
    budget: u64,
    out: *mut *mut ModkOrientation,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        let p = residues(g, k, p, len)?;
        let cfg = SearchConfig { node_budget: budget, cancel: None };
        let spec = BoundSpec::new(Bounds::Unbounded);
        let rep = orientation::orient_mod_k_search_with(g, &p, &spec, &Orientation::new(), &cfg)?;
        match rep.outcome {
            SearchOutcome::Found(o) => put_orientation(out, o),
            SearchOutcome::Infeasible => Err(Fail(ModkStatus::ModkErrInfeasible, "no p-orientation exists".into())),
            _ => Err(Error::Budget { nodes: rep.nodes }.into()),
        }
    })
}

/// # Safety
/// `o` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn modk_orientation_free(o: *mut ModkOrientation) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Tail of edge `edge` under `o`.
///
/// # Safety
/// Handles live, `tail_out` valid.
#[no_mangle]
pub unsafe extern "C" fn modk_orientation_tail(
    g: *const ModkGraph,
    o: *const ModkOrientation,
    edge: u32,
    tail_out: *mut usize,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        let o = o.as_ref().ok_or_else(|| null("orientation"))?;
        let e = g.expect_edge(EdgeId(edge))?;
        let (tail, _) =
            o.0.arc(&e).ok_or_else(|| Fail(ModkStatus::ModkErrDomain, format!("edge {edge} is unoriented")))?;
        put(tail_out, tail)
    })
}

/// Out-degree of every vertex into `buf` (length `len` >= vertex count).
///
/// # Safety
/// Handles live, `buf` points to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn modk_orientation_out_degrees(
    g: *const ModkGraph,
    o: *const ModkOrientation,
    buf: *mut usize,
    len: usize,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        let o = o.as_ref().ok_or_else(|| null("orientation"))?;
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let out = o.0.out_degrees(g);
        if len < out.len() {
            return Err(Fail(ModkStatus::ModkErrBufferTooSmall, format!("need {} slots", out.len())));
        }
        ptr::copy_nonoverlapping(out.as_ptr(), buf, out.len());
        Ok(())
    })
}

/// Set `ok_out` to whether `o` is a total p-orientation modulo `k`.
///
/// # Safety
/// Handles live, `p` points to `len` values, `ok_out` valid.
#[no_mangle]
pub unsafe extern "C" fn modk_verify_orientation(
    g: *const ModkGraph,
    o: *const ModkOrientation,
    k: usize,
    p: *const i64,
    len: usize,
    ok_out: *mut bool,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        let o = o.as_ref().ok_or_else(|| null("orientation"))?;
        let p = residues(g, k, p, len)?;
        let rep = orientation::verify_orientation(g, &o.0, &p, &BoundSpec::new(Bounds::Unbounded));
        put(ok_out, rep.ok)
    })
}

/// Decompose into k-stars. `centers` (length `len` >= edge count) receives
/// the center of the star holding each edge, indexed by edge id.
/// `MODK_ERR_INFEASIBLE` means no decomposition exists.
///
/// # Safety
/// `g` live, `centers` points to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn modk_star_decomposition(
    g: *const ModkGraph,
    k: usize,
    budget: u64,
    centers: *mut usize,
    len: usize,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        if centers.is_null() {
            return Err(null("centers"));
        }
        let slots = g.edges().iter().map(|e| e.id.0 as usize + 1).max().unwrap_or(0);
        if len < slots {
            return Err(Fail(ModkStatus::ModkErrBufferTooSmall, format!("need {slots} slots")));
        }
        let cfg = SearchConfig { node_budget: budget, cancel: None };
        match factor::star_decomposition_with(g, k, &cfg)? {
            StarDecomposition::Stars { stars, .. } => {
                for s in stars {
                    for e in s.edges {
                        *centers.add(e.0 as usize) = s.center;
                    }
                }
                Ok(())
            }
            StarDecomposition::Infeasible => {
                Err(Fail(ModkStatus::ModkErrInfeasible, format!("no {k}-star decomposition")))
            }
        }
    })
}

/// Empty orientation, for callers that orient edge by edge.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn modk_orientation_new(out: *mut *mut ModkOrientation) -> ModkStatus {
    guard(|| put_orientation(out, Orientation::new()))
}

/// Orient edge `edge` out of `tail`.
///
/// # Safety
/// Handles live.
#[no_mangle]
pub unsafe extern "C" fn modk_orientation_set(
    g: *const ModkGraph,
    o: *mut ModkOrientation,
    edge: u32,
    tail: usize,
) -> ModkStatus {
    guard(|| {
        let g = graph(g)?;
        let o = o.as_mut().ok_or_else(|| null("orientation"))?;
        let e = g.expect_edge(EdgeId(edge))?;
        if !e.touches(tail) {
            return Err(Fail(ModkStatus::ModkErrDomain, format!("vertex {tail} is not an end of edge {edge}")));
        }
        o.0.set_from(&e, tail);
        Ok(())
    })
}

#ifndef MODK_H
#define MODK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Bounded-orientation regimes for `modk_orient_mod_k`.
 */
typedef enum ModkRegime {
  MODK_REGIME_EDGE = 0,
  MODK_REGIME_TREE = 1,
  MODK_REGIME_ODD = 2,
} ModkRegime;

typedef enum ModkStatus {
  MODK_OK = 0,
  MODK_ERR_NULL = 1,
  MODK_ERR_DOMAIN = 2,
  MODK_ERR_PARSE = 3,
  MODK_ERR_PRECONDITION = 4,
  MODK_ERR_INFEASIBLE = 5,
  MODK_ERR_BUDGET = 6,
  MODK_ERR_SIZE_GUARD = 7,
  MODK_ERR_CANCELLED = 8,
  MODK_ERR_CONTRACT = 9,
  MODK_ERR_BUFFER_TOO_SMALL = 10,
  MODK_ERR_PANIC = 11,
} ModkStatus;

/**
 * Opaque multigraph handle.
 */
typedef struct ModkGraph ModkGraph;

/**
 * Opaque orientation handle.
 */
typedef struct ModkOrientation ModkOrientation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *modk_status_str(enum ModkStatus status);

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t modk_last_error(char *buf, size_t len);

/**
 * New graph on `n` vertices and no edges.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ModkStatus modk_graph_new(size_t n, struct ModkGraph **out);

/**
 * Parse a graph in the `mg n m` / `e u v` text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ModkStatus modk_graph_parse(const char *text, struct ModkGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void modk_graph_free(struct ModkGraph *g);

/**
 * Add edge `uv`; its id is written to `id_out` if non-null.
 *
 * # Safety
 * `g` must be a live graph handle; `id_out` null or valid.
 */
enum ModkStatus modk_graph_add_edge(struct ModkGraph *g, size_t u, size_t v, uint32_t *id_out);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
size_t modk_graph_vertex_count(const struct ModkGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
size_t modk_graph_edge_count(const struct ModkGraph *g);

/**
 * Orientation with out-degrees congruent to `p` mod 2 and within one of
 * d/2. A non-negative `target` pins d+(z0) to that value.
 *
 * # Safety
 * `g` live, `p` points to `len` values, `out` valid.
 */
enum ModkStatus modk_orient_mod2(const struct ModkGraph *g,
                                 const int64_t *p,
                                 size_t len,
                                 size_t z0,
                                 int64_t target,
                                 struct ModkOrientation **out);

/**
 * Bounded p-orientation modulo `k` under a connectivity regime.
 *
 * # Safety
 * `g` live, `p` points to `len` values, `out` valid.
 */
enum ModkStatus modk_orient_mod_k(const struct ModkGraph *g,
                                  size_t k,
                                  const int64_t *p,
                                  size_t len,
                                  enum ModkRegime regime,
                                  uint64_t budget,
                                  struct ModkOrientation **out);

/**
 * Exhaustive search for an unbounded p-orientation modulo `k`.
 * `MODK_ERR_INFEASIBLE` means none exists.
 *
 * # Safety
 * `g` live, `p` points to `len` values, `out` valid.
 */
enum ModkStatus modk_orient_search(const struct ModkGraph *g,
                                   size_t k,
                                   const int64_t *p,
                                   size_t len,
                                   uint64_t budget,
                                   struct ModkOrientation **out);

/**
 * # Safety
 * `o` must come from this library and not be used afterwards.
 */
void modk_orientation_free(struct ModkOrientation *o);

/**
 * Tail of edge `edge` under `o`.
 *
 * # Safety
 * Handles live, `tail_out` valid.
 */
enum ModkStatus modk_orientation_tail(const struct ModkGraph *g,
                                      const struct ModkOrientation *o,
                                      uint32_t edge,
                                      size_t *tail_out);

/**
 * Out-degree of every vertex into `buf` (length `len` >= vertex count).
 *
 * # Safety
 * Handles live, `buf` points to `len` writable values.
 */
enum ModkStatus modk_orientation_out_degrees(const struct ModkGraph *g,
                                             const struct ModkOrientation *o,
                                             size_t *buf,
                                             size_t len);

/**
 * Set `ok_out` to whether `o` is a total p-orientation modulo `k`.
 *
 * # Safety
 * Handles live, `p` points to `len` values, `ok_out` valid.
 */
enum ModkStatus modk_verify_orientation(const struct ModkGraph *g,
                                        const struct ModkOrientation *o,
                                        size_t k,
                                        const int64_t *p,
                                        size_t len,
                                        bool *ok_out);

/**
 * Decompose into k-stars. `centers` (length `len` >= edge count) receives
 * the center of the star holding each edge, indexed by edge id.
 * `MODK_ERR_INFEASIBLE` means no decomposition exists.
 *
 * # Safety
 * `g` live, `centers` points to `len` writable values.
 */
enum ModkStatus modk_star_decomposition(const struct ModkGraph *g,
                                        size_t k,
                                        uint64_t budget,
                                        size_t *centers,
                                        size_t len);

/**
 * Empty orientation, for callers that orient edge by edge.
 *
 * # Safety
 * `out` must be valid.
 */
enum ModkStatus modk_orientation_new(struct ModkOrientation **out);

/**
 * Orient edge `edge` out of `tail`.
 *
 * # Safety
 * Handles live.
 */
enum ModkStatus modk_orientation_set(const struct ModkGraph *g,
                                     struct ModkOrientation *o,
                                     uint32_t edge,
                                     size_t tail);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODK_H */

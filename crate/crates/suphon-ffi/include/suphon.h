#ifndef SUPHON_H
#define SUPHON_H

/*
 * C interface to the suphon library: outcome-supervised higher-order
 * networks from labeled event sequences.
 *
 * Conventions:
 *   - Fallible calls return a status code (SUPHON_OK on success) and write
 *     results through out pointers, which are touched only on success.
 *   - Accessors on a NULL handle return 0.
 *   - suphon_last_error() describes the most recent failure on the calling
 *     thread; the pointer stays valid until the next failure on that thread.
 *   - Handles are freed exactly once with their *_free function; freeing
 *     NULL is a no-op.
 */

#include <stdint.h>
#include <stddef.h>

#define SUPHON_OK 0
#define SUPHON_ERR_CONTRACT 1
#define SUPHON_ERR_IO 2
#define SUPHON_ERR_NULL 3
#define SUPHON_ERR_UTF8 4

/**
 * A labeled corpus of event trajectories.
 */
typedef struct SuphonCorpus SuphonCorpus;

/**
 * A directed graph with two absorbing outcome sinks.
 */
typedef struct SuphonGraph SuphonGraph;

#ifdef __cplusplus
extern "C" {
#endif /* __cplusplus */

/**
 * Version of the underlying library, as a static string.
 */
const char *suphon_version(void);

/**
 * Message for the calling thread's most recent failure (empty if none).
 */
const char *suphon_last_error(void);

/**
 * Parses a corpus from text: one `id<TAB>label<TAB>tok tok ...` line per
 * trajectory.
 */
int32_t suphon_corpus_parse(const char *text, SuphonCorpus **out);

/**
 * Reads a corpus file in the same format suphon_corpus_parse accepts.
 */
int32_t suphon_corpus_read(const char *path, SuphonCorpus **out);

/**
 * Builds the fixed two-path toy corpus; `variant` is "clean" or "noisy".
 */
int32_t suphon_corpus_toy(const char *variant,
                          size_t n_per_path,
                          uint64_t seed,
                          SuphonCorpus **out);

/**
 * Number of trajectories; 0 for a NULL handle.
 */
size_t suphon_corpus_len(const SuphonCorpus *corpus);

/**
 * Number of label-1 trajectories; 0 for a NULL handle.
 */
size_t suphon_corpus_positives(const SuphonCorpus *corpus);

/**
 * Releases a corpus handle. NULL is a no-op.
 */
void suphon_corpus_free(SuphonCorpus *corpus);

/**
 * Builds a graph from a labeled corpus. `method` is "fon", "hon",
 * "suphon", or "suphon-noskip". For "hon", `alpha` is the divergence
 * threshold scale; "fon" ignores every knob.
 */
int32_t suphon_graph_build(const SuphonCorpus *corpus,
                           const char *method,
                           size_t k,
                           double alpha,
                           size_t n_perm,
                           size_t min_support,
                           uint64_t seed,
                           SuphonGraph **out);

/**
 * Reads a serialized graph file.
 */
int32_t suphon_graph_read(const char *path, SuphonGraph **out);

/**
 * Serializes a graph to a file.
 */
int32_t suphon_graph_write(const SuphonGraph *graph, const char *path);

/**
 * Number of nodes including the two sinks; 0 for a NULL handle.
 */
size_t suphon_graph_node_count(const SuphonGraph *graph);

/**
 * Number of directed edges; 0 for a NULL handle.
 */
size_t suphon_graph_edge_count(const SuphonGraph *graph);

/**
 * Writes 1 through `out` if a node with this encoding exists, else 0.
 */
int32_t suphon_graph_contains(const SuphonGraph *graph,
                              const char *encoding,
                              int32_t *out);

/**
 * Whole-graph information gain from exactly solved absorption, start nodes
 * weighted by out-degree.
 */
int32_t suphon_graph_ig(const SuphonGraph *graph, double *out);

/**
 * Exactly solved probability that a walk from the named node is absorbed
 * by the positive sink.
 */
int32_t suphon_node_absorption(const SuphonGraph *graph,
                               const char *encoding,
                               double *out);

/**
 * Scores every trajectory against the graph (exact absorption, mean
 * aggregation) and writes the area under the precision-recall curve.
 */
int32_t suphon_evaluate(const SuphonGraph *graph,
                        const SuphonCorpus *corpus,
                        double *out);

/**
 * Releases a graph handle. NULL is a no-op.
 */
void suphon_graph_free(SuphonGraph *graph);

#ifdef __cplusplus
} /* extern "C" */
#endif /* __cplusplus */

#endif /* SUPHON_H */

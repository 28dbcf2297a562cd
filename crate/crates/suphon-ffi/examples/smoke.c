/*
 * Minimal C consumer: read a corpus, build a graph, query it, and
 * exercise the error path.
 *
 *   cc -Wall -Wextra -Werror -I../include smoke.c \
 *      ../../../target/release/libsuphon_ffi.a -lpthread -ldl -lm -o smoke
 *   ./smoke some.corpus [node]
 */
#include <stdio.h>
#include "suphon.h"

int main(int argc, char **argv) {
    if (argc < 2) {
        fprintf(stderr, "usage: %s <corpus> [node]\n", argv[0]);
        return 2;
    }
    printf("lib version %s\n", suphon_version());

    SuphonCorpus *corpus = NULL;
    if (suphon_corpus_read(argv[1], &corpus) != SUPHON_OK) {
        fprintf(stderr, "read: %s\n", suphon_last_error());
        return 1;
    }
    printf("corpus: %zu trajectories, %zu positive\n",
           suphon_corpus_len(corpus), suphon_corpus_positives(corpus));

    SuphonGraph *graph = NULL;
    if (suphon_graph_build(corpus, "suphon", 3, 1.0, 100, 10, 0, &graph) != SUPHON_OK) {
        fprintf(stderr, "build: %s\n", suphon_last_error());
        suphon_corpus_free(corpus);
        return 1;
    }
    printf("graph: %zu nodes, %zu edges\n",
           suphon_graph_node_count(graph), suphon_graph_edge_count(graph));

    double ig = 0.0, auprc = 0.0;
    suphon_graph_ig(graph, &ig);
    suphon_evaluate(graph, corpus, &auprc);
    printf("graph ig %.6f, auprc %.4f\n", ig, auprc);

    if (argc > 2) {
        int has = 0;
        suphon_graph_contains(graph, argv[2], &has);
        if (has) {
            double p = 0.0;
            suphon_node_absorption(graph, argv[2], &p);
            printf("p_pos(%s) %.4f\n", argv[2], p);
        } else {
            printf("no node `%s`\n", argv[2]);
        }
    }

    /* error path: an unknown node must fail and leave a message */
    double p = 0.0;
    if (suphon_node_absorption(graph, "\x01no-such-node", &p) == SUPHON_OK) {
        fprintf(stderr, "expected failure for unknown node\n");
        return 1;
    }
    printf("unknown node -> %s\n", suphon_last_error());

    suphon_graph_free(graph);
    suphon_corpus_free(corpus);
    puts("C ABI smoke OK");
    return 0;
}

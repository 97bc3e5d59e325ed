/* C interface of the gcwn library. All strings are UTF-8. Strings returned
 * through `char** out` are allocated by the library and released with
 * gcwn_free_string. */
#ifndef GCWN_H
#define GCWN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GCWN_API __declspec(dllexport)
#else
#define GCWN_API __attribute__((visibility("default")))
#endif

typedef enum gcwn_status {
  GCWN_OK = 0,
  GCWN_NEGATIVE = 1,     /* not related, check failed, goal not reached, diagnostics */
  GCWN_INCONCLUSIVE = 2, /* bounds reached before a verdict */
  GCWN_ERR_SYNTAX = 10,
  GCWN_ERR_INVALID_ARGUMENT = 11,
  GCWN_ERR_UNKNOWN_NETWORK = 12,
  GCWN_ERR_EVAL = 13,
  GCWN_ERR_BUDGET = 14,
  GCWN_ERR_INTERNAL = 15
} gcwn_status;

typedef enum gcwn_format { GCWN_FORMAT_TEXT = 0, GCWN_FORMAT_JSON = 1 } gcwn_format;

typedef struct gcwn_model gcwn_model;

typedef struct gcwn_bounds {
  size_t max_states;
  size_t max_depth;
  int strict; /* nonzero: fail with GCWN_ERR_BUDGET instead of truncating */
} gcwn_bounds;

typedef struct gcwn_reduce_options {
  gcwn_bounds bounds;
  gcwn_format format;
  const char* find_barb;  /* stop at a state offering this barb */
  int find_terminal;      /* stop at a state without reductions */
  const char* through;    /* milestones "A,B@2+5,...": declared networks, optionally
                             compared on the listed locations only */
  size_t max_steps;       /* length bound of the printed sequences */
  size_t max_traces;      /* enumeration limit when no goal is given */
} gcwn_reduce_options;

typedef struct gcwn_lts_options {
  gcwn_bounds bounds;
  int open;               /* nonzero: include inputs over the payload universe */
  int dot;                /* nonzero: Graphviz, otherwise an indented tree */
} gcwn_lts_options;

typedef struct gcwn_bisim_options {
  gcwn_bounds bounds;
  gcwn_format format;
  int barbed;             /* weak barbed bisimilarity */
  const char* relation;   /* "(p,q),..." or "id" or "all"; ignored when barbed */
  int search;             /* look for a smallest relation instead */
  size_t search_cap;      /* largest |M|x|N| accepted by the search */
} gcwn_bisim_options;

typedef struct gcwn_harmony_options {
  gcwn_bounds bounds;
  gcwn_format format;
  int inject_bug;         /* drop the last receiver of every broadcast */
} gcwn_harmony_options;

typedef struct gcwn_probe_options {
  gcwn_bounds bounds;
  gcwn_format format;
  const char* relation;
  size_t trials;
  uint64_t seed;
} gcwn_probe_options;

GCWN_API const char* gcwn_version(void);

/* Message of the last failure on the calling thread; never NULL. */
GCWN_API const char* gcwn_last_error(void);
GCWN_API void gcwn_free_string(char* s);

GCWN_API void gcwn_bounds_init(gcwn_bounds* b);
GCWN_API void gcwn_reduce_options_init(gcwn_reduce_options* o);
GCWN_API void gcwn_lts_options_init(gcwn_lts_options* o);
GCWN_API void gcwn_bisim_options_init(gcwn_bisim_options* o);
GCWN_API void gcwn_harmony_options_init(gcwn_harmony_options* o);
GCWN_API void gcwn_probe_options_init(gcwn_probe_options* o);

GCWN_API gcwn_status gcwn_model_parse(const char* text, gcwn_model** out);
GCWN_API gcwn_status gcwn_model_load(const char* path, gcwn_model** out);
GCWN_API void gcwn_model_free(gcwn_model* m);

GCWN_API gcwn_status gcwn_model_print(const gcwn_model* m, char** out);
/* Declared network names, one per line. */
GCWN_API gcwn_status gcwn_model_networks(const gcwn_model* m, char** out);

/* GCWN_NEGATIVE when diagnostics were found. */
GCWN_API gcwn_status gcwn_validate(const gcwn_model* m, gcwn_format format, char** out);
GCWN_API gcwn_status gcwn_barbs(const gcwn_model* m, const char* net, gcwn_format format,
                                char** out);
GCWN_API gcwn_status gcwn_reduce(const gcwn_model* m, const char* net,
                                 const gcwn_reduce_options* o, char** out);
GCWN_API gcwn_status gcwn_lts(const gcwn_model* m, const char* net, const gcwn_lts_options* o,
                              char** out);
GCWN_API gcwn_status gcwn_bisim(const gcwn_model* m, const char* left, const char* right,
                                const gcwn_bisim_options* o, char** out);
GCWN_API gcwn_status gcwn_harmony(const gcwn_model* m, const char* net,
                                  const gcwn_harmony_options* o, char** out);
GCWN_API gcwn_status gcwn_probe(const gcwn_model* m, const char* left, const char* right,
                                const gcwn_probe_options* o, char** out);

#ifdef __cplusplus
}
#endif

#endif /* GCWN_H */

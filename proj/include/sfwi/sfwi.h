#ifndef SFWI_SFWI_H
#define SFWI_SFWI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SFWI_API __declspec(dllexport)
#else
#define SFWI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfwi_status {
  SFWI_OK = 0,
  SFWI_INVALID_ARGUMENT = 1,
  SFWI_DOMAIN = 2,
  SFWI_PARSE = 3,
  SFWI_IO = 4,
  SFWI_NOT_FOUND = 5,
  SFWI_INTERNAL = 6
} sfwi_status;

typedef struct sfwi_store sfwi_store;
typedef struct sfwi_server sfwi_server;

/* Message and offending field of the last failed call on this thread. */
SFWI_API const char* sfwi_last_error(void);
SFWI_API const char* sfwi_last_error_field(void);
SFWI_API const char* sfwi_status_name(sfwi_status status);
SFWI_API const char* sfwi_version(void);

/* "+10:00", "-03:30", "Z" or "UTC" to minutes east of UTC. */
SFWI_API sfwi_status sfwi_parse_utc_offset(const char* text, int* minutes);

/* Releases any string returned through a char** out parameter. */
SFWI_API void sfwi_free(char* p);

typedef struct sfwi_options {
  const char* store_dir;   /* NULL: in-memory store */
  const char* rules_dir;   /* NULL: default generated rule table */
  const char* nodes_json;  /* NULL: <store_dir>/nodes.json, else 5 default nodes */
  const char* ui_dir;      /* static assets under /ui; may be NULL */
  int single_mode;         /* nonzero: one undivided weather repository */
  int utc_offset_minutes;  /* local time of CSV records; init sets +10:00 */
  unsigned threads;        /* 0: hardware concurrency */
} sfwi_options;

SFWI_API void sfwi_options_init(sfwi_options* opts);

SFWI_API sfwi_status sfwi_open(const sfwi_options* opts, sfwi_store** out);
SFWI_API void sfwi_close(sfwi_store* store);

/* Runs one service request. `query` is a URL-encoded query string without
   the leading '?'. The response body is always returned, errors included. */
SFWI_API sfwi_status sfwi_request(sfwi_store* store, const char* method, const char* path, const char* query,
                                  const char* body, size_t body_len, int* http_status, char** out_body);

/* Ingests observation CSV. With property NULL the records are split by
   property and by day. Writes a JSON summary. */
SFWI_API sfwi_status sfwi_ingest(sfwi_store* store, const char* property, const char* csv, size_t csv_len,
                                 char** out_json);

/* Materialises FWI events for [from, to) (ISO-8601 UTC). Writes a JSON summary. */
SFWI_API sfwi_status sfwi_infer(sfwi_store* store, const char* from, const char* to, char** out_json);

/* "default", "coarse", or a JSON object {"temperature":[...],"humidity":[...],"wind":[...]}
   of bin edges. Writes <name>.rq files plus manifest.json into out_dir. */
SFWI_API sfwi_status sfwi_rulegen(const char* grid, const char* out_dir, char** out_json);

typedef struct sfwi_synth_options {
  int nodes;
  const char* from;
  const char* to;
  uint64_t seed;
  double fault_rate;
  int utc_offset_minutes;
} sfwi_synth_options;

SFWI_API void sfwi_synth_options_init(sfwi_synth_options* opts);
/* Seeded synthetic observation CSV, plus the node registry JSON it refers to. */
SFWI_API sfwi_status sfwi_synth(const sfwi_synth_options* opts, char** out_csv, char** out_nodes_json);

typedef struct sfwi_bench_options {
  const int64_t* periods;  /* seconds, ascending; NULL: 1h..1mo ladder */
  size_t period_count;
  int repetitions;
  uint64_t seed;
  size_t target_triples;
  int nodes;
  const char* rules_dir;   /* NULL: default generated rule table */
  unsigned threads;
  void (*progress)(const char* csv_row, void* user);
  void* user;
} sfwi_bench_options;

SFWI_API void sfwi_bench_options_init(sfwi_bench_options* opts);
/* Writes the CSV report and a JSON summary (triples, dataset range, orderings). */
SFWI_API sfwi_status sfwi_bench(const sfwi_bench_options* opts, char** out_csv, char** out_json);

/* Starts the HTTP server on a background thread; port 0 picks a free port. */
SFWI_API sfwi_status sfwi_server_start(sfwi_store* store, const char* host, int port, sfwi_server** out,
                                       int* bound_port);
/* Blocks until the server stops. */
SFWI_API void sfwi_server_wait(sfwi_server* server);
SFWI_API void sfwi_server_stop(sfwi_server* server);
SFWI_API void sfwi_server_free(sfwi_server* server);

#ifdef __cplusplus
}
#endif

#endif

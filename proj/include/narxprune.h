#ifndef NARXPRUNE_H
#define NARXPRUNE_H

/* C interface for NARX data pruning: dataset handling, baseline model
 * fitting, dictionary-based and random sample pruning, repeated-trial
 * evaluation, hyperparameter sweeps, and PCA export.
 *
 * All functions return np_status; on failure np_last_error() holds a
 * thread-local message. Strings handed out through char** outputs are
 * heap-allocated and must be released with np_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(NARXPRUNE_BUILD)
#define NP_API __declspec(dllexport)
#else
#define NP_API __declspec(dllimport)
#endif
#else
#define NP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum np_status {
    NP_OK = 0,
    NP_EINVAL = 1,   /* bad argument or configuration */
    NP_EDATA = 2,    /* malformed or inconsistent data */
    NP_ENUMERIC = 3, /* numerical failure (rank exhausted, divergence, ...) */
    NP_EIO = 4,      /* file system failure */
    NP_EINTERNAL = 5 /* unexpected internal failure */
} np_status;

/* Opaque handles. */
typedef struct np_dataset np_dataset;
typedef struct np_context np_context;

/* Message of the last failure on the calling thread; never NULL. The buffer
 * stays valid until the thread's next failing call. */
NP_API const char* np_last_error(void);

NP_API void np_string_free(char* text);

/* ---- datasets ---------------------------------------------------------- */

/* kind: "sdse", "adse", or "sine-demo" (seed unused by sine-demo). */
NP_API np_status np_dataset_generate(const char* kind, uint64_t seed, np_dataset** out);

NP_API np_status np_dataset_load_manifest(const char* manifest_path, np_dataset** out);

/* Single-CSV ingest (columns t,u,y); test_csv may be NULL. */
NP_API np_status np_dataset_load_csv(const char* train_csv, const char* test_csv,
                                     np_dataset** out);

/* Writes per-trajectory CSVs plus manifest.json into dir. If manifest_path
 * is non-NULL it receives the manifest location. */
NP_API np_status np_dataset_save(const np_dataset* dataset, const char* dir,
                                 char** manifest_path);

NP_API np_status np_dataset_info_json(const np_dataset* dataset, char** json);

NP_API void np_dataset_free(np_dataset* dataset);

/* ---- baseline model ---------------------------------------------------- */

/* Builds the polynomial term library over the training split, selects
 * n_terms terms, and fits the baseline on every training sample.
 * preset_name ("sdse", "adse", "emps", "whs") supplies lags/degree/terms;
 * pass NULL to use the explicit n_y/n_u/degree/n_terms values instead. */
NP_API np_status np_context_fit(const np_dataset* dataset, const char* preset_name, int n_y,
                                int n_u, int degree, int n_terms, np_context** out);

/* Rebuilds a context around a previously saved model: the model's terms and
 * coefficients become the baseline, no term selection is re-run. */
NP_API np_status np_context_from_model_json(const np_dataset* dataset, const char* model_json,
                                            np_context** out);

NP_API np_status np_context_model_json(const np_context* context, char** json);

/* Training one-step R^2 plus free-run metrics on the test split. */
NP_API np_status np_context_fit_report_json(const np_context* context, char** json);

NP_API void np_context_free(np_context* context);

/* ---- pruning and evaluation ------------------------------------------- */

/* method: "minibatch-fastcan" or "random". batch_size <= 0 applies the
 * default rule ceil(n / atoms) capped at the term count. Returns the
 * selected sample indices plus config echo as JSON. */
NP_API np_status np_prune(const np_context* context, const char* method, int n, int atoms,
                          int batch_size, uint64_t seed, char** json);

/* Repeated pruning trials (seed base_seed + trial), refit with the baseline
 * terms, coefficient-R^2 per trial plus median/mean/SD summary. Either of
 * json/csv may be NULL. jobs <= 0 uses all logical processors. */
NP_API np_status np_evaluate(const np_context* context, const char* method, int n, int atoms,
                             int batch_size, int trials, uint64_t base_seed, int jobs,
                             int include_timings, char** json, char** csv);

/* axis: "atom-size", "batch-size", or "sample-size". grid holds grid_len
 * values for the swept parameter; the rest come from the fixed arguments. */
NP_API np_status np_sweep(const np_context* context, const char* axis, const int* grid,
                          size_t grid_len, const char* method, int n, int atoms, int trials,
                          uint64_t base_seed, int jobs, char** json, char** csv);

/* 2-D PCA projection of the selected-term feature columns: every sample,
 * the dictionary atoms, and the samples picked by one mini-batch FastCan
 * and one random prune at the given seed (csv columns pc1,pc2,kind). */
NP_API np_status np_pca_csv(const np_context* context, int n, int atoms, int batch_size,
                            uint64_t seed, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* NARXPRUNE_H */

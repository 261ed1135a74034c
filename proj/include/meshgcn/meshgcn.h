/* meshgcn — C API for the mesh graph-convolution toolkit.
 *
 * The library converts triangle meshes into face graphs with 1-ring
 * geometric node features and trains densely connected GCNs for whole-mesh
 * classification and per-face segmentation.
 *
 * All functions return MGCN_OK (0) on success and a nonzero status code on
 * failure; mgcn_last_error() describes the most recent failure on the
 * calling thread. Handles are opaque and must be released with their
 * matching _free function. Strings returned through char** out-parameters
 * are heap-allocated and released with mgcn_string_free().
 */
#ifndef MESHGCN_H
#define MESHGCN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mgcn_status {
    MGCN_OK = 0,
    MGCN_ERR_PARSE = 1,
    MGCN_ERR_TOPOLOGY = 2,
    MGCN_ERR_GEOMETRY = 3,
    MGCN_ERR_SHAPE = 4,
    MGCN_ERR_CONFIG = 5,
    MGCN_ERR_LABEL = 6,
    MGCN_ERR_TAPE = 7,
    MGCN_ERR_IO = 8,
    MGCN_ERR_INTERNAL = 99
} mgcn_status;

typedef struct mgcn_mesh mgcn_mesh;
typedef struct mgcn_features mgcn_features;

/* Library version string, e.g. "0.1.0". Never NULL. */
const char* mgcn_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* mgcn_last_error(void);

void mgcn_string_free(char* s);

/* ---- meshes ---------------------------------------------------------- */

/* Loads .obj or .off (by extension). */
mgcn_status mgcn_mesh_load(const char* path, mgcn_mesh** out_mesh);

/* Parses mesh text directly; format is "obj" or "off". */
mgcn_status mgcn_mesh_from_string(const char* text, const char* format, mgcn_mesh** out_mesh);

void mgcn_mesh_free(mgcn_mesh* mesh);

int32_t mgcn_mesh_vertex_count(const mgcn_mesh* mesh);
int32_t mgcn_mesh_face_count(const mgcn_mesh* mesh);

/* V - E + F; builds the edge table internally (manifoldness enforced). */
mgcn_status mgcn_mesh_euler_characteristic(const mgcn_mesh* mesh, int32_t* out_chi);

/* Centroid to origin, max vertex radius to 1, in place. */
mgcn_status mgcn_mesh_normalize(mgcn_mesh* mesh);

mgcn_status mgcn_mesh_write_obj(const mgcn_mesh* mesh, const char* path);

/* ---- node features --------------------------------------------------- */

/* mask: comma-separated subset of P,Nv,GC,Nf,Theta (e.g. "P,Nv,GC,Nf,Theta"
 * for the full 57-dim layout). curvature_third_area selects the A/3
 * denominator variant. */
mgcn_status mgcn_features_compute(const mgcn_mesh* mesh, const char* mask,
                                  int curvature_third_area, mgcn_features** out_features);

void mgcn_features_free(mgcn_features* features);

int32_t mgcn_features_rows(const mgcn_features* features);
int32_t mgcn_features_width(const mgcn_features* features);

/* Row-major values; valid until the handle is freed. */
const double* mgcn_features_data(const mgcn_features* features);

/* Writes the textual feature dump used by the extract pipeline. */
mgcn_status mgcn_features_write(const mgcn_features* features, const char* mesh_name,
                                const char* path);

/* ---- model introspection --------------------------------------------- */

/* config_json: {"task": "classification"|"segmentation", "model": {...}} as
 * documented for the run verbs; unknown fields use defaults. */
mgcn_status mgcn_count_parameters(const char* config_json, int64_t* out_count);

/* Layer table as JSON: [{"kind": "gcn"|"mean"|"linear", "in": n, "out": m}]. */
mgcn_status mgcn_layer_widths(const char* config_json, char** out_json);

/* ---- run verbs -------------------------------------------------------- */
/* Each verb takes a JSON run configuration and, where meaningful, returns a
 * JSON result through out_json (may be NULL if the caller only wants the
 * status). Artifacts (metrics logs, checkpoints, manifests, reports) are
 * written under the configured output directory. */

mgcn_status mgcn_extract(const char* config_json, char** out_json);
mgcn_status mgcn_train(const char* config_json, char** out_json);
mgcn_status mgcn_eval(const char* config_json, char** out_json);
mgcn_status mgcn_export_seg(const char* config_json, char** out_json);
mgcn_status mgcn_ablate(const char* config_json, char** out_json);
mgcn_status mgcn_make_splits(const char* config_json);

#ifdef __cplusplus
}
#endif

#endif /* MESHGCN_H */

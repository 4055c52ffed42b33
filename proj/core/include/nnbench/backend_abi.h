/* Flat C contract for out-of-tree backends (nnb_backend_v1).
 * Layout and semantics are specified in docs/backend-abi.md. */
#ifndef NNBENCH_BACKEND_ABI_H
#define NNBENCH_BACKEND_ABI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define NNB_ABI_VERSION 1u
#define NNB_MAX_RANK 8u

/* Return codes. */
#define NNB_OK 0
#define NNB_UNSUPPORTED 1 /* capability gap: benchmark is skipped, not failed */
#define NNB_ERROR 2

/* Capability flags. */
#define NNB_CAP_FUSION 1u
#define NNB_CAP_SPARSE 2u
#define NNB_CAP_THREAD_SAFE 4u

/* Dense row-major fp32 tensor. Buffers are owned by the host; for outputs the
 * host sizes `data` from the shape rules and the backend fills it. */
typedef struct nnb_tensor {
  uint32_t rank;
  uint64_t dims[NNB_MAX_RANK];
  uint64_t count;
  float* data;
} nnb_tensor;

typedef struct nnb_capabilities {
  uint32_t abi_version;
  uint32_t kinds_mask; /* bit i = layer kind i in canonical order (conv = 0 ... lstm = 11) */
  uint32_t flags;      /* NNB_CAP_* */
  double area_mm2;     /* <= 0: not reported */
  double power_w;      /* <= 0: no power model */
  char name[64];       /* NUL-terminated */
} nnb_capabilities;

typedef struct nnb_backend_v1 {
  uint32_t abi_version; /* NNB_ABI_VERSION */

  /* `options` may be NULL. On success *ctx is an opaque handle. */
  int (*initialize)(void** ctx, const char* options);
  int (*query_capabilities)(void* ctx, nnb_capabilities* out);

  /* layer_json: one netspec layer object. params: tensors in the documented
   * per-kind order. switches_in: max-unpool only (one u64 per input element).
   * switches_out: max-pool only (one u64 per output element), else NULL. */
  int (*forward)(void* ctx, const char* layer_json, const nnb_tensor* params, uint32_t n_params,
                 const nnb_tensor* input, const uint64_t* switches_in, nnb_tensor* output,
                 uint64_t* switches_out);

  /* layers_json: array of layer objects. params holds every layer's tensors
   * back to back; params_per_layer[i] says how many belong to layer i. */
  int (*forward_fused)(void* ctx, const char* layers_json, const nnb_tensor* params,
                       const uint32_t* params_per_layer, uint32_t n_layers, const nnb_tensor* input,
                       nnb_tensor* output);

  void (*finalize)(void* ctx);

  /* Message for the last non-OK return on this context; never NULL. */
  const char* (*last_error)(void* ctx);
} nnb_backend_v1;

/* Exported entry point of a plugin shared object. */
typedef const nnb_backend_v1* (*nnb_get_backend_fn)(void);
#define NNB_ENTRY_POINT "nnb_get_backend"

#ifdef __cplusplus
}
#endif

#endif /* NNBENCH_BACKEND_ABI_H */

#ifndef IGOQNN_H
#define IGOQNN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum IgoqnnFlagMode {
  IGOQNN_FLAG_MODE_PARITY = 0,
  IGOQNN_FLAG_MODE_CONJUNCTION = 1,
} IgoqnnFlagMode;

typedef enum IgoqnnLossKind {
  IGOQNN_LOSS_KIND_BCE = 0,
  IGOQNN_LOSS_KIND_L2 = 1,
} IgoqnnLossKind;

typedef enum IgoqnnStatus {
  IGOQNN_STATUS_OK = 0,
  IGOQNN_STATUS_NULL_POINTER = 1,
  IGOQNN_STATUS_INVALID_ARGUMENT = 2,
  IGOQNN_STATUS_CAPACITY = 3,
  IGOQNN_STATUS_INDEX = 4,
  IGOQNN_STATUS_CONSTRUCTION = 5,
  IGOQNN_STATUS_UNBOUND_PARAMETER = 6,
  IGOQNN_STATUS_PARSE = 7,
  IGOQNN_STATUS_CONFIG = 8,
  IGOQNN_STATUS_IO = 9,
  IGOQNN_STATUS_BUFFER_TOO_SMALL = 10,
  IGOQNN_STATUS_PANIC = 11,
} IgoqnnStatus;

typedef enum IgoqnnSynapseMode {
  IGOQNN_SYNAPSE_MODE_NULL_CONSISTENT = 0,
  IGOQNN_SYNAPSE_MODE_PAPER_LITERAL = 1,
} IgoqnnSynapseMode;

// Opaque built network.
typedef struct IgoqnnNetwork IgoqnnNetwork;

// Loss settings for [`igoqnn_network_loss`] and [`igoqnn_network_gradient`].
typedef struct IgoqnnLossOptions {
  enum IgoqnnLossKind kind;
  double l1_strength;
  double epsilon_clip;
} IgoqnnLossOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next failing call on this thread.
const char *igoqnn_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void igoqnn_string_free(char *s);

// Qubits needed by a network: `2N + Σ widths + 1`.
//
// # Safety
// `widths` must be valid for `num_layers` reads and `out` for one write.
enum IgoqnnStatus igoqnn_qubit_budget(uintptr_t n_database,
                                      const uintptr_t *widths,
                                      uintptr_t num_layers,
                                      uintptr_t *out_qubits);

// Simulated Grover success probability. A negative `iterations` selects the optimum.
//
// # Safety
// `marked` must be valid for `num_marked` reads; out pointers for one write each.
enum IgoqnnStatus igoqnn_grover_success_probability(uintptr_t n_index_qubits,
                                                    const uintptr_t *marked,
                                                    uintptr_t num_marked,
                                                    int64_t iterations,
                                                    double *out_probability,
                                                    uintptr_t *out_iterations);

// Builds a network. Release it with [`igoqnn_network_free`].
//
// # Safety
// `widths` must be valid for `num_layers` reads and `out_network` for one write.
enum IgoqnnStatus igoqnn_network_new(uintptr_t n_database,
                                     const uintptr_t *widths,
                                     uintptr_t num_layers,
                                     enum IgoqnnSynapseMode synapse_mode,
                                     enum IgoqnnFlagMode flag_mode,
                                     struct IgoqnnNetwork **out_network);

// Destroys a network. Null is ignored.
//
// # Safety
// `network` must be null or a handle from [`igoqnn_network_new`] not yet freed.
void igoqnn_network_free(struct IgoqnnNetwork *network);

// # Safety
// `network` must be a live handle and `out_qubits` valid for one write.
enum IgoqnnStatus igoqnn_network_num_qubits(const struct IgoqnnNetwork *network,
                                            uintptr_t *out_qubits);

// # Safety
// `network` must be a live handle and `out_params` valid for one write.
enum IgoqnnStatus igoqnn_network_num_params(const struct IgoqnnNetwork *network,
                                            uintptr_t *out_params);

// Label of parameter `index`, such as `hidden1[0].theta`. Free with [`igoqnn_string_free`].
//
// # Safety
// `network` must be a live handle and `out_label` valid for one write.
enum IgoqnnStatus igoqnn_network_param_label(const struct IgoqnnNetwork *network,
                                             uintptr_t index,
                                             char **out_label);

// Exact output marginals `P(output[i] = 1)` for one database pattern.
//
// `out_marginals` must hold `N` entries; `capacity` is its length.
//
// # Safety
// Each pointer must be valid for its stated length.
enum IgoqnnStatus igoqnn_network_propagate(const struct IgoqnnNetwork *network,
                                           const double *values,
                                           uintptr_t num_values,
                                           const uint8_t *database,
                                           uintptr_t num_bits,
                                           double *out_marginals,
                                           uintptr_t capacity);

// OpenQASM 2.0 text of the bound circuit. Free with [`igoqnn_string_free`].
//
// # Safety
// `values` must be valid for `num_values` reads and `out_text` for one write.
enum IgoqnnStatus igoqnn_network_export_qasm(const struct IgoqnnNetwork *network,
                                             const double *values,
                                             uintptr_t num_values,
                                             char **out_text);

// BCE, no L1 penalty, clip 1e-7.
struct IgoqnnLossOptions igoqnn_loss_options_default(void);

// Mean batch loss plus the L1 term.
//
// # Safety
// Array pointers must be valid for their stated lengths; `out_loss` for one write.
enum IgoqnnStatus igoqnn_network_loss(const struct IgoqnnNetwork *network,
                                      const double *values,
                                      uintptr_t num_values,
                                      const uint8_t *databases,
                                      const uint8_t *hits,
                                      uintptr_t num_examples,
                                      struct IgoqnnLossOptions options,
                                      double *out_loss);

// Parameter-shift gradient of [`igoqnn_network_loss`], in parameter order.
//
// # Safety
// Array pointers must be valid for their stated lengths; `out_gradient` for `num_values` writes.
enum IgoqnnStatus igoqnn_network_gradient(const struct IgoqnnNetwork *network,
                                          const double *values,
                                          uintptr_t num_values,
                                          const uint8_t *databases,
                                          const uint8_t *hits,
                                          uintptr_t num_examples,
                                          struct IgoqnnLossOptions options,
                                          double *out_gradient);

// Parses OpenQASM text in the exported subset and reports its size.
//
// # Safety
// `text` must be NUL-terminated; out pointers valid for one write each.
enum IgoqnnStatus igoqnn_qasm_inspect(const char *text,
                                      uintptr_t *out_qubits,
                                      uintptr_t *out_gates);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IGOQNN_H */

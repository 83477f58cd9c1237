/* C ABI of the gamma-lab numerical workbench.
 *
 * Conventions:
 *  - Opaque handles (GlMatrix, GlTuple7) own their values; release them with
 *    the matching *_free function exactly once. NULL is accepted by free.
 *  - Every fallible call returns a GlStatus; on failure, gl_last_error()
 *    returns a message valid until the next failing call on the same thread.
 *  - Complex data crosses the boundary as interleaved doubles re0, im0,
 *    re1, im1, ... in row-major matrix order.
 *
 * Keep this header in sync with src/lib.rs (enforced by the crate's
 * header_matches_exports test); cbindgen.toml regenerates it where cbindgen
 * is available.
 */

#ifndef GAMMA_LAB_H
#define GAMMA_LAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum GlStatus {
  GL_OK = 0,
  GL_NULL_ARGUMENT = 1,
  GL_INVALID_ARGUMENT = 2,
  GL_SHAPE_MISMATCH = 3,
  GL_NOT_CONTRACTION = 4,
  GL_NOT_PSD = 5,
  GL_NO_CONVERGENCE = 6,
  GL_NOT_COMMUTING = 7,
  GL_NOT_NORMAL = 8,
  GL_NOT_PURE = 9,
  GL_PARSE_ERROR = 10,
  GL_INTERNAL_ERROR = 11,
} GlStatus;

typedef struct GlMatrix GlMatrix;
typedef struct GlTuple7 GlTuple7;

/* Library version string, static storage. */
const char *gl_version(void);

/* Message of the most recent failure on this thread. */
const char *gl_last_error(void);

/* Matrices ---------------------------------------------------------- */

GlStatus gl_matrix_new(size_t rows, size_t cols, const double *re_im,
                       GlMatrix **out);
void gl_matrix_free(GlMatrix *m);
size_t gl_matrix_rows(const GlMatrix *m);
size_t gl_matrix_cols(const GlMatrix *m);
GlStatus gl_matrix_get(const GlMatrix *m, size_t row, size_t col, double *re,
                       double *im);

/* Scalar functionals ------------------------------------------------ */

GlStatus gl_operator_norm(const GlMatrix *m, double *out);
GlStatus gl_spectral_radius(const GlMatrix *m, double *out);
GlStatus gl_numerical_radius(const GlMatrix *m, double tol, double *out);

/* Structured singular value and symmetrization ----------------------- */

GlStatus gl_mu_bounds(const GlMatrix *m, const size_t *block_sizes,
                      size_t n_blocks, size_t phase_grid, size_t iters,
                      double *lower, double *upper);
GlStatus gl_symmetrize7(const GlMatrix *m, double *out14);
GlStatus gl_symmetrize5(const GlMatrix *m, double *out10);
GlStatus gl_symmetrize3(const GlMatrix *m, double *out6);

/* Commuting 7-tuples ------------------------------------------------- */

GlStatus gl_tuple7_new(const GlMatrix *const *mats, GlTuple7 **out);
GlStatus gl_tuple7_from_json(const char *text, GlTuple7 **out);
void gl_tuple7_free(GlTuple7 *t);
size_t gl_tuple7_dim(const GlTuple7 *t);
GlStatus gl_tuple7_commutation_residual(const GlTuple7 *t, double *out);
GlStatus gl_gamma_isometry_residual7(const GlTuple7 *t, size_t edge,
                                     double *out);
GlStatus gl_fundamental_residual7(const GlTuple7 *t, double *out_residual,
                                  size_t *out_rank);
GlStatus gl_schaffer_lift_residual7(const GlTuple7 *t, size_t levels,
                                    double *out);
GlStatus gl_canonical_rank7(const GlTuple7 *t, double tol, size_t *out_rank,
                            double *out_residual);

/* Hardy-space diagnostics -------------------------------------------- */

GlStatus gl_wprop_residual(const GlMatrix *m, size_t levels, double *out);

#ifdef __cplusplus
}
#endif

#endif /* GAMMA_LAB_H */

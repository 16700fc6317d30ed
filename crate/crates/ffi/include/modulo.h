#ifndef MODULO_H
#define MODULO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes shared by every entry point.
 */
typedef enum ModuloStatus {
  MODULO_STATUS_OK = 0,
  /*
   The input was well formed but the check failed: a rejected proof,
   a non-terminating reduction, no model, no proof found.
   */
  MODULO_STATUS_LOGICAL_FAILURE = 1,
  /*
   Syntax, sort or usage error in an input.
   */
  MODULO_STATUS_PARSE_ERROR = 2,
  MODULO_STATUS_NULL_POINTER = 3,
  MODULO_STATUS_INVALID_UTF8 = 4,
  /*
   An internal panic was caught at the boundary.
   */
  MODULO_STATUS_PANIC = 5,
} ModuloStatus;

/*
 A finite truth values algebra.
 */
typedef struct ModuloAlgebra ModuloAlgebra;

/*
 A parsed theory.
 */
typedef struct ModuloTheory ModuloTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a theory. On success `*out` holds a handle to release with
 [`modulo_theory_free`].

 # Safety
 `src` must be a nul-terminated string and `out` a valid pointer.
 */
enum ModuloStatus modulo_theory_parse(const char *src, struct ModuloTheory **out);

/*
 # Safety
 `t` must come from [`modulo_theory_parse`] and not be used afterwards.
 */
void modulo_theory_free(struct ModuloTheory *t);

/*
 Number of rewrite rules of the theory, or 0 for a null handle.

 # Safety
 `t` must be null or a live handle.
 */
size_t modulo_theory_rule_count(const struct ModuloTheory *t);

/*
 Canonical text of the theory.

 # Safety
 `t` must be a live handle and `out` a valid pointer.
 */
enum ModuloStatus modulo_theory_print(const struct ModuloTheory *t, char **out);

/*
 Typechecks every proof of a proof file and writes a JSON report.
 Returns `LogicalFailure` if some proof is rejected.

 # Safety
 `t` must be a live handle, `proofs` a nul-terminated string and
 `report` a valid pointer.
 */
enum ModuloStatus modulo_check_proofs(const struct ModuloTheory *t,
                                      const char *proofs,
                                      char **report);

/*
 Normalizes every proof of a proof file with at most `fuel` steps each.
 Returns `LogicalFailure` on a cycle or exhausted fuel.

 # Safety
 As for [`modulo_check_proofs`].
 */
enum ModuloStatus modulo_normalize_proofs(const struct ModuloTheory *t,
                                          const char *proofs,
                                          size_t fuel,
                                          char **report);

/*
 Searches for a cut-free proof of `sequent` of height at most `depth` in
 `system` (`modulo`, `foldunfold` or `supernatural`; null means
 `modulo`). Returns `LogicalFailure` if none is found.

 # Safety
 `t` must be a live handle, `sequent` a nul-terminated string, `system`
 null or nul-terminated, and `report` a valid pointer.
 */
enum ModuloStatus modulo_search(const struct ModuloTheory *t,
                                const char *sequent,
                                const char *system,
                                size_t depth,
                                char **report);

/*
 Model search over the bundled battery at the given domain size, with
 non-termination evidence. Returns `LogicalFailure` unless every algebra
 has a model.

 # Safety
 `t` must be a live handle and `report` a valid pointer.
 */
enum ModuloStatus modulo_super_consistency(const struct ModuloTheory *t,
                                           size_t domain_size,
                                           char **report);

/*
 One of the bundled algebras: `bool2`, `chain3`, `diamond4`,
 `doubled_top`.

 # Safety
 `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum ModuloStatus modulo_algebra_named(const char *name, struct ModuloAlgebra **out);

/*
 The Heyting algebra of a finite distributive lattice given in lattice
 file syntax.

 # Safety
 `src` must be a nul-terminated string and `out` a valid pointer.
 */
enum ModuloStatus modulo_algebra_from_lattice(const char *src, struct ModuloAlgebra **out);

/*
 # Safety
 `a` must come from an algebra constructor and not be used afterwards.
 */
void modulo_algebra_free(struct ModuloAlgebra *a);

/*
 Checks the truth values algebra laws. Returns `LogicalFailure` if a law
 other than antisymmetry fails.

 # Safety
 `a` must be a live handle and `report` a valid pointer.
 */
enum ModuloStatus modulo_algebra_laws(const struct ModuloAlgebra *a, char **report);

/*
 Looks for a model of the theory in the algebra. Returns
 `LogicalFailure` if there is none at this domain size.

 # Safety
 `t` and `a` must be live handles and `report` a valid pointer.
 */
enum ModuloStatus modulo_model_find(const struct ModuloTheory *t,
                                    const struct ModuloAlgebra *a,
                                    size_t domain_size,
                                    char **report);

/*
 The message of the last failed call on this thread, or null. The
 pointer stays valid until the next call into this library on the same
 thread.
 */
const char *modulo_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void modulo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODULO_H */

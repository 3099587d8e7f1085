#ifndef XLIE_H
#define XLIE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum XlieStatus {
  XLIE_STATUS_OK = 0,
  /* Checked and found negative: invalid module, violated witness, not isoclinic. */
  XLIE_STATUS_NEGATIVE = 1,
  /* Malformed document or argument. */
  XLIE_STATUS_INVALID_INPUT = 2,
  XLIE_STATUS_BUDGET_EXHAUSTED = 3,
  XLIE_STATUS_NULL_POINTER = 4,
  /* A Rust panic was caught at the boundary. */
  XLIE_STATUS_PANIC = 5
} XlieStatus;

/* Opaque crossed module. */
typedef struct XlieXMod XlieXMod;

/* Library version as a static NUL-terminated string. */
const char *xlie_version(void);

/* Message for the last failing call on this thread; empty after a success.
 * Valid until the next call into the library on the same thread. */
const char *xlie_last_error_message(void);

void xlie_string_free(char *s);

/* Parses a crossed-module document. The axioms are not checked here. */
XlieStatus xlie_xmod_from_json(const char *json, XlieXMod **out);

void xlie_xmod_free(XlieXMod *x);

XlieStatus xlie_xmod_to_json(const XlieXMod *x, char **out);

XlieStatus xlie_xmod_dims(const XlieXMod *x, size_t *n1, size_t *n0);

/* XLIE_STATUS_OK if every axiom holds, XLIE_STATUS_NEGATIVE otherwise. If
 * report is not NULL it receives a JSON array of {axiom, detail} violations. */
XlieStatus xlie_xmod_validate(const XlieXMod *x, char **report);

/* Builds the catalog crossed module `name` over `field` ("Q", "F_p"). */
XlieStatus xlie_catalog_emit(const char *name, const char *field, XlieXMod **out);

/* Isoclinism invariants of a valid crossed module, as JSON. */
XlieStatus xlie_fingerprint_json(const XlieXMod *x, char **out);

/* Checks a witness document for x ~ y. */
XlieStatus xlie_isoclinism_verify(const XlieXMod *x, const XlieXMod *y, const char *witness_json);

/* Searches for an isoclinism x ~ y over a prime field. On XLIE_STATUS_OK the
 * witness document is written to witness_json. jobs = 0 is treated as 1. */
XlieStatus xlie_isoclinism_search(const XlieXMod *x,
                                  const XlieXMod *y,
                                  uint64_t budget,
                                  size_t jobs,
                                  char **witness_json);

#ifdef __cplusplus
}
#endif

#endif

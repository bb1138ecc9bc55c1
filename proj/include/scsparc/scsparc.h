/* Shared-library interface for the spatially coupled sparse regression code
 * laboratory.  Opaque handles plus status codes; strings returned through
 * output parameters are owned by the caller and released with
 * scsparc_string_free.  Error details for the calling thread are available
 * from scsparc_last_error.
 */
#ifndef SCSPARC_H
#define SCSPARC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scsparc_status {
  SCSPARC_OK = 0,
  SCSPARC_ERR_PARAM = 2,
  SCSPARC_ERR_EXPERIMENT = 3,
  SCSPARC_ERR_NUMERIC = 4,
  SCSPARC_ERR_RESOURCE = 5,
  SCSPARC_ERR_DIVERGED = 6
} scsparc_status;

const char* scsparc_version(void);
const char* scsparc_last_error(void);
void scsparc_string_free(char* s);

/* ---- channels ---------------------------------------------------------- */

typedef struct scsparc_channel scsparc_channel;

/* kind: "awgn" | "bec" | "bsc"; param: noise variance or erasure/flip
 * probability. */
scsparc_status scsparc_channel_create(const char* kind, double param, scsparc_channel** out);
void scsparc_channel_free(scsparc_channel* ch);

scsparc_status scsparc_channel_capacity(const scsparc_channel* ch, double* nats);
/* Entropy-based cross-check H(Y) - H(Y|Z); discrete-output channels only. */
scsparc_status scsparc_channel_capacity_entropy(const scsparc_channel* ch, double* nats);
scsparc_status scsparc_channel_f_out(const scsparc_channel* ch, double sigma, double* value);
scsparc_status scsparc_channel_psi_out(const scsparc_channel* ch, double sigma, double* value);
scsparc_status scsparc_channel_g_out(const scsparc_channel* ch, double p, double y, double sigma,
                                     double* value);
scsparc_status scsparc_channel_sample(const scsparc_channel* ch, double u,
                                      unsigned long long seed, double* y);

/* ---- base matrix ------------------------------------------------------- */

/* CSV of the gamma x gamma variance profile plus a JSON header with
 * {gamma, omega, rho, row_sums}. */
scsparc_status scsparc_base_matrix_csv(int gamma, int omega, double rho, char** csv,
                                       char** header_json);

/* ---- JSON-driven runs --------------------------------------------------
 * config_json follows the experiment configuration schema documented in the
 * project README (channel, code geometry, rate, trials, seeds, sweep).
 */

/* State evolution: per-iteration CSV (t,c,psi,tau,r,sigma,phi) and a JSON
 * summary. */
scsparc_status scsparc_se_run(const char* config_json, char** csv, char** summary_json);

/* Decoding-wave analysis report as JSON. */
scsparc_status scsparc_wave_report(const char* config_json, char** report_json);

/* One decode; JSON array of per-iteration records
 * {t, mse_empirical, mse_se, ser_running}. */
scsparc_status scsparc_decode(const char* config_json, char** records_json);

/* Monte Carlo experiment; writes results.csv, summary.json,
 * se_trajectory.csv and timings.csv into output_dir (created if needed) and
 * returns the summary. */
scsparc_status scsparc_simulate(const char* config_json, const char* output_dir,
                                char** summary_json);

/* Generalized-linear-model run (prior + coupled design): JSON summary. */
scsparc_status scsparc_glm_run(const char* config_json, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* SCSPARC_H */

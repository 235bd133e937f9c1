#pragma once

#include <vector>

#include "uavris/linalg.hpp"

namespace uavris {

// Combined direct-plus-cascaded channel, one row per served entity
// (users in OMA, cluster representatives in NOMA). rows = H^H.
struct CombinedChannel {
  CMat rows;  // K x M (or L x M)
};

// Columns of the zero-forcing precoder G = H (H^H H)^-1 (M x K).
struct Precoder {
  CMat columns;
};

struct Cluster {
  int strong = -1;              // user index decoding with SIC
  int weak = -1;                // user index decoding directly
  double alpha_strong = 0.5;    // power split, alpha_strong + alpha_weak = 1
  double alpha_weak = 0.5;
  double power_mw = 0.0;        // P_l
  bool sic_feasible = true;     // decoding-rate condition verified
};

// Pairing plus per-cluster power bookkeeping for the NOMA pipeline.
struct ClusterPlan {
  std::vector<Cluster> clusters;
};

inline constexpr double kDefaultZfConditionCap = 1e8;

// G = H (H^H H)^-1 from rows H^H. Throws SingularMatrixError when the
// channel is rank deficient or its condition estimate exceeds cond_cap.
Precoder zf_precoder(const CombinedChannel& h, double cond_cap = kDefaultZfConditionCap);

// Per-user rates under exact ZF: R_k = B_k log2(1 + p_k / sigma2).
std::vector<double> oma_rates(const std::vector<double>& powers_mw, double sigma2_mw,
                              const std::vector<double>& bandwidth_hz);

// General SINR of the OMA downlink for an arbitrary precoder (the quotient
// with residual inter-user interference).
std::vector<double> oma_sinr_general(const CombinedChannel& h, const Precoder& g,
                                     const std::vector<double>& powers_mw,
                                     double sigma2_mw);

// Sorts users by channel gain and pairs strongest with weakest. K must be
// 2L. Gains ties break by lower user index. alphas/powers are filled by the
// caller; the skeleton sets strong/weak ordering by gain only.
ClusterPlan cluster_users(const std::vector<double>& channel_gains, int n_clusters);

// Effective gain |h_i^H w_l|^2 of user row i against precoder column l.
double effective_gain(const CMat& user_rows, int user, const Precoder& w, int column);

// Validates (and if needed swaps) each cluster's decoding order against the
// decoding-rate condition gamma_{b->a} >= gamma_{b->b}, computed with the
// given precoder and per-cluster powers. Clusters failing both orders are
// flagged sic_feasible = false. user_rows holds all K combined rows.
ClusterPlan decide_decoding_order(const ClusterPlan& plan, const CMat& user_rows,
                                  const Precoder& w, double sigma2_mw);

// Checks the decoding-rate condition for the plan's orders as given,
// without swapping (fixed-decoding-order baseline).
ClusterPlan validate_decoding_order(const ClusterPlan& plan, const CMat& user_rows,
                                    const Precoder& w, double sigma2_mw);

// Per-user NOMA rates. Strong user: SIC removes intra-cluster interference,
// leaving inter-cluster leakage plus noise (reduces to alpha_a P_l / sigma2
// under exact ZF for the representative). Weak user: direct decoding with
// the strong user's share as intra-cluster interference. SIC-infeasible
// clusters contribute zero for both members.
std::vector<double> noma_rates(const ClusterPlan& plan, const CMat& user_rows,
                               const Precoder& w, double sigma2_mw,
                               double bandwidth_hz);

// SINR at user `listener` when decoding the signal of the user carrying
// power share alpha_signal in cluster l; the share alpha_self stays as
// interference. Exposed for the decoding-order tests.
double decode_sinr(const CMat& user_rows, int listener, const Precoder& w,
                   int cluster, double alpha_signal, double alpha_self,
                   const std::vector<double>& cluster_powers_mw, double sigma2_mw);

// Eq.-21f-style budget: trace(diag(p) (H^H H)^-1) <= p_max.
bool check_power_budget(const std::vector<double>& powers_mw,
                        const CombinedChannel& h, double p_max_mw);
double power_budget_trace(const std::vector<double>& powers_mw,
                          const CombinedChannel& h);

}  // namespace uavris

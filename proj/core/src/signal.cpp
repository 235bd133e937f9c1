#include "uavris/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavris {

Precoder zf_precoder(const CombinedChannel& h, double cond_cap) {
  const CMat& rows = h.rows;  // H^H, K x M
  if (rows.rows == 0 || rows.cols == 0)
    throw std::invalid_argument("zf_precoder: empty channel");
  if (rows.rows > rows.cols)
    throw SingularMatrixError("zf_precoder: more rows than antennas (K > M)");

  const CMat h_mat = adjoint(rows);            // H, M x K
  const CMat gram = matmul(rows, h_mat);       // H^H H, K x K
  const double cond = condition_1(gram);
  // cond(H)^2 ~ cond(H^H H); cap is quoted on the channel itself.
  if (!(std::sqrt(cond) < cond_cap))
    throw SingularMatrixError("zf_precoder: channel condition estimate " +
                              std::to_string(std::sqrt(cond)) +
                              " exceeds cap");
  Precoder g;
  g.columns = matmul(h_mat, inverse(gram));    // H (H^H H)^-1, M x K
  return g;
}

std::vector<double> oma_rates(const std::vector<double>& powers_mw, double sigma2_mw,
                              const std::vector<double>& bandwidth_hz) {
  if (powers_mw.size() != bandwidth_hz.size())
    throw std::invalid_argument("oma_rates: powers/bandwidth size mismatch");
  std::vector<double> rates(powers_mw.size());
  for (size_t k = 0; k < powers_mw.size(); ++k)
    rates[k] = bandwidth_hz[k] * std::log2(1.0 + powers_mw[k] / sigma2_mw);
  return rates;
}

std::vector<double> oma_sinr_general(const CombinedChannel& h, const Precoder& g,
                                     const std::vector<double>& powers_mw,
                                     double sigma2_mw) {
  const int k_users = h.rows.rows;
  const CMat prod = matmul(h.rows, g.columns);  // K x K, entry (k,j) = h_k^H g_j
  std::vector<double> sinr(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double sig = powers_mw[k] * std::norm(prod.at(k, k));
    double interf = 0.0;
    for (int j = 0; j < k_users; ++j)
      if (j != k) interf += powers_mw[j] * std::norm(prod.at(k, j));
    sinr[k] = sig / (interf + sigma2_mw);
  }
  return sinr;
}

ClusterPlan cluster_users(const std::vector<double>& channel_gains, int n_clusters) {
  const int k_users = static_cast<int>(channel_gains.size());
  if (k_users != 2 * n_clusters)
    throw std::invalid_argument("cluster_users: K must equal 2L");
  std::vector<int> order(k_users);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return channel_gains[a] > channel_gains[b];
  });
  ClusterPlan plan;
  plan.clusters.resize(n_clusters);
  for (int l = 0; l < n_clusters; ++l) {
    plan.clusters[l].strong = order[l];
    plan.clusters[l].weak = order[k_users - 1 - l];
  }
  return plan;
}

double effective_gain(const CMat& user_rows, int user, const Precoder& w, int column) {
  cplx acc = 0.0;
  for (int a = 0; a < user_rows.cols; ++a)
    acc += user_rows.at(user, a) * w.columns.at(a, column);
  return std::norm(acc);
}

double decode_sinr(const CMat& user_rows, int listener, const Precoder& w,
                   int cluster, double alpha_signal, double alpha_self,
                   const std::vector<double>& cluster_powers_mw, double sigma2_mw) {
  const double own = effective_gain(user_rows, listener, w, cluster);
  const double p_l = cluster_powers_mw[cluster];
  double inter = 0.0;
  for (size_t j = 0; j < cluster_powers_mw.size(); ++j)
    if (static_cast<int>(j) != cluster)
      inter += effective_gain(user_rows, listener, w, static_cast<int>(j)) *
               cluster_powers_mw[j];
  return own * alpha_signal * p_l / (own * alpha_self * p_l + inter + sigma2_mw);
}

namespace {

// Decoding-rate condition for a candidate (strong, weak, alpha) assignment:
// the strong user must decode the weak user's signal at least as well as
// the weak user itself can.
bool order_valid(const CMat& user_rows, const Precoder& w, int l, int strong,
                 int weak, double alpha_strong, double alpha_weak,
                 const std::vector<double>& cluster_powers, double sigma2) {
  const double at_strong = decode_sinr(user_rows, strong, w, l, alpha_weak,
                                       alpha_strong, cluster_powers, sigma2);
  const double at_weak = decode_sinr(user_rows, weak, w, l, alpha_weak,
                                     alpha_strong, cluster_powers, sigma2);
  return at_strong >= at_weak;
}

std::vector<double> cluster_powers_of(const ClusterPlan& plan) {
  std::vector<double> p(plan.clusters.size());
  for (size_t l = 0; l < p.size(); ++l) p[l] = plan.clusters[l].power_mw;
  return p;
}

}  // namespace

ClusterPlan decide_decoding_order(const ClusterPlan& plan, const CMat& user_rows,
                                  const Precoder& w, double sigma2_mw) {
  ClusterPlan out = plan;
  const std::vector<double> powers = cluster_powers_of(plan);
  for (size_t l = 0; l < out.clusters.size(); ++l) {
    Cluster& c = out.clusters[l];
    const int li = static_cast<int>(l);
    // Candidate order by effective gain; ties keep the lower user index
    // in the strong slot.
    const double g_strong = effective_gain(user_rows, c.strong, w, li);
    const double g_weak = effective_gain(user_rows, c.weak, w, li);
    bool swapped = g_weak > g_strong ||
                   (g_weak == g_strong && c.weak < c.strong);
    if (swapped) {
      std::swap(c.strong, c.weak);
      std::swap(c.alpha_strong, c.alpha_weak);
    }
    if (order_valid(user_rows, w, li, c.strong, c.weak, c.alpha_strong,
                    c.alpha_weak, powers, sigma2_mw)) {
      c.sic_feasible = true;
      continue;
    }
    std::swap(c.strong, c.weak);
    std::swap(c.alpha_strong, c.alpha_weak);
    c.sic_feasible = order_valid(user_rows, w, li, c.strong, c.weak,
                                 c.alpha_strong, c.alpha_weak, powers, sigma2_mw);
    if (!c.sic_feasible) {
      // Restore the gain-ranked order for reporting.
      std::swap(c.strong, c.weak);
      std::swap(c.alpha_strong, c.alpha_weak);
    }
  }
  return out;
}

ClusterPlan validate_decoding_order(const ClusterPlan& plan, const CMat& user_rows,
                                    const Precoder& w, double sigma2_mw) {
  ClusterPlan out = plan;
  const std::vector<double> powers = cluster_powers_of(plan);
  for (size_t l = 0; l < out.clusters.size(); ++l) {
    Cluster& c = out.clusters[l];
    c.sic_feasible = order_valid(user_rows, w, static_cast<int>(l), c.strong,
                                 c.weak, c.alpha_strong, c.alpha_weak, powers,
                                 sigma2_mw);
  }
  return out;
}

std::vector<double> noma_rates(const ClusterPlan& plan, const CMat& user_rows,
                               const Precoder& w, double sigma2_mw,
                               double bandwidth_hz) {
  std::vector<double> rates(user_rows.rows, 0.0);
  const std::vector<double> powers = cluster_powers_of(plan);
  for (size_t l = 0; l < plan.clusters.size(); ++l) {
    const Cluster& c = plan.clusters[l];
    if (!c.sic_feasible || c.power_mw <= 0.0) continue;
    const int li = static_cast<int>(l);
    // Strong user after SIC: intra-cluster interference removed.
    const double sinr_strong = decode_sinr(user_rows, c.strong, w, li,
                                           c.alpha_strong, 0.0, powers, sigma2_mw);
    // Weak user decodes directly under the strong user's share.
    const double sinr_weak = decode_sinr(user_rows, c.weak, w, li, c.alpha_weak,
                                         c.alpha_strong, powers, sigma2_mw);
    rates[c.strong] = bandwidth_hz * std::log2(1.0 + sinr_strong);
    rates[c.weak] = bandwidth_hz * std::log2(1.0 + sinr_weak);
  }
  return rates;
}

double power_budget_trace(const std::vector<double>& powers_mw,
                          const CombinedChannel& h) {
  if (static_cast<int>(powers_mw.size()) != h.rows.rows)
    throw std::invalid_argument("power_budget_trace: power count mismatch");
  const CMat gram = matmul(h.rows, adjoint(h.rows));  // H^H H
  const CMat inv = inverse(gram);                     // throws when singular
  double trace = 0.0;
  for (int k = 0; k < gram.rows; ++k) trace += powers_mw[k] * inv.at(k, k).real();
  return trace;
}

bool check_power_budget(const std::vector<double>& powers_mw,
                        const CombinedChannel& h, double p_max_mw) {
  return power_budget_trace(powers_mw, h) <= p_max_mw;
}

}  // namespace uavris

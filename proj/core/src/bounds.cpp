#include "covqec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace covqec {

std::string to_string(BoundTheorem t) {
  switch (t) {
    case BoundTheorem::T1: return "T1";
    case BoundTheorem::T2Worst: return "T2-worst";
    case BoundTheorem::T2Choi: return "T2-choi";
    case BoundTheorem::Local: return "local";
    case BoundTheorem::SingleError: return "single-error";
    case BoundTheorem::MultiError: return "multi-error";
    case BoundTheorem::EastinKnill: return "eastin-knill";
  }
  return "unknown";
}

bool BoundReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

double ell1_forward(double eps) {
  if (eps < 0.0 || eps >= 0.5) throw std::domain_error("ell1_forward: eps must lie in [0, 1/2)");
  return eps * (1.0 - eps) / ((1.0 - 2.0 * eps) * (1.0 - 2.0 * eps));
}

double ell1(double x) {
  if (std::isnan(x) || x < 0.0) throw std::domain_error("ell1: argument must be non-negative");
  if (std::isinf(x)) return 0.5;
  // (1 + 4x - sqrt(1 + 4x)) / (2(1 + 4x)) rearranged to avoid cancellation.
  double s = std::sqrt(1.0 + 4.0 * x);
  return 2.0 * x / (s * (1.0 + s));
}

double ell3_constant(int d_l, double delta_hl, double tr_hl_sq) {
  if (d_l < 2 || !(tr_hl_sq > 0.0)) throw std::domain_error("ell3: need d_L >= 2 and Tr H_L^2 > 0");
  return 3.0 * d_l * delta_hl * delta_hl / (2.0 * tr_hl_sq);
}

double ell_domain_edge(double c) { return 1.0 / (2.0 * c * c); }

namespace {

double proof_forward(double eps, double c) {
  if (eps < 0.0 || eps >= ell_domain_edge(c))
    throw std::domain_error("forward map evaluated outside its interval");
  return eps / ((1.0 - 3.0 * eps + eps * eps) * (1.0 - c * std::sqrt(2.0 * eps)));
}

EllValue proof_inverse(double x, double c) {
  if (std::isnan(x) || x < 0.0) throw std::domain_error("ell2/ell3: argument must be non-negative");
  const double edge = ell_domain_edge(c);
  if (std::isinf(x)) return {edge, true};
  if (x == 0.0) return {0.0, false};
  double lo = 0.0, hi = edge;
  for (int i = 0; i < 400 && hi - lo > 1e-17; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid >= edge) break;
    if (proof_forward(mid, c) < x) lo = mid;
    else hi = mid;
  }
  double v = 0.5 * (lo + hi);
  bool sat = v >= edge * (1.0 - 1e-12);
  return {std::min(v, edge), sat};
}

} // namespace

double ell2_forward(double eps) { return proof_forward(eps, 6.0); }

double ell3_forward(double eps, int d_l, double delta_hl, double tr_hl_sq) {
  return proof_forward(eps, ell3_constant(d_l, delta_hl, tr_hl_sq));
}

EllValue ell2_checked(double x) { return proof_inverse(x, 6.0); }

EllValue ell3_checked(double x, int d_l, double delta_hl, double tr_hl_sq) {
  return proof_inverse(x, ell3_constant(d_l, delta_hl, tr_hl_sq));
}

double ell2(double x) { return ell2_checked(x).value; }

double ell3(double x, int d_l, double delta_hl, double tr_hl_sq) {
  return ell3_checked(x, d_l, delta_hl, tr_hl_sq).value;
}

namespace {

BoundReport no_bound(BoundTheorem th, const QfiValue& q, const std::string& why) {
  BoundReport r;
  r.theorem = th;
  r.qfi_used = q;
  r.argument_x = std::numeric_limits<double>::quiet_NaN();
  r.epsilon_lower = 0.0;
  r.flags = {kFlagNoBound, why};
  return r;
}

// Shared tail of every l1 bound: x = numerator / F.
BoundReport ell1_report(BoundTheorem th, double numerator, double f) {
  BoundReport r;
  r.theorem = th;
  r.qfi_used = QfiValue::finite(f, ComplexMatrix());
  if (numerator == 0.0) {
    r.argument_x = 0.0;
    r.epsilon_lower = 0.0;
    r.flags.push_back("trivial logical Hamiltonian");
  } else if (f == 0.0) {
    r.argument_x = std::numeric_limits<double>::infinity();
    r.epsilon_lower = 0.5;
    r.flags.push_back("vanishing QFI");
  } else {
    r.argument_x = numerator / f;
    r.epsilon_lower = ell1(r.argument_x);
  }
  return r;
}

} // namespace

BoundReport theorem1_from_qfi(const QfiValue& qfi, double delta_hl) {
  if (!qfi.is_finite()) {
    auto r = no_bound(BoundTheorem::T1, qfi, "HKS condition violated");
    r.inputs["delta_hl"] = delta_hl;
    return r;
  }
  BoundReport r = ell1_report(BoundTheorem::T1, delta_hl * delta_hl / 4.0, qfi.value());
  r.qfi_used = qfi;
  r.inputs["delta_hl"] = delta_hl;
  return r;
}

BoundReport theorem1_bound(const Channel& ch, const Hamiltonian& h_s, double delta_hl) {
  if (delta_hl < 0.0) throw std::invalid_argument("theorem1_bound: delta_hl must be non-negative");
  BoundReport r = theorem1_from_qfi(sld_qfi_channel_regularized(ch, h_s), delta_hl);
  r.inputs["delta_hs"] = h_s.delta();
  r.inputs["d_in"] = ch.d_in();
  r.inputs["d_out"] = ch.d_out();
  return r;
}

std::pair<BoundReport, BoundReport> theorem2_bounds(const Channel& ch, const Hamiltonian& h_s,
                                                    const Hamiltonian& h_l,
                                                    Theorem2Assumptions assumptions) {
  QfiValue fr = rld_qfi_channel(ch, h_s);
  nlohmann::json inputs = {{"delta_hl", h_l.delta()},
                           {"tr_hl_sq", h_l.trace_sq()},
                           {"d_l", h_l.dim()},
                           {"delta_hs", h_s.delta()}};
  std::vector<std::string> flags;
  flags.push_back(assumptions.noise_commutes_with_symmetry
                      ? "assumed: noise commutes with the symmetry"
                      : "not asserted: noise commutes with the symmetry");
  flags.push_back(assumptions.common_period ? "assumed: common period"
                                            : "not asserted: common period");

  BoundReport worst, choi;
  if (!fr.is_finite()) {
    worst = no_bound(BoundTheorem::T2Worst, fr, "condition (R) violated");
    choi = no_bound(BoundTheorem::T2Choi, fr, "condition (R) violated");
  } else {
    double f = fr.value();
    worst.theorem = BoundTheorem::T2Worst;
    choi.theorem = BoundTheorem::T2Choi;
    worst.qfi_used = fr;
    choi.qfi_used = fr;
    if (h_l.is_zero()) {
      worst.flags.push_back("trivial logical Hamiltonian");
      choi.flags.push_back("trivial logical Hamiltonian");
    } else if (f == 0.0) {
      worst.argument_x = choi.argument_x = std::numeric_limits<double>::infinity();
      auto w = ell2_checked(worst.argument_x);
      auto c = ell3_checked(choi.argument_x, h_l.dim(), h_l.delta(), h_l.trace_sq());
      worst.epsilon_lower = w.value;
      choi.epsilon_lower = c.value;
      worst.flags = {"vanishing QFI", kFlagSaturated};
      choi.flags = {"vanishing QFI", kFlagSaturated};
    } else {
      worst.argument_x = h_l.delta() * h_l.delta() / (4.0 * f);
      choi.argument_x = h_l.trace_sq() / (h_l.dim() * f);
      auto w = ell2_checked(worst.argument_x);
      auto c = ell3_checked(choi.argument_x, h_l.dim(), h_l.delta(), h_l.trace_sq());
      worst.epsilon_lower = w.value;
      choi.epsilon_lower = c.value;
      if (w.saturated) worst.flags.push_back(kFlagSaturated);
      if (c.saturated) choi.flags.push_back(kFlagSaturated);
    }
  }
  for (auto* r : {&worst, &choi}) {
    r->inputs = inputs;
    r->flags.insert(r->flags.end(), flags.begin(), flags.end());
  }
  return {worst, choi};
}

BoundReport local_bound(const std::vector<Channel>& site_channels,
                        const std::vector<Hamiltonian>& site_hams, double delta_hl) {
  if (site_channels.size() != site_hams.size() || site_channels.empty())
    throw std::invalid_argument("local_bound: need one Hamiltonian per site");
  double total = 0.0;
  nlohmann::json per_site = nlohmann::json::array();
  for (size_t k = 0; k < site_channels.size(); ++k) {
    QfiValue q = sld_qfi_channel_regularized(site_channels[k], site_hams[k]);
    if (!q.is_finite()) {
      auto r = no_bound(BoundTheorem::Local, q, "HKS condition violated at site " + std::to_string(k));
      r.inputs["delta_hl"] = delta_hl;
      return r;
    }
    per_site.push_back(q.value());
    total += q.value();
  }
  BoundReport r = ell1_report(BoundTheorem::Local, delta_hl * delta_hl / 4.0, total);
  r.inputs = {{"delta_hl", delta_hl}, {"site_qfi", per_site}};
  return r;
}

std::string to_string(SingleErrorFlavor f) {
  switch (f) {
    case SingleErrorFlavor::Erasure: return "erasure";
    case SingleErrorFlavor::DepolarizingQubit: return "depolarizing-qubit";
    case SingleErrorFlavor::Generic: return "generic";
  }
  return "unknown";
}

SingleErrorFlavor single_error_flavor_from_string(const std::string& s) {
  if (s == "erasure") return SingleErrorFlavor::Erasure;
  if (s == "depolarizing-qubit" || s == "depolarizing") return SingleErrorFlavor::DepolarizingQubit;
  if (s == "generic") return SingleErrorFlavor::Generic;
  throw std::invalid_argument("unknown single-error flavor '" + s + "'");
}

SingleErrorLimit single_error_site_limit(double q, const Channel& error, const Hamiltonian& h) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("single_error_site_limit: q must lie in (0,1]");
  if (error.d_out() < error.d_in())
    throw std::invalid_argument("single_error_site_limit: error output must contain the input space");
  ComplexMatrix embed = ComplexMatrix::Zero(error.d_out(), error.d_in());
  embed.topRows(error.d_in()) = ComplexMatrix::Identity(error.d_in(), error.d_in());
  Channel keep = isometry_channel(embed);

  SingleErrorLimit out;
  const double deltas[3] = {1e-2, 1e-3, 1e-4};
  for (double d : deltas) {
    Channel n = mixture({1.0 - d * q, d * q}, {keep, error});
    QfiValue f = sld_qfi_channel_regularized(n, h);
    if (!f.is_finite()) throw std::domain_error("single_error_site_limit: HKS violated for N(delta)");
    out.samples.push_back(d * f.value());
  }
  // Linear extrapolation in delta from the two smallest samples; the spread between
  // the two available extrapolations is reported as the residual.
  auto extrap = [](double d1, double f1, double d2, double f2) { return (d2 * f1 - d1 * f2) / (d2 - d1); };
  double coarse = extrap(deltas[0], out.samples[0], deltas[1], out.samples[1]);
  out.value = extrap(deltas[1], out.samples[1], deltas[2], out.samples[2]);
  out.residual = std::abs(out.value - coarse);
  return out;
}

BoundReport single_error_bound(const std::vector<SiteError>& site_errors,
                               const std::vector<Hamiltonian>& site_hams, double delta_hl,
                               SingleErrorFlavor flavor) {
  if (site_errors.size() != site_hams.size() || site_errors.empty())
    throw std::invalid_argument("single_error_bound: need one Hamiltonian per site");
  double qsum = 0.0;
  for (const auto& e : site_errors) qsum += e.q;
  nlohmann::json inputs = {{"delta_hl", delta_hl}, {"flavor", to_string(flavor)}, {"n", site_errors.size()}};
  std::vector<std::string> flags;
  if (std::abs(qsum - 1.0) > 1e-9) flags.push_back("site probabilities do not sum to 1");

  // Limit of delta * sum_k F(N_k(delta)).
  double s = 0.0;
  nlohmann::json per_site = nlohmann::json::array();
  double worst_residual = 0.0;
  for (size_t k = 0; k < site_errors.size(); ++k) {
    const auto& e = site_errors[k];
    double dh = site_hams[k].delta();
    double v = 0.0;
    switch (flavor) {
      case SingleErrorFlavor::Erasure: v = dh * dh / e.q; break;
      case SingleErrorFlavor::DepolarizingQubit: v = 2.0 * dh * dh / (3.0 * e.q); break;
      case SingleErrorFlavor::Generic: {
        auto lim = single_error_site_limit(e.q, e.error, site_hams[k]);
        v = lim.value;
        worst_residual = std::max(worst_residual, lim.residual);
        break;
      }
    }
    per_site.push_back(v);
    s += v;
  }
  inputs["site_limits"] = per_site;
  if (flavor == SingleErrorFlavor::Generic) inputs["extrapolation_residual"] = worst_residual;

  BoundReport r = ell1_report(BoundTheorem::SingleError, delta_hl * delta_hl / 4.0, s);
  r.inputs = inputs;
  r.flags.insert(r.flags.end(), flags.begin(), flags.end());
  return r;
}

MultiErrorResult multi_error_qfi_upper(const std::vector<ErrorBlock>& blocks, bool hamiltonians_commute) {
  MultiErrorResult out;
  if (!hamiltonians_commute) out.flags.push_back("block Hamiltonians not asserted to commute");
  double qsum = 0.0;
  for (const auto& b : blocks) {
    qsum += b.q;
    if (b.h.dim() != b.error.d_in()) throw std::invalid_argument("multi_error_qfi_upper: block dimension mismatch");
    SpanCheck hks = hks_check(b.error, b.h);
    if (!hks.satisfied) throw std::domain_error("multi_error_qfi_upper: HKS violated in a block");
    double v = 0.0;
    if (!b.h.is_zero()) {
      std::vector<ComplexMatrix> k, g;
      for (const auto& kk : b.error.kraus()) {
        k.push_back(std::sqrt(b.q) * kk);
        g.push_back(ComplexMatrix::Zero(kk.rows(), kk.cols()));
      }
      v = minimize_alpha_norm(k, g, b.h.matrix()).objective;
    }
    out.per_block.push_back(v);
    out.value += v;
  }
  if (std::abs(qsum - 1.0) > 1e-9) out.flags.push_back("block probabilities do not sum to 1");
  return out;
}

BoundReport multi_error_bound(const std::vector<ErrorBlock>& blocks, double delta_hl,
                              bool hamiltonians_commute) {
  MultiErrorResult res = multi_error_qfi_upper(blocks, hamiltonians_commute);
  BoundReport r = ell1_report(BoundTheorem::MultiError, delta_hl * delta_hl / 4.0, res.value);
  r.inputs = {{"delta_hl", delta_hl}, {"blocks", blocks.size()}, {"per_block", res.per_block}};
  r.flags.insert(r.flags.end(), res.flags.begin(), res.flags.end());
  return r;
}

namespace {

void combinations(int n, int t, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == t) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, t, i + 1, cur, out);
    cur.pop_back();
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

} // namespace

std::vector<ErrorBlock> uniform_erasure_blocks(int n, int t, const Hamiltonian& local_h) {
  if (t < 1 || t > n) throw std::invalid_argument("uniform_erasure_blocks: need 1 <= t <= n");
  const int d = local_h.dim();
  int dim = 1;
  for (int i = 0; i < t; ++i) dim *= d;
  std::vector<std::vector<int>> subsets;
  std::vector<int> cur;
  combinations(n, t, 0, cur, subsets);
  const double q = 1.0 / static_cast<double>(subsets.size());
  const double share = 1.0 / binomial(n - 1, t - 1);

  // Erasing every site of the block leaves a single vacuum state.
  std::vector<ComplexMatrix> kraus;
  for (int i = 0; i < dim; ++i) {
    ComplexMatrix k = ComplexMatrix::Zero(1, dim);
    k(0, i) = 1.0;
    kraus.push_back(k);
  }
  Channel erase_all(kraus);
  ComplexMatrix hblock = ComplexMatrix::Zero(dim, dim);
  for (int pos = 0; pos < t; ++pos) {
    std::vector<ComplexMatrix> f(static_cast<size_t>(t), ComplexMatrix::Identity(d, d));
    f[static_cast<size_t>(pos)] = local_h.matrix();
    hblock += share * kron_all(f);
  }
  Hamiltonian hb(hblock);
  std::vector<ErrorBlock> out;
  for (auto& s : subsets) out.push_back({s, q, erase_all, hb});
  return out;
}

double multi_error_erasure_closed_form(int n, const Hamiltonian& local_h) {
  return 4.0 * local_h.opnorm() * local_h.opnorm() * n * n;
}

EastinKnillResult eastin_knill_bound(int n, const std::vector<int>& site_dims, int d_l) {
  if (d_l < 2) throw std::invalid_argument("eastin_knill_bound: need d_L >= 2");
  if (n < 1 || static_cast<int>(site_dims.size()) != n)
    throw std::invalid_argument("eastin_knill_bound: need one dimension per site");
  double s = 0.0, s_ln = 0.0;
  for (int dk : site_dims) {
    if (dk < 2) throw std::invalid_argument("eastin_knill_bound: site dimensions must be >= 2");
    double lnd = std::log(static_cast<double>(dk));
    double e = (std::exp(lnd / (d_l - 1.0)) - 1.0) * (d_l - 1.0);
    s += e * e;
    s_ln += lnd * lnd;
  }
  EastinKnillResult out;
  out.report.theorem = BoundTheorem::EastinKnill;
  out.report.argument_x = 1.0 / (4.0 * n * s);
  out.report.epsilon_lower = ell1(out.report.argument_x);
  out.report.inputs = {{"n", n}, {"site_dims", site_dims}, {"d_l", d_l}};
  out.approx_x = 1.0 / (4.0 * n * s_ln);
  out.approx_epsilon = ell1(out.approx_x);
  return out;
}

} // namespace covqec

#include "verify_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <locale>
#include <numbers>
#include <sstream>

#include "covqec/bounds.hpp"
#include "covqec/codes.hpp"
#include "covqec/encoded.hpp"
#include "covqec/qfi.hpp"
#include "covqec/recovery.hpp"

namespace covqec::verify {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(6);
  s << v;
  return s.str();
}

class Recorder {
public:
  Recorder(std::vector<Check>& out, double scale) : out_(out), scale_(scale) {}

  void close(const std::string& what, double measured, double expected, double tol) {
    double t = tol * scale_;
    double dev = std::abs(measured - expected);
    push(what, measured, expected, t, dev <= t, ratio(dev, t));
  }
  void relative(const std::string& what, double measured, double expected, double rel) {
    close(what, measured, expected, rel * std::abs(expected));
  }
  // lhs <= rhs + slack
  void at_most(const std::string& what, double lhs, double rhs, double slack) {
    double t = slack * scale_;
    double excess = lhs - rhs;
    push(what, lhs, rhs, t, excess <= t, excess <= 0 ? 0.0 : ratio(excess, t));
  }
  void in_range(const std::string& what, double measured, double lo, double hi) {
    double center = 0.5 * (lo + hi);
    close(what, measured, center, 0.5 * (hi - lo));
  }
  void holds(const std::string& what, bool ok) {
    push(what, ok ? 1.0 : 0.0, 1.0, 0.0, ok, ok ? 0.0 : std::numeric_limits<double>::infinity());
  }

private:
  static double ratio(double dev, double tol) {
    if (dev == 0.0) return 0.0;
    return tol > 0.0 ? dev / tol : std::numeric_limits<double>::infinity();
  }
  void push(const std::string& what, double m, double e, double t, bool pass, double load) {
    out_.push_back({what, m, e, t, pass, load});
  }
  std::vector<Check>& out_;
  double scale_;
};

Hamiltonian sz(int d) {
  std::vector<double> e(d);
  for (int i = 0; i < d; ++i) e[i] = d - 1 - 2.0 * i;
  return Hamiltonian::diagonal(e);
}

double choi_distance(const Channel& a, const Channel& b) {
  return (choi(a) - choi(b)).cwiseAbs().maxCoeff();
}

const std::vector<double> kGrid = {0.1, 0.3, 0.5, 0.9};

void erasure_qfi(Recorder& r, const SuiteOptions&) {
  Hamiltonian h = sz(2);
  for (double p : kGrid) {
    double expected = 4.0 * (1 - p) / p;
    QfiValue q = sld_qfi_channel_regularized(erasure(2, p), h);
    r.holds("finite at p=" + num(p), q.is_finite());
    if (q.is_finite()) r.relative("F at p=" + num(p), q.value(), expected, 1e-5);
  }
}

void depolarizing_qfi(Recorder& r, const SuiteOptions&) {
  Hamiltonian h = sz(2);
  for (double p : kGrid) {
    double expected = 4.0 * 2 * (1 - p) * (1 - p) / (p * (3 - 2 * p));
    QfiValue q = sld_qfi_channel_regularized(depolarizing(2, p), h);
    r.holds("finite at p=" + num(p), q.is_finite());
    if (q.is_finite()) r.relative("F at p=" + num(p), q.value(), expected, 1e-5);
  }
}

void general_depolarizing(Recorder& r, const SuiteOptions&) {
  for (int d : {3, 4, 5}) {
    Hamiltonian h = sz(d);
    double dh2 = h.delta() * h.delta();
    for (double p : {0.2, 0.5}) {
      QfiValue q = sld_qfi_channel_regularized(depolarizing(d, p), h);
      std::string at = " d=" + std::to_string(d) + " p=" + num(p);
      r.holds("finite" + at, q.is_finite());
      if (!q.is_finite()) continue;
      r.at_most("F <= depolarizing bound" + at, q.value(),
                dh2 * (1 - p) * (1 - p) / (p * (1 + 2.0 / (d * d) - p)), 1e-6);
      r.at_most("F <= erasure value" + at, q.value(), dh2 * (1 - p) / p, 1e-6);
    }
  }
}

void additivity(Recorder& r, const SuiteOptions& o) {
  Rng rng(o.seed);
  std::uniform_int_distribution<int> rank(2, 3);
  auto draw = [&](Channel& ch, Hamiltonian& h) {
    for (;;) {
      Channel c = random_channel(2, 2, rank(rng), rng);
      Hamiltonian hh(random_hermitian(2, rng));
      if (hks_check(c, hh).satisfied) {
        ch = c;
        h = hh;
        return;
      }
    }
  };
  ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  for (int k = 0; k < 20; ++k) {
    Channel n = identity_channel(2), m = identity_channel(2);
    Hamiltonian hn = Hamiltonian::zero(2), hm = Hamiltonian::zero(2);
    draw(n, hn);
    draw(m, hm);
    double fn = sld_qfi_channel_regularized(n, hn).value();
    double fm = sld_qfi_channel_regularized(m, hm).value();
    Hamiltonian hnm(kron(hn.matrix(), id2) + kron(id2, hm.matrix()));
    double fnm = sld_qfi_channel_regularized(tensor(n, m), hnm).value();
    r.close("pair " + std::to_string(k), fnm, fn + fm, 1e-4 * (1 + fn + fm));
  }
}

void rld_depolarizing(Recorder& r, const SuiteOptions&) {
  for (int d : {2, 3}) {
    Hamiltonian h = sz(d);
    double dh = h.delta();
    double tr2 = h.trace_sq();
    for (double p : {0.3, 0.5}) {
      std::string at = " d=" + std::to_string(d) + " p=" + num(p);
      double expected = (1 - p) * (1 - p) / (4 * (1 - (d * d - 1) * p / (d * d))) * dh * dh +
                        d * (1 - p) * (1 - p) / p * tr2;
      Channel ch = depolarizing(d, p);
      QfiValue fr = rld_qfi_channel(ch, h);
      QfiValue fs = sld_qfi_channel_regularized(ch, h);
      r.holds("finite" + at, fr.is_finite() && fs.is_finite());
      if (!fr.is_finite() || !fs.is_finite()) continue;
      r.relative("F_R" + at, fr.value(), expected, 1e-6);
      r.at_most("F_S <= F_R" + at, fs.value(), fr.value(), 1e-6);
      if (d == 2 && p == 0.5) r.close("F_R value at d=2 p=0.5", fr.value(), 2.4, 2.4e-6);
    }
  }
}

void thermo_erasure(Recorder& r, const SuiteOptions& o) {
  const int m = 3;
  {
    const int n = 9;
    ThermoEncoding enc(ThermoCodeSpec(n, m), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
    double p = (1 - std::sqrt(8.0 / 9.0)) / 2;
    Channel eff = effective_logical_channel(enc.encoded(), thermo_erasure_recovery(enc));
    r.close("syndrome recovery channel vs D_{p,0}, n=9", choi_distance(eff, rotated_dephasing(p, 0.0)),
            0.0, 1e-10);
    ChoiRecovery opt = optimal_choi_recovery(enc.encoded());
    r.at_most("eps_Choi <= p, n=9", opt.choi_infidelity, p, 1e-8);
    r.at_most("ell1(m^2/4n^2) <= eps_Choi, n=9", ell1(double(m * m) / (4.0 * n * n)),
              opt.choi_infidelity, 0.0);
  }
  {
    const int n = 25;
    ThermoEncoding enc(ThermoCodeSpec(n, m), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
    MeasureOptions mo;
    mo.seed = o.seed;
    mo.explicit_recoveries.emplace_back("syndrome", thermo_erasure_recovery(enc));
    InfidelityEstimate est = measure_code(enc.encoded(), mo);
    double bound = ell1(double(m * m) / (4.0 * n * n));
    r.in_range("eps_upper / ell1(m^2/4n^2), n=25", est.worst_upper / bound, 1.0, 1.05);
  }
}

void thermo_depolarizing(Recorder& r, const SuiteOptions&) {
  const int m = 3;
  ThermoCodeSpec spec(9, m);
  auto numeric = beny_oreshkov_blocks(spec, SingleSiteNoise::uniform(9, pauli_ordered_depolarizing()));
  auto closed = beny_oreshkov_depolarizing_blocks(9, m);
  r.close("A blocks, n=9", (numeric.a - closed.a).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  r.close("B blocks, n=9", (numeric.b - closed.b).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  const std::vector<std::pair<int, double>> envelope = {{27, 0.20}, {81, 0.10}, {243, 0.04}};
  for (auto [n, tol] : envelope) {
    double value = beny_oreshkov_infidelity(beny_oreshkov_depolarizing_blocks(n, m));
    r.close("ratio to 3m^2/4n^2, n=" + std::to_string(n), value / (3.0 * m * m / (4.0 * n * n)), 1.0,
            tol);
  }
}

void depolarizing_chain(Recorder& r, const SuiteOptions& o) {
  const int m = 3;
  {
    const int n = 9;
    ThermoEncoding enc(ThermoCodeSpec(n, m), SingleSiteNoise::uniform(n, pauli_ordered_depolarizing()));
    MeasureOptions mo;
    mo.seed = o.seed;
    InfidelityEstimate est = measure_code(enc.encoded(), mo);
    double bound = ell1(3.0 * m * m / (8.0 * n * n));
    r.at_most("ell1(3m^2/8n^2) <= eps_upper, n=9", bound, est.worst_upper, 0.0);
    double bo = beny_oreshkov_infidelity(beny_oreshkov_depolarizing_blocks(n, m));
    r.at_most("eps_upper <= Beny-Oreshkov value, n=9", est.worst_upper, bo, 1e-8);
  }
  const int n = 243;
  double bo = beny_oreshkov_infidelity(beny_oreshkov_depolarizing_blocks(n, m));
  double bound = ell1(3.0 * m * m / (8.0 * n * n));
  r.close("achieved / bound, n=243", bo / bound, 2.0, 0.5);
}

void choi_sanity(Recorder& r, const SuiteOptions&) {
  r.close("identity", optimal_choi_recovery(identity_channel(2)).choi_infidelity, 0.0, 1e-9);
  r.close("full depolarizing", optimal_choi_recovery(depolarizing(2, 1.0)).choi_infidelity, 0.75, 1e-6);
}

void twirl(Recorder& r, const SuiteOptions& o) {
  const int n = 9;
  ThermoEncoding enc(ThermoCodeSpec(n, 3), SingleSiteNoise::uniform(n, erasure(2, 1.0)));
  const EncodedNoise& e = enc.encoded();
  ChoiRecovery opt = optimal_choi_recovery(e);
  auto tau = common_period(e.h_l.diagonal_values(), *e.h_support);
  r.holds("common period found", tau.has_value());
  if (!tau) return;
  Hamiltonian hs = e.support_hamiltonian();
  Channel tw = twirl_recovery(opt.recovery, e.h_l, hs, *tau);
  Rng rng(o.seed);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  std::vector<double> thetas(10);
  for (auto& t : thetas) t = angle(rng);
  r.close("covariance residual", channel_covariance_residual(tw, hs, e.h_l, thetas), 0.0, 1e-8);
  r.close("Choi infidelity change",
          choi_infidelity(effective_logical_channel(e, tw)),
          choi_infidelity(effective_logical_channel(e, opt.recovery)), 1e-6);
}

void rld_state_bound(Recorder& r, const SuiteOptions& o) {
  Rng rng(o.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dh = 2.0;
  Hamiltonian h = Hamiltonian::diagonal({dh / 2, -dh / 2});
  ComplexVector plus(2), minus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  minus << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  const double variance = dh * dh / 4;
  int violations = 0, finite = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    double eps = std::pow(10.0, -4 + 2 * u(rng));
    // Fixed <+|rho|+> = 1 - eps; random coherence inside the PSD disc.
    Complex c = std::polar(std::sqrt(eps * (1 - eps) * u(rng)), 2 * std::numbers::pi * u(rng));
    ComplexMatrix rho = (1 - eps) * plus * plus.adjoint() + eps * minus * minus.adjoint() +
                        c * plus * minus.adjoint() + std::conj(c) * minus * plus.adjoint();
    QfiValue f = rld_qfi_state(rho, h);
    if (!f.is_finite()) continue;
    ++finite;
    double rhs = (variance - 3 * std::sqrt(2 * eps) * dh * dh / 2) * (1 - 3 * eps + eps * eps) / eps;
    if (f.value() < rhs) ++violations;
    worst = std::max(worst, (rhs - f.value()) / std::abs(rhs));
  }
  r.holds("some states finite", finite > 0);
  r.close("violations among " + std::to_string(finite) + " finite states", violations, 0.0, 0.0);
  r.at_most("largest relative shortfall", worst, 0.0, 0.0);
}

void ell_round_trips(Recorder& r, const SuiteOptions&) {
  // Forward maps written out here, independent of the library's.
  auto f1 = [](double e) { return e * (1 - e) / ((1 - 2 * e) * (1 - 2 * e)); };
  auto f_proof = [](double e, double c) {
    return e / ((1 - 3 * e + e * e) * (1 - c * std::sqrt(2 * e)));
  };
  double err1 = 0.0, err2 = 0.0, err3 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double e = 0.5 * i / 1000.0;
    err1 = std::max(err1, std::abs(ell1(f1(e)) - e));
  }
  const double edge2 = 1.0 / 72.0;
  for (int i = 0; i < 1000; ++i) {
    double e = edge2 * i / 1000.0;
    err2 = std::max(err2, std::abs(ell2(f_proof(e, 6.0)) - e));
  }
  // d_L = 3, H_L = diag(1, 0, -1): c = 3 * 3 * 4 / (2 * 2) = 9.
  const double c3 = 9.0;
  const double edge3 = 1.0 / (2 * c3 * c3);
  for (int i = 0; i < 1000; ++i) {
    double e = edge3 * i / 1000.0;
    err3 = std::max(err3, std::abs(ell3(f_proof(e, c3), 3, 2.0, 2.0) - e));
  }
  r.close("ell1 round trip", err1, 0.0, 1e-10);
  r.close("ell2 round trip", err2, 0.0, 1e-10);
  r.close("ell3 round trip", err3, 0.0, 1e-10);
  double worst = -std::numeric_limits<double>::infinity();
  double x_max = f_proof(edge3 * (1 - 1e-9), c3);
  for (int i = 0; i < 1000; ++i) {
    double x = x_max * i / 999.0;
    double l1 = ell1(x), l2 = ell2(x), l3 = ell3(x, 3, 2.0, 2.0);
    worst = std::max({worst, l3 - l2, l2 - l1});
  }
  r.at_most("ordering ell3 <= ell2 <= ell1", worst, 0.0, 1e-12);
}

void multi_error(Recorder& r, const SuiteOptions&) {
  const int n = 4;
  Hamiltonian h = sz(2);
  double expected = h.delta() * h.delta() * n * n;
  for (int t : {1, 2}) {
    MultiErrorResult res = multi_error_qfi_upper(uniform_erasure_blocks(n, t, h));
    r.relative("t=" + std::to_string(t), res.value, expected, 1e-4);
  }
}

void classifier(Recorder& r, const SuiteOptions& o) {
  Rng rng(o.seed);
  r.holds("dephasing + X violates HKS", !hks_check(dephasing(0.2), Hamiltonian(pauli_x())).satisfied);
  for (int k = 0; k < 3; ++k) {
    Hamiltonian h2(random_hermitian(2, rng));
    Hamiltonian h3(random_hermitian(3, rng));
    r.holds("erasure(2) satisfies HKS, draw " + std::to_string(k), hks_check(erasure(2, 0.3), h2).satisfied);
    r.holds("erasure(3) satisfies HKS, draw " + std::to_string(k), hks_check(erasure(3, 0.4), h3).satisfied);
    r.holds("depolarizing(2) satisfies HKS, draw " + std::to_string(k),
            hks_check(depolarizing(2, 0.3), h2).satisfied);
    r.holds("depolarizing(3) satisfies HKS, draw " + std::to_string(k),
            hks_check(depolarizing(3, 0.4), h3).satisfied);
  }
  r.holds("identity + sz violates (R)", !r_condition(identity_channel(2), sz(2)).satisfied);

  std::uniform_int_distribution<int> dim(2, 3), rank(1, 3);
  int disagreements = 0, infinite = 0;
  for (int k = 0; k < 100; ++k) {
    int d = dim(rng);
    Channel ch = random_channel(d, d, rank(rng), rng);
    Hamiltonian h(random_hermitian(d, rng));
    bool hks = hks_check(ch, h).satisfied;
    bool fin = sld_qfi_channel_regularized(ch, h).is_finite();
    if (hks != fin) ++disagreements;
    if (!fin) ++infinite;
  }
  r.close("disagreements in 100 random instances", disagreements, 0.0, 0.0);
  r.holds("both outcomes present (" + std::to_string(infinite) + " infinite)",
          infinite > 0 && infinite < 100);
}

struct Entry {
  CriterionInfo info;
  std::function<void(Recorder&, const SuiteOptions&)> run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {{1, "erasure QFI, SDP vs closed form", {"qfi", "erasure"}}, erasure_qfi},
      {{2, "qubit depolarizing QFI, SDP vs closed form", {"qfi", "depolarizing"}}, depolarizing_qfi},
      {{3, "general depolarizing QFI below closed-form bounds", {"qfi", "depolarizing"}},
       general_depolarizing},
      {{4, "additivity of the regularized QFI", {"qfi", "additivity"}}, additivity},
      {{5, "RLD depolarizing closed form and F_R >= F_S", {"qfi", "rld", "depolarizing"}},
       rld_depolarizing},
      {{6, "thermo erasure saturation", {"thermo", "erasure", "recovery", "bounds"}}, thermo_erasure},
      {{7, "thermo depolarizing Beny-Oreshkov blocks", {"thermo", "depolarizing", "recovery"}},
       thermo_depolarizing},
      {{8, "lower-bound chain for thermo depolarizing", {"thermo", "depolarizing", "bounds"}},
       depolarizing_chain},
      {{9, "Choi recovery SDP sanity", {"recovery", "sdp"}}, choi_sanity},
      {{10, "twirled recovery is covariant and as good", {"thermo", "erasure", "twirl", "recovery"}},
       twirl},
      {{11, "RLD pure-state bound near |+>", {"rld", "state"}}, rld_state_bound},
      {{12, "ell function round trips and ordering", {"bounds", "ell"}}, ell_round_trips},
      {{13, "multi-error erasure closed form", {"bounds", "erasure", "multi-error"}}, multi_error},
      {{14, "HKS and condition (R) classifier", {"qfi", "classifier"}}, classifier},
  };
  return entries;
}

} // namespace

bool CriterionResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* CriterionResult::worst() const {
  const Check* w = nullptr;
  // Highest load wins; on ties a numeric check beats a yes/no one.
  for (const auto& c : checks)
    if (!w || c.load > w->load || (c.load == w->load && c.tolerance > 0 && w->tolerance == 0)) w = &c;
  return w;
}

std::vector<CriterionInfo> criteria() {
  std::vector<CriterionInfo> out;
  for (const auto& e : registry()) out.push_back(e.info);
  return out;
}

bool selected(const CriterionInfo& c, const std::string& filter) {
  if (filter.empty()) return true;
  std::stringstream ss(filter);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    std::string id = token;
    if (id.rfind("ac", 0) == 0 || id.rfind("AC", 0) == 0) id = id.substr(2);
    if (id == std::to_string(c.id)) return true;
    if (std::find(c.tags.begin(), c.tags.end(), token) != c.tags.end()) return true;
  }
  return false;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options, std::ostream* out, bool verbose) {
  std::vector<CriterionResult> results;
  for (const auto& e : registry()) {
    if (!selected(e.info, options.filter)) continue;
    CriterionResult res;
    res.id = e.info.id;
    res.title = e.info.title;
    res.tags = e.info.tags;
    Recorder rec(res.checks, options.tolerance_scale);
    auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(rec, options);
    } catch (const std::exception& ex) {
      res.error = ex.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out) {
      *out << format_line(res) << '\n';
      if (verbose) {
        for (const auto& c : res.checks)
          *out << "    " << (c.pass ? "ok   " : "FAIL ") << c.what << ": measured " << num(c.measured)
               << ", expected " << num(c.expected) << ", tol " << num(c.tolerance) << '\n';
      }
      out->flush();
    }
    results.push_back(std::move(res));
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "AC" << r.id << (r.id < 10 ? "  " : " ") << (r.pass() ? "PASS" : "FAIL") << "  " << r.title;
  if (!r.error.empty()) {
    s << "  error: " << r.error;
  } else if (const Check* w = r.worst()) {
    s << "  [" << r.checks.size() << " checks; tightest: " << w->what << ": measured " << num(w->measured)
      << ", expected " << num(w->expected) << ", tol " << num(w->tolerance) << "]";
  }
  s.precision(2);
  s << std::fixed << " (" << r.seconds << " s)";
  return s.str();
}

} // namespace covqec::verify

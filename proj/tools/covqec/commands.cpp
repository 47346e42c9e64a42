#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <locale>
#include <mutex>
#include <sstream>
#include <thread>

#include "covqec/bounds.hpp"
#include "covqec/encoded.hpp"
#include "covqec/json_io.hpp"
#include "covqec/recovery.hpp"
#include "verify_suite.hpp"

namespace covqec::cli {

namespace {

void print(const json& j) { std::cout << j.dump(2) << std::endl; }

Hamiltonian qubit_local(double dh) { return Hamiltonian::diagonal({dh / 2, -dh / 2}); }

double logical_width(const BoundArgs& a) {
  if (a.dhl) return *a.dhl;
  return load_hamiltonian(a.hl, a.dl).delta();
}

std::vector<double> site_probabilities(const std::string& spec, int n) {
  if (spec == "uniform") return std::vector<double>(static_cast<size_t>(n), 1.0 / n);
  std::vector<double> q;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream in(item);
    in.imbue(std::locale::classic());
    double v = 0.0;
    if (!(in >> v) || v <= 0.0 || v > 1.0) throw InputError("bad site probability '" + item + "'");
    q.push_back(v);
  }
  if (static_cast<int>(q.size()) != n)
    throw InputError("--q lists " + std::to_string(q.size()) + " probabilities for " + std::to_string(n) +
                     " sites");
  return q;
}

bool infinite(const BoundReport& r) { return r.qfi_used && !r.qfi_used->is_finite(); }

Channel thermo_site_error(const std::string& noise) {
  if (noise == "erasure") return erasure(2, 1.0);
  if (noise == "depolarizing") return pauli_ordered_depolarizing();
  throw InputError("thermo codes take --noise erasure or depolarizing, got '" + noise + "'");
}

// Single-error bound for thermo(n, m) with total error probability p spread
// uniformly over the sites.
BoundReport thermo_bound(int n, int m, double p, const std::string& noise) {
  std::vector<SiteError> errs(static_cast<size_t>(n), SiteError{p / n, thermo_site_error(noise)});
  std::vector<Hamiltonian> hams(static_cast<size_t>(n), qubit_local(2.0));
  auto flavor = noise == "erasure" ? SingleErrorFlavor::Erasure : SingleErrorFlavor::DepolarizingQubit;
  return single_error_bound(errs, hams, 2.0 * m, flavor);
}

} // namespace

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    std::cerr << "covqec: input error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "covqec: invalid argument: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    std::cerr << "covqec: " << e.what() << '\n';
  } catch (const SandwichViolation& e) {
    std::cerr << "covqec: sweep aborted: " << e.what() << '\n';
    return kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "covqec: error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitInput;
}

int cmd_qfi(const QfiArgs& a) {
  Channel ch = load_channel(a.channel);
  Hamiltonian h = load_hamiltonian(a.ham, ch.d_in());
  QfiValue q = a.kind == "rld" ? rld_qfi_channel(ch, h) : sld_qfi_channel_regularized(ch, h);
  print(qfi_to_json(q, a.kind));
  return q.is_finite() ? kExitOk : kExitInfinite;
}

int cmd_bound(const BoundArgs& a) {
  int modes = (a.theorem ? 1 : 0) + (a.local ? 1 : 0) + (!a.single_error.empty() ? 1 : 0) +
              (a.multi_error ? 1 : 0) + (a.eastin_knill ? 1 : 0);
  if (modes != 1)
    throw InputError("choose exactly one of --theorem, --local, --single-error, --multi-error, --eastin-knill");
  if (a.n < 1) throw InputError("--n must be positive");

  if (a.theorem) {
    if (a.channel.empty()) throw InputError("--theorem needs --channel");
    Channel ch = load_channel(a.channel);
    Hamiltonian hs = load_hamiltonian(a.ham, ch.d_in());
    if (*a.theorem == 1) {
      BoundReport r = theorem1_bound(ch, hs, logical_width(a));
      print(bound_report_to_json(r));
      return infinite(r) ? kExitInfinite : kExitOk;
    }
    auto [worst, choi] = theorem2_bounds(ch, hs, load_hamiltonian(a.hl, a.dl));
    print(json::array({bound_report_to_json(worst), bound_report_to_json(choi)}));
    return infinite(worst) ? kExitInfinite : kExitOk;
  }
  if (a.local) {
    if (a.channel.empty()) throw InputError("--local needs --channel");
    Channel ch = load_channel(a.channel);
    Hamiltonian h = load_hamiltonian(a.ham, ch.d_in());
    BoundReport r = local_bound(std::vector<Channel>(static_cast<size_t>(a.n), ch),
                                std::vector<Hamiltonian>(static_cast<size_t>(a.n), h), logical_width(a));
    print(bound_report_to_json(r));
    return infinite(r) ? kExitInfinite : kExitOk;
  }
  if (!a.single_error.empty()) {
    SingleErrorFlavor flavor = single_error_flavor_from_string(a.single_error);
    std::vector<double> q = site_probabilities(a.q, a.n);
    std::vector<SiteError> errs;
    std::vector<Hamiltonian> hams;
    for (int k = 0; k < a.n; ++k) {
      if (flavor == SingleErrorFlavor::Generic) {
        if (a.channel.empty()) throw InputError("--single-error generic needs --channel");
        Channel err = load_channel(a.channel);
        errs.push_back({q[k], err});
        hams.push_back(load_hamiltonian(a.ham, err.d_in()));
      } else {
        errs.push_back({q[k], flavor == SingleErrorFlavor::Erasure ? erasure(2, 1.0) : depolarizing(2, 1.0)});
        hams.push_back(qubit_local(a.dh));
      }
    }
    print(bound_report_to_json(single_error_bound(errs, hams, logical_width(a), flavor)));
    return kExitOk;
  }
  if (a.multi_error) {
    if (a.t < 1 || a.t > a.n) throw InputError("--t must lie in [1, n]");
    BoundReport r = multi_error_bound(uniform_erasure_blocks(a.n, a.t, qubit_local(a.dh)), logical_width(a));
    print(bound_report_to_json(r));
    return kExitOk;
  }
  std::vector<int> dims = a.dims.empty() ? std::vector<int>(static_cast<size_t>(a.n), 2) : a.dims;
  if (static_cast<int>(dims.size()) != a.n) throw InputError("--dims must list one dimension per site");
  EastinKnillResult ek = eastin_knill_bound(a.n, dims, a.dl);
  ek.report.inputs["approx_x"] = ek.approx_x;
  ek.report.inputs["approx_epsilon"] = ek.approx_epsilon;
  print(bound_report_to_json(ek.report));
  return kExitOk;
}

int cmd_code(const CodeArgs& a) {
  CodeDocument doc = load_code(a.code);
  MeasureOptions mo;
  mo.seed = a.seed;
  mo.starts = a.starts;
  json out;
  out["code"] = code_to_json(doc);
  json bounds = json::array();
  InfidelityEstimate est;
  double lower = 0.0;
  std::optional<EncodedNoise> enc;

  if (doc.thermo) {
    const ThermoCodeSpec& spec = *doc.thermo;
    if (!(a.p > 0.0 && a.p <= 1.0)) throw InputError("--p must lie in (0, 1]");
    ThermoEncoding te(spec, SingleSiteNoise::uniform(spec.n, thermo_site_error(a.noise), 1.0 - a.p));
    if (a.noise == "erasure") mo.explicit_recoveries.emplace_back("syndrome", thermo_erasure_recovery(te));
    est = measure_code(te.encoded(), mo);
    BoundReport b = thermo_bound(spec.n, spec.m, a.p, a.noise);
    lower = b.epsilon_lower;
    bounds.push_back(bound_report_to_json(b));
    out["noise"] = {{"model", "single-site"}, {"site_error", a.noise}, {"p", a.p}};
    if (a.noise == "depolarizing" && a.p == 1.0)
      out["beny_oreshkov"] = beny_oreshkov_infidelity(beny_oreshkov_depolarizing_blocks(spec.n, spec.m));
  } else {
    const CovariantCode& code = *doc.code;
    Channel noise = load_channel(a.noise);
    if (noise.d_in() != code.d_s())
      throw InputError("noise acts on dimension " + std::to_string(noise.d_in()) + ", code has " +
                       std::to_string(code.d_s()));
    std::optional<RealVector> energies;
    if (noise.d_out() == code.d_s() && code.h_s.is_diagonal()) energies = code.h_s.diagonal_values();
    enc = encode_dense(code, noise, energies);
    est = measure_code(*enc, mo);
    BoundReport t1 = theorem1_bound(noise, code.h_s, code.h_l.delta());
    auto [worst, choi] = theorem2_bounds(noise, code.h_s, code.h_l);
    lower = std::max(t1.epsilon_lower, worst.epsilon_lower);
    bounds.push_back(bound_report_to_json(t1));
    bounds.push_back(bound_report_to_json(worst));
    bounds.push_back(bound_report_to_json(choi));
    out["noise"] = channel_to_json(noise);
  }
  out["estimate"] = estimate_to_json(est);
  out["bounds"] = bounds;
  out["sandwich"] = {{"epsilon_lower", lower},
                     {"epsilon_choi", est.choi_infidelity},
                     {"epsilon_upper", est.worst_upper},
                     {"holds", lower <= est.choi_infidelity + 1e-9 && est.choi_infidelity <= est.worst_upper + 1e-8}};
  out["seed"] = a.seed;
  if (!a.export_recovery.empty() && est.recovery) {
    json rec = enc && enc->basis ? channel_to_json(lift_recovery(*enc, *est.recovery))
                                 : channel_to_json(*est.recovery);
    std::ofstream f(a.export_recovery);
    if (!f) throw InputError("cannot write '" + a.export_recovery + "'");
    f << rec.dump(2) << '\n';
    out["recovery_file"] = a.export_recovery;
    out["recovery_space"] = enc && enc->basis ? "physical" : "support";
  }
  print(out);
  return kExitOk;
}

std::string format_number(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(12);
  s << v;
  return s.str();
}

void check_sandwich(const SweepRow& row, double lower, double choi, double upper) {
  if (lower <= choi + 1e-9 && choi <= upper + 1e-8) return;
  std::ostringstream s;
  s << "row n=" << row.n << " m=" << row.m << " p=" << format_number(row.p)
    << " breaks epsilon_lower <= epsilon_choi <= epsilon_upper: " << format_number(lower) << ", "
    << format_number(choi) << ", " << format_number(upper);
  throw SandwichViolation(s.str());
}

SweepTable run_sweep(const SweepArgs& a) {
  if (a.jobs < 1) throw InputError("--jobs must be positive");
  const bool thermo = a.family != "bound-grid";
  if (a.family != "thermo-erasure" && a.family != "thermo-depolarizing" && a.family != "bound-grid")
    throw InputError("unknown family '" + a.family + "'");
  std::vector<double> ps = a.p.empty() ? std::vector<double>{thermo ? 1.0 : 0.1} : a.p;

  SweepTable t;
  t.columns = thermo ? std::vector<std::string>{"n", "m", "p", "bound_l1", "eps_choi", "eps_upper", "ratio"}
                     : std::vector<std::string>{"n", "m", "p", "qfi_site", "bound_local", "bound_single_error"};
  std::vector<SweepRow> grid;
  for (int n : a.n)
    for (int m : a.m)
      for (double p : ps) {
        std::string why;
        if (!(p > 0.0 && p <= 1.0)) why = "p outside (0, 1]";
        if (thermo && why.empty()) {
          try {
            ThermoCodeSpec spec(n, m);
          } catch (const std::exception& e) {
            why = e.what();
          }
        }
        if (!thermo && why.empty() && (n < 1 || m < 1)) why = "n and m must be positive";
        if (!why.empty()) {
          t.skipped.push_back("n=" + std::to_string(n) + " m=" + std::to_string(m) + " p=" + format_number(p) +
                              ": " + why);
          continue;
        }
        grid.push_back({n, m, p, {}});
      }

  const std::string noise = a.family == "thermo-erasure" ? "erasure" : "depolarizing";
  auto evaluate = [&](SweepRow& row) {
    if (!thermo) {
      Channel site = erasure(2, row.p);
      Hamiltonian h = qubit_local(2.0);
      BoundReport local = local_bound(std::vector<Channel>(static_cast<size_t>(row.n), site),
                                      std::vector<Hamiltonian>(static_cast<size_t>(row.n), h), 2.0 * row.m);
      double f = local.qfi_used && local.qfi_used->is_finite() ? local.qfi_used->value() / row.n : NAN;
      BoundReport single = thermo_bound(row.n, row.m, row.p, "erasure");
      row.values = {f, local.epsilon_lower, single.epsilon_lower};
      return;
    }
    ThermoCodeSpec spec(row.n, row.m);
    ThermoEncoding te(spec, SingleSiteNoise::uniform(row.n, thermo_site_error(noise), 1.0 - row.p));
    MeasureOptions mo;
    mo.seed = a.seed;
    mo.starts = a.starts;
    if (noise == "erasure") mo.explicit_recoveries.emplace_back("syndrome", thermo_erasure_recovery(te));
    InfidelityEstimate est = measure_code(te.encoded(), mo);
    double lower = thermo_bound(row.n, row.m, row.p, noise).epsilon_lower;
    row.values = {lower, est.choi_infidelity, est.worst_upper, est.worst_upper / lower};
  };

  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < grid.size(); i = next++) {
      try {
        evaluate(grid[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min<int>(a.jobs, static_cast<int>(grid.size())); ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (thermo)
    for (const auto& row : grid) check_sandwich(row, row.values[0], row.values[1], row.values[2]);
  t.rows = std::move(grid);
  return t;
}

std::string format_csv(const SweepTable& t, std::uint64_t seed) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "# seed=0x" << std::hex << seed << std::dec << ", version=" << COVQEC_VERSION << '\n';
  for (size_t i = 0; i < t.columns.size(); ++i) s << (i ? "," : "") << t.columns[i];
  s << '\n';
  for (const auto& r : t.rows) {
    s << r.n << ',' << r.m << ',' << format_number(r.p);
    for (double v : r.values) s << ',' << format_number(v);
    s << '\n';
  }
  return s.str();
}

int cmd_sweep(const SweepArgs& a) {
  SweepTable t = run_sweep(a);
  for (const auto& why : t.skipped) std::cerr << "covqec: skipped " << why << '\n';
  std::string csv = format_csv(t, a.seed);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + a.out + "'");
    f << csv;
  }
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a) {
  if (a.list) {
    for (const auto& c : verify::criteria()) {
      std::cout << "AC" << c.id << "  " << c.title << "  [";
      for (size_t i = 0; i < c.tags.size(); ++i) std::cout << (i ? "," : "") << c.tags[i];
      std::cout << "]\n";
    }
    return kExitOk;
  }
  verify::SuiteOptions o;
  o.filter = a.filter;
  o.tolerance_scale = a.tol_scale;
  o.seed = a.seed;
  if (!(a.tol_scale >= 0.0)) throw InputError("--tol-scale must be non-negative");
  auto results = verify::run_suite(o, &std::cout, a.verbose);
  if (results.empty()) throw InputError("filter '" + a.filter + "' selects no criteria");
  int failed = 0;
  for (const auto& r : results) failed += r.pass() ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed ? kExitFailed : kExitOk;
}

} // namespace covqec::cli

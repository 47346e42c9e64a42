#include "covqec/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "covqec/dicke.hpp"
#include "covqec/sdp.hpp"

namespace covqec {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

long cluster_key(double v) { return std::lround(v * 1e7); }

// Re(J1^T A J2) for two coordinate systems.
RealMatrix pull_back_pair(const HermitianCoords& c1, const HermitianCoords& c2, const ComplexMatrix& a) {
  const int n1 = c1.size(), n2 = c2.size();
  ComplexMatrix aj = ComplexMatrix::Zero(a.rows(), n2);
  for (int l = 0; l < n2; ++l)
    for (const auto& t : c2.terms[static_cast<size_t>(l)]) aj.col(l) += t.coef * a.col(t.index);
  RealMatrix out(n1, n2);
  for (int k = 0; k < n1; ++k) {
    ComplexVector row = ComplexVector::Zero(n2);
    for (const auto& t : c1.terms[static_cast<size_t>(k)]) row += t.coef * aj.row(t.index).transpose();
    out.row(k) = row.real().transpose();
  }
  return out;
}

// One LMI block: slots (l, sector) laid out contiguously.
struct Slot {
  int l;
  int sector;
  int offset;
};
struct LmiBlock {
  std::vector<Slot> slots;
  int size = 0;
  ComplexMatrix c;
};

struct Layout {
  std::vector<std::vector<int>> sectors; // support indices per sector
  std::vector<LmiBlock> blocks;
  bool symmetric = false;
};

class ChoiDualLmi : public LmiProblem {
public:
  ChoiDualLmi(const Layout& layout) : layout_(layout) {
    int off = 0;
    for (const auto& s : layout_.sectors) {
      coords_.emplace_back(static_cast<int>(s.size()));
      offsets_.push_back(off);
      off += coords_.back().size();
    }
    nv_ = off;
    c_ = RealVector::Zero(nv_);
    for (size_t s = 0; s < coords_.size(); ++s)
      for (int a = 0; a < coords_[s].n; ++a) c_[offsets_[s] + a] = 1.0; // diagonal coordinates come first
  }

  int num_vars() const override { return nv_; }
  const RealVector& objective() const override { return c_; }

  std::vector<ComplexMatrix> assemble(const RealVector& y) const override {
    std::vector<ComplexMatrix> out;
    out.reserve(layout_.blocks.size());
    std::vector<ComplexMatrix> ys;
    for (size_t s = 0; s < coords_.size(); ++s)
      ys.push_back(coords_[s].to_matrix(y.segment(offsets_[s], coords_[s].size())));
    for (const auto& b : layout_.blocks) {
      ComplexMatrix f = -b.c;
      for (const auto& sl : b.slots) {
        const auto& ym = ys[static_cast<size_t>(sl.sector)];
        f.block(sl.offset, sl.offset, ym.rows(), ym.cols()) += ym;
      }
      out.push_back(std::move(f));
    }
    return out;
  }

  void derivatives(const std::vector<ComplexMatrix>& w, RealVector& grad, RealMatrix& hess) const override {
    grad.setZero(nv_);
    hess.setZero(nv_, nv_);
    const size_t ns = coords_.size();
    std::vector<ComplexVector> gc(ns);
    for (size_t s = 0; s < ns; ++s) gc[s] = ComplexVector::Zero(coords_[s].n * coords_[s].n);
    std::map<std::pair<int, int>, ComplexMatrix> hc;
    for (size_t q = 0; q < layout_.blocks.size(); ++q) {
      const auto& b = layout_.blocks[q];
      const auto& wq = w[q];
      for (const auto& s1 : b.slots) {
        const int n1 = coords_[static_cast<size_t>(s1.sector)].n;
        for (int a = 0; a < n1; ++a)
          for (int bb = 0; bb < n1; ++bb) gc[static_cast<size_t>(s1.sector)][a * n1 + bb] += wq(s1.offset + bb, s1.offset + a);
        for (const auto& s2 : b.slots) {
          const int n2 = coords_[static_cast<size_t>(s2.sector)].n;
          auto key = std::make_pair(s1.sector, s2.sector);
          auto it = hc.find(key);
          if (it == hc.end()) it = hc.emplace(key, ComplexMatrix::Zero(n1 * n1, n2 * n2)).first;
          ComplexMatrix& h = it->second;
          // Tr(W E_ab W E_cd) = W(o1 + b, o2 + c) W(o2 + d, o1 + a)
          auto mid = wq.block(s1.offset, s2.offset, n1, n2);
          for (int a = 0; a < n1; ++a)
            for (int d = 0; d < n2; ++d) {
              Complex x = wq(s2.offset + d, s1.offset + a);
              for (int bb = 0; bb < n1; ++bb)
                for (int c = 0; c < n2; ++c) h(a * n1 + bb, c * n2 + d) += x * mid(bb, c);
            }
        }
      }
    }
    for (size_t s = 0; s < ns; ++s)
      grad.segment(offsets_[s], coords_[s].size()) = coords_[s].pull_back_linear(gc[s]);
    for (const auto& [key, h] : hc) {
      const auto& c1 = coords_[static_cast<size_t>(key.first)];
      const auto& c2 = coords_[static_cast<size_t>(key.second)];
      hess.block(offsets_[static_cast<size_t>(key.first)], offsets_[static_cast<size_t>(key.second)], c1.size(), c2.size()) +=
          pull_back_pair(c1, c2, h);
    }
  }

  ComplexMatrix sector_matrix(const RealVector& y, int s) const {
    return coords_[static_cast<size_t>(s)].to_matrix(y.segment(offsets_[static_cast<size_t>(s)], coords_[static_cast<size_t>(s)].size()));
  }

private:
  const Layout& layout_;
  std::vector<HermitianCoords> coords_;
  std::vector<int> offsets_;
  int nv_ = 0;
  RealVector c_;
};

// w_a(l, x) = conj(A_a(x, l)) gives f^2 = Tr(C X) with C = sum_a |w_a><w_a| / d^2.
void fill_blocks(Layout& layout, const std::vector<ComplexMatrix>& kraus, int dl) {
  const double norm = 1.0 / (static_cast<double>(dl) * dl);
  for (auto& b : layout.blocks) {
    ComplexMatrix w(b.size, static_cast<Eigen::Index>(kraus.size()));
    for (size_t a = 0; a < kraus.size(); ++a)
      for (const auto& sl : b.slots) {
        const auto& xs = layout.sectors[static_cast<size_t>(sl.sector)];
        for (size_t i = 0; i < xs.size(); ++i)
          w(sl.offset + static_cast<int>(i), static_cast<Eigen::Index>(a)) = std::conj(kraus[a](xs[i], sl.l));
      }
    b.c = hermitian_part(norm * w * w.adjoint());
  }
}

Layout make_layout(const EncodedNoise& enc, bool use_symmetry, bool use_components) {
  const int s = enc.support_dim(), dl = enc.d_l();
  UnionFind uf(s);
  if (use_components) {
    double amax = 0.0;
    for (const auto& k : enc.kraus) amax = std::max(amax, k.cwiseAbs().maxCoeff());
    const double tol = 1e-14 * amax;
    for (const auto& k : enc.kraus) {
      int first = -1;
      for (int x = 0; x < s; ++x)
        if (k.row(x).cwiseAbs().maxCoeff() > tol) {
          if (first < 0) first = x;
          else uf.unite(first, x);
        }
    }
  } else {
    for (int x = 1; x < s; ++x) uf.unite(0, x);
  }

  Layout layout;
  layout.symmetric = use_symmetry && enc.h_support.has_value() && enc.h_l.is_diagonal();
  std::map<std::pair<int, long>, int> sector_of_key;
  std::vector<int> sector_component;
  std::vector<double> sector_energy;
  for (int x = 0; x < s; ++x) {
    double e = layout.symmetric ? (*enc.h_support)[x] : 0.0;
    auto key = std::make_pair(uf.find(x), cluster_key(e));
    auto it = sector_of_key.find(key);
    if (it == sector_of_key.end()) {
      it = sector_of_key.emplace(key, static_cast<int>(layout.sectors.size())).first;
      layout.sectors.emplace_back();
      sector_component.push_back(key.first);
      sector_energy.push_back(e);
    }
    layout.sectors[static_cast<size_t>(it->second)].push_back(x);
  }

  // Blocks: (component, charge lambda_l - e) with one slot per matching l.
  std::map<std::pair<int, long>, size_t> block_of_key;
  for (size_t sec = 0; sec < layout.sectors.size(); ++sec)
    for (int l = 0; l < dl; ++l) {
      double lam = layout.symmetric ? enc.h_l.diagonal_values()[l] : 0.0;
      auto key = std::make_pair(sector_component[sec], cluster_key(lam - sector_energy[sec]));
      auto it = block_of_key.find(key);
      if (it == block_of_key.end()) {
        it = block_of_key.emplace(key, layout.blocks.size()).first;
        layout.blocks.emplace_back();
      }
      auto& b = layout.blocks[it->second];
      b.slots.push_back({l, static_cast<int>(sec), b.size});
      b.size += static_cast<int>(layout.sectors[sec].size());
    }
  fill_blocks(layout, enc.kraus, dl);
  return layout;
}

// Weight of C that the block structure would drop.
double leaked_weight(const Layout& layout, const std::vector<ComplexMatrix>& kraus, int dl) {
  const size_t r = kraus.size();
  ComplexMatrix g(r, r);
  for (size_t a = 0; a < r; ++a)
    for (size_t b = 0; b < r; ++b)
      g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = (kraus[b].adjoint() * kraus[a]).trace();
  double total = g.squaredNorm() / std::pow(static_cast<double>(dl), 4);
  double kept = 0.0;
  for (const auto& b : layout.blocks) kept += b.c.squaredNorm();
  return std::max(0.0, total - kept) / std::max(total, 1e-300);
}

} // namespace

double choi_infidelity(const Channel& logical) {
  if (logical.d_in() != logical.d_out())
    throw std::invalid_argument("choi_infidelity: channel must act on a single system");
  const double d = logical.d_in();
  double f2 = 0.0;
  for (const auto& k : logical.kraus()) f2 += std::norm(k.trace());
  return std::clamp(1.0 - f2 / (d * d), 0.0, 1.0);
}

ChoiRecovery optimal_choi_recovery(const EncodedNoise& enc) {
  const int s = enc.support_dim(), dl = enc.d_l();
  Layout layout = make_layout(enc, true, true);
  if (leaked_weight(layout, enc.kraus, dl) > 1e-12) layout = make_layout(enc, false, true);
  if (leaked_weight(layout, enc.kraus, dl) > 1e-12) layout = make_layout(enc, false, false);

  ChoiDualLmi problem(layout);
  double top = 0.0;
  for (const auto& b : layout.blocks) top = std::max(top, hermitian_eigensystem(b.c).values.maxCoeff());
  const double alpha = 1.5 * top + 1e-3;
  RealVector y0 = RealVector::Zero(problem.num_vars());
  {
    int off = 0;
    for (const auto& sec : layout.sectors) {
      const int n = static_cast<int>(sec.size());
      for (int a = 0; a < n; ++a) y0[off + a] = alpha;
      off += n * n;
    }
  }
  BarrierResult res = solve_lmi(problem, y0);
  if (!res.converged && res.gap > 1e-8) {
    std::ostringstream msg;
    msg << "optimal_choi_recovery: SDP did not converge (" << res.message << ", gap " << res.gap
        << ", objective " << res.objective << ")";
    throw std::runtime_error(msg.str());
  }

  // Recovery Kraus operators from the primal blocks X = W / t.
  double zmax = 0.0;
  std::vector<Eigensystem> zs;
  for (const auto& z : res.dual) {
    zs.push_back(hermitian_eigensystem(hermitian_part(z)));
    zmax = std::max(zmax, zs.back().values.maxCoeff());
  }
  std::vector<ComplexMatrix> rk;
  for (size_t q = 0; q < layout.blocks.size(); ++q) {
    const auto& b = layout.blocks[q];
    const auto& es = zs[q];
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
      if (es.values[j] <= 1e-13 * zmax) continue;
      ComplexMatrix r = ComplexMatrix::Zero(dl, s);
      const double amp = std::sqrt(es.values[j]);
      for (const auto& sl : b.slots) {
        const auto& xs = layout.sectors[static_cast<size_t>(sl.sector)];
        for (size_t i = 0; i < xs.size(); ++i) r(sl.l, xs[i]) = amp * es.vectors(sl.offset + static_cast<int>(i), j);
      }
      rk.push_back(std::move(r));
    }
  }
  // Centering leaves Tr_L X = 1 only approximately; renormalize exactly.
  ComplexMatrix sum = ComplexMatrix::Zero(s, s);
  for (const auto& r : rk) sum += r.adjoint() * r;
  ComplexMatrix fix = psd_inv_sqrt(hermitian_part(sum), 1e-14);
  for (auto& r : rk) r = r * fix;
  Channel rec = minimal_kraus(Channel(std::move(rk)));

  double f2 = 0.0;
  for (const auto& r : rec.kraus())
    for (const auto& a : enc.kraus) f2 += std::norm((r * a).trace());
  f2 /= static_cast<double>(dl) * dl;

  double trace_y = 0.0;
  for (size_t sct = 0; sct < layout.sectors.size(); ++sct) trace_y += problem.sector_matrix(res.y, static_cast<int>(sct)).trace().real();

  return ChoiRecovery{rec,
                      std::clamp(1.0 - f2, 0.0, 1.0),
                      std::clamp(1.0 - trace_y, 0.0, 1.0),
                      res.gap,
                      static_cast<int>(layout.blocks.size()),
                      problem.num_vars(),
                      layout.symmetric,
                      res.newton_steps};
}

ChoiRecovery optimal_choi_recovery(const Channel& composite) {
  return optimal_choi_recovery(encoded_from_channel(composite, Hamiltonian::zero(composite.d_in())));
}

double dephasing_worst_infidelity(double p, double phi) {
  return 0.5 * (1.0 - (1.0 - 2.0 * p) * std::cos(phi));
}

WorstCase worst_case_infidelity(const Channel& ch, std::uint64_t seed, int starts) {
  if (ch.d_in() != ch.d_out()) throw std::invalid_argument("worst_case_infidelity: channel is not square");
  const int d = ch.d_in();
  WorstCase out;
  if (d == 2) {
    auto fit = fit_rotated_dephasing(ch);
    if (fit.residual <= 1e-12) {
      out.infidelity = dephasing_worst_infidelity(fit.p, fit.phi);
      out.closed_form = true;
      return out;
    }
  }
  if (d > 4) throw std::invalid_argument("worst_case_infidelity: generic path needs d <= 4");

  const auto& ks = ch.kraus();
  // psi on L (x) R stored as a d x d matrix P; (K (x) 1) psi <-> K P.
  auto value = [&](const ComplexMatrix& p) {
    double f = 0.0;
    for (const auto& k : ks) f += std::norm((p.adjoint() * k * p).trace());
    return f;
  };
  auto gradient = [&](const ComplexMatrix& p) {
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    for (const auto& k : ks) {
      Complex z = (p.adjoint() * k * p).trace();
      g += std::conj(z) * (k * p) + z * (k.adjoint() * p);
    }
    return g;
  };

  Rng rng(seed);
  std::vector<double> minima;
  for (int st = 0; st < starts; ++st) {
    ComplexMatrix p = unflatten(haar_state(d * d, rng), d, d);
    double f = value(p);
    double eta = 0.5;
    bool done = false;
    for (int it = 0; it < 20000 && !done; ++it) {
      ComplexMatrix g = gradient(p);
      Complex proj = (p.adjoint() * g).trace();
      g -= proj.real() * p;
      double gn = g.squaredNorm();
      if (gn < 1e-22) break;
      done = true; // unless a step is accepted below
      while (eta > 1e-12) {
        ComplexMatrix pn = p - eta * g;
        pn /= pn.norm();
        double fn = value(pn);
        if (fn <= f - 1e-4 * eta * gn) {
          done = f - fn < 1e-15;
          p = std::move(pn);
          f = fn;
          eta *= 1.5;
          break;
        }
        eta *= 0.5;
      }
    }
    minima.push_back(f);
  }
  auto [lo, hi] = std::minmax_element(minima.begin(), minima.end());
  out.infidelity = std::clamp(1.0 - *lo, 0.0, 1.0);
  out.dispersion = *hi - *lo;
  out.starts = starts;
  return out;
}

Channel pauli_ordered_depolarizing() {
  return Channel({0.5 * ComplexMatrix::Identity(2, 2), 0.5 * pauli_x(), 0.5 * pauli_y(), 0.5 * pauli_z()});
}

BenyOreshkovBlocks beny_oreshkov_blocks(const ThermoCodeSpec& spec, const SingleSiteNoise& noise) {
  noise.validate();
  if (noise.sites() != spec.n) throw std::invalid_argument("beny_oreshkov_blocks: site count mismatch");
  if (noise.site_error.d_out() != 2)
    throw std::invalid_argument("beny_oreshkov_blocks: site error must be qubit to qubit");
  const int n = spec.n;
  const auto& e = noise.site_error.kraus();
  const int r = static_cast<int>(e.size());
  const bool ident = noise.identity_weight > 0.0;
  const int total = r * n + (ident ? 1 : 0);
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);

  // <g_i| K_u^dag K_v |g_j> for branch indices u, v
  auto element = [&](int i, int j, int u, int v) -> Complex {
    bool iu = ident && u == total - 1, iv = ident && v == total - 1;
    int eu = iu ? -1 : u / n, ku = iu ? -1 : u % n;
    int ev = iv ? -1 : v / n, kv = iv ? -1 : v % n;
    double wu = iu ? noise.identity_weight : noise.q[static_cast<size_t>(ku)];
    double wv = iv ? noise.identity_weight : noise.q[static_cast<size_t>(kv)];
    double scale = std::sqrt(wu * wv);
    if (scale == 0.0) return 0.0;
    ComplexMatrix a = iu ? id2 : ComplexMatrix(e[static_cast<size_t>(eu)].adjoint());
    ComplexMatrix b = iv ? id2 : e[static_cast<size_t>(ev)];
    if (iu && iv) return scale * (i == j ? 1.0 : 0.0);
    if (iu) return scale * spec.single_site(i, j, b);
    if (iv) return scale * spec.single_site(i, j, a);
    if (ku == kv) return scale * spec.single_site(i, j, a * b);
    return scale * spec.two_site(i, j, a, b);
  };

  BenyOreshkovBlocks out;
  out.a = ComplexMatrix::Zero(total, total);
  out.b = ComplexMatrix::Zero(total, total);
  for (int u = 0; u < total; ++u)
    for (int v = 0; v < total; ++v) {
      Complex g0 = element(0, 0, u, v), g1 = element(1, 1, u, v);
      out.a(u, v) = 0.5 * (g0 + g1);
      out.b(u, v) = 0.5 * (g0 - g1);
      out.cross_term = std::max(out.cross_term, std::abs(element(0, 1, u, v)));
    }
  return out;
}

BenyOreshkovBlocks beny_oreshkov_depolarizing_blocks(int n, int m) {
  ThermoCodeSpec check(n, m);
  (void)check;
  const double nn = n, mm = m;
  const int t = 4 * n;
  BenyOreshkovBlocks out;
  out.a = ComplexMatrix::Zero(t, t);
  out.b = ComplexMatrix::Zero(t, t);
  auto fill = [&](ComplexMatrix& mat, int bi, int bj, Complex diag, Complex off) {
    for (int k = 0; k < n; ++k)
      for (int kp = 0; kp < n; ++kp) mat(bi * n + k, bj * n + kp) = (k == kp) ? diag : off;
  };
  const double s = 1.0 / (4.0 * nn);
  fill(out.a, 0, 0, s, s);
  double o12 = (nn * nn - mm * mm) / (2.0 * nn * (nn - 1.0));
  fill(out.a, 1, 1, s, s * o12);
  fill(out.a, 2, 2, s, s * o12);
  double o33 = (mm * mm - nn) / (nn * (nn - 1.0));
  fill(out.a, 3, 3, s, s * o33);
  const double bb = mm / (4.0 * nn * nn);
  fill(out.b, 0, 3, bb, bb);
  fill(out.b, 3, 0, bb, bb);
  fill(out.b, 1, 2, Complex(0.0, bb), 0.0);
  fill(out.b, 2, 1, Complex(0.0, -bb), 0.0);
  return out;
}

double beny_oreshkov_infidelity(const BenyOreshkovBlocks& blocks) {
  if (blocks.cross_term > 1e-10)
    throw std::invalid_argument("beny_oreshkov_infidelity: <g0|K^dag K|g1> does not vanish, ansatz invalid");
  const auto& a = blocks.a;
  const auto& b = blocks.b;
  const int t = static_cast<int>(a.rows());
  if (b.rows() != t) throw std::invalid_argument("beny_oreshkov_infidelity: block sizes differ");
  // fidelity adds over direct sums, so split A and A + B into connected pieces
  UnionFind uf(t);
  const double tol = 1e-15 * std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int u = 0; u < t; ++u)
    for (int v = u + 1; v < t; ++v)
      if (std::abs(a(u, v)) > tol || std::abs(b(u, v)) > tol) uf.unite(u, v);
  std::map<int, std::vector<int>> parts;
  for (int u = 0; u < t; ++u) parts[uf.find(u)].push_back(u);
  double f = 0.0;
  for (const auto& [root, idx] : parts) {
    const int sz = static_cast<int>(idx.size());
    ComplexMatrix as(sz, sz), ab(sz, sz);
    for (int i = 0; i < sz; ++i)
      for (int j = 0; j < sz; ++j) {
        as(i, j) = a(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        ab(i, j) = as(i, j) + b(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
      }
    f += matrix_fidelity(hermitian_part(as), hermitian_part(ab));
  }
  return std::clamp(1.0 - f * f, 0.0, 1.0);
}

InfidelityEstimate measure_code(const EncodedNoise& enc, const MeasureOptions& options) {
  InfidelityEstimate est;
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
  };

  ChoiRecovery opt = optimal_choi_recovery(enc);
  est.choi_infidelity = opt.choi_infidelity;
  est.choi_lower_bound = opt.lower_bound;
  est.log.push_back("choi sdp: optimum " + fmt(opt.choi_infidelity) + ", dual bound " + fmt(opt.lower_bound) +
                    ", " + std::to_string(opt.lmi_blocks) + " blocks, " + std::to_string(opt.variables) +
                    " variables" + (opt.symmetry_reduced ? ", charge sectors" : ""));

  std::vector<std::pair<std::string, Channel>> cands;
  cands.emplace_back("choi-optimal", opt.recovery);
  if (options.twirl && enc.h_support && enc.h_l.is_diagonal()) {
    auto tau = options.period;
    if (!tau) tau = common_period(enc.h_l.diagonal_values(), *enc.h_support);
    if (tau) {
      cands.emplace_back("choi-optimal-twirled",
                         twirl_recovery(opt.recovery, enc.h_l, enc.support_hamiltonian(), *tau));
    } else {
      est.log.push_back("twirl skipped: no common period");
    }
  }
  for (const auto& c : options.explicit_recoveries) cands.push_back(c);

  double best = 2.0;
  for (const auto& [label, rec] : cands) {
    Channel eff = effective_logical_channel(enc, rec);
    RecoveryCandidate rc;
    rc.label = label;
    rc.choi_infidelity = choi_infidelity(eff);
    auto wc = worst_case_infidelity(eff, options.seed, options.starts);
    rc.worst_infidelity = wc.infidelity;
    rc.dispersion = wc.dispersion;
    rc.closed_form = wc.closed_form;
    est.log.push_back("candidate " + label + ": choi " + fmt(rc.choi_infidelity) + ", worst " +
                      fmt(rc.worst_infidelity) + (wc.closed_form ? " (closed form)" : ""));
    if (rc.worst_infidelity < best) {
      best = rc.worst_infidelity;
      est.recovery = rec;
      est.recovery_label = label;
    }
    est.candidates.push_back(rc);
  }
  // Every candidate is a feasible point of the Choi SDP, so the best of them
  // tightens the reconstructed primal value.
  for (const auto& rc : est.candidates) {
    if (rc.choi_infidelity < est.choi_infidelity) {
      est.log.push_back("choi optimum tightened by " + rc.label + " to " + fmt(rc.choi_infidelity));
      est.choi_infidelity = rc.choi_infidelity;
    }
  }
  est.worst_upper = best;
  est.worst_lower = est.choi_infidelity;
  return est;
}

} // namespace covqec

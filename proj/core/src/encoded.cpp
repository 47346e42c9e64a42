#include "covqec/encoded.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "covqec/dicke.hpp"

namespace covqec {

namespace {

// Sorted clusters of (nearly) equal values; returns the cluster id per entry.
std::vector<int> cluster_values(const std::vector<double>& v, std::vector<double>& centers) {
  std::vector<size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<int> id(v.size(), -1);
  centers.clear();
  for (size_t i : order) {
    double tol = 1e-9 * std::max(1.0, std::abs(v[i]));
    if (centers.empty() || v[i] - centers.back() > tol) centers.push_back(v[i]);
    id[i] = static_cast<int>(centers.size()) - 1;
  }
  return id;
}

// Orthonormal support basis for the columns of `cols`, split by output energy
// when the split loses nothing. Returns basis and, on success, its energies.
std::pair<ComplexMatrix, std::optional<RealVector>> support_basis(
    const ComplexMatrix& cols, const std::optional<RealVector>& energies) {
  ComplexMatrix plain = orthonormal_range(cols);
  if (!energies) return {plain, std::nullopt};
  if (energies->size() != cols.rows())
    throw std::invalid_argument("encode: output energies have the wrong length");
  std::vector<double> e(energies->data(), energies->data() + energies->size());
  std::vector<double> centers;
  auto id = cluster_values(e, centers);
  std::vector<ComplexMatrix> parts;
  std::vector<double> part_e;
  Eigen::Index total = 0;
  for (size_t c = 0; c < centers.size(); ++c) {
    ComplexMatrix sub = ComplexMatrix::Zero(cols.rows(), cols.cols());
    bool any = false;
    for (Eigen::Index r = 0; r < cols.rows(); ++r)
      if (id[static_cast<size_t>(r)] == static_cast<int>(c)) {
        sub.row(r) = cols.row(r);
        any = any || sub.row(r).cwiseAbs().maxCoeff() > 0.0;
      }
    if (!any) continue;
    ComplexMatrix q = orthonormal_range(sub);
    if (q.cols() == 0) continue;
    total += q.cols();
    parts.push_back(std::move(q));
    part_e.push_back(centers[c]);
  }
  // The split is only faithful when the support is invariant under H.
  if (total != plain.cols()) return {plain, std::nullopt};
  ComplexMatrix basis(cols.rows(), total);
  RealVector h(total);
  Eigen::Index at = 0;
  for (size_t p = 0; p < parts.size(); ++p) {
    basis.middleCols(at, parts[p].cols()) = parts[p];
    h.segment(at, parts[p].cols()).setConstant(part_e[p]);
    at += parts[p].cols();
  }
  return {basis, h};
}

EncodedNoise reduce(const std::vector<ComplexMatrix>& images, const Hamiltonian& h_l,
                    const std::optional<RealVector>& energies) {
  const Eigen::Index rows = images.front().rows();
  const Eigen::Index dl = images.front().cols();
  ComplexMatrix cols(rows, dl * static_cast<Eigen::Index>(images.size()));
  for (size_t a = 0; a < images.size(); ++a) cols.middleCols(dl * static_cast<Eigen::Index>(a), dl) = images[a];
  auto [basis, h] = support_basis(cols, energies);
  EncodedNoise enc{{}, h_l, h, basis};
  for (const auto& m : images) enc.kraus.push_back(basis.adjoint() * m);
  return enc;
}

long ipow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

} // namespace

Hamiltonian EncodedNoise::support_hamiltonian() const {
  if (!h_support) throw std::logic_error("EncodedNoise: no support energies");
  return Hamiltonian::diagonal(std::vector<double>(h_support->data(), h_support->data() + h_support->size()));
}

EncodedNoise encoded_from_channel(const Channel& composite, const Hamiltonian& h_l) {
  if (composite.d_in() != h_l.dim())
    throw std::invalid_argument("encoded_from_channel: H_L does not match the channel input");
  return EncodedNoise{composite.kraus(), h_l, std::nullopt, std::nullopt};
}

EncodedNoise encode_dense(const CovariantCode& code, const Channel& noise,
                          const std::optional<RealVector>& output_energies) {
  if (noise.d_in() != code.d_s())
    throw std::invalid_argument("encode_dense: noise does not act on the code space");
  std::vector<ComplexMatrix> images;
  for (const auto& k : noise.kraus()) images.push_back(k * code.isometry);
  return reduce(images, code.h_l, output_energies);
}

SingleSiteNoise SingleSiteNoise::uniform(int n, const Channel& site_error, double identity_weight) {
  if (n < 1) throw std::invalid_argument("SingleSiteNoise: need at least one site");
  SingleSiteNoise s{site_error, std::vector<double>(static_cast<size_t>(n), (1.0 - identity_weight) / n),
                    identity_weight, {}};
  s.validate();
  return s;
}

std::vector<double> SingleSiteNoise::energies() const {
  if (!output_energies.empty()) return output_energies;
  std::vector<double> e(static_cast<size_t>(site_error.d_out()), 0.0);
  e[0] = 1.0;
  e[1] = -1.0;
  return e;
}

void SingleSiteNoise::validate() const {
  if (site_error.d_in() != 2 || site_error.d_out() < 2)
    throw std::invalid_argument("SingleSiteNoise: site error must map a qubit to d_o >= 2");
  if (q.empty()) throw std::invalid_argument("SingleSiteNoise: no sites");
  double total = identity_weight;
  for (double x : q) {
    if (x < 0.0) throw std::invalid_argument("SingleSiteNoise: negative site probability");
    total += x;
  }
  if (identity_weight < 0.0 || std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("SingleSiteNoise: probabilities must sum to one");
  if (!output_energies.empty() && static_cast<int>(output_energies.size()) != site_error.d_out())
    throw std::invalid_argument("SingleSiteNoise: output energies have the wrong length");
}

EncodedNoise encode_single_site_dense(const CovariantCode& code, const SingleSiteNoise& noise) {
  noise.validate();
  const int n = noise.sites();
  const int d_o = noise.site_error.d_out();
  if (code.d_s() != (1L << n))
    throw std::invalid_argument("encode_single_site_dense: code is not an n-qubit code");
  const long out_dim = ipow(d_o, n);
  if (out_dim > (1L << 20)) throw std::invalid_argument("encode_single_site_dense: output too large");
  const long in_dim = 1L << n;
  // output index of each input configuration, digit by digit
  std::vector<long> embed(static_cast<size_t>(in_dim));
  for (long j = 0; j < in_dim; ++j) {
    long t = 0;
    for (int k = 0; k < n; ++k) t = t * d_o + ((j >> (n - 1 - k)) & 1L);
    embed[static_cast<size_t>(j)] = t;
  }
  const auto& v = code.isometry;
  const int dl = code.d_l();
  std::vector<ComplexMatrix> images;
  if (noise.identity_weight > 0.0) {
    ComplexMatrix img = ComplexMatrix::Zero(out_dim, dl);
    double s = std::sqrt(noise.identity_weight);
    for (long j = 0; j < in_dim; ++j) img.row(embed[static_cast<size_t>(j)]) += s * v.row(j);
    images.push_back(std::move(img));
  }
  for (int k = 0; k < n; ++k) {
    if (noise.q[static_cast<size_t>(k)] == 0.0) continue;
    double s = std::sqrt(noise.q[static_cast<size_t>(k)]);
    long place = ipow(d_o, n - 1 - k);
    for (const auto& ka : noise.site_error.kraus()) {
      ComplexMatrix img = ComplexMatrix::Zero(out_dim, dl);
      for (long j = 0; j < in_dim; ++j) {
        int x = static_cast<int>((j >> (n - 1 - k)) & 1L);
        long base = embed[static_cast<size_t>(j)] - x * place;
        for (int y = 0; y < d_o; ++y) {
          Complex c = ka(y, x);
          if (c != 0.0) img.row(base + y * place) += s * c * v.row(j);
        }
      }
      images.push_back(std::move(img));
    }
  }
  auto site_e = noise.energies();
  RealVector energies(out_dim);
  for (long t = 0; t < out_dim; ++t) {
    double e = 0.0;
    long r = t;
    for (int k = 0; k < n; ++k) {
      e += site_e[static_cast<size_t>(r % d_o)];
      r /= d_o;
    }
    energies[t] = e;
  }
  return reduce(images, code.h_l, energies);
}

Channel single_site_noise_channel(const SingleSiteNoise& noise) {
  noise.validate();
  const int n = noise.sites();
  const int d_o = noise.site_error.d_out();
  if (ipow(d_o, n) * (1L << n) > (1L << 22))
    throw std::invalid_argument("single_site_noise_channel: too large for a dense channel");
  ComplexMatrix e = ComplexMatrix::Zero(d_o, 2);
  e(0, 0) = e(1, 1) = 1.0;
  std::vector<ComplexMatrix> ks;
  if (noise.identity_weight > 0.0)
    ks.push_back(std::sqrt(noise.identity_weight) * kron_all(std::vector<ComplexMatrix>(static_cast<size_t>(n), e)));
  for (int k = 0; k < n; ++k) {
    if (noise.q[static_cast<size_t>(k)] == 0.0) continue;
    for (const auto& ka : noise.site_error.kraus()) {
      std::vector<ComplexMatrix> f(static_cast<size_t>(n), e);
      f[static_cast<size_t>(k)] = ka;
      ks.push_back(std::sqrt(noise.q[static_cast<size_t>(k)]) * kron_all(f));
    }
  }
  return Channel(std::move(ks));
}

int ThermoEncoding::atom_index(const Atom& a) {
  auto it = atom_lookup_.find(a);
  if (it != atom_lookup_.end()) return it->second;
  int id = static_cast<int>(atoms_.size());
  atoms_.push_back(a);
  atom_lookup_.emplace(a, id);
  return id;
}

double ThermoEncoding::atom_overlap(const Atom& a, const Atom& b) const {
  auto [k, y, v] = a;
  auto [kp, yp, vp] = b;
  if (k == kp) return (y == yp && v == vp) ? 1.0 : 0.0;
  if (y >= 2 || yp >= 2) return 0.0; // a flag state meets a bare qubit
  // each rest state is split at the other atom's site
  if (v - (yp == 0) != vp - (y == 0)) return 0.0;
  return dicke_split(spec_.n - 1, v, yp) * dicke_split(spec_.n - 1, vp, y);
}

ThermoEncoding::ThermoEncoding(ThermoCodeSpec spec, SingleSiteNoise noise)
    : spec_(spec), noise_(std::move(noise)), encoded_{{}, spec_.h_l(), std::nullopt, std::nullopt} {
  noise_.validate();
  const int n = spec_.n;
  if (noise_.sites() != n) throw std::invalid_argument("ThermoEncoding: noise has the wrong site count");
  const int d_o = noise_.site_error.d_out();

  // Branch images as sparse atom combinations, one per (branch, logical state).
  using Sparse = std::vector<std::pair<int, Complex>>;
  std::vector<std::array<Sparse, 2>> images;
  auto add_branch = [&](int k, const ComplexMatrix* ka, double weight) {
    std::array<Sparse, 2> img;
    double s = std::sqrt(weight);
    for (int l = 0; l < 2; ++l) {
      int w = spec_.up_count(l);
      for (int x = 0; x < 2; ++x) {
        double amp = dicke_split(n, w, x);
        if (amp == 0.0) continue;
        int v = w - (x == 0);
        if (ka == nullptr) {
          img[static_cast<size_t>(l)].push_back({atom_index({k, x, v}), s * amp});
          continue;
        }
        for (int y = 0; y < d_o; ++y) {
          Complex c = (*ka)(y, x);
          if (c != 0.0) img[static_cast<size_t>(l)].push_back({atom_index({k, y, v}), s * amp * c});
        }
      }
    }
    images.push_back(std::move(img));
  };
  if (noise_.identity_weight > 0.0) add_branch(0, nullptr, noise_.identity_weight);
  for (int k = 0; k < n; ++k) {
    double qk = noise_.q[static_cast<size_t>(k)];
    if (qk == 0.0) continue;
    for (const auto& ka : noise_.site_error.kraus()) add_branch(k, &ka, qk);
  }

  const int na = atom_count();
  RealMatrix gram(na, na);
  UnionFind uf(na);
  for (int i = 0; i < na; ++i)
    for (int j = i; j < na; ++j) {
      double g = atom_overlap(atoms_[static_cast<size_t>(i)], atoms_[static_cast<size_t>(j)]);
      gram(i, j) = gram(j, i) = g;
      if (g != 0.0) uf.unite(i, j);
    }
  // atoms sharing an image column belong together even when orthogonal
  for (const auto& img : images)
    for (const auto& col : img)
      for (size_t i = 1; i < col.size(); ++i) uf.unite(col[0].first, col[i].first);
  auto site_e = noise_.energies();
  std::vector<double> energy(static_cast<size_t>(na));
  for (int i = 0; i < na; ++i) {
    auto [k, y, v] = atoms_[static_cast<size_t>(i)];
    energy[static_cast<size_t>(i)] = site_e[static_cast<size_t>(y)] + 2.0 * v - (n - 1);
  }

  // Orthonormalize each (component, energy) group separately so that basis
  // vectors never mix orthogonal blocks.
  std::map<std::pair<int, long>, std::vector<int>> groups;
  for (int i = 0; i < na; ++i)
    groups[{uf.find(i), std::lround(energy[static_cast<size_t>(i)] * 1e6)}].push_back(i);

  std::vector<RealVector> tcols;
  std::vector<double> h;
  std::vector<int> group_of; // basis column -> group number
  const double cutoff = spectral_cutoff();
  for (const auto& [key, members] : groups) {
    const int gsz = static_cast<int>(members.size());
    RealMatrix gg(gsz, gsz);
    for (int a = 0; a < gsz; ++a)
      for (int b = 0; b < gsz; ++b) gg(a, b) = gram(members[static_cast<size_t>(a)], members[static_cast<size_t>(b)]);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(gg);
    for (int c = 0; c < gsz; ++c) {
      double lam = es.eigenvalues()[c];
      if (lam <= cutoff) continue;
      RealVector t = RealVector::Zero(na);
      for (int a = 0; a < gsz; ++a) t[members[static_cast<size_t>(a)]] = es.eigenvectors()(a, c) / std::sqrt(lam);
      tcols.push_back(std::move(t));
      h.push_back(energy[static_cast<size_t>(members.front())]);
      group_of.push_back(static_cast<int>(std::distance(groups.begin(), groups.find(key))));
    }
  }
  const int s = static_cast<int>(tcols.size());
  RealMatrix t(na, s);
  for (int c = 0; c < s; ++c) t.col(c) = tcols[static_cast<size_t>(c)];
  coords_ = (t.transpose() * gram).cast<Complex>();

  std::vector<ComplexMatrix> raw;
  for (const auto& img : images) {
    ComplexMatrix a = ComplexMatrix::Zero(s, 2);
    for (int l = 0; l < 2; ++l)
      for (const auto& [idx, c] : img[static_cast<size_t>(l)]) a.col(l) += c * coords_.col(idx);
    raw.push_back(std::move(a));
  }

  // The atoms can span more than the images do (the no-error branch splits each
  // code state over several atoms). Keep, block by block, only the range of the
  // projected images: the smallest energy-respecting subspace holding the output.
  const int ngroups = static_cast<int>(groups.size());
  std::vector<std::vector<int>> rows_of(static_cast<size_t>(ngroups));
  for (int c = 0; c < s; ++c) rows_of[static_cast<size_t>(group_of[static_cast<size_t>(c)])].push_back(c);
  ComplexMatrix q = ComplexMatrix::Zero(s, 0);
  std::vector<double> hnew;
  for (int g = 0; g < ngroups; ++g) {
    const auto& rows = rows_of[static_cast<size_t>(g)];
    if (rows.empty()) continue;
    ComplexMatrix m(static_cast<Eigen::Index>(rows.size()), 2 * static_cast<Eigen::Index>(raw.size()));
    for (size_t i = 0; i < raw.size(); ++i)
      for (size_t r = 0; r < rows.size(); ++r) {
        m(static_cast<Eigen::Index>(r), 2 * static_cast<Eigen::Index>(i)) = raw[i](rows[r], 0);
        m(static_cast<Eigen::Index>(r), 2 * static_cast<Eigen::Index>(i) + 1) = raw[i](rows[r], 1);
      }
    if (m.norm() == 0.0) continue;
    ComplexMatrix range = orthonormal_range(m);
    const Eigen::Index old = q.cols();
    q.conservativeResize(Eigen::NoChange, old + range.cols());
    q.block(0, old, s, range.cols()).setZero();
    for (size_t r = 0; r < rows.size(); ++r) q.block(rows[r], old, 1, range.cols()) = range.row(static_cast<Eigen::Index>(r));
    for (Eigen::Index c = 0; c < range.cols(); ++c) hnew.push_back(h[static_cast<size_t>(rows.front())]);
  }
  coords_ = q.adjoint() * coords_;
  encoded_.h_support = Eigen::Map<RealVector>(hnew.data(), static_cast<Eigen::Index>(hnew.size()));
  for (const auto& a : raw) encoded_.kraus.push_back(q.adjoint() * a);
  // sanity: the reduced map must still be trace preserving
  Channel check(encoded_.kraus);
  (void)check;
}

ComplexVector ThermoEncoding::atom_coordinates(int k, int y, int v) const {
  auto it = atom_lookup_.find({k, y, v});
  if (it != atom_lookup_.end()) return coords_.col(it->second);
  return ComplexVector::Zero(coords_.rows());
}

Channel thermo_erasure_recovery(const ThermoEncoding& enc) {
  const auto& spec = enc.spec();
  const int n = spec.n;
  const int s = enc.encoded().support_dim();
  std::vector<std::vector<ComplexVector>> families;
  // un-erased code states, present only when the noise has an identity branch
  {
    std::vector<ComplexVector> fam;
    for (int l = 0; l < 2; ++l) {
      int w = spec.up_count(l);
      ComplexVector c = ComplexVector::Zero(s);
      for (int x = 0; x < 2; ++x) c += dicke_split(n, w, x) * enc.atom_coordinates(0, x, w - (x == 0));
      fam.push_back(std::move(c));
    }
    double nrm = fam[0].norm();
    if (nrm > 0.5) families.push_back(std::move(fam));
    else if (nrm > 1e-9) throw std::logic_error("thermo_erasure_recovery: code states partly outside the support");
  }
  for (int k = 0; k < n; ++k)
    for (int j : {+1, -1}) {
      std::vector<ComplexVector> fam;
      for (int l = 0; l < 2; ++l) {
        int mag = (l == 0 ? spec.m : -spec.m) + j;
        ComplexVector c = enc.atom_coordinates(k, 2, (n - 1 + mag) / 2);
        fam.push_back(std::move(c));
      }
      if (fam[0].norm() < 0.5 && fam[1].norm() < 0.5) continue; // site never erased
      families.push_back(std::move(fam));
    }
  return syndrome_recovery(s, 2, families, 0);
}

Channel effective_logical_channel(const EncodedNoise& enc, const Channel& recovery) {
  if (recovery.d_in() != enc.support_dim() || recovery.d_out() != enc.d_l())
    throw std::invalid_argument("effective_logical_channel: recovery does not act on the support");
  return minimal_kraus(compose(recovery, enc.channel()));
}

Channel lift_recovery(const EncodedNoise& enc, const Channel& recovery) {
  if (!enc.basis) throw std::invalid_argument("lift_recovery: encoding has no explicit output basis");
  if (recovery.d_in() != enc.support_dim() || recovery.d_out() != enc.d_l())
    throw std::invalid_argument("lift_recovery: recovery does not act on the support");
  const ComplexMatrix& b = *enc.basis;
  std::vector<ComplexMatrix> kraus;
  for (const auto& r : recovery.kraus()) kraus.push_back(r * b.adjoint());
  const auto d_out = b.rows();
  ComplexMatrix q = ComplexMatrix::Identity(d_out, d_out) - b * b.adjoint();
  Eigensystem es = hermitian_eigensystem(hermitian_part(q));
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    if (es.values(j) < 0.5) continue;
    ComplexMatrix k = ComplexMatrix::Zero(enc.d_l(), d_out);
    k.row(0) = es.vectors.col(j).adjoint();
    kraus.push_back(std::move(k));
  }
  return Channel(std::move(kraus));
}

} // namespace covqec

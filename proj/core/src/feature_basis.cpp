#include "wrfm/feature_basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wrfm/errors.hpp"

namespace wrfm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

/// d^order/du^order of the logistic function.
double logistic_derivative(double u, int order) {
  const double s = logistic(u);
  switch (order) {
    case 0: return s;
    case 1: return s * (1.0 - s);
    case 2: return s * (1.0 - s) * (1.0 - 2.0 * s);
    default: throw UnsupportedOrder("logistic derivative order > 2");
  }
}

double psi_b_1d(double l, int order) {
  constexpr double pi = std::numbers::pi;
  if (l < -1.25 || l > 1.25) return 0.0;
  if (l >= -0.75 && l <= 0.75) return order == 0 ? 1.0 : 0.0;
  const double sgn = l < 0.0 ? 1.0 : -1.0;
  switch (order) {
    case 0: return 0.5 * (1.0 + sgn * std::sin(2.0 * pi * l));
    case 1: return sgn * pi * std::cos(2.0 * pi * l);
    case 2: return -sgn * 2.0 * pi * pi * std::sin(2.0 * pi * l);
    default: throw UnsupportedOrder("psi_b derivative order > 2");
  }
}

double psi_c_1d(double l, double alpha, int order) {
  const double u1 = (l + 1.0) / alpha;
  const double u2 = (1.0 - l) / alpha;
  const double s1 = logistic(u1);
  const double s2 = logistic(u2);
  if (order == 0) return s1 * s2;
  const double d1 = logistic_derivative(u1, 1) / alpha;
  const double d2 = -logistic_derivative(u2, 1) / alpha;
  if (order == 1) return d1 * s2 + s1 * d2;
  if (order == 2) {
    const double dd1 = logistic_derivative(u1, 2) / (alpha * alpha);
    const double dd2 = logistic_derivative(u2, 2) / (alpha * alpha);
    return dd1 * s2 + 2.0 * d1 * d2 + s1 * dd2;
  }
  throw UnsupportedOrder("psi_c derivative order > 2");
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sin") return Activation::sin;
  if (name == "cos") return Activation::cos;
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::sin: return "sin";
    case Activation::cos: return "cos";
  }
  return "?";
}

PouKind parse_pou(std::string_view name) {
  if (name == "psi_a") return PouKind::psi_a;
  if (name == "psi_b") return PouKind::psi_b;
  if (name == "psi_c") return PouKind::psi_c;
  throw InvalidArgument("unknown partition of unity '" + std::string(name) + "'");
}

std::string_view to_string(PouKind k) {
  switch (k) {
    case PouKind::psi_a: return "psi_a";
    case PouKind::psi_b: return "psi_b";
    case PouKind::psi_c: return "psi_c";
  }
  return "?";
}

double activation_derivative(Activation a, double z, int order) {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(z);
      if (order == 0) return t;
      if (order == 1) return 1.0 - t * t;
      if (order == 2) return -2.0 * t * (1.0 - t * t);
      break;
    }
    case Activation::sin:
      if (order == 0) return std::sin(z);
      if (order == 1) return std::cos(z);
      if (order == 2) return -std::sin(z);
      break;
    case Activation::cos:
      if (order == 0) return std::cos(z);
      if (order == 1) return -std::sin(z);
      if (order == 2) return -std::cos(z);
      break;
  }
  throw UnsupportedOrder("activation derivative order must be 0..2, got " + std::to_string(order));
}

double pou_1d(const PartitionOfUnity& pou, double l, int order) {
  switch (pou.kind) {
    case PouKind::psi_a:
      if (order != 0) throw UnsupportedOrder("psi_a is discontinuous; derivatives unsupported");
      return (l >= -1.0 && l <= 1.0) ? 1.0 : 0.0;
    case PouKind::psi_b: return psi_b_1d(l, order);
    case PouKind::psi_c: return psi_c_1d(l, pou.alpha, order);
  }
  throw InternalError("unknown partition of unity kind");
}

double pou_value(const PartitionOfUnity& pou, const Vec& l, int dim, const MultiIndex& deriv) {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= pou_1d(pou, l[i], deriv[i]);
  return v;
}

double keyed_uniform(std::uint64_t seed, std::uint64_t subdomain, std::uint64_t feature,
                     std::uint64_t component, double range) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ subdomain);
  h = splitmix64(h ^ feature);
  h = splitmix64(h ^ component);
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
  return range * (2.0 * unit - 1.0);
}

SubdomainBasis::SubdomainBasis(Subdomain sub, std::vector<RandomFeature> features,
                               Activation activation, PartitionOfUnity pou)
    : sub_(std::move(sub)), features_(std::move(features)), activation_(activation), pou_(pou) {
  if (features_.empty()) throw InvalidArgument("a subdomain basis needs at least one feature");
}

double SubdomainBasis::eval_feature(int j, const Vec& x, const MultiIndex& deriv) const {
  if (j < 0 || j >= size()) throw InvalidArgument("feature index out of range");
  const int order = total_order(deriv);
  if (order > 2) throw UnsupportedOrder("feature derivatives are available up to order 2");
  const auto& f = features_[j];
  const Vec l = sub_.normalize(x);
  double z = f.b;
  double chain = 1.0;
  for (int i = 0; i < dim(); ++i) {
    z += f.k[i] * l[i];
    for (int p = 0; p < deriv[i]; ++p) chain *= f.k[i] / sub_.half_widths[i];
  }
  return chain * activation_derivative(activation_, z, order);
}

void SubdomainBasis::eval_all(const Vec& x, const MultiIndex& deriv, std::span<double> out) const {
  const int order = total_order(deriv);
  if (order > 2) throw UnsupportedOrder("feature derivatives are available up to order 2");
  const Vec l = sub_.normalize(x);
  for (int j = 0; j < size(); ++j) {
    const auto& f = features_[j];
    double z = f.b;
    double chain = 1.0;
    for (int i = 0; i < dim(); ++i) {
      z += f.k[i] * l[i];
      for (int p = 0; p < deriv[i]; ++p) chain *= f.k[i] / sub_.half_widths[i];
    }
    out[j] = chain * activation_derivative(activation_, z, order);
  }
}

Eigen::MatrixXd SubdomainBasis::eval_matrix(std::span<const Vec> points) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd z(n, size());
  Eigen::MatrixXd l(n, dim());
  for (Eigen::Index p = 0; p < n; ++p) {
    const Vec lp = sub_.normalize(points[p]);
    for (int i = 0; i < dim(); ++i) l(p, i) = lp[i];
  }
  Eigen::MatrixXd k(dim(), size());
  Eigen::RowVectorXd b(size());
  for (int j = 0; j < size(); ++j) {
    for (int i = 0; i < dim(); ++i) k(i, j) = features_[j].k[i];
    b(j) = features_[j].b;
  }
  z.noalias() = l * k;
  z.rowwise() += b;
  switch (activation_) {
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::sin: return z.array().sin().matrix();
    case Activation::cos: return z.array().cos().matrix();
  }
  throw InternalError("unknown activation");
}

double SubdomainBasis::pou_at(const Vec& x, const MultiIndex& deriv) const {
  const Vec l = sub_.normalize(x);
  double v = pou_value(pou_, l, dim(), deriv);
  for (int i = 0; i < dim(); ++i)
    for (int p = 0; p < deriv[i]; ++p) v /= sub_.half_widths[i];
  return v;
}

SubdomainBasis sample_basis(const Subdomain& sub, int num_features, double range,
                            std::uint64_t seed, Activation activation, PartitionOfUnity pou) {
  if (num_features < 1) throw InvalidArgument("need at least one feature per subdomain");
  if (!(range > 0.0)) throw InvalidArgument("feature range R must be positive");
  std::vector<RandomFeature> features(num_features);
  const auto n = static_cast<std::uint64_t>(sub.index);
  for (int j = 0; j < num_features; ++j) {
    const auto jj = static_cast<std::uint64_t>(j);
    for (int i = 0; i < sub.box.dim; ++i) features[j].k[i] = keyed_uniform(seed, n, jj, i, range);
    features[j].b = keyed_uniform(seed, n, jj, kMaxDim, range);
  }
  return SubdomainBasis(sub, std::move(features), activation, pou);
}

GlobalModel::GlobalModel(Decomposition dec, std::vector<SubdomainBasis> bases)
    : dec_(std::move(dec)), bases_(std::move(bases)) {
  if (static_cast<int>(bases_.size()) != dec_.size())
    throw InvalidArgument("one basis per subdomain required");
  offsets_.reserve(bases_.size() + 1);
  offsets_.push_back(0);
  for (const auto& b : bases_) offsets_.push_back(offsets_.back() + b.size());
  coefficients_ = Eigen::VectorXd::Zero(offsets_.back());
}

void GlobalModel::set_coefficients(Eigen::VectorXd u) {
  if (u.size() != num_columns()) throw InvalidArgument("coefficient vector length mismatch");
  coefficients_ = std::move(u);
}

double GlobalModel::eval(const Vec& x) const {
  std::vector<double> phi;
  const auto local = [&](int n) {
    const auto& basis = bases_[n];
    phi.resize(basis.size());
    basis.eval_all(x, {}, phi);
    double s = 0.0;
    for (int j = 0; j < basis.size(); ++j) s += coefficients_[offsets_[n] + j] * phi[j];
    return s;
  };
  if (bases_.front().pou().kind == PouKind::psi_a) {
    const int n = dec_.locate(x);
    return n < 0 ? 0.0 : local(n);
  }
  double u = 0.0;
  for (int n = 0; n < dec_.size(); ++n) {
    const double w = bases_[n].pou_at(x);
    if (w != 0.0) u += w * local(n);
  }
  return u;
}

}  // namespace wrfm

#include "pettis/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "pettis/error.hpp"

namespace pettis {
namespace {

constexpr double kMergeTol = 1e-12;
constexpr double kDropWeight = 1e-15;

void require_dim(Index a, Index b) {
  if (a != b) {
    fail(ErrorCode::kDimensionMismatch,
         "channel dims " + std::to_string(a) + " and " + std::to_string(b));
  }
}

// vec of U in column-major order; Choi = sum_k w_k vec(U_k) vec(U_k)^dagger.
Vector vec(const Matrix& u) {
  return Eigen::Map<const Vector>(u.data(), u.size());
}

Matrix choi_of(const std::vector<double>& w, const std::vector<Matrix>& us) {
  const Index d = us.front().rows();
  Matrix c = Matrix::Zero(d * d, d * d);
  for (std::size_t k = 0; k < us.size(); ++k) {
    if (w[k] == 0.0) continue;
    const Vector v = vec(us[k]);
    c.noalias() += w[k] * (v * v.adjoint());
  }
  return c;
}

}  // namespace

QuantumChannel::QuantumChannel(std::vector<KrausTerm> terms) {
  if (terms.empty()) fail(ErrorCode::kInvariantViolation, "channel without Kraus terms");
  const Index d = terms.front().unitary.rows();
  double total = 0.0;
  for (auto& t : terms) {
    if (t.unitary.rows() != d || t.unitary.cols() != d) {
      fail(ErrorCode::kDimensionMismatch, "Kraus unitaries of different dimension");
    }
    if (!(t.weight >= 0.0)) fail(ErrorCode::kInvariantViolation, "negative Kraus weight");
    if (!is_unitary(t.unitary)) fail(ErrorCode::kInvariantViolation, "Kraus term is not unitary");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::kInvariantViolation, "Kraus weights sum to " + std::to_string(total));
  }
  for (auto& t : terms) {
    if (t.weight < kDropWeight) continue;
    auto it = std::find_if(terms_.begin(), terms_.end(), [&](const KrausTerm& s) {
      return (s.unitary - t.unitary).norm() < kMergeTol;
    });
    if (it != terms_.end()) {
      it->weight += t.weight;
    } else {
      terms_.push_back(std::move(t));
    }
  }
  if (terms_.empty()) fail(ErrorCode::kInvariantViolation, "all Kraus weights negligible");
  double kept = 0.0;
  for (const auto& t : terms_) kept += t.weight;
  for (auto& t : terms_) t.weight /= kept;
}

QuantumChannel QuantumChannel::identity(Index dim) {
  return QuantumChannel({{1.0, Matrix::Identity(dim, dim)}});
}

QuantumChannel QuantumChannel::unitary(const Matrix& u) {
  return QuantumChannel({{1.0, u}});
}

Matrix QuantumChannel::apply_matrix(const Matrix& m) const {
  require_dim(dim(), m.rows());
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (const auto& t : terms_) out.noalias() += t.weight * (t.unitary * m * t.unitary.adjoint());
  return out;
}

ChoiMatrix::ChoiMatrix(Index dim, Matrix matrix) : dim_(dim), matrix_(std::move(matrix)) {
  if (matrix_.rows() != dim * dim || matrix_.cols() != dim * dim) {
    fail(ErrorCode::kDimensionMismatch, "Choi matrix must be dim^2 x dim^2");
  }
  const double min_eig = hermitian_eigenvalues(matrix_).minCoeff();
  if (min_eig < -1e-9) {
    fail(ErrorCode::kInvariantViolation, "Choi matrix has eigenvalue " + std::to_string(min_eig));
  }
  // Partial trace over the output factor must be the identity.
  Matrix reduced = Matrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      for (Index a = 0; a < dim; ++a) reduced(i, j) += matrix_(i * dim + a, j * dim + a);
    }
  }
  if ((reduced - Matrix::Identity(dim, dim)).norm() > 1e-9) {
    fail(ErrorCode::kInvariantViolation, "Choi matrix is not trace preserving");
  }
}

QuantumChannel group_average_channel(const UnitaryRepresentation& rep, const GroupMeasure& mu) {
  if (rep.group() != mu.group() && rep.group()->name() != mu.group()->name()) {
    fail(ErrorCode::kGroupMismatch, "representation on " + rep.group()->name() +
                                        ", measure on " + mu.group()->name());
  }
  std::vector<KrausTerm> terms;
  for (int g = 0; g < rep.group()->order(); ++g) {
    if (mu.weight(g) > 0.0) terms.push_back({mu.weight(g), rep.image(g)});
  }
  return QuantumChannel(std::move(terms));
}

DensityState apply(const QuantumChannel& phi, const DensityState& state) {
  require_dim(phi.dim(), state.dim());
  Matrix out = phi.apply_matrix(state.matrix());
  return DensityState(0.5 * (out + out.adjoint()));
}

QuantumChannel compose(const QuantumChannel& a, const QuantumChannel& b) {
  require_dim(a.dim(), b.dim());
  std::vector<KrausTerm> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      terms.push_back({ta.weight * tb.weight, ta.unitary * tb.unitary});
    }
  }
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  for (auto& t : terms) t.weight /= total;
  return QuantumChannel(std::move(terms));
}

QuantumChannel channel_power(const QuantumChannel& phi, int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "channel power needs n >= 1");
  QuantumChannel acc = phi;
  for (int k = 1; k < n; ++k) acc = compose(acc, phi);
  return acc;
}

ChoiMatrix choi(const QuantumChannel& phi) {
  std::vector<double> w;
  std::vector<Matrix> us;
  for (const auto& t : phi.terms()) {
    w.push_back(t.weight);
    us.push_back(t.unitary);
  }
  return ChoiMatrix(phi.dim(), choi_of(w, us));
}

double channel_distance(const QuantumChannel& a, const QuantumChannel& b) {
  require_dim(a.dim(), b.dim());
  return (choi(a).matrix() - choi(b).matrix()).norm();
}

QuantumChannel mix(const std::vector<double>& weights, const std::vector<QuantumChannel>& channels) {
  if (weights.size() != channels.size() || channels.empty()) {
    fail(ErrorCode::kInvalidArgument, "mix needs one weight per channel");
  }
  std::vector<KrausTerm> terms;
  double total = 0.0;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    require_dim(channels[i].dim(), channels.front().dim());
    total += weights[i];
    for (const auto& t : channels[i].terms()) terms.push_back({weights[i] * t.weight, t.unitary});
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::kInvalidArgument, "mix weights must sum to 1");
  double s = 0.0;
  for (const auto& t : terms) s += t.weight;
  for (auto& t : terms) t.weight /= s;
  return QuantumChannel(std::move(terms));
}

QuantumChannel cesaro_average(const QuantumChannel& phi, int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "Cesaro average needs n >= 1");
  std::vector<double> weights;
  std::vector<QuantumChannel> powers;
  QuantumChannel p = phi;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) p = compose(p, phi);
    powers.push_back(p);
    weights.push_back(1.0 / n);
  }
  double s = 0.0;
  for (double w : weights) s += w;
  for (double& w : weights) w /= s;
  return mix(weights, powers);
}

namespace {

// The multiplicative closure of a channel's unitaries, identified up to a
// global phase, with its multiplication table.
class Alphabet {
 public:
  Alphabet(const QuantumChannel& phi, std::size_t budget) : dim_(phi.dim()) {
    for (const auto& t : phi.terms()) generators_.push_back(insert(t.unitary, budget));
    for (std::size_t next = 0; next < elements_.size(); ++next) {
      for (const auto& t : phi.terms()) {
        insert(t.unitary * elements_[next], budget);
      }
    }
    const std::size_t n = elements_.size();
    table_.assign(n * n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const int idx = find(elements_[a] * elements_[b]);
        if (idx < 0) fail(ErrorCode::kInvariantViolation, "unitary closure is not multiplicative");
        table_[a * n + b] = static_cast<std::size_t>(idx);
      }
    }
  }

  std::size_t size() const { return elements_.size(); }
  const std::vector<Matrix>& elements() const { return elements_; }

  std::vector<double> weights_of(const QuantumChannel& phi) const {
    std::vector<double> w(size(), 0.0);
    for (std::size_t k = 0; k < phi.terms().size(); ++k) {
      w[generators_[k]] += phi.terms()[k].weight;
    }
    return w;
  }

  // Weights of a after b.
  std::vector<double> compose(const std::vector<double>& a, const std::vector<double>& b) const {
    std::vector<double> out(size(), 0.0);
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (b[j] != 0.0) out[table_[i * n + j]] += a[i] * b[j];
      }
    }
    return out;
  }

  QuantumChannel channel(const std::vector<double>& w) const {
    std::vector<KrausTerm> terms;
    double total = 0.0;
    for (double x : w) total += x;
    for (std::size_t i = 0; i < size(); ++i) {
      if (w[i] > 0.0) terms.push_back({w[i] / total, elements_[i]});
    }
    return QuantumChannel(std::move(terms));
  }

  Matrix choi_matrix(const std::vector<double>& w) const { return choi_of(w, elements_); }

  // Least common multiple of the element orders.
  std::uint64_t exponent() const {
    const int id = find(Matrix::Identity(dim_, dim_));
    if (id < 0) fail(ErrorCode::kInvariantViolation, "unitary closure lacks the identity");
    const std::size_t n = size();
    std::uint64_t e = 1;
    for (std::size_t a = 0; a < n; ++a) {
      std::uint64_t order = 1;
      for (std::size_t x = a; x != static_cast<std::size_t>(id); x = table_[x * n + a]) ++order;
      e = std::lcm(e, order);
    }
    return e;
  }

 private:
  // Phase-fixed copy: the first entry of magnitude > 0.1 (column-major) made
  // real positive.
  Matrix canonical(const Matrix& u) const {
    for (Index k = 0; k < u.size(); ++k) {
      const Complex z = u.data()[k];
      if (std::abs(z) > 0.1) return u * (std::abs(z) / z);
    }
    return u;
  }

  std::string key(const Matrix& c) const {
    std::ostringstream os;
    for (Index k = 0; k < c.size(); ++k) {
      os << std::llround(c.data()[k].real() * 1e6) << ',' << std::llround(c.data()[k].imag() * 1e6)
         << ';';
    }
    return os.str();
  }

  int find(const Matrix& u) const {
    const Matrix c = canonical(u);
    auto it = index_.find(key(c));
    if (it != index_.end() && (elements_[it->second] - c).norm() < 1e-8) {
      return static_cast<int>(it->second);
    }
    // Rounding near a grid boundary: fall back to a linear scan.
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (std::abs(std::abs((elements_[i].adjoint() * u).trace()) - static_cast<double>(dim_)) <
          1e-8) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  std::size_t insert(const Matrix& u, std::size_t budget) {
    const int found = find(u);
    if (found >= 0) return static_cast<std::size_t>(found);
    if (elements_.size() >= budget) {
      fail(ErrorCode::kTermBudgetExceeded,
           "closure of Kraus unitaries exceeds " + std::to_string(budget) + " elements");
    }
    Matrix c = canonical(u);
    index_.emplace(key(c), elements_.size());
    elements_.push_back(std::move(c));
    return elements_.size() - 1;
  }

  Index dim_;
  std::vector<Matrix> elements_;
  std::vector<std::size_t> generators_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::size_t> table_;
};

}  // namespace

CesaroResult cesaro_limit(const QuantumChannel& phi, double tol, int max_n) {
  if (!(tol > 0.0)) fail(ErrorCode::kInvalidArgument, "Cesaro tolerance must be positive");
  if (max_n < 1) fail(ErrorCode::kInvalidArgument, "Cesaro index budget must be positive");
  const Alphabet alphabet(phi, 1024);
  CesaroDiagnostics diag;
  diag.alphabet_size = alphabet.size();
  diag.exponent = alphabet.exponent();

  // Squaring doubles any drift of the total mass away from 1, so weight
  // vectors are renormalized after every product.
  auto renormalize = [](std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
  };
  auto distance = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return (alphabet.choi_matrix(a) - alphabet.choi_matrix(b)).norm();
  };

  // A_m and Phi^m for m the group exponent, by direct summation.
  const std::vector<double> base = alphabet.weights_of(phi);
  const std::uint64_t m = diag.exponent;
  if (m > static_cast<std::uint64_t>(max_n)) {
    fail(ErrorCode::kNoConvergence, "group exponent " + std::to_string(m) +
                                        " exceeds the Cesaro index budget " + std::to_string(max_n));
  }
  std::vector<double> power = base;
  std::vector<double> average = base;
  for (std::uint64_t k = 1; k < m; ++k) {
    power = alphabet.compose(base, power);
    renormalize(power);
    for (std::size_t i = 0; i < average.size(); ++i) average[i] += power[i];
  }
  renormalize(average);

  // Along n = m 2^j every peripheral eigenvalue satisfies lambda^n = 1, so
  // A_n = P + R/n + O(r^n) with r < 1 and 2 A_{2n} - A_n = P + O(r^n).
  auto extrapolate = [](const std::vector<double>& a, const std::vector<double>& a2) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = 2.0 * a2[i] - a[i];
    return out;
  };
  auto advance = [&](std::vector<double>& avg, std::vector<double>& pw) {
    std::vector<double> shifted = alphabet.compose(pw, avg);
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = 0.5 * (avg[i] + shifted[i]);
    renormalize(avg);
    pw = alphabet.compose(pw, pw);
    renormalize(pw);
  };

  std::uint64_t n = m;
  std::vector<double> a2 = average, p2 = power;
  advance(a2, p2);
  std::vector<double> a4 = a2, p4 = p2;
  advance(a4, p4);
  while (true) {
    const double plain = distance(average, a2);
    const std::vector<double> b = extrapolate(average, a2);
    const std::vector<double> b2 = extrapolate(a2, a4);
    const double residual = distance(b, b2);
    diag.schedule.push_back(n);
    diag.plain_residuals.push_back(plain);
    diag.residuals.push_back(residual);
    if (plain < tol) {
      diag.n = n;
      return {alphabet.channel(average), std::move(diag)};
    }
    if (residual < tol) {
      // The extrapolant can carry negative weights of the size of the
      // residual; they are dropped before renormalizing.
      std::vector<double> w = b2;
      for (double& x : w) x = std::max(x, 0.0);
      diag.n = 4 * n;
      diag.extrapolated = true;
      return {alphabet.channel(w), std::move(diag)};
    }
    if (8 * n > static_cast<std::uint64_t>(max_n)) break;
    average = std::move(a2);
    a2 = std::move(a4);
    p2 = p4;
    a4 = a2;
    advance(a4, p4);
    n *= 2;
  }
  std::ostringstream os;
  os << "Cesaro averages did not settle below " << tol << " within n <= " << max_n
     << "; extrapolated residuals:";
  for (std::size_t i = 0; i < diag.residuals.size(); ++i) {
    os << ' ' << diag.schedule[i] << ':' << diag.residuals[i];
  }
  fail(ErrorCode::kNoConvergence, os.str());
}

std::vector<double> invariance_diagnostic(const UnitaryRepresentation& rep,
                                          const GroupMeasure& mu, int max_n) {
  if (rep.group() != mu.group() && rep.group()->name() != mu.group()->name()) {
    fail(ErrorCode::kGroupMismatch, "representation and measure on different groups");
  }
  std::vector<double> d;
  GroupMeasure power = mu;
  for (int n = 1; n <= max_n; ++n) {
    if (n > 1) power = convolve(power, mu);
    double worst = 0.0;
    for (int h = 0; h < mu.group()->order(); ++h) {
      worst = std::max(worst, total_variation(power, left_shift_measure(h, power)));
    }
    d.push_back(worst);
  }
  return d;
}

MeasureFit fit_group_measure(const UnitaryRepresentation& rep, const QuantumChannel& target) {
  require_dim(rep.dim(), target.dim());
  const int n = rep.group()->order();
  std::vector<Matrix> c;
  for (int g = 0; g < n; ++g) {
    const Vector v = vec(rep.image(g));
    c.push_back(v * v.adjoint());
  }
  const Matrix t = choi(target).matrix();
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    b(i) = (c[i].adjoint() * t).trace().real();
    for (int j = 0; j < n; ++j) gram(i, j) = (c[i].adjoint() * c[j]).trace().real();
  }
  const double lmax = std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram)
                                   .eigenvalues()
                                   .maxCoeff(),
                               1e-12);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  // Euclidean projection onto the simplex (sort-based).
  auto project = [n](Eigen::VectorXd y) {
    std::vector<double> s(y.data(), y.data() + n);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (int k = 0; k < n; ++k) {
      cum += s[k];
      const double cand = (cum - 1.0) / (k + 1);
      if (s[k] - cand > 0.0) theta = cand;
    }
    for (int k = 0; k < n; ++k) y(k) = std::max(0.0, y(k) - theta);
    return y;
  };
  for (int it = 0; it < 5000; ++it) {
    const Eigen::VectorXd grad = gram * x - b;
    const Eigen::VectorXd next = project(x - grad / lmax);
    if ((next - x).norm() < 1e-15) {
      x = next;
      break;
    }
    x = next;
  }
  std::vector<double> w(x.data(), x.data() + n);
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  GroupMeasure fitted(rep.group(), std::move(w));
  const double residual = channel_distance(group_average_channel(rep, fitted), target);
  const bool invariant = is_left_invariant(fitted);
  return {std::move(fitted), residual, invariant};
}

}  // namespace pettis

#pragma once

// Random-unitary channels rho -> sum_k w_k U_k rho U_k^dagger, built as group
// averages Q_mu and iterated or Cesaro-averaged.

#include <cstdint>
#include <vector>

#include "pettis/group_measure.hpp"
#include "pettis/operator_core.hpp"

namespace pettis {

struct KrausTerm {
  double weight;
  Matrix unitary;
};

class QuantumChannel {
 public:
  // Terms with equal unitaries (Frobenius distance < 1e-12) are merged and
  // terms of weight < 1e-15 dropped before renormalizing.
  explicit QuantumChannel(std::vector<KrausTerm> terms);

  static QuantumChannel identity(Index dim);
  static QuantumChannel unitary(const Matrix& u);

  Index dim() const { return terms_.front().unitary.rows(); }
  const std::vector<KrausTerm>& terms() const { return terms_; }

  // Linear extension of the channel to arbitrary matrices.
  Matrix apply_matrix(const Matrix& m) const;

 private:
  std::vector<KrausTerm> terms_;
};

// sum_ij E_ij (x) Phi(E_ij); trace equals dim.
class ChoiMatrix {
 public:
  ChoiMatrix(Index dim, Matrix matrix);

  Index dim() const { return dim_; }
  const Matrix& matrix() const { return matrix_; }

 private:
  Index dim_;
  Matrix matrix_;
};

QuantumChannel group_average_channel(const UnitaryRepresentation& rep, const GroupMeasure& mu);
DensityState apply(const QuantumChannel& phi, const DensityState& state);
// a after b.
QuantumChannel compose(const QuantumChannel& a, const QuantumChannel& b);
QuantumChannel channel_power(const QuantumChannel& phi, int n);
ChoiMatrix choi(const QuantumChannel& phi);
double channel_distance(const QuantumChannel& a, const QuantumChannel& b);
// Convex combination of channels with the given weights.
QuantumChannel mix(const std::vector<double>& weights, const std::vector<QuantumChannel>& channels);
// (1/n) sum_{k=1..n} Phi^k.
QuantumChannel cesaro_average(const QuantumChannel& phi, int n);

struct CesaroDiagnostics {
  // Index n of the returned average A_n.
  std::uint64_t n = 0;
  // Lcm of the element orders of the unitary closure; the schedule runs
  // over n = exponent * 2^j.
  std::uint64_t exponent = 1;
  // Schedule of evaluated indices n, with ||A_n - A_2n|| and the distance
  // between successive extrapolants 2 A_2n - A_n.
  std::vector<std::uint64_t> schedule;
  std::vector<double> plain_residuals;
  std::vector<double> residuals;
  // True when the limit is the extrapolant rather than a plain average.
  bool extrapolated = false;
  // Size of the multiplicative closure of the channel's unitaries.
  std::size_t alphabet_size = 0;
};

struct CesaroResult {
  QuantumChannel limit;
  CesaroDiagnostics diagnostics;
};

// Evaluates exact averages A_n along n = e 2^j, e the exponent of the closure
// of the Kraus unitaries (modulo phase), via A_2n = (A_n + Phi^n A_n)/2.
// Returns A_n once ||A_n - A_2n|| < tol. Otherwise the peripheral part of
// A_n - lim is exactly zero on this schedule and the rest is R/n plus a
// geometric tail, so the Richardson extrapolant 2 A_2n - A_n is used and
// accepted once successive extrapolants agree within tol. Every evaluated
// index stays <= max_n; kNoConvergence otherwise.
CesaroResult cesaro_limit(const QuantumChannel& phi, double tol, int max_n);

// d_n = max_h TV(mu^{*n}, L_h mu^{*n}) for n = 1..max_n.
std::vector<double> invariance_diagnostic(const UnitaryRepresentation& rep,
                                          const GroupMeasure& mu, int max_n);

struct MeasureFit {
  GroupMeasure measure;
  // Choi-Frobenius distance between Q_measure and the target channel.
  double residual;
  bool left_invariant;
};

// Best group measure with Q_mu closest to the channel, by projected gradient on
// the simplex. Reported as is; a small residual is evidence, not proof.
MeasureFit fit_group_measure(const UnitaryRepresentation& rep, const QuantumChannel& target);

}  // namespace pettis

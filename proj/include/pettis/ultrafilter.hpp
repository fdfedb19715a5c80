#pragma once

// Ultrafilter oracles over a finitely generated set algebra, the two-valued
// measures they define, and limits of step functions along them.

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pettis/domain.hpp"

namespace pettis::sets {

enum class OracleKind { kPrincipal, kFreeSymbolic, kSigmaCompleteSymbolic };

std::string_view to_string(OracleKind kind);

struct Registration {
  SetExpr set;
  bool in = true;
};

struct LogEntry {
  std::string set;
  Int offset = 0;
  bool in = false;
};

// A filter base K (registrations, selected partition cells) decides a set E
// in when every large atom of K lies in E, out when none does; anything else
// is refused with kUndecidableInFreeRule. For free oracles the large atoms
// already ignore finite sets, so finite sets are out and cofinite sets in.
//
// Views share one decision log: shift_pushforward returns a view of the same
// oracle with decide'(X) = decide(X + k). Mutation follows a single-writer
// contract; callers serialize decide() per oracle.
class UltrafilterOracle {
 public:
  static UltrafilterOracle principal(std::string name, DomainPtr domain, Int point);
  // Validates the registrations; conflicting pairs raise kValidationError
  // naming both.
  static UltrafilterOracle free_symbolic(std::string name, DomainPtr domain,
                                         std::vector<Registration> registrations = {});
  static UltrafilterOracle sigma_complete(std::string name, DomainPtr domain,
                                          std::vector<Registration> registrations = {});

  const std::string& name() const;
  OracleKind kind() const;
  const DomainPtr& domain() const;
  Int offset() const { return offset_; }
  // Principal oracles: the point the view is concentrated at.
  std::optional<Int> principal_point() const;
  // Identity of the shared decision core, independent of the view.
  const void* core_id() const;

  bool decide(const SetExpr& e) const;
  UltrafilterOracle shift_pushforward(Int k) const;

  // selected is a cell index, or nullopt for "no cell selected".
  // Errors: kInconsistentOracle, kMultipleSelected.
  void register_countable_partition(const CountablePartition& partition,
                                    std::optional<Int> selected);
  bool has_partition(const std::string& id) const;
  // Index of the cell decided in for this view; nullopt when every cell is
  // out. Errors: kPartitionNotRegistered.
  std::optional<Int> selected_cell(const CountablePartition& partition) const;

  const std::vector<LogEntry>& log() const;
  std::string describe() const;

 private:
  struct Core;
  UltrafilterOracle(std::shared_ptr<Core> core, Int offset)
      : core_(std::move(core)), offset_(offset) {}

  std::shared_ptr<Core> core_;
  Int offset_ = 0;
};

class TwoValuedMeasure {
 public:
  explicit TwoValuedMeasure(UltrafilterOracle oracle) : oracle_(std::move(oracle)) {}

  const UltrafilterOracle& oracle() const { return oracle_; }
  double measure(const SetExpr& e) const { return oracle_.decide(e) ? 1.0 : 0.0; }

 private:
  UltrafilterOracle oracle_;
};

using Complex = std::complex<double>;

// A finitely valued function on the domain; cells are checked to be pairwise
// disjoint and to cover.
class StepFunction {
 public:
  StepFunction(DomainPtr domain, std::vector<SetExpr> cells, std::vector<Complex> values);

  static StepFunction constant(DomainPtr domain, Complex value);
  // Indicator of a set: value 1 on e, 0 on its complement.
  static StepFunction indicator(DomainPtr domain, const SetExpr& e);

  const DomainPtr& domain() const { return domain_; }
  const std::vector<SetExpr>& cells() const { return cells_; }
  const std::vector<Complex>& values() const { return values_; }
  Complex value_at(Int point) const;
  std::size_t cell_index_at(Int point) const;

 private:
  DomainPtr domain_;
  std::vector<SetExpr> cells_;
  std::vector<Complex> values_;
};

// Value of the unique cell decided in. Errors: kInconsistentOracle.
Complex ultralimit(const UltrafilterOracle& oracle, const StepFunction& f);
// sum over cells of value * mu(cell), evaluated independently of ultralimit.
Complex integrate_two_valued(const TwoValuedMeasure& mu, const StepFunction& f);

}  // namespace pettis::sets

#include "pettis/ultrafilter.hpp"

#include <algorithm>

#include "pettis/error.hpp"

namespace pettis::sets {

std::string_view to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::kPrincipal: return "principal";
    case OracleKind::kFreeSymbolic: return "free";
    case OracleKind::kSigmaCompleteSymbolic: return "sigma_complete";
  }
  return "?";
}

struct UltrafilterOracle::Core {
  std::string name;
  OracleKind kind;
  DomainPtr domain;
  Int point = 0;
  // Filter base in core coordinates; labels describe where each entry came from.
  std::vector<SetExpr> base;
  std::vector<std::string> labels;
  // Registered partitions and their selected cell in core coordinates.
  std::map<std::string, std::optional<Int>> partitions;
  std::vector<LogEntry> log;

  // Large atoms of the filter base, evaluated against the extra formulas.
  std::vector<std::vector<bool>> atoms_in_base(const std::vector<Formula>& extra) const {
    std::vector<Formula> compiled;
    for (const auto& b : base) compiled.push_back(domain->compile(b));
    std::vector<const Formula*> all;
    for (const auto& f : compiled) all.push_back(&f);
    for (const auto& f : extra) all.push_back(&f);
    std::vector<std::vector<bool>> inside;
    for (auto& row : domain->large_atoms(all)) {
      bool in_base = true;
      for (std::size_t i = 0; i < compiled.size() && in_base; ++i) in_base = row[i];
      if (in_base) inside.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(compiled.size()), row.end());
    }
    return inside;
  }

  bool base_consistent() const { return !atoms_in_base({}).empty(); }

  void validate() const {
    if (base_consistent()) return;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (!domain->has_large_part(domain->compile(base[i]))) {
        fail(ErrorCode::kValidationError, "oracle " + name + ": registration '" + labels[i] +
                                              "' names a small set, which no free ultrafilter contains");
      }
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
      for (std::size_t j = i + 1; j < base.size(); ++j) {
        if (!domain->has_large_part(domain->compile(base[i] & base[j]))) {
          fail(ErrorCode::kValidationError, "oracle " + name + ": registrations '" + labels[i] +
                                                "' and '" + labels[j] + "' conflict");
        }
      }
    }
    fail(ErrorCode::kValidationError, "oracle " + name + ": registrations are jointly inconsistent");
  }
};

namespace {

std::string label_of(const Registration& r) {
  return r.set.to_string() + (r.in ? " in" : " out");
}

}  // namespace

UltrafilterOracle UltrafilterOracle::principal(std::string name, DomainPtr domain, Int point) {
  auto core = std::make_shared<Core>();
  core->name = std::move(name);
  core->kind = OracleKind::kPrincipal;
  core->domain = std::move(domain);
  core->point = point;
  return UltrafilterOracle(std::move(core), 0);
}

UltrafilterOracle UltrafilterOracle::free_symbolic(std::string name, DomainPtr domain,
                                                   std::vector<Registration> registrations) {
  auto core = std::make_shared<Core>();
  core->name = std::move(name);
  core->kind = OracleKind::kFreeSymbolic;
  core->domain = std::move(domain);
  for (const auto& r : registrations) {
    core->base.push_back(r.in ? r.set : ~r.set);
    core->labels.push_back(label_of(r));
  }
  core->validate();
  return UltrafilterOracle(std::move(core), 0);
}

UltrafilterOracle UltrafilterOracle::sigma_complete(std::string name, DomainPtr domain,
                                                    std::vector<Registration> registrations) {
  if (domain->kind() != DomainKind::kSymbolicKappa) {
    fail(ErrorCode::kValidationError,
         "a sigma-complete non-principal ultrafilter needs a kappa domain; on Z it is principal");
  }
  UltrafilterOracle o = free_symbolic(std::move(name), std::move(domain), std::move(registrations));
  o.core_->kind = OracleKind::kSigmaCompleteSymbolic;
  return o;
}

const std::string& UltrafilterOracle::name() const { return core_->name; }
OracleKind UltrafilterOracle::kind() const { return core_->kind; }
const DomainPtr& UltrafilterOracle::domain() const { return core_->domain; }
const void* UltrafilterOracle::core_id() const { return core_.get(); }
const std::vector<LogEntry>& UltrafilterOracle::log() const { return core_->log; }

std::optional<Int> UltrafilterOracle::principal_point() const {
  if (core_->kind != OracleKind::kPrincipal) return std::nullopt;
  return core_->point - offset_;
}

std::string UltrafilterOracle::describe() const {
  std::string s = core_->name;
  if (offset_ != 0) s += (offset_ > 0 ? "+" : "") + std::to_string(offset_);
  return s;
}

bool UltrafilterOracle::decide(const SetExpr& e) const {
  const SetExpr shifted = offset_ == 0 ? e : SetExpr::shift(offset_, e);
  bool in = false;
  if (core_->kind == OracleKind::kPrincipal) {
    in = core_->domain->contains_point(shifted, core_->point);
  } else {
    const auto inside = core_->atoms_in_base({core_->domain->compile(shifted)});
    if (inside.empty()) {
      fail(ErrorCode::kInconsistentOracle, "oracle " + core_->name + " has an empty filter base");
    }
    const auto count = std::count_if(inside.begin(), inside.end(),
                                     [](const std::vector<bool>& r) { return r[0]; });
    if (count == static_cast<std::ptrdiff_t>(inside.size())) {
      in = true;
    } else if (count == 0) {
      in = false;
    } else {
      fail(ErrorCode::kUndecidableInFreeRule,
           "oracle " + describe() + " cannot decide " + e.to_string() +
               ": neither it nor its complement is forced by the registrations");
    }
  }
  core_->log.push_back({e.to_string(), offset_, in});
  return in;
}

UltrafilterOracle UltrafilterOracle::shift_pushforward(Int k) const {
  if (k != 0 && core_->domain->kind() == DomainKind::kSymbolicKappa &&
      core_->kind != OracleKind::kPrincipal) {
    // Shifting must be defined on every generator the filter base mentions.
    for (const auto& b : core_->base) core_->domain->compile(SetExpr::shift(offset_ + k, b));
  }
  return UltrafilterOracle(core_, offset_ + k);
}

void UltrafilterOracle::register_countable_partition(const CountablePartition& partition,
                                                     std::optional<Int> selected) {
  if (offset_ != 0) {
    fail(ErrorCode::kInvalidArgument, "partitions are registered on the unshifted oracle");
  }
  if (!core_->domain->has_partition(partition.id)) {
    fail(ErrorCode::kUnregisteredCell,
         "partition " + partition.id + " is not declared on domain " + core_->domain->name());
  }
  if (selected && !partition.has_cell(*selected)) {
    fail(ErrorCode::kUnregisteredCell, "partition " + partition.id + " has no cell " +
                                           std::to_string(*selected));
  }
  if (auto it = core_->partitions.find(partition.id); it != core_->partitions.end()) {
    if (it->second != selected) {
      fail(ErrorCode::kMultipleSelected, "partition " + partition.id +
                                             " already registered with another selected cell");
    }
    return;
  }
  const bool blocks = partition.kind == CountablePartition::Kind::kBlocks;
  switch (core_->kind) {
    case OracleKind::kPrincipal: {
      if (selected && !core_->domain->contains_point(partition.cell(*selected), core_->point)) {
        fail(ErrorCode::kInconsistentOracle, "principal oracle " + core_->name + " at " +
                                                 std::to_string(core_->point) +
                                                 " cannot select cell " + std::to_string(*selected));
      }
      break;
    }
    case OracleKind::kFreeSymbolic:
      if (selected && blocks) {
        fail(ErrorCode::kInconsistentOracle,
             "free oracle " + core_->name + " decides every finite cell of " + partition.id +
                 " out; no cell can be selected");
      }
      break;
    case OracleKind::kSigmaCompleteSymbolic:
      if (!selected && partition.kind != CountablePartition::Kind::kExplicit) {
        fail(ErrorCode::kInconsistentOracle, "sigma-complete oracle " + core_->name +
                                                 " must select a cell of " + partition.id);
      }
      break;
  }
  if (selected && core_->kind != OracleKind::kPrincipal) {
    core_->base.push_back(partition.cell(*selected));
    core_->labels.push_back(partition.id + " cell " + std::to_string(*selected) + " selected");
    if (!core_->base_consistent()) {
      core_->base.pop_back();
      core_->labels.pop_back();
      fail(ErrorCode::kInconsistentOracle, "selecting cell " + std::to_string(*selected) + " of " +
                                               partition.id + " contradicts the decisions of " +
                                               core_->name);
    }
  }
  core_->partitions.emplace(partition.id, selected);
}

bool UltrafilterOracle::has_partition(const std::string& id) const {
  return core_->partitions.count(id) > 0;
}

std::optional<Int> UltrafilterOracle::selected_cell(const CountablePartition& partition) const {
  auto it = core_->partitions.find(partition.id);
  if (it == core_->partitions.end()) {
    fail(ErrorCode::kPartitionNotRegistered,
         "partition " + partition.id + " is not registered with oracle " + core_->name);
  }
  switch (partition.kind) {
    case CountablePartition::Kind::kExplicit:
      for (Int n = 0; n < static_cast<Int>(partition.cells.size()); ++n) {
        if (decide(partition.cell(n))) return n;
      }
      return std::nullopt;
    case CountablePartition::Kind::kBlocks:
      if (core_->kind == OracleKind::kPrincipal) return partition.cell_of_point(*principal_point());
      return std::nullopt;
    case CountablePartition::Kind::kFamily:
      if (core_->kind == OracleKind::kPrincipal) return partition.cell_of_point(*principal_point());
      if (!it->second) return std::nullopt;
      return *it->second - partition.width * offset_;
  }
  return std::nullopt;
}

StepFunction::StepFunction(DomainPtr domain, std::vector<SetExpr> cells, std::vector<Complex> values)
    : domain_(std::move(domain)), cells_(std::move(cells)), values_(std::move(values)) {
  if (cells_.empty() || cells_.size() != values_.size()) {
    fail(ErrorCode::kInvalidArgument, "step function needs one value per cell");
  }
  SetExpr cover = SetExpr::empty();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    for (std::size_t j = i + 1; j < cells_.size(); ++j) {
      if (!domain_->disjoint(cells_[i], cells_[j])) {
        fail(ErrorCode::kInvariantViolation, "step cells " + cells_[i].to_string() + " and " +
                                                 cells_[j].to_string() + " overlap");
      }
    }
    cover = cover | cells_[i];
  }
  if (!domain_->is_empty(~cover)) {
    fail(ErrorCode::kInvariantViolation, "step cells do not cover the domain");
  }
}

StepFunction StepFunction::constant(DomainPtr domain, Complex value) {
  return StepFunction(std::move(domain), {SetExpr::full()}, {value});
}

StepFunction StepFunction::indicator(DomainPtr domain, const SetExpr& e) {
  return StepFunction(std::move(domain), {e, ~e}, {1.0, 0.0});
}

std::size_t StepFunction::cell_index_at(Int point) const {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (domain_->contains_point(cells_[i], point)) return i;
  }
  fail(ErrorCode::kUnregisteredCell, "no step cell contains " + std::to_string(point));
}

Complex StepFunction::value_at(Int point) const {
  return values_[cell_index_at(point)];
}

Complex ultralimit(const UltrafilterOracle& oracle, const StepFunction& f) {
  std::optional<std::size_t> in_cell;
  for (std::size_t i = 0; i < f.cells().size(); ++i) {
    if (!oracle.decide(f.cells()[i])) continue;
    if (in_cell) {
      fail(ErrorCode::kInconsistentOracle, "oracle " + oracle.describe() + " decides two cells in");
    }
    in_cell = i;
  }
  if (!in_cell) {
    fail(ErrorCode::kInconsistentOracle, "oracle " + oracle.describe() + " decides no cell in");
  }
  return f.values()[*in_cell];
}

Complex integrate_two_valued(const TwoValuedMeasure& mu, const StepFunction& f) {
  Complex total = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < f.cells().size(); ++i) {
    const double m = mu.measure(f.cells()[i]);
    total += f.values()[i] * m;
    mass += m;
  }
  if (mass != 1.0) {
    fail(ErrorCode::kInconsistentOracle, "two-valued measure of a partition sums to " +
                                             std::to_string(mass));
  }
  return total;
}

}  // namespace pettis::sets

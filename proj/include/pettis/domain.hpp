#pragma once

// Index domains: the integers, and a formal uncountable set kappa whose
// subsets are generated symbolically and whose integer points embed Z.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pettis/set_expr.hpp"

namespace pettis::sets {

enum class DomainKind { kIntegers, kSymbolicKappa };

// A leaf after shifts have been pushed down and generators resolved.
struct Literal {
  enum class Kind { kConcrete, kGenerator, kCell };
  Kind kind = Kind::kConcrete;
  IntegerSet set = IntegerSet::finite({});
  std::string name;
  Int index = 0;

  std::string key() const;
  SetExpr to_expr() const;
};

struct Formula {
  enum class Op { kFalse, kTrue, kLit, kNot, kAnd, kOr };
  Op op = Op::kFalse;
  Literal lit;
  std::vector<Formula> kids;

  static Formula constant(bool v) { return {v ? Op::kTrue : Op::kFalse, {}, {}}; }
  static Formula literal(Literal l) { return {Op::kLit, std::move(l), {}}; }
  static Formula negate(Formula f) { return {Op::kNot, {}, {std::move(f)}}; }
  static Formula both(Formula a, Formula b) { return {Op::kAnd, {}, {std::move(a), std::move(b)}}; }
  static Formula either(Formula a, Formula b) { return {Op::kOr, {}, {std::move(a), std::move(b)}}; }

  bool eval(const std::function<bool(const Literal&)>& value) const;
  void collect(std::vector<Literal>& out) const;
};

// A countable family of pairwise disjoint cells covering the domain.
struct CountablePartition {
  enum class Kind {
    // Integers: cell n = [n*width, (n+1)*width).
    kBlocks,
    // Kappa: formal cells cell(id, n), n in Z; shift_k(cell_n) = cell_{n+step*k}
    // and the integer point x lies in cell_{step*x}.
    kFamily,
    // Finitely many explicit cells, indexed 0..size-1.
    kExplicit,
  };

  std::string id;
  Kind kind = Kind::kBlocks;
  Int width = 1;
  std::vector<SetExpr> cells;

  SetExpr cell(Int n) const;
  // Index of the cell containing the integer point, if computable without a domain.
  std::optional<Int> cell_of_point(Int y) const;
  bool has_cell(Int n) const;
};

class Domain {
 public:
  virtual ~Domain() = default;

  const std::string& name() const { return name_; }
  virtual DomainKind kind() const = 0;

  // Pushes shifts to the leaves and resolves generators.
  // Errors: kUnregisteredGenerator, kUnregisteredShift.
  Formula compile(const SetExpr& e) const { return compile_shifted(e, 0); }

  bool contains_point(const SetExpr& e, Int y) const;
  bool contains_point(const Formula& f, Int y) const;

  // Membership rows of the large atoms: each row lists, for one infinite
  // region of the common refinement that is not reachable by finitely many
  // points, whether it lies in each formula.
  virtual std::vector<std::vector<bool>> large_atoms(
      const std::vector<const Formula*>& formulas) const = 0;

  bool has_large_part(const Formula& f) const;
  bool integer_trace_empty(const Formula& f) const;
  bool is_empty(const Formula& f) const;
  bool is_empty(const SetExpr& e) const { return is_empty(compile(e)); }
  bool disjoint(const SetExpr& a, const SetExpr& b) const { return is_empty(a & b); }
  bool subset(const SetExpr& a, const SetExpr& b) const { return is_empty(a & ~b); }
  bool equivalent(const SetExpr& a, const SetExpr& b) const {
    return subset(a, b) && subset(b, a);
  }

  void add_partition(CountablePartition p);
  const CountablePartition& partition(const std::string& id) const;
  bool has_partition(const std::string& id) const { return partitions_.count(id) > 0; }
  const std::map<std::string, CountablePartition>& partitions() const { return partitions_; }

  // Generator names in registration order.
  const std::vector<std::string>& generator_names() const { return generator_order_; }

 protected:
  explicit Domain(std::string name) : name_(std::move(name)) {}

  virtual Formula compile_leaf(const SetExpr& leaf, Int shift) const = 0;
  virtual bool literal_contains(const Literal& lit, Int y) const = 0;
  // Period and extent of the literal's integer trace.
  virtual std::pair<Int, Int> literal_profile(const Literal& lit) const = 0;

  // Common period and bound for the integer traces of the formulas.
  std::pair<Int, Int> window(const std::vector<const Formula*>& formulas) const;
  // One representative integer per tail class (sign, residue mod period).
  static std::vector<Int> tail_representatives(Int period, Int bound);

  Formula compile_shifted(const SetExpr& e, Int shift) const;

  std::vector<std::string> generator_order_;

 private:

  std::string name_;
  std::map<std::string, CountablePartition> partitions_;
};

class IntegersDomain : public Domain {
 public:
  explicit IntegersDomain(std::string name) : Domain(std::move(name)) {}

  DomainKind kind() const override { return DomainKind::kIntegers; }
  // The definition may only use concrete sets and previously added generators.
  void add_generator(const std::string& name, const SetExpr& definition);

  std::vector<std::vector<bool>> large_atoms(
      const std::vector<const Formula*>& formulas) const override;

 protected:
  Formula compile_leaf(const SetExpr& leaf, Int shift) const override;
  bool literal_contains(const Literal& lit, Int y) const override;
  std::pair<Int, Int> literal_profile(const Literal& lit) const override;

 private:
  std::map<std::string, Formula> definitions_;
};

class KappaDomain : public Domain {
 public:
  explicit KappaDomain(std::string name) : Domain(std::move(name)) {}

  DomainKind kind() const override { return DomainKind::kSymbolicKappa; }
  // trace is the generator's intersection with the embedded integers; it may
  // only use concrete sets.
  void add_generator(const std::string& name, const SetExpr& trace = SetExpr::empty());
  // shift_k(generator) := image. Undeclared shifts compose declared +-1 steps.
  void add_shift(const std::string& generator, Int k, const SetExpr& image);
  // A set declared empty; restricts the admissible large atoms.
  void add_constraint(const SetExpr& e);
  // Checks that every shift image has the shifted trace of its generator and
  // that the constraints have empty traces. Errors: kValidationError.
  void validate() const;

  std::vector<std::vector<bool>> large_atoms(
      const std::vector<const Formula*>& formulas) const override;

 protected:
  Formula compile_leaf(const SetExpr& leaf, Int shift) const override;
  bool literal_contains(const Literal& lit, Int y) const override;
  std::pair<Int, Int> literal_profile(const Literal& lit) const override;

 private:
  std::map<std::string, Formula> traces_;
  std::map<std::pair<std::string, Int>, SetExpr> shifts_;
  std::vector<SetExpr> constraints_;
};

using DomainPtr = std::shared_ptr<const Domain>;

// Disjunction of the nonempty minterms over a literal basis, reduced so that
// no literal is redundant. Empty and Full have an empty basis.
struct AtomForm {
  std::vector<Literal> basis;
  std::vector<std::vector<bool>> minterms;
  bool full = false;

  bool is_empty() const { return !full && minterms.empty(); }
  bool is_full() const { return full; }
  SetExpr to_expr() const;
  bool operator==(const AtomForm& other) const;
};

AtomForm normalize(const Domain& domain, const SetExpr& e);

}  // namespace pettis::sets

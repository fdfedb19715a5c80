#pragma once

// Set expressions over an index domain, and the concrete integer sets they
// bottom out in.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pettis::sets {

using Int = std::int64_t;

// The concrete subsets of Z the calculus can name directly.
class IntegerSet {
 public:
  enum class Kind { kFinite, kPeriodic, kAtLeast, kAtMost };

  static IntegerSet finite(std::vector<Int> points);
  // Half-open range [lo, hi).
  static IntegerSet range(Int lo, Int hi);
  static IntegerSet periodic(Int modulus, std::vector<Int> residues);
  static IntegerSet at_least(Int bound);
  static IntegerSet at_most(Int bound);

  Kind kind() const { return kind_; }
  // Sorted, unique; residues are reduced into [0, modulus).
  const std::vector<Int>& points() const { return points_; }
  Int modulus() const { return modulus_; }
  Int bound() const { return bound_; }

  bool contains(Int y) const;
  // X + k.
  IntegerSet shifted(Int k) const;
  // Membership beyond extent() depends only on sign and residue mod period().
  Int period() const;
  Int extent() const;
  std::string to_string() const;

 private:
  IntegerSet() = default;

  Kind kind_ = Kind::kFinite;
  std::vector<Int> points_;
  Int modulus_ = 1;
  Int bound_ = 0;
};

class SetExpr {
 public:
  enum class Kind {
    kEmpty,
    kFull,
    kGenerator,
    kConcrete,
    kCell,
    kComplement,
    kUnion,
    kIntersection,
    kShift,
  };

  SetExpr() : SetExpr(empty()) {}

  static SetExpr empty();
  static SetExpr full();
  static SetExpr generator(std::string name);
  static SetExpr concrete(IntegerSet set);
  static SetExpr points(std::vector<Int> points) { return concrete(IntegerSet::finite(std::move(points))); }
  // Cell n of a countable partition family.
  static SetExpr cell(std::string partition, Int index);
  static SetExpr complement(SetExpr e);
  static SetExpr union_of(SetExpr a, SetExpr b);
  static SetExpr intersection(SetExpr a, SetExpr b);
  // e + k.
  static SetExpr shift(Int k, SetExpr e);

  Kind kind() const;
  const std::string& name() const;
  const IntegerSet& concrete_set() const;
  Int index() const;
  Int offset() const;
  const SetExpr& child() const;
  const SetExpr& lhs() const;
  const SetExpr& rhs() const;

  std::string to_string() const;

 private:
  struct Node;
  explicit SetExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline SetExpr operator~(SetExpr e) { return SetExpr::complement(std::move(e)); }
inline SetExpr operator|(SetExpr a, SetExpr b) { return SetExpr::union_of(std::move(a), std::move(b)); }
inline SetExpr operator&(SetExpr a, SetExpr b) { return SetExpr::intersection(std::move(a), std::move(b)); }

// Grammar, loosest binding first:
//   expr    := term ('|' term)*
//   term    := factor ('&' factor)*
//   factor  := '~' factor | primary
//   primary := '(' expr ')' | '{' ints '}' | empty | full | IDENT
//            | shift(k, expr) | cell(IDENT, n) | mod(m, {r,...})
//            | ge(b) | le(b) | range(lo, hi)
// Errors are kParseError with a 1-based column.
SetExpr parse_set_expr(std::string_view text);

}  // namespace pettis::sets

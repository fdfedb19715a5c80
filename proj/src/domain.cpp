#include "pettis/domain.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "pettis/error.hpp"

namespace pettis::sets {
namespace {

constexpr Int kMaxPeriod = Int{1} << 16;
constexpr Int kMaxBound = Int{1} << 20;
constexpr std::size_t kMaxAtoms = std::size_t{1} << 16;
constexpr std::size_t kMaxBasis = 16;

Int floor_mod(Int a, Int m) {
  const Int r = a % m;
  return r < 0 ? r + m : r;
}

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Formula shift_concrete(const Formula& f, Int k) {
  Formula out = f;
  if (out.op == Formula::Op::kLit) out.lit.set = out.lit.set.shifted(k);
  for (auto& kid : out.kids) kid = shift_concrete(kid, k);
  return out;
}

bool only_concrete(const Formula& f) {
  if (f.op == Formula::Op::kLit && f.lit.kind != Literal::Kind::kConcrete) return false;
  return std::all_of(f.kids.begin(), f.kids.end(), only_concrete);
}

}  // namespace

std::string Literal::key() const {
  switch (kind) {
    case Kind::kConcrete: return "c:" + set.to_string();
    case Kind::kGenerator: return "g:" + name;
    case Kind::kCell: return "p:" + name + ":" + std::to_string(index);
  }
  return "?";
}

SetExpr Literal::to_expr() const {
  switch (kind) {
    case Kind::kConcrete: return SetExpr::concrete(set);
    case Kind::kGenerator: return SetExpr::generator(name);
    case Kind::kCell: return SetExpr::cell(name, index);
  }
  return SetExpr::empty();
}

bool Formula::eval(const std::function<bool(const Literal&)>& value) const {
  switch (op) {
    case Op::kFalse: return false;
    case Op::kTrue: return true;
    case Op::kLit: return value(lit);
    case Op::kNot: return !kids[0].eval(value);
    case Op::kAnd: return kids[0].eval(value) && kids[1].eval(value);
    case Op::kOr: return kids[0].eval(value) || kids[1].eval(value);
  }
  return false;
}

void Formula::collect(std::vector<Literal>& out) const {
  if (op == Op::kLit) out.push_back(lit);
  for (const auto& k : kids) k.collect(out);
}

SetExpr CountablePartition::cell(Int n) const {
  switch (kind) {
    case Kind::kBlocks: {
      std::vector<Int> pts;
      for (Int x = n * width; x < (n + 1) * width; ++x) pts.push_back(x);
      return SetExpr::points(std::move(pts));
    }
    case Kind::kFamily: return SetExpr::cell(id, n);
    case Kind::kExplicit:
      if (!has_cell(n)) {
        fail(ErrorCode::kUnregisteredCell,
             "partition " + id + " has no cell " + std::to_string(n));
      }
      return cells[static_cast<std::size_t>(n)];
  }
  return SetExpr::empty();
}

std::optional<Int> CountablePartition::cell_of_point(Int y) const {
  switch (kind) {
    case Kind::kBlocks: return floor_div(y, width);
    case Kind::kFamily: return width * y;
    case Kind::kExplicit: return std::nullopt;
  }
  return std::nullopt;
}

bool CountablePartition::has_cell(Int n) const {
  if (kind != Kind::kExplicit) return true;
  return n >= 0 && n < static_cast<Int>(cells.size());
}

Formula Domain::compile_shifted(const SetExpr& e, Int shift) const {
  using K = SetExpr::Kind;
  switch (e.kind()) {
    case K::kEmpty: return Formula::constant(false);
    case K::kFull: return Formula::constant(true);
    case K::kComplement: return Formula::negate(compile_shifted(e.child(), shift));
    case K::kUnion:
      return Formula::either(compile_shifted(e.lhs(), shift), compile_shifted(e.rhs(), shift));
    case K::kIntersection:
      return Formula::both(compile_shifted(e.lhs(), shift), compile_shifted(e.rhs(), shift));
    case K::kShift: return compile_shifted(e.child(), shift + e.offset());
    case K::kCell:
      if (has_partition(e.name()) &&
          partition(e.name()).kind == CountablePartition::Kind::kExplicit) {
        return compile_shifted(partition(e.name()).cell(e.index()), shift);
      }
      return compile_leaf(e, shift);
    case K::kGenerator:
    case K::kConcrete: return compile_leaf(e, shift);
  }
  return Formula::constant(false);
}

bool Domain::contains_point(const SetExpr& e, Int y) const {
  return contains_point(compile(e), y);
}

bool Domain::contains_point(const Formula& f, Int y) const {
  return f.eval([&](const Literal& l) { return literal_contains(l, y); });
}

bool Domain::has_large_part(const Formula& f) const {
  for (const auto& row : large_atoms({&f})) {
    if (row[0]) return true;
  }
  return false;
}

std::pair<Int, Int> Domain::window(const std::vector<const Formula*>& formulas) const {
  std::vector<Literal> lits;
  for (const auto* f : formulas) f->collect(lits);
  Int period = 1;
  Int bound = 0;
  for (const auto& l : lits) {
    const auto [p, b] = literal_profile(l);
    period = std::lcm(period, p);
    bound = std::max(bound, b);
    if (period > kMaxPeriod || bound > kMaxBound) {
      fail(ErrorCode::kTermBudgetExceeded, "integer analysis window too large (period " +
                                               std::to_string(period) + ", bound " +
                                               std::to_string(bound) + ")");
    }
  }
  return {period, bound};
}

std::vector<Int> Domain::tail_representatives(Int period, Int bound) {
  std::vector<Int> reps;
  reps.reserve(static_cast<std::size_t>(2 * period));
  for (Int r = 0; r < period; ++r) {
    reps.push_back(bound + 1 + floor_mod(r - (bound + 1), period));
    reps.push_back(-bound - 1 - floor_mod((-bound - 1) - r, period));
  }
  return reps;
}

bool Domain::integer_trace_empty(const Formula& f) const {
  const auto [period, bound] = window({&f});
  for (Int y = -bound; y <= bound; ++y) {
    if (contains_point(f, y)) return false;
  }
  for (Int y : tail_representatives(period, bound)) {
    if (contains_point(f, y)) return false;
  }
  return true;
}

bool Domain::is_empty(const Formula& f) const {
  return !has_large_part(f) && integer_trace_empty(f);
}

void Domain::add_partition(CountablePartition p) {
  if (partitions_.count(p.id)) {
    fail(ErrorCode::kValidationError, "partition " + p.id + " declared twice");
  }
  if (p.kind == CountablePartition::Kind::kBlocks && kind() != DomainKind::kIntegers) {
    fail(ErrorCode::kValidationError, "block partitions live on the integers domain");
  }
  if (p.kind == CountablePartition::Kind::kFamily && kind() != DomainKind::kSymbolicKappa) {
    fail(ErrorCode::kValidationError, "formal cell families live on a kappa domain");
  }
  if (p.width < 1) fail(ErrorCode::kValidationError, "partition width must be positive");
  if (p.kind == CountablePartition::Kind::kExplicit) {
    if (p.cells.empty()) fail(ErrorCode::kValidationError, "partition " + p.id + " has no cells");
    SetExpr cover = SetExpr::empty();
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
      for (std::size_t j = i + 1; j < p.cells.size(); ++j) {
        if (!disjoint(p.cells[i], p.cells[j])) {
          fail(ErrorCode::kValidationError, "partition " + p.id + ": cells " +
                                                std::to_string(i) + " and " + std::to_string(j) +
                                                " overlap");
        }
      }
      cover = cover | p.cells[i];
    }
    if (!is_empty(~cover)) {
      fail(ErrorCode::kValidationError, "partition " + p.id + " does not cover the domain");
    }
  }
  partitions_.emplace(p.id, std::move(p));
}

const CountablePartition& Domain::partition(const std::string& id) const {
  auto it = partitions_.find(id);
  if (it == partitions_.end()) {
    fail(ErrorCode::kUnregisteredCell, "no partition named " + id + " on domain " + name_);
  }
  return it->second;
}

void IntegersDomain::add_generator(const std::string& name, const SetExpr& definition) {
  if (definitions_.count(name)) fail(ErrorCode::kValidationError, "generator " + name + " redefined");
  Formula f = compile(definition);
  definitions_.emplace(name, std::move(f));
  generator_order_.push_back(name);
}

Formula IntegersDomain::compile_leaf(const SetExpr& leaf, Int shift) const {
  switch (leaf.kind()) {
    case SetExpr::Kind::kConcrete: {
      Literal l;
      l.set = leaf.concrete_set().shifted(shift);
      return Formula::literal(std::move(l));
    }
    case SetExpr::Kind::kGenerator: {
      auto it = definitions_.find(leaf.name());
      if (it == definitions_.end()) {
        fail(ErrorCode::kUnregisteredGenerator,
             "generator " + leaf.name() + " is not registered on " + name());
      }
      return shift_concrete(it->second, shift);
    }
    case SetExpr::Kind::kCell: {
      const auto& p = partition(leaf.name());
      Literal l;
      l.set = IntegerSet::range(leaf.index() * p.width + shift, (leaf.index() + 1) * p.width + shift);
      return Formula::literal(std::move(l));
    }
    default: break;
  }
  fail(ErrorCode::kInvariantViolation, "compile_leaf on a non-leaf");
}

bool IntegersDomain::literal_contains(const Literal& lit, Int y) const {
  return lit.set.contains(y);
}

std::pair<Int, Int> IntegersDomain::literal_profile(const Literal& lit) const {
  return {lit.set.period(), lit.set.extent()};
}

std::vector<std::vector<bool>> IntegersDomain::large_atoms(
    const std::vector<const Formula*>& formulas) const {
  const auto [period, bound] = window(formulas);
  std::vector<std::vector<bool>> rows;
  for (Int y : tail_representatives(period, bound)) {
    std::vector<bool> row;
    for (const auto* f : formulas) row.push_back(contains_point(*f, y));
    rows.push_back(std::move(row));
  }
  return rows;
}

void KappaDomain::add_generator(const std::string& name, const SetExpr& trace) {
  if (traces_.count(name)) fail(ErrorCode::kValidationError, "generator " + name + " redefined");
  Formula f = compile(trace);
  if (!only_concrete(f)) {
    fail(ErrorCode::kValidationError, "trace of " + name + " must use concrete integer sets only");
  }
  traces_.emplace(name, std::move(f));
  generator_order_.push_back(name);
}

void KappaDomain::add_shift(const std::string& generator, Int k, const SetExpr& image) {
  if (!traces_.count(generator)) {
    fail(ErrorCode::kUnregisteredGenerator, "shift declared for unknown generator " + generator);
  }
  if (k == 0) fail(ErrorCode::kValidationError, "shift by 0 is the identity and cannot be redeclared");
  shifts_[{generator, k}] = image;
}

void KappaDomain::add_constraint(const SetExpr& e) {
  compile(e);
  constraints_.push_back(e);
}

void KappaDomain::validate() const {
  for (const auto& [key, image] : shifts_) {
    const SetExpr lhs = SetExpr::shift(key.second, SetExpr::generator(key.first));
    // Compare integer traces only: the image itself is the definition of the
    // large part of the shifted generator.
    const Formula shifted_trace = shift_concrete(traces_.at(key.first), key.second);
    const Formula image_f = compile(image);
    const Formula diff = Formula::either(Formula::both(shifted_trace, Formula::negate(image_f)),
                                         Formula::both(Formula::negate(shifted_trace), image_f));
    if (!integer_trace_empty(diff)) {
      fail(ErrorCode::kValidationError, "shift table entry " + lhs.to_string() + " = " +
                                            image.to_string() +
                                            " disagrees with the integer traces");
    }
  }
  for (const auto& c : constraints_) {
    if (!integer_trace_empty(compile(c))) {
      fail(ErrorCode::kValidationError,
           "constraint " + c.to_string() + " has integer points; constraints must be empty sets");
    }
  }
  std::vector<const Formula*> none;
  if (large_atoms(none).empty()) {
    fail(ErrorCode::kValidationError, "constraints leave no large atoms in " + name());
  }
}

Formula KappaDomain::compile_leaf(const SetExpr& leaf, Int shift) const {
  switch (leaf.kind()) {
    case SetExpr::Kind::kConcrete: {
      Literal l;
      l.set = leaf.concrete_set().shifted(shift);
      return Formula::literal(std::move(l));
    }
    case SetExpr::Kind::kGenerator: {
      if (!traces_.count(leaf.name())) {
        fail(ErrorCode::kUnregisteredGenerator,
             "generator " + leaf.name() + " is not registered on " + name());
      }
      if (shift == 0) {
        Literal l;
        l.kind = Literal::Kind::kGenerator;
        l.name = leaf.name();
        return Formula::literal(std::move(l));
      }
      if (auto it = shifts_.find({leaf.name(), shift}); it != shifts_.end()) {
        return compile(it->second);
      }
      const Int step = shift > 0 ? 1 : -1;
      if (auto it = shifts_.find({leaf.name(), step}); it != shifts_.end()) {
        return compile_shifted(it->second, shift - step);
      }
      fail(ErrorCode::kUnregisteredShift, "no shift by " + std::to_string(shift) +
                                              " declared for generator " + leaf.name());
    }
    case SetExpr::Kind::kCell: {
      const auto& p = partition(leaf.name());
      Literal l;
      l.kind = Literal::Kind::kCell;
      l.name = p.id;
      l.index = leaf.index() + p.width * shift;
      return Formula::literal(std::move(l));
    }
    default: break;
  }
  fail(ErrorCode::kInvariantViolation, "compile_leaf on a non-leaf");
}

bool KappaDomain::literal_contains(const Literal& lit, Int y) const {
  switch (lit.kind) {
    case Literal::Kind::kConcrete: return lit.set.contains(y);
    case Literal::Kind::kGenerator:
      return traces_.at(lit.name).eval([y](const Literal& l) { return l.set.contains(y); });
    case Literal::Kind::kCell: return partition(lit.name).width * y == lit.index;
  }
  return false;
}

std::pair<Int, Int> KappaDomain::literal_profile(const Literal& lit) const {
  switch (lit.kind) {
    case Literal::Kind::kConcrete: return {lit.set.period(), lit.set.extent()};
    case Literal::Kind::kGenerator: {
      std::vector<Literal> lits;
      traces_.at(lit.name).collect(lits);
      Int p = 1, b = 0;
      for (const auto& l : lits) {
        p = std::lcm(p, l.set.period());
        b = std::max(b, l.set.extent());
      }
      return {p, b};
    }
    case Literal::Kind::kCell: {
      const Int w = partition(lit.name).width;
      const Int x = lit.index / w;
      return {1, (x < 0 ? -x : x) + 1};
    }
  }
  return {1, 0};
}

std::vector<std::vector<bool>> KappaDomain::large_atoms(
    const std::vector<const Formula*>& formulas) const {
  std::vector<Formula> constraint_formulas;
  for (const auto& c : constraints_) constraint_formulas.push_back(compile(c));

  std::vector<Literal> lits;
  for (const auto* f : formulas) f->collect(lits);
  for (const auto& c : constraint_formulas) c.collect(lits);
  // Each family is one variable ranging over its mentioned cells plus "other".
  std::map<std::string, std::vector<Int>> mentioned;
  for (const auto& l : lits) {
    if (l.kind == Literal::Kind::kCell) mentioned[l.name].push_back(l.index);
  }
  std::vector<std::string> families;
  std::vector<std::vector<Int>> choices;
  for (auto& [name, idx] : mentioned) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    families.push_back(name);
    choices.push_back(idx);
  }
  const std::size_t g = generator_order_.size();
  std::size_t total = std::size_t{1} << g;
  for (const auto& c : choices) {
    total *= c.size() + 1;
    if (total > kMaxAtoms) fail(ErrorCode::kTermBudgetExceeded, "too many large atoms");
  }
  if (g > 16) fail(ErrorCode::kTermBudgetExceeded, "too many generators");

  std::map<std::string, std::size_t> gen_index;
  for (std::size_t i = 0; i < g; ++i) gen_index[generator_order_[i]] = i;
  std::map<std::string, std::size_t> fam_index;
  for (std::size_t i = 0; i < families.size(); ++i) fam_index[families[i]] = i;

  std::vector<std::vector<bool>> rows;
  std::vector<std::size_t> pick(families.size(), 0);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    const std::size_t bits = rest & ((std::size_t{1} << g) - 1);
    rest >>= g;
    for (std::size_t i = 0; i < families.size(); ++i) {
      pick[i] = rest % (choices[i].size() + 1);
      rest /= choices[i].size() + 1;
    }
    auto value = [&](const Literal& l) {
      switch (l.kind) {
        case Literal::Kind::kConcrete: return false;
        case Literal::Kind::kGenerator: return ((bits >> gen_index.at(l.name)) & 1u) != 0;
        case Literal::Kind::kCell: {
          const std::size_t f = fam_index.at(l.name);
          return pick[f] < choices[f].size() && choices[f][pick[f]] == l.index;
        }
      }
      return false;
    };
    bool admissible = true;
    for (const auto& c : constraint_formulas) {
      if (c.eval(value)) {
        admissible = false;
        break;
      }
    }
    if (!admissible) continue;
    std::vector<bool> row;
    for (const auto* f : formulas) row.push_back(f->eval(value));
    rows.push_back(std::move(row));
  }
  return rows;
}

SetExpr AtomForm::to_expr() const {
  if (full) return SetExpr::full();
  if (minterms.empty()) return SetExpr::empty();
  std::optional<SetExpr> acc;
  for (const auto& m : minterms) {
    std::optional<SetExpr> term;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      SetExpr l = m[i] ? basis[i].to_expr() : ~basis[i].to_expr();
      term = term ? (*term & l) : l;
    }
    acc = acc ? (*acc | *term) : *term;
  }
  return *acc;
}

bool AtomForm::operator==(const AtomForm& other) const {
  if (full != other.full || basis.size() != other.basis.size() || minterms != other.minterms) {
    return false;
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].key() != other.basis[i].key()) return false;
  }
  return true;
}

AtomForm normalize(const Domain& domain, const SetExpr& e) {
  const Formula f = domain.compile(e);
  std::vector<Literal> lits;
  f.collect(lits);
  std::sort(lits.begin(), lits.end(),
            [](const Literal& a, const Literal& b) { return a.key() < b.key(); });
  lits.erase(std::unique(lits.begin(), lits.end(),
                         [](const Literal& a, const Literal& b) { return a.key() == b.key(); }),
             lits.end());
  if (lits.size() > kMaxBasis) {
    fail(ErrorCode::kTermBudgetExceeded, "normalization basis above 16 literals");
  }
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < lits.size(); ++i) pos[lits[i].key()] = i;

  // Minterm status: 0 empty, 1 nonempty outside e, 2 nonempty inside e.
  const std::size_t n = std::size_t{1} << lits.size();
  std::vector<int> status(n, 0);
  for (std::size_t mask = 0; mask < n; ++mask) {
    Formula conj = Formula::constant(true);
    for (std::size_t i = 0; i < lits.size(); ++i) {
      Formula l = Formula::literal(lits[i]);
      conj = Formula::both(std::move(conj), (mask >> i) & 1u ? l : Formula::negate(l));
    }
    if (domain.is_empty(conj)) continue;
    const bool inside =
        f.eval([&](const Literal& l) { return ((mask >> pos.at(l.key())) & 1u) != 0; });
    status[mask] = inside ? 2 : 1;
  }

  // Drop literals the set does not depend on.
  std::vector<std::size_t> alive(lits.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<int> current = status;
  std::size_t width = lits.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      bool redundant = true;
      for (std::size_t m = 0; m < current.size() && redundant; ++m) {
        if (m & bit) continue;
        const int a = current[m], b = current[m | bit];
        if (a != 0 && b != 0 && a != b) redundant = false;
      }
      if (!redundant) continue;
      std::vector<int> next(current.size() / 2, 0);
      for (std::size_t m = 0; m < current.size(); ++m) {
        const std::size_t low = m & (bit - 1);
        const std::size_t high = (m >> (i + 1)) << i;
        next[high | low] = std::max(next[high | low], current[m]);
      }
      current = std::move(next);
      alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(i));
      --width;
      changed = true;
      break;
    }
  }

  AtomForm form;
  for (std::size_t idx : alive) form.basis.push_back(lits[idx]);
  if (form.basis.empty()) {
    form.full = current[0] == 2;
    return form;
  }
  for (std::size_t m = 0; m < current.size(); ++m) {
    if (current[m] != 2) continue;
    std::vector<bool> bits(width);
    for (std::size_t i = 0; i < width; ++i) bits[i] = ((m >> i) & 1u) != 0;
    form.minterms.push_back(std::move(bits));
  }
  return form;
}

}  // namespace pettis::sets

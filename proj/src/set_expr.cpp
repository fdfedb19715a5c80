#include "pettis/set_expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "pettis/error.hpp"

namespace pettis::sets {
namespace {

Int floor_mod(Int a, Int m) {
  const Int r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

IntegerSet IntegerSet::finite(std::vector<Int> points) {
  IntegerSet s;
  s.kind_ = Kind::kFinite;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  s.points_ = std::move(points);
  return s;
}

IntegerSet IntegerSet::range(Int lo, Int hi) {
  if (hi - lo > 100000) fail(ErrorCode::kInvalidArgument, "finite range too long");
  std::vector<Int> pts;
  for (Int x = lo; x < hi; ++x) pts.push_back(x);
  return finite(std::move(pts));
}

IntegerSet IntegerSet::periodic(Int modulus, std::vector<Int> residues) {
  if (modulus < 1) fail(ErrorCode::kInvalidArgument, "modulus must be positive");
  IntegerSet s;
  s.kind_ = Kind::kPeriodic;
  s.modulus_ = modulus;
  for (auto& r : residues) r = floor_mod(r, modulus);
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  s.points_ = std::move(residues);
  return s;
}

IntegerSet IntegerSet::at_least(Int bound) {
  IntegerSet s;
  s.kind_ = Kind::kAtLeast;
  s.bound_ = bound;
  return s;
}

IntegerSet IntegerSet::at_most(Int bound) {
  IntegerSet s;
  s.kind_ = Kind::kAtMost;
  s.bound_ = bound;
  return s;
}

bool IntegerSet::contains(Int y) const {
  switch (kind_) {
    case Kind::kFinite: return std::binary_search(points_.begin(), points_.end(), y);
    case Kind::kPeriodic:
      return std::binary_search(points_.begin(), points_.end(), floor_mod(y, modulus_));
    case Kind::kAtLeast: return y >= bound_;
    case Kind::kAtMost: return y <= bound_;
  }
  return false;
}

IntegerSet IntegerSet::shifted(Int k) const {
  IntegerSet s = *this;
  switch (kind_) {
    case Kind::kFinite:
      for (auto& p : s.points_) p += k;
      break;
    case Kind::kPeriodic:
      for (auto& r : s.points_) r = floor_mod(r + k, modulus_);
      std::sort(s.points_.begin(), s.points_.end());
      break;
    case Kind::kAtLeast:
    case Kind::kAtMost:
      s.bound_ += k;
      break;
  }
  return s;
}

Int IntegerSet::period() const {
  return kind_ == Kind::kPeriodic ? modulus_ : 1;
}

Int IntegerSet::extent() const {
  switch (kind_) {
    case Kind::kFinite: {
      Int e = 0;
      for (Int p : points_) e = std::max(e, p < 0 ? -p : p);
      return e;
    }
    case Kind::kPeriodic: return 0;
    case Kind::kAtLeast:
    case Kind::kAtMost: return bound_ < 0 ? -bound_ : bound_;
  }
  return 0;
}

std::string IntegerSet::to_string() const {
  std::ostringstream os;
  auto list = [&os](const std::vector<Int>& v) {
    os << '{';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '}';
  };
  switch (kind_) {
    case Kind::kFinite: list(points_); break;
    case Kind::kPeriodic:
      os << "mod(" << modulus_ << ',';
      list(points_);
      os << ')';
      break;
    case Kind::kAtLeast: os << "ge(" << bound_ << ')'; break;
    case Kind::kAtMost: os << "le(" << bound_ << ')'; break;
  }
  return os.str();
}

struct SetExpr::Node {
  Kind kind;
  std::string name;
  IntegerSet set = IntegerSet::finite({});
  Int index = 0;
  Int offset = 0;
  SetExpr a;
  SetExpr b;
};

SetExpr SetExpr::empty() {
  static const std::shared_ptr<const Node> node = std::shared_ptr<Node>(
      new Node{Kind::kEmpty, {}, IntegerSet::finite({}), 0, 0, SetExpr(nullptr), SetExpr(nullptr)});
  return SetExpr(node);
}

SetExpr SetExpr::full() {
  static const std::shared_ptr<const Node> node = std::shared_ptr<Node>(
      new Node{Kind::kFull, {}, IntegerSet::finite({}), 0, 0, SetExpr(nullptr), SetExpr(nullptr)});
  return SetExpr(node);
}

SetExpr SetExpr::generator(std::string name) {
  return SetExpr(std::shared_ptr<Node>(new Node{Kind::kGenerator, std::move(name),
                                                IntegerSet::finite({}), 0, 0, SetExpr(nullptr),
                                                SetExpr(nullptr)}));
}

SetExpr SetExpr::concrete(IntegerSet set) {
  return SetExpr(std::shared_ptr<Node>(
      new Node{Kind::kConcrete, {}, std::move(set), 0, 0, SetExpr(nullptr), SetExpr(nullptr)}));
}

SetExpr SetExpr::cell(std::string partition, Int index) {
  return SetExpr(std::shared_ptr<Node>(new Node{Kind::kCell, std::move(partition),
                                                IntegerSet::finite({}), index, 0, SetExpr(nullptr),
                                                SetExpr(nullptr)}));
}

SetExpr SetExpr::complement(SetExpr e) {
  return SetExpr(std::shared_ptr<Node>(
      new Node{Kind::kComplement, {}, IntegerSet::finite({}), 0, 0, std::move(e), SetExpr(nullptr)}));
}

SetExpr SetExpr::union_of(SetExpr a, SetExpr b) {
  return SetExpr(std::shared_ptr<Node>(
      new Node{Kind::kUnion, {}, IntegerSet::finite({}), 0, 0, std::move(a), std::move(b)}));
}

SetExpr SetExpr::intersection(SetExpr a, SetExpr b) {
  return SetExpr(std::shared_ptr<Node>(
      new Node{Kind::kIntersection, {}, IntegerSet::finite({}), 0, 0, std::move(a), std::move(b)}));
}

SetExpr SetExpr::shift(Int k, SetExpr e) {
  return SetExpr(std::shared_ptr<Node>(
      new Node{Kind::kShift, {}, IntegerSet::finite({}), 0, k, std::move(e), SetExpr(nullptr)}));
}

SetExpr::Kind SetExpr::kind() const { return node_->kind; }
const std::string& SetExpr::name() const { return node_->name; }
const IntegerSet& SetExpr::concrete_set() const { return node_->set; }
Int SetExpr::index() const { return node_->index; }
Int SetExpr::offset() const { return node_->offset; }
const SetExpr& SetExpr::child() const { return node_->a; }
const SetExpr& SetExpr::lhs() const { return node_->a; }
const SetExpr& SetExpr::rhs() const { return node_->b; }

std::string SetExpr::to_string() const {
  switch (kind()) {
    case Kind::kEmpty: return "empty";
    case Kind::kFull: return "full";
    case Kind::kGenerator: return name();
    case Kind::kConcrete: return concrete_set().to_string();
    case Kind::kCell: return "cell(" + name() + "," + std::to_string(index()) + ")";
    case Kind::kComplement: return "~" + child().to_string();
    case Kind::kUnion: return "(" + lhs().to_string() + " | " + rhs().to_string() + ")";
    case Kind::kIntersection: return "(" + lhs().to_string() + " & " + rhs().to_string() + ")";
    case Kind::kShift:
      return "shift(" + std::to_string(offset()) + ", " + child().to_string() + ")";
  }
  return "?";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SetExpr parse() {
    SetExpr e = expr();
    skip_space();
    if (pos_ != text_.size()) error("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kParseError, "set expression column " + std::to_string(pos_ + 1) + ": " +
                                     what + " in '" + std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '.' || text_[pos_] == '-')) {
      if (text_[pos_] == '-' && pos_ == start) break;
      ++pos_;
    }
    if (pos_ == start) error("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  Int integer() {
    skip_space();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    Int value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) error("expected integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  std::vector<Int> int_list() {
    expect('{');
    std::vector<Int> v;
    if (accept('}')) return v;
    do {
      v.push_back(integer());
    } while (accept(','));
    expect('}');
    return v;
  }

  SetExpr expr() {
    SetExpr e = term();
    while (accept('|')) e = e | term();
    return e;
  }

  SetExpr term() {
    SetExpr e = factor();
    while (accept('&')) e = e & factor();
    return e;
  }

  SetExpr factor() {
    if (accept('~')) return ~factor();
    return primary();
  }

  SetExpr primary() {
    skip_space();
    if (accept('(')) {
      SetExpr e = expr();
      expect(')');
      return e;
    }
    if (pos_ < text_.size() && text_[pos_] == '{') return SetExpr::points(int_list());
    const std::string word = ident();
    if (word == "empty") return SetExpr::empty();
    if (word == "full") return SetExpr::full();
    if (word == "shift") {
      expect('(');
      const Int k = integer();
      expect(',');
      SetExpr e = expr();
      expect(')');
      return SetExpr::shift(k, std::move(e));
    }
    if (word == "cell") {
      expect('(');
      std::string p = ident();
      expect(',');
      const Int n = integer();
      expect(')');
      return SetExpr::cell(std::move(p), n);
    }
    if (word == "mod") {
      expect('(');
      const Int m = integer();
      expect(',');
      auto residues = int_list();
      expect(')');
      if (m < 1) error("modulus must be positive");
      return SetExpr::concrete(IntegerSet::periodic(m, std::move(residues)));
    }
    if (word == "ge" || word == "le") {
      expect('(');
      const Int b = integer();
      expect(')');
      return SetExpr::concrete(word == "ge" ? IntegerSet::at_least(b) : IntegerSet::at_most(b));
    }
    if (word == "range") {
      expect('(');
      const Int lo = integer();
      expect(',');
      const Int hi = integer();
      expect(')');
      return SetExpr::concrete(IntegerSet::range(lo, hi));
    }
    return SetExpr::generator(word);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SetExpr parse_set_expr(std::string_view text) {
  return Parser(text).parse();
}

}  // namespace pettis::sets

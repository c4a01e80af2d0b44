#include "strainreal/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <numbers>
#include <unordered_map>
#include <utility>

#include "strainreal/errors.hpp"

namespace strainreal {

class Tape {
 public:
  struct Instr {
    Expr::Kind op;
    double c = 0.0;
    int e = 0;
    int first = 0;  // offset into args_
    int count = 0;
  };

  explicit Tape(const Expr& root);

  template <class T>
  T run(const T& x, const T& y, std::vector<T>& slots) const;

 private:
  std::vector<Instr> code_;
  std::vector<int> args_;
};

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  int exponent = 0;
  std::vector<Expr> kids;

  mutable std::once_flag tape_once;
  mutable std::unique_ptr<Tape> tape;
};

namespace {

using Kind = Expr::Kind;

int kind_rank(Kind k) { return static_cast<int>(k); }

std::shared_ptr<Expr::Node> make_node(Kind k) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  return n;
}

// Splits a term into numeric coefficient and the remaining product.
std::pair<double, Expr> split_coefficient(const Expr& t) {
  if (t.kind() == Kind::Const) return {t.value(), Expr::constant(1.0)};
  if (t.kind() == Kind::Mul && t.children().front().is_constant()) {
    std::vector<Expr> rest(t.children().begin() + 1, t.children().end());
    return {t.children().front().value(), Expr::product(std::move(rest))};
  }
  return {1.0, t};
}

std::pair<Expr, int> split_power(const Expr& f) {
  if (f.kind() == Kind::Pow) return {f.children().front(), f.exponent()};
  return {f, 1};
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double c) {
  auto n = make_node(Kind::Const);
  n->value = c == 0.0 ? 0.0 : c;  // no negative zero
  node_ = std::move(n);
}

Expr Expr::constant(double c) { return Expr(c); }

Expr Expr::pi() {
  static const Expr p{std::shared_ptr<const Node>(make_node(Kind::Pi))};
  return p;
}

Expr Expr::x() {
  static const Expr v{std::shared_ptr<const Node>(make_node(Kind::VarX))};
  return v;
}

Expr Expr::y() {
  static const Expr v{std::shared_ptr<const Node>(make_node(Kind::VarY))};
  return v;
}

Expr Expr::var(Var v) { return v == Var::X ? x() : y(); }

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  double constant = 0.0;
  std::function<void(const Expr&)> push = [&](const Expr& t) {
    if (t.kind() == Kind::Add) {
      for (const auto& k : t.children()) push(k);
    } else if (t.is_constant()) {
      constant += t.value();
    } else {
      flat.push_back(t);
    }
  };
  for (const auto& t : terms) push(t);

  // Combine like terms c1*r + c2*r -> (c1+c2)*r.
  std::vector<std::pair<Expr, double>> groups;
  for (const auto& t : flat) {
    auto [c, rest] = split_coefficient(t);
    groups.emplace_back(rest, c);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  std::vector<Expr> out;
  for (std::size_t i = 0; i < groups.size();) {
    std::size_t j = i;
    double c = 0.0;
    while (j < groups.size() && compare(groups[j].first, groups[i].first) == 0) c += groups[j++].second;
    if (c != 0.0) out.push_back(c == 1.0 ? groups[i].first : product({Expr(c), groups[i].first}));
    i = j;
  }
  if (constant != 0.0) out.push_back(Expr(constant));
  if (out.empty()) return Expr(0.0);
  if (out.size() == 1) return out.front();
  std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  auto n = make_node(Kind::Add);
  n->kids = std::move(out);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  double coef = 1.0;
  std::function<void(const Expr&)> push = [&](const Expr& f) {
    if (f.kind() == Kind::Mul) {
      for (const auto& k : f.children()) push(k);
    } else if (f.is_constant()) {
      coef *= f.value();
    } else {
      flat.push_back(f);
    }
  };
  for (const auto& f : factors) push(f);
  if (coef == 0.0) return Expr(0.0);

  // Merge equal bases b^m * b^n -> b^(m+n).
  std::vector<std::pair<Expr, int>> powers;
  for (const auto& f : flat) powers.push_back(split_power(f));
  std::stable_sort(powers.begin(), powers.end(),
                   [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  std::vector<Expr> out;
  for (std::size_t i = 0; i < powers.size();) {
    std::size_t j = i;
    int e = 0;
    while (j < powers.size() && compare(powers[j].first, powers[i].first) == 0) e += powers[j++].second;
    Expr merged = power(powers[i].first, e);
    if (merged.is_constant()) {
      coef *= merged.value();
    } else {
      out.push_back(merged);
    }
    i = j;
  }
  if (coef == 0.0) return Expr(0.0);
  std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  if (out.empty()) return Expr(coef);
  if (out.size() == 1 && coef == 1.0) return out.front();
  if (coef != 1.0) out.insert(out.begin(), Expr(coef));
  auto n = make_node(Kind::Mul);
  n->kids = std::move(out);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::quotient(const Expr& num, const Expr& den) {
  if (den.is_constant()) return product({Expr(1.0 / den.value()), num});
  if (num.is_zero()) return Expr(0.0);
  if (num == den) return Expr(1.0);
  if (num.kind() == Kind::Div) return quotient(num.children()[0], num.children()[1] * den);
  if (den.kind() == Kind::Div) return quotient(num * den.children()[1], den.children()[0]);
  auto n = make_node(Kind::Div);
  n->kids = {num, den};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::power(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) return Expr(std::pow(base.value(), exponent));
  if (base.kind() == Kind::Pow) return power(base.children().front(), base.exponent() * exponent);
  auto n = make_node(Kind::Pow);
  n->exponent = exponent;
  n->kids = {base};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::sin(const Expr& a) {
  if (a.is_constant()) return Expr(std::sin(a.value()));
  auto n = make_node(Kind::Sin);
  n->kids = {a};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::cos(const Expr& a) {
  if (a.is_constant()) return Expr(std::cos(a.value()));
  auto n = make_node(Kind::Cos);
  n->kids = {a};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::exp(const Expr& a) {
  if (a.is_constant()) return Expr(std::exp(a.value()));
  auto n = make_node(Kind::Exp);
  n->kids = {a};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::log(const Expr& a) {
  if (a.is_constant()) return Expr(std::log(a.value()));
  auto n = make_node(Kind::Log);
  n->kids = {a};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::sqrt(const Expr& a) {
  if (a.is_constant()) return Expr(std::sqrt(a.value()));
  auto n = make_node(Kind::Sqrt);
  n->kids = {a};
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::product({Expr(-1.0), b})}); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1.0), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::quotient(a, b); }

// ---------------------------------------------------------------------------
// Accessors and structural comparison

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }

bool Expr::depends_on(Var v) const {
  const Kind target = v == Var::X ? Kind::VarX : Kind::VarY;
  if (kind() == target) return true;
  return std::any_of(children().begin(), children().end(),
                     [v](const Expr& k) { return k.depends_on(v); });
}

int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return kind_rank(a.kind()) < kind_rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Kind::Const:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Kind::Pi:
    case Kind::VarX:
    case Kind::VarY:
      return 0;
    case Kind::Pow:
      if (int c = compare(a.children()[0], b.children()[0]); c != 0) return c;
      if (a.exponent() == b.exponent()) return 0;
      return a.exponent() < b.exponent() ? -1 : 1;
    default:
      break;
  }
  const auto& ka = a.children();
  const auto& kb = b.children();
  for (std::size_t i = 0; i < std::min(ka.size(), kb.size()); ++i) {
    if (int c = compare(ka[i], kb[i]); c != 0) return c;
  }
  if (ka.size() == kb.size()) return 0;
  return ka.size() < kb.size() ? -1 : 1;
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

std::size_t Expr::node_count() const {
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (!seen.emplace(e.node(), true).second) return;
    for (const auto& k : e.children()) walk(k);
  };
  walk(*this);
  return seen.size();
}

// ---------------------------------------------------------------------------
// Compiled evaluation

Tape::Tape(const Expr& root) {
  std::unordered_map<const Expr::Node*, int> slot;
  std::function<int(const Expr&)> emit = [&](const Expr& e) -> int {
    if (auto it = slot.find(e.node()); it != slot.end()) return it->second;
    std::vector<int> kids;
    kids.reserve(e.children().size());
    for (const auto& k : e.children()) kids.push_back(emit(k));
    Instr in;
    in.op = e.kind();
    in.c = e.kind() == Kind::Const ? e.value() : 0.0;
    in.e = e.kind() == Kind::Pow ? e.exponent() : 0;
    in.first = static_cast<int>(args_.size());
    in.count = static_cast<int>(kids.size());
    args_.insert(args_.end(), kids.begin(), kids.end());
    code_.push_back(in);
    const int id = static_cast<int>(code_.size()) - 1;
    slot.emplace(e.node(), id);
    return id;
  };
  emit(root);
}

namespace {

inline double lift(double c, double) { return c; }
inline Jet lift(double c, const Jet&) { return Jet::constant(c); }

}  // namespace

template <class T>
T Tape::run(const T& x, const T& y, std::vector<T>& s) const {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  s.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    const int* a = args_.data() + in.first;
    switch (in.op) {
      case Kind::Const: s[i] = lift(in.c, x); break;
      case Kind::Pi: s[i] = lift(std::numbers::pi, x); break;
      case Kind::VarX: s[i] = x; break;
      case Kind::VarY: s[i] = y; break;
      case Kind::Add: {
        T acc = s[a[0]];
        for (int k = 1; k < in.count; ++k) acc = acc + s[a[k]];
        s[i] = acc;
        break;
      }
      case Kind::Mul: {
        T acc = s[a[0]];
        for (int k = 1; k < in.count; ++k) acc = acc * s[a[k]];
        s[i] = acc;
        break;
      }
      case Kind::Div: s[i] = s[a[0]] / s[a[1]]; break;
      case Kind::Pow: s[i] = ipow(s[a[0]], in.e); break;
      case Kind::Sin: s[i] = sin(s[a[0]]); break;
      case Kind::Cos: s[i] = cos(s[a[0]]); break;
      case Kind::Exp: s[i] = exp(s[a[0]]); break;
      case Kind::Log: s[i] = log(s[a[0]]); break;
      case Kind::Sqrt: s[i] = sqrt(s[a[0]]); break;
    }
  }
  return s.back();
}

const Tape& Expr::tape() const {
  std::call_once(node_->tape_once, [this] { node_->tape = std::make_unique<Tape>(*this); });
  return *node_->tape;
}

double Expr::eval(double x, double y) const {
  thread_local std::vector<double> scratch;
  return tape().run(x, y, scratch);
}

Jet Expr::eval(const Jet& x, const Jet& y) const {
  thread_local std::vector<Jet> scratch;
  return tape().run(x, y, scratch);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_number(double v) {
  char buf[64];
  if (std::abs(v) < 1e15 && v == std::floor(v)) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

// Precedence levels: 1 sum, 2 product/quotient, 3 power base, 4 atom.
std::string print(const Expr& e, int parent);

std::string print_product_body(double coef, const std::vector<Expr>& factors) {
  std::string out;
  if (coef == -1.0) {
    out = "-";
  } else if (coef != 1.0) {
    out = format_number(coef) + "*";
  }
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i > 0) out += "*";
    out += factors[i].kind() == Kind::Div ? "(" + print(factors[i], 0) + ")" : print(factors[i], 2);
  }
  return out;
}

std::string print(const Expr& e, int parent) {
  auto wrap = [&](int own, std::string s) { return own < parent ? "(" + s + ")" : s; };
  switch (e.kind()) {
    case Kind::Const: {
      std::string s = format_number(e.value());
      return e.value() < 0 && parent > 1 ? "(" + s + ")" : s;
    }
    case Kind::Pi: return "pi";
    case Kind::VarX: return "x";
    case Kind::VarY: return "y";
    case Kind::Add: {
      std::string out;
      bool first = true;
      for (const auto& t : e.children()) {
        auto [c, rest] = split_coefficient(t);
        const bool negative = c < 0;
        if (first) {
          out += print(t, 1);
        } else if (negative) {
          out += " - " + (t.is_constant() ? format_number(-c) : print(Expr(-c) * rest, 2));
        } else {
          out += " + " + print(t, 2);
        }
        first = false;
      }
      return wrap(1, out);
    }
    case Kind::Mul: {
      auto [c, rest] = split_coefficient(e);
      std::vector<Expr> factors =
          rest.kind() == Kind::Mul ? rest.children() : std::vector<Expr>{rest};
      std::string body = print_product_body(c, factors);
      // A leading minus is only safe where a signed factor may start.
      return c < 0 && parent > 2 ? "(" + body + ")" : wrap(2, body);
    }
    case Kind::Div:
      return wrap(2, print(e.children()[0], 2) + "/" + print(e.children()[1], 3));
    case Kind::Pow:
      return wrap(3, print(e.children()[0], 4) + "^" + std::to_string(e.exponent()));
    case Kind::Sin: return "sin(" + print(e.children()[0], 0) + ")";
    case Kind::Cos: return "cos(" + print(e.children()[0], 0) + ")";
    case Kind::Exp: return "exp(" + print(e.children()[0], 0) + ")";
    case Kind::Log: return "log(" + print(e.children()[0], 0) + ")";
    case Kind::Sqrt: return "sqrt(" + print(e.children()[0], 0) + ")";
  }
  return {};
}

}  // namespace

std::string Expr::to_string() const { return print(*this, 0); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (accept('*')) {
        acc = acc * factor();
      } else if (accept('/')) {
        acc = acc / factor();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr factor() {
    double sign = 1.0;
    if (accept('-')) {
      sign = -1.0;
    } else {
      accept('+');
    }
    Expr b = base();
    if (accept('^')) b = Expr::power(b, integer());
    return sign < 0 ? -b : b;
  }

  int integer() {
    skip();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("expected integer exponent");
    }
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  Expr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      if (id == "x") return Expr::x();
      if (id == "y") return Expr::y();
      if (id == "pi") return Expr::pi();
      Expr (*fn)(const Expr&) = nullptr;
      if (id == "sin") fn = &Expr::sin;
      if (id == "cos") fn = &Expr::cos;
      if (id == "exp") fn = &Expr::exp;
      if (id == "log") fn = &Expr::log;
      if (id == "sqrt") fn = &Expr::sqrt;
      if (fn == nullptr) {
        pos_ = start;
        fail("unknown identifier '" + std::string(id) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      Expr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return fn(arg);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string text(s_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) {
      pos_ = start;
      fail("malformed number '" + text + "'");
    }
    return Expr(v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Differentiation and substitution

namespace {

Expr derive(const Expr& e, Var v, std::unordered_map<const Expr::Node*, Expr>& memo) {
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  const auto& k = e.children();
  Expr d;
  switch (e.kind()) {
    case Kind::Const:
    case Kind::Pi:
      d = Expr(0.0);
      break;
    case Kind::VarX: d = Expr(v == Var::X ? 1.0 : 0.0); break;
    case Kind::VarY: d = Expr(v == Var::Y ? 1.0 : 0.0); break;
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const auto& t : k) terms.push_back(derive(t, v, memo));
      d = Expr::sum(std::move(terms));
      break;
    }
    case Kind::Mul: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < k.size(); ++i) {
        Expr di = derive(k[i], v, memo);
        if (di.is_zero()) continue;
        std::vector<Expr> f(k);
        f[i] = di;
        terms.push_back(Expr::product(std::move(f)));
      }
      d = Expr::sum(std::move(terms));
      break;
    }
    case Kind::Div: {
      const Expr& a = k[0];
      const Expr& b = k[1];
      Expr da = derive(a, v, memo);
      Expr db = derive(b, v, memo);
      d = da / b - (a * db) / Expr::power(b, 2);
      break;
    }
    case Kind::Pow: {
      const int n = e.exponent();
      d = Expr(static_cast<double>(n)) * Expr::power(k[0], n - 1) * derive(k[0], v, memo);
      break;
    }
    case Kind::Sin: d = Expr::cos(k[0]) * derive(k[0], v, memo); break;
    case Kind::Cos: d = -(Expr::sin(k[0]) * derive(k[0], v, memo)); break;
    case Kind::Exp: d = e * derive(k[0], v, memo); break;
    case Kind::Log: d = derive(k[0], v, memo) / k[0]; break;
    case Kind::Sqrt: d = derive(k[0], v, memo) / (Expr(2.0) * e); break;
  }
  memo.emplace(e.node(), d);
  return d;
}

Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  switch (e.kind()) {
    case Kind::Add: return Expr::sum(std::move(kids));
    case Kind::Mul: return Expr::product(std::move(kids));
    case Kind::Div: return Expr::quotient(kids[0], kids[1]);
    case Kind::Pow: return Expr::power(kids[0], e.exponent());
    case Kind::Sin: return Expr::sin(kids[0]);
    case Kind::Cos: return Expr::cos(kids[0]);
    case Kind::Exp: return Expr::exp(kids[0]);
    case Kind::Log: return Expr::log(kids[0]);
    case Kind::Sqrt: return Expr::sqrt(kids[0]);
    default: return e;
  }
}

}  // namespace

Expr differentiate(const Expr& f, Var var, int order) {
  if (order < 1 || order > 6) throw std::invalid_argument("derivative order must be in 1..6");
  Expr d = f;
  for (int i = 0; i < order; ++i) {
    std::unordered_map<const Expr::Node*, Expr> memo;
    d = derive(d, var, memo);
  }
  return d;
}

Expr substitute(const Expr& f, const Expr& x_repl, const Expr& y_repl) {
  std::unordered_map<const Expr::Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& e) -> Expr {
    if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
    Expr r;
    if (e.kind() == Kind::VarX) {
      r = x_repl;
    } else if (e.kind() == Kind::VarY) {
      r = y_repl;
    } else if (e.children().empty()) {
      r = e;
    } else {
      std::vector<Expr> kids;
      for (const auto& k : e.children()) kids.push_back(go(k));
      r = rebuild(e, std::move(kids));
    }
    memo.emplace(e.node(), r);
    return r;
  };
  return go(f);
}

}  // namespace strainreal

#ifndef CIRQUE_EXPR_HPP
#define CIRQUE_EXPR_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cirque/errors.hpp"

// Grammar (see docs/expression-grammar.md):
//
//   expression := term { ("+" | "-") term }
//   term       := unary { ("*" | "/") unary }
//   unary      := "-" unary | power
//   power      := primary [ "^" unary ]
//   primary    := number | constant | variable | function "(" expression ")"
//               | "(" expression ")"

namespace cirque::expr {

enum class Op : std::uint8_t {
  constant,
  variable,
  add,
  sub,
  mul,
  div,
  pow,
  neg,
  exp,
  sin,
  cos,
  tan,
  log,
  sqrt,
  abs,
};

/// One postfix instruction. The postfix sequence is a canonical encoding of
/// the syntax tree, so two expressions are structurally equal iff their
/// programs compare equal.
struct Instr {
  Op op = Op::constant;
  double value = 0.0;
  std::uint32_t slot = 0;

  bool operator==(const Instr& other) const {
    if (op != other.op) return false;
    if (op == Op::constant) {
      return std::bit_cast<std::uint64_t>(value) ==
             std::bit_cast<std::uint64_t>(other.value);
    }
    if (op == Op::variable) return slot == other.slot;
    return true;
  }
};

namespace detail {

struct FunctionEntry {
  std::string_view name;
  Op op;
};

inline constexpr std::array<FunctionEntry, 7> kFunctions{{
    {"exp", Op::exp},
    {"sin", Op::sin},
    {"cos", Op::cos},
    {"tan", Op::tan},
    {"log", Op::log},
    {"sqrt", Op::sqrt},
    {"abs", Op::abs},
}};

inline std::string_view function_name(Op op) {
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return "?";
}

inline int arity(Op op) {
  switch (op) {
    case Op::constant:
    case Op::variable:
      return 0;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow:
      return 2;
    default:
      return 1;
  }
}

inline double apply_unary(Op op, double a) {
  switch (op) {
    case Op::neg:
      return -a;
    case Op::exp:
      return std::exp(a);
    case Op::sin:
      return std::sin(a);
    case Op::cos:
      return std::cos(a);
    case Op::tan:
      return std::tan(a);
    case Op::log:
      return std::log(a);
    case Op::sqrt:
      return std::sqrt(a);
    case Op::abs:
      return std::fabs(a);
    default:
      return a;
  }
}

inline double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::add:
      return a + b;
    case Op::sub:
      return a - b;
    case Op::mul:
      return a * b;
    case Op::div:
      return a / b;
    case Op::pow:
      return std::pow(a, b);
    default:
      return a;
  }
}

}  // namespace detail

/// A parsed, immutable real-valued expression over a fixed list of variables.
class Expression {
 public:
  Expression() = default;

  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Instr>& program() const { return program_; }

  /// Evaluates with `values[i]` bound to `variables()[i]`.
  double evaluate(std::span<const double> values) const {
    if (max_stack_ <= kInlineStack) {
      std::array<double, kInlineStack> stack;
      return run(values, stack.data());
    }
    std::vector<double> stack(max_stack_);
    return run(values, stack.data());
  }

  /// Evaluates with variables looked up by name; every variable must be bound.
  double evaluate(const std::map<std::string, double>& env) const {
    std::vector<double> values(variables_.size());
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      auto it = env.find(variables_[i]);
      if (it == env.end()) {
        throw ConfigError("no value bound for variable '" + variables_[i] +
                          "'");
      }
      values[i] = it->second;
    }
    return evaluate(values);
  }

  double operator()() const { return evaluate(std::span<const double>{}); }
  double operator()(double x) const {
    const std::array<double, 1> v{x};
    return evaluate(v);
  }
  double operator()(double x, double y) const {
    const std::array<double, 2> v{x, y};
    return evaluate(v);
  }

  /// Renders the expression with the minimum parentheses needed for it to
  /// parse back to the same tree.
  std::string to_string() const;

  bool operator==(const Expression& other) const {
    return program_ == other.program_ && variables_ == other.variables_;
  }

 private:
  friend class Parser;
  static constexpr std::size_t kInlineStack = 32;

  double run(std::span<const double> values, double* stack) const {
    std::size_t top = 0;
    for (const Instr& in : program_) {
      switch (in.op) {
        case Op::constant:
          stack[top++] = in.value;
          break;
        case Op::variable:
          stack[top++] = values[in.slot];
          break;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div:
        case Op::pow: {
          const double rhs = stack[--top];
          stack[top - 1] = detail::apply_binary(in.op, stack[top - 1], rhs);
          break;
        }
        default:
          stack[top - 1] = detail::apply_unary(in.op, stack[top - 1]);
          break;
      }
    }
    return stack[0];
  }

  std::vector<Instr> program_;
  std::vector<std::string> variables_;
  std::size_t max_stack_ = 0;
};

class Parser {
 public:
  Parser(std::string_view text, std::vector<std::string> allowed)
      : text_(text), allowed_(std::move(allowed)) {}

  Expression run() {
    skip_space();
    if (pos_ == text_.size()) fail("expected an expression", pos_);
    parse_expression();
    skip_space();
    if (pos_ != text_.size()) {
      fail(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    Expression e;
    e.program_ = std::move(program_);
    e.variables_ = std::move(allowed_);
    e.max_stack_ = max_depth_;
    return e;
  }

 private:
  static constexpr int kMaxNesting = 1000;

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError("syntax error: " + what, at);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Instr in) {
    const int n = detail::arity(in.op);
    depth_ = depth_ - static_cast<std::size_t>(n) + 1;
    max_depth_ = std::max(max_depth_, depth_);
    program_.push_back(in);
  }

  struct NestingGuard {
    explicit NestingGuard(Parser& p) : parser(p) {
      if (++parser.nesting_ > kMaxNesting) {
        parser.fail("expression nested too deeply", parser.pos_);
      }
    }
    ~NestingGuard() { --parser.nesting_; }
    Parser& parser;
  };

  void parse_expression() {
    NestingGuard guard(*this);
    parse_term();
    for (;;) {
      if (accept('+')) {
        parse_term();
        emit({Op::add});
      } else if (accept('-')) {
        parse_term();
        emit({Op::sub});
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit({Op::mul});
      } else if (accept('/')) {
        parse_unary();
        emit({Op::div});
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    NestingGuard guard(*this);
    if (accept('-')) {
      parse_unary();
      emit({Op::neg});
      return;
    }
    parse_power();
  }

  void parse_power() {
    parse_primary();
    if (accept('^')) {
      parse_unary();
      emit({Op::pow});
    }
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
  }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      parse_expression();
      if (!accept(')')) fail("expected ')'", pos_);
      return;
    }
    if (is_digit(c) || c == '.') {
      parse_number();
      return;
    }
    if (is_ident_start(c)) {
      parse_identifier();
      return;
    }
    fail(std::string("unexpected '") + c + "'", pos_);
  }

  void parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) {
        ++look;
      }
      if (look < text_.size() && is_digit(text_[look])) {
        pos_ = look;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      fail("malformed number '" + std::string(first, last) + "'", start);
    }
    emit({Op::constant, value});
  }

  void parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (const auto& f : detail::kFunctions) {
      if (f.name == name) {
        if (!accept('(')) fail("expected '(' after " + std::string(name), pos_);
        parse_expression();
        if (!accept(')')) fail("expected ')'", pos_);
        emit({f.op});
        return;
      }
    }
    if (name == "pi") {
      emit({Op::constant, std::numbers::pi});
      return;
    }
    if (name == "e") {
      emit({Op::constant, std::numbers::e});
      return;
    }
    for (std::size_t i = 0; i < allowed_.size(); ++i) {
      if (allowed_[i] == name) {
        emit({Op::variable, 0.0, static_cast<std::uint32_t>(i)});
        return;
      }
    }
    if (name == "x" || name == "y" || name == "w" || name == "z") {
      std::string list;
      for (const auto& v : allowed_) list += (list.empty() ? "" : ", ") + v;
      throw ParseError("variable '" + std::string(name) +
                           "' not allowed here (allowed: " +
                           (list.empty() ? "none" : list) + ")",
                       start);
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::vector<std::string> allowed_;
  std::size_t pos_ = 0;
  std::vector<Instr> program_;
  std::size_t depth_ = 0;
  std::size_t max_depth_ = 0;
  int nesting_ = 0;
};

/// Parses `text` as an expression over `allowed_vars`; the variable at index i
/// of `allowed_vars` binds to argument i at evaluation time.
inline Expression parse(std::string_view text,
                        std::vector<std::string> allowed_vars = {}) {
  return Parser(text, std::move(allowed_vars)).run();
}

inline std::string Expression::to_string() const {
  // precedence: 1 +-, 2 */, 3 unary minus, 4 ^, 5 atoms and calls
  struct Piece {
    std::string text;
    int prec;
  };
  auto wrap = [](const Piece& p, bool paren) {
    return paren ? "(" + p.text + ")" : p.text;
  };
  std::vector<Piece> stack;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::constant: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", in.value);
        stack.push_back({buf, 5});
        break;
      }
      case Op::variable:
        stack.push_back({variables_[in.slot], 5});
        break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div: {
        const int prec = (in.op == Op::add || in.op == Op::sub) ? 1 : 2;
        const char sym = in.op == Op::add   ? '+'
                         : in.op == Op::sub ? '-'
                         : in.op == Op::mul ? '*'
                                            : '/';
        Piece rhs = std::move(stack.back());
        stack.pop_back();
        Piece lhs = std::move(stack.back());
        stack.pop_back();
        stack.push_back({wrap(lhs, lhs.prec < prec) + " " + sym + " " +
                             wrap(rhs, rhs.prec <= prec),
                         prec});
        break;
      }
      case Op::pow: {
        Piece rhs = std::move(stack.back());
        stack.pop_back();
        Piece lhs = std::move(stack.back());
        stack.pop_back();
        stack.push_back(
            {wrap(lhs, lhs.prec <= 4) + "^" + wrap(rhs, rhs.prec < 3), 4});
        break;
      }
      case Op::neg: {
        Piece arg = std::move(stack.back());
        stack.pop_back();
        stack.push_back({"-" + wrap(arg, arg.prec < 3), 3});
        break;
      }
      default: {
        Piece arg = std::move(stack.back());
        stack.pop_back();
        stack.push_back(
            {std::string(detail::function_name(in.op)) + "(" + arg.text + ")",
             5});
        break;
      }
    }
  }
  return stack.empty() ? std::string() : stack.back().text;
}

}  // namespace cirque::expr

#endif  // CIRQUE_EXPR_HPP

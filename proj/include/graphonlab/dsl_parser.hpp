#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "graphonlab/decorated.hpp"
#include "graphonlab/parttable.hpp"

namespace graphonlab {

struct ConstraintParseError : std::invalid_argument {
  size_t position;
  ConstraintParseError(const std::string& what, size_t pos)
      : std::invalid_argument(what + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

namespace dsl {

// Grammar:
//   constraint := expr '=' expr
//   expr       := ['-'] term (('+'|'-') term)*
//   term       := coeff ['*' factors] | factors
//   factors    := graph ('*' graph)*
//   graph      := 'graph{' n ';' edges ';' 'roots=' m [';' 'free=' pairs]
//                  ';' 'dec=[' decs ']' '}'
//   decs       := dec (',' dec)*      one per vertex
//   dec        := '{' names '}' | name     (name may end in '*' for a prefix
//                                           group; '*' alone means all parts)
class Parser {
 public:
  Parser(const std::string& text, const PartTable& table) : text_(text), table_(table) {}

  Constraint parse_constraint() {
    Constraint c;
    c.left = parse_expression();
    expect('=');
    c.right = parse_expression();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    c.validate();
    return c;
  }

  DensityExpression parse_expression() {
    DensityExpression e;
    skip_ws();
    bool negate = consume('-');
    e += parse_term(negate);
    for (;;) {
      skip_ws();
      if (consume('+'))
        e += parse_term(false);
      else if (consume('-'))
        e += parse_term(true);
      else
        return e;
    }
  }

 private:
  DensityExpression parse_term(bool negate) {
    skip_ws();
    DecoratedTerm term;
    term.coeff = negate ? Rational(-1) : Rational(1);
    bool have_coeff = false;
    if (peek_number()) {
      term.coeff = term.coeff * parse_rational();
      have_coeff = true;
    }
    for (;;) {
      skip_ws();
      bool need_star = have_coeff || !term.factors.empty();
      if (need_star) {
        if (!consume('*')) break;
        skip_ws();
        if (!looking_at("graph{")) fail("expected graph{ after '*'");
      } else if (!looking_at("graph{")) {
        fail("expected a number or graph{...}");
      }
      term.factors.push_back(parse_graph());
    }
    DensityExpression e;
    e.add_term(std::move(term));
    return e;
  }

  DecoratedGraph parse_graph() {
    expect_str("graph{");
    DecoratedGraph g;
    skip_ws();
    int n = int(parse_integer());
    expect(';');
    std::string edges;
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] != ';') edges.push_back(text_[pos_++]);
    expect(';');
    skip_ws();
    expect_str("roots=");
    g.roots = int(parse_integer());
    expect(';');
    skip_ws();
    if (looking_at("free=")) {
      expect_str("free=");
      for (;;) {
        skip_ws();
        int u = int(parse_integer());
        expect('-');
        int v = int(parse_integer());
        g.free_root_pairs.insert({std::min(u, v), std::max(u, v)});
        skip_ws();
        if (!consume(',')) break;
      }
      expect(';');
      skip_ws();
    }
    expect_str("dec=[");
    std::string edge_text = std::to_string(n);
    std::string trimmed;
    for (char ch : edges)
      if (!isspace((unsigned char)ch)) trimmed.push_back(ch);
    if (!trimmed.empty()) edge_text += ":" + trimmed;
    try {
      g.graph = SmallGraph::parse(edge_text);
    } catch (const GraphParseError& e) {
      fail(std::string("bad edge list: ") + e.what());
    }
    for (int v = 0; v < n; ++v) {
      skip_ws();
      g.decorations.push_back(parse_decoration());
      skip_ws();
      if (v + 1 < n) expect(',');
    }
    skip_ws();
    expect(']');
    skip_ws();
    expect('}');
    g.validate();
    return g;
  }

  std::vector<int> parse_decoration() {
    std::vector<int> parts;
    skip_ws();
    if (consume('{')) {
      for (;;) {
        skip_ws();
        append_name(parts);
        skip_ws();
        if (!consume(',')) break;
      }
      expect('}');
    } else {
      append_name(parts);
    }
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    if (parts.empty()) fail("empty decoration");
    return parts;
  }

  void append_name(std::vector<int>& parts) {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_' || text_[pos_] == '*'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name.empty()) fail("expected a part name");
    if (name == "*") {
      for (size_t i = 0; i < table_.size(); ++i) parts.push_back(int(i));
      return;
    }
    if (name.back() == '*') {
      std::string prefix = name.substr(0, name.size() - 1);
      bool any = false;
      for (size_t i = 0; i < table_.size(); ++i)
        if (table_.part(int(i)).name.rfind(prefix, 0) == 0) {
          parts.push_back(int(i));
          any = true;
        }
      if (!any) fail("no part matches prefix '" + prefix + "'");
      return;
    }
    if (!table_.has(name)) fail("unknown part '" + name + "'");
    parts.push_back(table_.index_of(name));
  }

  Rational parse_rational() {
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() && isdigit((unsigned char)text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      while (pos_ < text_.size() && isdigit((unsigned char)text_[pos_])) ++pos_;
    } else if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && isdigit((unsigned char)text_[pos_])) ++pos_;
      double v = std::stod(text_.substr(start, pos_ - start));
      return Rational::from_double_exact(v);
    }
    if (pos_ == start) fail("expected a number");
    try {
      return Rational::from_string(text_.substr(start, pos_ - start));
    } catch (const std::exception& e) {
      fail(e.what());
    }
    return Rational(0);
  }

  long long parse_integer() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && isdigit((unsigned char)text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected an integer");
    return std::stoll(text_.substr(start, pos_ - start));
  }

  bool peek_number() {
    skip_ws();
    return pos_ < text_.size() && isdigit((unsigned char)text_[pos_]);
  }
  bool looking_at(const std::string& s) {
    skip_ws();
    return text_.compare(pos_, s.size(), s) == 0;
  }
  void expect_str(const std::string& s) {
    if (!looking_at(s)) fail("expected '" + s + "'");
    pos_ += s.size();
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void skip_ws() {
    while (pos_ < text_.size() && isspace((unsigned char)text_[pos_])) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ConstraintParseError(msg, pos_); }

  const std::string& text_;
  const PartTable& table_;
  size_t pos_ = 0;
};

inline std::string print_graph(const DecoratedGraph& g, const PartTable& table) {
  std::string out = "graph{" + std::to_string(g.order()) + "; ";
  bool first = true;
  for (auto [u, v] : g.graph.edges()) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(u) + "-" + std::to_string(v);
  }
  out += "; roots=" + std::to_string(g.roots);
  if (!g.free_root_pairs.empty()) {
    out += "; free=";
    first = true;
    for (auto [u, v] : g.free_root_pairs) {
      if (!first) out += ",";
      first = false;
      out += std::to_string(u) + "-" + std::to_string(v);
    }
  }
  out += "; dec=[";
  for (int v = 0; v < g.order(); ++v) {
    if (v) out += ",";
    out += "{";
    for (size_t i = 0; i < g.decorations[v].size(); ++i) {
      if (i) out += ",";
      out += table.part(g.decorations[v][i]).name;
    }
    out += "}";
  }
  out += "]}";
  return out;
}

inline std::string print_expression(const DensityExpression& e, const PartTable& table) {
  if (e.terms().empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : e.terms()) {
    Rational coeff = t.coeff;
    if (!first) {
      out += coeff.sign() < 0 ? " - " : " + ";
      if (coeff.sign() < 0) coeff = -coeff;
    }
    first = false;
    bool unit = coeff == Rational(1) && !t.factors.empty();
    if (!unit) out += coeff.str();
    for (size_t i = 0; i < t.factors.size(); ++i) {
      if (!unit || i > 0) out += "*";
      out += print_graph(t.factors[i], table);
    }
  }
  return out;
}

inline std::string print_constraint(const Constraint& c, const PartTable& table) {
  return print_expression(c.left, table) + " = " + print_expression(c.right, table);
}

}  // namespace dsl

inline Constraint parse_constraint(const std::string& text, const PartTable& table) {
  dsl::Parser p(text, table);
  return p.parse_constraint();
}

}  // namespace graphonlab

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "naesat/errors.hpp"
#include "naesat/instance.hpp"

namespace naesat {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<long long> to_int(std::string_view tok) {
  long long v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

long long require_int(std::string_view tok, std::size_t line, const char* what) {
  auto v = to_int(tok);
  if (!v) throw ParseError(line, std::string("expected integer for ") + what + ", got '" +
                                     std::string(tok) + "'");
  return *v;
}

bool ids_sequential(const Formula& phi) {
  for (std::size_t i = 0; i < phi.num_clauses(); ++i)
    if (phi.clause(i).id != i) return false;
  return true;
}

}  // namespace

std::string serialize(const Formula& phi) {
  std::ostringstream out;
  if (phi.origin() == Origin::reduced) out << "c naesat origin reduced\n";
  if (phi.violations() > 0) out << "c naesat violations " << phi.violations() << "\n";
  if (!ids_sequential(phi)) {
    out << "c naesat ids";
    for (const Clause& c : phi.clauses()) out << ' ' << c.id;
    out << "\n";
  }
  out << "p naesat " << phi.num_vars() << ' ' << phi.num_clauses() << ' ' << phi.k() << "\n";
  for (const Clause& c : phi.clauses()) {
    out << sign_char(c.sign);
    for (const Literal& l : c.literals) {
      const long long v = static_cast<long long>(l.var) + 1;
      out << ' ' << (l.negated ? -v : v);
    }
    out << " 0\n";
  }
  return out.str();
}

Formula parse(std::string_view text) {
  std::optional<std::size_t> n, m, k;
  Origin origin = Origin::fresh;
  std::size_t violations = 0;
  std::optional<std::vector<ClauseId>> ids;
  std::vector<Clause> clauses;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (toks[0] == "c") {
      if (toks.size() >= 2 && toks[1] == "naesat") {
        if (toks.size() == 4 && toks[2] == "origin" && toks[3] == "reduced") {
          origin = Origin::reduced;
        } else if (toks.size() == 4 && toks[2] == "violations") {
          const auto v = require_int(toks[3], line_no, "violation count");
          if (v < 0) throw ParseError(line_no, "negative violation count");
          violations = static_cast<std::size_t>(v);
        } else if (toks.size() >= 3 && toks[2] == "ids") {
          ids.emplace();
          for (std::size_t i = 3; i < toks.size(); ++i) {
            const auto v = require_int(toks[i], line_no, "clause id");
            if (v < 0) throw ParseError(line_no, "negative clause id");
            ids->push_back(static_cast<ClauseId>(v));
          }
        } else {
          throw ParseError(line_no, "unknown naesat directive");
        }
      }
      continue;
    }

    // "p" also opens plus-signed clause lines; only "p naesat" is a header.
    if (toks[0] == "p" && (!n || (toks.size() > 1 && toks[1] == "naesat"))) {
      if (n) throw ParseError(line_no, "duplicate header");
      if (toks.size() != 5 || toks[1] != "naesat")
        throw ParseError(line_no, "header must be 'p naesat <n> <m> <K>'");
      const auto hn = require_int(toks[2], line_no, "n");
      const auto hm = require_int(toks[3], line_no, "m");
      const auto hk = require_int(toks[4], line_no, "K");
      if (hn < 0 || hm < 0) throw ParseError(line_no, "negative n or m in header");
      if (hk < 2) throw ParseError(line_no, "K must be at least 2");
      n = static_cast<std::size_t>(hn);
      m = static_cast<std::size_t>(hm);
      k = static_cast<std::size_t>(hk);
      continue;
    }

    if (!n) throw ParseError(line_no, "clause before header");
    if (toks[0].size() != 1) throw ParseError(line_no, "clause sign must be one of n, p, m");
    Clause c;
    c.id = static_cast<ClauseId>(clauses.size());
    switch (toks[0][0]) {
      case 'n':
        c.sign = Sign::neutral;
        break;
      case 'p':
        c.sign = Sign::plus;
        break;
      case 'm':
        c.sign = Sign::minus;
        break;
      default:
        throw ParseError(line_no, "clause sign must be one of n, p, m");
    }
    if (toks.size() < 2 || toks.back() != "0")
      throw ParseError(line_no, "clause line must end with 0");
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
      const auto lit = require_int(toks[i], line_no, "literal");
      if (lit == 0) throw ParseError(line_no, "literal 0 before end of clause");
      const long long var = lit < 0 ? -lit : lit;
      if (var > static_cast<long long>(*n))
        throw ParseError(line_no, "literal " + std::to_string(lit) + " exceeds n");
      const Var v = static_cast<Var>(var - 1);
      for (const Literal& l : c.literals)
        if (l.var == v) throw ParseError(line_no, "variable repeated within clause");
      c.literals.push_back({v, lit < 0});
    }
    if (c.literals.empty() || c.literals.size() > *k)
      throw ParseError(line_no, "clause width outside [1, K]");
    if ((c.sign == Sign::neutral) != (c.literals.size() == *k))
      throw ParseError(line_no, "sign must be 'n' exactly when the clause has K literals");
    if (origin == Origin::fresh && c.sign != Sign::neutral)
      origin = Origin::reduced;
    clauses.push_back(std::move(c));
  }

  if (!n) throw ParseError(line_no, "missing header");
  if (clauses.size() != *m)
    throw ParseError(line_no, "header declares " + std::to_string(*m) + " clauses, found " +
                                  std::to_string(clauses.size()));
  if (ids) {
    if (ids->size() != clauses.size())
      throw ParseError(line_no, "ids directive length differs from clause count");
    for (std::size_t i = 0; i < clauses.size(); ++i) clauses[i].id = (*ids)[i];
  }
  return Formula(*n, *k, std::move(clauses), origin, violations);
}

Formula read_formula_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return parse(buf.str());
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace naesat

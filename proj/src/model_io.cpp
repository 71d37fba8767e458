#include "model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace tcbo {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Line-oriented reader that tracks line numbers for error reporting.
class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}
  int line_no() const { return line_no_; }

  // Next non-empty line, stripped of trailing \r.
  bool next(std::string& out) {
    while (std::getline(is_, out)) {
      ++line_no_;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      std::size_t i = out.find_first_not_of(" \t");
      if (i != std::string::npos) return true;
    }
    return false;
  }

  [[noreturn]] void fail_here(const std::string& msg) {
    fail(ErrorKind::parse, "model parse error at line " + std::to_string(line_no_) +
                               ": " + msg);
  }

 private:
  std::istream& is_;
  int line_no_ = 0;
};

long parse_int(LineReader& r, const std::string& tok, const char* what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    r.fail_here(std::string("expected integer ") + what + ", got '" + tok + "'");
  }
  if (pos != tok.size())
    r.fail_here(std::string("trailing characters in integer ") + what + ": '" + tok + "'");
  return v;
}

double parse_double(LineReader& r, const std::string& tok, const char* what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    r.fail_here(std::string("expected number ") + what + ", got '" + tok + "'");
  }
  if (pos != tok.size())
    r.fail_here(std::string("trailing characters in number ") + what + ": '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

void save_model(const DiscreteModel& m, std::ostream& os) {
  os << "tcbo-model v1\n";
  os << m.var_count() << "\n";
  for (int v = 0; v < m.var_count(); ++v)
    os << m.cardinality(v) << (v + 1 == m.var_count() ? "\n" : " ");
  os << m.factors().size() << "\n";
  for (const Factor& f : m.factors()) {
    os << "scope:";
    for (int v : f.scope) os << " " << v;
    os << "\n";
    for (std::size_t i = 0; i < f.table.size(); ++i)
      os << fmt17(f.table[i]) << (i + 1 == f.table.size() ? "\n" : " ");
  }
}

void save_model_file(const DiscreteModel& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  save_model(m, os);
  os.flush();
  if (!os) fail(ErrorKind::io, "write failed for '" + path + "'");
}

DiscreteModel load_model(std::istream& is) {
  LineReader r(is);
  std::string line;

  if (!r.next(line)) fail(ErrorKind::parse, "model parse error: empty input");
  {
    auto tk = tokens(line);
    if (tk.size() != 2 || tk[0] != "tcbo-model" || tk[1] != "v1")
      r.fail_here("expected header 'tcbo-model v1'");
  }

  if (!r.next(line)) fail(ErrorKind::parse, "model parse error: missing var count");
  auto tk = tokens(line);
  if (tk.size() != 1) r.fail_here("expected a single variable count");
  const long var_count = parse_int(r, tk[0], "variable count");
  if (var_count <= 0) r.fail_here("variable count must be positive");

  if (!r.next(line)) fail(ErrorKind::parse, "model parse error: missing cardinalities");
  tk = tokens(line);
  if (static_cast<long>(tk.size()) != var_count)
    r.fail_here("expected " + std::to_string(var_count) + " cardinalities, got " +
                std::to_string(tk.size()));
  std::vector<int> cards;
  for (const auto& t : tk) cards.push_back(static_cast<int>(parse_int(r, t, "cardinality")));

  if (!r.next(line)) fail(ErrorKind::parse, "model parse error: missing factor count");
  tk = tokens(line);
  if (tk.size() != 1) r.fail_here("expected a single factor count");
  const long factor_count = parse_int(r, tk[0], "factor count");
  if (factor_count < 0) r.fail_here("factor count must be non-negative");

  std::vector<Factor> factors;
  for (long k = 0; k < factor_count; ++k) {
    if (!r.next(line))
      fail(ErrorKind::parse, "model parse error: expected scope line for factor " +
                                 std::to_string(k) + ", got end of input");
    tk = tokens(line);
    if (tk.empty() || tk[0] != "scope:")
      r.fail_here("expected 'scope:' line for factor " + std::to_string(k));
    Factor f;
    for (std::size_t i = 1; i < tk.size(); ++i)
      f.scope.push_back(static_cast<int>(parse_int(r, tk[i], "scope variable")));
    if (f.scope.empty()) r.fail_here("factor scope is empty");
    std::size_t want = 1;
    for (int v : f.scope) {
      if (v < 0 || v >= var_count) r.fail_here("scope variable out of range");
      want *= static_cast<std::size_t>(cards[static_cast<std::size_t>(v)]);
    }
    // Table entries may wrap lines; read until we have them all.
    while (f.table.size() < want) {
      if (!r.next(line))
        fail(ErrorKind::parse,
             "model parse error: factor " + std::to_string(k) + " table truncated (" +
                 std::to_string(f.table.size()) + " of " + std::to_string(want) +
                 " entries)");
      for (const auto& t : tokens(line)) {
        if (f.table.size() == want) r.fail_here("extra table entries for factor");
        f.table.push_back(parse_double(r, t, "table entry"));
      }
    }
    factors.push_back(std::move(f));
  }

  try {
    return DiscreteModel(static_cast<int>(var_count), std::move(cards),
                         std::move(factors));
  } catch (const Error& e) {
    fail(ErrorKind::parse, std::string("model parse error: ") + e.what());
  }
}

DiscreteModel load_model_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::io, "cannot open '" + path + "' for reading");
  return load_model(is);
}

}  // namespace tcbo

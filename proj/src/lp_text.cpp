#include <charconv>
#include <sstream>

#include "peakshaver/errors.hpp"
#include "peakshaver/lp.hpp"
#include "peakshaver/text_format.hpp"

namespace peakshaver::lp {

namespace {

constexpr std::string_view kHeader = "peakshaver-lp 1";

void check_name(const std::string& name) {
  if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
    throw DomainError("LP name '" + name + "' cannot be dumped (empty or contains whitespace)");
  }
}

void write_terms(std::ostringstream& out, const std::vector<Term>& terms) {
  out << terms.size();
  for (const Term& t : terms) out << ' ' << t.var.index << ' ' << format_double(t.coef);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  std::string word(const char* what) {
    std::string w;
    if (!(in_ >> w)) fail(std::string("unexpected end of input, expected ") + what);
    return w;
  }
  void expect(std::string_view keyword) {
    const auto w = word(std::string(keyword).c_str());
    if (w != keyword) fail("expected '" + std::string(keyword) + "', found '" + w + "'");
  }
  double number(const char* what) {
    const auto w = word(what);
    double v = 0.0;
    if (!parse_double(w, v)) fail(std::string("bad number for ") + what + ": '" + w + "'");
    return v;
  }
  long integer(const char* what) {
    const auto w = word(what);
    long v = 0;
    const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc{} || res.ptr != w.data() + w.size()) {
      fail(std::string("bad integer for ") + what + ": '" + w + "'");
    }
    return v;
  }
  [[noreturn]] void fail(const std::string& msg) { throw DomainError("LP dump: " + msg); }

 private:
  std::istringstream in_;
};

std::vector<Term> read_terms(Reader& r, int num_vars) {
  const long count = r.integer("term count");
  if (count < 0) r.fail("negative term count");
  std::vector<Term> terms;
  terms.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const long col = r.integer("column");
    if (col < 0 || col >= num_vars) r.fail("column index out of range");
    terms.push_back(Term{VarId{static_cast<int>(col)}, r.number("coefficient")});
  }
  return terms;
}

}  // namespace

std::string dump(const LpProblem& problem) {
  std::ostringstream out;
  out << kHeader << '\n';
  out << "vars " << problem.num_vars() << '\n';
  for (int j = 0; j < problem.num_vars(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    check_name(problem.var_names()[i]);
    out << problem.var_names()[i] << ' ' << format_double(problem.lower()[i]) << ' '
        << format_double(problem.upper()[i]) << ' ' << format_double(problem.objective()[i]) << '\n';
  }
  out << "rows " << problem.num_rows() << '\n';
  for (const Row& row : problem.rows()) {
    check_name(row.name);
    out << row.name << ' ' << (row.sense == RowSense::Equal ? "eq" : "le") << ' '
        << format_double(row.rhs) << ' ';
    write_terms(out, row.terms);
    out << '\n';
  }
  out << "tiebreak ";
  write_terms(out, problem.tie_break());
  out << "\nend\n";
  return out.str();
}

LpProblem parse_dump(std::string_view text) {
  Reader r(text);
  r.expect("peakshaver-lp");
  r.expect("1");
  r.expect("vars");
  const long n = r.integer("variable count");
  if (n < 0) r.fail("negative variable count");
  LpBuilder builder;
  for (long j = 0; j < n; ++j) {
    auto name = r.word("variable name");
    const double lo = r.number("lower bound");
    const double hi = r.number("upper bound");
    const double cost = r.number("cost");
    builder.add_variable(std::move(name), lo, hi, cost);
  }
  r.expect("rows");
  const long m = r.integer("row count");
  if (m < 0) r.fail("negative row count");
  for (long i = 0; i < m; ++i) {
    auto name = r.word("row name");
    const auto sense = r.word("row sense");
    const double rhs = r.number("rhs");
    auto terms = read_terms(r, static_cast<int>(n));
    if (sense == "le") {
      builder.add_le(std::move(name), std::move(terms), rhs);
    } else if (sense == "eq") {
      builder.add_eq(std::move(name), std::move(terms), rhs);
    } else {
      r.fail("unknown row sense '" + sense + "'");
    }
  }
  r.expect("tiebreak");
  builder.set_tie_break(read_terms(r, static_cast<int>(n)));
  r.expect("end");
  return std::move(builder).build();
}

}  // namespace peakshaver::lp

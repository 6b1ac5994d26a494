#include "fleetcbm/mps.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace fleetcbm {
namespace {

constexpr std::size_t kMaxName = 255;

std::string sanitize(std::string_view raw, std::string_view fallback) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    s.push_back(u <= 32 || u >= 127 || c == '$' || c == '*' ? '_' : c);
  }
  if (s.empty()) s = fallback;
  if (s.size() > kMaxName) s.resize(kMaxName);
  return s;
}

// Assigns unique names, suffixing "#n" to repeats.
class NameTable {
 public:
  std::string claim(std::string base) {
    if (used_.insert(base).second) return base;
    for (int n = 2;; ++n) {
      std::string suffix = "#" + std::to_string(n);
      std::string cand = base.substr(0, kMaxName - suffix.size()) + suffix;
      if (used_.insert(cand).second) return cand;
    }
  }

 private:
  std::unordered_set<std::string> used_;
};

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<std::string> column_names(const MilpModel& model) {
  NameTable table;
  table.claim("OBJ");
  std::vector<std::string> out;
  out.reserve(model.num_variables());
  for (const Variable& v : model.variables()) {
    out.push_back(table.claim(sanitize(v.name, "x" + std::to_string(v.id))));
  }
  return out;
}

}  // namespace

std::string mps_column_name(const MilpModel& model, std::size_t id) { return column_names(model).at(id); }

std::string export_mps(const MilpModel& model, std::string_view name) {
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  const std::vector<std::string> cols = column_names(model);

  NameTable row_table;
  row_table.claim("OBJ");
  std::vector<std::string> row_names;
  row_names.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    row_names.push_back(row_table.claim(sanitize(rows[r].tag, "R" + std::to_string(r))));
  }

  // Column-major coefficient lists.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_col(vars.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const Term& t : rows[r].terms) by_col[t.var].emplace_back(r, t.coeff);
  }

  std::ostringstream out;
  out << "NAME " << sanitize(name, "FLEETCBM") << "\n";
  out << "ROWS\n N OBJ\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const char* s = rows[r].sense == Sense::kLessEqual ? "L" : rows[r].sense == Sense::kEqual ? "E" : "G";
    out << " " << s << " " << row_names[r] << "\n";
  }

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (const Variable& v : vars) {
    const bool is_int = v.kind == VarKind::kBinary;
    if (is_int != in_int) {
      out << " MARKER" << marker++ << " 'MARKER' " << (is_int ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = is_int;
    }
    bool wrote = false;
    if (v.obj_coeff != 0.0) {
      out << " " << cols[v.id] << " OBJ " << fmt(v.obj_coeff) << "\n";
      wrote = true;
    }
    for (const auto& [r, a] : by_col[v.id]) {
      out << " " << cols[v.id] << " " << row_names[r] << " " << fmt(a) << "\n";
      wrote = true;
    }
    // Columns need at least one entry to be declared.
    if (!wrote) out << " " << cols[v.id] << " OBJ 0\n";
  }
  if (in_int) out << " MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].rhs != 0.0) out << " RHS " << row_names[r] << " " << fmt(rows[r].rhs) << "\n";
  }

  // Every row is one-sided, so RANGES is always empty.
  out << "RANGES\n";

  out << "BOUNDS\n";
  for (const Variable& v : vars) {
    const std::string& c = cols[v.id];
    if (v.lower == v.upper) {
      out << " FX BND " << c << " " << fmt(v.lower) << "\n";
      continue;
    }
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << " FR BND " << c << "\n";
      continue;
    }
    if (std::isinf(v.lower)) {
      out << " MI BND " << c << "\n";
    } else {
      out << " LO BND " << c << " " << fmt(v.lower) << "\n";
    }
    if (std::isinf(v.upper)) {
      out << " PL BND " << c << "\n";
    } else {
      out << " UP BND " << c << " " << fmt(v.upper) << "\n";
    }
  }
  out << "ENDATA\n";
  return out.str();
}

MilpSolution import_solution(std::string_view text, const MilpModel& model, double tol) {
  std::unordered_map<std::string, std::size_t> lookup;
  const std::vector<std::string> cols = column_names(model);
  for (const Variable& v : model.variables()) {
    lookup.emplace(v.name, v.id);
    lookup.emplace(cols[v.id], v.id);
  }

  std::vector<double> values(model.num_variables(), std::nan(""));
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      // '#' also appears in deduplicated names; only treat it as a comment
      // when it starts a token.
      if (hash == 0 || std::isspace(static_cast<unsigned char>(line[hash - 1]))) line.resize(hash);
    }
    std::istringstream fields(line);
    std::string name, value, extra;
    if (!(fields >> name)) continue;
    if (!(fields >> value) || (fields >> extra)) {
      throw SolutionFormatError("line " + std::to_string(line_no) + ": expected '<name> <value>'");
    }
    double x = 0.0;
    const char* first = value.data();
    const char* last = first + value.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last) {
      throw SolutionFormatError("line " + std::to_string(line_no) + ": malformed value '" + value + "'");
    }
    auto it = lookup.find(name);
    if (it == lookup.end()) {
      throw SolutionFormatError("line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
    }
    values[it->second] = x;
  }
  for (const Variable& v : model.variables()) {
    if (std::isnan(values[v.id])) throw SolutionFormatError("missing value for variable '" + v.name + "'");
  }

  auto issues = model.check_feasibility(values, tol);
  if (!issues.empty()) {
    throw SolutionFormatError("infeasible assignment: '" + issues.front().what + "' violated by " +
                              fmt(issues.front().amount));
  }
  MilpSolution sol;
  sol.objective = model.objective_value(values);
  sol.values = std::move(values);
  sol.status = SolveStatus::kOptimal;
  sol.bound = sol.objective;
  sol.gap = 0.0;
  return sol;
}

}  // namespace fleetcbm

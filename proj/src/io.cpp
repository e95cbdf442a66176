#include "mixsdp/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mixsdp::io {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  return std::nullopt;
}

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (end < text.size() || !line.empty()) lines.push_back({number, line});
    ++number;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
}

template <class T>
T parse_integer(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(token) + "'");
  return value;
}

double parse_real(std::string_view token, std::size_t line, const char* what) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(token) + "'");
  return value;
}

std::size_t parse_index(std::string_view token, std::size_t n, std::size_t line) {
  const auto idx = parse_integer<std::size_t>(token, line, "a 1-based index");
  if (idx == 0 || idx > n)
    throw ParseError(line, "index " + std::string(token) + " outside 1.." + std::to_string(n));
  return idx - 1;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

EdgeListParse parse_edge_list(std::string_view text) {
  std::optional<std::size_t> n;
  std::size_t expected = 0;
  std::size_t last_line = 0;
  std::vector<Edge> edges;
  EdgeListParse out;
  for (const auto& [number, line] : split_lines(text)) {
    last_line = number;
    if (blank(line)) continue;
    const auto tok = tokens(line);
    if (tok[0].front() == '%' || tok[0].front() == '#') continue;
    if (!n) {
      if (tok.size() != 2) throw ParseError(number, "expected header 'n m'");
      n = parse_integer<std::size_t>(tok[0], number, "node count");
      expected = parse_integer<std::size_t>(tok[1], number, "edge count");
      if (*n == 0) throw ParseError(number, "node count must be positive");
      continue;
    }
    if (tok.size() != 3) throw ParseError(number, "expected edge line 'i j w'");
    const auto u = parse_index(tok[0], *n, number);
    const auto v = parse_index(tok[1], *n, number);
    const double w = parse_real(tok[2], number, "edge weight");
    if (edges.size() + out.self_loops >= expected)
      throw ParseError(number, "more edge lines than the " + std::to_string(expected) + " declared");
    if (u == v) {
      ++out.self_loops;
      continue;
    }
    edges.push_back({u, v, w});
  }
  if (!n) throw ParseError(last_line, "missing 'n m' header");
  if (edges.size() + out.self_loops != expected)
    throw ParseError(last_line, "declared " + std::to_string(expected) + " edges, found " +
                                    std::to_string(edges.size() + out.self_loops));
  out.instance = MaxCutInstance::from_edges(*n, edges);
  return out;
}

RawInstance parse_matrix_market(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(0, "empty Matrix Market input");
  const auto head = tokens(lines[0].text);
  if (head.empty() || lower(head[0]) != "%%matrixmarket") throw ParseError(1, "missing %%MatrixMarket banner");
  if (head.size() != 5) throw ParseError(1, "banner needs object, format, field and symmetry");
  if (lower(head[1]) != "matrix") throw ParseError(1, "unsupported object '" + std::string(head[1]) + "'");
  if (lower(head[2]) != "coordinate") throw ParseError(1, "unsupported format '" + std::string(head[2]) + "'");
  const auto field = lower(head[3]);
  if (field != "real" && field != "integer" && field != "pattern")
    throw ParseError(1, "unsupported field '" + std::string(head[3]) + "'");
  const auto symmetry = lower(head[4]);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError(1, "unsupported symmetry '" + std::string(head[4]) + "'");
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  RawInstance out;
  std::optional<std::size_t> nnz;
  std::size_t seen = 0;
  std::size_t last_line = 1;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto& [number, line] = lines[l];
    last_line = number;
    if (blank(line)) continue;
    const auto tok = tokens(line);
    if (tok[0].front() == '%') continue;
    if (!nnz) {
      if (tok.size() != 3) throw ParseError(number, "expected size line 'rows cols nnz'");
      const auto rows = parse_integer<std::size_t>(tok[0], number, "row count");
      const auto cols = parse_integer<std::size_t>(tok[1], number, "column count");
      nnz = parse_integer<std::size_t>(tok[2], number, "entry count");
      if (rows != cols) throw ParseError(number, "cost matrix must be square");
      if (rows == 0) throw ParseError(number, "matrix dimension must be positive");
      out.n = rows;
      continue;
    }
    if (tok.size() != (pattern ? 2u : 3u))
      throw ParseError(number, pattern ? "expected entry 'i j'" : "expected entry 'i j value'");
    if (seen == *nnz) throw ParseError(number, "more entries than the " + std::to_string(*nnz) + " declared");
    const auto i = parse_index(tok[0], out.n, number);
    const auto j = parse_index(tok[1], out.n, number);
    const double w = pattern ? 1.0 : parse_real(tok[2], number, "entry value");
    ++seen;
    if (symmetric && i < j) throw ParseError(number, "symmetric storage expects lower-triangle entries only");
    out.triplets.push_back({i, j, w});
    if (symmetric && i != j) out.triplets.push_back({j, i, w});
  }
  if (!nnz) throw ParseError(last_line, "missing size line");
  if (seen != *nnz)
    throw ParseError(last_line, "declared " + std::to_string(*nnz) + " entries, found " + std::to_string(seen));
  return out;
}

MaxSatInstance parse_cnf(std::string_view text) {
  MaxSatInstance out;
  std::optional<std::size_t> declared;
  std::vector<long long> pending;
  std::size_t last_line = 0;

  auto finish_clause = [&](std::size_t number) {
    if (pending.empty()) throw ParseError(number, "empty clause");
    Clause clause;
    std::set<std::pair<std::size_t, int>> seen;
    std::set<std::size_t> vars;
    for (long long lit : pending) {
      const auto var = static_cast<std::size_t>(lit > 0 ? lit : -lit) - 1;
      const int sign = lit > 0 ? 1 : -1;
      if (!seen.insert({var, sign}).second) continue;
      if (!vars.insert(var).second) clause.tautological = true;
      clause.literals.push_back({var, sign});
    }
    out.clauses.push_back(std::move(clause));
    pending.clear();
  };

  for (const auto& [number, line] : split_lines(text)) {
    last_line = number;
    if (blank(line)) continue;
    const auto tok = tokens(line);
    if (tok[0] == "c" || tok[0].front() == 'c') continue;
    if (tok[0] == "p") {
      if (declared) throw ParseError(number, "duplicate 'p cnf' header");
      if (tok.size() != 4 || tok[1] != "cnf") throw ParseError(number, "expected header 'p cnf n m'");
      out.num_vars = parse_integer<std::size_t>(tok[2], number, "variable count");
      declared = parse_integer<std::size_t>(tok[3], number, "clause count");
      continue;
    }
    if (!declared) throw ParseError(number, "clause before the 'p cnf' header");
    for (const auto token : tok) {
      const auto lit = parse_integer<long long>(token, number, "a literal");
      if (lit == 0) {
        finish_clause(number);
        continue;
      }
      const auto var = static_cast<unsigned long long>(lit > 0 ? lit : -lit);
      if (var > out.num_vars)
        throw ParseError(number, "variable " + std::to_string(var) + " exceeds declared count " +
                                     std::to_string(out.num_vars));
      pending.push_back(lit);
    }
    if (out.clauses.size() > *declared)
      throw ParseError(number, "more clauses than the " + std::to_string(*declared) + " declared");
  }
  if (!declared) throw ParseError(last_line, "missing 'p cnf' header");
  if (!pending.empty()) throw ParseError(last_line, "last clause is not terminated by 0");
  if (out.clauses.size() != *declared)
    throw ParseError(last_line, "declared " + std::to_string(*declared) + " clauses, found " +
                                    std::to_string(out.clauses.size()));
  return out;
}

std::string serialize_edge_list(const MaxCutInstance& inst) {
  std::string out = std::to_string(inst.n) + " " + std::to_string(inst.edges.size()) + "\n";
  for (const auto& e : inst.edges)
    out += std::to_string(e.u + 1) + " " + std::to_string(e.v + 1) + " " + format_double(e.weight) + "\n";
  return out;
}

std::string serialize_matrix_market(const RawInstance& inst) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(inst.n) + " " + std::to_string(inst.n) + " " + std::to_string(inst.triplets.size()) + "\n";
  for (const auto& t : inst.triplets)
    out += std::to_string(t.row + 1) + " " + std::to_string(t.col + 1) + " " + format_double(t.weight) + "\n";
  return out;
}

std::string serialize_cnf(const MaxSatInstance& inst) {
  std::string out = "p cnf " + std::to_string(inst.num_vars) + " " + std::to_string(inst.clauses.size()) + "\n";
  for (const auto& clause : inst.clauses) {
    for (const auto& lit : clause.literals) {
      out += lit.sign < 0 ? "-" : "";
      out += std::to_string(lit.var + 1) + " ";
    }
    out += "0\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string() + ": " + std::strerror(errno));
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
}

ParsedInstance load_instance(const std::filesystem::path& path) {
  const auto text = read_file(path);
  ParsedInstance parsed;
  parsed.path = path;
  parsed.lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  const auto ext = lower(path.extension().string());
  if (ext == ".cnf") {
    parsed.instance = parse_cnf(text);
    parsed.format = "cnf";
  } else if (ext == ".mtx") {
    parsed.instance = parse_matrix_market(text);
    parsed.format = "mtx";
  } else {
    auto edges = parse_edge_list(text);
    parsed.instance = std::move(edges.instance);
    parsed.warnings = edges.self_loops;
    parsed.format = "edges";
  }
  return parsed;
}

std::string encode_runs(std::span<const int> x) {
  std::string out;
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    out += x[i] < 0 ? '-' : '+';
    out += std::to_string(j - i);
    i = j;
  }
  return out;
}

std::vector<int> decode_runs(std::string_view text) {
  std::vector<int> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char sign = text[i];
    if (sign != '+' && sign != '-') throw ParseError(0, "bad run-length sign in assignment");
    std::size_t j = ++i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    const auto count = parse_integer<std::size_t>(text.substr(i, j - i), 0, "a run length");
    if (count == 0 || count > text.size() * 1000000) throw ParseError(0, "bad run length in assignment");
    out.insert(out.end(), count, sign == '-' ? -1 : 1);
    i = j;
  }
  return out;
}

namespace {

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> csv_fields(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  if (quoted) throw ParseError(0, "unterminated quoted CSV field");
  return fields;
}

}  // namespace

std::string format_result(const ResultRecord& r, Format format) {
  if (format == Format::Json) {
    nlohmann::json j;
    j["problem"] = r.problem;
    j["n"] = r.n;
    j["k"] = r.k;
    j["beta"] = r.beta;
    j["rule"] = r.rule;
    j["sweeps"] = r.sweeps;
    j["f"] = r.f;
    j["bound_or_value"] = r.bound_or_value ? nlohmann::json(*r.bound_or_value) : nlohmann::json(nullptr);
    j["assignment"] = r.assignment && !r.assignment->empty() ? nlohmann::json(encode_runs(*r.assignment))
                                                              : nlohmann::json(nullptr);
    j["trace_ref"] = r.trace_ref ? nlohmann::json(*r.trace_ref) : nlohmann::json(nullptr);
    return j.dump(2) + "\n";
  }
  std::string row = csv_quote(r.problem) + "," + std::to_string(r.n) + "," + std::to_string(r.k) + "," +
                    format_double(r.beta) + "," + csv_quote(r.rule) + "," + std::to_string(r.sweeps) + "," +
                    format_double(r.f) + ",";
  if (r.bound_or_value) row += format_double(*r.bound_or_value);
  row += ",";
  if (r.assignment && !r.assignment->empty()) row += encode_runs(*r.assignment);
  row += ",";
  if (r.trace_ref) row += csv_quote(*r.trace_ref);
  return std::string(kResultCsvHeader) + "\n" + row + "\n";
}

ResultRecord parse_result(std::string_view text, Format format) {
  ResultRecord r;
  if (format == Format::Json) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      r.problem = j.at("problem").get<std::string>();
      r.n = j.at("n").get<std::size_t>();
      r.k = j.at("k").get<std::size_t>();
      r.beta = j.at("beta").get<double>();
      r.rule = j.at("rule").get<std::string>();
      r.sweeps = j.at("sweeps").get<std::size_t>();
      r.f = j.at("f").get<double>();
      if (!j.at("bound_or_value").is_null()) r.bound_or_value = j["bound_or_value"].get<double>();
      if (!j.at("assignment").is_null()) r.assignment = decode_runs(j["assignment"].get<std::string>());
      if (!j.at("trace_ref").is_null()) r.trace_ref = j["trace_ref"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(0, std::string("malformed result JSON: ") + e.what());
    }
    return r;
  }
  const auto lines = split_lines(text);
  if (lines.size() < 2 || lines[0].text != kResultCsvHeader) throw ParseError(1, "unexpected result CSV header");
  const auto f = csv_fields(lines[1].text);
  if (f.size() != 10) throw ParseError(2, "result row needs 10 fields");
  r.problem = f[0];
  r.n = parse_integer<std::size_t>(f[1], 2, "n");
  r.k = parse_integer<std::size_t>(f[2], 2, "k");
  r.beta = parse_real(f[3], 2, "beta");
  r.rule = f[4];
  r.sweeps = parse_integer<std::size_t>(f[5], 2, "sweeps");
  r.f = parse_real(f[6], 2, "f");
  if (!f[7].empty()) r.bound_or_value = parse_real(f[7], 2, "bound_or_value");
  if (!f[8].empty()) r.assignment = decode_runs(f[8]);
  if (!f[9].empty()) r.trace_ref = f[9];
  return r;
}

void write_result(const ResultRecord& record, const std::filesystem::path& path, Format format) {
  write_file(path, format_result(record, format));
}

ResultRecord read_result(const std::filesystem::path& path, Format format) {
  return parse_result(read_file(path), format);
}

std::string format_trace(const SolveTrace& trace, Format format) {
  if (format == Format::Json) {
    auto rows = nlohmann::json::array();
    for (const auto& s : trace.sweeps)
      rows.push_back({{"sweep", s.sweep},
                      {"f", s.f},
                      {"min_g_norm", s.min_g_norm},
                      {"descent_slack", s.descent_slack},
                      {"grad_norm", s.grad_norm},
                      {"beta_used", s.beta_used},
                      {"elapsed_s", s.elapsed_s}});
    return rows.dump(1) + "\n";
  }
  std::string out = std::string(kTraceCsvHeader) + "\n";
  for (const auto& s : trace.sweeps)
    out += std::to_string(s.sweep) + "," + format_double(s.f) + "," + format_double(s.min_g_norm) + "," +
           format_double(s.descent_slack) + "," + format_double(s.grad_norm) + "," + format_double(s.beta_used) +
           "," + format_double(s.elapsed_s) + "\n";
  return out;
}

void write_trace(const SolveTrace& trace, const std::filesystem::path& path, Format format) {
  write_file(path, format_trace(trace, format));
}

}  // namespace mixsdp::io

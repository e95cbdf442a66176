#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mixsdp/problems.hpp"
#include "mixsdp/solver.hpp"

namespace mixsdp::io {

/// Malformed input, positioned at a 1-based line number (0 when the problem
/// is not tied to a single line).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Filesystem failures, carrying the OS message verbatim.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Json, Csv };
std::optional<Format> parse_format(std::string_view name);

struct EdgeListParse {
  MaxCutInstance instance;
  std::size_t self_loops = 0;
};

/// "n m" header then m lines "i j w", 1-based. '%' and '#' start comments.
EdgeListParse parse_edge_list(std::string_view text);

/// Coordinate Matrix Market, real/integer/pattern, general or symmetric.
RawInstance parse_matrix_market(std::string_view text);

/// DIMACS CNF. Repeated literals collapse; complementary literals flag the
/// clause tautological.
MaxSatInstance parse_cnf(std::string_view text);

std::string serialize_edge_list(const MaxCutInstance& inst);
std::string serialize_matrix_market(const RawInstance& inst);
std::string serialize_cnf(const MaxSatInstance& inst);

struct ParsedInstance {
  ProblemInstance instance;
  std::filesystem::path path;
  std::string format;  ///< "edges", "mtx" or "cnf"
  std::size_t lines = 0;
  std::size_t warnings = 0;
};

/// Reads a file and dispatches on its extension: .cnf, .mtx, anything else
/// as an edge list.
ParsedInstance load_instance(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Run-length encoding of a +-1 vector, e.g. {1,1,-1} -> "+2-1".
std::string encode_runs(std::span<const int> x);
std::vector<int> decode_runs(std::string_view text);

struct ResultRecord {
  std::string problem;
  std::size_t n = 0;
  std::size_t k = 0;
  double beta = 0.0;
  std::string rule;
  std::size_t sweeps = 0;
  double f = 0.0;
  std::optional<double> bound_or_value;
  std::optional<std::vector<int>> assignment;
  std::optional<std::string> trace_ref;

  bool operator==(const ResultRecord&) const = default;
};

inline constexpr std::string_view kResultCsvHeader =
    "problem,n,k,beta,rule,sweeps,f,bound_or_value,assignment,trace_ref";
inline constexpr std::string_view kTraceCsvHeader = "sweep,f,min_g_norm,descent_slack,grad_norm,beta_used,elapsed_s";

std::string format_result(const ResultRecord& record, Format format);
ResultRecord parse_result(std::string_view text, Format format);

void write_result(const ResultRecord& record, const std::filesystem::path& path, Format format);
ResultRecord read_result(const std::filesystem::path& path, Format format);

std::string format_trace(const SolveTrace& trace, Format format);
void write_trace(const SolveTrace& trace, const std::filesystem::path& path, Format format);

}  // namespace mixsdp::io

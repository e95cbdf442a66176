#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include "mixsdp/io.hpp"

using namespace mixsdp;
using namespace mixsdp::io;

namespace {

std::size_t error_line(auto&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mixsdp_io_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("parse_edge_list") {
  SUBCASE("single edge") {
    const auto p = parse_edge_list("2 1\n1 2 1");
    REQUIRE(p.instance.edges.size() == 1);
    CHECK(p.instance.n == 2);
    CHECK(p.instance.edges[0].u == 0);
    CHECK(p.instance.edges[0].v == 1);
    CHECK(p.instance.edges[0].weight == 1.0);
  }
  SUBCASE("empty graph") {
    const auto p = parse_edge_list("3 0");
    CHECK(p.instance.n == 3);
    CHECK(p.instance.edges.empty());
  }
  SUBCASE("self-loop dropped with a warning") {
    const auto p = parse_edge_list("2 1\n1 1 5");
    CHECK(p.instance.edges.empty());
    CHECK(p.self_loops == 1);
  }
  SUBCASE("comments, CRLF and duplicate pairs") {
    const auto p = parse_edge_list("% header\r\n# more\r\n3 3\r\n1 2 1.5\r\n2 1 0.5\r\n\r\n3 2 -1\r\n");
    REQUIRE(p.instance.edges.size() == 2);
    CHECK(p.instance.edges[0].weight == 2.0);
    CHECK(p.instance.edges[1].u == 1);
    CHECK(p.instance.edges[1].v == 2);
    CHECK(p.instance.edges[1].weight == -1.0);
  }
  SUBCASE("errors carry line numbers") {
    CHECK(error_line([] { parse_edge_list("2 1\n1 x 1"); }) == 2);
    CHECK(error_line([] { parse_edge_list("2 1\n\n1 3 1"); }) == 3);
    CHECK(error_line([] { parse_edge_list("2 1\n1 2"); }) == 2);
    CHECK(error_line([] { parse_edge_list("2 2\n1 2 1\n"); }) != static_cast<std::size_t>(-1));
    CHECK(error_line([] { parse_edge_list("2 1\n1 2 1\n2 1 1"); }) == 3);
    CHECK(error_line([] { parse_edge_list("0 0"); }) == 1);
    CHECK(error_line([] { parse_edge_list("2 1\n1 2 nan"); }) == 2);
    CHECK(error_line([] { parse_edge_list(""); }) == 0);
    CHECK(error_text([] { parse_edge_list("2 1\n1 x 1"); }).rfind("line 2:", 0) == 0);
  }
}

TEST_CASE("parse_matrix_market") {
  SUBCASE("symmetric entry is mirrored") {
    const auto raw = parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 3.5\n");
    CHECK(raw.n == 2);
    REQUIRE(raw.triplets.size() == 2);
    CHECK(raw.triplets[0].row == 1);
    CHECK(raw.triplets[0].col == 0);
    CHECK(raw.triplets[1].row == 0);
    CHECK(raw.triplets[1].col == 1);
    CHECK(raw.triplets[1].weight == 3.5);
  }
  SUBCASE("pattern gets unit weights") {
    const auto raw = parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n% c\n3 3 2\n1 2\n3 1\n");
    REQUIRE(raw.triplets.size() == 2);
    for (const auto& t : raw.triplets) CHECK(t.weight == 1.0);
  }
  SUBCASE("diagonal entries are not mirrored") {
    const auto raw = parse_matrix_market("%%MatrixMarket matrix coordinate integer symmetric\n2 2 1\n1 1 4\n");
    CHECK(raw.triplets.size() == 1);
  }
  SUBCASE("unsupported keywords are named") {
    CHECK(error_text([] { parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"); })
              .find("'array'") != std::string::npos);
    CHECK(error_text([] { parse_matrix_market("%%MatrixMarket matrix coordinate complex general\n1 1 0\n"); })
              .find("'complex'") != std::string::npos);
    CHECK(error_text([] { parse_matrix_market("%%MatrixMarket matrix coordinate real hermitian\n1 1 0\n"); })
              .find("'hermitian'") != std::string::npos);
  }
  SUBCASE("malformed input") {
    CHECK(error_line([] { parse_matrix_market("2 2 1\n1 2 1\n"); }) == 1);
    CHECK(error_line([] { parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 3 0\n"); }) == 2);
    CHECK(error_line([] { parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 5 1\n"); }) == 3);
    CHECK(error_line([] { parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n"); }) ==
          3);
    CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1\n"), ParseError);
  }
}

TEST_CASE("parse_cnf") {
  SUBCASE("one clause") {
    const auto inst = parse_cnf("p cnf 2 1\n1 -2 0");
    CHECK(inst.num_vars == 2);
    REQUIRE(inst.clauses.size() == 1);
    REQUIRE(inst.clauses[0].literals.size() == 2);
    CHECK(inst.clauses[0].literals[0].var == 0);
    CHECK(inst.clauses[0].literals[0].sign == 1);
    CHECK(inst.clauses[0].literals[1].var == 1);
    CHECK(inst.clauses[0].literals[1].sign == -1);
    CHECK_FALSE(inst.clauses[0].tautological);
  }
  SUBCASE("tautology flagged") {
    const auto inst = parse_cnf("p cnf 1 1\n1 -1 0");
    REQUIRE(inst.clauses.size() == 1);
    CHECK(inst.clauses[0].tautological);
  }
  SUBCASE("clause sizes") {
    const auto inst = parse_cnf("c comment\np cnf 3 2\n1 0\n-1 2 3 0\n");
    REQUIRE(inst.clauses.size() == 2);
    CHECK(inst.clauses[0].literals.size() == 1);
    CHECK(inst.clauses[1].literals.size() == 3);
  }
  SUBCASE("duplicates collapse, clauses may span lines, CRLF") {
    const auto inst = parse_cnf("p cnf 3 2\r\n2 2 -3\r\n0 1 0\r\n");
    REQUIRE(inst.clauses.size() == 2);
    CHECK(inst.clauses[0].literals.size() == 2);
  }
  SUBCASE("errors") {
    CHECK(error_line([] { parse_cnf("p cnf 2 2\n1 0\n"); }) == 2);
    CHECK(error_line([] { parse_cnf("p cnf 2 1\n1 3 0\n"); }) == 2);
    CHECK(error_line([] { parse_cnf("p cnf 2 1\n1 0\n2 0\n"); }) == 3);
    CHECK(error_line([] { parse_cnf("1 0\n"); }) == 1);
    CHECK(error_line([] { parse_cnf("p cnf 2 1\n0\n"); }) == 2);
    CHECK(error_line([] { parse_cnf("p cnf 2 1\n1 2\n"); }) == 2);
    CHECK(error_line([] { parse_cnf("p cnf 2 1\n1 a 0\n"); }) == 2);
    CHECK(error_line([] { parse_cnf("p wcnf 2 1\n1 0\n"); }) == 1);
  }
}

TEST_CASE("serialize then parse is the identity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < 3 * n; ++e)
      edges.push_back({rng() % n, rng() % n, std::normal_distribution<double>(0.0, 3.0)(rng)});
    const auto graph = MaxCutInstance::from_edges(n, edges);
    const auto again = parse_edge_list(serialize_edge_list(graph)).instance;
    REQUIRE(again.n == graph.n);
    REQUIRE(again.edges.size() == graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      CHECK(again.edges[e].u == graph.edges[e].u);
      CHECK(again.edges[e].v == graph.edges[e].v);
      CHECK(again.edges[e].weight == graph.edges[e].weight);
    }

    RawInstance raw{n, {}};
    for (std::size_t e = 0; e < 2 * n; ++e)
      raw.triplets.push_back({rng() % n, rng() % n, std::uniform_real_distribution<double>(-5, 5)(rng)});
    const auto raw2 = parse_matrix_market(serialize_matrix_market(raw));
    REQUIRE(raw2.n == raw.n);
    REQUIRE(raw2.triplets.size() == raw.triplets.size());
    for (std::size_t e = 0; e < raw.triplets.size(); ++e) {
      CHECK(raw2.triplets[e].row == raw.triplets[e].row);
      CHECK(raw2.triplets[e].col == raw.triplets[e].col);
      CHECK(raw2.triplets[e].weight == raw.triplets[e].weight);
    }

    MaxSatInstance sat{n, {}};
    for (std::size_t j = 0; j < n; ++j) {
      Clause cl;
      const std::size_t a = rng() % n;
      const std::size_t b = (a + 1 + rng() % (n - 1)) % n;
      cl.literals = {{a, rng() % 2 ? 1 : -1}, {b, rng() % 2 ? 1 : -1}};
      sat.clauses.push_back(cl);
    }
    sat.clauses.push_back(Clause{{{0, 1}, {0, -1}}, true});
    const auto sat2 = parse_cnf(serialize_cnf(sat));
    REQUIRE(sat2.clauses.size() == sat.clauses.size());
    for (std::size_t j = 0; j < sat.clauses.size(); ++j) {
      CHECK(sat2.clauses[j].tautological == sat.clauses[j].tautological);
      REQUIRE(sat2.clauses[j].literals.size() == sat.clauses[j].literals.size());
      for (std::size_t l = 0; l < sat.clauses[j].literals.size(); ++l) {
        CHECK(sat2.clauses[j].literals[l].var == sat.clauses[j].literals[l].var);
        CHECK(sat2.clauses[j].literals[l].sign == sat.clauses[j].literals[l].sign);
      }
    }
  }
}

TEST_CASE("run-length assignments") {
  const std::vector<int> x{1, 1, -1, 1, -1, -1, -1};
  CHECK(encode_runs(x) == "+2-1+1-3");
  CHECK(decode_runs("+2-1+1-3") == x);
  CHECK(encode_runs(std::vector<int>{}).empty());
  CHECK(decode_runs("").empty());
  CHECK_THROWS_AS(decode_runs("+0"), ParseError);
  CHECK_THROWS_AS(decode_runs("*3"), ParseError);
  CHECK_THROWS_AS(decode_runs("+"), ParseError);
}

TEST_CASE("result records round-trip") {
  ResultRecord full{"maxcut", 5, 4, 0.8, "cyclic", 17, -6.472135954999579, 4.0, std::vector<int>{1, -1, 1, -1, -1},
                    std::string("trace, \"quoted\".csv")};
  ResultRecord bare{"solve", 3, 3, 0.0, "greedy", 2, 0.1 + 0.2, std::nullopt, std::nullopt, std::nullopt};
  for (auto fmt : {Format::Json, Format::Csv}) {
    for (const auto& rec : {full, bare}) {
      const auto path = temp_path(fmt == Format::Json ? "r.json" : "r.csv");
      write_result(rec, path, fmt);
      CHECK(read_result(path, fmt) == rec);
      CHECK(parse_result(format_result(rec, fmt), fmt) == rec);
      std::filesystem::remove(path);
    }
  }
  CHECK(format_result(full, Format::Csv).rfind(std::string(kResultCsvHeader) + "\n", 0) == 0);
  CHECK(kResultCsvHeader == "problem,n,k,beta,rule,sweeps,f,bound_or_value,assignment,trace_ref");
  const auto json = format_result(bare, Format::Json);
  CHECK(json.find("\"assignment\": null") != std::string::npos);
  CHECK(json.find("\"bound_or_value\": null") != std::string::npos);
}

TEST_CASE("traces") {
  SolveTrace trace;
  trace.sweeps.push_back({0, -1.5, 0.25, 0.0, 3.0, 0.8, 0.001});
  trace.sweeps.push_back({1, -1.75, 0.5, 1e-9, 1.0, 0.8, 0.002});
  const auto csv = format_trace(trace, Format::Csv);
  CHECK(csv.rfind("sweep,f,min_g_norm,descent_slack,grad_norm,beta_used,elapsed_s\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const auto json = format_trace(trace, Format::Json);
  for (const char* key : {"sweep", "f", "min_g_norm", "descent_slack", "grad_norm", "beta_used", "elapsed_s"})
    CHECK(json.find(std::string("\"") + key + "\"") != std::string::npos);
}

TEST_CASE("filesystem errors are surfaced") {
  const auto missing = temp_path("does/not/exist.txt");
  CHECK_THROWS_AS(read_file(missing), IoError);
  CHECK_THROWS_AS(write_file(missing, "x"), IoError);
  CHECK(error_text([&] { read_file(missing); }).find("No such file") != std::string::npos);
  CHECK_THROWS_AS(load_instance(missing), IoError);
}

TEST_CASE("load_instance dispatches on extension") {
  const auto cnf = temp_path("f.cnf");
  write_file(cnf, "p cnf 2 1\n1 2 0\n");
  CHECK(std::holds_alternative<MaxSatInstance>(load_instance(cnf).instance));
  const auto mtx = temp_path("m.mtx");
  write_file(mtx, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1\n");
  CHECK(std::holds_alternative<RawInstance>(load_instance(mtx).instance));
  const auto edges = temp_path("g.txt");
  write_file(edges, "2 1\n1 1 1\n");
  const auto parsed = load_instance(edges);
  CHECK(std::holds_alternative<MaxCutInstance>(parsed.instance));
  CHECK(parsed.warnings == 1);
  for (const auto& p : {cnf, mtx, edges}) std::filesystem::remove(p);
}

TEST_CASE("parsers never crash on arbitrary input") {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> seeds{
      "5 3\n1 2 1\n2 3 -0.5\n4 5 2\n",
      "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 1 1\n3 2 4\n",
      "c x\np cnf 3 2\n1 -2 0\n2 3 -1 0\n",
      "+3-2+1",
  };
  const std::string alphabet = "0123456789 -+.eE\n\r%#cpnf\t%%MatrixMarket0x";
  std::size_t rejected = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    std::string text = seeds[trial % seeds.size()];
    const int edits = 1 + static_cast<int>(rng() % 6);
    for (int e = 0; e < edits; ++e) {
      const std::size_t pos = text.empty() ? 0 : rng() % text.size();
      switch (rng() % 3) {
        case 0:
          text.insert(pos, 1, alphabet[rng() % alphabet.size()]);
          break;
        case 1:
          if (!text.empty()) text.erase(pos, 1);
          break;
        default:
          if (!text.empty()) text[pos] = static_cast<char>(rng() % 256);
      }
    }
    try {
      switch (trial % seeds.size()) {
        case 0:
          parse_edge_list(text);
          break;
        case 1:
          parse_matrix_market(text);
          break;
        case 2:
          parse_cnf(text);
          break;
        default:
          decode_runs(text);
      }
    } catch (const ParseError&) {
      ++rejected;
    }
  }
  CHECK(rejected > 0);
}

#include "memheat/error.hpp"
#include "memheat/io.hpp"
#include "memheat/solver.hpp"
#include "memheat/summary.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace memheat;

namespace {

EnergyTrace three_stamps() {
  EnergyTrace tr;
  for (int k = 0; k < 3; ++k) {
    tr.t.push_back(0.1 * k);
    tr.E.push_back(1.0 / (1 + k));
    tr.g_circ.push_back(0.01 * k);
    tr.g_prime_circ.push_back(-0.02 * k);
    tr.grad_sq.push_back(2.0 / (1 + k));
    tr.dissipation.push_back(k == 0 ? 0.0 : 0.3);
    tr.g_value.push_back(0.0);
    tr.g_integral.push_back(0.0);
  }
  return tr;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Summary sample_summary() {
  Summary s;
  s.preset = "x";
  s.kernel.family = "power_law";
  s.kernel.params = {{"a", 1.0}, {"nu", 3.0}};
  s.kernel.l = 0.5;
  s.kernel.p = 4.0 / 3.0;
  s.envelope.kind = "OptimalPolynomial";
  s.fit.model = "power_law";
  s.fit.params = {{"amplitude", 1.0}, {"exponent", -3.0}};
  return s;
}

}  // namespace

TEST(Csv, HeaderAndRows) {
  std::ostringstream os;
  write_csv(os, three_stamps());
  const std::string text = os.str();
  EXPECT_EQ(count_lines(text), 4);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,E,g_circ_grad,grad_sq,dissipation,envelope");
  EXPECT_NE(text.find("\n0.1,0.5,0.01,1,0.3,nan\n"), std::string::npos);
}

TEST(Csv, EmptyTraceIsHeaderOnly) {
  std::ostringstream os;
  write_csv(os, EnergyTrace{});
  EXPECT_EQ(os.str(), "t,E,g_circ_grad,grad_sq,dissipation,envelope\n");
}

TEST(Csv, RerunIsByteIdenticalAndReadsBack) {
  const auto dir = std::filesystem::temp_directory_path() / "memheat_io_test";
  std::filesystem::create_directories(dir);
  const Mesh m = build_mesh(1, 1.0, 32);
  KernelParams p;
  p.a = 0.3;
  p.b = 1.0;
  SolverConfig cfg;
  cfg.m = 2.4;
  cfg.dt = 0.01;
  cfg.t_final = 0.5;
  const auto g = make_kernel(KernelFamily::PureExp, p);
  const Field u0 = make_initial_field(m, 1, InitialCondition{InitialCondition::Kind::Random, 77});
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  emit_csv(run(u0, cfg, g, MatrixA::identity(1)).trace, a);
  const RunResult r = run(u0, cfg, g, MatrixA::identity(1));
  emit_csv(r.trace, b);
  EXPECT_EQ(slurp(a), slurp(b));
  const CsvTrace back = read_csv(a);
  EXPECT_EQ(back.t, r.trace.t);
  EXPECT_EQ(back.E, r.trace.E);
  std::filesystem::remove_all(dir);
}

TEST(Csv, UnwritablePath) {
  try {
    emit_csv(three_stamps(), "/nonexistent-dir/sub/trace.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Summary, ValidatesAgainstSchema) {
  EXPECT_TRUE(validate_summary(to_json(sample_summary())).empty());
}

TEST(Summary, NullableFields) {
  Summary s = sample_summary();
  s.kernel.p.reset();
  s.checks.k0.reset();
  s.fit.residual = std::nan("");
  const std::string text = to_json(s);
  EXPECT_NE(text.find("\"k0\": null"), std::string::npos);
  EXPECT_TRUE(validate_summary(text).empty());
}

TEST(Summary, SchemaViolations) {
  Summary s = sample_summary();
  s.envelope.kind = "Linear";
  EXPECT_FALSE(validate_summary(to_json(s)).empty());
  EXPECT_FALSE(validate_summary("{\"preset\": 3}").empty());
  EXPECT_FALSE(validate_summary("not json").empty());
}

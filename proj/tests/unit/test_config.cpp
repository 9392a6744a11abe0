#include "memheat/config.hpp"
#include "memheat/error.hpp"
#include "memheat/presets.hpp"

#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

using namespace memheat;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::Io;
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.kernel.family, "none");
  EXPECT_EQ(c.mesh.cells, 64);
  EXPECT_EQ(c.components(), 1);
  EXPECT_EQ(c.memory.mode, "direct");
}

TEST(Config, ParsesSections) {
  const RunConfig c = parse_config(R"(
preset = custom
seed = 9
[kernel]
family = stretched_exp
a = 0.25
b = 1.5
alpha = 0.5
[mesh]
dim = 2
cells = 12
extent = 2
[field]
components = 2
initial = random(4)
[solver]
m = 2.5
dt = 0.02
t_final = 3
time_mesh = geometric(1.01)
[A]
mode = constant
c0 = 0.5
entries = 2 0.1 0.1 1
[output]
format = json
)");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.kernel.alpha, 0.5);
  EXPECT_EQ(c.mesh.dim, 2);
  EXPECT_EQ(c.components(), 2);
  EXPECT_EQ(c.A.entries.size(), 4u);
  EXPECT_EQ(parse_time_mesh(c.solver.time_mesh).ratio, 1.01);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(kind_of([] { parse_config("[kernel]\ncolour = red\n"); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { parse_config("[colours]\nred = 1\n"); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { parse_config("bogus = 1\n"); }), ErrorKind::ConfigInvalid);
}

TEST(Config, MalformedValuesRejected) {
  EXPECT_EQ(kind_of([] { parse_config("[mesh]\ncells = many\n"); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { parse_config("[solver]\ndt = 0.1x\n"); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { parse_time_mesh("geometric(0.9)"); }), ErrorKind::ConfigInvalid);
}

TEST(Config, KernelKeysPerFamily) {
  EXPECT_EQ(kind_of([] { parse_config("[kernel]\nfamily = power_law\na = 1\nnu = 3\nalpha = 0.5\n"); }),
            ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { parse_config("[kernel]\nfamily = power_law\na = 1\n"); }),
            ErrorKind::ConfigInvalid);
  RunConfig direct;
  direct.kernel.family = "pure_exp";
  direct.kernel.a = 0.1;
  EXPECT_EQ(kind_of([&] { validate_config(direct); }), ErrorKind::ConfigInvalid);
}

TEST(Config, RoundTripPresetsAndRandom) {
  for (const auto& name : preset_names()) {
    const RunConfig c = preset_config(name);
    EXPECT_EQ(parse_config(serialize_config(c)), c) << name;
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const RunConfig c = randomized_config(seed);
    const std::string text = serialize_config(c);
    EXPECT_EQ(parse_config(text), c) << text;
    EXPECT_EQ(serialize_config(parse_config(text)), text);
  }
}

TEST(Config, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0,
                   std::numeric_limits<double>::denorm_min()}) {
    const std::string text = format_double(v);
    double back = 1.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(back, v) << text;
  }
  EXPECT_EQ(format_double(1e-4), "1e-04");
}

TEST(Presets, Known) {
  const RunConfig e31 = preset_config("example31");
  EXPECT_EQ(e31.kernel.family, "power_law");
  EXPECT_EQ(*e31.kernel.nu, 3.0);
  EXPECT_EQ(e31.solver.t_final, 200.0);
  const RunConfig e32 = preset_config("example32");
  EXPECT_EQ(*e32.kernel.alpha, 0.5);
  EXPECT_EQ(preset_config("heat-check").kernel.family, "none");
  EXPECT_EQ(kind_of([] { preset_config("example33"); }), ErrorKind::ConfigInvalid);
}

TEST(Presets, RandomizedIsSeeded) {
  EXPECT_EQ(randomized_config(5), randomized_config(5));
  EXPECT_NE(randomized_config(5), randomized_config(6));
  for (std::uint64_t s = 0; s < 100; ++s) EXPECT_NO_THROW(validate_config(randomized_config(s)));
}

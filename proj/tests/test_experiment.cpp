#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lacunary/experiment.hpp"

using namespace lacunary;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lacunary_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LACUNARY_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kTheorem = R"({
  "version": 1, "kind": "theorem_ensemble",
  "sequence": {"builder": "values", "values": [4, 16, 64]},
  "set": {"pattern": "periodic", "gamma": 0.5, "delta": 1},
  "grid": {"period": 1, "samples": 256},
  "ensemble": {"trials": 6, "seed": 3},
  "params": {"L": 1, "schedule": "1:2@1"},
  "output": "out"
})";

}  // namespace

TEST(Config, CollectsEveryViolation) {
  try {
    parse_config(R"({"version": 2, "kind": "greedy_growth", "params": {"count": 0, "colour": 1},
                     "output": "o", "extra": true})",
                 ".");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string all = e.what();
    EXPECT_GE(e.violations().size(), 4u) << all;
    EXPECT_NE(all.find("version"), std::string::npos);
    EXPECT_NE(all.find("extra"), std::string::npos);
    EXPECT_NE(all.find("colour"), std::string::npos);
    EXPECT_NE(all.find("count"), std::string::npos);
  }
}

TEST(Config, KindRules) {
  EXPECT_THROW(parse_config(R"({"version": 1, "kind": "nazarov_sweep", "params": {"measures": [0.5]},
                               "output": "o"})",
                            "."),
               ValidationError);
  EXPECT_THROW(parse_config(R"({"version": 1, "kind": "greedy_growth", "params": {"count": 3},
                               "grid": {"period": 1, "samples": 8}, "output": "o"})",
                            "."),
               ValidationError);
  EXPECT_THROW(parse_config("{not json", "."), ValidationError);
  EXPECT_NO_THROW(parse_config(kTheorem, "."));
}

TEST(Config, NyquistViolationWritesNothing) {
  const fs::path dir = scratch("nyquist");
  std::string text = kTheorem;
  text.replace(text.find("256"), 3, "64");
  std::ofstream(dir / "c.json") << text;
  EXPECT_THROW(run(load_config(dir / "c.json")), ValidationError);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_EQ(cli("run \"" + (dir / "c.json").string() + "\""), 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Run, DeterministicAndManifested) {
  const fs::path dir = scratch("determinism");
  std::ofstream(dir / "c.json") << kTheorem;
  const RunManifest a = run(load_config(dir / "c.json"));
  const std::string trials = slurp(dir / "out" / "theorem_trials.csv");
  const RunManifest b = run(load_config(dir / "c.json"));
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    EXPECT_EQ(a.files[i].file, b.files[i].file);
    EXPECT_EQ(a.files[i].sha256, b.files[i].sha256);
    EXPECT_EQ(sha256_hex(slurp(dir / "out" / b.files[i].file)), b.files[i].sha256);
  }
  EXPECT_EQ(slurp(dir / "out" / "theorem_trials.csv"), trials);
  const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(manifest.at("files").size(), a.files.size());
  EXPECT_EQ(manifest.at("rng"), "splitmix64-counter/v1");
  EXPECT_EQ(manifest.at("config_sha256"), sha256_hex(kTheorem));
}

TEST(Io, CsvQuoting) {
  ResultTable t{{"name", "value [unit]"}, {}};
  t.add({std::string("a,b"), 1.5});
  t.add({std::string("say \"hi\""), std::int64_t{7}});
  t.add({std::string("plain"), std::numeric_limits<double>::infinity()});
  EXPECT_EQ(to_csv(t),
            "name,value [unit]\r\n\"a,b\",1.5\r\n\"say \"\"hi\"\"\",7\r\nplain,inf\r\n");
  EXPECT_THROW(t.add({std::int64_t{1}}), DomainError);
  EXPECT_THROW(t.column("missing"), DomainError);
}

TEST(Io, FormatCellRoundTrips) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_cell(x)), x);
  EXPECT_EQ(format_cell(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Io, PlotDataSortsAndValidates) {
  const fs::path dir = scratch("plot");
  ResultTable t{{"x", "y"}, {}};
  t.add({3.0, 30.0});
  t.add({1.0, 10.0});
  t.add({2.0, 20.0});
  emit_plot_data(t, {{"x", "y"}, std::nullopt}, dir / "p.dat");
  std::istringstream in(slurp(dir / "p.dat"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.front(), '#');
  double prev = -1, x, y;
  while (in >> x >> y) {
    EXPECT_GT(x, prev);
    EXPECT_EQ(y, 10 * x);
    prev = x;
  }
  EXPECT_EQ(prev, 3.0);
  EXPECT_THROW(emit_plot_data(t, {{"x", "z"}, std::nullopt}, dir / "q.dat"), DomainError);
  EXPECT_THROW(emit_plot_data(ResultTable{{"x", "y"}, {}}, {{"x", "y"}, std::nullopt}, dir / "r.dat"),
               DomainError);
  EXPECT_FALSE(fs::exists(dir / "q.dat"));
}

TEST(Io, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("seq check --seq '{\"builder\":\"hadamard\",\"ratio\":2,\"count\":6}' --hadamard 2"), 0);
  EXPECT_EQ(cli("seq check --seq '{\"builder\":\"hadamard\",\"ratio\":2,\"count\":6}' --hadamard 1"), 2);
  EXPECT_EQ(cli("seq build --seq '{\"builder\":'"), 2);
  EXPECT_EQ(cli("seq build --seq /nonexistent/file.txt"), 2);
  EXPECT_EQ(cli("--no-such-flag"), 2);
  EXPECT_EQ(cli("conc nazarov --set '{\"pattern\":\"interval\",\"lo\":0,\"hi\":0.5}' "
                "--seq '{\"builder\":\"values\",\"values\":[0,1]}'"),
            0);
  EXPECT_EQ(cli("synth check --seq '{\"builder\":\"values\",\"values\":[4,16]}' --grid 1,16"), 2);
}

// End-to-end checks of the command-line surface: subcommand outputs, config
// overrides, and the exit-code contract (0 ok, 2 invalid input, 3 resource
// guard, 4 certificate refusal).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "latgibbs/exactgibbs.hpp"
#include "latgibbs/model.hpp"
#include "latgibbs/numeric.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

#define EXPECT(cond, what)                                          \
  do {                                                              \
    if (!(cond)) {                                                  \
      std::printf("[FAIL] %s:%d %s\n", __FILE__, __LINE__, what);   \
      ++g_failures;                                                 \
    }                                                               \
  } while (0)

std::string g_cli;
fs::path g_dir;

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json run_json(const std::string& args, int expect_exit = 0) {
  const fs::path out = g_dir / "out.json";
  const int rc = run(args + " --out " + out.string());
  if (rc != expect_exit) {
    std::printf("[FAIL] exit %d != %d for: %s\n", rc, expect_exit, args.c_str());
    ++g_failures;
    return {};
  }
  std::ifstream in(out);
  return nlohmann::json::parse(in, nullptr, false);
}

void write_fixture_configs(const fs::path& model_path, const fs::path& event_path,
                           double lambda = 1.0 / 9600.0) {
  std::ofstream model(model_path);
  model << "{\"nu\": 1, \"lambda\": " << latgibbs::fmt17(lambda)
        << ", \"model\": \"ising\", \"couplings\": 1.0, \"fields\": "
        << latgibbs::fmt17(0.5 * std::log(2.0 / 3.0)) << "}\n";
  std::ofstream event(event_path);
  event << "{\"base\": [[0]], \"clauses\": [{\"site\": [0], \"allowed\": [1.0]}]}\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_dir = fs::temp_directory_path() / ("latgibbs_cli_tests_" + std::to_string(::getpid()));
  fs::create_directories(g_dir);

  const fs::path model = g_dir / "model.json";
  const fs::path event = g_dir / "event.json";
  write_fixture_configs(model, event);
  const std::string io = " --model " + model.string() + " --event " + event.string();

  // size: gap pair needs two interior vertices
  {
    const auto j = run_json("size --points \"[0],[3]\" --nu 1");
    EXPECT(j["S"] == 3, "S([0],[3]) = 3");
    EXPECT(j["graph"]["edges"].size() == 3, "gap tree has 3 edges");
    EXPECT(j["track"].size() == 7, "track walks 2S steps");
  }
  {
    const auto j = run_json("size --points \"[0,0],[1,1]\" --nu 2");
    EXPECT(j["S"] == 2, "S(diagonal) = 2");
  }
  {
    const auto j = run_json("size --points \"[4]\" --nu 1");
    EXPECT(j["S"] == 0, "singleton has size 0");
    EXPECT(j["track"].size() == 1, "singleton track is the point itself");
  }
  EXPECT(run("size --points \"[0,0],[1,1]\" --nu 1") == 2, "dimension mismatch exits 2");

  // constants: values plus all lemma checks pass
  {
    const auto j = run_json("constants --nu 1 --r 2");
    EXPECT(j["L"] == 14, "L(1,2) = 14");
    EXPECT(j["lambda0_denominator"] == 2867200, "lambda0 denominator 50*14*8^4");
    bool all_pass = !j["checks"].empty();
    for (const auto& c : j["checks"]) all_pass = all_pass && c["pass"].get<bool>();
    EXPECT(all_pass, "every counting check passes");
  }

  // finite-prob agrees with the in-process oracle bit for bit
  {
    const auto j = run_json("finite-prob" + io + " --N 3");
    latgibbs::FieldSpec f;
    f.default_h = 0.5 * std::log(2.0 / 3.0);
    const auto m = latgibbs::build_ising(1, 1.0 / 9600.0, {1.0}, f);
    latgibbs::CylinderEvent a;
    a.base = latgibbs::Region({{0}});
    a.clauses.push_back({{latgibbs::Point{0}, {+1.0}}});
    EXPECT(j["P_N"].get<double>() == latgibbs::gibbs_probability(m, 3, a),
           "finite-prob matches the library");
  }

  // expand with an oracle volume attaches the comparison
  {
    const auto j = run_json("expand" + io + " --n-max 4 --N 5");
    EXPECT(j["certified"] == true, "fixture is certified");
    EXPECT(!j["oracle"].is_null(), "oracle block present");
    EXPECT(j["oracle"]["abs_diff"].get<double>() <= 1e-10, "oracle agrees");
    EXPECT(j["terms"].size() == 5, "terms 0..4");
  }

  // certificate refusal: nonzero exit, report still written
  {
    const auto j = run_json("expand" + io + " --n-max 4 --lambda 0.01", 4);
    EXPECT(j["lambda_certified"] == false, "refusal recorded in the report");
    EXPECT(!j["warnings"].empty(), "refusal warning present");
  }
  EXPECT(run("expand" + io + " --n-max 4 --set lambda=0.01") == 4,
         "--set override also refuses");

  // verify: all checks pass and consistency is within the tails
  {
    const auto j = run_json("verify" + io + " --n-max 4 --N 5");
    EXPECT(j["lambda_certified"] == true, "fixture certified");
    bool all_pass = !j["checks"].empty();
    for (const auto& c : j["checks"]) all_pass = all_pass && c["pass"].get<bool>();
    EXPECT(all_pass, "verify checks pass");
    EXPECT(j["consistency"]["within_tails"] == true, "consistency within tails");
    EXPECT(j["consistency"]["permutation_exact"] == true, "permutation exact");
  }
  EXPECT(run("verify" + io + " --n-max 4 --N 5 --lambda 0.01") == 4,
         "verify refuses above lambda0");

  // resource guard: 2^27 configurations exceed the default budget
  EXPECT(run("finite-prob" + io + " --N 13") == 3, "config budget exits 3");

  // validation failures
  EXPECT(run("finite-prob --model /nonexistent.json --event " + event.string() +
             " --N 2") == 2,
         "missing file exits 2");
  {
    const fs::path bad = g_dir / "bad.json";
    std::ofstream(bad) << "{not json";
    EXPECT(run("finite-prob --model " + bad.string() + " --event " +
               event.string() + " --N 2") == 2,
           "malformed json exits 2");
  }
  EXPECT(run("finite-prob" + io + " --N 2 --format csv") == 2,
         "csv unsupported here exits 2");
  EXPECT(run("nonsense") == 2, "unknown subcommand exits 2");

  if (g_failures == 0) {
    std::printf("cli_tests: all checks passed\n");
    return 0;
  }
  std::printf("cli_tests: %d checks FAILED\n", g_failures);
  return 1;
}

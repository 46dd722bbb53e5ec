// Command-line driver for scenario files and the bundled corpus.
#include "grc/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace grc;

namespace {

const std::vector<std::string> kReductionTasks{"reduce", "reduce-gcs", "reduce-dirac", "ham-reduce"};

fs::path corpus_dir() {
  if (const char* env = std::getenv("GRC_CORPUS_DIR"); env && *env) return env;
  return GRC_CORPUS_DEFAULT;
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  const fs::path dir = corpus_dir();
  if (!fs::is_directory(dir)) throw InputError("corpus directory not found: " + dir.string());
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".scn") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Maps exceptions to the exit-code contract.
template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact graded-geometry engine for Courant reduction scenarios"};
  app.require_subcommand(1);
  app.fallthrough();
  RunOptions opts;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--samples", opts.samples, "random sample points per check")->check(CLI::Range(0, 1000));
  app.add_option("--max-degree", opts.max_degree, "coefficient degree of random sections")->check(CLI::Range(0, 8));

  std::string file, out;
  auto* validate = app.add_subcommand("validate", "run the validation tasks of a scenario");
  validate->add_option("file", file)->required();
  auto* reduce = app.add_subcommand("reduce", "run the coisotropic reductions of a scenario");
  reduce->add_option("file", file)->required();
  auto* ham = app.add_subcommand("ham-reduce", "run the hamiltonian reduction of a scenario");
  ham->add_option("file", file)->required();
  auto* report = app.add_subcommand("report", "run every task and write the report");
  report->add_option("file", file)->required();
  report->add_option("--out", out, "report path")->required();
  auto* corpus = app.add_subcommand("corpus", "list or run the bundled scenarios");
  bool list = false, run_all = false, update = false;
  corpus->add_flag("--list", list, "list scenario names");
  corpus->add_flag("--run-all", run_all, "run all scenarios and compare with golden reports");
  corpus->add_flag("--update-golden", update, "rewrite golden reports (with --run-all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (*seed_opt) opts.seed = seed;

  auto run_file = [&](const std::vector<std::string>& wanted, bool everything, const std::string& fallback) {
    return guarded([&] {
      ScenarioFile f = parse_scenario(file);
      std::vector<std::string> only;
      for (const auto& t : f.tasks) {
        const bool red = std::find(kReductionTasks.begin(), kReductionTasks.end(), t.name) != kReductionTasks.end();
        const bool pick = everything || (wanted.empty() ? !red : std::find(wanted.begin(), wanted.end(), t.name) != wanted.end());
        if (pick && std::find(only.begin(), only.end(), t.name) == only.end()) only.push_back(t.name);
      }
      if (only.empty() && !fallback.empty()) {
        const bool have = fallback == "reduce" ? f.coiso && !f.coiso_P : f.ham.has_value();
        if (!have) throw InputError(file + ": nothing to " + fallback);
        f.tasks.push_back({fallback, false, 0});
        only.push_back(fallback);
      }
      if (only.empty()) only.push_back("<none>");
      const ScenarioReport r = run_scenario(f, opts, only);
      if (everything && !out.empty()) {
        std::ofstream o(out, std::ios::binary);
        if (!o) throw InputError("cannot write " + out);
        o << r.text();
      } else {
        std::cout << r.text();
      }
      return r.exit_code();
    });
  };

  if (*validate) return run_file({}, false, "");
  if (*reduce) return run_file({"reduce", "reduce-gcs", "reduce-dirac"}, false, "reduce");
  if (*ham) return run_file({"ham-reduce"}, false, "ham-reduce");
  if (*report) return run_file({}, true, "");

  return guarded([&] {
    if (list == run_all) throw InputError("corpus needs exactly one of --list, --run-all");
    const auto files = corpus_files();
    if (list) {
      for (const auto& p : files) std::cout << p.stem().string() << "\n";
      return 0;
    }
    int code = 0;
    for (const auto& p : files) {
      const std::string name = p.stem().string();
      const fs::path golden = corpus_dir() / "golden" / (name + ".report");
      int c = 0;
      std::string text;
      const int status = guarded([&] {
        const ScenarioReport r = run_scenario(parse_scenario(p.string()), opts);
        text = r.text();
        c = r.exit_code();
        return c;
      });
      std::string g = "missing";
      if (status == c && !text.empty()) {
        if (update) {
          fs::create_directories(golden.parent_path());
          std::ofstream(golden, std::ios::binary) << text;
          g = "updated";
        } else if (fs::exists(golden)) {
          g = slurp(golden) == text ? "ok" : "mismatch";
        }
      }
      std::cout << name << " exit " << status << " golden " << g << "\n";
      code = std::max(code, status);
      if (g == "mismatch" || g == "missing") code = std::max(code, 1);
    }
    return code;
  });
}

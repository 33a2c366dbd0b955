#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "graver_opt/document.hpp"

namespace {

using namespace graver_opt;

unsigned default_threads() {
  if (const char* env = std::getenv("GRAVER_OPT_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring GRAVER_OPT_THREADS=" << env << "\n";
  }
  return 1;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int emit(const RunOutcome& out) {
  std::cout << out.document.dump(2) << "\n";
  if (out.exit_code != kExitOptimal && out.document.contains("message")) {
    std::cerr << out.document["message"].get<std::string>() << "\n";
  }
  return out.exit_code;
}

int emit_error(const std::exception& e) {
  std::cerr << e.what() << "\n";
  std::cout << Json{{"status", "error"}, {"message", e.what()}}.dump(2) << "\n";
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graver basis augmentation for integer and N-fold programs"};
  app.require_subcommand(1);

  RunFlags flags;
  flags.threads = default_threads();
  std::string path;
  std::string mode;
  std::string radius;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("path", path, "instance document (- for stdin)")->required();
    cmd->add_option("--threads", flags.threads, "worker threads for direction evaluation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--graver-cap", flags.graver_cap, "largest N tried when detecting the Graver complexity");
    cmd->add_option("--direct-threshold", flags.direct_threshold,
                    "compute N-fold bases directly when N*n is at most this");
    cmd->add_option("--block-cap", flags.block_cap, "largest N used to collect two-stage building blocks");
  };

  auto* solve = app.add_subcommand("solve", "solve an instance, print a result document");
  add_common(solve);
  solve->add_flag("--trace", flags.trace, "include the augmentation trace");
  solve->add_option("--mode", mode, "ip or lp (ip/lp documents)")->check(CLI::IsMember({"ip", "lp"}));

  auto* basis = app.add_subcommand("basis", "print the circuits or Graver basis of the instance matrix");
  add_common(basis);
  auto* group = basis->add_option_group("basis kind");
  bool want_circuits = false, want_graver = false, want_composite = false;
  group->add_flag("--circuits", want_circuits);
  group->add_flag("--graver", want_graver);
  group->add_flag("--composite", want_composite);
  group->require_option(1);

  auto* oracle = app.add_subcommand("oracle", "exhaustive enumeration of the feasible set");
  add_common(oracle);
  oracle->add_option("--radius", radius, "upper bound lower+r for unbounded coordinates");
  oracle->add_option("--cell-cap", flags.cell_cap, "largest search space enumerated");

  auto* model = app.add_subcommand("model", "translate a model document to an nfold document");
  add_common(model);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    const InstanceDocument doc = parse_document_text(read_file(path));
    if (!mode.empty()) flags.mode = mode;
    if (!radius.empty()) flags.radius = int_from_json(Json(radius));
    if (solve->parsed()) return emit(run_solve(doc, flags));
    if (basis->parsed()) {
      const BasisKind kind = want_circuits ? BasisKind::kCircuits
                             : want_graver ? BasisKind::kGraver
                                           : BasisKind::kComposite;
      return emit(run_basis(doc, kind, flags));
    }
    if (oracle->parsed()) return emit(run_oracle(doc, flags));
    if (model->parsed()) return emit(run_model(doc));
  } catch (const std::exception& e) {
    return emit_error(e);
  }
  return kExitError;
}
